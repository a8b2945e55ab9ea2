#include "mompoly/measures.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

namespace mompoly {

FiniteMeasure::FiniteMeasure(std::vector<Point> atoms, std::vector<Rational> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw Error("a measure needs at least one atom");
  if (atoms_.size() != weights_.size()) throw DimensionError("one weight per atom is required");
  for (auto& a : atoms_)
    for (auto& c : a) c.canonicalize();
  for (auto& w : weights_) w.canonicalize();
  n_ = atoms_[0].size();
  if (n_ == 0) throw DimensionError("atoms need at least one coordinate");
  Rational total = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].size() != n_) throw DimensionError("atoms have different dimensions");
    if (weights_[i] <= 0) throw Error("weights must be positive");
    total += weights_[i];
  }
  if (total != 1) throw Error("weights must sum to 1, got " + total.get_str());
  std::set<Point> seen(atoms_.begin(), atoms_.end());
  if (seen.size() != atoms_.size()) throw Error("atoms must be distinct");
}

FiniteMeasure FiniteMeasure::dirac(Point p) { return FiniteMeasure({std::move(p)}, {Rational(1)}); }

Rational monomial_value(const Exponents& e, const Point& x) {
  if (e.size() != x.size()) throw DimensionError("point dimension mismatch");
  Rational v = 1;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] == 0) continue;
    mpq_class p;
    mpz_pow_ui(p.get_num_mpz_t(), x[j].get_num_mpz_t(), static_cast<unsigned long>(e[j]));
    mpz_pow_ui(p.get_den_mpz_t(), x[j].get_den_mpz_t(), static_cast<unsigned long>(e[j]));
    p.canonicalize();
    v *= p;
  }
  return v;
}

Rational FiniteMeasure::moment(const Exponents& e) const {
  Rational s = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weights_[i] * monomial_value(e, atoms_[i]);
  return s;
}

Rational eval_poly(const MomentPolynomial& f, const FiniteMeasure& mu, const Point& x) {
  if (f.arity() != mu.arity()) throw DimensionError("measure dimension mismatch");
  std::map<MomentSymbol, Rational> cache;
  Rational total = 0;
  for (const auto& [m, c] : f.terms()) {
    Rational v = c;
    if (!m.is_pure()) {
      if (x.size() != f.arity()) throw DimensionError("a point is needed for non-pure polynomials");
      v *= monomial_value(m.x(), x);
    }
    for (const auto& s : m.symbols()) {
      auto it = cache.find(s);
      if (it == cache.end()) it = cache.emplace(s, mu.moment(s.exponents())).first;
      v *= it->second;
    }
    total += v;
  }
  return total;
}

Rational eval_poly(const MomentPolynomial& f, const FiniteMeasure& mu) { return eval_poly(f, mu, {}); }

FiniteProbabilitySpace::FiniteProbabilitySpace(std::vector<Rational> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error("a probability space needs at least one point");
  Rational total = 0;
  for (const auto& w : weights_) {
    if (w <= 0) throw Error("weights must be positive");
    total += w;
  }
  if (total != 1) throw Error("weights must sum to 1");
}

void FiniteProbabilitySpace::add_variable(const std::string& name, std::vector<Rational> values) {
  if (values.size() != weights_.size()) throw DimensionError("random variable " + name + " has the wrong length");
  if (std::find(order_.begin(), order_.end(), name) != order_.end())
    throw Error("duplicate random variable " + name);
  order_.push_back(name);
  values_.push_back(std::move(values));
}

const std::vector<Rational>& FiniteProbabilitySpace::variable(const std::string& name) const {
  auto it = std::find(order_.begin(), order_.end(), name);
  if (it == order_.end()) throw Error("unknown random variable " + name);
  return values_[static_cast<std::size_t>(it - order_.begin())];
}

namespace {

std::vector<Point> sample_points(const FiniteProbabilitySpace& space,
                                 const std::vector<std::string>& names) {
  std::vector<const std::vector<Rational>*> cols;
  for (const auto& nm : names) cols.push_back(&space.variable(nm));
  std::vector<Point> pts(space.size(), Point(names.size()));
  for (std::size_t k = 0; k < space.size(); ++k)
    for (std::size_t j = 0; j < names.size(); ++j) pts[k][j] = (*cols[j])[k];
  return pts;
}

}  // namespace

FiniteMeasure pushforward(const FiniteProbabilitySpace& space, const std::vector<std::string>& names) {
  if (names.empty()) throw DimensionError("at least one random variable is required");
  std::map<Point, Rational> law;
  auto pts = sample_points(space, names);
  for (std::size_t k = 0; k < pts.size(); ++k) law[pts[k]] += space.weights()[k];
  std::vector<Point> atoms;
  std::vector<Rational> weights;
  for (auto& [p, w] : law) {
    atoms.push_back(p);
    weights.push_back(w);
  }
  return FiniteMeasure(std::move(atoms), std::move(weights));
}

std::vector<Rational> eval_random_vars(const MomentPolynomial& f, const FiniteProbabilitySpace& space,
                                       const std::vector<std::string>& names) {
  if (names.size() != f.arity()) throw DimensionError("one random variable per polynomial variable");
  FiniteMeasure law = pushforward(space, names);
  auto pts = sample_points(space, names);
  std::vector<Rational> out;
  out.reserve(pts.size());
  bool is_pure = f.is_pure();
  Rational pure_value;
  if (is_pure) pure_value = eval_poly(f, law);
  for (const auto& p : pts) out.push_back(is_pure ? pure_value : eval_poly(f, law, p));
  return out;
}

bool rules_hold(const RuleSet& rules, const FiniteMeasure& mu) {
  for (const auto& r : rules.power_rules())
    for (const auto& a : mu.atoms()) {
      Exponents e(mu.arity(), 0);
      e[r.var] = r.power;
      if (monomial_value(e, a) != eval_poly(r.replacement, mu, a)) return false;
    }
  for (const auto& [s, rep] : rules.symbol_rules())
    if (mu.moment(s.exponents()) != eval_poly(rep, mu)) return false;
  for (const auto& r : rules.product_rules())
    if (eval_poly(MomentPolynomial(r.pattern), mu) != eval_poly(r.replacement, mu)) return false;
  return true;
}

namespace {

mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

}  // namespace

ClassicalProgram tchakaloff_reformulate(const ProblemSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n;
  int d = spec.objective.is_zero() ? 0 : spec.objective.degree();
  for (const auto& t : spec.S2)
    if (!t.is_zero()) d = std::max(d, t.degree());
  mpz_class big_d = binomial(n + static_cast<unsigned long>(d), static_cast<unsigned long>(d));
  if (big_d > 100000) throw SpecError("reformulation would need more than 1e5 atoms");
  const std::size_t D = big_d.get_ui();
  const std::size_t N = n + D * n + D;

  ClassicalProgram out;
  out.num_vars = N;
  out.atoms = D;
  out.degree = d;
  out.sense = spec.sense;
  for (std::size_t j = 0; j < n; ++j) out.var_names.push_back("X" + std::to_string(j + 1));
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.var_names.push_back("Y" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (std::size_t i = 0; i < D; ++i) out.var_names.push_back("alpha" + std::to_string(i + 1));

  auto var = [&](std::size_t idx) { return MomentPolynomial::x(N, idx); };
  auto alpha = [&](std::size_t i) { return var(n + D * n + i); };
  std::vector<MomentPolynomial> xs, none;
  for (std::size_t j = 0; j < n; ++j) xs.push_back(var(j));
  std::vector<std::vector<MomentPolynomial>> ys(D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < n; ++j) ys[i].push_back(var(n + i * n + j));

  auto symbol_image = [&](const MomentSymbol& s) {
    MomentPolynomial acc(N);
    for (std::size_t i = 0; i < D; ++i) {
      MomentPolynomial term = alpha(i);
      for (std::size_t j = 0; j < n; ++j)
        if (s.exponents()[j] > 0) term = term * ys[i][j].pow(static_cast<unsigned>(s.exponents()[j]));
      acc += term;
    }
    return acc;
  };
  auto at = [&](const MomentPolynomial& f, const std::vector<MomentPolynomial>& point) {
    return substitute(f, N, point.empty() ? xs : point, symbol_image);
  };

  out.objective = at(spec.objective, xs);
  for (const auto& s : spec.S1) {
    out.inequalities.push_back(at(s, xs));
    for (std::size_t i = 0; i < D; ++i) out.inequalities.push_back(at(s, ys[i]));
  }
  for (const auto& t : spec.S2) out.inequalities.push_back(at(t, xs));
  for (std::size_t i = 0; i < D; ++i) out.inequalities.push_back(alpha(i));

  MomentPolynomial mass(N, -1);
  for (std::size_t i = 0; i < D; ++i) mass += alpha(i);
  out.equalities.push_back(mass);
  for (const auto& r : spec.rules.power_rules()) {
    MomentPolynomial lhs = MomentPolynomial::x(n, r.var, r.power) - r.replacement;
    out.equalities.push_back(at(lhs, xs));
    for (std::size_t i = 0; i < D; ++i) out.equalities.push_back(at(lhs, ys[i]));
  }
  for (const auto& [s, rep] : spec.rules.symbol_rules())
    out.equalities.push_back(at(MomentPolynomial(MomentMonomial::symbol(s)) - rep, xs));
  for (const auto& r : spec.rules.product_rules())
    out.equalities.push_back(at(MomentPolynomial(r.pattern) - r.replacement, xs));
  return out;
}

namespace {

void compositions(int total, std::size_t parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 1; v <= total - static_cast<int>(parts) + 1; ++v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}

void combinations(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i + (k - cur.size()) <= n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

bool linear_in_weights(const ProblemSpec& spec) {
  if (!spec.S2.empty() || !spec.rules.symbol_rules().empty() || !spec.rules.product_rules().empty())
    return false;
  for (const auto& [m, c] : spec.objective.terms())
    if (m.symbols().size() > 1) return false;
  return true;
}

// Polynomials compiled against a shared symbol table; the atom values of every
// symbol are tabulated once so each weight vector costs a few dot products.
class CompiledSet {
 public:
  std::size_t add(const MomentPolynomial& f) {
    Poly p;
    for (const auto& [m, c] : f.terms()) {
      Term t{c, m.x(), !m.is_pure(), {}};
      for (const auto& sym : m.symbols()) t.syms.push_back(index(sym));
      p.push_back(std::move(t));
    }
    polys_.push_back(std::move(p));
    return polys_.size() - 1;
  }

  void tabulate(const std::vector<Point>& atoms) {
    table_.assign(atoms.size(), std::vector<Rational>(syms_.size()));
    for (std::size_t a = 0; a < atoms.size(); ++a)
      for (std::size_t s = 0; s < syms_.size(); ++s) table_[a][s] = monomial_value(syms_[s].exponents(), atoms[a]);
  }

  void set_measure(const std::vector<std::size_t>& atoms, const std::vector<Rational>& w) {
    moments_.assign(syms_.size(), Rational(0));
    for (std::size_t s = 0; s < syms_.size(); ++s)
      for (std::size_t k = 0; k < atoms.size(); ++k) moments_[s] += w[k] * table_[atoms[k]][s];
  }

  Rational eval(std::size_t id, const Point& x) const {
    Rational total = 0;
    for (const auto& t : polys_[id]) {
      Rational v = t.c;
      if (t.has_x) v *= monomial_value(t.x, x);
      for (auto s : t.syms) v *= moments_[s];
      total += v;
    }
    return total;
  }

 private:
  struct Term {
    Rational c;
    Exponents x;
    bool has_x;
    std::vector<std::size_t> syms;
  };
  using Poly = std::vector<Term>;

  std::size_t index(const MomentSymbol& s) {
    auto it = std::find(syms_.begin(), syms_.end(), s);
    if (it != syms_.end()) return static_cast<std::size_t>(it - syms_.begin());
    syms_.push_back(s);
    return syms_.size() - 1;
  }

  std::vector<MomentSymbol> syms_;
  std::vector<Poly> polys_;
  std::vector<std::vector<Rational>> table_;
  std::vector<Rational> moments_;
};

struct Candidate {
  bool found = false;
  Rational value;
  std::size_t combo = 0, weight = 0, point = 0;
  std::size_t evaluated = 0;
};

}  // namespace

BruteForceResult brute_force_opt(const ProblemSpec& spec, const BruteForceOptions& options) {
  validate(spec);
  const std::size_t n = spec.n;
  std::vector<Point> cands = options.candidates;
  if (cands.empty()) {
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      Point p(n);
      std::size_t c = code;
      for (std::size_t j = n; j-- > 0;) {
        p[j] = Rational(static_cast<long>(c % 3) - 1);
        c /= 3;
      }
      cands.push_back(p);
    }
  }
  // atoms must satisfy the x-constraints and the power rules
  std::vector<Point> atoms;
  for (const auto& p : cands) {
    if (p.size() != n) throw DimensionError("candidate point dimension mismatch");
    bool ok = true;
    FiniteMeasure dirac = FiniteMeasure::dirac(p);
    for (const auto& s : spec.S1)
      if (eval_poly(s, dirac, p) < 0) ok = false;
    for (const auto& r : spec.rules.power_rules()) {
      Exponents e(n, 0);
      e[r.var] = r.power;
      if (monomial_value(e, p) != eval_poly(r.replacement, dirac, p)) ok = false;
    }
    if (ok) atoms.push_back(p);
  }
  BruteForceResult result;
  if (atoms.empty()) return result;

  std::vector<Point> xs = spec.objective.is_pure() ? std::vector<Point>{Point{}} : atoms;
  std::size_t max_support = linear_in_weights(spec) ? 1 : std::min(options.support, atoms.size());
  if (options.grid < 1) throw Error("weight grid must be positive");
  max_support = std::min<std::size_t>(max_support, static_cast<std::size_t>(options.grid));

  std::vector<std::vector<std::size_t>> combos;
  std::vector<std::vector<std::vector<int>>> weight_sets(max_support + 1);
  for (std::size_t k = 1; k <= max_support; ++k) {
    std::vector<std::size_t> cur;
    combinations(atoms.size(), k, 0, cur, combos);
    std::vector<int> wc;
    compositions(options.grid, k, wc, weight_sets[k]);
  }
  const bool maximize = spec.sense == Sense::Max;
  auto better = [&](const Rational& a, const Rational& b) { return maximize ? a > b : a < b; };

  // pure polynomials that must vanish for the rules, then S2, then the objective
  CompiledSet base;
  std::vector<std::size_t> zero_ids, s2_ids;
  for (const auto& [sym, rep] : spec.rules.symbol_rules())
    zero_ids.push_back(base.add(MomentPolynomial(MomentMonomial::symbol(sym)) - rep));
  for (const auto& r : spec.rules.product_rules())
    zero_ids.push_back(base.add(MomentPolynomial(r.pattern) - r.replacement));
  for (const auto& t : spec.S2) s2_ids.push_back(base.add(t));
  const std::size_t obj_id = base.add(spec.objective);
  base.tabulate(atoms);

  auto work = [&](unsigned tid, unsigned stride, Candidate& best) {
    CompiledSet ev = base;
    for (std::size_t ci = tid; ci < combos.size(); ci += stride) {
      const auto& combo = combos[ci];
      const auto& ws = weight_sets[combo.size()];
      for (std::size_t wi = 0; wi < ws.size(); ++wi) {
        std::vector<Rational> w;
        for (int v : ws[wi]) w.emplace_back(v, options.grid);
        for (auto& q : w) q.canonicalize();
        ev.set_measure(combo, w);
        bool ok = true;
        for (auto id : zero_ids)
          if (ev.eval(id, {}) != 0) ok = false;
        for (auto id : s2_ids)
          if (ok && ev.eval(id, {}) < 0) ok = false;
        if (!ok) continue;
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
          Rational v = ev.eval(obj_id, xs[xi]);
          ++best.evaluated;
          if (!best.found || better(v, best.value)) {
            best.found = true;
            best.value = v;
            best.combo = ci;
            best.weight = wi;
            best.point = xi;
          }
        }
      }
    }
  };

  unsigned jobs = std::max(1u, options.jobs);
  std::vector<Candidate> partial(jobs);
  if (jobs == 1) {
    work(0, 1, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, jobs, std::ref(partial[t]));
    for (auto& th : pool) th.join();
  }
  Candidate best;
  for (const auto& c : partial) {
    best.evaluated += c.evaluated;
    if (!c.found) continue;
    auto key = std::tie(c.combo, c.weight, c.point);
    auto bkey = std::tie(best.combo, best.weight, best.point);
    if (!best.found || better(c.value, best.value) || (c.value == best.value && key < bkey)) {
      std::size_t ev = best.evaluated;
      best = c;
      best.evaluated = ev;
    }
  }
  result.evaluated = best.evaluated;
  if (!best.found) return result;
  result.feasible = true;
  result.value = best.value;
  std::vector<Point> pts;
  for (auto idx : combos[best.combo]) pts.push_back(atoms[idx]);
  std::vector<Rational> w;
  for (int v : weight_sets[pts.size()][best.weight]) {
    w.emplace_back(v, options.grid);
    w.back().canonicalize();
  }
  result.measure = FiniteMeasure(pts, w);
  result.x = xs[best.point];
  return result;
}

}  // namespace mompoly
