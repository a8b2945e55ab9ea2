#include "mompoly/relaxation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <thread>

namespace mompoly {

namespace {

struct BlockJob {
  std::string label;
  std::vector<std::string> index;
  std::vector<MomentPolynomial> left;  // generator (i, j) = expand(left[i] * left[j])
  std::function<MomentPolynomial(const MomentPolynomial&, Reducer&)> expand;
  std::vector<std::pair<MomentMonomial, MomentMonomial>> pairs;  // mixed blocks only
  MomentPolynomial weight{1};
};

int half_room(int r, const MomentPolynomial& s) {
  int d = s.is_zero() ? 0 : s.degree();
  int room = 2 * r - d;
  return room < 0 ? -1 : room / 2;
}

std::string label_of(const MomentPolynomial& s) { return to_string(s); }

GeneratorBlock run_job(const BlockJob& job, const RuleSet& rules) {
  Reducer red(rules);
  GeneratorBlock b;
  b.label = job.label;
  b.index = job.index;
  std::size_t d = job.index.size();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      MomentPolynomial g(rules.arity());
      if (job.pairs.empty()) {
        g = job.expand(poly_mul(job.left[i], job.left[j]), red);
      } else {
        // m(u_i u_j s) v_i v_j
        const auto& [ui, vi] = job.pairs[i];
        const auto& [uj, vj] = job.pairs[j];
        MomentPolynomial inner = red.reduce(formal_moment(poly_mul(MomentPolynomial(ui * uj), job.weight)));
        g = red.reduce(poly_mul(inner, MomentPolynomial(vi * vj)));
      }
      if (!g.is_zero()) b.entries.push_back({i, j, std::move(g)});
    }
  return b;
}

std::vector<MomentPolynomial> as_polys(const std::vector<MomentMonomial>& basis) {
  std::vector<MomentPolynomial> out;
  out.reserve(basis.size());
  for (const auto& m : basis) out.emplace_back(m);
  return out;
}

std::vector<std::string> labels(const std::vector<MomentMonomial>& basis) {
  std::vector<std::string> out;
  for (const auto& m : basis) out.push_back(to_string(m));
  return out;
}

BlockJob square_job(const std::string& label, const std::vector<MomentMonomial>& basis,
                    const MomentPolynomial& s, bool moment) {
  BlockJob job;
  job.label = label;
  job.index = labels(basis);
  job.left = as_polys(basis);
  job.weight = s;
  if (moment)
    job.expand = [s](const MomentPolynomial& p, Reducer& red) { return red.reduce(formal_moment(poly_mul(p, s))); };
  else
    job.expand = [s](const MomentPolynomial& p, Reducer& red) { return red.reduce(poly_mul(p, s)); };
  return job;
}

std::vector<BlockJob> plan(const ProblemSpec& spec, Cone cone) {
  const std::size_t n = spec.n;
  const int r = spec.order;
  const MomentPolynomial one(n, Rational(1));
  std::vector<MomentPolynomial> s_with_one{one};
  for (const auto& s : spec.S1)
    if (!s.is_zero()) s_with_one.push_back(s);

  std::vector<BlockJob> jobs;
  auto tag = [](const char* kind, const MomentPolynomial& s) { return std::string(kind) + ":" + label_of(s); };
  switch (cone) {
    case Cone::Qm:
      for (const auto& s : s_with_one) {
        int room = half_room(r, s);
        if (room < 0) continue;
        jobs.push_back(square_job(tag("m", s), monomial_basis(n, room, spec.rules, BasisKind::Full), s, true));
      }
      for (const auto& t : spec.S2) {
        int room = half_room(r, t);
        if (t.is_zero() || room < 0) continue;
        jobs.push_back(square_job(tag("t", t), monomial_basis(n, room, spec.rules, BasisKind::Pure), t, false));
      }
      break;
    case Cone::Qqm: {
      for (const auto& s : s_with_one) {
        int room = half_room(r, s);
        if (room < 0) continue;
        auto us = monomial_basis(n, room, spec.rules, BasisKind::XOnly);
        auto vs = monomial_basis(n, room, spec.rules, BasisKind::Full);
        BlockJob job;
        job.label = tag("mix", s);
        job.weight = s;
        for (const auto& u : us)
          for (const auto& v : vs)
            if (u.degree() + v.degree() <= room) {
              job.pairs.emplace_back(u, v);
              job.index.push_back("(" + to_string(u) + ", " + to_string(v) + ")");
            }
        jobs.push_back(std::move(job));
      }
      std::vector<MomentPolynomial> direct = spec.S1;
      direct.insert(direct.end(), spec.S2.begin(), spec.S2.end());
      for (const auto& s : direct) {
        int room = half_room(r, s);
        if (s.is_zero() || room < 0) continue;
        jobs.push_back(square_job(tag("sq", s), monomial_basis(n, room, spec.rules, BasisKind::Full), s, false));
      }
      break;
    }
    case Cone::Classical:
      for (const auto& s : s_with_one) {
        int room = half_room(r, s);
        if (room < 0) continue;
        jobs.push_back(square_job(tag("x", s), monomial_basis(n, room, spec.rules, BasisKind::XOnly), s, false));
      }
      break;
  }
  return jobs;
}

// Extra scalar unknown: coeff is its polynomial coefficient in the identity.
struct ScalarTerm {
  std::string name;
  bool nonneg = false;
  MomentPolynomial coeff{1};
  Rational cost;
};

// Gram form: sum_blocks <G, generators> + sum_k s_k coeff_k = rhs, row per reduced monomial.
SdpProblem assemble_gram(const std::string& label, const std::vector<GeneratorBlock>& blocks,
                         const MomentPolynomial& rhs, const std::vector<ScalarTerm>& scalars,
                         const Rational& bound_scale) {
  std::map<MomentMonomial, std::size_t> row_of;
  auto touch = [&](const MomentPolynomial& p) {
    for (const auto& [m, c] : p.terms()) row_of.emplace(m, 0);
  };
  for (const auto& b : blocks)
    for (const auto& e : b.entries) touch(e.value);
  touch(rhs);
  for (const auto& s : scalars) touch(s.coeff);

  SdpProblem p;
  p.label = label;
  p.form = SdpForm::Gram;
  p.bound_scale = bound_scale;
  p.rows.resize(row_of.size());
  std::size_t k = 0;
  for (auto& [m, idx] : row_of) {
    idx = k;
    p.rows[k].label = to_string(m);
    p.rows[k].rhs = rhs.coefficient(m);
    ++k;
  }
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    p.blocks.push_back({blocks[bi].label, blocks[bi].dim()});
    for (const auto& e : blocks[bi].entries)
      for (const auto& [m, c] : e.value.terms()) p.rows[row_of.at(m)].entries.push_back({bi, e.i, e.j, c});
  }
  for (std::size_t si = 0; si < scalars.size(); ++si) {
    p.scalars.push_back({scalars[si].name, scalars[si].nonneg});
    p.scalar_cost.push_back(scalars[si].cost);
    for (const auto& [m, c] : scalars[si].coeff.terms()) p.rows[row_of.at(m)].scalars.push_back({si, c});
  }
  return p;
}

// The objective in the min convention: certify g - alpha in the cone.
MomentPolynomial min_target(const ProblemSpec& spec) {
  MomentPolynomial g = reduce(spec.objective, spec.rules);
  return spec.sense == Sense::Max ? -g : g;
}

Rational sense_sign(const ProblemSpec& spec) { return spec.sense == Sense::Max ? Rational(-1) : Rational(1); }

std::string describe(const ProblemSpec& spec, const std::string& what, Cone cone, int r) {
  std::string name = spec.name.empty() ? "spec" : spec.name;
  return name + " " + what + " " + to_string(cone) + " r=" + std::to_string(r);
}

}  // namespace

std::vector<GeneratorBlock> enumerate_generators(const ProblemSpec& spec, Cone cone, unsigned jobs) {
  validate(spec);
  auto work = plan(spec, cone);
  std::vector<GeneratorBlock> out(work.size());
  unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = run_job(work[i], spec.rules);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < work.size(); i += workers) out[i] = run_job(work[i], spec.rules);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::pair<MomentPolynomial, MomentPolynomial> phi_psi(std::size_t n, int r) {
  if (r < 0) throw Error("phi_psi needs r >= 0");
  MomentPolynomial phi(n), psi(n);
  std::vector<mpz_class> fact(r + 1, 1);
  for (int k = 1; k <= r; ++k) fact[k] = fact[k - 1] * k;
  for (std::size_t j = 0; j < n; ++j) {
    for (int k = 0; k <= r; ++k) {
      Rational c(1, fact[k]);
      c.canonicalize();
      phi += MomentPolynomial::x(n, j, 2 * k) * c;
    }
    for (int k = 1; k <= r; ++k) {
      Exponents e(n, 0);
      e[j] = 2 * k;
      MomentPolynomial mk = MomentPolynomial::moment(e);
      for (int l = 1; k * l <= r; ++l) {
        mpz_class kl = 1;
        for (int t = 0; t < l; ++t) kl *= fact[k];
        Rational c(1, kl * fact[l]);
        c.canonicalize();
        psi += mk.pow(l) * c;
      }
    }
  }
  return {phi, psi};
}

Rational default_big_m(const ProblemSpec& spec) {
  Rational e(68, 25), norm = 0;
  for (const auto& [m, c] : spec.objective.terms()) norm += abs(c);
  Rational n(static_cast<long>(spec.n));
  return 10 * (n * e + n * e * e) * (1 + norm);
}

MomentPolynomial perturbation_polynomial(const ProblemSpec& spec, int r) {
  auto [phi, psi] = phi_psi(spec.n, r);
  if (spec.cone == Cone::Classical) return phi;
  switch (spec.perturbation) {
    case Perturbation::PhiPsi: return phi + psi;
    case Perturbation::OnePsi: return MomentPolynomial(spec.n, Rational(1)) + psi;
    default: return formal_moment(phi);
  }
}

SdpProblem build_membership_sdp(const ProblemSpec& spec, Cone cone, unsigned jobs) {
  validate(spec);
  if (cone == Cone::Qm && !spec.objective.is_pure())
    throw SpecError("the qm cone certifies pure objectives only");
  auto blocks = enumerate_generators(spec, cone, jobs);
  MomentPolynomial g = min_target(spec);
  ScalarTerm alpha{"alpha", false, MomentPolynomial(spec.n, Rational(1)), Rational(-1)};
  // value = -alpha; min sense reports alpha, max sense reports -alpha
  return assemble_gram(describe(spec, "membership", cone, spec.order), blocks, g, {alpha},
                       Rational(-1) * sense_sign(spec));
}

SdpProblem build_dual_sdp(const ProblemSpec& spec, unsigned jobs) {
  validate(spec);
  auto blocks = enumerate_generators(spec, spec.cone, jobs);
  MomentPolynomial g = min_target(spec);
  const MomentMonomial one(spec.n);

  std::map<MomentMonomial, std::size_t> row_of;
  for (const auto& b : blocks)
    for (const auto& e : b.entries)
      for (const auto& [m, c] : e.value.terms())
        if (!m.is_one()) row_of.emplace(m, 0);
  for (const auto& [m, c] : g.terms())
    if (!m.is_one()) row_of.emplace(m, 0);

  // max -L(g) s.t. A_1 + sum_w L(w) A_w psd
  SdpProblem p;
  p.label = describe(spec, "dual", spec.cone, spec.order);
  p.form = SdpForm::Moment;
  p.rows.resize(row_of.size());
  std::size_t k = 0;
  for (auto& [m, idx] : row_of) {
    idx = k;
    p.rows[k].label = to_string(m);
    p.rows[k].rhs = -g.coefficient(m);
    ++k;
  }
  p.constant = -g.coefficient(one);
  p.bound_scale = Rational(-1) * sense_sign(spec);
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    p.blocks.push_back({blocks[bi].label, blocks[bi].dim()});
    for (const auto& e : blocks[bi].entries)
      for (const auto& [m, c] : e.value.terms()) {
        if (m.is_one())
          p.cost.push_back({bi, e.i, e.j, c});
        else
          p.rows[row_of.at(m)].entries.push_back({bi, e.i, e.j, Rational(-c)});
      }
  }
  return p;
}

SdpProblem build_perturbed_sdp(const ProblemSpec& spec, int r, Mode mode, unsigned jobs) {
  ProblemSpec s = spec;
  s.order = r;
  s.mode = mode;
  if (mode == Mode::FEps) s.cone = Cone::Classical;
  validate(s);
  auto blocks = enumerate_generators(s, s.cone, jobs);
  MomentPolynomial g = min_target(s);
  const MomentPolynomial one(s.n, Rational(1));
  auto [phi, psi] = phi_psi(s.n, r);

  switch (mode) {
    case Mode::EpsMin: {
      // sum gens - eps P = g
      MomentPolynomial pert = reduce(perturbation_polynomial(s, r), s.rules);
      ScalarTerm eps{"eps", true, -pert, Rational(1)};
      return assemble_gram(describe(s, "eps_min " + to_string(s.perturbation), s.cone, r), blocks, g, {eps},
                           Rational(1));
    }
    case Mode::QrM: {
      Rational big_m = s.big_m ? *s.big_m : default_big_m(s);
      // the qm cone only sees pure polynomials, so Phi_r enters through m
      MomentPolynomial tail = s.cone == Cone::Qm ? formal_moment(phi) + psi : phi + psi;
      MomentPolynomial slack = reduce(MomentPolynomial(s.n, big_m) - tail, s.rules);
      ScalarTerm z{"z", false, one, Rational(-1)};
      ScalarTerm lambda{"lambda", true, slack, Rational(0)};
      return assemble_gram(describe(s, "QrM M=" + to_string(big_m), s.cone, r), blocks, g, {z, lambda},
                           Rational(-1) * sense_sign(s));
    }
    case Mode::FEps: {
      MomentPolynomial rhs = g + reduce(phi, s.rules) * s.epsilon;
      ScalarTerm z{"z", false, one, Rational(-1)};
      return assemble_gram(describe(s, "f_eps eps=" + to_string(s.epsilon), s.cone, r), blocks, rhs, {z},
                           Rational(-1) * sense_sign(s));
    }
    default:
      throw SpecError("build_perturbed_sdp handles eps_min, QrM and f_eps");
  }
}

SdpProblem build_sdp(const ProblemSpec& spec, unsigned jobs) {
  switch (spec.mode) {
    case Mode::Membership: return build_membership_sdp(spec, spec.cone, jobs);
    case Mode::Dual: return build_dual_sdp(spec, jobs);
    default: return build_perturbed_sdp(spec, spec.order, spec.mode, jobs);
  }
}

}  // namespace mompoly
