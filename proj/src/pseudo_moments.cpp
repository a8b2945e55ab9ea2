#include "mompoly/pseudo_moments.hpp"

#include <random>

namespace mompoly {

TruncatedFunctional::TruncatedFunctional(std::size_t n, int degree) : n_(n), degree_(degree) {
  if (n == 0) throw DimensionError("functional needs at least one variable");
  if (degree < 0) throw Error("negative degree bound");
  for (const auto& e : exponents_up_to(n, degree)) values_.emplace(e, 0);
}

TruncatedFunctional TruncatedFunctional::from_measure(const FiniteMeasure& mu, int degree) {
  TruncatedFunctional L(mu.arity(), degree);
  for (auto& [e, v] : L.values_) v = mu.moment(e);
  return L;
}

TruncatedFunctional TruncatedFunctional::uniform_box(std::size_t n, int degree) {
  TruncatedFunctional L(n, degree);
  for (auto& [e, v] : L.values_) {
    mpz_class den = 1;
    for (int k : e) den *= k + 1;
    v = Rational(mpz_class(1), den);
  }
  return L;
}

Rational TruncatedFunctional::operator()(const Exponents& e) const {
  if (e.size() != n_) throw DimensionError("monomial arity mismatch");
  auto it = values_.find(e);
  if (it == values_.end()) throw Error("monomial degree exceeds the functional's bound");
  return it->second;
}

void TruncatedFunctional::set(const Exponents& e, const Rational& v) {
  if (e.size() != n_) throw DimensionError("monomial arity mismatch");
  auto it = values_.find(e);
  if (it == values_.end()) throw Error("monomial degree exceeds the functional's bound");
  it->second = v;
  it->second.canonicalize();
}

TruncatedFunctional TruncatedFunctional::truncate(int d) const {
  TruncatedFunctional out(n_, std::min(d, degree_));
  for (auto& [e, v] : out.values_) v = values_.at(e);
  return out;
}

namespace {

Exponents add(const Exponents& a, const Exponents& b) {
  Exponents c = a;
  for (std::size_t j = 0; j < c.size(); ++j) c[j] += b[j];
  return c;
}

// exact inverse by Gauss-Jordan; the input is PD so pivots are nonzero
RationalMatrix inverse(RationalMatrix A) {
  const std::size_t n = A.size();
  RationalMatrix inv(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && A[p][c] == 0) ++p;
    if (p == n) throw Error("singular matrix");
    std::swap(A[p], A[c]);
    std::swap(inv[p], inv[c]);
    Rational d = A[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      A[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0) continue;
      Rational f = A[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        A[r][j] -= f * A[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace

std::vector<std::vector<MomentPolynomial>> symbolic_hankel(std::size_t n, int d) {
  if (d < 0) throw Error("negative Hankel order");
  auto basis = exponents_up_to(n, d);
  std::vector<std::vector<MomentPolynomial>> H;
  for (const auto& u : basis) {
    H.emplace_back();
    for (const auto& v : basis) H.back().push_back(MomentPolynomial::moment(add(u, v)));
  }
  return H;
}

RationalMatrix hankel_apply(const TruncatedFunctional& L, int d) {
  if (d < 0) throw Error("negative Hankel order");
  if (2 * d > L.degree()) throw Error("Hankel order exceeds the functional's degree");
  auto basis = exponents_up_to(L.arity(), d);
  RationalMatrix H(basis.size(), std::vector<Rational>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) H[i][j] = L(add(basis[i], basis[j]));
  return H;
}

Rational pseudo_value(const TruncatedFunctional& L, const MomentPolynomial& f) {
  if (f.arity() != L.arity()) throw DimensionError("polynomial arity mismatch");
  if (!f.is_pure()) throw Error("pseudo-moment values are defined for pure polynomials");
  Rational total = 0;
  for (const auto& [m, c] : f.terms()) {
    Rational v = c;
    for (const auto& s : m.symbols()) v *= L(s.exponents());
    total += v;
  }
  return total;
}

Extension extend_functional(const TruncatedFunctional& L) {
  const std::size_t n = L.arity();
  const int d = L.degree() / 2;
  RationalMatrix A = hankel_apply(L, d);
  if (exact_psd_check(A).status != PsdStatus::PositiveDefinite)
    throw Error("extension needs a positive definite Hankel image");
  auto low = exponents_up_to(n, d);
  auto top = exponents_of_degree(n, d + 1);
  auto box = TruncatedFunctional::uniform_box(n, 2 * d + 2);

  // B_{uv} = L(uv) for u of degree d + 1, v of degree <= d; new odd-top values are 0
  auto known = [&](const Exponents& e) { return total_degree(e) <= L.degree() ? L(e) : Rational(0); };
  RationalMatrix B(top.size(), std::vector<Rational>(low.size()));
  for (std::size_t i = 0; i < top.size(); ++i)
    for (std::size_t j = 0; j < low.size(); ++j) B[i][j] = known(add(top[i], low[j]));
  RationalMatrix K(top.size(), std::vector<Rational>(top.size()));
  for (std::size_t i = 0; i < top.size(); ++i)
    for (std::size_t j = 0; j < top.size(); ++j) K[i][j] = box(add(top[i], top[j]));
  RationalMatrix Ainv = inverse(A);
  RationalMatrix S(top.size(), std::vector<Rational>(top.size(), 0));
  for (std::size_t i = 0; i < top.size(); ++i)
    for (std::size_t j = 0; j < top.size(); ++j) {
      Rational s = 0;
      for (std::size_t a = 0; a < low.size(); ++a) {
        if (B[i][a] == 0) continue;
        for (std::size_t b = 0; b < low.size(); ++b) s += B[i][a] * Ainv[a][b] * B[j][b];
      }
      S[i][j] = s;
    }

  Rational alpha = 1;
  for (;;) {
    RationalMatrix schur = K;
    for (std::size_t i = 0; i < top.size(); ++i)
      for (std::size_t j = 0; j < top.size(); ++j) schur[i][j] = alpha * K[i][j] - S[i][j];
    if (exact_psd_check(schur).status == PsdStatus::PositiveDefinite) break;
    alpha *= 2;
  }

  TruncatedFunctional out(n, 2 * d + 2);
  for (const auto& [e, v] : out.values()) {
    int deg = total_degree(e);
    if (deg <= L.degree())
      out.set(e, L(e));
    else if (deg == 2 * d + 2)
      out.set(e, alpha * box(e));
  }
  return {out, alpha};
}

TruncatedFunctional perturb_functional(const TruncatedFunctional& L, const Rational& delta) {
  if (delta < 0 || delta > 1) throw Error("delta must lie in [0, 1]");
  auto box = TruncatedFunctional::uniform_box(L.arity(), L.degree());
  TruncatedFunctional out(L.arity(), L.degree());
  for (const auto& [e, v] : L.values()) out.set(e, (1 - delta) * v + delta * box(e));
  return out;
}

std::optional<PerturbSearch> perturb_search(const TruncatedFunctional& L, const Rational& delta0,
                                            int max_halvings) {
  const int d = L.degree() / 2;
  auto pd = [&](const TruncatedFunctional& F) {
    return exact_psd_check(hankel_apply(F, d)).status == PsdStatus::PositiveDefinite;
  };
  auto first = perturb_functional(L, delta0);
  if (!pd(first)) return std::nullopt;
  PerturbSearch best{delta0, first, 0};
  for (int h = 1; h <= max_halvings; ++h) {
    Rational delta = best.delta / 2;
    auto cand = perturb_functional(L, delta);
    if (!pd(cand)) break;
    best = {delta, cand, h};
  }
  return best;
}

TruncatedFunctional functional_from_hankel(std::size_t n, int d, const RationalMatrix& H) {
  auto basis = exponents_up_to(n, d);
  if (H.size() != basis.size()) throw DimensionError("Hankel matrix has the wrong size");
  TruncatedFunctional L(n, 2 * d);
  std::map<Exponents, Rational> seen;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (H[i].size() != basis.size()) throw DimensionError("Hankel matrix must be square");
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Exponents e = add(basis[i], basis[j]);
      auto [it, fresh] = seen.emplace(e, H[i][j]);
      if (!fresh && it->second != H[i][j]) throw Error("matrix is not a Hankel matrix");
      L.set(e, H[i][j]);
    }
  }
  return L;
}

RationalMatrix h17_hankel() {
  const long rows[10][10] = {
      {1, 0, 0, 5, 0, 5, 0, 0, 0, 0},       {0, 5, 0, 0, 0, 0, 26, 0, 2, 0},
      {0, 0, 5, 0, 0, 0, 0, 2, 0, 563},     {5, 0, 0, 26, 0, 2, 0, 0, 0, 0},
      {0, 0, 0, 0, 2, 0, 0, 0, 0, 0},       {5, 0, 0, 2, 0, 563, 0, 0, 0, 0},
      {0, 26, 0, 0, 0, 0, 587, 0, 1, 0},    {0, 0, 2, 0, 0, 0, 0, 1, 0, 1},
      {0, 2, 0, 0, 0, 0, 1, 0, 1, 0},       {0, 0, 563, 0, 0, 0, 0, 1, 0, 319642},
  };
  RationalMatrix H(10, std::vector<Rational>(10));
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) H[i][j] = rows[i][j];
  return H;
}

MomentPolynomial h17_polynomial() { return parse_polynomial(2, "m[4,2]*m[2,4] - m[2,2]^3"); }

H17Report h17_counterexample_report(std::size_t random_measures, unsigned seed) {
  H17Report rep;
  rep.hankel = h17_hankel();
  rep.status = exact_psd_check(rep.hankel).status;
  auto L = functional_from_hankel(2, 3, rep.hankel);
  auto f = h17_polynomial();
  rep.pseudo_value = pseudo_value(L, f);
  rep.dirac_value = eval_poly(f, FiniteMeasure::dirac({Rational(1), Rational(1)}));

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> atoms(1, 4), num(-12, 12), wt(1, 9);
  rep.measures_nonnegative = true;
  for (std::size_t t = 0; t < random_measures; ++t) {
    std::map<Point, Rational> law;
    int k = atoms(rng);
    for (int a = 0; a < k; ++a) {
      Rational x(num(rng), 4), y(num(rng), 4);
      x.canonicalize();
      y.canonicalize();
      law[{x, y}] += wt(rng);
    }
    Rational total = 0;
    for (const auto& [p, w] : law) total += w;
    std::vector<Point> pts;
    std::vector<Rational> ws;
    for (const auto& [p, w] : law) {
      pts.push_back(p);
      ws.push_back(w / total);
    }
    Rational v = eval_poly(f, FiniteMeasure(pts, ws));
    if (t == 0 || v < rep.min_measure_value) rep.min_measure_value = v;
    if (v < 0) rep.measures_nonnegative = false;
    ++rep.measures_checked;
  }
  return rep;
}

}  // namespace mompoly
