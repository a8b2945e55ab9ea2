#include <cmath>

#include "doctest.h"
#include "mompoly/measures.hpp"
#include "mompoly/nonlocal.hpp"
#include "mompoly/relaxation.hpp"

using namespace mompoly;

namespace {

MomentPolynomial P(std::size_t n, const char* s) { return parse_polynomial(n, s); }

double solve(const SdpProblem& p) {
  auto s = solve_ipm(p);
  REQUIRE_MESSAGE(s.status == SdpStatus::Optimal, p.label << ": " << s.message);
  CHECK(s.residuals.max() <= 2e-8);
  return s.objective;
}

ProblemSpec box_covariance(int r) {
  ProblemSpec s(2);
  s.name = "box covariance";
  s.objective = P(2, "m[1,1] - m[1,0]*m[0,1]");
  s.S1 = {P(2, "1 - x1^2"), P(2, "1 - x2^2")};
  s.order = r;
  return s;
}

ProblemSpec interval_second_moment(int r) {
  ProblemSpec s(1);
  s.name = "second moment";
  s.objective = P(1, "m[2] - m[1]");
  s.S1 = {P(1, "1 - x1^2")};
  s.order = r;
  return s;
}

ProblemSpec mixed_product(int r) {
  ProblemSpec s(1);
  s.name = "mixed";
  s.objective = P(1, "x1*m[1]");
  s.S1 = {P(1, "1 - x1^2")};
  s.cone = Cone::Qqm;
  s.order = r;
  return s;
}

}  // namespace

TEST_CASE("generator enumeration") {
  ProblemSpec s(1);
  s.order = 1;
  auto blocks = enumerate_generators(s, Cone::Qm);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].index == std::vector<std::string>{"1", "x1", "m[1]"});
  std::map<std::pair<std::size_t, std::size_t>, MomentPolynomial> e;
  for (const auto& g : blocks[0].entries) e.emplace(std::pair{g.i, g.j}, g.value);
  CHECK(e.at({0, 0}) == P(1, "1"));
  CHECK(e.at({0, 1}) == P(1, "m[1]"));
  CHECK(e.at({1, 1}) == P(1, "m[2]"));
  CHECK(e.at({1, 2}) == P(1, "m[1]^2"));
  CHECK(e.at({2, 2}) == P(1, "m[1]^2"));

  // S1 block of degree 2 admits only v = 1 at r = 1; S2 uses pure monomials
  s.S1 = {P(1, "1 - x1^2")};
  s.S2 = {P(1, "m[2] - m[1]")};
  blocks = enumerate_generators(s, Cone::Qm);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[1].dim() == 1);
  CHECK(blocks[1].entries[0].value == P(1, "1 - m[2]"));
  CHECK(blocks[2].dim() == 1);
  CHECK(blocks[2].entries[0].value == P(1, "m[2] - m[1]"));

  auto qqm = enumerate_generators(s, Cone::Qqm);
  REQUIRE(qqm.size() == 4);
  // pairs (u, v) with deg u + deg v <= 1: (1,1), (1,x1), (1,m1), (x1,1)
  CHECK(qqm[0].dim() == 4);
  CHECK(qqm[1].dim() == 1);
  CHECK(qqm[2].entries[0].value == P(1, "1 - x1^2"));

  auto cls = enumerate_generators(s, Cone::Classical);
  CHECK(cls[0].index == std::vector<std::string>{"1", "x1"});

  auto one = enumerate_generators(cov3322_spec(2), Cone::Qm, 1);
  auto three = enumerate_generators(cov3322_spec(2), Cone::Qm, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].dim() == 100);
  CHECK(one[0].index == three[0].index);
  REQUIRE(one[0].entries.size() == three[0].entries.size());
  for (std::size_t k = 0; k < one[0].entries.size(); ++k) CHECK(one[0].entries[k].value == three[0].entries[k].value);
}

TEST_CASE("phi and psi") {
  auto [phi1, psi1] = phi_psi(1, 1);
  CHECK(phi1 == P(1, "1 + x1^2"));
  CHECK(psi1 == P(1, "m[2]"));
  auto [phi2, psi2] = phi_psi(1, 2);
  CHECK(phi2 == P(1, "1 + x1^2 + 1/2*x1^4"));
  CHECK(psi2 == P(1, "m[2] + 1/2*m[2]^2 + 1/2*m[4]"));
  CHECK(phi_psi(2, 1).first == P(2, "2 + x1^2 + x2^2"));
  auto [phi0, psi0] = phi_psi(3, 0);
  CHECK(phi0 == P(3, "3"));
  CHECK(psi0.is_zero());
  CHECK_THROWS_AS(phi_psi(1, -1), Error);

  // oracle: coefficient of m(x^{2k})^l is 1/((k!)^l l!)
  auto [phi6, psi6] = phi_psi(1, 6);
  CHECK(psi6.coefficient(MomentMonomial::symbol(MomentSymbol({4}), 3)) == Rational(1, 48));
  CHECK(psi6.coefficient(MomentMonomial::symbol(MomentSymbol({6}), 2)) == Rational(1, 72));
  CHECK(psi6.coefficient(MomentMonomial::symbol(MomentSymbol({2}), 6)) == Rational(1, 720));
  CHECK(phi6.coefficient(MomentMonomial::variable(1, 0, 12)) == Rational(1, 720));
}

TEST_CASE("property: exponential series partial sums") {
  // partial sums of sum_{k,l} 1/((k!)^l l!) over k, l <= 20 increase and stay below e^2
  Rational partial = 0, fact = 1;
  for (int k = 1; k <= 20; ++k) {
    fact *= k;
    Rational term = 1;
    for (int l = 1; l <= 20; ++l) {
      term /= fact * l;
      Rational before = partial;
      partial += term;
      CHECK(partial > before);
    }
  }
  CHECK(partial.get_d() <= std::exp(2.0));
  // the full series is sum_k (exp(1/k!) - 1)
  double series = 0, f = 1;
  for (int k = 1; k <= 20; ++k) f *= k, series += std::expm1(1 / f);
  CHECK(partial.get_d() == doctest::Approx(series).epsilon(1e-12));
  // Psi_20 coefficients sum to the kl <= 20 part of the same series
  auto [unused, psi20] = phi_psi(1, 20);
  Rational psum = 0;
  for (const auto& [m, c] : psi20.terms()) psum += c;
  CHECK(psum <= partial);
}

TEST_CASE("membership examples") {
  ProblemSpec s = interval_second_moment(1);
  s.objective = P(1, "m[2]");
  CHECK(solve(build_membership_sdp(s, Cone::Qm)) == doctest::Approx(0).scale(1).epsilon(1e-6));

  ProblemSpec v(1);
  v.objective = P(1, "m[2] - m[1]^2");
  v.order = 1;
  auto p = build_membership_sdp(v, Cone::Qm);
  CHECK(solve(p) == doctest::Approx(0).scale(1).epsilon(1e-6));
  CHECK(p.scalars.size() == 1);

  ProblemSpec bad(1);
  bad.objective = P(1, "x1*m[1]");
  CHECK_THROWS_AS(build_membership_sdp(bad, Cone::Qm), SpecError);
  CHECK_THROWS_AS(build_dual_sdp(bad), SpecError);
}

TEST_CASE("dual examples") {
  ProblemSpec s = interval_second_moment(1);
  s.objective = P(1, "m[2]");
  CHECK(solve(build_dual_sdp(s)) == doctest::Approx(0).scale(1).epsilon(1e-6));

  // min m1 over P([0,1]); the minimiser is the moment vector of delta_0
  ProblemSpec u(1);
  u.objective = P(1, "m[1]");
  u.S1 = {P(1, "x1"), P(1, "1 - x1")};
  u.order = 1;
  auto d = build_dual_sdp(u);
  CHECK(d.form == SdpForm::Moment);
  auto sol = solve_ipm(d);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0).scale(1).epsilon(1e-6));
  // L(m1) is pinned; L(m2) has no upper bound at r = 1
  for (std::size_t k = 0; k < d.rows.size(); ++k)
    if (d.rows[k].label == "m[1]") CHECK(std::abs(sol.y[k]) < 1e-6);
}

TEST_CASE("perturbed examples") {
  ProblemSpec m(2);
  m.objective = P(2, "m[2,0]*m[0,2]");
  m.perturbation = Perturbation::OnePsi;
  CHECK(solve(build_perturbed_sdp(m, 2, Mode::EpsMin)) == doctest::Approx(1.0 / 3).epsilon(1e-6));

  ProblemSpec q(2);
  q.objective = P(2, "x1*x2");
  q.S1 = {P(2, "x1"), P(2, "x2")};
  q.cone = Cone::Classical;
  CHECK(solve(build_perturbed_sdp(q, 1, Mode::EpsMin)) == doctest::Approx(0.5).epsilon(1e-6));

  ProblemSpec in(1);
  in.objective = P(1, "m[2]");
  for (auto pert : {Perturbation::PhiPsi, Perturbation::OnePsi, Perturbation::MomentPhi}) {
    in.perturbation = pert;
    CHECK(solve(build_perturbed_sdp(in, 1, Mode::EpsMin)) == doctest::Approx(0).scale(1).epsilon(1e-6));
  }

  // f_eps on x1 over x1 >= 0: sup z with x1 - z + eps(1 + x1^2) in QM({x1})_2
  ProblemSpec c(1);
  c.objective = P(1, "x1");
  c.S1 = {P(1, "x1")};
  c.epsilon = Rational(1, 10);
  double fe = solve(build_perturbed_sdp(c, 1, Mode::FEps));
  // inf over X >= 0 of X + eps(1 + X^2) is eps at X = 0
  CHECK(fe == doctest::Approx(0.1).epsilon(1e-6));

  // QrM with the default M: the extra term only loosens the cone
  ProblemSpec r = interval_second_moment(1);
  double plain = solve(build_membership_sdp(r, Cone::Qm));
  double qrm = solve(build_perturbed_sdp(r, 1, Mode::QrM));
  CHECK(qrm >= plain - 1e-6);
  // soundness: the true minimum is -1/4 at delta_{1/2}
  CHECK(qrm <= -0.25 + 1e-6);
  CHECK(default_big_m(r) > 0);
}

TEST_CASE("covariance sizes") {
  auto p = build_membership_sdp(cov3322_spec(2), Cone::Qm);
  MESSAGE("cov3322 r=2: unknowns " << p.unknowns() << ", rows " << p.rows.size() << ", block " << p.max_block());
  CHECK(p.max_block() == 100);
  CHECK(p.unknowns() - p.rows.size() == 4146);
}

TEST_CASE("property: hierarchy monotonicity") {
  // min problems rise with r, the max problem falls
  double prev = -1e9;
  for (int r = 1; r <= 3; ++r) {
    double b = solve(build_membership_sdp(box_covariance(r), Cone::Qm));
    CHECK(b >= prev - 1e-6);
    prev = b;
  }
  prev = -1e9;
  for (int r = 1; r <= 3; ++r) {
    double b = solve(build_membership_sdp(mixed_product(r), Cone::Qqm));
    CHECK(b >= prev - 1e-6);
    prev = b;
  }
  double c1 = solve(build_membership_sdp(cov3322_spec(1), Cone::Qm));
  double c2 = solve(build_membership_sdp(cov3322_spec(2), Cone::Qm));
  CHECK(c2 <= c1 + 1e-6);
  CHECK(c2 == doctest::Approx(4.5).epsilon(1e-6));

  // eps_r does not increase
  ProblemSpec m(2);
  m.objective = P(2, "m[2,0]*m[0,2]");
  double e2 = solve(build_perturbed_sdp(m, 2, Mode::EpsMin));
  double e3 = solve(build_perturbed_sdp(m, 3, Mode::EpsMin));
  CHECK(e3 <= e2 + 1e-6);
  ProblemSpec q(2);
  q.objective = P(2, "x1*x2");
  q.S1 = {P(2, "x1"), P(2, "x2")};
  q.cone = Cone::Classical;
  prev = 1e9;
  for (int r = 1; r <= 4; ++r) {
    double e = solve(build_perturbed_sdp(q, r, Mode::EpsMin));
    CHECK(e <= prev + 1e-6);
    prev = e;
  }
}

TEST_CASE("property: weak duality") {
  for (const auto& spec : {box_covariance(2), interval_second_moment(2), mixed_product(2)}) {
    double primal = solve(build_membership_sdp(spec, spec.cone));
    double dual = solve(build_dual_sdp(spec));
    CHECK_MESSAGE(primal <= dual + 1e-6, spec.name);
    CHECK(primal == doctest::Approx(dual).epsilon(1e-6).scale(1));
  }
  auto cov = cov3322_spec(1);
  // max: the membership bound is an upper bound, the dual value can only be lower
  CHECK(solve(build_membership_sdp(cov, Cone::Qm)) >= solve(build_dual_sdp(cov)) - 1e-6);
}

TEST_CASE("property: soundness against brute force") {
  BruteForceOptions o;
  o.support = 2;
  o.grid = 4;
  for (int r = 1; r <= 2; ++r) {
    auto spec = box_covariance(r);
    double bound = solve(build_membership_sdp(spec, Cone::Qm));
    auto bf = brute_force_opt(spec, o);
    REQUIRE(bf.feasible);
    CHECK(bound <= bf.value.get_d() + 1e-6);
  }
  auto mp = mixed_product(1);
  auto bf = brute_force_opt(mp, o);
  CHECK(solve(build_membership_sdp(mp, Cone::Qqm)) <= bf.value.get_d() + 1e-6);
  CHECK(bf.value == -1);

  BruteForceOptions c;
  c.support = 2;
  c.grid = 2;
  c.candidates.clear();
  auto cov = cov3322_spec(1);
  auto cbf = brute_force_opt(cov, c);
  CHECK(solve(build_membership_sdp(cov, Cone::Qm)) >= cbf.value.get_d() - 1e-6);
}

TEST_CASE("property: qm is contained in QQM") {
  for (const auto& spec : {box_covariance(1), box_covariance(2), interval_second_moment(2)}) {
    double qm = solve(build_membership_sdp(spec, Cone::Qm));
    double qqm = solve(build_membership_sdp(spec, Cone::Qqm));
    CHECK_MESSAGE(qqm >= qm - 1e-6, spec.name);
  }
  // m(x1^2) x2^2 + 2 m(x1 x3) x2 x4 + m(x3^2) x4^2 is a mixed block element, so alpha = 0 is feasible
  ProblemSpec s(4);
  s.objective = P(4, "m[2,0,0,0]*x2^2 + 2*m[1,0,1,0]*x2*x4 + m[0,0,2,0]*x4^2");
  s.cone = Cone::Qqm;
  s.order = 2;
  CHECK(solve(build_membership_sdp(s, Cone::Qqm)) >= -1e-6);
}
