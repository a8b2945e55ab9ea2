#include <Eigen/Dense>
#include <random>
#include <set>

#include "doctest.h"
#include "mompoly/certificates.hpp"
#include "mompoly/measures.hpp"
#include "mompoly/nonlocal.hpp"

using namespace mompoly;

namespace {

RationalMatrix R(std::initializer_list<std::initializer_list<long>> rows) {
  RationalMatrix m;
  for (auto r : rows) {
    m.emplace_back();
    for (long v : r) m.back().emplace_back(v);
  }
  return m;
}

// oracle: evaluate target and expansion on random measures on [-2,2]
void check_by_evaluation(const GramCertificate& cert, int trials) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> num(-8, 8), atoms(1, 3);
  for (int t = 0; t < trials; ++t) {
    int k = atoms(rng);
    std::vector<Point> pts;
    std::set<Point> seen;
    while (static_cast<int>(pts.size()) < k) {
      Point p(cert.n);
      for (auto& c : p) {
        c = Rational(num(rng), 4);
        c.canonicalize();
      }
      if (seen.insert(p).second) pts.push_back(p);
    }
    Rational wk(1, k);
    wk.canonicalize();
    std::vector<Rational> w(k, wk);
    FiniteMeasure mu(pts, w);
    Rational sum = 0;
    for (const auto& b : cert.blocks) sum += eval_poly(block_expansion(b), mu);
    CHECK(eval_poly(cert.target, mu) == sum);
  }
}

}  // namespace

TEST_CASE("exact PSD check") {
  auto r = exact_psd_check(R({{1, 2}, {2, 1}}));
  CHECK(r.status == PsdStatus::NotPsd);
  CHECK(r.witness_value < 0);
  CHECK(r.witness == std::vector<Rational>{Rational(1), Rational(-1)});
  CHECK(r.witness_value == -2);

  CHECK(exact_psd_check(R({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})).status == PsdStatus::PositiveDefinite);
  auto s = exact_psd_check(R({{1, 1}, {1, 1}}));
  CHECK(s.status == PsdStatus::PositiveSemidefinite);
  CHECK(s.rank == 1);
  auto z = exact_psd_check(R({{0, 1}, {1, 0}}));
  CHECK(z.status == PsdStatus::NotPsd);
  CHECK(exact_psd_check(R({{0, 0}, {0, 0}})).rank == 0);
  CHECK_THROWS_AS(exact_psd_check(R({{1, 2}})), DimensionError);
  CHECK_THROWS_AS(exact_psd_check(R({{1, 2}, {3, 1}})), Error);
}

TEST_CASE("property: exact PSD agrees with floating eigenvalues") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dim(1, 6), val(-3, 3), rank(0, 6);
  int agree = 0;
  for (int it = 0; it < 200; ++it) {
    int n = dim(rng);
    // half the samples are Gram matrices B B^T, the rest arbitrary symmetric
    RationalMatrix G(n, std::vector<Rational>(n));
    if (it % 2 == 0) {
      int k = rank(rng);
      std::vector<std::vector<int>> B(n, std::vector<int>(k));
      for (auto& row : B)
        for (auto& v : row) v = val(rng);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          long s = 0;
          for (int l = 0; l < k; ++l) s += B[i][l] * B[j][l];
          G[i][j] = s;
        }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) G[i][j] = G[j][i] = val(rng);
    }
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) D(i, j) = G[i][j].get_d();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    double lo = es.eigenvalues().minCoeff();
    auto r = exact_psd_check(G);
    if (r.status == PsdStatus::NotPsd) {
      CHECK(lo < -1e-9);
      Rational v = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v += r.witness[i] * G[i][j] * r.witness[j];
      CHECK(v < 0);
    } else {
      CHECK(lo > -1e-9);
      int numeric_rank = 0;
      for (int i = 0; i < n; ++i)
        if (es.eigenvalues()[i] > 1e-9) ++numeric_rank;
      CHECK(static_cast<int>(r.rank) == numeric_rank);
      CHECK((r.status == PsdStatus::PositiveDefinite) == (numeric_rank == n));
    }
    ++agree;
  }
  CHECK(agree == 200);
}

TEST_CASE("Hoelder certificates") {
  auto c0 = holder_certificate(0);
  CHECK(c0.blocks.empty());
  CHECK(c0.target.is_zero());
  CHECK(verify_gram_certificate(c0).valid());

  auto c1 = holder_certificate(1);
  REQUIRE(c1.blocks.size() == 1);
  CHECK(block_expansion(c1.blocks[0]) == parse_polynomial(1, "m((m[1] - x1)^2)"));

  auto c3 = holder_certificate(3);
  REQUIRE(c3.blocks.size() == 3);
  CHECK(c3.blocks[0].G[0][0] == 3);
  CHECK(c3.blocks[1].G[0][0] == 1);
  CHECK(c3.blocks[2].G[0][0] == 2);
  CHECK(c3.target == parse_polynomial(1, "m[6] - m[1]^6"));

  for (int k = 0; k <= 10; ++k) {
    auto c = holder_certificate(k);
    auto v = verify_gram_certificate(c);
    CHECK_MESSAGE(v.valid(), "k=" << k << " residual " << to_string(v.residual));
  }
  check_by_evaluation(holder_certificate(3), 20);
  check_by_evaluation(holder_certificate(5), 10);
}

TEST_CASE("multivariate Hoelder certificates") {
  auto c = holder_multivariate(2, {1, 2});
  CHECK(c.target == parse_polynomial(2, "m[4,8] - m[1,2]^4"));
  CHECK(verify_gram_certificate(c).valid());
  check_by_evaluation(c, 10);
  for (int k = 0; k <= 3; ++k)
    for (const Exponents& i : {Exponents{1, 1}, Exponents{0, 3}, Exponents{1, 0, 2}, Exponents{1, 1, 1}})
      CHECK(verify_gram_certificate(holder_multivariate(k, i)).valid());
}

TEST_CASE("ad hoc certificates") {
  auto c2 = adhoc_certificate({1, 1});
  CHECK(c2.target == parse_polynomial(2, "1/2*m[4,0] + 1/2*m[0,4] - m[1,1]^2"));
  CHECK(verify_gram_certificate(c2).valid());
  auto c3 = adhoc_certificate({1, 1, 1});
  CHECK(c3.target == parse_polynomial(3, "1/2*m[4,0,0] + 1/4*m[0,8,0] + 1/4*m[0,0,8] - m[1,1,1]^2"));
  CHECK(verify_gram_certificate(c3).valid());
  check_by_evaluation(c3, 5);
  auto core1 = adhoc_core_certificate({2});
  CHECK(core1.target.is_zero());
  CHECK(core1.blocks.empty());
  auto full1 = adhoc_certificate({2});
  CHECK(full1.target == parse_polynomial(1, "m[4] - m[2]^2"));
  CHECK(verify_gram_certificate(full1).valid());
}

TEST_CASE("verification failures") {
  auto c = holder_certificate(2);
  c.target += MomentPolynomial(1, 1);
  auto v = verify_gram_certificate(c);
  CHECK(v.status == CertificateStatus::Invalid);
  CHECK(v.residual == MomentPolynomial(1, 1));

  auto bad = holder_certificate(2);
  bad.blocks[0].G[0][0] = -1;
  bad.target = MomentPolynomial(1);
  CHECK(verify_gram_certificate(bad).status == CertificateStatus::NotPsd);

  auto mism = holder_certificate(2);
  mism.blocks[0].v.push_back(MomentPolynomial(1, 1));
  CHECK_THROWS_AS(verify_gram_certificate(mism), DimensionError);
}

TEST_CASE("covariance certificate") {
  auto cert = cov3322_certificate();
  auto v = verify_gram_certificate(cert);
  CHECK(v.block_status.at(0) == PsdStatus::PositiveDefinite);
  // the verbatim v leaves (m1 + m2 - m12)(m4 + m5 - m6 - 2 m1 + 2 m12), computed independently in sympy
  auto lin1 = parse_polynomial(6, "m[1,0,0,0,0,0] + m[0,1,0,0,0,0] - m[1,1,0,0,0,0]");
  auto lin2 = parse_polynomial(
      6, "m[0,0,0,1,0,0] + m[0,0,0,0,1,0] - m[0,0,0,0,0,1] - 2*m[1,0,0,0,0,0] + 2*m[1,1,0,0,0,0]");
  CHECK(v.status == CertificateStatus::Invalid);
  CHECK(v.residual == lin1 * lin2);

  auto fixed = verify_gram_certificate(cov3322_certificate_corrected());
  CHECK(fixed.block_status.at(0) == PsdStatus::PositiveDefinite);
  CHECK_MESSAGE(fixed.valid(), to_string(fixed.residual));
}

TEST_CASE("bilocal identities") {
  for (const auto& c : bilocal_identities_check()) CHECK_MESSAGE(c.holds, c.name << ": " << to_string(c.residual));
  for (const auto& c : bilocal_identities_negative_control()) CHECK_FALSE(c.holds);
}

TEST_CASE("bilocal attainment") {
  auto rep = bilocal_attainment();
  CHECK(rep.objective == 4);
  CHECK(rep.objective_constant);
  CHECK(rep.constraints_hold);
}
