#include <random>
#include <set>

#include "doctest.h"
#include "mompoly/algebra.hpp"
#include "mompoly/rules.hpp"
#include "random_poly.hpp"

using namespace mompoly;
using testing_util::random_poly;

namespace {

MomentPolynomial P(std::size_t n, const char* s) { return parse_polynomial(n, s); }

MomentMonomial M(std::size_t n, const char* s) {
  auto p = P(n, s);
  REQUIRE(p.size() == 1);
  return p.terms().begin()->first;
}

}  // namespace

TEST_CASE("monomial products") {
  CHECK(M(2, "x1*m[1,0]") * M(2, "x1") == M(2, "x1^2*m[1,0]"));
  CHECK(M(2, "1") * M(2, "m[1,1]") == M(2, "m[1,1]"));
  auto sq = M(2, "m[2,0]") * M(2, "m[2,0]");
  CHECK(sq.symbols().size() == 2);
  CHECK(to_string(sq) == "m[2,0]^2");
  CHECK_THROWS_AS(M(2, "x1") * M(3, "x1"), DimensionError);
}

TEST_CASE("polynomial products") {
  CHECK(P(1, "x1 - m[1]").pow(2) == P(1, "x1^2 - 2*x1*m[1] + m[1]^2"));
  CHECK((P(1, "x1 + m[2]") * P(1, "0")).is_zero());
  CHECK(P(1, "m[2] - m[1]^2") * P(1, "m[2] + m[1]^2") == P(1, "m[2]^2 - m[1]^4"));
  CHECK_THROWS_AS(P(1, "x1") * P(2, "x1"), DimensionError);
}

TEST_CASE("formal moment") {
  CHECK(formal_moment(P(1, "x1^2")) == P(1, "m[2]"));
  CHECK(formal_moment(P(1, "m[1]*x1")) == P(1, "m[1]^2"));
  CHECK(formal_moment(P(1, "(x1 - m[1])^2")) == P(1, "m[2] - m[1]^2"));
  CHECK(formal_moment(P(3, "1")) == P(3, "1"));
  CHECK(P(2, "m(x1*x2^2)") == P(2, "m[1,2]"));
  CHECK(P(2, "m[0,0]") == P(2, "1"));
}

TEST_CASE("degree") {
  CHECK(P(2, "m[1,1]*x1").degree() == 3);
  CHECK(P(2, "m[4,2]*m[2,4] - m[2,2]^3").degree() == 12);
  CHECK(P(2, "7").degree() == 0);
  CHECK_THROWS_AS(MomentPolynomial(2).degree(), ZeroPolynomialError);
}

TEST_CASE("canonical order and printing") {
  CHECK(M(2, "m[1,0]") < M(2, "m[0,1]"));
  CHECK(M(2, "m[0,1]") < M(2, "m[2,0]"));
  CHECK(M(2, "x1^2") < M(2, "x1*x2"));
  CHECK(M(2, "x1*x2") < M(2, "x2^2"));
  auto f = P(2, "3/2*x1^2*x2*m[1,0]^2 - m[0,2] + 1");
  CHECK(to_string(f) == "1 - m[0,2] + 3/2 * x1^2*x2 * m[1,0]^2");
  CHECK(parse_polynomial(2, to_string(f)) == f);
}

TEST_CASE("parser errors and numbers") {
  CHECK_THROWS_AS(P(2, "x3"), ParseError);
  CHECK_THROWS_AS(P(2, "m[1]"), ParseError);
  CHECK_THROWS_AS(P(2, "x1 +"), ParseError);
  CHECK_THROWS_AS(P(2, "x1 ) "), ParseError);
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1e-3") == Rational(-1, 1000));
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK(P(1, "0.5*x1") == P(1, "1/2*x1"));
  CHECK_THROWS_AS(parse_polynomial(0, "1"), DimensionError);
}

TEST_CASE("reduction examples") {
  RuleSet bin(2);
  bin.add_binary_all();
  CHECK(bin.reduce(P(2, "x1^3")) == P(2, "x1"));
  CHECK(bin.reduce(P(2, "m[3,0]")) == P(2, "m[1,0]"));
  CHECK(bin.reduce(P(2, "m[2,2]*x1^2")) == P(2, "1"));

  RuleSet zero(2);
  zero.add_rule("m(x1) = 0");
  CHECK(zero.reduce(P(2, "m[1,0]*(x2 + m[0,1])")).is_zero());

  RuleSet r1(1);
  r1.add_rule("x1^2 = 1");
  CHECK(r1.reduce(P(1, "x1^5*m[5]^2")) == P(1, "x1*m[1]^2"));
}

TEST_CASE("rule validation and pass cap") {
  RuleSet r(1);
  CHECK_THROWS_AS(r.add_rule("x1 = x1^2"), Error);
  CHECK_THROWS_AS(r.add_rule("x1*m[1] = 0"), ParseError);
  RuleSet loop(1);
  loop.add_rule("m[1] = m[2]", false);
  loop.add_rule("m[2] = m[1]", false);
  CHECK_THROWS_AS(loop.reduce(P(1, "m[1]")), NonTerminatingRules);
}

TEST_CASE("basis enumeration") {
  auto b1 = monomial_basis(1, 1);
  REQUIRE(b1.size() == 3);
  CHECK(b1[0] == M(1, "1"));
  CHECK(b1[1] == M(1, "x1"));
  CHECK(b1[2] == M(1, "m[1]"));

  // oracle: x1^a m1^b m2^c with a + b + 2c <= 2
  std::set<MomentMonomial> oracle;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 1; ++c)
        if (a + b + 2 * c <= 2) {
          std::vector<MomentSymbol> s(b, MomentSymbol({1}));
          for (int i = 0; i < c; ++i) s.emplace_back(Exponents{2});
          oracle.insert(MomentMonomial({a}, s));
        }
  auto b2 = monomial_basis(1, 2);
  CHECK(std::set<MomentMonomial>(b2.begin(), b2.end()) == oracle);
  std::vector<std::string> want{"1", "x1", "m[1]", "x1^2", "x1 * m[1]", "m[1]^2", "m[2]"};
  REQUIRE(b2.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(to_string(b2[i]) == want[i]);

  // oracle after reduction with x1^2 = 1: exponents mod 2, m_0 = 1
  RuleSet bin(1);
  bin.add_binary_all();
  std::set<std::string> reduced;
  for (const auto& m : oracle) {
    int a = m.x()[0] % 2;
    std::vector<MomentSymbol> s;
    for (const auto& sym : m.symbols())
      if (sym.exponents()[0] % 2) s.emplace_back(Exponents{1});
    reduced.insert(to_string(MomentMonomial({a}, s)));
  }
  auto b3 = monomial_basis(1, 2, bin);
  std::vector<std::string> got;
  for (const auto& m : b3) got.push_back(to_string(m));
  CHECK(std::set<std::string>(got.begin(), got.end()) == reduced);
  CHECK(got == std::vector<std::string>{"1", "x1", "m[1]", "x1 * m[1]", "m[1]^2"});
}

TEST_CASE("property: ring laws") {
  std::mt19937 rng(7);
  for (int it = 0; it < 60; ++it) {
    auto f = random_poly(rng, 2), g = random_poly(rng, 2), h = random_poly(rng, 2);
    CHECK(f * g == g * f);
    CHECK((f * g) * h == f * (g * h));
    CHECK(f * (g + h) == f * g + f * h);
    CHECK(f - f == MomentPolynomial(2));
  }
}

TEST_CASE("property: moment map is linear over pure polynomials") {
  std::mt19937 rng(11);
  for (int it = 0; it < 60; ++it) {
    auto f = random_poly(rng, 2);
    auto q = formal_moment(random_poly(rng, 2));
    CHECK(q.is_pure());
    CHECK(formal_moment(q * f) == q * formal_moment(f));
    CHECK(formal_moment(q) == q);
    CHECK(formal_moment(f).is_pure());
  }
}

TEST_CASE("property: degree is additive") {
  std::mt19937 rng(13);
  for (int it = 0; it < 60; ++it) {
    auto f = random_poly(rng, 3), g = random_poly(rng, 3);
    if (f.is_zero() || g.is_zero()) continue;
    CHECK((f * g).degree() == f.degree() + g.degree());
  }
}

TEST_CASE("property: reduction is idempotent and multiplicative") {
  std::mt19937 rng(17);
  RuleSet rules(2);
  rules.add_binary_all();
  rules.add_rule("m(x2) = 0");
  rules.add_rule("m(x1*x2) = m(x1)*m(x2)");
  Reducer red(rules);
  for (int it = 0; it < 60; ++it) {
    auto f = random_poly(rng, 2), g = random_poly(rng, 2);
    auto rf = red.reduce(f);
    CHECK(red.reduce(rf) == rf);
    CHECK(red.reduce(f * g) == red.reduce(rf * red.reduce(g)));
    CHECK(rules.reduce(f) == rf);
  }
}
