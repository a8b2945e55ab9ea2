#include <set>

#include "doctest.h"
#include "mompoly/io.hpp"
#include "mompoly/nonlocal.hpp"

using namespace mompoly;

namespace {

const std::string kData = MOMPOLY_DATA_DIR;

std::set<std::string> rule_set(const RuleSet& r) {
  auto d = r.describe();
  return {d.begin(), d.end()};
}

}  // namespace

TEST_CASE("shipped specs agree with the built-in problems") {
  auto cov = load_spec(kData + "/cov3322.json");
  auto ref = cov3322_spec(2);
  CHECK(cov.n == 6);
  CHECK(cov.objective == ref.objective);
  CHECK(rule_set(cov.rules) == rule_set(ref.rules));
  CHECK(cov.sense == Sense::Max);
  CHECK(cov.order == 2);

  auto bil = load_spec(kData + "/bilocal.json");
  auto bref = bilocal_spec(3);
  CHECK(bil.objective == bref.objective);
  CHECK(rule_set(bil.rules) == rule_set(bref.rules));
  CHECK(bil.mode == Mode::Dual);

  auto prod = load_spec(kData + "/prod_x1x2.json");
  CHECK(prod.cone == Cone::Classical);
  CHECK(prod.mode == Mode::EpsMin);
  CHECK(prod.S1.size() == 2);
  auto m = load_spec(kData + "/m20m02.json");
  CHECK(m.objective == parse_polynomial(2, "m[2,0]*m[0,2]"));
  CHECK(m.perturbation == Perturbation::OnePsi);
}

TEST_CASE("spec round trip") {
  for (const char* f : {"cov3322.json", "bilocal.json", "prod_x1x2.json", "m20m02.json"}) {
    auto s = load_spec(kData + "/" + f);
    s.big_m = Rational(7, 2);
    s.epsilon = Rational(1, 100);
    auto text = spec_to_json(s);
    auto back = parse_spec(text);
    CHECK(spec_to_json(back) == text);
    CHECK(back.objective == s.objective);
    CHECK(*back.big_m == Rational(7, 2));
  }
}

TEST_CASE("malformed specs") {
  CHECK_THROWS_AS(parse_spec("{"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"objective": "m[1]"})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "objective": "m[1"})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "objective": "m[1]", "S1": ["m[1]"]})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "objective": "m[1]", "cone": "cube"})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "objective": "m[1]", "binary": [2]})"), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"n": 1, "objective": "m[4]", "order": 1})"), SpecError);
  CHECK_THROWS_AS(load_spec(kData + "/missing.json"), IoError);
  auto ok = parse_spec(R"({"n": 2, "objective": "m[1,0]", "binary": [1], "rules": ["m[0,1] = 0"]})");
  CHECK(ok.rules.describe().size() == 2);
}

TEST_CASE("certificate files") {
  auto verbatim = load_certificate(kData + "/cov3322.cert.json");
  auto ref = cov3322_certificate();
  CHECK(verbatim.target == ref.target);
  REQUIRE(verbatim.blocks.size() == 1);
  CHECK(verbatim.blocks[0].G == ref.blocks[0].G);
  CHECK(verbatim.blocks[0].v == ref.blocks[0].v);
  auto r = verify_gram_certificate(verbatim);
  CHECK(r.status == CertificateStatus::Invalid);
  CHECK(r.residual == verify_gram_certificate(ref).residual);
  CHECK(r.block_status.at(0) == PsdStatus::PositiveDefinite);

  auto fixed = load_certificate(kData + "/cov3322.corrected.cert.json");
  CHECK(verify_gram_certificate(fixed).valid());

  auto h = holder_certificate(4);
  auto back = parse_certificate(certificate_to_json(h));
  CHECK(back.target == h.target);
  CHECK(verify_gram_certificate(back).valid());

  CHECK_THROWS_AS(parse_certificate("[1, 2"), ParseError);
  CHECK_THROWS_AS(parse_certificate(R"({"n": 1, "target": "m[2]"})"), ParseError);
}

TEST_CASE("measure and functional files") {
  FiniteMeasure mu({{Rational(1, 2), Rational(-1)}, {Rational(0), Rational(3)}}, {Rational(1, 3), Rational(2, 3)});
  auto back = parse_measure(measure_to_json(mu));
  CHECK(back.atoms() == mu.atoms());
  CHECK(back.weights() == mu.weights());
  auto m = parse_measure(R"({"atoms": [[0], [1]], "weights": ["1/4", 0.75]})");
  CHECK(m.weights()[1] == Rational(3, 4));
  CHECK_THROWS(parse_measure(R"({"atoms": [[0]], "weights": ["1/2"]})"));

  auto L = TruncatedFunctional::from_measure(mu, 4);
  auto L2 = parse_functional(functional_to_json(L));
  CHECK(L2.values() == L.values());
  CHECK(L2.degree() == 4);
  CHECK_THROWS_AS(parse_functional(R"({"n": 1, "degree": 2, "values": {"m[1]": "1"}})"), ParseError);
}
