#include "mompoly/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mompoly {

using json = nlohmann::json;

namespace {

template <class E>
json parse_or_throw(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw E(std::string("malformed JSON: ") + e.what());
  }
}

Rational rational_of(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number()) return parse_rational(j.dump());
  throw ParseError("expected a rational, got " + j.dump());
}

std::size_t var_index(const json& j, std::size_t n) {
  long v = j.get<long>();
  if (v < 1 || static_cast<std::size_t>(v) > n) throw DimensionError("variable index out of range: " + j.dump());
  return static_cast<std::size_t>(v - 1);
}

// "rules", "binary" and "independence" keys of a spec or certificate.
void read_rules(const json& j, RuleSet& rules) {
  std::size_t n = rules.arity();
  if (j.contains("binary")) {
    const auto& b = j.at("binary");
    if (b.is_string() && b.get<std::string>() == "all") {
      rules.add_binary_all();
    } else {
      std::vector<std::size_t> vars;
      for (const auto& v : b) vars.push_back(var_index(v, n));
      rules.add_binary(vars);
    }
  }
  if (j.contains("independence"))
    for (const auto& pair : j.at("independence")) {
      std::vector<std::size_t> left, right;
      for (const auto& v : pair.at("left")) left.push_back(var_index(v, n));
      for (const auto& v : pair.at("right")) right.push_back(var_index(v, n));
      rules.add_independence(left, right);
    }
  if (j.contains("rules"))
    for (const auto& r : j.at("rules")) rules.add_rule(r.get<std::string>());
}

std::vector<MomentPolynomial> poly_list(const json& j, const char* key, std::size_t n) {
  std::vector<MomentPolynomial> out;
  if (j.contains(key))
    for (const auto& s : j.at(key)) out.push_back(parse_polynomial(n, s.get<std::string>()));
  return out;
}

std::size_t arity_of(const json& j) {
  long n = j.at("n").get<long>();
  if (n < 1) throw DimensionError("n must be at least 1");
  return static_cast<std::size_t>(n);
}

json poly_strings(const std::vector<MomentPolynomial>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(to_string(p));
  return a;
}

Point point_of(const json& j) {
  Point p;
  for (const auto& c : j) p.push_back(rational_of(c));
  return p;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

ProblemSpec parse_spec(std::string_view text) {
  json j = parse_or_throw<SpecError>(text);
  try {
    ProblemSpec spec(arity_of(j));
    std::size_t n = spec.n;
    spec.name = j.value("name", "");
    spec.S1 = poly_list(j, "S1", n);
    spec.S2 = poly_list(j, "S2", n);
    read_rules(j, spec.rules);
    spec.objective = parse_polynomial(n, j.at("objective").get<std::string>());
    spec.sense = parse_sense(j.value("sense", "min"));
    spec.order = j.value("order", 1);
    spec.cone = parse_cone(j.value("cone", "qm"));
    spec.mode = parse_mode(j.value("mode", "membership"));
    spec.perturbation = parse_perturbation(j.value("perturbation", "one_psi"));
    if (j.contains("M")) spec.big_m = rational_of(j.at("M"));
    if (j.contains("epsilon")) spec.epsilon = rational_of(j.at("epsilon"));
    validate(spec);
    return spec;
  } catch (const SpecError&) {
    throw;
  } catch (const json::exception& e) {
    throw SpecError(std::string("bad spec field: ") + e.what());
  } catch (const Error& e) {
    throw SpecError(e.what());
  }
}

ProblemSpec load_spec(const std::string& path) { return parse_spec(read_text_file(path)); }

std::string spec_to_json(const ProblemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["n"] = spec.n;
  j["S1"] = poly_strings(spec.S1);
  j["S2"] = poly_strings(spec.S2);
  j["rules"] = spec.rules.describe();
  j["objective"] = to_string(spec.objective);
  j["sense"] = to_string(spec.sense);
  j["order"] = spec.order;
  j["cone"] = to_string(spec.cone);
  j["mode"] = to_string(spec.mode);
  j["perturbation"] = to_string(spec.perturbation);
  if (spec.big_m) j["M"] = to_string(*spec.big_m);
  if (spec.epsilon != 0) j["epsilon"] = to_string(spec.epsilon);
  return j.dump(2) + "\n";
}

GramCertificate parse_certificate(std::string_view text) {
  json j = parse_or_throw<ParseError>(text);
  try {
    GramCertificate cert(arity_of(j));
    std::size_t n = cert.n;
    cert.label = j.value("label", "");
    cert.target = parse_polynomial(n, j.at("target").get<std::string>());
    read_rules(j, cert.rules);
    for (const auto& b : j.at("blocks")) {
      GramBlock g{parse_block_tag(b.value("tag", "moment_square")), parse_polynomial(n, b.value("constraint", "1")),
                  {}, {}};
      for (const auto& row : b.at("G")) {
        g.G.emplace_back();
        for (const auto& x : row) g.G.back().push_back(rational_of(x));
      }
      for (const auto& v : b.at("v")) g.v.push_back(parse_polynomial(n, v.get<std::string>()));
      cert.blocks.push_back(std::move(g));
    }
    return cert;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad certificate field: ") + e.what());
  }
}

GramCertificate load_certificate(const std::string& path) { return parse_certificate(read_text_file(path)); }

std::string certificate_to_json(const GramCertificate& cert) {
  json j;
  j["label"] = cert.label;
  j["n"] = cert.n;
  j["target"] = to_string(cert.target);
  j["rules"] = cert.rules.describe();
  json blocks = json::array();
  for (const auto& b : cert.blocks) {
    json jb;
    jb["tag"] = to_string(b.tag);
    jb["constraint"] = to_string(b.constraint);
    json G = json::array();
    for (const auto& row : b.G) {
      json r = json::array();
      for (const auto& x : row) r.push_back(to_string(x));
      G.push_back(r);
    }
    jb["G"] = G;
    jb["v"] = poly_strings(b.v);
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  return j.dump(2) + "\n";
}

FiniteMeasure parse_measure(std::string_view text) {
  json j = parse_or_throw<ParseError>(text);
  try {
    std::vector<Point> atoms;
    std::vector<Rational> weights;
    for (const auto& a : j.at("atoms")) atoms.push_back(point_of(a));
    for (const auto& w : j.at("weights")) weights.push_back(rational_of(w));
    return FiniteMeasure(atoms, weights);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad measure field: ") + e.what());
  }
}

std::string measure_to_json(const FiniteMeasure& mu) {
  json j;
  json atoms = json::array();
  for (const auto& a : mu.atoms()) {
    json p = json::array();
    for (const auto& c : a) p.push_back(to_string(c));
    atoms.push_back(p);
  }
  j["atoms"] = atoms;
  json w = json::array();
  for (const auto& x : mu.weights()) w.push_back(to_string(x));
  j["weights"] = w;
  return j.dump(2) + "\n";
}

TruncatedFunctional parse_functional(std::string_view text) {
  json j = parse_or_throw<ParseError>(text);
  try {
    std::size_t n = arity_of(j);
    TruncatedFunctional L(n, j.at("degree").get<int>());
    for (const auto& [key, value] : j.at("values").items()) {
      MomentPolynomial m = parse_polynomial(n, key);
      if (m.size() != 1 || !m.is_x_only() || m.terms().begin()->second != 1)
        throw ParseError("functional keys must be x-monomials: " + key);
      L.set(m.terms().begin()->first.x(), rational_of(value));
    }
    return L;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad functional field: ") + e.what());
  }
}

std::string functional_to_json(const TruncatedFunctional& L) {
  json j;
  j["n"] = L.arity();
  j["degree"] = L.degree();
  json values = json::object();
  for (const auto& [e, v] : L.values())
    values[to_string(MomentMonomial(e, {}))] = to_string(v);
  j["values"] = values;
  return j.dump(2) + "\n";
}

}  // namespace mompoly
