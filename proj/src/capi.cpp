#include "mompoly/mompoly.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "json.hpp"
#include "mompoly/certificates.hpp"
#include "mompoly/io.hpp"
#include "mompoly/measures.hpp"
#include "mompoly/nonlocal.hpp"
#include "mompoly/pseudo_moments.hpp"
#include "mompoly/relaxation.hpp"
#include "mompoly/sdp.hpp"

using json = nlohmann::json;
using namespace mompoly;

struct mp_spec {
  ProblemSpec spec;
};

struct mp_sdp {
  SdpProblem problem;
};

struct mp_solution {
  SdpSolution sol;
};

struct mp_certificate {
  GramCertificate cert;
};

namespace {

thread_local std::string last_error;

mp_status fail(mp_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class F>
mp_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const SpecError& e) {
    return fail(MP_ERR_SPEC, e.what());
  } catch (const SdpTooLarge& e) {
    return fail(MP_ERR_TOO_LARGE, e.what());
  } catch (const IoError& e) {
    return fail(MP_ERR_IO, e.what());
  } catch (const ParseError& e) {
    return fail(MP_ERR_PARSE, e.what());
  } catch (const Error& e) {
    return fail(MP_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MP_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

mp_status put(char** out, const json& j) {
  *out = dup(j.dump());
  return MP_OK;
}

#define MP_REQUIRE(cond)                                          \
  do {                                                            \
    if (!(cond)) return fail(MP_ERR_ARGUMENT, "null argument");   \
  } while (0)

// Spec mutations go through validate(); anything it rejects is a spec error.
template <class F>
mp_status mutate(mp_spec* s, F&& f) {
  return guarded([&] {
    ProblemSpec copy = s->spec;
    try {
      f(copy);
      validate(copy);
    } catch (const SpecError&) {
      throw;
    } catch (const Error& e) {
      throw SpecError(e.what());
    }
    s->spec = std::move(copy);
    return MP_OK;
  });
}

json residual_json(const SdpResiduals& r) {
  return {{"primal", r.primal}, {"dual", r.dual}, {"gap", r.gap}};
}

json sdp_json(const SdpProblem& p) {
  json blocks = json::array();
  for (const auto& b : p.blocks) blocks.push_back(b.dim);
  return {{"label", p.label},     {"form", to_string(p.form)},     {"unknowns", p.unknowns()},
          {"rows", p.rows.size()}, {"scalars", p.scalars.size()}, {"blocks", blocks},
          {"max_block", p.max_block()}};
}

json solution_json(const SdpSolution& s) {
  return {{"status", to_string(s.status)},
          {"bound", s.objective},
          {"residuals", residual_json(s.residuals)},
          {"iterations", s.iterations},
          {"message", s.message}};
}

json verification_json(const GramCertificate& c, const VerificationResult& r) {
  json blocks = json::array();
  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    json jb = {{"tag", to_string(c.blocks[b].tag)}, {"dim", c.blocks[b].G.size()}};
    if (b < r.block_status.size()) jb["psd"] = to_string(r.block_status[b]);
    blocks.push_back(jb);
  }
  json j = {{"label", c.label},
            {"target", to_string(c.target)},
            {"status", to_string(r.status)},
            {"residual", to_string(r.residual)},
            {"blocks", blocks}};
  if (r.status == CertificateStatus::NotPsd) {
    json w = json::array();
    for (const auto& x : r.psd.witness) w.push_back(to_string(x));
    j["failing_block"] = r.failing_block;
    j["witness"] = w;
    j["witness_value"] = to_string(r.psd.witness_value);
  }
  return j;
}

json verify_json(const GramCertificate& c) { return verification_json(c, verify_gram_certificate(c)); }

json identity_json(const std::vector<IdentityCheck>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name}, {"holds", c.holds}, {"residual", to_string(c.residual)}});
  return a;
}

json example_cov3322(unsigned jobs) {
  auto verbatim = cov3322_certificate();
  auto corrected = cov3322_certificate_corrected();
  auto spec = cov3322_spec(2);
  auto p = build_sdp(spec, jobs);
  auto s = solve_ipm(p);
  return {{"example", "cov3322"},
          {"certificate_verbatim", verify_json(verbatim)},
          {"certificate_corrected", verify_json(corrected)},
          {"sdp", sdp_json(p)},
          {"indeterminates", p.unknowns() - p.rows.size()},
          {"solution", solution_json(s)},
          {"reference", {{"bound", 4.5}, {"indeterminates", 4146}, {"block", 100}}}};
}

json example_bilocal(bool heavy, unsigned jobs) {
  auto att = bilocal_attainment();
  json j = {{"example", "bilocal"},
            {"identities", identity_json(bilocal_identities_check())},
            {"attainment",
             {{"points", att.space.size()},
              {"objective", to_string(att.objective)},
              {"objective_constant", att.objective_constant},
              {"constraints_hold", att.constraints_hold}}}};
  if (heavy) {
    auto p = build_sdp(bilocal_spec(3), jobs);
    auto s = solve_ipm(p);
    j["sdp"] = sdp_json(p);
    j["solution"] = solution_json(s);
    j["reference"] = {{"bound", 4.0}, {"indeterminates", 4549}, {"block", 325}};
  }
  return j;
}

json example_h17() {
  auto r = h17_counterexample_report();
  return {{"example", "h17"},
          {"hankel_status", to_string(r.status)},
          {"pseudo_value", to_string(r.pseudo_value)},
          {"dirac_value", to_string(r.dirac_value)},
          {"measures_checked", r.measures_checked},
          {"measures_nonnegative", r.measures_nonnegative},
          {"min_measure_value", to_string(r.min_measure_value)}};
}

json example_holder() {
  json a = json::array();
  for (int k = 0; k <= 10; ++k) {
    auto c = holder_certificate(k);
    a.push_back({{"k", k}, {"blocks", c.blocks.size()}, {"status", to_string(verify_gram_certificate(c).status)}});
  }
  return {{"example", "holder"}, {"certificates", a}};
}

json example_adhoc() {
  json a = json::array();
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) total *= 3;
    std::size_t valid = 0;
    for (std::size_t code = 0; code < total; ++code) {
      Exponents i(n);
      std::size_t c = code;
      for (std::size_t j = 0; j < n; ++j, c /= 3) i[j] = static_cast<int>(c % 3);
      if (verify_gram_certificate(adhoc_core_certificate(i)).valid() &&
          verify_gram_certificate(adhoc_certificate(i)).valid())
        ++valid;
    }
    a.push_back({{"n", n}, {"checked", total}, {"valid", valid}});
  }
  return {{"example", "adhoc"}, {"max_entry", 2}, {"families", a}};
}

TruncatedFunctional load_functional(const std::string& path) {
  if (path == "h17") return functional_from_hankel(2, 3, h17_hankel());
  return parse_functional(read_text_file(path));
}

json hankel_status(const TruncatedFunctional& L) {
  int d = L.degree() / 2;
  auto r = exact_psd_check(hankel_apply(L, d));
  return {{"order", d}, {"status", to_string(r.status)}, {"rank", r.rank}};
}

json functional_values(const TruncatedFunctional& L) { return json::parse(functional_to_json(L)); }

}  // namespace

extern "C" {

const char* mp_last_error(void) { return last_error.c_str(); }

const char* mp_version(void) { return "1.0.0"; }

void mp_string_free(char* s) { std::free(s); }

mp_status mp_spec_load(const char* path, mp_spec** out) {
  MP_REQUIRE(path && out);
  return guarded([&] {
    auto spec = load_spec(path);
    *out = new mp_spec{std::move(spec)};
    return MP_OK;
  });
}

mp_status mp_spec_parse(const char* text, mp_spec** out) {
  MP_REQUIRE(text && out);
  return guarded([&] {
    auto spec = parse_spec(text);
    *out = new mp_spec{std::move(spec)};
    return MP_OK;
  });
}

mp_status mp_spec_builtin(const char* name, mp_spec** out) {
  MP_REQUIRE(name && out);
  return guarded([&] {
    std::string n = name;
    if (n == "cov3322") *out = new mp_spec{cov3322_spec(2)};
    else if (n == "bilocal") *out = new mp_spec{bilocal_spec(3)};
    else throw SpecError("unknown built-in spec: " + n);
    return MP_OK;
  });
}

mp_status mp_spec_clone(const mp_spec* spec, mp_spec** out) {
  MP_REQUIRE(spec && out);
  return guarded([&] {
    *out = new mp_spec{spec->spec};
    return MP_OK;
  });
}

void mp_spec_free(mp_spec* spec) { delete spec; }

mp_status mp_spec_set_order(mp_spec* spec, int order) {
  MP_REQUIRE(spec);
  return mutate(spec, [&](ProblemSpec& s) { s.order = order; });
}

mp_status mp_spec_set_cone(mp_spec* spec, const char* cone) {
  MP_REQUIRE(spec && cone);
  return mutate(spec, [&](ProblemSpec& s) { s.cone = parse_cone(cone); });
}

mp_status mp_spec_set_mode(mp_spec* spec, const char* mode) {
  MP_REQUIRE(spec && mode);
  return mutate(spec, [&](ProblemSpec& s) { s.mode = parse_mode(mode); });
}

mp_status mp_spec_set_perturbation(mp_spec* spec, const char* perturbation) {
  MP_REQUIRE(spec && perturbation);
  return mutate(spec, [&](ProblemSpec& s) { s.perturbation = parse_perturbation(perturbation); });
}

mp_status mp_spec_set_big_m(mp_spec* spec, const char* value) {
  MP_REQUIRE(spec && value);
  return mutate(spec, [&](ProblemSpec& s) { s.big_m = parse_rational(value); });
}

mp_status mp_spec_set_epsilon(mp_spec* spec, const char* value) {
  MP_REQUIRE(spec && value);
  return mutate(spec, [&](ProblemSpec& s) { s.epsilon = parse_rational(value); });
}

int mp_spec_order(const mp_spec* spec) { return spec ? spec->spec.order : 0; }

int mp_spec_monotone_direction(const mp_spec* spec) {
  if (!spec) return 0;
  if (spec->spec.mode == Mode::EpsMin) return -1;
  return spec->spec.sense == Sense::Min ? 1 : -1;
}

mp_status mp_spec_to_json(const mp_spec* spec, char** out) {
  MP_REQUIRE(spec && out);
  return guarded([&] {
    *out = dup(spec_to_json(spec->spec));
    return MP_OK;
  });
}

mp_status mp_build(const mp_spec* spec, unsigned jobs, mp_sdp** out) {
  MP_REQUIRE(spec && out);
  return guarded([&] {
    auto p = build_sdp(spec->spec, jobs == 0 ? 1 : jobs);
    *out = new mp_sdp{std::move(p)};
    return MP_OK;
  });
}

void mp_sdp_free(mp_sdp* sdp) { delete sdp; }

mp_status mp_sdp_info(const mp_sdp* sdp, char** out) {
  MP_REQUIRE(sdp && out);
  return guarded([&] { return put(out, sdp_json(sdp->problem)); });
}

mp_status mp_sdp_write_sdpa(const mp_sdp* sdp, const char* path) {
  MP_REQUIRE(sdp && path);
  return guarded([&] {
    try {
      write_sdpa(sdp->problem, std::string(path));
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      throw IoError(e.what());
    }
    return MP_OK;
  });
}

mp_status mp_solve(const mp_sdp* sdp, double tol, int max_iter, size_t block_cap, mp_solution** out) {
  MP_REQUIRE(sdp && out);
  return guarded([&] {
    IpmOptions o;
    if (tol > 0) o.tol = tol;
    if (max_iter > 0) o.max_iter = max_iter;
    if (block_cap > 0) o.block_cap = block_cap;
    auto s = solve_ipm(sdp->problem, o);
    *out = new mp_solution{std::move(s)};
    return MP_OK;
  });
}

mp_status mp_solution_import(const mp_sdp* sdp, const char* path, double tol, mp_solution** out) {
  MP_REQUIRE(sdp && path && out);
  return guarded([&] {
    auto s = read_sdpa_solution(sdp->problem, std::string(path), tol > 0 ? tol : 1e-6);
    *out = new mp_solution{std::move(s)};
    return MP_OK;
  });
}

void mp_solution_free(mp_solution* sol) { delete sol; }

int mp_solution_optimal(const mp_solution* sol) { return sol && sol->sol.status == SdpStatus::Optimal; }

double mp_solution_bound(const mp_solution* sol) { return sol ? sol->sol.objective : 0.0; }

mp_status mp_solution_info(const mp_solution* sol, char** out) {
  MP_REQUIRE(sol && out);
  return guarded([&] { return put(out, solution_json(sol->sol)); });
}

mp_status mp_certificate_load(const char* path, mp_certificate** out) {
  MP_REQUIRE(path && out);
  return guarded([&] {
    auto c = load_certificate(path);
    *out = new mp_certificate{std::move(c)};
    return MP_OK;
  });
}

mp_status mp_certificate_builtin(const char* name, mp_certificate** out) {
  MP_REQUIRE(name && out);
  return guarded([&] {
    std::string n = name;
    if (n == "cov3322") *out = new mp_certificate{cov3322_certificate()};
    else if (n == "cov3322_corrected") *out = new mp_certificate{cov3322_certificate_corrected()};
    else return fail(MP_ERR_ARGUMENT, "unknown built-in certificate: " + n);
    return MP_OK;
  });
}

mp_status mp_certificate_holder(int k, mp_certificate** out) {
  MP_REQUIRE(out);
  return guarded([&] {
    *out = new mp_certificate{holder_certificate(k)};
    return MP_OK;
  });
}

mp_status mp_certificate_adhoc(const int* i, size_t n, int full, mp_certificate** out) {
  MP_REQUIRE(i && out && n > 0);
  return guarded([&] {
    Exponents e(i, i + n);
    *out = new mp_certificate{full ? adhoc_certificate(e) : adhoc_core_certificate(e)};
    return MP_OK;
  });
}

void mp_certificate_free(mp_certificate* cert) { delete cert; }

mp_status mp_certificate_to_json(const mp_certificate* cert, char** out) {
  MP_REQUIRE(cert && out);
  return guarded([&] {
    *out = dup(certificate_to_json(cert->cert));
    return MP_OK;
  });
}

mp_status mp_certificate_verify(const mp_certificate* cert, char** report) {
  MP_REQUIRE(cert && report);
  return guarded([&] {
    auto r = verify_gram_certificate(cert->cert);
    put(report, verification_json(cert->cert, r));
    if (r.valid()) return MP_OK;
    return fail(MP_ERR_INVALID_CERTIFICATE, "certificate is " + to_string(r.status));
  });
}

mp_status mp_example(const char* name, int heavy, unsigned jobs, char** report) {
  MP_REQUIRE(name && report);
  return guarded([&] {
    std::string n = name;
    unsigned j = jobs == 0 ? 1 : jobs;
    if (n == "cov3322") return put(report, example_cov3322(j));
    if (n == "bilocal") return put(report, example_bilocal(heavy != 0, j));
    if (n == "h17") return put(report, example_h17());
    if (n == "holder") return put(report, example_holder());
    if (n == "adhoc") return put(report, example_adhoc());
    return fail(MP_ERR_ARGUMENT, "unknown example: " + n);
  });
}

mp_status mp_reformulate(const mp_spec* spec, char** report) {
  MP_REQUIRE(spec && report);
  return guarded([&] {
    auto prog = tchakaloff_reformulate(spec->spec);
    json ineq = json::array(), eq = json::array();
    for (const auto& g : prog.inequalities) ineq.push_back(to_string(g));
    for (const auto& h : prog.equalities) eq.push_back(to_string(h));
    return put(report, {{"num_vars", prog.num_vars},
                        {"atoms", prog.atoms},
                        {"degree", prog.degree},
                        {"var_names", prog.var_names},
                        {"sense", to_string(prog.sense)},
                        {"objective", to_string(prog.objective)},
                        {"inequalities", ineq},
                        {"equalities", eq}});
  });
}

mp_status mp_hankel(const char* functional_path, const char* action, const char* delta, char** report) {
  MP_REQUIRE(functional_path && action && report);
  return guarded([&] {
    auto L = load_functional(functional_path);
    std::string a = action;
    json j = {{"action", a}, {"n", L.arity()}, {"degree", L.degree()}, {"unital", L.unital()},
              {"hankel", hankel_status(L)}};
    if (a == "check") return put(report, j);
    if (a == "extend") {
      auto ext = extend_functional(L);
      j["alpha"] = to_string(ext.alpha);
      j["extended_hankel"] = hankel_status(ext.functional);
      j["functional"] = functional_values(ext.functional);
      return put(report, j);
    }
    if (a == "perturb") {
      auto found = perturb_search(L, parse_rational(delta ? delta : "1/2"));
      if (!found) {
        j["found"] = false;
        return put(report, j);
      }
      j["found"] = true;
      j["delta"] = to_string(found->delta);
      j["halvings"] = found->halvings;
      j["perturbed_hankel"] = hankel_status(found->functional);
      j["functional"] = functional_values(found->functional);
      return put(report, j);
    }
    return fail(MP_ERR_ARGUMENT, "unknown hankel action: " + a);
  });
}

}  // extern "C"
