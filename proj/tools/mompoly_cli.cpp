// Command-line front end.  Talks to the library through the C API only.
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mompoly/mompoly.h"

using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSpec = 2, kSolver = 3, kCertificate = 4 };

struct Failure {
  int code;
  std::string message;
};

// Owns a string returned by the C API.
std::string take(char* s) {
  std::string out = s ? s : "";
  mp_string_free(s);
  return out;
}

json take_json(char* s) { return json::parse(take(s)); }

[[noreturn]] void raise(int code, const std::string& what) {
  throw Failure{code, what + ": " + mp_last_error()};
}

void check(mp_status st, int code, const std::string& what) {
  if (st != MP_OK) raise(code, what);
}

int solver_exit(mp_status st) { return st == MP_ERR_SPEC ? kSpec : kSolver; }

struct SpecHandle {
  mp_spec* p = nullptr;
  SpecHandle() = default;
  SpecHandle(const SpecHandle&) = delete;
  SpecHandle& operator=(const SpecHandle&) = delete;
  ~SpecHandle() { mp_spec_free(p); }
};

struct SdpHandle {
  mp_sdp* p = nullptr;
  ~SdpHandle() { mp_sdp_free(p); }
};

struct SolutionHandle {
  mp_solution* p = nullptr;
  ~SolutionHandle() { mp_solution_free(p); }
};

struct CertHandle {
  mp_certificate* p = nullptr;
  ~CertHandle() { mp_certificate_free(p); }
};

struct Output {
  std::string out_path;
  bool pretty = false;
};

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

std::string table(const json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << k << std::string(w - k.size() + 2, ' ') << v << "\n";
  return os.str();
}

void emit(const json& report, const Output& o) {
  std::string text = report.dump(2) + "\n";
  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path);
    if (!f || !(f << text)) throw Failure{kUsage, "cannot write " + o.out_path};
  }
  std::cout << (o.pretty ? table(report) : text);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string spec;
  std::optional<int> order;
  std::string cone, mode, perturbation, epsilon, big_m;
  std::string solver = "ipm";
  std::string sdpa_file, solution_file;
  std::string sweep;
  double tol = 1e-8;
  int max_iter = 100;
  std::size_t block_cap = 500;
  unsigned jobs = 1;
};

void load_spec(const std::string& src, SpecHandle& h) {
  mp_status st;
  if (!std::filesystem::exists(src) && (src == "cov3322" || src == "bilocal"))
    st = mp_spec_builtin(src.c_str(), &h.p);
  else
    st = mp_spec_load(src.c_str(), &h.p);
  if (st != MP_OK) raise(kSpec, "invalid spec " + src);
}

void configure(const SolveOptions& o, SpecHandle& h) {
  load_spec(o.spec, h);
  auto set = [&](mp_status st, const char* what) { check(st, kSpec, std::string("invalid ") + what); };
  if (!o.cone.empty()) set(mp_spec_set_cone(h.p, o.cone.c_str()), "--cone");
  if (!o.mode.empty()) set(mp_spec_set_mode(h.p, o.mode.c_str()), "--mode");
  if (!o.perturbation.empty()) set(mp_spec_set_perturbation(h.p, o.perturbation.c_str()), "--perturbation");
  if (!o.epsilon.empty()) set(mp_spec_set_epsilon(h.p, o.epsilon.c_str()), "--epsilon");
  if (!o.big_m.empty()) set(mp_spec_set_big_m(h.p, o.big_m.c_str()), "--M");
  if (o.order) set(mp_spec_set_order(h.p, *o.order), "--order");
}

std::string default_sdpa_path(const SolveOptions& o, int order) {
  std::string stem = std::filesystem::path(o.spec).stem().string();
  return stem + "_r" + std::to_string(order) + ".dat-s";
}

// One relaxation at the spec's current order.  Throws Failure on spec or solver errors.
json run_one(const SolveOptions& o, const mp_spec* spec, const std::string& solver, unsigned build_jobs,
             bool solve_required) {
  int order = mp_spec_order(spec);
  json spec_json = take_json([&] {
    char* s = nullptr;
    check(mp_spec_to_json(spec, &s), kSpec, "invalid spec");
    return s;
  }());
  SdpHandle sdp;
  mp_status st = mp_build(spec, build_jobs, &sdp.p);
  if (st != MP_OK) raise(solver_exit(st), "building the relaxation failed");
  char* info = nullptr;
  check(mp_sdp_info(sdp.p, &info), kSolver, "sdp info");
  json run = {{"spec", spec_json["name"]},
              {"order", order},
              {"cone", spec_json["cone"]},
              {"mode", spec_json["mode"]},
              {"sense", spec_json["sense"]},
              {"solver", solver},
              {"sizes", take_json(info)}};

  SolutionHandle sol;
  if (solver == "sdpa-export") {
    std::string path = o.sdpa_file.empty() ? default_sdpa_path(o, order) : o.sdpa_file;
    check(mp_sdp_write_sdpa(sdp.p, path.c_str()), kSolver, "writing " + path);
    run["sdpa_file"] = path;
    if (o.solution_file.empty()) {
      run["status"] = "exported";
      if (solve_required) throw Failure{kSolver, "sdpa-export needs --solution to produce a bound"};
      return run;
    }
    st = mp_solution_import(sdp.p, o.solution_file.c_str(), o.tol > 1e-6 ? o.tol : 1e-6, &sol.p);
    if (st != MP_OK) raise(kSolver, "reading " + o.solution_file);
    run["solution_file"] = o.solution_file;
  } else {
    st = mp_solve(sdp.p, o.tol, o.max_iter, o.block_cap, &sol.p);
    if (st != MP_OK) raise(kSolver, "solver failed");
  }
  char* si = nullptr;
  check(mp_solution_info(sol.p, &si), kSolver, "solution info");
  json s = take_json(si);
  run["status"] = s["status"];
  run["bound"] = s["bound"];
  run["residuals"] = s["residuals"];
  run["iterations"] = s["iterations"];
  if (!mp_solution_optimal(sol.p)) {
    run["message"] = s["message"];
    run["failed"] = true;
  }
  return run;
}

std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) throw Failure{kUsage, "--sweep expects r1..r2"};
  try {
    int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
    if (a < 1 || b < a) throw Failure{kUsage, "--sweep range must satisfy 1 <= r1 <= r2"};
    return {a, b};
  } catch (const std::logic_error&) {
    throw Failure{kUsage, "--sweep expects r1..r2"};
  }
}

int cmd_solve(const SolveOptions& o, const Output& out, const std::string& echo) {
  auto t0 = std::chrono::steady_clock::now();
  std::string solver = o.solver;
  if (const char* env = std::getenv("MOMPOLY_SOLVER"); env && *env) solver = env;
  if (solver != "ipm" && solver != "sdpa-export") throw Failure{kUsage, "unknown solver " + solver};

  SpecHandle base;
  configure(o, base);

  if (o.sweep.empty()) {
    json run = run_one(o, base.p, solver, o.jobs, false);
    json report = {{"command", echo}};
    report.update(run);
    report["wall_time_s"] = seconds_since(t0);
    emit(report, out);
    if (run.value("failed", false)) {
      std::cerr << "solver did not reach optimality: " << run.value("message", "") << "\n";
      return kSolver;
    }
    return kOk;
  }

  auto [r1, r2] = parse_range(o.sweep);
  std::vector<std::unique_ptr<SpecHandle>> specs;
  for (int r = r1; r <= r2; ++r) {
    specs.push_back(std::make_unique<SpecHandle>());
    check(mp_spec_clone(base.p, &specs.back()->p), kSpec, "clone");
    check(mp_spec_set_order(specs.back()->p, r), kSpec, "invalid order " + std::to_string(r));
  }
  std::vector<json> runs(specs.size());
  std::vector<std::optional<Failure>> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < specs.size();) {
      try {
        runs[k] = run_one(o, specs[k]->p, solver, 1, true);
      } catch (const Failure& f) {
        errors[k] = f;
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned workers = std::max(1u, std::min<unsigned>(o.jobs, specs.size()));
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) throw *e;

  int dir = mp_spec_monotone_direction(base.p);
  bool monotone = true, all_optimal = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].value("failed", false)) all_optimal = false;
    if (k == 0) continue;
    double prev = runs[k - 1]["bound"].get<double>(), cur = runs[k]["bound"].get<double>();
    double slack = 1e-6 * std::max(1.0, std::abs(prev));
    if (dir * (cur - prev) < -slack) monotone = false;
  }
  json report = {{"command", echo},
                 {"sweep", runs},
                 {"direction", dir > 0 ? "nondecreasing" : "nonincreasing"},
                 {"monotone", monotone},
                 {"wall_time_s", seconds_since(t0)}};
  emit(report, out);
  if (!all_optimal) {
    std::cerr << "at least one order did not reach optimality\n";
    return kSolver;
  }
  if (!monotone) {
    std::cerr << "bounds are not monotone across orders\n";
    return kSolver;
  }
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string target;
  int k = 5;
  std::string i;
  bool full = false;
};

std::vector<int> parse_index(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  try {
    while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
  } catch (const std::logic_error&) {
    throw Failure{kUsage, "--i expects comma-separated integers"};
  }
  if (out.empty()) throw Failure{kUsage, "--i expects comma-separated integers"};
  return out;
}

int cmd_verify(const VerifyOptions& o, const Output& out, const std::string& echo) {
  auto t0 = std::chrono::steady_clock::now();
  CertHandle c;
  mp_status st;
  if (o.target == "holder") {
    st = mp_certificate_holder(o.k, &c.p);
  } else if (o.target == "adhoc") {
    auto i = parse_index(o.i.empty() ? "1,1" : o.i);
    st = mp_certificate_adhoc(i.data(), i.size(), o.full ? 1 : 0, &c.p);
  } else if (!std::filesystem::exists(o.target) && (o.target == "cov3322" || o.target == "cov3322_corrected")) {
    st = mp_certificate_builtin(o.target.c_str(), &c.p);
  } else {
    st = mp_certificate_load(o.target.c_str(), &c.p);
  }
  if (st == MP_ERR_ARGUMENT) raise(kUsage, "cannot build certificate");
  if (st != MP_OK) raise(kCertificate, "cannot read certificate " + o.target);
  char* rep = nullptr;
  st = mp_certificate_verify(c.p, &rep);
  json report = {{"command", echo}};
  if (rep) report.update(take_json(rep));
  report["wall_time_s"] = seconds_since(t0);
  if (st != MP_OK && st != MP_ERR_INVALID_CERTIFICATE) raise(kUsage, "verification failed");
  emit(report, out);
  return st == MP_OK ? kOk : kCertificate;
}

// ---------------------------------------------------------------- examples, reformulate, hankel

int cmd_examples(const std::string& name, bool heavy, unsigned jobs, const Output& out, const std::string& echo) {
  auto t0 = std::chrono::steady_clock::now();
  char* rep = nullptr;
  mp_status st = mp_example(name.c_str(), heavy ? 1 : 0, jobs, &rep);
  if (st != MP_OK) raise(st == MP_ERR_ARGUMENT ? kUsage : kSolver, "example " + name);
  json report = {{"command", echo}};
  report.update(take_json(rep));
  report["wall_time_s"] = seconds_since(t0);
  emit(report, out);
  if (report.contains("solution") && report["solution"]["status"] != "optimal") return kSolver;
  return kOk;
}

int cmd_reformulate(const std::string& spec_path, std::optional<int> order, const Output& out,
                    const std::string& echo) {
  auto t0 = std::chrono::steady_clock::now();
  SpecHandle h;
  load_spec(spec_path, h);
  if (order) check(mp_spec_set_order(h.p, *order), kSpec, "invalid --order");
  char* rep = nullptr;
  check(mp_reformulate(h.p, &rep), kSpec, "reformulation failed");
  json report = {{"command", echo}};
  report.update(take_json(rep));
  report["wall_time_s"] = seconds_since(t0);
  emit(report, out);
  return kOk;
}

int cmd_hankel(const std::string& path, bool extend, const std::string& perturb, const Output& out,
               const std::string& echo) {
  auto t0 = std::chrono::steady_clock::now();
  const char* action = extend ? "extend" : perturb.empty() ? "check" : "perturb";
  char* rep = nullptr;
  mp_status st = mp_hankel(path.c_str(), action, perturb.empty() ? nullptr : perturb.c_str(), &rep);
  if (st != MP_OK) raise(st == MP_ERR_IO || st == MP_ERR_PARSE ? kSpec : kUsage, "hankel " + path);
  json report = {{"command", echo}};
  report.update(take_json(rep));
  report["wall_time_s"] = seconds_since(t0);
  emit(report, out);
  return kOk;
}

void add_output(CLI::App* sub, Output& o) {
  sub->add_option("--out", o.out_path, "Also write the JSON report to this file");
  sub->add_flag("--pretty", o.pretty, "Print a table instead of JSON");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment polynomial optimisation: relaxations, certificates and examples"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mp_version()));

  std::string echo;
  for (int a = 1; a < argc; ++a) echo += (a > 1 ? " " : "") + std::string(argv[a]);

  SolveOptions so;
  Output solve_out;
  int order_arg = 0;
  auto* solve = app.add_subcommand("solve", "Build and solve a relaxation");
  solve->add_option("spec", so.spec, "Spec file (or cov3322, bilocal)")->required();
  auto* order_opt = solve->add_option("--order", order_arg, "Truncation order r");
  solve->add_option("--cone", so.cone, "qm, qqm or classical");
  solve->add_option("--mode", so.mode, "membership, dual, eps_min, qrm or f_eps");
  solve->add_option("--perturbation", so.perturbation, "phi_psi, one_psi or m_phi");
  solve->add_option("--epsilon", so.epsilon, "Epsilon for f_eps");
  solve->add_option("--M", so.big_m, "Bound M for qrm");
  solve->add_option("--solver", so.solver, "ipm or sdpa-export (MOMPOLY_SOLVER overrides)");
  solve->add_option("--sdpa-file", so.sdpa_file, "Where sdpa-export writes the problem");
  solve->add_option("--solution", so.solution_file, "SDPA or CSDP solution to import");
  solve->add_option("--tol", so.tol, "Solver tolerance");
  solve->add_option("--max-iter", so.max_iter, "Solver iteration limit");
  solve->add_option("--block-cap", so.block_cap, "Largest block the solver accepts");
  solve->add_option("--sweep", so.sweep, "Solve orders r1..r2 and check monotonicity");
  solve->add_option("--jobs", so.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_output(solve, solve_out);

  VerifyOptions vo;
  Output verify_out;
  auto* verify = app.add_subcommand("verify", "Check a Gram certificate exactly");
  verify->add_option("target", vo.target, "Certificate file, holder, adhoc, cov3322 or cov3322_corrected")
      ->required();
  verify->add_option("--k", vo.k, "Exponent for holder");
  verify->add_option("--i", vo.i, "Multi-index for adhoc, e.g. 1,2");
  verify->add_flag("--full", vo.full, "adhoc: include the Hoelder block");
  add_output(verify, verify_out);

  std::string example;
  bool heavy = false;
  unsigned example_jobs = 1;
  Output example_out;
  auto* examples = app.add_subcommand("examples", "Run a worked example");
  examples->add_option("name", example, "cov3322, bilocal, h17, holder or adhoc")
      ->required()
      ->check(CLI::IsMember({"cov3322", "bilocal", "h17", "holder", "adhoc"}));
  examples->add_flag("--heavy", heavy, "Include the slow parts");
  examples->add_option("--jobs", example_jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_output(examples, example_out);

  std::string ref_spec;
  int ref_order = 0;
  Output ref_out;
  auto* reformulate = app.add_subcommand("reformulate", "Classical program over finitely many atoms");
  reformulate->add_option("spec", ref_spec, "Spec file")->required();
  auto* ref_order_opt = reformulate->add_option("--order", ref_order, "Override the spec order");
  add_output(reformulate, ref_out);

  std::string functional;
  bool extend = false;
  std::string perturb;
  Output hankel_out;
  auto* hankel = app.add_subcommand("hankel", "Pseudo-moment utilities on a functional");
  hankel->add_option("functional", functional, "Functional file or h17")->required();
  auto* ext_flag = hankel->add_flag("--extend", extend, "Extend to the next degree");
  hankel->add_option("--perturb", perturb, "Mix with uniform box moments starting from this delta")
      ->excludes(ext_flag);
  add_output(hankel, hankel_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      if (*order_opt) so.order = order_arg;
      return cmd_solve(so, solve_out, echo);
    }
    if (*verify) return cmd_verify(vo, verify_out, echo);
    if (*examples) return cmd_examples(example, heavy, example_jobs, example_out, echo);
    if (*reformulate)
      return cmd_reformulate(ref_spec, *ref_order_opt ? std::optional<int>(ref_order) : std::nullopt, ref_out, echo);
    if (*hankel) return cmd_hankel(functional, extend, perturb, hankel_out, echo);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
