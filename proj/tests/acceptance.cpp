// Acceptance runner: one line per criterion.
//   acceptance [--heavy] [--only N]...
#define DOCTEST_CONFIG_IMPLEMENT
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mompoly/certificates.hpp"
#include "mompoly/nonlocal.hpp"
#include "mompoly/pseudo_moments.hpp"
#include "mompoly/relaxation.hpp"

using namespace mompoly;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::string tolerance;
  double budget_s;  // 0: no runtime bound
  bool heavy;
  std::function<Outcome()> run;
};

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

Outcome holder_roundtrip() {
  int checked = 0, valid = 0;
  for (int k = 0; k <= 10; ++k, ++checked)
    if (verify_gram_certificate(holder_certificate(k)).valid()) ++valid;
  for (int k = 0; k <= 3; ++k)
    for (std::size_t n = 1; n <= 3; ++n)
      for (int code = 0; code < (1 << (2 * n)); ++code) {
        Exponents i(n);
        int total = 0;
        for (std::size_t j = 0; j < n; ++j) total += (i[j] = (code >> (2 * j)) & 3);
        if (total == 0 || total > 3) continue;
        ++checked;
        if (verify_gram_certificate(holder_multivariate(k, i)).valid()) ++valid;
      }
  return {valid == checked, std::to_string(valid) + "/" + std::to_string(checked) + " certificates with zero residual"};
}

Outcome adhoc_certificates() {
  int checked = 0, valid = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    int total = 1;
    for (std::size_t j = 0; j < n; ++j) total *= 3;
    for (int code = 0; code < total; ++code) {
      Exponents i(n);
      int c = code;
      for (std::size_t j = 0; j < n; ++j, c /= 3) i[j] = c % 3;
      for (bool full : {false, true}) {
        ++checked;
        if (verify_gram_certificate(full ? adhoc_certificate(i) : adhoc_core_certificate(i)).valid()) ++valid;
      }
    }
  }
  return {valid == checked, std::to_string(valid) + "/" + std::to_string(checked) + " certificates verify"};
}

// Solves eps_r and compares with the expected values in order.
Outcome eps_sequence(const ProblemSpec& spec, const std::vector<int>& orders, const std::vector<double>& expect,
                     double tol) {
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    auto s = solve_ipm(build_perturbed_sdp(spec, orders[k], Mode::EpsMin));
    bool hit = s.status == SdpStatus::Optimal && std::abs(s.objective - expect[k]) <= tol;
    ok = ok && hit;
    detail += (k ? ", " : "") + std::string("r=") + std::to_string(orders[k]) + " " + fmt(s.objective) +
              " (want " + fmt(expect[k]) + (s.status == SdpStatus::Optimal ? "" : ", " + to_string(s.status)) + ")";
  }
  return {ok, detail};
}

Outcome prod_eps() {
  ProblemSpec q(2);
  q.objective = parse_polynomial(2, "x1*x2");
  q.S1 = {parse_polynomial(2, "x1"), parse_polynomial(2, "x2")};
  q.cone = Cone::Classical;
  return eps_sequence(q, {1, 2, 3}, {0.5, 0.012428, 0.002016}, 1e-4);
}

Outcome product_of_moments_eps() {
  ProblemSpec m(2);
  m.objective = parse_polynomial(2, "m[2,0]*m[0,2]");
  m.perturbation = Perturbation::OnePsi;
  return eps_sequence(m, {2, 3, 4}, {0.33333, 0.06330, 0.01416}, 1e-3);
}

std::string size_note(std::size_t got, std::size_t want, const char* what) {
  return std::string(what) + " " + std::to_string(got) + (got == want ? " (matches " : " (differs from ") +
         std::to_string(want) + ")";
}

Outcome cov3322_bound() {
  auto p = build_sdp(cov3322_spec(2));
  auto s = solve_ipm(p);
  bool ok = s.status == SdpStatus::Optimal && std::abs(s.objective - 4.5) <= 1e-5;
  std::string detail = "bound " + fmt(s.objective, 10) + ", " + to_string(s.status) + "; " +
                       size_note(p.unknowns() - p.rows.size(), 4146, "free Gram dimension") + ", " +
                       size_note(p.max_block(), 100, "block") + "; unknowns " + std::to_string(p.unknowns()) +
                       ", rows " + std::to_string(p.rows.size());
  return {ok, detail};
}

Outcome cov3322_exact() {
  auto cert = cov3322_certificate();
  auto r = verify_gram_certificate(cert);
  bool pd = !r.block_status.empty() && r.block_status[0] == PsdStatus::PositiveDefinite;
  auto fixed = verify_gram_certificate(cov3322_certificate_corrected());
  std::string detail = "G " + (r.block_status.empty() ? std::string("unchecked") : to_string(r.block_status[0])) +
                       ", status " + to_string(r.status) + ", residual has " + std::to_string(r.residual.size()) +
                       " terms; corrected transcription: " + to_string(fixed.status);
  return {r.valid() && pd, detail};
}

Outcome bilocal_value() {
  auto a = bilocal_attainment();
  bool ok = a.objective == 4 && a.constraints_hold && a.objective_constant && a.space.size() == 16;
  return {ok, "objective " + to_string(a.objective) + ", constraints " + (a.constraints_hold ? "hold" : "violated") +
                  ", " + std::to_string(a.space.size()) + " points"};
}

Outcome bilocal_identities() {
  auto checks = bilocal_identities_check();
  std::size_t good = 0;
  for (const auto& c : checks)
    if (c.holds && c.residual.is_zero()) ++good;
  std::size_t caught = 0;
  auto neg = bilocal_identities_negative_control();
  for (const auto& c : neg)
    if (!c.holds) ++caught;
  return {good == checks.size() && !checks.empty() && caught == neg.size(),
          std::to_string(good) + "/" + std::to_string(checks.size()) + " identities with zero residual, " +
              std::to_string(caught) + "/" + std::to_string(neg.size()) + " perturbed identities rejected"};
}

Outcome bilocal_dual() {
  auto p = build_sdp(bilocal_spec(3));
  auto s = solve_ipm(p);
  bool ok = s.status == SdpStatus::Optimal && std::abs(s.objective - 4.0) <= 1e-4;
  return {ok, "bound " + fmt(s.objective, 10) + ", " + to_string(s.status) + "; " +
                  size_note(p.unknowns(), 4549, "unknowns") + ", " + size_note(p.max_block(), 325, "block")};
}

Outcome h17() {
  auto r = h17_counterexample_report(100);
  bool ok = r.status == PsdStatus::PositiveDefinite && r.pseudo_value == -7 && r.measures_checked == 100 &&
            r.measures_nonnegative;
  return {ok, "Hankel " + to_string(r.status) + ", pseudo-value " + to_string(r.pseudo_value) + ", " +
                  std::to_string(r.measures_checked) + " measures, min value " + to_string(r.min_measure_value)};
}

Outcome property_suites() {
  doctest::Context ctx;
  ctx.setOption("test-case", "property:*");
  ctx.setOption("no-intro", true);
  ctx.setOption("no-version", true);
  std::ostringstream log;
  ctx.setCout(&log);
  int rc = ctx.run();
  std::string summary;
  std::istringstream lines(log.str());
  for (std::string line; std::getline(lines, line);)
    if (line.find("test cases:") != std::string::npos) summary = line.substr(line.find("test cases:"));
  if (rc != 0) std::cerr << log.str();
  return {rc == 0 && !summary.empty(), summary};
}

}  // namespace

int main(int argc, char** argv) {
  bool heavy = false;
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    if (!std::strcmp(argv[a], "--heavy")) {
      heavy = true;
    } else if (!std::strcmp(argv[a], "--only") && a + 1 < argc) {
      only.insert(std::atoi(argv[++a]));
    } else {
      std::cerr << "usage: acceptance [--heavy] [--only N]...\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "Hoelder certificate round trip", "exact", 5, false, holder_roundtrip},
      {2, "ad hoc certificates", "exact", 5, false, adhoc_certificates},
      {3, "eps_r for x1*x2 (orders 1..3)", "abs 1e-4", 30, false, prod_eps},
      {4, "eps_r for m20*m02 (orders 2..4)", "abs 1e-3", 60, false, product_of_moments_eps},
      {5, "cov3322 membership bound", "abs 1e-5", 600, false, cov3322_bound},
      {6, "cov3322 exact certificate, verbatim", "exact", 5, false, cov3322_exact},
      {7, "bilocal attainment", "exact", 5, false, bilocal_value},
      {8, "bilocal identities", "exact", 5, false, bilocal_identities},
      {9, "bilocal dual bound at order 3", "abs 1e-4", 600, true, bilocal_dual},
      {10, "h17 pseudo-moment counterexample", "exact", 5, false, h17},
      {11, "property suites", "per suite", 0, false, property_suites},
  };

  int failed = 0;
  std::string failed_ids;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    if (c.heavy && !heavy) {
      std::cout << "[SKIP] " << c.id << " " << c.name << ": heavy, run with --heavy\n";
      continue;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.budget_s == 0 || secs <= c.budget_s;
    bool pass = o.pass && in_time;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << " (" << c.tolerance;
    if (c.budget_s > 0) std::cout << ", < " << c.budget_s << " s";
    std::cout << "): " << o.detail << " [" << fmt(secs, 3) << " s" << (in_time ? "" : ", over budget") << "]"
              << std::endl;
    if (!pass) {
      ++failed;
      failed_ids += (failed_ids.empty() ? "" : " ") + std::to_string(c.id);
    }
  }
  std::cout << "failed criteria: " << (failed_ids.empty() ? "none" : failed_ids) << std::endl;
  return failed == 0 ? 0 : 1;
}
