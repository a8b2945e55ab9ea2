#pragma once

#include <string>
#include <vector>

#include "mompoly/certificates.hpp"
#include "mompoly/measures.hpp"
#include "mompoly/problem.hpp"

namespace mompoly {

// Covariance Bell inequality with three binary observables per party:
// A_j = x_j, B_j = x_{j+3}.
MomentPolynomial covariance(std::size_t n, std::size_t a, std::size_t b);
ProblemSpec cov3322_spec(int order = 2);
// 9/2 - f = m(v^T G v) modulo x_j^2 = 1, G and v transcribed verbatim.
GramCertificate cov3322_certificate();
// Same G and v with m[1,1,0,0,0,0] replaced by m[1,0,0,0,0,0] + m[0,1,0,0,0,0].
// The verbatim version leaves a nonzero residual; this one is exact.
GramCertificate cov3322_certificate_corrected();

// Bilocal scenario on n = 9: A_i = x_i, B_i = x_{i+3}, C_i = x_{i+6}.
RuleSet bilocal_rules();
MomentPolynomial bilocal_objective();
ProblemSpec bilocal_spec(int order = 3);

struct IdentityCheck {
  std::string name;
  MomentPolynomial lhs{9};
  MomentPolynomial rhs{9};
  MomentPolynomial residual{9};
  bool holds = false;
};

// The two families of sum-of-squares identities behind the bound 4.
std::vector<IdentityCheck> bilocal_identities_check();
// Same identities with the sign of one term flipped; none should hold.
std::vector<IdentityCheck> bilocal_identities_negative_control();

struct AttainmentReport {
  FiniteProbabilitySpace space{{Rational(1)}};
  Rational objective;
  bool constraints_hold = false;
  bool objective_constant = false;
};

// Uniform 16-point space on {1,2,3,4}^2 attaining the value 4.
AttainmentReport bilocal_attainment();

}  // namespace mompoly
