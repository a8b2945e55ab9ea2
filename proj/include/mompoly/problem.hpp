#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mompoly/algebra.hpp"
#include "mompoly/rules.hpp"

namespace mompoly {

class SpecError : public Error {
 public:
  using Error::Error;
};

enum class Sense { Min, Max };
enum class Cone { Qm, Qqm, Classical };
enum class Mode { Membership, Dual, EpsMin, QrM, FEps };
// eps_min perturbations: Phi_r + Psi_r, 1 + Psi_r, m(Phi_r)
enum class Perturbation { PhiPsi, OnePsi, MomentPhi };

struct ProblemSpec {
  explicit ProblemSpec(std::size_t n)
      : n(n), rules(n), objective(n) {}

  std::size_t n;
  std::string name;
  std::vector<MomentPolynomial> S1;  // x-only constraints s >= 0 on the variables
  std::vector<MomentPolynomial> S2;  // pure constraints t >= 0 on the measure
  RuleSet rules;
  MomentPolynomial objective;
  Sense sense = Sense::Min;
  int order = 1;
  Cone cone = Cone::Qm;
  Mode mode = Mode::Membership;
  Perturbation perturbation = Perturbation::OnePsi;
  std::optional<Rational> big_m;
  Rational epsilon = 0;
};

// Throws SpecError when constraints have the wrong kind or the order is too small.
void validate(const ProblemSpec& spec);

std::string to_string(Sense s);
std::string to_string(Cone c);
std::string to_string(Mode m);
std::string to_string(Perturbation p);
Sense parse_sense(const std::string& s);
Cone parse_cone(const std::string& s);
Mode parse_mode(const std::string& s);
Perturbation parse_perturbation(const std::string& s);

}  // namespace mompoly
