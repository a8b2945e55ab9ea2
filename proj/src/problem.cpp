#include "mompoly/problem.hpp"

namespace mompoly {

void validate(const ProblemSpec& spec) {
  if (spec.n == 0) throw SpecError("n must be at least 1");
  auto same_arity = [&](const MomentPolynomial& p, const char* what) {
    if (p.arity() != spec.n) throw SpecError(std::string(what) + " has the wrong number of variables");
  };
  same_arity(spec.objective, "objective");
  if (spec.rules.arity() != spec.n) throw SpecError("rules have the wrong number of variables");
  for (const auto& s : spec.S1) {
    same_arity(s, "S1 entry");
    if (!s.is_x_only()) throw SpecError("S1 entries must be polynomials in x only: " + to_string(s));
  }
  for (const auto& t : spec.S2) {
    same_arity(t, "S2 entry");
    if (!t.is_pure()) throw SpecError("S2 entries must be pure moment polynomials: " + to_string(t));
  }
  if (spec.order < 0) throw SpecError("relaxation order must be nonnegative");
  int two_r = 2 * spec.order;
  if (!spec.objective.is_zero() && spec.objective.degree() > two_r)
    throw SpecError("objective degree " + std::to_string(spec.objective.degree()) +
                    " exceeds twice the relaxation order");
  for (const auto& t : spec.S2)
    if (!t.is_zero() && t.degree() > two_r)
      throw SpecError("S2 entry degree exceeds twice the relaxation order: " + to_string(t));
  if ((spec.cone == Cone::Classical || spec.mode == Mode::FEps) && !spec.objective.is_x_only())
    throw SpecError("the classical cone needs an objective in x only");
  if (spec.cone == Cone::Qm && spec.mode != Mode::FEps && !spec.objective.is_pure())
    throw SpecError("the qm cone certifies pure objectives only");
  if (spec.big_m && *spec.big_m <= 0) throw SpecError("M must be positive");
  if (spec.epsilon < 0) throw SpecError("epsilon must be nonnegative");
}

std::string to_string(Sense s) { return s == Sense::Min ? "min" : "max"; }

std::string to_string(Cone c) {
  switch (c) {
    case Cone::Qm: return "qm";
    case Cone::Qqm: return "QQM";
    default: return "classical";
  }
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Membership: return "membership";
    case Mode::Dual: return "dual";
    case Mode::EpsMin: return "eps_min";
    case Mode::QrM: return "QrM";
    default: return "f_eps";
  }
}

std::string to_string(Perturbation p) {
  switch (p) {
    case Perturbation::PhiPsi: return "phi_psi";
    case Perturbation::OnePsi: return "one_psi";
    default: return "m_phi";
  }
}

Sense parse_sense(const std::string& s) {
  if (s == "min") return Sense::Min;
  if (s == "max") return Sense::Max;
  throw SpecError("sense must be min or max, got '" + s + "'");
}

Cone parse_cone(const std::string& s) {
  if (s == "qm") return Cone::Qm;
  if (s == "QQM" || s == "qqm") return Cone::Qqm;
  if (s == "classical") return Cone::Classical;
  throw SpecError("cone must be qm, QQM or classical, got '" + s + "'");
}

Mode parse_mode(const std::string& s) {
  if (s == "membership") return Mode::Membership;
  if (s == "dual") return Mode::Dual;
  if (s == "eps_min") return Mode::EpsMin;
  if (s == "QrM" || s == "qrm") return Mode::QrM;
  if (s == "f_eps") return Mode::FEps;
  throw SpecError("unknown mode '" + s + "'");
}

Perturbation parse_perturbation(const std::string& s) {
  if (s == "phi_psi") return Perturbation::PhiPsi;
  if (s == "one_psi") return Perturbation::OnePsi;
  if (s == "m_phi") return Perturbation::MomentPhi;
  throw SpecError("unknown perturbation '" + s + "'");
}

}  // namespace mompoly
