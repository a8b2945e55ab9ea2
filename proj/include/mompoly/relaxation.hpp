#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mompoly/problem.hpp"
#include "mompoly/sdp.hpp"

namespace mompoly {

// One PSD block of a cone: the generator attached to the index pair (i, j).
struct GeneratorEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  MomentPolynomial value{1};
};

struct GeneratorBlock {
  std::string label;
  std::vector<std::string> index;  // printable basis elements
  std::vector<GeneratorEntry> entries;  // i <= j, reduced, zero entries dropped

  std::size_t dim() const { return index.size(); }
};

// qm: blocks m(v1 v2 s) for s in {1} u S1 and u1 u2 t for t in S2.
// QQM: blocks v1 v2 s for s in S1 u S2 and mixed blocks m(u1 u2 s) v1 v2 for s in {1} u S1.
// Classical: v1 v2 s over x-monomials for s in {1} u S1.
// Blocks are expanded on up to `jobs` threads and returned in a fixed order.
std::vector<GeneratorBlock> enumerate_generators(const ProblemSpec& spec, Cone cone, unsigned jobs = 1);

// Phi_r = sum_j sum_{k<=r} x_j^{2k}/k!,  Psi_r = sum_j sum_{k,l>=1, kl<=r} m(x_j^{2k})^l/((k!)^l l!)
std::pair<MomentPolynomial, MomentPolynomial> phi_psi(std::size_t n, int r);

// 10 (n e + n e^2)(1 + |f|_1) with e replaced by 68/25.
Rational default_big_m(const ProblemSpec& spec);

// sup alpha with f - alpha in cone_{2r} (min), or inf alpha with alpha - f in cone (max).
SdpProblem build_membership_sdp(const ProblemSpec& spec, Cone cone, unsigned jobs = 1);

// inf L(f) over L(1) = 1 with PSD localized Hankel blocks; unknowns are L(w), w != 1.
SdpProblem build_dual_sdp(const ProblemSpec& spec, unsigned jobs = 1);

// EpsMin: min eps with f + eps * perturbation in cone_{2r}.
// QrM:    sup z with f - z in cone_{2r} + R>=0 (M - Phi_r - Psi_r).
// FEps:   sup z with f - z + eps Phi_r in the classical cone_{2r}.
SdpProblem build_perturbed_sdp(const ProblemSpec& spec, int r, Mode mode, unsigned jobs = 1);

// Dispatches on spec.mode at spec.order.
SdpProblem build_sdp(const ProblemSpec& spec, unsigned jobs = 1);

// The perturbation polynomial used by EpsMin for this spec and order.
MomentPolynomial perturbation_polynomial(const ProblemSpec& spec, int r);

}  // namespace mompoly
