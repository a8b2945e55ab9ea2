#pragma once

#include <string>
#include <vector>

#include "mompoly/algebra.hpp"
#include "mompoly/rules.hpp"

namespace mompoly {

using RationalMatrix = std::vector<std::vector<Rational>>;

enum class PsdStatus { PositiveDefinite, PositiveSemidefinite, NotPsd };

struct PsdResult {
  PsdStatus status = PsdStatus::NotPsd;
  std::size_t rank = 0;
  std::vector<Rational> witness;  // w with w^T G w < 0 when NotPsd
  Rational witness_value;
};

// Rational LDL^T with symmetric pivoting.  Throws DimensionError if G is not
// square and Error if it is not symmetric.
PsdResult exact_psd_check(const RationalMatrix& G);

std::string to_string(PsdStatus s);

// square: v^T G v;  moment_square: m(s * v^T G v);  constraint: t * v^T G v
enum class BlockTag { Square, MomentSquare, Constraint };

std::string to_string(BlockTag t);
BlockTag parse_block_tag(const std::string& s);

struct GramBlock {
  BlockTag tag = BlockTag::MomentSquare;
  MomentPolynomial constraint;
  RationalMatrix G;
  std::vector<MomentPolynomial> v;
};

struct GramCertificate {
  explicit GramCertificate(std::size_t n) : n(n), target(n), rules(n) {}

  std::size_t n;
  std::string label;
  MomentPolynomial target;
  RuleSet rules;
  std::vector<GramBlock> blocks;
};

GramBlock weighted_square(BlockTag tag, const MomentPolynomial& constraint, const Rational& weight,
                          const MomentPolynomial& v);

MomentPolynomial block_expansion(const GramBlock& b);

enum class CertificateStatus { Valid, Invalid, NotPsd };

struct VerificationResult {
  CertificateStatus status = CertificateStatus::Invalid;
  MomentPolynomial residual{1};
  std::size_t failing_block = 0;
  PsdResult psd;
  std::vector<PsdStatus> block_status;

  bool valid() const { return status == CertificateStatus::Valid; }
};

// PSD checks run before any expansion; the residual is
// reduce(target - sum of block expansions, rules).
VerificationResult verify_gram_certificate(const GramCertificate& cert);

std::string to_string(CertificateStatus s);

// m_{2k} - m_1^{2k} as a sum of weighted moments of squares (one variable).
GramCertificate holder_certificate(int k);
// Image of holder_certificate(k) under x1 -> x^i, m_c -> m_{c i}.
GramCertificate holder_multivariate(int k, const Exponents& i);
// Target sum_j w_j m(x_j^{p_j}) - m_{2i}; empty for a single variable.
GramCertificate adhoc_core_certificate(const Exponents& i);
// Target sum_j w_j m(x_j^{p_j}) - m_i^2 (the core plus a Hoelder block).
GramCertificate adhoc_certificate(const Exponents& i);

}  // namespace mompoly
