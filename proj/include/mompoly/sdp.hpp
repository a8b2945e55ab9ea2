#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "mompoly/algebra.hpp"

namespace mompoly {

// Entry (i, j), i <= j, of a symmetric coefficient matrix; stands for both
// (i, j) and (j, i).
struct SdpEntry {
  std::size_t block = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  Rational value;
};

struct SdpBlock {
  std::string label;
  std::size_t dim = 0;
};

struct SdpScalar {
  std::string name;
  bool nonneg = false;
};

struct SdpRow {
  std::string label;
  std::vector<SdpEntry> entries;
  std::vector<std::pair<std::size_t, Rational>> scalars;
  Rational rhs;
};

// Gram: the unknowns are the Gram matrices and scalars.
// Moment: the unknowns are the row multipliers y (pseudo-moments).
enum class SdpForm { Gram, Moment };

// Canonical pair
//   (P) min C.X + c^T s + constant  s.t. A_i.X + a_i^T s = b_i, X psd, s_k >= 0 if nonneg
//   (D) max b^T y + constant        s.t. C - sum y_i A_i psd, c - sum y_i a_i (= 0 | >= 0)
// The reported bound is bound_scale * optimal value.
struct SdpProblem {
  std::string label;
  SdpForm form = SdpForm::Gram;
  std::vector<SdpBlock> blocks;
  std::vector<SdpScalar> scalars;
  std::vector<SdpRow> rows;
  std::vector<SdpEntry> cost;
  std::vector<Rational> scalar_cost;
  Rational constant = 0;
  Rational bound_scale = 1;

  std::size_t unknowns() const;
  std::size_t max_block() const;
  std::size_t total_block_dim() const;
  // throws Error on out-of-range indices or i > j
  void check() const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalFailure };
std::string to_string(SdpStatus s);
std::string to_string(SdpForm f);

struct SdpResiduals {
  double primal = 0;  // relative equality violation and negative parts of X, s
  double dual = 0;    // negative part of C - A^T y, scalar dual violation
  double gap = 0;
  double min_eig_x = 0;
  double min_eig_z = 0;
  double primal_objective = 0;  // without the constant
  double dual_objective = 0;
  double max() const;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  double objective = 0;  // bound_scale * (value + constant)
  std::vector<Eigen::MatrixXd> X;
  std::vector<double> s;
  std::vector<double> y;
  SdpResiduals residuals;
  int iterations = 0;
  std::string message;
};

struct IpmOptions {
  double tol = 1e-8;
  int max_iter = 100;
  std::size_t block_cap = 500;
  bool verbose = false;
};

class SdpTooLarge : public Error {
 public:
  using Error::Error;
};

SdpSolution solve_ipm(const SdpProblem& p, const IpmOptions& options = {});

// Residuals of (X, s, y) against the exact problem data, independent of the solver.
SdpResiduals recompute_residuals(const SdpProblem& p, const SdpSolution& sol);

// Sparse SDPA (.dat-s).  Our (P) is written as the SDPA dual with F0 = -C, F_i = A_i,
// c_i = b_i; scalars go into one trailing diagonal block, free scalars as +/- pairs.
void write_sdpa(const SdpProblem& p, std::ostream& out);
void write_sdpa(const SdpProblem& p, const std::string& path);
SdpProblem read_sdpa(std::istream& in);
SdpProblem read_sdpa(const std::string& path);

// SDPA output (xVec/xMat/yMat) or CSDP solution files.
SdpSolution read_sdpa_solution(const SdpProblem& p, std::istream& in, double tol = 1e-6);
SdpSolution read_sdpa_solution(const SdpProblem& p, const std::string& path, double tol = 1e-6);

std::string render_decimal(const Rational& q);

}  // namespace mompoly
