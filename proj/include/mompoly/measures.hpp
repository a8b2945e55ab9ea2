#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mompoly/algebra.hpp"
#include "mompoly/problem.hpp"

namespace mompoly {

using Point = std::vector<Rational>;

// Probability measure with finitely many distinct atoms and positive weights.
class FiniteMeasure {
 public:
  FiniteMeasure(std::vector<Point> atoms, std::vector<Rational> weights);

  static FiniteMeasure dirac(Point p);

  std::size_t arity() const { return n_; }
  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<Rational>& weights() const { return weights_; }

  Rational moment(const Exponents& e) const;

 private:
  std::size_t n_;
  std::vector<Point> atoms_;
  std::vector<Rational> weights_;
};

// Finite probability space with named real random variables.
class FiniteProbabilitySpace {
 public:
  explicit FiniteProbabilitySpace(std::vector<Rational> weights);

  void add_variable(const std::string& name, std::vector<Rational> values);

  std::size_t size() const { return weights_.size(); }
  const std::vector<Rational>& weights() const { return weights_; }
  const std::vector<Rational>& variable(const std::string& name) const;
  std::vector<std::string> names() const { return order_; }

 private:
  std::vector<Rational> weights_;
  std::vector<std::string> order_;
  std::vector<std::vector<Rational>> values_;
};

Rational monomial_value(const Exponents& e, const Point& x);

// f(mu, X); the point may be omitted when f is pure.
Rational eval_poly(const MomentPolynomial& f, const FiniteMeasure& mu, const Point& x);
Rational eval_poly(const MomentPolynomial& f, const FiniteMeasure& mu);

// The random variable f(P_F, F) on the space, one value per sample point.
std::vector<Rational> eval_random_vars(const MomentPolynomial& f, const FiniteProbabilitySpace& space,
                                       const std::vector<std::string>& names);

// Law of (F_1, ..., F_n), with coinciding outcomes merged.
FiniteMeasure pushforward(const FiniteProbabilitySpace& space, const std::vector<std::string>& names);

struct ClassicalProgram {
  std::size_t num_vars = 0;
  std::size_t atoms = 0;  // D
  int degree = 0;         // d
  std::vector<std::string> var_names;
  Sense sense = Sense::Min;
  MomentPolynomial objective{1};
  std::vector<MomentPolynomial> inequalities;  // g >= 0
  std::vector<MomentPolynomial> equalities;    // h == 0
};

// Reformulation over D = C(n+d, d) atoms: variables X, Y_1..Y_D, alpha_1..alpha_D.
ClassicalProgram tchakaloff_reformulate(const ProblemSpec& spec);

struct BruteForceOptions {
  std::vector<Point> candidates;  // empty means {-1,0,1}^n
  std::size_t support = 2;        // number of atoms per measure
  int grid = 12;                  // weight denominator for the simplex grid
  unsigned jobs = 1;
};

struct BruteForceResult {
  bool feasible = false;
  Rational value;
  std::optional<FiniteMeasure> measure;
  Point x;
  std::size_t evaluated = 0;
};

// Exhaustive optimisation of the spec over finitely supported measures on the grid.
BruteForceResult brute_force_opt(const ProblemSpec& spec, const BruteForceOptions& options = {});

bool rules_hold(const RuleSet& rules, const FiniteMeasure& mu);

}  // namespace mompoly
