#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mompoly/algebra.hpp"

namespace mompoly {

class NonTerminatingRules : public Error {
 public:
  using Error::Error;
};

// x_var^power -> replacement (an x-only polynomial)
struct PowerRule {
  std::size_t var;
  int power;
  MomentPolynomial replacement;
};

// m_pattern -> replacement (a pure polynomial)
struct SymbolRule {
  MomentSymbol pattern;
  MomentPolynomial replacement;
};

// a pure monomial dividing the symbol multiset -> replacement
struct ProductRule {
  MomentMonomial pattern;
  MomentPolynomial replacement;
};

class RuleSet {
 public:
  static constexpr int kPassCap = 10000;

  explicit RuleSet(std::size_t n);

  std::size_t arity() const { return n_; }
  bool empty() const {
    return power_rules_.empty() && symbol_rules_.empty() && product_rules_.empty();
  }

  // With check set, every replacement term must be strictly below the
  // pattern in the monomial order.
  void add_power_rule(std::size_t var, int power, const MomentPolynomial& replacement,
                      bool check = true);
  void add_symbol_rule(const MomentSymbol& pattern, const MomentPolynomial& replacement,
                       bool check = true);
  void add_product_rule(const MomentMonomial& pattern, const MomentPolynomial& replacement,
                        bool check = true);
  // Classifies lhs (a monomial with coefficient one) into one of the kinds above.
  void add_rule(const MomentPolynomial& lhs, const MomentPolynomial& rhs, bool check = true);
  void add_rule(std::string_view text, bool check = true);

  // x_j^2 = 1 for each listed variable (0-based).
  void add_binary(const std::vector<std::size_t>& vars);
  void add_binary_all();
  // m(x^S x^T) = m(x^S) m(x^T) for nonempty S in left, T in right, 0/1 exponents.
  void add_independence(const std::vector<std::size_t>& left,
                        const std::vector<std::size_t>& right);

  const std::vector<PowerRule>& power_rules() const { return power_rules_; }
  const std::map<MomentSymbol, MomentPolynomial>& symbol_rules() const { return symbol_rules_; }
  const std::vector<ProductRule>& product_rules() const { return product_rules_; }

  // One rewriting step, innermost first.  nullopt when m is in normal form.
  std::optional<MomentPolynomial> rewrite_once(const MomentMonomial& m) const;

  MomentPolynomial reduce(const MomentPolynomial& f) const;

  std::vector<std::string> describe() const;

 private:
  const PowerRule* power_rule_for(const Exponents& e) const;
  void check_order(const MomentMonomial& pattern, const MomentPolynomial& replacement) const;

  std::size_t n_;
  std::vector<PowerRule> power_rules_;
  std::map<MomentSymbol, MomentPolynomial> symbol_rules_;
  std::vector<ProductRule> product_rules_;
};

// Memoizing normal-form computation for repeated reductions under one rule set.
class Reducer {
 public:
  explicit Reducer(const RuleSet& rules) : rules_(rules) {}

  const MomentPolynomial& reduce(const MomentMonomial& m);
  MomentPolynomial reduce(const MomentPolynomial& f);

 private:
  const RuleSet& rules_;
  std::map<MomentMonomial, MomentPolynomial> memo_;
};

MomentPolynomial reduce(const MomentPolynomial& f, const RuleSet& rules);

enum class BasisKind { Full, Pure, XOnly };

// Distinct reduced monomials of degree <= r, in the canonical order.
std::vector<MomentMonomial> monomial_basis(std::size_t n, int r, const RuleSet& rules,
                                           BasisKind kind = BasisKind::Full);
std::vector<MomentMonomial> monomial_basis(std::size_t n, int r, BasisKind kind = BasisKind::Full);

}  // namespace mompoly
