#include "mompoly/rules.hpp"

#include <algorithm>

namespace mompoly {

RuleSet::RuleSet(std::size_t n) : n_(n) {
  if (n == 0) throw DimensionError("number of variables must be at least 1");
}

void RuleSet::check_order(const MomentMonomial& pattern, const MomentPolynomial& replacement) const {
  for (const auto& [m, c] : replacement.terms())
    if (!(m < pattern))
      throw Error("rule " + to_string(pattern) + " = " + to_string(replacement) +
                  " does not decrease in the monomial order");
}

void RuleSet::add_power_rule(std::size_t var, int power, const MomentPolynomial& replacement,
                             bool check) {
  if (var >= n_ || replacement.arity() != n_) throw DimensionError("power rule arity mismatch");
  if (power < 1) throw Error("power rule needs a positive power");
  if (!replacement.is_x_only()) throw Error("power rule replacement must be x-only");
  for (const auto& r : power_rules_)
    if (r.var == var) throw Error("duplicate power rule for x" + std::to_string(var + 1));
  if (check) check_order(MomentMonomial::variable(n_, var, power), replacement);
  power_rules_.push_back({var, power, replacement});
}

void RuleSet::add_symbol_rule(const MomentSymbol& pattern, const MomentPolynomial& replacement,
                              bool check) {
  if (pattern.arity() != n_ || replacement.arity() != n_)
    throw DimensionError("symbol rule arity mismatch");
  if (!replacement.is_pure()) throw Error("symbol rule replacement must be pure");
  if (check) check_order(MomentMonomial::symbol(pattern), replacement);
  symbol_rules_.insert_or_assign(pattern, replacement);
}

void RuleSet::add_product_rule(const MomentMonomial& pattern, const MomentPolynomial& replacement,
                               bool check) {
  if (pattern.arity() != n_ || replacement.arity() != n_)
    throw DimensionError("product rule arity mismatch");
  if (!pattern.is_pure() || pattern.symbols().empty())
    throw Error("product rule pattern must be a pure monomial");
  if (!replacement.is_pure()) throw Error("product rule replacement must be pure");
  if (check) check_order(pattern, replacement);
  product_rules_.push_back({pattern, replacement});
}

void RuleSet::add_rule(const MomentPolynomial& lhs, const MomentPolynomial& rhs, bool check) {
  if (lhs.size() != 1 || lhs.terms().begin()->second != 1)
    throw ParseError("rule left side must be a single monomial: " + to_string(lhs));
  const MomentMonomial& m = lhs.terms().begin()->first;
  if (m.is_x_only()) {
    std::size_t var = n_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (m.x()[j] == 0) continue;
      if (var != n_) throw ParseError("power rule must involve one variable: " + to_string(lhs));
      var = j;
    }
    if (var == n_) throw ParseError("rule left side is constant");
    add_power_rule(var, m.x()[var], rhs, check);
  } else if (m.is_pure() && m.symbols().size() == 1) {
    add_symbol_rule(m.symbols()[0], rhs, check);
  } else if (m.is_pure()) {
    add_product_rule(m, rhs, check);
  } else {
    throw ParseError("rule left side mixes x and moment factors: " + to_string(lhs));
  }
}

void RuleSet::add_rule(std::string_view text, bool check) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ParseError("rule needs '=': " + std::string(text));
  add_rule(parse_polynomial(n_, text.substr(0, eq)), parse_polynomial(n_, text.substr(eq + 1)),
           check);
}

void RuleSet::add_binary(const std::vector<std::size_t>& vars) {
  for (auto j : vars) add_power_rule(j, 2, MomentPolynomial(n_, 1));
}

void RuleSet::add_binary_all() {
  for (std::size_t j = 0; j < n_; ++j) add_power_rule(j, 2, MomentPolynomial(n_, 1));
}

void RuleSet::add_independence(const std::vector<std::size_t>& left,
                               const std::vector<std::size_t>& right) {
  for (auto j : left)
    if (j >= n_) throw DimensionError("independence variable out of range");
  for (auto j : right)
    if (j >= n_) throw DimensionError("independence variable out of range");
  for (unsigned long sl = 1; sl < (1ul << left.size()); ++sl) {
    Exponents a(n_, 0);
    for (std::size_t i = 0; i < left.size(); ++i)
      if (sl >> i & 1ul) a[left[i]] = 1;
    for (unsigned long sr = 1; sr < (1ul << right.size()); ++sr) {
      Exponents b(n_, 0);
      for (std::size_t i = 0; i < right.size(); ++i)
        if (sr >> i & 1ul) b[right[i]] = 1;
      Exponents ab(n_, 0);
      for (std::size_t j = 0; j < n_; ++j) ab[j] = a[j] + b[j];
      add_symbol_rule(MomentSymbol(ab),
                      MomentPolynomial::moment(a) * MomentPolynomial::moment(b));
    }
  }
}

const PowerRule* RuleSet::power_rule_for(const Exponents& e) const {
  for (const auto& r : power_rules_)
    if (e[r.var] >= r.power) return &r;
  return nullptr;
}

std::optional<MomentPolynomial> RuleSet::rewrite_once(const MomentMonomial& m) const {
  if (m.arity() != n_) throw DimensionError("monomial arity does not match rule set");
  const auto& syms = m.symbols();
  auto without = [&](std::size_t i) {
    std::vector<MomentSymbol> rest;
    rest.reserve(syms.size() - 1);
    for (std::size_t k = 0; k < syms.size(); ++k)
      if (k != i) rest.push_back(syms[k]);
    return MomentPolynomial(MomentMonomial(m.x(), std::move(rest)));
  };
  for (std::size_t i = 0; i < syms.size(); ++i) {
    if (const PowerRule* r = power_rule_for(syms[i].exponents())) {
      Exponents e = syms[i].exponents();
      e[r->var] -= r->power;
      MomentPolynomial inner = MomentPolynomial(MomentMonomial(e, {})) * r->replacement;
      return without(i) * formal_moment(inner);
    }
  }
  if (!symbol_rules_.empty()) {
    for (std::size_t i = 0; i < syms.size(); ++i) {
      auto it = symbol_rules_.find(syms[i]);
      if (it != symbol_rules_.end()) return without(i) * it->second;
    }
  }
  if (const PowerRule* r = power_rule_for(m.x())) {
    Exponents e = m.x();
    e[r->var] -= r->power;
    return MomentPolynomial(MomentMonomial(std::move(e), syms)) * r->replacement;
  }
  for (const auto& r : product_rules_) {
    const auto& pat = r.pattern.symbols();
    if (!std::includes(syms.begin(), syms.end(), pat.begin(), pat.end())) continue;
    std::vector<MomentSymbol> rest;
    std::set_difference(syms.begin(), syms.end(), pat.begin(), pat.end(),
                        std::back_inserter(rest));
    return MomentPolynomial(MomentMonomial(m.x(), std::move(rest))) * r.replacement;
  }
  return std::nullopt;
}

const MomentPolynomial& Reducer::reduce(const MomentMonomial& m) {
  if (auto it = memo_.find(m); it != memo_.end()) return it->second;
  auto step = rules_.rewrite_once(m);
  if (!step) return memo_.emplace(m, MomentPolynomial(m)).first->second;
  MomentPolynomial cur = std::move(*step);
  for (int pass = 0;; ++pass) {
    if (pass >= RuleSet::kPassCap)
      throw NonTerminatingRules("reduction did not reach a fixpoint within the pass cap");
    MomentPolynomial next(cur.arity());
    bool changed = false;
    for (const auto& [t, c] : cur.terms()) {
      if (auto it = memo_.find(t); it != memo_.end()) {
        next += it->second * c;
        continue;
      }
      auto s = rules_.rewrite_once(t);
      if (s) {
        next += *s * c;
        changed = true;
      } else {
        memo_.emplace(t, MomentPolynomial(t));
        next.add_term(t, c);
      }
    }
    cur = std::move(next);
    if (!changed) break;
  }
  return memo_.emplace(m, std::move(cur)).first->second;
}

MomentPolynomial Reducer::reduce(const MomentPolynomial& f) {
  if (f.arity() != rules_.arity()) throw DimensionError("polynomial arity does not match rule set");
  if (rules_.empty()) return f;
  MomentPolynomial out(f.arity());
  for (const auto& [m, c] : f.terms()) out += reduce(m) * c;
  return out;
}

MomentPolynomial RuleSet::reduce(const MomentPolynomial& f) const {
  Reducer r(*this);
  return r.reduce(f);
}

MomentPolynomial reduce(const MomentPolynomial& f, const RuleSet& rules) { return rules.reduce(f); }

std::vector<std::string> RuleSet::describe() const {
  std::vector<std::string> out;
  for (const auto& r : power_rules_)
    out.push_back(to_string(MomentMonomial::variable(n_, r.var, r.power)) + " = " +
                  to_string(r.replacement));
  for (const auto& [s, rep] : symbol_rules_) out.push_back(to_string(s) + " = " + to_string(rep));
  for (const auto& r : product_rules_)
    out.push_back(to_string(r.pattern) + " = " + to_string(r.replacement));
  return out;
}

}  // namespace mompoly

namespace mompoly {

namespace {

void symbol_multisets(const std::vector<MomentSymbol>& cands, std::size_t from, int budget,
                      std::vector<MomentSymbol>& cur,
                      std::vector<std::vector<MomentSymbol>>& out) {
  out.push_back(cur);
  for (std::size_t i = from; i < cands.size(); ++i) {
    if (cands[i].degree() > budget) continue;
    cur.push_back(cands[i]);
    symbol_multisets(cands, i, budget - cands[i].degree(), cur, out);
    cur.pop_back();
  }
}

bool kind_matches(const MomentMonomial& m, BasisKind kind) {
  switch (kind) {
    case BasisKind::Pure: return m.is_pure();
    case BasisKind::XOnly: return m.is_x_only();
    default: return true;
  }
}

}  // namespace

std::vector<MomentMonomial> monomial_basis(std::size_t n, int r, const RuleSet& rules,
                                           BasisKind kind) {
  if (n == 0) throw DimensionError("number of variables must be at least 1");
  if (rules.arity() != n) throw DimensionError("rule set arity mismatch");
  std::vector<MomentMonomial> out;
  if (r < 0) return out;
  std::vector<MomentSymbol> cands;
  if (kind != BasisKind::XOnly)
    for (const auto& e : exponents_up_to(n, r))
      if (!is_zero_exponent(e)) cands.emplace_back(e);
  std::vector<std::vector<MomentSymbol>> multisets;
  std::vector<MomentSymbol> cur;
  symbol_multisets(cands, 0, r, cur, multisets);
  Reducer red(rules);
  std::vector<MomentMonomial> raw;
  for (const auto& sym : multisets) {
    int sdeg = 0;
    for (const auto& s : sym) sdeg += s.degree();
    int xmax = kind == BasisKind::Pure ? 0 : r - sdeg;
    for (const auto& x : exponents_up_to(n, xmax)) raw.emplace_back(x, sym);
  }
  for (const auto& m : raw)
    for (const auto& [t, c] : red.reduce(m).terms())
      if (t.degree() <= r && kind_matches(t, kind)) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<MomentMonomial> monomial_basis(std::size_t n, int r, BasisKind kind) {
  return monomial_basis(n, r, RuleSet(n), kind);
}

}  // namespace mompoly
