#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace mompoly {

using Rational = mpq_class;
using Exponents = std::vector<int>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ZeroPolynomialError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Lower total degree first; within a degree the lexicographically larger
// vector comes first, so x1^2 < x1*x2 < x2^2 in this order.
std::strong_ordering compare_deglex(const Exponents& a, const Exponents& b);

int total_degree(const Exponents& e);
bool is_zero_exponent(const Exponents& e);

// All exponent vectors of the given total degree, in deglex order.
std::vector<Exponents> exponents_of_degree(std::size_t n, int degree);
// All exponent vectors of total degree <= bound, in deglex order.
std::vector<Exponents> exponents_up_to(std::size_t n, int bound);

class MomentSymbol {
 public:
  explicit MomentSymbol(Exponents e);

  const Exponents& exponents() const { return exps_; }
  std::size_t arity() const { return exps_.size(); }
  int degree() const { return degree_; }

  friend bool operator==(const MomentSymbol& a, const MomentSymbol& b) {
    return a.exps_ == b.exps_;
  }
  friend std::strong_ordering operator<=>(const MomentSymbol& a, const MomentSymbol& b) {
    return compare_deglex(a.exps_, b.exps_);
  }

 private:
  Exponents exps_;
  int degree_ = 0;
};

// x^e times a multiset of moment symbols.  Symbols are kept sorted.
class MomentMonomial {
 public:
  explicit MomentMonomial(std::size_t n);
  MomentMonomial(Exponents x, std::vector<MomentSymbol> symbols);

  static MomentMonomial variable(std::size_t n, std::size_t j, int power = 1);
  static MomentMonomial symbol(const MomentSymbol& s, int power = 1);

  std::size_t arity() const { return x_.size(); }
  const Exponents& x() const { return x_; }
  const std::vector<MomentSymbol>& symbols() const { return symbols_; }

  int x_degree() const { return x_degree_; }
  int degree() const { return degree_; }
  bool is_pure() const { return x_degree_ == 0; }
  bool is_x_only() const { return symbols_.empty(); }
  bool is_one() const { return degree_ == 0; }

  MomentMonomial pure_part() const;
  MomentMonomial x_part() const;

  friend bool operator==(const MomentMonomial& a, const MomentMonomial& b) {
    return a.x_ == b.x_ && a.symbols_ == b.symbols_;
  }
  friend std::strong_ordering operator<=>(const MomentMonomial& a, const MomentMonomial& b);

 private:
  void finish();

  Exponents x_;
  std::vector<MomentSymbol> symbols_;
  int x_degree_ = 0;
  int degree_ = 0;
};

MomentMonomial operator*(const MomentMonomial& a, const MomentMonomial& b);

class MomentPolynomial {
 public:
  using Terms = std::map<MomentMonomial, Rational>;

  explicit MomentPolynomial(std::size_t n);
  MomentPolynomial(std::size_t n, const Rational& c);
  MomentPolynomial(const MomentMonomial& m, const Rational& c = 1);

  static MomentPolynomial x(std::size_t n, std::size_t j, int power = 1);
  static MomentPolynomial moment(const Exponents& e);
  static MomentPolynomial constant(std::size_t n, const Rational& c) {
    return MomentPolynomial(n, c);
  }

  std::size_t arity() const { return n_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_pure() const;
  bool is_x_only() const;
  bool is_constant() const;
  Rational coefficient(const MomentMonomial& m) const;
  Rational constant_term() const;

  void add_term(const MomentMonomial& m, const Rational& c);

  // Throws ZeroPolynomialError on the zero polynomial.
  int degree() const;

  MomentPolynomial& operator+=(const MomentPolynomial& o);
  MomentPolynomial& operator-=(const MomentPolynomial& o);
  MomentPolynomial& operator*=(const Rational& c);
  MomentPolynomial pow(unsigned k) const;

  friend bool operator==(const MomentPolynomial& a, const MomentPolynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void check_arity(const MomentPolynomial& o) const;

  std::size_t n_;
  Terms terms_;
};

MomentPolynomial operator+(MomentPolynomial a, const MomentPolynomial& b);
MomentPolynomial operator-(MomentPolynomial a, const MomentPolynomial& b);
MomentPolynomial operator-(MomentPolynomial a);
MomentPolynomial operator*(const MomentPolynomial& a, const MomentPolynomial& b);
MomentPolynomial operator*(MomentPolynomial a, const Rational& c);
MomentPolynomial operator*(const Rational& c, MomentPolynomial a);

MomentMonomial mono_mul(const MomentMonomial& a, const MomentMonomial& b);
MomentPolynomial poly_mul(const MomentPolynomial& a, const MomentPolynomial& b);

// The R[M]-linear formal moment: x^e * P  ->  m_e * P, with m_0 = 1.
MomentPolynomial formal_moment(const MomentPolynomial& f);
MomentPolynomial formal_moment(const MomentMonomial& m);

// Ring homomorphism fixing rationals: x_j -> x_images[j], m_e -> symbol_image(m_e).
MomentPolynomial substitute(const MomentPolynomial& f, std::size_t target_n,
                            const std::vector<MomentPolynomial>& x_images,
                            const std::function<MomentPolynomial(const MomentSymbol&)>& symbol_image);

std::string to_string(const MomentSymbol& s);
std::string to_string(const MomentMonomial& m);
std::string to_string(const MomentPolynomial& f);
std::string to_string(const Rational& q);
std::ostream& operator<<(std::ostream& os, const MomentPolynomial& f);

// Accepts "p/q", integers and finite decimals such as "0.25" or "-1e-3".
Rational parse_rational(std::string_view text);

// Grammar: sums and products of rationals, x<j>, m[e1,...,en], m(<expr>),
// parentheses and ^<integer>.  The canonical printer emits a subset of this.
MomentPolynomial parse_polynomial(std::size_t n, std::string_view text);

}  // namespace mompoly
