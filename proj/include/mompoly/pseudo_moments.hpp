#pragma once

#include <map>
#include <optional>

#include "mompoly/certificates.hpp"
#include "mompoly/measures.hpp"

namespace mompoly {

// Linear functional on x-polynomials of degree <= degree, stored by monomial.
class TruncatedFunctional {
 public:
  TruncatedFunctional(std::size_t n, int degree);

  static TruncatedFunctional from_measure(const FiniteMeasure& mu, int degree);
  // moments of the uniform measure on [0,1]^n
  static TruncatedFunctional uniform_box(std::size_t n, int degree);

  std::size_t arity() const { return n_; }
  int degree() const { return degree_; }
  bool unital() const { return (*this)(Exponents(n_, 0)) == 1; }
  const std::map<Exponents, Rational>& values() const { return values_; }

  Rational operator()(const Exponents& e) const;
  void set(const Exponents& e, const Rational& v);

  // restriction to degree <= d
  TruncatedFunctional truncate(int d) const;

 private:
  std::size_t n_;
  int degree_;
  std::map<Exponents, Rational> values_;
};

// H_d over [x]_d in degree-lex order; entry (u, v) is m(uv).
std::vector<std::vector<MomentPolynomial>> symbolic_hankel(std::size_t n, int d);
RationalMatrix hankel_apply(const TruncatedFunctional& L, int d);

// phi o m on a pure polynomial: each symbol m_e becomes L(x^e).
Rational pseudo_value(const TruncatedFunctional& L, const MomentPolynomial& f);

// L has PD Hankel image of order d = degree / 2; returns an extension to degree + 2
// whose image of order d + 1 is PD.
struct Extension {
  TruncatedFunctional functional;
  Rational alpha;
};
Extension extend_functional(const TruncatedFunctional& L);

// (1 - delta) L + delta L0 with L0 the uniform box moments.
TruncatedFunctional perturb_functional(const TruncatedFunctional& L, const Rational& delta);

struct PerturbSearch {
  Rational delta;
  TruncatedFunctional functional;
  int halvings = 0;
};
// Halves delta from delta0 while the perturbed Hankel image stays PD and returns the
// smallest PD candidate.  Empty when delta0 itself does not give a PD image.
std::optional<PerturbSearch> perturb_search(const TruncatedFunctional& L, const Rational& delta0,
                                            int max_halvings = 30);

// Reads a functional off a Hankel matrix indexed by [x]_d; throws if entries
// that should agree do not.
TruncatedFunctional functional_from_hankel(std::size_t n, int d, const RationalMatrix& H);

struct H17Report {
  RationalMatrix hankel;
  PsdStatus status = PsdStatus::NotPsd;
  Rational pseudo_value;
  Rational dirac_value;
  std::size_t measures_checked = 0;
  bool measures_nonnegative = false;
  Rational min_measure_value;
};

RationalMatrix h17_hankel();
MomentPolynomial h17_polynomial();
H17Report h17_counterexample_report(std::size_t random_measures = 100, unsigned seed = 1);

}  // namespace mompoly
