#include "mompoly/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mompoly {

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool is_zero_exponent(const Exponents& e) {
  return std::all_of(e.begin(), e.end(), [](int v) { return v == 0; });
}

std::strong_ordering compare_deglex(const Exponents& a, const Exponents& b) {
  if (auto c = total_degree(a) <=> total_degree(b); c != 0) return c;
  return std::lexicographical_compare_three_way(b.begin(), b.end(), a.begin(), a.end());
}

namespace {

void fill_degree(std::size_t n, std::size_t pos, int left, Exponents& cur,
                 std::vector<Exponents>& out) {
  if (pos + 1 == n) {
    cur[pos] = left;
    out.push_back(cur);
    return;
  }
  for (int v = left; v >= 0; --v) {
    cur[pos] = v;
    fill_degree(n, pos + 1, left - v, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<Exponents> exponents_of_degree(std::size_t n, int degree) {
  std::vector<Exponents> out;
  if (n == 0 || degree < 0) return out;
  Exponents cur(n, 0);
  fill_degree(n, 0, degree, cur, out);
  return out;
}

std::vector<Exponents> exponents_up_to(std::size_t n, int bound) {
  std::vector<Exponents> out;
  for (int d = 0; d <= bound; ++d) {
    auto part = exponents_of_degree(n, d);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

MomentSymbol::MomentSymbol(Exponents e) : exps_(std::move(e)) {
  if (exps_.empty()) throw DimensionError("moment symbol needs at least one variable");
  for (int v : exps_)
    if (v < 0) throw Error("negative exponent in moment symbol");
  degree_ = total_degree(exps_);
  if (degree_ == 0) throw Error("moment symbol with zero exponent vector");
}

MomentMonomial::MomentMonomial(std::size_t n) : x_(n, 0) {
  if (n == 0) throw DimensionError("number of variables must be at least 1");
}

MomentMonomial::MomentMonomial(Exponents x, std::vector<MomentSymbol> symbols)
    : x_(std::move(x)), symbols_(std::move(symbols)) {
  if (x_.empty()) throw DimensionError("number of variables must be at least 1");
  for (int v : x_)
    if (v < 0) throw Error("negative exponent");
  for (const auto& s : symbols_)
    if (s.arity() != x_.size()) throw DimensionError("moment symbol arity mismatch");
  std::sort(symbols_.begin(), symbols_.end());
  finish();
}

void MomentMonomial::finish() {
  x_degree_ = total_degree(x_);
  degree_ = x_degree_;
  for (const auto& s : symbols_) degree_ += s.degree();
}

MomentMonomial MomentMonomial::variable(std::size_t n, std::size_t j, int power) {
  if (j >= n) throw DimensionError("variable index out of range");
  Exponents x(n, 0);
  x[j] = power;
  return MomentMonomial(std::move(x), {});
}

MomentMonomial MomentMonomial::symbol(const MomentSymbol& s, int power) {
  return MomentMonomial(Exponents(s.arity(), 0), std::vector<MomentSymbol>(power, s));
}

MomentMonomial MomentMonomial::pure_part() const {
  return MomentMonomial(Exponents(arity(), 0), symbols_);
}

MomentMonomial MomentMonomial::x_part() const { return MomentMonomial(x_, {}); }

std::strong_ordering operator<=>(const MomentMonomial& a, const MomentMonomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  if (auto c = b.x_degree_ <=> a.x_degree_; c != 0) return c;
  if (auto c = std::lexicographical_compare_three_way(b.x_.begin(), b.x_.end(), a.x_.begin(),
                                                      a.x_.end());
      c != 0)
    return c;
  return std::lexicographical_compare_three_way(a.symbols_.begin(), a.symbols_.end(),
                                                b.symbols_.begin(), b.symbols_.end());
}

MomentMonomial operator*(const MomentMonomial& a, const MomentMonomial& b) {
  if (a.arity() != b.arity()) throw DimensionError("monomial arity mismatch");
  Exponents x = a.x();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += b.x()[i];
  std::vector<MomentSymbol> s;
  s.reserve(a.symbols().size() + b.symbols().size());
  std::merge(a.symbols().begin(), a.symbols().end(), b.symbols().begin(), b.symbols().end(),
             std::back_inserter(s));
  return MomentMonomial(std::move(x), std::move(s));
}

MomentMonomial mono_mul(const MomentMonomial& a, const MomentMonomial& b) { return a * b; }

MomentPolynomial::MomentPolynomial(std::size_t n) : n_(n) {
  if (n == 0) throw DimensionError("number of variables must be at least 1");
}

MomentPolynomial::MomentPolynomial(std::size_t n, const Rational& c) : MomentPolynomial(n) {
  add_term(MomentMonomial(n), c);
}

MomentPolynomial::MomentPolynomial(const MomentMonomial& m, const Rational& c)
    : n_(m.arity()) {
  add_term(m, c);
}

MomentPolynomial MomentPolynomial::x(std::size_t n, std::size_t j, int power) {
  return MomentPolynomial(MomentMonomial::variable(n, j, power));
}

MomentPolynomial MomentPolynomial::moment(const Exponents& e) {
  if (is_zero_exponent(e)) return MomentPolynomial(e.size(), 1);
  return MomentPolynomial(MomentMonomial::symbol(MomentSymbol(e)));
}

bool MomentPolynomial::is_pure() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.is_pure(); });
}

bool MomentPolynomial::is_x_only() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first.is_x_only(); });
}

bool MomentPolynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational MomentPolynomial::coefficient(const MomentMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational MomentPolynomial::constant_term() const { return coefficient(MomentMonomial(n_)); }

void MomentPolynomial::add_term(const MomentMonomial& m, const Rational& c) {
  if (m.arity() != n_) throw DimensionError("term arity mismatch");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int MomentPolynomial::degree() const {
  if (terms_.empty()) throw ZeroPolynomialError("degree of the zero polynomial");
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

void MomentPolynomial::check_arity(const MomentPolynomial& o) const {
  if (o.n_ != n_) throw DimensionError("polynomial arity mismatch");
}

MomentPolynomial& MomentPolynomial::operator+=(const MomentPolynomial& o) {
  check_arity(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MomentPolynomial& MomentPolynomial::operator-=(const MomentPolynomial& o) {
  check_arity(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

MomentPolynomial& MomentPolynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

MomentPolynomial MomentPolynomial::pow(unsigned k) const {
  MomentPolynomial out(n_, 1);
  MomentPolynomial base = *this;
  while (k) {
    if (k & 1u) out = out * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return out;
}

MomentPolynomial operator+(MomentPolynomial a, const MomentPolynomial& b) { return a += b; }
MomentPolynomial operator-(MomentPolynomial a, const MomentPolynomial& b) { return a -= b; }
MomentPolynomial operator-(MomentPolynomial a) { return a *= Rational(-1); }
MomentPolynomial operator*(MomentPolynomial a, const Rational& c) { return a *= c; }
MomentPolynomial operator*(const Rational& c, MomentPolynomial a) { return a *= c; }

MomentPolynomial operator*(const MomentPolynomial& a, const MomentPolynomial& b) {
  if (a.arity() != b.arity()) throw DimensionError("polynomial arity mismatch");
  MomentPolynomial out(a.arity());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, ca * cb);
  return out;
}

MomentPolynomial poly_mul(const MomentPolynomial& a, const MomentPolynomial& b) { return a * b; }

MomentPolynomial formal_moment(const MomentMonomial& m) {
  if (m.is_pure()) return MomentPolynomial(m);
  std::vector<MomentSymbol> s = m.symbols();
  s.emplace_back(m.x());
  return MomentPolynomial(MomentMonomial(Exponents(m.arity(), 0), std::move(s)));
}

MomentPolynomial formal_moment(const MomentPolynomial& f) {
  MomentPolynomial out(f.arity());
  for (const auto& [m, c] : f.terms()) {
    if (m.is_pure()) {
      out.add_term(m, c);
    } else {
      std::vector<MomentSymbol> s = m.symbols();
      s.emplace_back(m.x());
      out.add_term(MomentMonomial(Exponents(m.arity(), 0), std::move(s)), c);
    }
  }
  return out;
}

MomentPolynomial substitute(const MomentPolynomial& f, std::size_t target_n,
                            const std::vector<MomentPolynomial>& x_images,
                            const std::function<MomentPolynomial(const MomentSymbol&)>& symbol_image) {
  if (x_images.size() != f.arity()) throw DimensionError("substitution needs one image per variable");
  MomentPolynomial out(target_n);
  std::map<MomentSymbol, MomentPolynomial> cache;
  for (const auto& [m, c] : f.terms()) {
    MomentPolynomial term(target_n, c);
    for (std::size_t j = 0; j < m.arity(); ++j)
      if (m.x()[j] > 0) term = term * x_images[j].pow(static_cast<unsigned>(m.x()[j]));
    for (const auto& s : m.symbols()) {
      auto it = cache.find(s);
      if (it == cache.end()) it = cache.emplace(s, symbol_image(s)).first;
      term = term * it->second;
    }
    out += term;
  }
  return out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const MomentSymbol& s) {
  std::string out = "m[";
  for (std::size_t i = 0; i < s.arity(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.exponents()[i]);
  }
  return out + "]";
}

std::string to_string(const MomentMonomial& m) {
  std::vector<std::string> parts;
  std::string xs;
  for (std::size_t j = 0; j < m.arity(); ++j) {
    if (m.x()[j] == 0) continue;
    if (!xs.empty()) xs += '*';
    xs += "x" + std::to_string(j + 1);
    if (m.x()[j] > 1) xs += "^" + std::to_string(m.x()[j]);
  }
  if (!xs.empty()) parts.push_back(xs);
  const auto& s = m.symbols();
  for (std::size_t i = 0; i < s.size();) {
    std::size_t k = i;
    while (k < s.size() && s[k] == s[i]) ++k;
    std::string p = to_string(s[i]);
    if (k - i > 1) p += "^" + std::to_string(k - i);
    parts.push_back(p);
    i = k;
  }
  if (parts.empty()) return "1";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " * " + parts[i];
  return out;
}

std::string to_string(const MomentPolynomial& f) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    Rational a = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    if (m.is_one()) {
      out += a.get_str();
    } else if (a == 1) {
      out += to_string(m);
    } else {
      out += a.get_str() + " * " + to_string(m);
    }
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const MomentPolynomial& f) { return os << to_string(f); }

Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ParseError("empty rational");
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  std::string body = s.substr(i);
  auto all_digits = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
  };
  Rational q;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw ParseError("bad rational: " + s);
    mpz_class d(den, 10);
    if (d == 0) throw ParseError("zero denominator: " + s);
    q = Rational(mpz_class(num, 10), d);
    q.canonicalize();
  } else {
    std::string mant = body;
    long exp10 = 0;
    if (auto e = body.find_first_of("eE"); e != std::string::npos) {
      mant = body.substr(0, e);
      std::string ex = body.substr(e + 1);
      bool eneg = false;
      if (!ex.empty() && (ex[0] == '+' || ex[0] == '-')) {
        eneg = ex[0] == '-';
        ex = ex.substr(1);
      }
      if (!all_digits(ex)) throw ParseError("bad exponent: " + s);
      exp10 = std::stol(ex) * (eneg ? -1 : 1);
    }
    std::string ip = mant, fp;
    if (auto dot = mant.find('.'); dot != std::string::npos) {
      ip = mant.substr(0, dot);
      fp = mant.substr(dot + 1);
    }
    if (ip.empty() && fp.empty()) throw ParseError("bad number: " + s);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw ParseError("bad number: " + s);
    mpz_class num(ip + fp, 10);
    exp10 -= static_cast<long>(fp.size());
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    q = exp10 < 0 ? Rational(num, p10) : Rational(num * p10);
    q.canonicalize();
  }
  return neg ? Rational(-q) : q;
}

namespace {

class Parser {
 public:
  Parser(std::size_t n, std::string_view s) : n_(n), s_(s) {}

  MomentPolynomial run() {
    MomentPolynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    if (pos_ - start > 9) fail("integer too large");
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  MomentPolynomial expr() {
    MomentPolynomial acc(n_);
    bool first = true;
    for (;;) {
      skip();
      int sign = 1;
      if (peek('+') || peek('-')) {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        break;
      }
      MomentPolynomial t = term();
      if (sign < 0) acc -= t;
      else acc += t;
      first = false;
      if (!(peek('+') || peek('-'))) break;
    }
    return acc;
  }

  MomentPolynomial term() {
    MomentPolynomial acc = power();
    while (peek('*')) {
      ++pos_;
      acc = acc * power();
    }
    return acc;
  }

  MomentPolynomial power() {
    MomentPolynomial base = atom();
    if (peek('^')) {
      ++pos_;
      long k = integer();
      base = base.pow(static_cast<unsigned>(k));
    }
    return base;
  }

  MomentPolynomial atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      MomentPolynomial p = expr();
      expect(')');
      return p;
    }
    if (c == '-') {
      ++pos_;
      return -power();
    }
    if (c == 'x') {
      ++pos_;
      long j = integer();
      if (j < 1 || static_cast<std::size_t>(j) > n_)
        fail("variable index out of range");
      return MomentPolynomial::x(n_, static_cast<std::size_t>(j - 1));
    }
    if (c == 'm') {
      ++pos_;
      if (peek('(')) {
        ++pos_;
        MomentPolynomial p = expr();
        expect(')');
        return formal_moment(p);
      }
      expect('[');
      Exponents e;
      for (;;) {
        e.push_back(static_cast<int>(integer()));
        if (peek(',')) {
          ++pos_;
          continue;
        }
        break;
      }
      expect(']');
      if (e.size() != n_) fail("moment symbol has wrong number of exponents");
      return MomentPolynomial::moment(e);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    fail("unexpected character");
  }

  MomentPolynomial number() {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '/' && pos_ + 1 < s_.size() &&
        std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      digits();
    } else {
      if (pos_ < s_.size() && s_[pos_] == '.') {
        ++pos_;
        digits();
      }
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
          digits();
        else
          pos_ = save;
      }
    }
    return MomentPolynomial(n_, parse_rational(s_.substr(start, pos_ - start)));
  }

  std::size_t n_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

MomentPolynomial parse_polynomial(std::size_t n, std::string_view text) {
  if (n == 0) throw DimensionError("number of variables must be at least 1");
  return Parser(n, text).run();
}

}  // namespace mompoly
