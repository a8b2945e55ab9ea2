#include "mompoly/nonlocal.hpp"

#include <array>

namespace mompoly {

namespace {

MomentPolynomial m_of(std::size_t n, std::initializer_list<std::size_t> vars) {
  Exponents e(n, 0);
  for (auto v : vars) e[v] += 1;
  return MomentPolynomial::moment(e);
}

MomentPolynomial xv(std::size_t n, std::size_t j) { return MomentPolynomial::x(n, j); }

constexpr std::size_t kA = 0, kB = 3, kC = 6;

}  // namespace

MomentPolynomial covariance(std::size_t n, std::size_t a, std::size_t b) {
  return m_of(n, {a, b}) - m_of(n, {a}) * m_of(n, {b});
}

ProblemSpec cov3322_spec(int order) {
  const std::size_t n = 6;
  ProblemSpec spec(n);
  spec.name = "cov3322";
  spec.rules.add_binary_all();
  // sign pattern of cov(A_a, B_b)
  const int sign[3][3] = {{1, 1, 1}, {1, 1, -1}, {1, -1, 0}};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      if (sign[a][b] != 0) spec.objective += covariance(n, a, 3 + b) * Rational(sign[a][b]);
  spec.sense = Sense::Max;
  spec.order = order;
  spec.cone = Cone::Qm;
  spec.mode = Mode::Membership;
  return spec;
}

namespace {

GramCertificate cov3322_with(const std::string& t) {
  const std::size_t n = 6;
  GramCertificate cert(n);
  cert.label = "cov3322";
  cert.rules.add_binary_all();
  cert.target = MomentPolynomial(n, Rational(9, 2)) - cov3322_spec().objective;
  auto q = [](long p, long d) { return Rational(p, d); };
  RationalMatrix G = {
      {q(4, 3), 0, q(-1, 2), 0, 0, 0, 0, 0},
      {0, q(1, 32), 0, 0, 0, 0, 0, 0},
      {q(-1, 2), 0, q(3, 8), q(1, 16), 0, 0, 0, 0},
      {0, 0, q(1, 16), q(1, 8), q(-1, 8), 0, q(3, 64), q(3, 64)},
      {0, 0, 0, q(-1, 8), q(1, 4), q(-1, 8), q(-1, 16), q(-1, 16)},
      {0, 0, 0, 0, q(-1, 8), q(1, 4), 0, 0},
      {0, 0, 0, q(3, 64), q(-1, 16), 0, q(3, 64), 0},
      {0, 0, 0, q(3, 64), q(-1, 16), 0, 0, q(3, 64)},
  };
  std::vector<MomentPolynomial> v;
  for (const std::string s : {
           "x6*T",
           "(x1-x2)*(x4+x5)",
           "1+x6*(x2-x1+4*m[1,0,0,0,0,0])",
           "2-(x1+x2)*(x4+x5)-8*x6*m[1,0,0,0,0,0]",
           "(x3+2*m[0,0,1,0,0,0])*(x4-x5)",
           "2*x4*m[0,0,1,0,0,0]-x3*x5",
           "2+(x4-x5)*(4*m[0,0,1,0,0,0]-x1-x2)+8/3*x4*T+8*x6*m[1,0,0,0,0,0]",
           "2+(x4-x5)*(4*m[0,0,1,0,0,0]+x1+x2)+8/3*x5*T+8*x6*m[1,0,0,0,0,0]",
       }) {
    std::string e = s;
    for (std::size_t p; (p = e.find('T')) != std::string::npos;) e.replace(p, 1, "(" + t + ")");
    v.push_back(parse_polynomial(n, e));
  }
  cert.blocks.push_back(GramBlock{BlockTag::MomentSquare, MomentPolynomial(n, 1), G, v});
  return cert;
}

}  // namespace

GramCertificate cov3322_certificate() { return cov3322_with("m[1,1,0,0,0,0]"); }

GramCertificate cov3322_certificate_corrected() {
  auto c = cov3322_with("m[1,0,0,0,0,0]+m[0,1,0,0,0,0]");
  c.label = "cov3322 corrected";
  return c;
}

RuleSet bilocal_rules() {
  const std::size_t n = 9;
  RuleSet rules(n);
  auto sym = [&](std::initializer_list<std::size_t> vars) {
    Exponents e(n, 0);
    for (auto v : vars) e[v] = 1;
    return MomentSymbol(e);
  };
  rules.add_binary_all();
  for (std::size_t j = 0; j < n; ++j) rules.add_symbol_rule(sym({j}), MomentPolynomial(n));
  rules.add_independence({kA, kA + 1, kA + 2}, {kC, kC + 1, kC + 2});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      rules.add_symbol_rule(sym({kA + i, kB + j}), MomentPolynomial(n));
      rules.add_symbol_rule(sym({kB + i, kC + j}), MomentPolynomial(n));
    }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        if (i == j || j == k || i == k)
          rules.add_symbol_rule(sym({kA + i, kB + j, kC + k}), MomentPolynomial(n));
  return rules;
}

MomentPolynomial bilocal_objective() {
  const std::size_t n = 9;
  MomentPolynomial f(n);
  for (std::size_t i = 0; i < 3; ++i)
    f += (m_of(n, {kB + i, kC + i}) - m_of(n, {kA + i, kB + i})) * Rational(1, 3);
  std::array<std::size_t, 3> p{0, 1, 2};
  do {
    f -= m_of(n, {kA + p[0], kB + p[1], kC + p[2]});
  } while (std::next_permutation(p.begin(), p.end()));
  return f;
}

ProblemSpec bilocal_spec(int order) {
  ProblemSpec spec(9);
  spec.name = "bilocal";
  spec.rules = bilocal_rules();
  spec.objective = bilocal_objective();
  spec.sense = Sense::Max;
  spec.order = order;
  spec.cone = Cone::Qm;
  spec.mode = Mode::Dual;
  return spec;
}

namespace {

std::vector<IdentityCheck> identities(bool corrupt) {
  const std::size_t n = 9;
  RuleSet rules = bilocal_rules();
  Reducer red(rules);
  MomentPolynomial one(n, 1);
  auto A = [&](std::size_t i) { return xv(n, kA + i); };
  auto B = [&](std::size_t i) { return xv(n, kB + i); };
  auto C = [&](std::size_t i) { return xv(n, kC + i); };
  Rational flip = corrupt ? -1 : 1;
  std::vector<IdentityCheck> out;
  for (std::size_t i = 0; i < 3; ++i) {
    IdentityCheck c;
    c.name = "exact1 i=" + std::to_string(i + 1);
    c.lhs = one - formal_moment(B(i) * C(i)) + formal_moment(A(i) * B(i)) * flip;
    c.rhs = formal_moment((one - B(i) * C(i)) * (one + A(i) * B(i)));
    c.residual = red.reduce(c.lhs - c.rhs);
    c.holds = c.residual.is_zero();
    out.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < 3; ++j) {
    std::size_t i = j == 0 ? 1 : 0;
    std::size_t k = 3 - i - j;
    IdentityCheck c;
    c.name = "exact2 (i,j,k)=(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
             std::to_string(k + 1) + ")";
    c.lhs = one + formal_moment(A(i) * B(j) * C(k)) * flip + formal_moment(A(k) * B(j) * C(i));
    MomentPolynomial inner = ((A(i) * A(k) + C(i) * C(k)) * B(j) + A(i) * C(i) + A(k) * C(k)) *
                                 Rational(1, 2) -
                             formal_moment(A(i) * A(k)) * B(j);
    c.rhs = formal_moment(inner * inner);
    c.residual = red.reduce(c.lhs - c.rhs);
    c.holds = c.residual.is_zero();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<IdentityCheck> bilocal_identities_check() { return identities(false); }

std::vector<IdentityCheck> bilocal_identities_negative_control() { return identities(true); }

AttainmentReport bilocal_attainment() {
  const int eta[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  std::vector<Rational> w(16, Rational(1, 16));
  AttainmentReport rep;
  rep.space = FiniteProbabilitySpace(w);
  // point (a,b) has index 4a+b; u (x) v takes the value u_a v_b there
  std::vector<std::vector<Rational>> cols(9, std::vector<Rational>(16));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      int p = 4 * a + b;
      for (int i = 0; i < 3; ++i) {
        cols[kA + i][p] = eta[0][a] * eta[i + 1][b];
        cols[kB + i][p] = (eta[0][a] * eta[0][b] - (a == b ? 2 : 0)) * eta[i + 1][a] * eta[0][b];
        cols[kC + i][p] = eta[i + 1][a] * eta[0][b];
      }
    }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < 9; ++j) {
    names.push_back("x" + std::to_string(j + 1));
    rep.space.add_variable(names.back(), cols[j]);
  }
  auto values = eval_random_vars(bilocal_objective(), rep.space, names);
  rep.objective = values[0];
  rep.objective_constant = true;
  for (const auto& v : values)
    if (v != values[0]) rep.objective_constant = false;
  rep.constraints_hold = rules_hold(bilocal_rules(), pushforward(rep.space, names));
  return rep;
}

}  // namespace mompoly
