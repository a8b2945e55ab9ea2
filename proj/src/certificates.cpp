#include "mompoly/certificates.hpp"

#include <algorithm>
#include <limits>

namespace mompoly {

std::string to_string(PsdStatus s) {
  switch (s) {
    case PsdStatus::PositiveDefinite: return "PD";
    case PsdStatus::PositiveSemidefinite: return "PSD";
    default: return "NotPSD";
  }
}

std::string to_string(BlockTag t) {
  switch (t) {
    case BlockTag::Square: return "square";
    case BlockTag::MomentSquare: return "moment_square";
    default: return "constraint";
  }
}

BlockTag parse_block_tag(const std::string& s) {
  if (s == "square") return BlockTag::Square;
  if (s == "moment_square") return BlockTag::MomentSquare;
  if (s == "constraint") return BlockTag::Constraint;
  throw ParseError("unknown block tag '" + s + "'");
}

std::string to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::Valid: return "valid";
    case CertificateStatus::NotPsd: return "not_psd";
    default: return "invalid";
  }
}

PsdResult exact_psd_check(const RationalMatrix& G) {
  const std::size_t n = G.size();
  for (const auto& row : G)
    if (row.size() != n) throw DimensionError("Gram matrix must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (G[i][j] != G[j][i]) throw Error("Gram matrix must be symmetric");

  RationalMatrix A = G;
  constexpr std::size_t kActive = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> step(n, kActive);
  std::vector<std::size_t> order;
  std::vector<std::vector<Rational>> rows;

  PsdResult res;
  std::vector<Rational> y;
  for (;;) {
    std::size_t piv = kActive;
    std::size_t neg = kActive;
    for (std::size_t i = 0; i < n; ++i) {
      if (step[i] != kActive) continue;
      if (A[i][i] < 0 && neg == kActive) neg = i;
      if (A[i][i] > 0 && (piv == kActive || A[i][i] > A[piv][piv])) piv = i;
    }
    if (neg != kActive) {
      y.assign(n, 0);
      y[neg] = 1;
      break;
    }
    // e_i -+ e_j is negative on the active block when a_ii + a_jj < 2|a_ij|
    for (std::size_t i = 0; i < n && y.empty(); ++i) {
      if (step[i] != kActive) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (step[j] != kActive || A[i][j] == 0) continue;
        Rational a = abs(A[i][j]);
        if (A[i][i] + A[j][j] < 2 * a) {
          y.assign(n, 0);
          y[i] = 1;
          y[j] = A[i][j] > 0 ? -1 : 1;
          break;
        }
      }
    }
    if (!y.empty()) break;
    if (piv == kActive) {
      res.rank = order.size();
      res.status = res.rank == n ? PsdStatus::PositiveDefinite : PsdStatus::PositiveSemidefinite;
      return res;
    }
    step[piv] = order.size();
    order.push_back(piv);
    rows.push_back(A[piv]);
    const Rational& d = A[piv][piv];
    for (std::size_t i = 0; i < n; ++i) {
      if (step[i] != kActive || A[i][piv] == 0) continue;
      Rational f = A[i][piv] / d;
      for (std::size_t j = 0; j < n; ++j) {
        if (step[j] != kActive) continue;
        A[i][j] -= f * A[piv][j];
      }
    }
    if (order.size() == n) {
      res.rank = n;
      res.status = PsdStatus::PositiveDefinite;
      return res;
    }
  }

  // lift the witness of the Schur complement back through the pivots
  std::vector<Rational> w = y;
  for (std::size_t k = order.size(); k-- > 0;) {
    std::size_t p = order[k];
    Rational s = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != p && step[j] > k && w[j] != 0) s += rows[k][j] * w[j];
    w[p] = -s / rows[k][p];
  }
  Rational val = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (w[j] != 0) val += w[i] * G[i][j] * w[j];
  }
  if (val >= 0) throw Error("internal error: PSD witness is not negative");
  res.status = PsdStatus::NotPsd;
  res.rank = order.size();
  res.witness = std::move(w);
  res.witness_value = val;
  return res;
}

GramBlock weighted_square(BlockTag tag, const MomentPolynomial& constraint, const Rational& weight,
                          const MomentPolynomial& v) {
  return GramBlock{tag, constraint, RationalMatrix{{weight}}, {v}};
}

MomentPolynomial block_expansion(const GramBlock& b) {
  const std::size_t k = b.v.size();
  if (b.G.size() != k) throw DimensionError("Gram matrix size does not match the vector length");
  for (const auto& row : b.G)
    if (row.size() != k) throw DimensionError("Gram matrix must be square");
  const std::size_t n = b.constraint.arity();
  for (const auto& p : b.v)
    if (p.arity() != n) throw DimensionError("block vector arity mismatch");
  MomentPolynomial q(n);
  for (std::size_t a = 0; a < k; ++a) {
    if (b.G[a][a] != 0) q += b.v[a] * b.v[a] * b.G[a][a];
    for (std::size_t c = a + 1; c < k; ++c)
      if (b.G[a][c] != 0) q += b.v[a] * b.v[c] * (2 * b.G[a][c]);
  }
  switch (b.tag) {
    case BlockTag::Square: return q;
    case BlockTag::MomentSquare: return formal_moment(q * b.constraint);
    default: return q * b.constraint;
  }
}

VerificationResult verify_gram_certificate(const GramCertificate& cert) {
  if (cert.target.arity() != cert.n || cert.rules.arity() != cert.n)
    throw DimensionError("certificate arity mismatch");
  VerificationResult out;
  out.residual = MomentPolynomial(cert.n);
  for (std::size_t i = 0; i < cert.blocks.size(); ++i) {
    const auto& b = cert.blocks[i];
    if (b.constraint.arity() != cert.n) throw DimensionError("block constraint arity mismatch");
    if (b.G.size() != b.v.size()) throw DimensionError("Gram matrix size does not match the vector length");
    PsdResult psd = exact_psd_check(b.G);
    out.block_status.push_back(psd.status);
    if (psd.status == PsdStatus::NotPsd) {
      out.status = CertificateStatus::NotPsd;
      out.failing_block = i;
      out.psd = std::move(psd);
      return out;
    }
  }
  Reducer red(cert.rules);
  MomentPolynomial diff = red.reduce(cert.target);
  for (const auto& b : cert.blocks) diff -= red.reduce(block_expansion(b));
  out.residual = red.reduce(diff);
  out.status = out.residual.is_zero() ? CertificateStatus::Valid : CertificateStatus::Invalid;
  return out;
}

namespace {

int ceil_log2(int k) {
  int l = 0;
  while ((1 << l) < k) ++l;
  return l;
}

Exponents scaled(const Exponents& e, int f) {
  Exponents out = e;
  for (auto& v : out) v *= f;
  return out;
}

}  // namespace

GramCertificate holder_certificate(int k) {
  if (k < 0) throw Error("Hoelder certificate needs k >= 0");
  GramCertificate cert(1);
  cert.label = "holder k=" + std::to_string(k);
  MomentPolynomial m1 = MomentPolynomial::moment({1});
  MomentPolynomial x1 = MomentPolynomial::x(1, 0);
  cert.target = MomentPolynomial::moment({2 * k}) - m1.pow(static_cast<unsigned>(2 * k));
  if (k == 0) return cert;
  MomentPolynomial one(1, 1);
  auto mono = [&](int a, int b) { return x1.pow(static_cast<unsigned>(a)) * m1.pow(static_cast<unsigned>(b)); };
  cert.blocks.push_back(weighted_square(BlockTag::MomentSquare, one, k, mono(0, k) - mono(1, k - 1)));
  int a = k;
  const int ell = ceil_log2(k);
  for (int i = 0; i < ell; ++i) {
    int r = a % 2;
    cert.blocks.push_back(
        weighted_square(BlockTag::MomentSquare, one, Rational(1 << i), mono(r, k - r) - mono(a, k - a)));
    a = (a + 1) / 2;
  }
  return cert;
}

GramCertificate holder_multivariate(int k, const Exponents& i) {
  const std::size_t n = i.size();
  if (n == 0) throw DimensionError("exponent vector must be nonempty");
  for (int v : i)
    if (v < 0) throw Error("negative exponent");
  GramCertificate base = holder_certificate(k);
  GramCertificate cert(n);
  cert.label = "holder k=" + std::to_string(k) + " multivariate";
  MomentPolynomial mi = MomentPolynomial::moment(i);
  cert.target = MomentPolynomial::moment(scaled(i, 2 * k)) - mi.pow(static_cast<unsigned>(2 * k));
  if (is_zero_exponent(i)) return cert;
  std::vector<MomentPolynomial> ximg{MomentPolynomial(MomentMonomial(i, {}))};
  auto symimg = [&](const MomentSymbol& s) { return MomentPolynomial::moment(scaled(i, s.exponents()[0])); };
  for (const auto& b : base.blocks) {
    GramBlock nb{b.tag, MomentPolynomial(n, 1), b.G, {}};
    for (const auto& p : b.v) nb.v.push_back(substitute(p, n, ximg, symimg));
    cert.blocks.push_back(std::move(nb));
  }
  return cert;
}

GramCertificate adhoc_core_certificate(const Exponents& i) {
  const std::size_t n = i.size();
  if (n == 0) throw DimensionError("exponent vector must be nonempty");
  for (int v : i)
    if (v < 0) throw Error("negative exponent");
  GramCertificate cert(n);
  cert.label = "adhoc core";
  MomentPolynomial one(n, 1);
  auto xpow = [&](std::size_t j, int p) {
    Exponents e(n, 0);
    e[j] = p;
    return e;
  };
  MomentPolynomial target(n);
  Rational w = 1;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    w /= 2;
    int scale = 1 << s;
    target += MomentPolynomial::moment(xpow(s, 4 * scale * i[s])) * w;
    Exponents rest(n, 0);
    for (std::size_t j = s + 1; j < n; ++j) rest[j] = 2 * scale * i[j];
    MomentPolynomial v = MomentPolynomial(MomentMonomial(xpow(s, 2 * scale * i[s]), {})) -
                         MomentPolynomial(MomentMonomial(rest, {}));
    cert.blocks.push_back(weighted_square(BlockTag::MomentSquare, one, w, v));
  }
  Rational last = n == 1 ? Rational(1) : w;
  target += MomentPolynomial::moment(xpow(n - 1, 2 * (1 << (n - 1)) * i[n - 1])) * last;
  target -= MomentPolynomial::moment(scaled(i, 2));
  cert.target = target;
  return cert;
}

GramCertificate adhoc_certificate(const Exponents& i) {
  GramCertificate cert = adhoc_core_certificate(i);
  cert.label = "adhoc";
  GramCertificate h = holder_multivariate(1, i);
  cert.target += h.target;
  for (auto& b : h.blocks) cert.blocks.push_back(std::move(b));
  return cert;
}

}  // namespace mompoly
