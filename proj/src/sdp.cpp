#include "mompoly/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace mompoly {

std::size_t SdpProblem::unknowns() const {
  if (form == SdpForm::Moment) return rows.size();
  std::size_t u = scalars.size();
  for (const auto& b : blocks) u += b.dim * (b.dim + 1) / 2;
  return u;
}

std::size_t SdpProblem::max_block() const {
  std::size_t m = 0;
  for (const auto& b : blocks) m = std::max(m, b.dim);
  return m;
}

std::size_t SdpProblem::total_block_dim() const {
  std::size_t t = 0;
  for (const auto& b : blocks) t += b.dim;
  return t;
}

void SdpProblem::check() const {
  auto entry_ok = [&](const SdpEntry& e) {
    if (e.block >= blocks.size()) throw Error("SDP entry refers to a missing block");
    if (e.i > e.j || e.j >= blocks[e.block].dim) throw Error("SDP entry index out of range");
  };
  for (const auto& r : rows) {
    for (const auto& e : r.entries) entry_ok(e);
    for (const auto& [k, v] : r.scalars)
      if (k >= scalars.size()) throw Error("SDP row refers to a missing scalar");
  }
  for (const auto& e : cost) entry_ok(e);
  if (scalar_cost.size() != scalars.size()) throw Error("scalar cost has the wrong length");
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIter: return "max_iter";
    default: return "numerical_failure";
  }
}

std::string to_string(SdpForm f) { return f == SdpForm::Gram ? "gram" : "moment"; }

double SdpResiduals::max() const { return std::max({primal, dual, gap}); }

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Trip {
  int p, q;
  double v;
};

struct RowPart {
  std::size_t row;
  std::vector<Trip> t;
};

// Problem data in doubles with rows scaled to unit norm.
struct Data {
  std::size_t m = 0;
  std::vector<int> dims;
  std::vector<std::vector<RowPart>> parts;  // per block
  std::vector<MatrixXd> C;
  std::vector<int> lp, fr;  // scalar indices
  MatrixXd Al, Af;          // m x |lp|, m x |fr|
  VectorXd cl, cf;
  VectorXd b;
  VectorXd scale;  // original row = scale * scaled row
};

double entry_dot(const std::vector<Trip>& t, const MatrixXd& X) {
  double s = 0;
  for (const auto& e : t) s += e.p == e.q ? e.v * X(e.p, e.p) : 2 * e.v * X(e.p, e.q);
  return s;
}

void add_entries(const std::vector<Trip>& t, double a, MatrixXd& Y) {
  for (const auto& e : t) {
    Y(e.p, e.q) += a * e.v;
    if (e.p != e.q) Y(e.q, e.p) += a * e.v;
  }
}

Data convert(const SdpProblem& p) {
  Data d;
  d.m = p.rows.size();
  const std::size_t nb = p.blocks.size();
  for (const auto& b : p.blocks) d.dims.push_back(static_cast<int>(b.dim));
  d.parts.resize(nb);
  d.C.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) d.C[b] = MatrixXd::Zero(d.dims[b], d.dims[b]);
  for (const auto& e : p.cost) {
    double v = e.value.get_d();
    d.C[e.block](e.i, e.j) += v;
    if (e.i != e.j) d.C[e.block](e.j, e.i) += v;
  }
  std::vector<int> where(p.scalars.size());
  for (std::size_t k = 0; k < p.scalars.size(); ++k) {
    auto& list = p.scalars[k].nonneg ? d.lp : d.fr;
    where[k] = static_cast<int>(list.size());
    list.push_back(static_cast<int>(k));
  }
  d.Al = MatrixXd::Zero(d.m, d.lp.size());
  d.Af = MatrixXd::Zero(d.m, d.fr.size());
  d.cl.resize(d.lp.size());
  d.cf.resize(d.fr.size());
  for (std::size_t k = 0; k < d.lp.size(); ++k) d.cl[k] = p.scalar_cost[d.lp[k]].get_d();
  for (std::size_t k = 0; k < d.fr.size(); ++k) d.cf[k] = p.scalar_cost[d.fr[k]].get_d();
  d.b.resize(d.m);
  d.scale = VectorXd::Ones(d.m);
  for (std::size_t i = 0; i < d.m; ++i) {
    const auto& r = p.rows[i];
    std::vector<std::vector<Trip>> per(nb);
    double norm2 = 0;
    for (const auto& e : r.entries) {
      double v = e.value.get_d();
      per[e.block].push_back({static_cast<int>(e.i), static_cast<int>(e.j), v});
      norm2 += (e.i == e.j ? 1 : 2) * v * v;
    }
    for (const auto& [k, v] : r.scalars) {
      double x = v.get_d();
      norm2 += x * x;
      if (p.scalars[k].nonneg)
        d.Al(i, where[k]) += x;
      else
        d.Af(i, where[k]) += x;
    }
    double s = norm2 > 0 ? std::sqrt(norm2) : 1.0;
    d.scale[i] = s;
    d.b[i] = r.rhs.get_d() / s;
    d.Al.row(i) /= s;
    d.Af.row(i) /= s;
    for (std::size_t b = 0; b < nb; ++b) {
      if (per[b].empty()) continue;
      // merge duplicates
      std::sort(per[b].begin(), per[b].end(),
                [](const Trip& a, const Trip& c) { return std::tie(a.p, a.q) < std::tie(c.p, c.q); });
      std::vector<Trip> merged;
      for (const auto& t : per[b]) {
        if (!merged.empty() && merged.back().p == t.p && merged.back().q == t.q)
          merged.back().v += t.v / s;
        else
          merged.push_back({t.p, t.q, t.v / s});
      }
      d.parts[b].push_back({i, std::move(merged)});
    }
  }
  return d;
}

// min over step lengths keeping L^{-1}(X + a dX)L^{-T} psd, X = L L^T
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dX) {
  if (dX.rows() == 0) return std::numeric_limits<double>::infinity();
  MatrixXd T = chol.matrixL().solve(dX);
  MatrixXd S = chol.matrixL().solve(T.transpose());
  S = 0.5 * (S + S.transpose());
  double lo = Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lo < 0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
}

double max_step_lp(const VectorXd& x, const VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (dx[k] < 0) a = std::min(a, -x[k] / dx[k]);
  return a;
}

struct Scaling {
  MatrixXd G, Ginv, W;
  VectorXd d;
};

bool nt_scaling(const MatrixXd& X, const MatrixXd& Z, Scaling& sc, Eigen::LLT<MatrixXd>& cx,
                Eigen::LLT<MatrixXd>& cz) {
  cx.compute(X);
  cz.compute(Z);
  if (cx.info() != Eigen::Success || cz.info() != Eigen::Success) return false;
  MatrixXd L = cx.matrixL();
  MatrixXd R = cz.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(R.transpose() * L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sc.d = svd.singularValues();
  if (sc.d.minCoeff() <= 0) return false;
  VectorXd isq = sc.d.array().rsqrt();
  VectorXd sq = sc.d.array().sqrt();
  sc.G = L * svd.matrixV() * isq.asDiagonal();
  // G^{-1} = D^{1/2} V^T L^{-1}
  MatrixXd VtLinv = cx.matrixL().transpose().solve(svd.matrixV()).transpose();
  sc.Ginv = sq.asDiagonal() * VtLinv;
  sc.W = sc.G * sc.G.transpose();
  sc.W = 0.5 * (sc.W + sc.W.transpose());
  return true;
}

void schur_block(const std::vector<RowPart>& parts, const MatrixXd& W, MatrixXd& M) {
  const std::size_t K = parts.size();
  const double n2 = static_cast<double>(W.rows()) * static_cast<double>(W.rows());
  std::vector<double> prefix(K + 1, 0);
  for (std::size_t k = 0; k < K; ++k) prefix[k + 1] = prefix[k] + static_cast<double>(parts[k].t.size());
  for (std::size_t k2 = 0; k2 < K; ++k2) {
    const auto& tj = parts[k2].t;
    const std::size_t j = parts[k2].row;
    std::vector<int> support;
    for (const auto& e : tj) {
      support.push_back(e.p);
      support.push_back(e.q);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    double elem = static_cast<double>(tj.size()) * prefix[k2 + 1];
    double dense = 2 * n2 * static_cast<double>(support.size()) + prefix[k2 + 1];
    if (dense < elem) {
      const int t = static_cast<int>(support.size());
      std::vector<int> pos(W.rows(), -1);
      for (int a = 0; a < t; ++a) pos[support[a]] = a;
      MatrixXd Asub = MatrixXd::Zero(t, t);
      MatrixXd Wc(W.rows(), t);
      for (int a = 0; a < t; ++a) Wc.col(a) = W.col(support[a]);
      for (const auto& e : tj) {
        Asub(pos[e.p], pos[e.q]) += e.v;
        if (e.p != e.q) Asub(pos[e.q], pos[e.p]) += e.v;
      }
      MatrixXd Y = Wc * Asub * Wc.transpose();
      for (std::size_t k1 = 0; k1 <= k2; ++k1) {
        double v = entry_dot(parts[k1].t, Y);
        M(parts[k1].row, j) += v;
      }
    } else {
      for (std::size_t k1 = 0; k1 <= k2; ++k1) {
        double acc = 0;
        for (const auto& a : parts[k1].t) {
          for (const auto& c : tj) {
            double v;
            if (a.p != a.q) {
              if (c.p != c.q)
                v = 2 * (W(a.p, c.p) * W(a.q, c.q) + W(a.p, c.q) * W(a.q, c.p));
              else
                v = 2 * W(a.p, c.p) * W(a.q, c.p);
            } else if (c.p != c.q) {
              v = 2 * W(a.p, c.p) * W(a.p, c.q);
            } else {
              double w = W(a.p, c.p);
              v = w * w;
            }
            acc += a.v * c.v * v;
          }
        }
        M(parts[k1].row, j) += acc;
      }
    }
  }
}

// A(X) for all rows, without scalars
VectorXd apply_A(const Data& d, const std::vector<MatrixXd>& X) {
  VectorXd out = VectorXd::Zero(d.m);
  for (std::size_t b = 0; b < d.parts.size(); ++b)
    for (const auto& rp : d.parts[b]) out[rp.row] += entry_dot(rp.t, X[b]);
  return out;
}

// sum_i y_i A_i restricted to block b
MatrixXd apply_At(const Data& d, std::size_t b, const VectorXd& y) {
  MatrixXd Y = MatrixXd::Zero(d.dims[b], d.dims[b]);
  for (const auto& rp : d.parts[b]) add_entries(rp.t, y[rp.row], Y);
  return Y;
}

double frob_dot(const MatrixXd& A, const MatrixXd& B) { return (A.array() * B.array()).sum(); }

}  // namespace

SdpResiduals recompute_residuals(const SdpProblem& p, const SdpSolution& sol) {
  p.check();
  if (sol.X.size() != p.blocks.size() || sol.s.size() != p.scalars.size() || sol.y.size() != p.rows.size())
    throw DimensionError("solution does not match the problem dimensions");
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    if (static_cast<std::size_t>(sol.X[b].rows()) != p.blocks[b].dim ||
        static_cast<std::size_t>(sol.X[b].cols()) != p.blocks[b].dim)
      throw DimensionError("solution block has the wrong size");
  SdpResiduals r;
  double bnorm = 0, rp = 0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& row = p.rows[i];
    double v = 0;
    for (const auto& e : row.entries) {
      double x = sol.X[e.block](e.i, e.j);
      if (e.i != e.j) x += sol.X[e.block](e.j, e.i);
      v += e.value.get_d() * x;
    }
    for (const auto& [k, c] : row.scalars) v += c.get_d() * sol.s[k];
    double rhs = row.rhs.get_d();
    bnorm = std::max(bnorm, std::abs(rhs));
    rp = std::max(rp, std::abs(rhs - v));
  }
  r.primal = rp / (1 + bnorm);
  // objectives
  std::vector<MatrixXd> Z(p.blocks.size());
  double cnorm = 0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) Z[b] = MatrixXd::Zero(p.blocks[b].dim, p.blocks[b].dim);
  for (const auto& e : p.cost) {
    double v = e.value.get_d();
    Z[e.block](e.i, e.j) += v;
    if (e.i != e.j) Z[e.block](e.j, e.i) += v;
    cnorm = std::max(cnorm, std::abs(v));
  }
  double pobj = 0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) pobj += frob_dot(Z[b], sol.X[b]);
  std::vector<double> zs(p.scalars.size());
  for (std::size_t k = 0; k < p.scalars.size(); ++k) {
    double c = p.scalar_cost[k].get_d();
    cnorm = std::max(cnorm, std::abs(c));
    pobj += c * sol.s[k];
    zs[k] = c;
  }
  double dobj = 0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const double y = sol.y[i];
    dobj += y * p.rows[i].rhs.get_d();
    for (const auto& e : p.rows[i].entries) {
      double v = e.value.get_d() * y;
      Z[e.block](e.i, e.j) -= v;
      if (e.i != e.j) Z[e.block](e.j, e.i) -= v;
    }
    for (const auto& [k, c] : p.rows[i].scalars) zs[k] -= c.get_d() * y;
  }
  r.min_eig_x = std::numeric_limits<double>::infinity();
  r.min_eig_z = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (p.blocks[b].dim == 0) continue;
    MatrixXd Xs = 0.5 * (sol.X[b] + sol.X[b].transpose());
    r.min_eig_x = std::min(
        r.min_eig_x, Eigen::SelfAdjointEigenSolver<MatrixXd>(Xs, Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
    r.min_eig_z = std::min(
        r.min_eig_z, Eigen::SelfAdjointEigenSolver<MatrixXd>(Z[b], Eigen::EigenvaluesOnly).eigenvalues().minCoeff());
  }
  double dual_scalar = 0, primal_scalar = 0;
  for (std::size_t k = 0; k < p.scalars.size(); ++k) {
    if (p.scalars[k].nonneg) {
      dual_scalar = std::max(dual_scalar, -zs[k]);
      primal_scalar = std::max(primal_scalar, -sol.s[k]);
      r.min_eig_x = std::min(r.min_eig_x, sol.s[k]);
      r.min_eig_z = std::min(r.min_eig_z, zs[k]);
    } else {
      dual_scalar = std::max(dual_scalar, std::abs(zs[k]));
    }
  }
  if (!std::isfinite(r.min_eig_x)) r.min_eig_x = 0;
  if (!std::isfinite(r.min_eig_z)) r.min_eig_z = 0;
  double xscale = 1;
  for (const auto& X : sol.X) xscale = std::max(xscale, X.cwiseAbs().maxCoeff());
  r.primal = std::max({r.primal, std::max(0.0, -r.min_eig_x) / xscale, primal_scalar / xscale});
  r.dual = std::max(0.0, -r.min_eig_z);
  r.dual = std::max(r.dual, dual_scalar) / (1 + cnorm);
  r.primal_objective = pobj;
  r.dual_objective = dobj;
  r.gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
  return r;
}

SdpSolution solve_ipm(const SdpProblem& p, const IpmOptions& opt) {
  p.check();
  if (p.total_block_dim() > opt.block_cap)
    throw SdpTooLarge("total block dimension " + std::to_string(p.total_block_dim()) + " exceeds the cap " +
                      std::to_string(opt.block_cap) + "; use the SDPA export path");
  Data d = convert(p);
  const std::size_t nb = d.dims.size();
  const std::size_t m = d.m;
  const std::size_t nl = d.lp.size(), nf = d.fr.size();

  SdpSolution sol;
  auto finish = [&](const std::vector<MatrixXd>& X, const VectorXd& xl, const VectorXd& sf, const VectorXd& y) {
    sol.X = X;
    sol.s.assign(p.scalars.size(), 0);
    for (std::size_t k = 0; k < nl; ++k) sol.s[d.lp[k]] = xl[k];
    for (std::size_t k = 0; k < nf; ++k) sol.s[d.fr[k]] = sf[k];
    sol.y.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) sol.y[i] = y[i] / d.scale[i];
    sol.residuals = recompute_residuals(p, sol);
    double value = p.form == SdpForm::Gram ? sol.residuals.primal_objective : sol.residuals.dual_objective;
    sol.objective = p.bound_scale.get_d() * (value + p.constant.get_d());
  };

  // initial point
  std::vector<MatrixXd> X(nb), Z(nb);
  double cmax = 0;
  for (std::size_t b = 0; b < nb; ++b) cmax = std::max(cmax, d.C[b].norm());
  cmax = std::max(cmax, d.cl.size() ? d.cl.norm() : 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const double n = d.dims[b];
    double xi = std::max(10.0, std::sqrt(n)), eta = std::max(10.0, std::sqrt(n));
    for (const auto& rp : d.parts[b]) {
      double an = 0;
      for (const auto& t : rp.t) an += (t.p == t.q ? 1 : 2) * t.v * t.v;
      an = std::sqrt(an);
      xi = std::max(xi, n * (1 + std::abs(d.b[rp.row])) / (1 + an));
      eta = std::max(eta, an);
    }
    eta = std::max(eta, d.C[b].norm());
    X[b] = xi * MatrixXd::Identity(d.dims[b], d.dims[b]);
    Z[b] = eta * MatrixXd::Identity(d.dims[b], d.dims[b]);
  }
  VectorXd xl(nl), zl(nl), sf = VectorXd::Zero(nf), y = VectorXd::Zero(m);
  for (std::size_t k = 0; k < nl; ++k) {
    double an = d.Al.col(k).norm();
    double xi = 10, eta = std::max(10.0, std::abs(d.cl[k]));
    for (std::size_t i = 0; i < m; ++i)
      if (d.Al(i, k) != 0) xi = std::max(xi, (1 + std::abs(d.b[i])) / (1 + an));
    xl[k] = xi;
    zl[k] = eta;
  }

  double bnorm = d.b.norm(), cnorm = cmax + (nf ? d.cf.norm() : 0.0);
  double N = static_cast<double>(nl);
  for (int n : d.dims) N += n;
  if (N == 0) N = 1;

  std::vector<Scaling> sc(nb);
  std::vector<Eigen::LLT<MatrixXd>> cx(nb), cz(nb);
  int stalls = 0;
  sol.status = SdpStatus::MaxIter;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    // residuals
    VectorXd AX = apply_A(d, X);
    VectorXd rp = d.b - AX - d.Al * xl - d.Af * sf;
    std::vector<MatrixXd> Rd(nb);
    double rdn2 = 0, pobj = 0, mu = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      Rd[b] = d.C[b] - apply_At(d, b, y) - Z[b];
      rdn2 += Rd[b].squaredNorm();
      pobj += frob_dot(d.C[b], X[b]);
      mu += frob_dot(X[b], Z[b]);
    }
    VectorXd rdl = d.cl - d.Al.transpose() * y - zl;
    VectorXd rdf = d.cf - d.Af.transpose() * y;
    rdn2 += rdl.squaredNorm() + rdf.squaredNorm();
    pobj += d.cl.dot(xl) + d.cf.dot(sf);
    mu += xl.dot(zl);
    mu /= N;
    double dobj = d.b.dot(y);
    double relp = rp.norm() / (1 + bnorm);
    double reld = std::sqrt(rdn2) / (1 + cnorm);
    double relg = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    if (opt.verbose)
      std::cerr << "ipm " << iter << " pobj " << pobj << " dobj " << dobj << " relp " << relp << " reld " << reld
                << " gap " << relg << " mu " << mu << "\n";
    if (std::max({relp, reld, relg}) <= opt.tol) {
      finish(X, xl, sf, y);
      if (sol.residuals.max() <= opt.tol) {
        sol.status = SdpStatus::Optimal;
        break;
      }
    }
    if (std::abs(dobj) > 1e12 * (1 + std::abs(pobj)) && relp > 1e-4) {
      sol.status = SdpStatus::Infeasible;
      sol.message = "dual objective diverges; primal problem appears infeasible";
      break;
    }
    if (std::abs(pobj) > 1e12 * (1 + std::abs(dobj)) && reld > 1e-4) {
      sol.status = SdpStatus::Infeasible;
      sol.message = "primal objective diverges; dual problem appears infeasible";
      break;
    }

    // scaling and Schur complement
    bool ok = true;
    for (std::size_t b = 0; b < nb && ok; ++b) ok = nt_scaling(X[b], Z[b], sc[b], cx[b], cz[b]);
    if (!ok) {
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "iterate lost positive definiteness";
      break;
    }
    MatrixXd M = MatrixXd::Zero(m, m);
    for (std::size_t b = 0; b < nb; ++b) schur_block(d.parts[b], sc[b].W, M);
    if (nl) {
      VectorXd ratio = xl.cwiseQuotient(zl);
      M.triangularView<Eigen::Upper>() += d.Al * ratio.asDiagonal() * d.Al.transpose();
    }
    M = M.selfadjointView<Eigen::Upper>();
    Eigen::LLT<MatrixXd> chol;
    double reg = 0;
    const double diag_max = m ? M.diagonal().cwiseAbs().maxCoeff() : 1.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      if (reg > 0) {
        MatrixXd Mr = M;
        Mr.diagonal().array() += reg;
        chol.compute(Mr);
      } else {
        chol.compute(M);
      }
      if (chol.info() == Eigen::Success) break;
      reg = reg == 0 ? 1e-14 * std::max(1.0, diag_max) : reg * 100;
    }
    if (m && chol.info() != Eigen::Success) {
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "Schur complement is not positive definite";
      break;
    }
    auto msolve = [&](const VectorXd& rhs) {
      VectorXd x = chol.solve(rhs);
      VectorXd r = rhs - M * x;
      x += chol.solve(r);
      return x;
    };
    MatrixXd MinvAf, S;
    Eigen::LDLT<MatrixXd> Sf;
    if (nf) {
      MinvAf.resize(m, nf);
      for (std::size_t k = 0; k < nf; ++k) MinvAf.col(k) = msolve(d.Af.col(k));
      S = d.Af.transpose() * MinvAf;
      Sf.compute(S);
    }

    // direction for the complementarity targets Rc (blocks) and rcl (LP)
    struct Dir {
      std::vector<MatrixXd> dX, dZ;
      VectorXd dxl, dzl, dsf, dy;
    };
    auto direction = [&](const std::vector<MatrixXd>& Rc, const VectorXd& rcl) {
      Dir D;
      VectorXd h = rp;
      std::vector<MatrixXd> T(nb);
      for (std::size_t b = 0; b < nb; ++b) T[b] = Rc[b] - sc[b].W * Rd[b] * sc[b].W;
      h -= apply_A(d, T);
      if (nl) h -= d.Al * (rcl - xl.cwiseProduct(rdl)).cwiseQuotient(zl);
      if (nf) {
        VectorXd Minvh = msolve(h);
        D.dsf = Sf.solve(d.Af.transpose() * Minvh - rdf);
        D.dy = Minvh - MinvAf * D.dsf;
      } else {
        D.dsf = VectorXd::Zero(0);
        D.dy = m ? msolve(h) : VectorXd::Zero(0);
      }
      D.dX.resize(nb);
      D.dZ.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        D.dZ[b] = Rd[b] - apply_At(d, b, D.dy);
        D.dX[b] = Rc[b] - sc[b].W * D.dZ[b] * sc[b].W;
        D.dX[b] = 0.5 * (D.dX[b] + D.dX[b].transpose());
      }
      D.dzl = rdl - d.Al.transpose() * D.dy;
      D.dxl = (rcl - xl.cwiseProduct(D.dzl)).cwiseQuotient(zl);
      return D;
    };
    auto target = [&](std::size_t b, double sigma_mu, const MatrixXd* corr) {
      const auto& s = sc[b];
      const Eigen::Index n = s.d.size();
      MatrixXd rhs = MatrixXd::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) rhs(i, i) = sigma_mu - s.d[i] * s.d[i];
      if (corr) rhs -= *corr;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) rhs(i, j) *= 2 / (s.d[i] + s.d[j]);
      MatrixXd Rc = s.G * rhs * s.G.transpose();
      return MatrixXd(0.5 * (Rc + Rc.transpose()));
    };
    auto steps = [&](const Dir& D, double& ap, double& ad) {
      ap = max_step_lp(xl, D.dxl);
      ad = max_step_lp(zl, D.dzl);
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(cx[b], D.dX[b]));
        ad = std::min(ad, max_step(cz[b], D.dZ[b]));
      }
    };

    // predictor
    std::vector<MatrixXd> Rc(nb);
    for (std::size_t b = 0; b < nb; ++b) Rc[b] = target(b, 0, nullptr);
    VectorXd rcl = -xl.cwiseProduct(zl);
    Dir aff = direction(Rc, rcl);
    double ap, ad;
    steps(aff, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0;
    for (std::size_t b = 0; b < nb; ++b) mu_aff += frob_dot(X[b] + ap * aff.dX[b], Z[b] + ad * aff.dZ[b]);
    mu_aff += (xl + ap * aff.dxl).dot(zl + ad * aff.dzl);
    mu_aff /= N;
    double sigma = std::pow(std::max(0.0, mu_aff) / std::max(mu, 1e-300), 3);
    sigma = std::min(1.0, std::max(sigma, 0.0));

    // corrector
    for (std::size_t b = 0; b < nb; ++b) {
      MatrixXd dXs = sc[b].Ginv * aff.dX[b] * sc[b].Ginv.transpose();
      MatrixXd dZs = sc[b].G.transpose() * aff.dZ[b] * sc[b].G;
      MatrixXd corr = 0.5 * (dXs * dZs + dZs * dXs);
      Rc[b] = target(b, sigma * mu, &corr);
    }
    rcl = VectorXd::Constant(nl, sigma * mu) - xl.cwiseProduct(zl) - aff.dxl.cwiseProduct(aff.dzl);
    Dir D = direction(Rc, rcl);
    steps(D, ap, ad);
    const double tau = 0.98;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);

    for (std::size_t b = 0; b < nb; ++b) {
      X[b] += ap * D.dX[b];
      Z[b] += ad * D.dZ[b];
      X[b] = 0.5 * (X[b] + X[b].transpose());
      Z[b] = 0.5 * (Z[b] + Z[b].transpose());
    }
    xl += ap * D.dxl;
    sf += ap * D.dsf;
    zl += ad * D.dzl;
    y += ad * D.dy;
    stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;
    if (stalls >= 3) {
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "step lengths collapsed";
      ++iter;
      break;
    }
  }
  sol.iterations = iter;
  if (sol.status != SdpStatus::Optimal) {
    finish(X, xl, sf, y);
    if (sol.status == SdpStatus::MaxIter && sol.message.empty())
      sol.message = "iteration limit reached before the tolerance";
  }
  return sol;
}

}  // namespace mompoly
