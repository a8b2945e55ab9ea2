#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mompoly/sdp.hpp"

namespace mompoly {

std::string render_decimal(const Rational& q) {
  // get_d truncates; take the nearest neighbour so exact decimals survive a round trip
  double d = q.get_d();
  for (double c : {std::nextafter(d, -INFINITY), std::nextafter(d, INFINITY)}) {
    if (!std::isfinite(c)) continue;
    Rational ec(c), ed(d);
    if (abs(Rational(ec - q)) < abs(Rational(ed - q))) d = c;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

namespace {

// Position of every scalar inside the trailing diagonal block.
struct ScalarLayout {
  std::vector<std::size_t> plus, minus;  // 1-based; minus = 0 for nonneg scalars
  std::size_t size = 0;
};

ScalarLayout layout(const SdpProblem& p) {
  ScalarLayout l;
  for (const auto& s : p.scalars) {
    l.plus.push_back(++l.size);
    l.minus.push_back(s.nonneg ? 0 : ++l.size);
  }
  return l;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) out += (c == '\n' || c == '\r') ? ' ' : c;
  return out;
}

}  // namespace

void write_sdpa(const SdpProblem& p, std::ostream& out) {
  p.check();
  auto lay = layout(p);
  const std::size_t nblocks = p.blocks.size() + (lay.size ? 1 : 0);
  out << "* mompoly sdpa export\n";
  out << "* label " << escape(p.label) << "\n";
  out << "* form " << to_string(p.form) << "\n";
  out << "* bound_scale " << p.bound_scale.get_str() << "\n";
  out << "* constant " << p.constant.get_str() << "\n";
  out << "* SDPA objective = -(canonical objective); bound = bound_scale * (constant - SDPA objective)\n";
  for (std::size_t b = 0; b < p.blocks.size(); ++b) out << "* block " << b + 1 << " " << escape(p.blocks[b].label) << "\n";
  for (std::size_t k = 0; k < p.scalars.size(); ++k)
    out << "* scalar " << k << " " << (p.scalars[k].nonneg ? "nonneg" : "free") << " " << lay.plus[k] << " "
        << lay.minus[k] << " " << escape(p.scalars[k].name) << "\n";
  for (std::size_t i = 0; i < p.rows.size(); ++i) out << "* row " << i + 1 << " " << escape(p.rows[i].label) << "\n";
  out << p.rows.size() << "\n" << nblocks << "\n";
  for (const auto& b : p.blocks) out << b.dim << " ";
  if (lay.size) out << "-" << lay.size;
  out << "\n";
  for (const auto& r : p.rows) out << render_decimal(r.rhs) << " ";
  out << "\n";
  const std::size_t sblock = p.blocks.size() + 1;
  auto emit = [&](std::size_t mat, const std::vector<SdpEntry>& entries,
                  const std::vector<std::pair<std::size_t, Rational>>& scal, const Rational& sign) {
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> merged;
    for (const auto& e : entries) merged[{e.block, e.i, e.j}] += e.value;
    for (const auto& [key, v] : merged) {
      if (v == 0) continue;
      auto [b, i, j] = key;
      out << mat << " " << b + 1 << " " << i + 1 << " " << j + 1 << " " << render_decimal(sign * v) << "\n";
    }
    std::map<std::size_t, Rational> sm;
    for (const auto& [k, v] : scal) sm[k] += v;
    for (const auto& [k, v] : sm) {
      if (v == 0) continue;
      out << mat << " " << sblock << " " << lay.plus[k] << " " << lay.plus[k] << " " << render_decimal(sign * v) << "\n";
      if (lay.minus[k])
        out << mat << " " << sblock << " " << lay.minus[k] << " " << lay.minus[k] << " " << render_decimal(-sign * v)
            << "\n";
    }
  };
  std::vector<std::pair<std::size_t, Rational>> cs;
  for (std::size_t k = 0; k < p.scalar_cost.size(); ++k) cs.emplace_back(k, p.scalar_cost[k]);
  emit(0, p.cost, cs, Rational(-1));
  for (std::size_t i = 0; i < p.rows.size(); ++i) emit(i + 1, p.rows[i].entries, p.rows[i].scalars, Rational(1));
}

void write_sdpa(const SdpProblem& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_sdpa(p, f);
  if (!f) throw Error("failed writing " + path);
}

namespace {

std::vector<std::string> numbers_in(const std::string& line) {
  std::string s = line;
  for (char& c : s)
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

Rational to_rational(const std::string& tok) {
  try {
    return parse_rational(tok);
  } catch (const ParseError&) {
    throw Error("malformed number '" + tok + "' in SDPA data");
  }
}

}  // namespace

SdpProblem read_sdpa(std::istream& in) {
  SdpProblem p;
  std::vector<std::string> body;
  std::map<std::size_t, std::string> block_labels, row_labels;
  struct ScalarMeta {
    bool nonneg;
    std::size_t plus, minus;
    std::string name;
  };
  std::map<std::size_t, ScalarMeta> smeta;
  bool has_meta = false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) {
      std::istringstream is(line.substr(1));
      std::string key;
      is >> key;
      std::string rest;
      auto tail = [&] {
        std::getline(is, rest);
        if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
        return rest;
      };
      if (key == "mompoly") has_meta = true;
      else if (key == "label") p.label = tail();
      else if (key == "form") p.form = tail() == "moment" ? SdpForm::Moment : SdpForm::Gram;
      else if (key == "bound_scale") p.bound_scale = to_rational(tail());
      else if (key == "constant") p.constant = to_rational(tail());
      else if (key == "block") {
        std::size_t b;
        is >> b;
        block_labels[b] = tail();
      } else if (key == "row") {
        std::size_t r;
        is >> r;
        row_labels[r] = tail();
      } else if (key == "scalar") {
        std::size_t k, pl, mi;
        std::string kind;
        is >> k >> kind >> pl >> mi;
        smeta[k] = {kind == "nonneg", pl, mi, tail()};
      }
      continue;
    }
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) body.push_back(line);
  }
  if (body.size() < 2) throw Error("SDPA data is missing the header");
  auto h0 = numbers_in(body[0]);
  auto h1 = numbers_in(body[1]);
  if (h0.empty() || h1.empty()) throw Error("SDPA data is missing the header");
  const long m = std::stol(h0[0]);
  const long nblocks = std::stol(h1[0]);
  if (m < 0 || nblocks < 0) throw Error("negative sizes in SDPA header");
  std::vector<long> sizes;
  std::size_t next = 2;
  if (nblocks > 0) {
    if (body.size() <= next) throw Error("SDPA block structure missing");
    for (const auto& t : numbers_in(body[next++])) sizes.push_back(std::stol(t));
  } else if (body.size() > next && m == 0) {
    // header-only files may carry empty structure and vector lines
  }
  if (static_cast<long>(sizes.size()) != nblocks) throw Error("SDPA block structure has the wrong length");
  std::vector<Rational> c;
  while (static_cast<long>(c.size()) < m) {
    if (body.size() <= next) throw Error("SDPA objective vector is short");
    for (const auto& t : numbers_in(body[next++])) c.push_back(to_rational(t));
  }
  if (static_cast<long>(c.size()) != m) throw Error("SDPA objective vector has the wrong length");

  // the diagonal block holding scalars, if metadata says so
  long sblock = -1;
  for (long b = 0; b < nblocks; ++b)
    if (sizes[b] < 0) {
      if (sblock >= 0) throw Error("only one diagonal block is supported");
      sblock = b;
    }
  for (long b = 0; b < nblocks; ++b) {
    if (b == sblock) continue;
    auto it = block_labels.find(static_cast<std::size_t>(b + 1));
    p.blocks.push_back({it == block_labels.end() ? "" : it->second, static_cast<std::size_t>(sizes[b])});
  }
  std::map<std::size_t, std::pair<std::size_t, Rational>> diag_to_scalar;  // diag index -> (scalar, sign)
  if (sblock >= 0) {
    const std::size_t dsize = static_cast<std::size_t>(-sizes[sblock]);
    if (has_meta && !smeta.empty()) {
      for (const auto& [k, meta] : smeta) {
        if (k != p.scalars.size()) throw Error("scalar metadata out of order");
        p.scalars.push_back({meta.name, meta.nonneg});
        diag_to_scalar[meta.plus] = {k, Rational(1)};
        if (meta.minus) diag_to_scalar[meta.minus] = {k, Rational(-1)};
      }
    } else {
      for (std::size_t k = 0; k < dsize; ++k) {
        p.scalars.push_back({"s" + std::to_string(k + 1), true});
        diag_to_scalar[k + 1] = {k, Rational(1)};
      }
    }
  }
  p.scalar_cost.assign(p.scalars.size(), 0);
  p.rows.resize(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    p.rows[i].rhs = c[i];
    auto it = row_labels.find(static_cast<std::size_t>(i + 1));
    if (it != row_labels.end()) p.rows[i].label = it->second;
  }
  auto block_index = [&](long b) {
    long k = 0;
    for (long t = 0; t < b; ++t)
      if (t != sblock) ++k;
    return static_cast<std::size_t>(k);
  };
  for (; next < body.size(); ++next) {
    auto t = numbers_in(body[next]);
    if (t.empty()) continue;
    if (t.size() != 5) throw Error("malformed SDPA entry line: " + body[next]);
    long mat = std::stol(t[0]), blk = std::stol(t[1]) - 1;
    long i = std::stol(t[2]) - 1, j = std::stol(t[3]) - 1;
    Rational v = to_rational(t[4]);
    if (mat < 0 || mat > m || blk < 0 || blk >= nblocks || i < 0 || j < 0) throw Error("SDPA entry out of range");
    if (i > j) std::swap(i, j);
    const Rational sign = mat == 0 ? Rational(-1) : Rational(1);
    if (blk == sblock) {
      if (i != j) throw Error("off-diagonal entry in a diagonal block");
      auto it = diag_to_scalar.find(static_cast<std::size_t>(i + 1));
      if (it == diag_to_scalar.end()) throw Error("diagonal index out of range");
      auto [k, sg] = it->second;
      if (sg < 0) continue;  // the minus copy of a free scalar
      if (mat == 0)
        p.scalar_cost[k] += sign * v;
      else
        p.rows[mat - 1].scalars.emplace_back(k, v);
      continue;
    }
    if (j >= sizes[blk]) throw Error("SDPA entry out of range");
    SdpEntry e{block_index(blk), static_cast<std::size_t>(i), static_cast<std::size_t>(j), sign * v};
    if (mat == 0)
      p.cost.push_back(e);
    else
      p.rows[mat - 1].entries.push_back(e);
  }
  p.check();
  return p;
}

SdpProblem read_sdpa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_sdpa(f);
}

namespace {

// numbers following "key" up to the matching closing brace
std::vector<double> braced_after(const std::string& text, const std::string& key, bool& found) {
  found = false;
  auto pos = text.find(key);
  if (pos == std::string::npos) return {};
  pos = text.find('{', pos);
  if (pos == std::string::npos) return {};
  int depth = 0;
  std::size_t end = pos;
  for (; end < text.size(); ++end) {
    if (text[end] == '{') ++depth;
    if (text[end] == '}' && --depth == 0) break;
  }
  if (depth != 0) throw Error("unbalanced braces after " + key);
  found = true;
  std::vector<double> out;
  for (const auto& t : numbers_in(text.substr(pos, end - pos + 1))) out.push_back(std::stod(t));
  return out;
}

}  // namespace

SdpSolution read_sdpa_solution(const SdpProblem& p, std::istream& in, double tol) {
  p.check();
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  auto lay = layout(p);
  const std::size_t m = p.rows.size();
  SdpSolution sol;
  sol.X.resize(p.blocks.size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b) sol.X[b] = Eigen::MatrixXd::Zero(p.blocks[b].dim, p.blocks[b].dim);
  std::vector<double> diag(lay.size + 1, 0);
  std::vector<double> xvec;

  if (text.find("xVec") != std::string::npos) {
    bool f1 = false, f2 = false;
    xvec = braced_after(text, "xVec", f1);
    auto ymat = braced_after(text, "yMat", f2);
    if (!f1 || !f2) throw Error("SDPA output lacks xVec or yMat");
    std::size_t need = lay.size;
    for (const auto& b : p.blocks) need += b.dim * b.dim;
    if (ymat.size() != need) throw Error("yMat has the wrong number of entries");
    std::size_t k = 0;
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
      for (std::size_t i = 0; i < p.blocks[b].dim; ++i)
        for (std::size_t j = 0; j < p.blocks[b].dim; ++j) sol.X[b](i, j) = ymat[k++];
    for (std::size_t i = 1; i <= lay.size; ++i) diag[i] = ymat[k++];
  } else {
    // CSDP: first line y, then "matno blk i j value" with matno 2 for X
    std::istringstream is(text);
    std::string first;
    if (!std::getline(is, first)) throw Error("empty solution file");
    for (const auto& t : numbers_in(first)) xvec.push_back(std::stod(t));
    std::string line;
    while (std::getline(is, line)) {
      auto t = numbers_in(line);
      if (t.empty()) continue;
      if (t.size() != 5) throw Error("malformed solution line: " + line);
      int mat = std::stoi(t[0]);
      std::size_t blk = std::stoul(t[1]) - 1, i = std::stoul(t[2]) - 1, j = std::stoul(t[3]) - 1;
      double v = std::stod(t[4]);
      if (mat != 2) continue;
      if (blk < p.blocks.size()) {
        if (i >= p.blocks[blk].dim || j >= p.blocks[blk].dim) throw Error("solution entry out of range");
        sol.X[blk](i, j) = v;
        sol.X[blk](j, i) = v;
      } else if (blk == p.blocks.size() && lay.size) {
        if (i != j || i + 1 > lay.size) throw Error("solution entry out of range");
        diag[i + 1] = v;
      } else {
        throw Error("solution entry refers to a missing block");
      }
    }
  }
  if (xvec.size() != m) throw Error("solution vector has the wrong length");
  sol.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.y[i] = -xvec[i];
  sol.s.resize(p.scalars.size());
  for (std::size_t k = 0; k < p.scalars.size(); ++k)
    sol.s[k] = diag[lay.plus[k]] - (lay.minus[k] ? diag[lay.minus[k]] : 0.0);
  sol.residuals = recompute_residuals(p, sol);
  double value = p.form == SdpForm::Gram ? sol.residuals.primal_objective : sol.residuals.dual_objective;
  sol.objective = p.bound_scale.get_d() * (value + p.constant.get_d());
  sol.status = sol.residuals.max() <= tol ? SdpStatus::Optimal : SdpStatus::NumericalFailure;
  if (sol.status != SdpStatus::Optimal) sol.message = "imported solution exceeds the residual tolerance";
  return sol;
}

SdpSolution read_sdpa_solution(const SdpProblem& p, const std::string& path, double tol) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_sdpa_solution(p, f, tol);
}

}  // namespace mompoly
