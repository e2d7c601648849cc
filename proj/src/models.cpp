#include "semigroup/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

#include "semigroup/error.hpp"

namespace semigroup {

StaggeredPair staggered_derivatives(std::size_t cells) {
  if (cells < 2) throw Error(ErrorCode::InvalidArgument, "staggered grid needs N >= 2");
  const double h = 1.0 / static_cast<double>(cells);
  const double inv_h = 1.0 / h;
  StaggeredPair pair{Matrix(cells, cells + 1), Matrix(cells - 1, cells), h, cells};
  for (std::size_t j = 0; j < cells; ++j) {
    pair.d_plus(j, j) = -inv_h;
    pair.d_plus(j, j + 1) = inv_h;
  }
  for (std::size_t j = 1; j < cells; ++j) {
    pair.d_minus(j - 1, j - 1) = -inv_h;
    pair.d_minus(j - 1, j) = inv_h;
  }
  return pair;
}

// ---------------------------------------------------------------------------
// lambda profiles

LambdaProfile LambdaProfile::parse(std::string_view text) {
  const std::string s(text);
  static const std::regex number(R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$)");
  static const std::regex tagged(R"(^\s*(const|affine|sin)\s*:\s*([^,]+?)\s*(?:,\s*(.+?))?\s*$)");
  static const std::regex formula(
      R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([-+])\s*(?:((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*?\s*)?(xi|sin)\s*$)");
  std::smatch m;
  const auto to_double = [&](const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + v + "' in lambda profile");
    }
  };
  if (std::regex_match(s, m, number)) return constant(to_double(m[1]));
  if (std::regex_match(s, m, tagged)) {
    const std::string kind = m[1];
    const double a = to_double(m[2]);
    if (kind == "const") {
      if (m[3].matched) throw Error(ErrorCode::InvalidArgument, "const profile takes one value");
      return constant(a);
    }
    if (!m[3].matched) throw Error(ErrorCode::InvalidArgument, kind + " profile needs a,b");
    const double b = to_double(m[3]);
    return kind == "affine" ? affine(a, b) : sinusoid(a, b);
  }
  if (std::regex_match(s, m, formula)) {
    const double a = to_double(m[1]);
    double b = m[3].matched ? to_double(m[3]) : 1.0;
    if (m[2] == "-") b = -b;
    return m[4] == "xi" ? affine(a, b) : sinusoid(a, b);
  }
  throw Error(ErrorCode::InvalidArgument, "unrecognized lambda profile '" + s + "'");
}

double LambdaProfile::operator()(double xi) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Affine: return a + b * xi;
    case Kind::Sinusoid: return a + b * std::sin(std::numbers::pi * xi);
  }
  return a;
}

// Both xi and sin(pi xi) range over [0, 1] on [0, 1].
double LambdaProfile::min() const { return kind == Kind::Constant ? a : std::min(a, a + b); }
double LambdaProfile::max() const { return kind == Kind::Constant ? a : std::max(a, a + b); }

std::string LambdaProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant: os << "const:" << a; break;
    case Kind::Affine: os << "affine:" << a << ',' << b; break;
    case Kind::Sinusoid: os << "sin:" << a << ',' << b; break;
  }
  return os.str();
}

std::vector<double> LambdaProfile::midpoint_samples(std::size_t cells) const {
  if (!(min() > 0.0)) {
    throw Error(ErrorCode::NonPositiveCoefficient, "profile " + describe() + " is not positive");
  }
  std::vector<double> v(cells);
  const double h = 1.0 / static_cast<double>(cells);
  for (std::size_t j = 0; j < cells; ++j) v[j] = (*this)((static_cast<double>(j) + 0.5) * h);
  return v;
}

double LambdaProfile::coercivity_bound() const { return min() * min() / max(); }

// ---------------------------------------------------------------------------
// wave model

BoundaryClosure right_closure(double k1) {
  if (!(std::abs(k1) <= 1.0)) throw Error(ErrorCode::InvalidBC, "|K1| must be <= 1");
  if (k1 == 1.0) return {true, 0.0};
  return {false, (1.0 + k1) / (k1 - 1.0)};
}

BoundaryClosure left_closure(double k2) {
  if (!(std::abs(k2) <= 1.0)) throw Error(ErrorCode::InvalidBC, "|K2| must be <= 1");
  if (k2 == 1.0) return {true, 0.0};
  return {false, (1.0 + k2) / (1.0 - k2)};
}

Matrix q_matrix() {
  const double r = 1.0 / std::numbers::sqrt2;
  return Matrix{{r, r}, {-r, r}};
}

namespace {

// Global node index of the i-th unknown of a (possibly trimmed) node grid.
std::size_t node_of(const GridSpace& nodes, std::size_t i) { return i + (nodes.left_node ? 0 : 1); }

}  // namespace

WaveModel wave_ext(std::size_t cells, double k1, double k2, double p) {
  if (cells < 2) throw Error(ErrorCode::InvalidArgument, "wave model needs N >= 2");
  const auto right = right_closure(k1);
  const auto left = left_closure(k2);
  const auto x1 = GridSpace::nodes(cells, p, !left.dirichlet, !right.dirichlet);
  const auto x2 = GridSpace::midpoints(cells, p);
  const std::size_t n1 = x1.n;
  const double h = x1.h;
  const double inv_h = 1.0 / h;
  const double two_inv_h = 2.0 / h;

  // A2 = D+ restricted to the retained nodes.
  Matrix a2(cells, n1);
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t j = node_of(x1, i);
    if (j < cells) a2(j, i) = -inv_h;  // node j is the left end of cell j
    if (j > 0) a2(j - 1, i) = inv_h;   // and the right end of cell j - 1
  }

  // A1 acts on (x1; x2). Interior nodes: D- on x2. Boundary nodes: half-cell
  // difference with the eliminated boundary flux.
  Matrix a1(n1, n1 + cells);
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t j = node_of(x1, i);
    if (j == 0) {
      a1(i, i) = two_inv_h * -left.coupling;
      a1(i, n1 + 0) = two_inv_h;
    } else if (j == cells) {
      a1(i, i) = two_inv_h * right.coupling;
      a1(i, n1 + cells - 1) = -two_inv_h;
    } else {
      a1(i, n1 + j) = inv_h;
      a1(i, n1 + j - 1) = -inv_h;
    }
  }

  WaveModel model;
  model.k1 = k1;
  model.k2 = k2;
  model.cells = cells;
  model.p = p;
  model.blocks = assemble_ext(std::move(a1), std::move(a2), x1, x2);
  model.q = q_matrix();
  return model;
}

QDiagonalization q_diagonalize(const WaveModel& model) {
  const auto& ext = model.blocks;
  const std::size_t n1 = ext.n1();
  const std::size_t n = n1 + ext.n2();
  const double r = 1.0 / std::numbers::sqrt2;

  // Pair node j with midpoint j + 1/2 wherever both exist.
  struct Pair {
    std::size_t node;
    std::size_t mid;
    std::size_t j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t j = node_of(ext.x1, i);
    if (j < model.cells) pairs.push_back({i, n1 + j, j});
  }

  QDiagonalization out;
  out.transform = Matrix::identity(n);
  for (const auto& pr : pairs) {
    out.transform(pr.node, pr.node) = r;
    out.transform(pr.node, pr.mid) = r;
    out.transform(pr.mid, pr.node) = -r;
    out.transform(pr.mid, pr.mid) = r;
  }
  out.d = out.transform * ext.assembled * out.transform.transpose();

  // Interior pairs: stencils of node j and midpoints j +/- 1/2 stay off the
  // boundary rows.
  std::vector<Pair> interior;
  for (const auto& pr : pairs) {
    if (pr.j >= 2 && pr.j + 2 <= model.cells) interior.push_back(pr);
  }
  out.interior_pairs = interior.size();
  double fro = 0.0;
  double smooth = 0.0;
  for (const auto& row : interior) {
    double acc_fwd = 0.0;
    double acc_back = 0.0;
    for (const auto& col : pairs) {
      const double v = std::sin(std::numbers::pi * col.j * ext.x1.h);
      // first family (node slot) against second family (midpoint slot) and back
      const Complex c12 = out.d(row.node, col.mid);
      const Complex c21 = out.d(row.mid, col.node);
      fro += std::norm(c12) + std::norm(c21);
      acc_fwd += c12.real() * v;
      acc_back += c21.real() * v;
    }
    smooth = std::max({smooth, std::abs(acc_fwd), std::abs(acc_back)});
  }
  out.interior_offdiag_norm = std::sqrt(fro);
  out.smooth_offdiag = smooth;
  return out;
}

Matrix q_conjugate_collocated(const Matrix& d) {
  if (!d.is_square()) throw Error(ErrorCode::DimensionMismatch, "collocated block must be square");
  const std::size_t n = d.rows();
  const double r = 1.0 / std::numbers::sqrt2;
  Matrix a(2 * n, 2 * n);
  a.set_block(0, n, d);
  a.set_block(n, 0, d);
  Matrix t(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = r;
    t(i, n + i) = r;
    t(n + i, i) = -r;
    t(n + i, n + i) = r;
  }
  return t * a * t.transpose();
}

// ---------------------------------------------------------------------------
// closure and heat operator

Closure multiplication_s(std::span<const double> lambda_at_midpoints, const GridSpace& x2,
                         const Sampler& sampler, const Tolerances& tol) {
  if (lambda_at_midpoints.size() != x2.n) {
    throw Error(ErrorCode::DimensionMismatch, "one lambda sample per midpoint required");
  }
  std::vector<double> inv(x2.n);
  for (std::size_t j = 0; j < x2.n; ++j) {
    if (!(lambda_at_midpoints[j] > 0.0)) {
      throw Error(ErrorCode::NonPositiveCoefficient,
                  "lambda sample " + std::to_string(j) + " is not positive");
    }
    inv[j] = 1.0 / lambda_at_midpoints[j];
  }
  Matrix s = Matrix::diagonal(lambda_at_midpoints);
  auto report = coercivity_report(s, x2, sampler, tol);
  return Closure{std::move(s), Matrix::diagonal(inv), report};
}

HeatModel heat_direct(std::size_t cells, std::span<const double> lambda_samples, double k1,
                      double k2, double p) {
  if (cells < 2) throw Error(ErrorCode::InvalidArgument, "heat model needs N >= 2");
  if (lambda_samples.size() != cells) {
    throw Error(ErrorCode::DimensionMismatch, "one lambda sample per midpoint required");
  }
  for (double l : lambda_samples) {
    if (!(l > 0.0)) throw Error(ErrorCode::NonPositiveCoefficient, "lambda must be positive");
  }
  const auto right = right_closure(k1);
  const auto left = left_closure(k2);

  HeatModel model;
  model.lambda_samples.assign(lambda_samples.begin(), lambda_samples.end());
  model.lambda_min = *std::min_element(lambda_samples.begin(), lambda_samples.end());
  model.lambda_max = *std::max_element(lambda_samples.begin(), lambda_samples.end());
  model.k1 = k1;
  model.k2 = k2;
  model.cells = cells;
  model.space = GridSpace::nodes(cells, p, !left.dirichlet, !right.dirichlet);

  const auto& space = model.space;
  const std::size_t n = space.n;
  const double h = space.h;
  const double inv_h = 1.0 / h;
  const double two_inv_h = 2.0 / h;
  const std::size_t first = space.left_node ? 0 : 1;

  // column of global node j, or n when the node was eliminated (u_j = 0)
  const auto col = [&](std::size_t j) {
    if (j < first || j - first >= n) return n;
    return j - first;
  };

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + first;
    if (j == 0) {
      // (2/h) (lambda_{1/2} (u_1 - u_0)/h - c0 u_0)
      const double lr = lambda_samples[0];
      a(i, i) = two_inv_h * (-left.coupling - lr * inv_h);
      if (col(1) < n) a(i, col(1)) = two_inv_h * (lr * inv_h);
    } else if (j == cells) {
      // (2/h) (c1 u_N - lambda_{N-1/2} (u_N - u_{N-1})/h)
      const double ll = lambda_samples[cells - 1];
      a(i, i) = two_inv_h * (right.coupling - ll * inv_h);
      if (col(cells - 1) < n) a(i, col(cells - 1)) = two_inv_h * (ll * inv_h);
    } else {
      const double ll = lambda_samples[j - 1];
      const double lr = lambda_samples[j];
      a(i, i) = -(ll + lr) * inv_h * inv_h;
      if (col(j - 1) < n) a(i, col(j - 1)) = ll * inv_h * inv_h;
      if (col(j + 1) < n) a(i, col(j + 1)) = lr * inv_h * inv_h;
    }
  }
  model.direct = std::move(a);
  return model;
}

HeatSpectrum heat_spectrum(const HeatModel& model, const Tolerances& tol) {
  const auto w = model.space.weights();
  const Matrix b = weighted_similarity(model.direct, w);
  HeatSpectrum out;
  const double scale = std::max(b.max_abs(), 1e-300);
  out.symmetry_defect = max_abs_diff(b, b.transpose()) / scale;
  out.real = out.symmetry_defect <= tol.symmetry;
  if (!out.real) return out;
  Matrix sym = b + b.transpose();
  sym *= 0.5;
  out.eigenvalues = sym_eig(sym, tol).values;
  return out;
}

}  // namespace semigroup
