#include "semigroup/sip.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "semigroup/error.hpp"

namespace semigroup {

GridSpace GridSpace::midpoints(std::size_t cells, double p) {
  if (cells == 0) throw Error(ErrorCode::InvalidArgument, "midpoint grid needs cells > 0");
  return GridSpace{p, cells, 1.0 / static_cast<double>(cells), GridKind::Midpoint, true, true};
}

GridSpace GridSpace::nodes(std::size_t cells, double p, bool left, bool right) {
  if (cells < 2) throw Error(ErrorCode::InvalidArgument, "node grid needs cells >= 2");
  const std::size_t n = cells + 1 - (left ? 0 : 1) - (right ? 0 : 1);
  return GridSpace{p, n, 1.0 / static_cast<double>(cells), GridKind::Node, left, right};
}

GridSpace GridSpace::uniform(std::size_t n, double h, double p) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "mesh width must be positive");
  return GridSpace{p, n, h, GridKind::Midpoint, true, true};
}

std::size_t GridSpace::cells() const {
  if (kind == GridKind::Midpoint) return n;
  return n - 1 + (left_node ? 0 : 1) + (right_node ? 0 : 1);
}

double GridSpace::coordinate(std::size_t i) const {
  if (kind == GridKind::Midpoint) return (static_cast<double>(i) + 0.5) * h;
  return static_cast<double>(i + (left_node ? 0 : 1)) * h;
}

double GridSpace::weight(std::size_t i) const {
  if (kind == GridKind::Midpoint) return h;
  const std::size_t j = i + (left_node ? 0 : 1);
  return (j == 0 || j == cells()) ? 0.5 * h : h;
}

std::vector<double> GridSpace::weights() const {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = weight(i);
  return w;
}

double GridSpace::norm(std::span<const Complex> values) const {
  if (values.size() != n) throw Error(ErrorCode::SpaceMismatch, "vector length != space size");
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) s += weight(i) * std::norm(values[i]);
    return std::sqrt(s);
  }
  for (std::size_t i = 0; i < n; ++i) s += weight(i) * std::pow(std::abs(values[i]), p);
  return std::pow(s, 1.0 / p);
}

GridSpace GridSpace::with_p(double new_p) const {
  GridSpace s = *this;
  s.p = new_p;
  return s;
}

DiscreteFunction::DiscreteFunction(GridSpace s, Vector v) : space(s), values(std::move(v)) {
  if (values.size() != space.n) {
    throw Error(ErrorCode::SpaceMismatch, "function length does not match its space");
  }
}

double ProductSpace::norm(std::span<const Complex> xy) const {
  if (xy.size() != dim()) throw Error(ErrorCode::SpaceMismatch, "product vector length");
  const double a = first.norm(xy.first(first.n));
  const double b = second.norm(xy.subspan(first.n));
  return std::sqrt(a * a + b * b);
}

std::vector<double> ProductSpace::weights() const {
  auto w = first.weights();
  const auto w2 = second.weights();
  w.insert(w.end(), w2.begin(), w2.end());
  return w;
}

Complex lp_sip(const GridSpace& space, std::span<const Complex> f, std::span<const Complex> g,
               double zero_threshold) {
  if (f.size() != space.n || g.size() != space.n) {
    throw Error(ErrorCode::SpaceMismatch, "SIP arguments do not match the space");
  }
  const double p = space.p;
  Complex s{};
  if (p == 2.0) {
    for (std::size_t i = 0; i < space.n; ++i) s += space.weight(i) * f[i] * std::conj(g[i]);
    return s;
  }
  const double ng = space.norm(g);
  if (ng == 0.0) return s;
  const double tail = std::pow(ng, 2.0 - p);
  for (std::size_t i = 0; i < space.n; ++i) {
    const double a = std::abs(g[i]);
    if (a < zero_threshold) continue;
    s += space.weight(i) * f[i] * std::conj(g[i]) * (std::pow(a, p - 2.0) * tail);
  }
  return s;
}

Complex lp_sip(const DiscreteFunction& f, const DiscreteFunction& g, double zero_threshold) {
  if (!(f.space == g.space)) throw Error(ErrorCode::SpaceMismatch, "SIP of functions on different spaces");
  return lp_sip(f.space, f.values, g.values, zero_threshold);
}

Complex product_sip(const DiscreteFunction& x1, const DiscreteFunction& x2,
                    const DiscreteFunction& y1, const DiscreteFunction& y2,
                    const ProductSpace& space, double zero_threshold) {
  if (!(x1.space == space.first) || !(y1.space == space.first) ||
      !(x2.space == space.second) || !(y2.space == space.second)) {
    throw Error(ErrorCode::SpaceMismatch, "components do not match the product space");
  }
  return lp_sip(x1, y1, zero_threshold) + lp_sip(x2, y2, zero_threshold);
}

Complex product_sip(const ProductSpace& space, std::span<const Complex> x,
                    std::span<const Complex> y, double zero_threshold) {
  if (x.size() != space.dim() || y.size() != space.dim()) {
    throw Error(ErrorCode::SpaceMismatch, "product SIP arguments");
  }
  const std::size_t n1 = space.first.n;
  return lp_sip(space.first, x.first(n1), y.first(n1), zero_threshold) +
         lp_sip(space.second, x.subspan(n1), y.subspan(n1), zero_threshold);
}

std::size_t dim(const Space& space) {
  return std::visit([](const auto& s) -> std::size_t {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GridSpace>) {
      return s.n;
    } else {
      return s.dim();
    }
  }, space);
}

double norm(const Space& space, std::span<const Complex> x) {
  return std::visit([x](const auto& s) { return s.norm(x); }, space);
}

Complex sip(const Space& space, std::span<const Complex> x, std::span<const Complex> y,
            double zero_threshold) {
  if (const auto* g = std::get_if<GridSpace>(&space)) return lp_sip(*g, x, y, zero_threshold);
  return product_sip(std::get<ProductSpace>(space), x, y, zero_threshold);
}

std::vector<double> weights(const Space& space) {
  return std::visit([](const auto& s) { return s.weights(); }, space);
}

bool is_hilbert(const Space& space) {
  if (const auto* g = std::get_if<GridSpace>(&space)) return g->p == 2.0;
  return std::get<ProductSpace>(space).is_hilbert();
}

SipAxiomReport sip_axiom_report(const GridSpace& space, std::size_t sample_count,
                                std::uint64_t seed, double cs_tolerance) {
  if (sample_count == 0) throw Error(ErrorCode::InvalidArgument, "sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<std::size_t> pick(0, space.n - 1);
  const auto draw = [&] {
    Vector v(space.n);
    for (auto& c : v) c = Complex{gauss(rng), gauss(rng)};
    return v;
  };

  SipAxiomReport report;
  report.samples = sample_count;
  for (std::size_t k = 0; k < sample_count; ++k) {
    const Vector x = draw();
    const Vector z = draw();
    Vector y = draw();
    if (k % 4 == 3) {
      // zeros, tiny-but-representable and sub-threshold entries
      y[pick(rng)] = 0.0;
      y[pick(rng)] = Complex{1e-200, 0.0};
      y[pick(rng)] = Complex{1e-310, 0.0};
    }
    const Complex c{gauss(rng), gauss(rng)};

    Vector xz(space.n);
    for (std::size_t i = 0; i < space.n; ++i) xz[i] = x[i] + c * z[i];
    const Complex lhs = lp_sip(space, xz, y);
    const Complex rhs = lp_sip(space, x, y) + c * lp_sip(space, z, y);
    report.linearity_residual = std::max(report.linearity_residual, std::abs(lhs - rhs));

    for (const Vector* v : std::array<const Vector*, 2>{&x, &y}) {
      const double nv = space.norm(*v);
      const Complex vv = lp_sip(space, *v, *v);
      report.definiteness_residual =
          std::max(report.definiteness_residual, std::abs(vv - nv * nv) / (nv * nv));
    }

    const double xx = lp_sip(space, x, x).real();
    const double yy = lp_sip(space, y, y).real();
    const double excess = std::norm(lp_sip(space, x, y)) - xx * yy;
    report.worst_cauchy_schwarz_excess = std::max(report.worst_cauchy_schwarz_excess, excess);
    if (excess > cs_tolerance) ++report.cauchy_schwarz_violations;
  }
  return report;
}

Vector duality_functional(const DiscreteFunction& g, double zero_threshold) {
  const auto& space = g.space;
  const double p = space.p;
  Vector w(space.n);
  const double ng = g.norm();
  if (ng == 0.0) return w;
  const double tail = std::pow(ng, 2.0 - p);
  for (std::size_t i = 0; i < space.n; ++i) {
    const double a = std::abs(g.values[i]);
    if (a < zero_threshold) continue;
    w[i] = space.weight(i) * std::conj(g.values[i]) * (std::pow(a, p - 2.0) * tail);
  }
  return w;
}

double dual_norm(const GridSpace& space, std::span<const Complex> w) {
  if (w.size() != space.n) throw Error(ErrorCode::SpaceMismatch, "functional length");
  if (space.p == 1.0) {
    double m = 0.0;
    for (std::size_t i = 0; i < space.n; ++i) m = std::max(m, std::abs(w[i]) / space.weight(i));
    return m;
  }
  const double q = space.p / (space.p - 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < space.n; ++i) {
    const double wi = space.weight(i);
    s += wi * std::pow(std::abs(w[i]) / wi, q);
  }
  return std::pow(s, 1.0 / q);
}

}  // namespace semigroup
