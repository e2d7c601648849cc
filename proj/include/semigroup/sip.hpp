#pragma once

// Semi-inner-products on weighted l^p grid spaces and their Euclidean
// products. For g != 0 the SIP is
//
//   [f, g] = sum_i w_i f_i conj(g_i) |g_i|^{p-2} ||g||_p^{2-p},
//
// with entries |g_i| below the zero threshold contributing nothing. It is
// linear in f, [g, g] = ||g||^2, and obeys Cauchy-Schwarz by Hoelder.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "semigroup/linalg.hpp"

namespace semigroup {

enum class GridKind { Node, Midpoint };

/// Discrete l^p space on [0, 1].
///
/// Midpoint grids carry weight h on every point. Node grids use the
/// trapezoid rule: an endpoint node has weight h/2. Either endpoint can be
/// dropped (a Dirichlet-eliminated node); the remaining nodes keep their
/// weights. A plain weighted l^p space with uniform weight h is a midpoint
/// grid with arbitrary n.
struct GridSpace {
  double p = 2.0;
  std::size_t n = 0;
  double h = 1.0;
  GridKind kind = GridKind::Midpoint;
  bool left_node = true;   // node grids: node 0 present
  bool right_node = true;  // node grids: node N present

  static GridSpace midpoints(std::size_t cells, double p);
  static GridSpace nodes(std::size_t cells, double p, bool left = true, bool right = true);
  static GridSpace uniform(std::size_t n, double h, double p);

  std::size_t cells() const;
  /// Grid coordinate of the i-th stored value.
  double coordinate(std::size_t i) const;
  double weight(std::size_t i) const;
  std::vector<double> weights() const;
  double norm(std::span<const Complex> values) const;
  GridSpace with_p(double new_p) const;

  friend bool operator==(const GridSpace&, const GridSpace&) = default;
};

struct DiscreteFunction {
  GridSpace space;
  Vector values;

  DiscreteFunction(GridSpace s, Vector v);
  double norm() const { return space.norm(values); }
};

struct ProductSpace {
  GridSpace first;
  GridSpace second;

  std::size_t dim() const { return first.n + second.n; }
  /// sqrt(||x||^2 + ||y||^2) on the concatenated vector.
  double norm(std::span<const Complex> xy) const;
  std::vector<double> weights() const;
  bool is_hilbert() const { return first.p == 2.0 && second.p == 2.0; }
};

Complex lp_sip(const GridSpace& space, std::span<const Complex> f, std::span<const Complex> g,
               double zero_threshold = 1e-300);
/// SpaceMismatch when f and g live on different spaces.
Complex lp_sip(const DiscreteFunction& f, const DiscreteFunction& g,
               double zero_threshold = 1e-300);

/// [x1, y1]_first + [x2, y2]_second.
Complex product_sip(const DiscreteFunction& x1, const DiscreteFunction& x2,
                    const DiscreteFunction& y1, const DiscreteFunction& y2,
                    const ProductSpace& space, double zero_threshold = 1e-300);
/// Same on concatenated vectors (first.n entries, then second.n entries).
Complex product_sip(const ProductSpace& space, std::span<const Complex> x,
                    std::span<const Complex> y, double zero_threshold = 1e-300);

/// Either a single grid space or a two-factor product.
using Space = std::variant<GridSpace, ProductSpace>;

std::size_t dim(const Space& space);
double norm(const Space& space, std::span<const Complex> x);
Complex sip(const Space& space, std::span<const Complex> x, std::span<const Complex> y,
            double zero_threshold = 1e-300);
std::vector<double> weights(const Space& space);
/// True when every factor has p = 2 (the SIP is the weighted inner product).
bool is_hilbert(const Space& space);

struct SipAxiomReport {
  std::size_t samples = 0;
  double linearity_residual = 0.0;     // max |[x+cz,y] - [x,y] - c[z,y]|
  double definiteness_residual = 0.0;  // max |[x,x] - ||x||^2| / ||x||^2
  std::size_t cauchy_schwarz_violations = 0;
  double worst_cauchy_schwarz_excess = 0.0;
};

/// Random complex triples (x, z, y) and complex scalars. A fraction of the
/// y's have exact zeros and near-zero entries to exercise the zero branch.
SipAxiomReport sip_axiom_report(const GridSpace& space, std::size_t sample_count,
                                std::uint64_t seed = 20240611, double cs_tolerance = 1e-10);

/// w with sum_i f_i w_i = [f, g] for every f.
Vector duality_functional(const DiscreteFunction& g, double zero_threshold = 1e-300);

/// Norm of the functional f -> sum_i f_i w_i on the weighted l^p space
/// (Hoelder dual norm).
double dual_norm(const GridSpace& space, std::span<const Complex> w);

}  // namespace semigroup
