// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "feast/dense.hpp"

namespace feast {

/// Real search interval [lo, hi] and the subspace size M~.
struct SearchInterval {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t m_estimate = 1;

  /// Throws InvalidParams unless lo < hi and m_estimate >= 1.
  void validate() const;
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct GaussLegendreRule {
  std::vector<double> points;   // ascending on (-1, 1)
  std::vector<double> weights;
};

/// m-point rule, 1 <= m <= 64. Throws UnsupportedOrder otherwise.
GaussLegendreRule gauss_legendre(std::size_t m);

/// Quadrature nodes on the upper half of an ellipse around the interval.
/// The lower half is implied by conjugate symmetry.
struct Contour {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  bool half_contour = true;
  double aspect = 1.0;
  double center = 0.0;
  double radius = 1.0;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Ellipse with centre (lo+hi)/2, semi-axes r = (hi-lo)/2 and aspect*r.
/// Throws InvalidAspect unless 0 < aspect <= 1, UnsupportedOrder for bad m.
Contour build_contour(const SearchInterval& iv, std::size_t m = 8, double aspect = 1.0);

/// Quadrature value of (1/2 pi i) \oint dz / (z - lambda) over the full
/// curve: ~1 inside, ~0 outside. Throws PoleOnContour when lambda is within
/// 1e-14 of a node.
double scalar_filter(const Contour& contour, double lambda);

}  // namespace feast
