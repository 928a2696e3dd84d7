// SPDX-License-Identifier: Apache-2.0
#include "feast/contour.hpp"

#include <cmath>
#include <numbers>

#include "feast/errors.hpp"

namespace feast {

void SearchInterval::validate() const {
  if (!(lo < hi)) throw InvalidParams("search interval needs lo < hi");
  if (m_estimate < 1) throw InvalidParams("search interval needs m_estimate >= 1");
}

GaussLegendreRule gauss_legendre(std::size_t m) {
  if (m < 1 || m > 64) throw UnsupportedOrder("Gauss-Legendre order must lie in [1, 64]");
  GaussLegendreRule rule;
  rule.points.resize(m);
  rule.weights.resize(m);
  const double dm = static_cast<double>(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dm + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      dp = dm * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= m; ++k) {
      const double dk = static_cast<double>(k);
      const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
      p0 = p1;
      p1 = p2;
    }
    dp = dm * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    if (2 * i + 1 == m) x = 0.0;
    rule.points[i] = -x;
    rule.points[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  return rule;
}

Contour build_contour(const SearchInterval& iv, std::size_t m, double aspect) {
  if (!(aspect > 0.0 && aspect <= 1.0)) throw InvalidAspect("contour aspect must lie in (0, 1]");
  if (!(iv.lo < iv.hi)) throw InvalidParams("search interval needs lo < hi");
  const auto gl = gauss_legendre(m);
  Contour c;
  c.aspect = aspect;
  c.center = 0.5 * (iv.lo + iv.hi);
  c.radius = 0.5 * (iv.hi - iv.lo);
  c.nodes.resize(m);
  c.weights.resize(m);
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t k = 0; k < m; ++k) {
    const double theta = half_pi * (1.0 + gl.points[k]);
    const double cs = std::cos(theta), sn = std::sin(theta);
    c.nodes[k] = {c.center + c.radius * cs, aspect * c.radius * sn};
    const Complex dz{-c.radius * sn, aspect * c.radius * cs};
    c.weights[k] = gl.weights[k] * half_pi * dz;
  }
  return c;
}

double scalar_filter(const Contour& contour, double lambda) {
  double sum = 0.0;
  for (std::size_t k = 0; k < contour.size(); ++k) {
    const Complex d = contour.nodes[k] - lambda;
    if (std::abs(d) < 1e-14) throw PoleOnContour("filter evaluated at a quadrature node");
    sum += (contour.weights[k] / d).imag();
  }
  // Upper-half term w/(z-l) minus its mirror conj(w)/(conj(z)-l), over 2 pi i.
  return sum / std::numbers::pi;
}

}  // namespace feast
