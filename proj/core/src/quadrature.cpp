#include "slabmn/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace slabmn {

namespace {

// Legendre P_l(x) and derivative via the three-term recurrence.
void legendre_with_derivative(int l, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (l == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 1; k < l; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // (1-x^2) P_l' = l (P_{l-1} - x P_l)
  const double om = 1.0 - x * x;
  dp = om > 0.0 ? l * (p0 - x * p1) / om : 0.0;
}

} // namespace

int gauss_lobatto_npoints(int order) {
  const int m = (order + 3 + 1) / 2; // ceil((order+3)/2)
  return std::max(m, 2);
}

std::pair<Vec, Vec> gauss_lobatto_nodes(int npoints) {
  const int m = npoints;
  if (m < 2)
    throw std::invalid_argument("gauss_lobatto_nodes: need at least 2 points");
  Vec x(m), w(m);
  const int l = m - 1; // interior nodes are roots of P_l'
  x[0] = -1.0;
  x[m - 1] = 1.0;
  for (int i = 1; i < m - 1; ++i) {
    // cosine initial guess, then Newton on P_l'(x) = 0
    double xi = std::cos(M_PI * (m - 1 - i) / l);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre_with_derivative(l, xi, p, dp);
      // P_l'' from the Legendre ODE: (1-x^2) y'' = 2x y' - l(l+1) y
      const double d2p = (2.0 * xi * dp - l * (l + 1) * p) / (1.0 - xi * xi);
      const double step = dp / d2p;
      xi -= step;
      if (std::abs(step) < 1e-14)
        break;
    }
    x[i] = xi;
  }
  std::sort(x.begin(), x.end());
  for (int i = 0; i < m; ++i) {
    double p, dp;
    legendre_with_derivative(l, x[i], p, dp);
    w[i] = 2.0 / (m * l * p * p);
  }
  return {x, w};
}

Quadrature composite_gauss_lobatto(const Vec& partition, int order) {
  const auto [xr, wr] = gauss_lobatto_nodes(gauss_lobatto_npoints(order));
  Quadrature q;
  const int k = static_cast<int>(partition.size()) - 1;
  q.points.reserve(xr.size() * k);
  q.weights.reserve(xr.size() * k);
  q.interval.reserve(xr.size() * k);
  for (int j = 0; j < k; ++j) {
    const double a = partition[j], b = partition[j + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < xr.size(); ++i) {
      q.points.push_back(mid + half * xr[i]);
      q.weights.push_back(half * wr[i]);
      q.interval.push_back(j);
    }
  }
  return q;
}

Quadrature nodal_quadrature_for_partition(const Vec& partition) {
  const int nv = static_cast<int>(partition.size());
  Quadrature q;
  q.points = partition;
  q.weights.assign(nv, 0.0);
  q.interval.resize(nv);
  for (int i = 0; i < nv; ++i) {
    if (i > 0)
      q.weights[i] += 0.5 * (partition[i] - partition[i - 1]);
    if (i < nv - 1)
      q.weights[i] += 0.5 * (partition[i + 1] - partition[i]);
    q.interval[i] = std::min(i, nv - 2);
  }
  return q;
}

} // namespace slabmn
