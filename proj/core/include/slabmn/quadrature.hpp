#ifndef SLABMN_QUADRATURE_HPP
#define SLABMN_QUADRATURE_HPP

#include <utility>

#include "slabmn/types.hpp"

namespace slabmn {

/// Composite quadrature on [-1,1]. Points belonging to different partition
/// intervals are kept separate (interface nodes are duplicated, once per
/// adjacent interval) so per-interval and half-range integrals are exact
/// sub-sums of the full rule.
struct Quadrature {
  Vec points;
  Vec weights;
  std::vector<int> interval; // partition interval each point belongs to

  std::size_t size() const { return points.size(); }

  double integrate_constant(double c) const {
    double s = 0.0;
    for (double w : weights)
      s += w;
    return s * c;
  }
};

/// Gauss-Lobatto rule with npoints >= 2 points on [-1,1] (endpoints included,
/// exact for polynomials of degree <= 2*npoints - 3).
std::pair<Vec, Vec> gauss_lobatto_nodes(int npoints);

/// Number of Gauss-Lobatto points needed for degree-of-exactness `order`.
int gauss_lobatto_npoints(int order);

/// Composite Gauss-Lobatto rule of the given order on each interval of the
/// partition (ascending breakpoints, first = -1, last = 1).
Quadrature composite_gauss_lobatto(const Vec& partition, int order);

/// One merged point per partition node with trapezoid weights. Used for
/// masslumped hat-function runs; diagonalizes the hat-function Hessian.
Quadrature nodal_quadrature_for_partition(const Vec& partition);

} // namespace slabmn

#endif
