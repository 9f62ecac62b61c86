#ifndef SLABMN_GRID_HPP
#define SLABMN_GRID_HPP

#include <functional>
#include <span>
#include <vector>

#include "slabmn/basis.hpp"
#include "slabmn/problems.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

/// Uniform 1D spatial grid on [x_left, x_right].
struct Grid {
  int n_x = 0;
  double x_left = 0.0;
  double dx = 0.0;

  Grid() = default;
  Grid(double xl, double xr, int nx)
      : n_x(nx), x_left(xl), dx((xr - xl) / nx) {}

  double center(int i) const { return x_left + (i + 0.5) * dx; }
};

/// Per-cell coefficient vector field: n_x cells with n components each.
struct Field {
  int n_x = 0;
  int n = 0;
  Vec data;

  Field() = default;
  Field(int nx, int ncomp) : n_x(nx), n(ncomp), data(std::size_t(nx) * ncomp) {}

  std::span<double> cell(int i) {
    return {data.data() + std::size_t(i) * n, std::size_t(n)};
  }
  std::span<const double> cell(int i) const {
    return {data.data() + std::size_t(i) * n, std::size_t(n)};
  }
};

/// Piecewise-constant material coefficients sampled at cell centers
/// (midpoint rule).
struct SourceCoefficients {
  Vec sigma_s;
  Vec sigma_a;
  Vec q;
};

SourceCoefficients sample_coefficients(const ProblemSpec& problem,
                                       const Grid& grid);

/// Precomputed inflow half-fluxes of the boundary kinetic densities:
/// left_in = <mu^+ psi_b_left b>, right_in = <mu^- psi_b_right b>.
struct BoundaryFlux {
  Vec left_in;
  Vec right_in;
};

BoundaryFlux boundary_fluxes(const MomentBasis& basis,
                             const ProblemSpec& problem);

/// Initial moments: isotropic kinetic density (vacuum, plus the two-cell
/// split Dirac pulse for the plane-source problem) integrated with the
/// basis quadrature so the moments are numerically realizable.
/// Throws std::invalid_argument for a Dirac initial condition with odd n_x.
Field project_initial(const MomentBasis& basis, const ProblemSpec& problem,
                      int n_x);

/// Runs fn(block_index) for block_index in [0, n_blocks) on up to `threads`
/// workers. Blocks write disjoint data; the first exception thrown by any
/// block is rethrown on the calling thread.
void parallel_blocks(int n_blocks, int threads,
                     const std::function<void(int)>& fn);

inline constexpr int kCellBlockSize = 32;

inline int block_count(int n_x) {
  return (n_x + kCellBlockSize - 1) / kCellBlockSize;
}

} // namespace slabmn

#endif
