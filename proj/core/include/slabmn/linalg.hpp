#ifndef SLABMN_LINALG_HPP
#define SLABMN_LINALG_HPP

#include "slabmn/closure.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

enum class SolveStatus { ok, not_positive_definite, numerically_singular };

struct SpdSolveOutcome {
  SolveStatus status = SolveStatus::ok;
  Vec x;
  bool ok() const { return status == SolveStatus::ok; }
};

// Pivots <= 0 mean not positive definite; positive pivots at or below this
// threshold are treated as numerically singular so callers can fall back to
// regularization or time-step halving instead of dividing by ~0.
inline constexpr double kPivotFloor = 1e-300;

/// Solve H x = rhs for dense symmetric H (row-major n x n) via Cholesky.
SpdSolveOutcome cholesky_solve_dense(const Vec& h, int n, const Vec& rhs);

/// Lower-triangular factor H = L L^T, dense storage. status != ok on pivot
/// failure.
struct FactorOutcome {
  SolveStatus status = SolveStatus::ok;
  Vec l; // row-major lower triangle (upper part zero)
  bool ok() const { return status == SolveStatus::ok; }
};
FactorOutcome cholesky_factor_dense(const Vec& h, int n);

/// Solve with the factor from cholesky_factor_dense.
Vec cholesky_solve_factored(const Vec& l, int n, const Vec& rhs);

/// O(n) LDL^T solve for symmetric tridiagonal H (diag size n, off size n-1).
SpdSolveOutcome cholesky_solve_tridiagonal(const Vec& diag, const Vec& off,
                                           const Vec& rhs);

/// Per-block 2x2 Cholesky solve; blocks stored as (a, b, c) triples.
SpdSolveOutcome cholesky_solve_blocks(const Vec& blocks, const Vec& rhs);

/// Dispatch on the Hessian storage format.
SpdSolveOutcome spd_solve(const HessianMatrix& h, const Vec& rhs);

} // namespace slabmn

#endif
