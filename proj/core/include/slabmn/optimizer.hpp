#ifndef SLABMN_OPTIMIZER_HPP
#define SLABMN_OPTIMIZER_HPP

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "slabmn/basis.hpp"
#include "slabmn/closure.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

struct OptimizerConfig {
  double tau = 1e-9;         // gradient tolerance
  double eps_gamma = 0.1;    // realizability safety factor
  double xi = 1e-3;          // line-search slope factor
  int max_iterations = 200;
  std::vector<double> reg_sequence = {1e-8, 1e-6, 1e-4, 1e-3,
                                      0.01, 0.05, 0.1,  0.5, 1.0};
  double rho_vac = 1e-6;     // vacuum density floor
  int cache_capacity = 64;   // worker-recent cache size
};

enum class CacheHit { exact, nearest, miss };

struct SolveReport {
  Vec alpha;
  int iterations = 0;
  double regularization_r_used = 0.0;
  CacheHit cache_hit = CacheHit::miss;
};

struct DualSolveResult {
  bool converged = false;
  Vec alpha;
  int iterations = 0;
};

/// Newton solve of the dual problem: returns alpha with moments_of(alpha)
/// close to u and the density reproduced exactly up to one log/exp round
/// trip. Non-convergence (iteration budget, line-search stall, solver or
/// overflow failure) is reported via converged = false; the caller is
/// expected to fall back to solve_with_regularization.
DualSolveResult solve_dual(const MomentBasis& basis, std::span<const double> u,
                           const OptimizerConfig& config,
                           const Vec* guess = nullptr);

/// Total version of solve_dual: on failure retries with the regularized
/// moments u_r = (1-r) u + r G u for r ascending through reg_sequence.
/// r = 1 is isotropic and has closed-form multipliers, so this never fails.
SolveReport solve_with_regularization(const MomentBasis& basis,
                                      std::span<const double> u,
                                      const OptimizerConfig& config,
                                      const Vec* guess = nullptr);

/// If rho(u) < rho_vac, replace u by the isotropic moment with density
/// rho_vac; otherwise return u unchanged.
Vec apply_vacuum_floor(const MomentBasis& basis, std::span<const double> u,
                       double rho_vac);

/// Per-worker solver facade combining the per-cell exact cache and the
/// worker-recent nearest-neighbour (1-norm) guess cache. Each worker owns
/// one instance; cells handled by a worker are written by that worker only.
class MomentSolver {
public:
  MomentSolver(const MomentBasis& basis, OptimizerConfig config,
               std::size_t n_cells, bool use_cache = true);

  /// Solves alpha_hat(u) for the given cell, consulting the caches.
  SolveReport solve(std::size_t cell, std::span<const double> u);

  /// Number of solves that needed a regularization fallback (r > 0).
  long regularization_fallbacks() const { return regularization_fallbacks_; }

  const OptimizerConfig& config() const { return config_; }

private:
  struct CellEntry {
    bool valid = false;
    Vec u;
    Vec alpha;
  };
  struct RecentEntry {
    Vec u;
    Vec alpha;
  };

  const MomentBasis* basis_;
  OptimizerConfig config_;
  bool use_cache_;
  std::vector<CellEntry> cell_store_;
  std::deque<RecentEntry> recent_;
  long regularization_fallbacks_ = 0;
};

} // namespace slabmn

#endif
