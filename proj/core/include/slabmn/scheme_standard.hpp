#ifndef SLABMN_SCHEME_STANDARD_HPP
#define SLABMN_SCHEME_STANDARD_HPP

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "slabmn/basis.hpp"
#include "slabmn/grid.hpp"
#include "slabmn/optimizer.hpp"
#include "slabmn/problems.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

/// Upwind kinetic flux through an interface with normal n = +1:
/// g = <mu^+ exp(alpha_l . b) b> + <mu^- exp(alpha_r . b) b>.
Vec kinetic_flux_pair(const MomentBasis& basis, std::span<const double> alpha_l,
                      std::span<const double> alpha_r);

/// Exact solution of the isotropic source ODE
/// u' = sigma_s (G u - u) - sigma_a u + q <b> at time t, with the
/// sigma_a -> 0 limit taken analytically below 1e-12.
Vec source_step_analytic(const MomentBasis& basis, std::span<const double> u,
                         double sigma_s, double sigma_a, double q, double t);

/// Realizability-preserving time step (1 - eps_gamma) dx / sqrt(d), d = 1.
double cfl_dt(double dx, double eps_gamma);

struct StandardStats {
  // Smallest moment component seen over all cells and stages (realizability
  // monitor for the hat-function basis).
  double min_component = std::numeric_limits<double>::infinity();
  long regularization_fallbacks = 0;
};

/// The reference splitting scheme: kinetic-flux finite volume in the moment
/// variables, Heun (SSP-RK2) transport steps wrapped in analytic source
/// half-steps (Strang splitting).
class StandardScheme {
public:
  StandardScheme(const MomentBasis& basis, const ProblemSpec& problem, int n_x,
                 OptimizerConfig opt = {}, bool use_cache = true,
                 int threads = 1);

  const Grid& grid() const { return grid_; }
  const Field& state() const { return u_; }
  Field& state() { return u_; }
  double time() const { return t_; }
  const StandardStats& stats() const { return stats_; }
  double cfl() const;

  /// One Strang step: source(dt/2), Heun transport(dt), source(dt/2).
  void strang_step(double dt);

  /// Heun SSP-RK2 transport step without sources.
  void heun_step(double dt);

  /// Analytic source step of length dt on all cells.
  void source_step(double dt);

  /// Runs to tf with constant dt (final step truncated to land on tf).
  /// on_step(t_after, dt_taken, wall_seconds) is called after each step.
  void run(double tf, double dt,
           const std::function<void(double, double, double)>& on_step = {});

  /// L_i = -(g_{i,i+1} - g_{i-1,i}) / dx, flooring the state to the vacuum
  /// density first and solving all cells to multipliers via the cached
  /// Newton optimizer.
  void hyperbolic_rhs(Field& u, Field& rhs);

  /// Multipliers of every cell of a moment field (vacuum-floored).
  Field multipliers_of(Field u);

private:
  void scan_min(const Field& u);
  void solve_cells(Field& u, Field& alpha);

  const MomentBasis* basis_;
  ProblemSpec problem_;
  Grid grid_;
  SourceCoefficients coeffs_;
  BoundaryFlux bflux_;
  OptimizerConfig opt_;
  int threads_ = 1;
  std::vector<MomentSolver> block_solvers_;
  Field u_;
  double t_ = 0.0;
  StandardStats stats_;
  // scratch
  Field alpha_, hf_plus_, hf_minus_, rhs1_, rhs2_, ustar_;
};

} // namespace slabmn

#endif
