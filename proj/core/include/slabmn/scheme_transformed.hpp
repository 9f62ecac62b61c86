#ifndef SLABMN_SCHEME_TRANSFORMED_HPP
#define SLABMN_SCHEME_TRANSFORMED_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "slabmn/basis.hpp"
#include "slabmn/closure.hpp"
#include "slabmn/grid.hpp"
#include "slabmn/optimizer.hpp"
#include "slabmn/problems.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

/// Adaptive step-size controller for the embedded Runge-Kutta pair.
struct StepController {
  double dt = 1e-15;
  static constexpr double dt_initial = 1e-15;
  static constexpr double safety = 0.8;
  static constexpr double clamp_lo = 0.2;
  static constexpr double clamp_hi = 5.0;
  static constexpr int q = 2; // order of the embedded lower-order method

  static double dt_new(double dt, double err) {
    const double factor =
        std::min(std::max(safety * std::pow(1.0 / err, 1.0 / (q + 1)),
                          clamp_lo),
                 clamp_hi);
    return dt * factor;
  }
};

struct TransformedConfig {
  double tau_step = 1e-3;      // tau_abs = tau_rel = tau_step
  double hessian_reg_eps = 0.0;
  bool hf_clip_enabled = false;
  double hf_clip_dt_min = 0.01;
  double hf_clip_alpha_min = -1000.0;
  bool relaxed = false;
  double bisection_tol = 1e-12;
  bool adaptive = true;        // false: fixed-dt mode (error test disabled)
  double fixed_dt = 0.0;       // used when adaptive == false
  double dt_abort = 1e-18;     // dt underflow abort threshold
};

struct EntropyRecord {
  double t = 0.0;
  double entropy = 0.0;      // H(alpha) after the step
  double entropy_est = 0.0;  // predicted H via the discrete entropy law
  double gamma = 1.0;        // relaxation factor (1 when unrelaxed)
};

struct TransformedStepInfo {
  double t = 0.0;           // time after the step
  double dt = 0.0;          // accepted step size
  double err = 0.0;         // mixed error estimate of the accepted step
  int retries = 0;          // rejected attempts (error or failure)
  double wall_seconds = 0.0;
  double gamma = 1.0;
};

/// Clamps every multiplier component below alpha_min up to alpha_min.
void hf_clip(Field& alpha, double alpha_min);

/// The transformed scheme: evolves the multipliers directly with per-cell
/// Hessian solves, Bogacki-Shampine 3(2) adaptive stepping with
/// failure-retry, optional isotropic Hessian regularization and
/// hat-function clipping, and the relaxed (entropy-stable) mode.
class TransformedScheme {
public:
  TransformedScheme(const MomentBasis& basis, const ProblemSpec& problem,
                    int n_x, TransformedConfig config,
                    OptimizerConfig opt = {}, bool use_cache = true,
                    int threads = 1);

  const Grid& grid() const { return grid_; }
  const Field& state() const { return alpha_; }
  Field& state() { return alpha_; }
  double time() const { return t_; }
  /// Cell whose stage evaluation caused the most recent NumericFailure,
  /// or -1.
  int last_failed_cell() const { return last_failed_cell_; }
  const std::vector<EntropyRecord>& entropy_ledger() const { return ledger_; }

  /// alpha_up_i = H(alpha_i)^{-1} (s_i - flux_divergence_i); with
  /// hessian_reg_eps > 0, H is replaced by H + eps M. If entropy_dot is
  /// non-null it receives sum_i alpha_i . u_rhs_i (the entropy production
  /// of this stage). Throws NumericFailure on overflow or solver failure.
  void alpha_update(const Field& alpha, Field& alpha_up,
                    double* entropy_dot = nullptr);

  /// One embedded Bogacki-Shampine attempt of size dt from the current
  /// state into next_; returns the mixed error estimate. Throws
  /// NumericFailure on stage failure.
  double bogacki_shampine_step(double dt);

  /// Accepts the attempt computed by bogacki_shampine_step: applies the
  /// relaxation (if enabled), hat-clipping, updates state/time/ledger.
  /// Returns the relaxation factor gamma.
  double accept_step(double dt);

  /// Runs to problem tf per the adaptive algorithm (or fixed-dt mode).
  /// Throws std::runtime_error on dt underflow below dt_abort.
  void run(double tf,
           const std::function<void(const TransformedStepInfo&)>& on_step = {});

  /// Total entropy sum_i <eta(exp(alpha_i . b))> of a multiplier field.
  double total_entropy(const Field& alpha) const;

  /// Moments of every cell.
  Field moments(const Field& alpha) const;

  const TransformedConfig& config() const { return config_; }

private:
  double mixed_error() const;
  double find_gamma(double dt, double entropy_before, double* r_at_gamma);

  const MomentBasis* basis_;
  ProblemSpec problem_;
  Grid grid_;
  SourceCoefficients coeffs_;
  BoundaryFlux bflux_;
  TransformedConfig config_;
  int threads_ = 1;
  Field alpha_;
  double t_ = 0.0;
  std::vector<EntropyRecord> ledger_;
  HessianMatrix mass_;
  bool fsal_valid_ = false;
  int last_failed_cell_ = -1;

  // scratch: stages and intermediate states
  Field k1_, k2_, k3_, k4_, stage_, next_, embedded_, relax_scratch_;
  Field hf_plus_, hf_minus_, u_rhs_;
  double stage_entropy_dot_[4] = {0, 0, 0, 0};
};

} // namespace slabmn

#endif
