#include "slabmn/scheme_transformed.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slabmn/linalg.hpp"
#include "slabmn/scheme_standard.hpp"

namespace slabmn {

namespace {

// Bogacki-Shampine 3(2) tableau: c = (0, 1/2, 3/4, 1), third-order weights
// b_check = (2/9, 1/3, 4/9, 0), embedded weights
// b_tilde = (7/24, 1/4, 1/3, 1/8). FSAL: k4 = f(y_new).
constexpr double kA21 = 0.5;
constexpr double kA32 = 0.75;
constexpr double kB1 = 2.0 / 9.0, kB2 = 1.0 / 3.0, kB3 = 4.0 / 9.0;
constexpr double kBt1 = 7.0 / 24.0, kBt2 = 0.25, kBt3 = 1.0 / 3.0,
                 kBt4 = 0.125;

} // namespace

void hf_clip(Field& alpha, double alpha_min) {
  for (double& v : alpha.data)
    if (v < alpha_min)
      v = alpha_min;
}

TransformedScheme::TransformedScheme(const MomentBasis& basis,
                                     const ProblemSpec& problem, int n_x,
                                     TransformedConfig config,
                                     OptimizerConfig opt, bool use_cache,
                                     int threads)
    : basis_(&basis), problem_(problem),
      grid_(problem.x_left, problem.x_right, n_x),
      coeffs_(sample_coefficients(problem, grid_)),
      bflux_(boundary_fluxes(basis, problem)), config_(config),
      threads_(threads), alpha_(n_x, basis.size()),
      mass_(mass_matrix(basis)), k1_(n_x, basis.size()),
      k2_(n_x, basis.size()), k3_(n_x, basis.size()), k4_(n_x, basis.size()),
      stage_(n_x, basis.size()), next_(n_x, basis.size()),
      embedded_(n_x, basis.size()), relax_scratch_(n_x, basis.size()),
      hf_plus_(n_x, basis.size()), hf_minus_(n_x, basis.size()),
      u_rhs_(n_x, basis.size()) {
  // Initial multipliers: minimum-entropy solves of the projected initial
  // moments.
  Field u0 = project_initial(basis, problem, n_x);
  StandardScheme init(basis, problem, n_x, opt, use_cache, threads);
  Field alpha0 = init.multipliers_of(std::move(u0));
  alpha_ = std::move(alpha0);
  ledger_.push_back(EntropyRecord{0.0, total_entropy(alpha_),
                                  total_entropy(alpha_), 1.0});
}

void TransformedScheme::alpha_update(const Field& alpha, Field& alpha_up,
                                     double* entropy_dot) {
  const int n_x = grid_.n_x;
  const int n = basis_->size();
  std::atomic<int> failed_cell{-1};
  std::vector<HessianMatrix> hess(n_x);
  Field umom(n_x, n);

  auto record_failure = [&](int i) {
    int expected = -1;
    failed_cell.compare_exchange_strong(expected, i);
  };

  try {
  parallel_blocks(block_count(n_x), threads_, [&](int b) {
    const int lo = b * kCellBlockSize;
    const int hi = std::min(n_x, lo + kCellBlockSize);
    for (int i = lo; i < hi; ++i) {
      try {
        const AnsatzEval eval = eval_ansatz(*basis_, alpha.cell(i));
        const Vec u = moments_from(*basis_, eval);
        const Vec plus = half_flux_from(*basis_, eval, FluxSide::plus);
        const Vec minus = half_flux_from(*basis_, eval, FluxSide::minus);
        auto uc = umom.cell(i);
        auto pc = hf_plus_.cell(i);
        auto mc = hf_minus_.cell(i);
        std::copy(u.begin(), u.end(), uc.begin());
        std::copy(plus.begin(), plus.end(), pc.begin());
        std::copy(minus.begin(), minus.end(), mc.begin());
        hess[i] = hessian_from(*basis_, eval);
      } catch (const NumericFailure&) {
        record_failure(i);
        throw;
      }
    }
  });
  } catch (...) {
    last_failed_cell_ = failed_cell.load();
    throw;
  }

  // Flux divergence + source in the moment variables, and the entropy
  // production sum (fixed cell order for reproducibility).
  const double inv_dx = 1.0 / grid_.dx;
  const Vec& iso = basis_->isotropic_moment();
  double edot = 0.0;
  for (int i = 0; i < n_x; ++i) {
    auto uc = umom.cell(i);
    const Vec gu = basis_->iso_projection(uc);
    auto pc = hf_plus_.cell(i);
    auto mc = hf_minus_.cell(i);
    auto out = u_rhs_.cell(i);
    for (int l = 0; l < n; ++l) {
      const double right = pc[l] + (i + 1 < n_x ? hf_minus_.cell(i + 1)[l]
                                                : bflux_.right_in[l]);
      const double left =
          (i > 0 ? hf_plus_.cell(i - 1)[l] : bflux_.left_in[l]) + mc[l];
      const double source = coeffs_.sigma_s[i] * (gu[l] - uc[l]) -
                            coeffs_.sigma_a[i] * uc[l] +
                            coeffs_.q[i] * iso[l];
      out[l] = source - (right - left) * inv_dx;
    }
    if (entropy_dot)
      edot += dot(alpha.cell(i), out);
  }
  if (entropy_dot)
    *entropy_dot = edot;

  try {
  parallel_blocks(block_count(n_x), threads_, [&](int b) {
    const int lo = b * kCellBlockSize;
    const int hi = std::min(n_x, lo + kCellBlockSize);
    for (int i = lo; i < hi; ++i) {
      if (config_.hessian_reg_eps > 0.0)
        hess[i].add_scaled(config_.hessian_reg_eps, mass_);
      Vec rhs(u_rhs_.cell(i).begin(), u_rhs_.cell(i).end());
      SpdSolveOutcome solved = spd_solve(hess[i], rhs);
      if (!solved.ok() || !all_finite(solved.x)) {
        record_failure(i);
        throw NumericFailure("Hessian solve failed");
      }
      auto out = alpha_up.cell(i);
      std::copy(solved.x.begin(), solved.x.end(), out.begin());
    }
  });
  } catch (...) {
    last_failed_cell_ = failed_cell.load();
    throw;
  }
  last_failed_cell_ = failed_cell.load();
}

double TransformedScheme::mixed_error() const {
  // Fixed-dt mode keeps the error estimate only as a safety net against
  // O(1) multiplier jumps; a unit tolerance leaves the nominal step in
  // charge wherever the solution is smooth.
  const double tau = config_.adaptive ? config_.tau_step : 1.0;
  double err = 0.0;
  for (std::size_t j = 0; j < next_.data.size(); ++j) {
    const double a = next_.data[j];
    const double at = embedded_.data[j];
    const double denom = std::max(tau, tau + std::max(a, at) * tau);
    err = std::max(err, std::abs(a - at) / denom);
  }
  return err;
}

double TransformedScheme::bogacki_shampine_step(double dt) {
  const std::size_t sz = alpha_.data.size();
  if (!fsal_valid_) {
    alpha_update(alpha_, k1_, &stage_entropy_dot_[0]);
    fsal_valid_ = true;
  }
  for (std::size_t j = 0; j < sz; ++j)
    stage_.data[j] = alpha_.data[j] + dt * kA21 * k1_.data[j];
  alpha_update(stage_, k2_, &stage_entropy_dot_[1]);
  for (std::size_t j = 0; j < sz; ++j)
    stage_.data[j] = alpha_.data[j] + dt * kA32 * k2_.data[j];
  alpha_update(stage_, k3_, &stage_entropy_dot_[2]);
  for (std::size_t j = 0; j < sz; ++j)
    next_.data[j] =
        alpha_.data[j] +
        dt * (kB1 * k1_.data[j] + kB2 * k2_.data[j] + kB3 * k3_.data[j]);
  alpha_update(next_, k4_, &stage_entropy_dot_[3]);
  for (std::size_t j = 0; j < sz; ++j)
    embedded_.data[j] =
        alpha_.data[j] + dt * (kBt1 * k1_.data[j] + kBt2 * k2_.data[j] +
                               kBt3 * k3_.data[j] + kBt4 * k4_.data[j]);
  if (!all_finite(next_.data) || !all_finite(embedded_.data))
    throw NumericFailure("non-finite Runge-Kutta update");
  return mixed_error();
}

double TransformedScheme::total_entropy(const Field& alpha) const {
  double h = 0.0;
  for (int i = 0; i < alpha.n_x; ++i)
    h += cell_entropy(*basis_, alpha.cell(i));
  return h;
}

Field TransformedScheme::moments(const Field& alpha) const {
  Field u(alpha.n_x, alpha.n);
  for (int i = 0; i < alpha.n_x; ++i) {
    const Vec m = moments_of(*basis_, alpha.cell(i));
    auto cell = u.cell(i);
    std::copy(m.begin(), m.end(), cell.begin());
  }
  return u;
}

double TransformedScheme::find_gamma(double dt, double entropy_before,
                                     double* r_at_gamma) {
  const std::size_t sz = alpha_.data.size();
  // Entropy production estimate accumulated on the fly: the fourth
  // third-order weight is zero, so only three stages contribute.
  const double estimate = kB1 * stage_entropy_dot_[0] +
                          kB2 * stage_entropy_dot_[1] +
                          kB3 * stage_entropy_dot_[2];
  auto r = [&](double gamma) {
    for (std::size_t j = 0; j < sz; ++j)
      relax_scratch_.data[j] =
          alpha_.data[j] + gamma * (next_.data[j] - alpha_.data[j]);
    return total_entropy(relax_scratch_) - entropy_before -
           gamma * dt * estimate;
  };
  try {
    double lo = 0.5, hi = 1.5;
    double r_lo = r(lo), r_hi = r(hi);
    if (r_lo == 0.0) {
      if (r_at_gamma)
        *r_at_gamma = 0.0;
      return lo;
    }
    if (r_hi == 0.0) {
      if (r_at_gamma)
        *r_at_gamma = 0.0;
      return hi;
    }
    if ((r_lo < 0.0) == (r_hi < 0.0)) {
      // r need not be monotone across the bracket; scan interior
      // subintervals for a sign change before falling back to the plain
      // update.
      bool found = false;
      double prev_g = lo, prev_r = r_lo;
      for (int j = 1; j <= 10 && !found; ++j) {
        const double g = 0.5 + 0.1 * j;
        const double rg = (j == 10) ? r_hi : r(g);
        if ((prev_r < 0.0) != (rg < 0.0)) {
          lo = prev_g;
          r_lo = prev_r;
          hi = g;
          r_hi = rg;
          found = true;
        }
        prev_g = g;
        prev_r = rg;
      }
      if (!found) {
        if (r_at_gamma)
          *r_at_gamma = r(1.0);
        return 1.0;
      }
    }
    double mid = 1.0, r_mid = 0.0;
    while (hi - lo > config_.bisection_tol) {
      mid = 0.5 * (lo + hi);
      r_mid = r(mid);
      if (r_mid == 0.0)
        break;
      if ((r_mid < 0.0) == (r_lo < 0.0)) {
        lo = mid;
        r_lo = r_mid;
      } else {
        hi = mid;
      }
    }
    if (r_at_gamma)
      *r_at_gamma = r_mid;
    return mid;
  } catch (const NumericFailure&) {
    if (r_at_gamma)
      *r_at_gamma = 0.0;
    return 1.0;
  }
}

double TransformedScheme::accept_step(double dt) {
  const std::size_t sz = alpha_.data.size();
  const double entropy_before = ledger_.back().entropy;
  const double estimate = kB1 * stage_entropy_dot_[0] +
                          kB2 * stage_entropy_dot_[1] +
                          kB3 * stage_entropy_dot_[2];
  double gamma = 1.0;
  bool state_is_next = true;
  if (config_.relaxed) {
    gamma = find_gamma(dt, entropy_before, nullptr);
    if (gamma != 1.0) {
      for (std::size_t j = 0; j < sz; ++j)
        alpha_.data[j] += gamma * (next_.data[j] - alpha_.data[j]);
      state_is_next = false;
    } else {
      alpha_.data = next_.data;
    }
  } else {
    alpha_.data = next_.data;
  }

  if (config_.hf_clip_enabled && dt < config_.hf_clip_dt_min) {
    const Vec before = alpha_.data;
    hf_clip(alpha_, config_.hf_clip_alpha_min);
    if (alpha_.data != before)
      state_is_next = false;
  }

  t_ += dt;
  const double entropy_after = total_entropy(alpha_);
  ledger_.push_back(EntropyRecord{t_, entropy_after,
                                  entropy_before + gamma * dt * estimate,
                                  gamma});

  // FSAL: k4 = f(next_) doubles as k1 of the following step when the
  // accepted state is exactly next_.
  if (state_is_next) {
    std::swap(k1_.data, k4_.data);
    stage_entropy_dot_[0] = stage_entropy_dot_[3];
    fsal_valid_ = true;
  } else {
    fsal_valid_ = false;
  }
  return gamma;
}

void TransformedScheme::run(
    double tf, const std::function<void(const TransformedStepInfo&)>& on_step) {
  using clock = std::chrono::steady_clock;
  double dt = config_.adaptive ? StepController::dt_initial : config_.fixed_dt;
  if (!(dt > 0.0))
    throw std::invalid_argument("fixed-dt mode needs a positive fixed_dt");

  while (t_ < tf) {
    const auto start = clock::now();
    int retries = 0;
    double err = 0.0;
    double dt_next = dt;
    for (;;) {
      const double attempt_dt = std::min(dt, tf - t_);
      bool failed = false;
      try {
        err = bogacki_shampine_step(attempt_dt);
      } catch (const NumericFailure&) {
        failed = true;
      }
      if (failed) {
        dt *= 0.5;
        ++retries;
        if (dt < config_.dt_abort) {
          std::ostringstream msg;
          msg << "time step underflow (dt = " << dt << ") at t = " << t_;
          if (last_failed_cell_ >= 0)
            msg << ", cell " << last_failed_cell_;
          throw std::runtime_error(msg.str());
        }
        continue;
      }
      if (config_.adaptive) {
        dt_next = StepController::dt_new(attempt_dt, err);
        if (err > 1.0) {
          dt = dt_next;
          ++retries;
          if (dt < config_.dt_abort) {
            std::ostringstream msg;
            msg << "time step underflow (dt = " << dt << ") at t = " << t_;
            throw std::runtime_error(msg.str());
          }
          continue;
        }
      } else {
        // Fixed-dt mode: the controller never adjusts the step, but a step
        // whose error estimate rejects is still halved and retried so a
        // stiff start-up transient cannot poison the state.  Every
        // accepted step resets to the nominal size, so away from
        // rejections the run advances at exactly the requested step.
        if (err > 1.0) {
          dt *= 0.5;
          ++retries;
          if (dt < config_.dt_abort) {
            std::ostringstream msg;
            msg << "time step underflow (dt = " << dt << ") at t = " << t_;
            throw std::runtime_error(msg.str());
          }
          continue;
        }
        dt_next = config_.fixed_dt;
      }
      dt = attempt_dt;
      break;
    }
    const double gamma = accept_step(dt);
    const double wall =
        std::chrono::duration<double>(clock::now() - start).count();
    if (on_step)
      on_step(TransformedStepInfo{t_, dt, err, retries, wall, gamma});
    dt = dt_next;
  }
}

} // namespace slabmn
