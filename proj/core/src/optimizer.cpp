#include "slabmn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slabmn/linalg.hpp"

namespace slabmn {

namespace {

constexpr double kMinLineSearchStep = 0x1p-30;

// Gradient tolerance from the raw tolerance tau: the full-moment basis and
// the sparse bases use slightly different scalings (the latter carries the
// sqrt(n) factors of the local bases).
double gradient_tolerance(const MomentBasis& basis, double tau, double rho,
                          double uhat_norm) {
  if (basis.kind() == BasisKind::full_moment)
    return tau / ((1.0 + uhat_norm) * rho + tau);
  const double sn = std::sqrt(static_cast<double>(basis.size()));
  return tau / ((1.0 + sn * uhat_norm) * rho + sn * tau);
}

// Realizability stopping test on the density-adjusted candidate
// alpha_tilde: u - (1 - eps_gamma) moments_of(alpha_tilde) must be
// realizable. Hat-function / partial-moment bases test directly; the
// full-moment basis uses the surrogate gate on the Newton direction.
bool realizability_gate(const MomentBasis& basis, std::span<const double> u,
                        const Vec& m_beta, double rho_u, double rho_beta,
                        const Vec& direction, double eps_gamma) {
  if (basis.kind() == BasisKind::full_moment) {
    const double gate =
        std::exp(-(norm1(direction) + std::abs(std::log(rho_beta))));
    return gate > 1.0 - eps_gamma;
  }
  const int n = basis.size();
  const double scale = (1.0 - eps_gamma) * rho_u / rho_beta;
  Vec rest(n);
  for (int i = 0; i < n; ++i)
    rest[i] = u[i] - scale * m_beta[i];
  return basis.is_realizable(rest) == Realizable::yes;
}

Vec density_adjusted(const MomentBasis& basis, const Vec& beta, double rho_u,
                     double rho_beta) {
  Vec alpha = beta;
  const double c = std::log(rho_u / rho_beta);
  const Vec& a1 = basis.unit_multiplier();
  for (int i = 0; i < basis.size(); ++i)
    alpha[i] += c * a1[i];
  return alpha;
}

} // namespace

DualSolveResult solve_dual(const MomentBasis& basis, std::span<const double> u,
                           const OptimizerConfig& config, const Vec* guess) {
  DualSolveResult result;
  const int n = basis.size();
  const double rho_u = basis.density(u);
  if (!(rho_u > 0.0))
    return result;

  // Rescale to unit density; the density is restored exactly at the end.
  Vec uhat(n);
  for (int i = 0; i < n; ++i)
    uhat[i] = u[i] / rho_u;
  const double uhat_norm = norm2(uhat);
  const double tau_bar =
      gradient_tolerance(basis, config.tau, rho_u, uhat_norm);

  Vec beta;
  if (guess) {
    beta = *guess;
    const double c = std::log(rho_u);
    const Vec& a1 = basis.unit_multiplier();
    for (int i = 0; i < n; ++i)
      beta[i] -= c * a1[i];
  } else {
    beta = basis.isotropic_multipliers(1.0);
  }

  try {
    AnsatzEval eval = eval_ansatz(basis, beta);
    for (int iter = 0; iter <= config.max_iterations; ++iter) {
      const Vec m_beta = moments_from(basis, eval);
      const double rho_beta = basis.density(m_beta);
      if (!(rho_beta > 0.0) || !all_finite(m_beta))
        return result;
      Vec grad(n);
      for (int i = 0; i < n; ++i)
        grad[i] = m_beta[i] - uhat[i];
      const double grad_norm = norm2(grad);

      HessianMatrix h = hessian_from(basis, eval);
      Vec rhs(n);
      for (int i = 0; i < n; ++i)
        rhs[i] = -grad[i];
      SpdSolveOutcome dir = spd_solve(h, rhs);
      if (!dir.ok())
        return result;
      const Vec& d = dir.x;

      if (grad_norm < tau_bar &&
          realizability_gate(basis, u, m_beta, rho_u, rho_beta, d,
                             config.eps_gamma)) {
        result.converged = true;
        result.alpha = density_adjusted(basis, beta, rho_u, rho_beta);
        result.iterations = iter;
        return result;
      }
      if (iter == config.max_iterations)
        return result;

      // Backtracking line search on the dual objective.
      const double p0 = dual_objective_from(basis, eval, beta, uhat);
      const double slope = dot(grad, d);
      double zeta = 1.0;
      Vec candidate(n);
      AnsatzEval cand_eval;
      bool accepted = false;
      while (zeta >= kMinLineSearchStep) {
        for (int i = 0; i < n; ++i)
          candidate[i] = beta[i] + zeta * d[i];
        bool evaluated = false;
        try {
          cand_eval = eval_ansatz(basis, candidate);
          evaluated = true;
        } catch (const NumericFailure&) {
          // Overflow: the step is too large, keep shrinking.
        }
        if (evaluated) {
          const double p1 =
              dual_objective_from(basis, cand_eval, candidate, uhat);
          const double armijo_bound = p0 + config.xi * zeta * slope;
          // Near the minimum the predicted decrease underflows the working
          // precision of p0 and the Armijo comparison degenerates to ULP
          // noise; accept the step up to a few ULPs there so the final
          // Newton iterations are not rejected by roundoff.
          const double ulp_slack =
              4.0 * std::numeric_limits<double>::epsilon() * std::abs(p0);
          const bool sufficient =
              p1 < armijo_bound ||
              (armijo_bound == p0 && p1 <= p0 + ulp_slack);
          if (std::isfinite(p1) && sufficient) {
            accepted = true;
            break;
          }
        }
        zeta *= 0.5;
      }
      if (!accepted)
        return result;
      beta = candidate;
      eval = std::move(cand_eval);
      result.iterations = iter + 1;
    }
  } catch (const NumericFailure&) {
    return result;
  }
  return result;
}

SolveReport solve_with_regularization(const MomentBasis& basis,
                                      std::span<const double> u,
                                      const OptimizerConfig& config,
                                      const Vec* guess) {
  SolveReport report;
  DualSolveResult direct = solve_dual(basis, u, config, guess);
  if (direct.converged) {
    report.alpha = std::move(direct.alpha);
    report.iterations = direct.iterations;
    report.regularization_r_used = 0.0;
    return report;
  }
  report.iterations = direct.iterations;

  // A poor warm-start guess can strand the Newton iteration; retry the
  // unregularized problem from the default isotropic start before paying
  // for regularization.
  if (guess) {
    DualSolveResult cold = solve_dual(basis, u, config, nullptr);
    report.iterations += cold.iterations;
    if (cold.converged) {
      report.alpha = std::move(cold.alpha);
      report.regularization_r_used = 0.0;
      return report;
    }
  }

  const int n = basis.size();
  const Vec gu = basis.iso_projection(u);
  for (double r : config.reg_sequence) {
    if (r >= 1.0) {
      report.alpha = basis.isotropic_multipliers(basis.density(u));
      report.regularization_r_used = 1.0;
      return report;
    }
    Vec ur(n);
    for (int i = 0; i < n; ++i)
      ur[i] = (1.0 - r) * u[i] + r * gu[i];
    DualSolveResult attempt = solve_dual(basis, ur, config, guess);
    report.iterations += attempt.iterations;
    if (attempt.converged) {
      report.alpha = std::move(attempt.alpha);
      report.regularization_r_used = r;
      return report;
    }
  }
  // reg_sequence is required to end with 1; guard anyway.
  report.alpha = basis.isotropic_multipliers(basis.density(u));
  report.regularization_r_used = 1.0;
  return report;
}

Vec apply_vacuum_floor(const MomentBasis& basis, std::span<const double> u,
                       double rho_vac) {
  if (basis.density(u) >= rho_vac)
    return Vec(u.begin(), u.end());
  const Vec& iso = basis.isotropic_moment();
  Vec floored(basis.size());
  for (int i = 0; i < basis.size(); ++i)
    floored[i] = iso[i] * rho_vac / 2.0;
  return floored;
}

MomentSolver::MomentSolver(const MomentBasis& basis, OptimizerConfig config,
                           std::size_t n_cells, bool use_cache)
    : basis_(&basis), config_(std::move(config)), use_cache_(use_cache),
      cell_store_(n_cells) {}

SolveReport MomentSolver::solve(std::size_t cell, std::span<const double> u) {
  const Vec* guess = nullptr;
  Vec guess_storage;
  CacheHit hit = CacheHit::miss;

  if (use_cache_) {
    CellEntry& entry = cell_store_[cell];
    if (entry.valid && entry.u.size() == u.size() &&
        std::equal(u.begin(), u.end(), entry.u.begin())) {
      SolveReport report;
      report.alpha = entry.alpha;
      report.iterations = 0;
      report.cache_hit = CacheHit::exact;
      return report;
    }
    // Nearest worker-recent solution in 1-norm as the Newton seed.
    double best = std::numeric_limits<double>::infinity();
    for (const RecentEntry& recent : recent_) {
      double dist = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i)
        dist += std::abs(recent.u[i] - u[i]);
      if (dist < best) {
        best = dist;
        guess_storage = recent.alpha;
      }
    }
    if (std::isfinite(best)) {
      guess = &guess_storage;
      hit = CacheHit::nearest;
    }
  }

  SolveReport report = solve_with_regularization(*basis_, u, config_, guess);
  report.cache_hit = hit;
  if (report.regularization_r_used > 0.0)
    ++regularization_fallbacks_;

  if (use_cache_) {
    CellEntry& entry = cell_store_[cell];
    entry.valid = true;
    entry.u.assign(u.begin(), u.end());
    entry.alpha = report.alpha;
    recent_.push_back(RecentEntry{entry.u, report.alpha});
    while (recent_.size() > static_cast<std::size_t>(config_.cache_capacity))
      recent_.pop_front();
  }
  return report;
}

} // namespace slabmn
