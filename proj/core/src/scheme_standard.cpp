#include "slabmn/scheme_standard.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "slabmn/closure.hpp"

namespace slabmn {

Vec kinetic_flux_pair(const MomentBasis& basis, std::span<const double> alpha_l,
                      std::span<const double> alpha_r) {
  Vec g = half_flux(basis, alpha_l, FluxSide::plus);
  const Vec gm = half_flux(basis, alpha_r, FluxSide::minus);
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] += gm[i];
  return g;
}

Vec source_step_analytic(const MomentBasis& basis, std::span<const double> u,
                         double sigma_s, double sigma_a, double q, double t) {
  const int n = basis.size();
  const Vec gu = basis.iso_projection(u);
  const double decay_a = std::exp(-sigma_a * t);
  const double decay_s = std::exp(-sigma_s * t);
  const double source_factor =
      sigma_a < 1e-12 ? t : (1.0 - decay_a) / sigma_a;
  const Vec& iso = basis.isotropic_moment();
  Vec out(n);
  for (int i = 0; i < n; ++i)
    out[i] = decay_a * (decay_s * u[i] + (1.0 - decay_s) * gu[i]) +
             source_factor * iso[i] * q;
  return out;
}

double cfl_dt(double dx, double eps_gamma) { return (1.0 - eps_gamma) * dx; }

StandardScheme::StandardScheme(const MomentBasis& basis,
                               const ProblemSpec& problem, int n_x,
                               OptimizerConfig opt, bool use_cache, int threads)
    : basis_(&basis), problem_(problem),
      grid_(problem.x_left, problem.x_right, n_x),
      coeffs_(sample_coefficients(problem, grid_)),
      bflux_(boundary_fluxes(basis, problem)), opt_(std::move(opt)),
      threads_(threads), u_(project_initial(basis, problem, n_x)),
      alpha_(n_x, basis.size()), hf_plus_(n_x, basis.size()),
      hf_minus_(n_x, basis.size()), rhs1_(n_x, basis.size()),
      rhs2_(n_x, basis.size()), ustar_(n_x, basis.size()) {
  const int nb = block_count(n_x);
  block_solvers_.reserve(nb);
  for (int b = 0; b < nb; ++b) {
    const int lo = b * kCellBlockSize;
    const int hi = std::min(n_x, lo + kCellBlockSize);
    block_solvers_.emplace_back(basis, opt_, std::size_t(hi - lo), use_cache);
  }
  scan_min(u_);
}

double StandardScheme::cfl() const { return cfl_dt(grid_.dx, opt_.eps_gamma); }

void StandardScheme::scan_min(const Field& u) {
  for (double v : u.data)
    stats_.min_component = std::min(stats_.min_component, v);
}

void StandardScheme::solve_cells(Field& u, Field& alpha) {
  const int n_x = grid_.n_x;
  parallel_blocks(block_count(n_x), threads_, [&](int b) {
    const int lo = b * kCellBlockSize;
    const int hi = std::min(n_x, lo + kCellBlockSize);
    MomentSolver& solver = block_solvers_[b];
    for (int i = lo; i < hi; ++i) {
      auto ucell = u.cell(i);
      const Vec floored = apply_vacuum_floor(*basis_, ucell, opt_.rho_vac);
      std::copy(floored.begin(), floored.end(), ucell.begin());
      SolveReport report = solver.solve(std::size_t(i - lo), ucell);
      auto acell = alpha.cell(i);
      std::copy(report.alpha.begin(), report.alpha.end(), acell.begin());
    }
  });
  stats_.regularization_fallbacks = 0;
  for (const MomentSolver& solver : block_solvers_)
    stats_.regularization_fallbacks += solver.regularization_fallbacks();
}

void StandardScheme::hyperbolic_rhs(Field& u, Field& rhs) {
  const int n_x = grid_.n_x;
  const int n = basis_->size();
  scan_min(u);
  solve_cells(u, alpha_);

  parallel_blocks(block_count(n_x), threads_, [&](int b) {
    const int lo = b * kCellBlockSize;
    const int hi = std::min(n_x, lo + kCellBlockSize);
    for (int i = lo; i < hi; ++i) {
      const AnsatzEval eval = eval_ansatz(*basis_, alpha_.cell(i));
      const Vec plus = half_flux_from(*basis_, eval, FluxSide::plus);
      const Vec minus = half_flux_from(*basis_, eval, FluxSide::minus);
      auto pc = hf_plus_.cell(i);
      auto mc = hf_minus_.cell(i);
      std::copy(plus.begin(), plus.end(), pc.begin());
      std::copy(minus.begin(), minus.end(), mc.begin());
    }
  });

  const double inv_dx = 1.0 / grid_.dx;
  for (int i = 0; i < n_x; ++i) {
    auto out = rhs.cell(i);
    auto pc = hf_plus_.cell(i);
    auto mc = hf_minus_.cell(i);
    for (int l = 0; l < n; ++l) {
      // g_{i,i+1} = plus_i + minus_{i+1}; boundary ansatz replaced by psi_b.
      const double right = pc[l] + (i + 1 < n_x ? hf_minus_.cell(i + 1)[l]
                                                : bflux_.right_in[l]);
      const double left =
          (i > 0 ? hf_plus_.cell(i - 1)[l] : bflux_.left_in[l]) + mc[l];
      out[l] = -(right - left) * inv_dx;
    }
  }
}

void StandardScheme::heun_step(double dt) {
  const std::size_t sz = u_.data.size();
  hyperbolic_rhs(u_, rhs1_);
  for (std::size_t j = 0; j < sz; ++j)
    ustar_.data[j] = u_.data[j] + dt * rhs1_.data[j];
  scan_min(ustar_);
  hyperbolic_rhs(ustar_, rhs2_);
  for (std::size_t j = 0; j < sz; ++j)
    u_.data[j] =
        0.5 * u_.data[j] + 0.5 * (ustar_.data[j] + dt * rhs2_.data[j]);
  scan_min(u_);
}

void StandardScheme::source_step(double dt) {
  for (int i = 0; i < grid_.n_x; ++i) {
    auto cell = u_.cell(i);
    const Vec next = source_step_analytic(*basis_, cell, coeffs_.sigma_s[i],
                                          coeffs_.sigma_a[i], coeffs_.q[i], dt);
    std::copy(next.begin(), next.end(), cell.begin());
  }
  scan_min(u_);
}

void StandardScheme::strang_step(double dt) {
  source_step(0.5 * dt);
  heun_step(dt);
  source_step(0.5 * dt);
  t_ += dt;
}

void StandardScheme::run(
    double tf, double dt,
    const std::function<void(double, double, double)>& on_step) {
  using clock = std::chrono::steady_clock;
  while (t_ < tf) {
    const double step_dt = std::min(dt, tf - t_);
    const auto start = clock::now();
    strang_step(step_dt);
    const double wall =
        std::chrono::duration<double>(clock::now() - start).count();
    if (on_step)
      on_step(t_, step_dt, wall);
    if (step_dt < dt)
      break;
  }
}

Field StandardScheme::multipliers_of(Field u) {
  Field alpha(u.n_x, u.n);
  solve_cells(u, alpha);
  return alpha;
}

} // namespace slabmn
