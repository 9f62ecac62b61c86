#include "slabmn/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace slabmn {

SourceCoefficients sample_coefficients(const ProblemSpec& problem,
                                       const Grid& grid) {
  SourceCoefficients c;
  c.sigma_s.resize(grid.n_x);
  c.sigma_a.resize(grid.n_x);
  c.q.resize(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i) {
    const double x = grid.center(i);
    c.sigma_s[i] = problem.sigma_s(x);
    c.sigma_a[i] = problem.sigma_a(x);
    c.q[i] = problem.source_q(x);
  }
  return c;
}

BoundaryFlux boundary_fluxes(const MomentBasis& basis,
                             const ProblemSpec& problem) {
  const Quadrature& quad = basis.quadrature();
  const std::size_t nq = quad.points.size();
  const int n = basis.size();

  Vec psi_left(nq), psi_right(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    psi_left[q] = problem.boundary_left(quad.points[q]);
    psi_right[q] = problem.boundary_right(quad.points[q]);
  }
  if (problem.normalize_boundary_left) {
    double norm = 0.0;
    for (std::size_t q = 0; q < nq; ++q)
      norm += quad.weights[q] * psi_left[q];
    for (double& v : psi_left)
      v /= norm;
  }

  BoundaryFlux b;
  b.left_in.assign(n, 0.0);
  b.right_in.assign(n, 0.0);
  for (std::size_t q = 0; q < nq; ++q) {
    const double mu = quad.points[q];
    const double wl = quad.weights[q] * std::max(mu, 0.0) * psi_left[q];
    const double wr = quad.weights[q] * std::min(mu, 0.0) * psi_right[q];
    const double* vals = basis.point_values(q);
    const int start = basis.point_start(q);
    for (int i = 0; i < basis.point_nnz(); ++i) {
      b.left_in[start + i] += wl * vals[i];
      b.right_in[start + i] += wr * vals[i];
    }
  }
  return b;
}

Field project_initial(const MomentBasis& basis, const ProblemSpec& problem,
                      int n_x) {
  Field u(n_x, basis.size());
  const Grid grid(problem.x_left, problem.x_right, n_x);
  const Vec& iso = basis.quad_isotropic_moment();

  for (int i = 0; i < n_x; ++i) {
    double psi = problem.psi_vac;
    if (problem.initial == InitialKind::vacuum_plus_dirac) {
      if (n_x % 2 != 0)
        throw std::invalid_argument(
            "Dirac initial condition needs an even cell count so the pulse "
            "splits into the two cells adjacent to x = 0");
      if (i == n_x / 2 - 1 || i == n_x / 2)
        psi += 1.0 / (2.0 * grid.dx);
    }
    auto cell = u.cell(i);
    for (int l = 0; l < basis.size(); ++l)
      cell[l] = psi * iso[l];
  }
  return u;
}

void parallel_blocks(int n_blocks, int threads,
                     const std::function<void(int)>& fn) {
  if (threads <= 1 || n_blocks <= 1) {
    for (int b = 0; b < n_blocks; ++b)
      fn(b);
    return;
  }
  const int n_workers = std::min(threads, n_blocks);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= n_blocks)
        return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_workers - 1);
  for (int w = 1; w < n_workers; ++w)
    pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool)
    th.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace slabmn
