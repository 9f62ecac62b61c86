#include "slabmn/closure.hpp"

#include <algorithm>
#include <cmath>

namespace slabmn {

namespace {
constexpr double kExpGuard = 700.0;
} // namespace

Vec HessianMatrix::to_dense() const {
  Vec d(static_cast<std::size_t>(n) * n, 0.0);
  switch (layout) {
  case Layout::dense:
    d = data;
    break;
  case Layout::tridiagonal:
    for (int i = 0; i < n; ++i)
      d[i * n + i] = data[i];
    for (int i = 0; i + 1 < n; ++i) {
      d[i * n + i + 1] = data[n + i];
      d[(i + 1) * n + i] = data[n + i];
    }
    break;
  case Layout::diagonal:
    for (int i = 0; i < n; ++i)
      d[i * n + i] = data[i];
    break;
  case Layout::block2x2:
    for (int j = 0; 2 * j < n; ++j) {
      const double a = data[3 * j], b = data[3 * j + 1], c = data[3 * j + 2];
      d[(2 * j) * n + 2 * j] = a;
      d[(2 * j) * n + 2 * j + 1] = b;
      d[(2 * j + 1) * n + 2 * j] = b;
      d[(2 * j + 1) * n + 2 * j + 1] = c;
    }
    break;
  }
  return d;
}

Vec HessianMatrix::multiply(std::span<const double> x) const {
  Vec y(n, 0.0);
  switch (layout) {
  case Layout::dense:
    for (int i = 0; i < n; ++i)
      y[i] = dot(std::span<const double>(data).subspan(i * n, n), x);
    break;
  case Layout::tridiagonal:
    for (int i = 0; i < n; ++i) {
      double s = data[i] * x[i];
      if (i > 0)
        s += data[n + i - 1] * x[i - 1];
      if (i + 1 < n)
        s += data[n + i] * x[i + 1];
      y[i] = s;
    }
    break;
  case Layout::diagonal:
    for (int i = 0; i < n; ++i)
      y[i] = data[i] * x[i];
    break;
  case Layout::block2x2:
    for (int j = 0; 2 * j < n; ++j) {
      const double a = data[3 * j], b = data[3 * j + 1], c = data[3 * j + 2];
      y[2 * j] = a * x[2 * j] + b * x[2 * j + 1];
      y[2 * j + 1] = b * x[2 * j] + c * x[2 * j + 1];
    }
    break;
  }
  return y;
}

void HessianMatrix::add_scaled(double c, const HessianMatrix& other) {
  if (layout != other.layout || n != other.n)
    throw std::invalid_argument("HessianMatrix::add_scaled: layout mismatch");
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] += c * other.data[i];
}

HessianMatrix::Layout hessian_layout(const MomentBasis& basis) {
  switch (basis.kind()) {
  case BasisKind::full_moment:
    return HessianMatrix::Layout::dense;
  case BasisKind::hat_function:
    return basis.masslumped() ? HessianMatrix::Layout::diagonal
                              : HessianMatrix::Layout::tridiagonal;
  case BasisKind::partial_moment:
    return HessianMatrix::Layout::block2x2;
  }
  return HessianMatrix::Layout::dense;
}

AnsatzEval eval_ansatz(const MomentBasis& basis, std::span<const double> alpha) {
  const std::size_t nq = basis.quadrature().size();
  AnsatzEval e;
  e.log_density.resize(nq);
  e.density.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double p = basis.point_dot(q, alpha);
    if (!(p <= kExpGuard))
      throw NumericFailure("ansatz overflow: alpha.b = " + std::to_string(p));
    e.log_density[q] = p;
    e.density[q] = std::exp(p);
  }
  return e;
}

double ansatz(const MomentBasis& basis, std::span<const double> alpha, double mu) {
  const Vec b = basis.evaluate(mu);
  const double p = dot(alpha, b);
  if (!(p <= kExpGuard))
    throw NumericFailure("ansatz overflow at mu = " + std::to_string(mu));
  return std::exp(p);
}

Vec moments_from(const MomentBasis& basis, const AnsatzEval& eval) {
  const auto& quad = basis.quadrature();
  const int nnz = basis.point_nnz();
  Vec u(basis.size(), 0.0);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double c = quad.weights[q] * eval.density[q];
    const double* v = basis.point_values(q);
    const int s = basis.point_start(q);
    for (int i = 0; i < nnz; ++i)
      u[s + i] += c * v[i];
  }
  return u;
}

Vec moments_of(const MomentBasis& basis, std::span<const double> alpha) {
  return moments_from(basis, eval_ansatz(basis, alpha));
}

HessianMatrix hessian_from(const MomentBasis& basis, const AnsatzEval& eval) {
  const auto& quad = basis.quadrature();
  const int n = basis.size();
  HessianMatrix h;
  h.layout = hessian_layout(basis);
  h.n = n;
  switch (h.layout) {
  case HessianMatrix::Layout::dense: {
    h.data.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const double c = quad.weights[q] * eval.density[q];
      const double* v = basis.point_values(q);
      for (int i = 0; i < n; ++i) {
        const double cv = c * v[i];
        for (int j = i; j < n; ++j)
          h.data[i * n + j] += cv * v[j];
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        h.data[i * n + j] = h.data[j * n + i];
    break;
  }
  case HessianMatrix::Layout::tridiagonal: {
    h.data.assign(2 * n - 1, 0.0);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const double c = quad.weights[q] * eval.density[q];
      const double* v = basis.point_values(q);
      const int s = basis.point_start(q);
      h.data[s] += c * v[0] * v[0];
      h.data[s + 1] += c * v[1] * v[1];
      h.data[n + s] += c * v[0] * v[1];
    }
    break;
  }
  case HessianMatrix::Layout::diagonal: {
    h.data.assign(n, 0.0);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const double c = quad.weights[q] * eval.density[q];
      const double* v = basis.point_values(q);
      const int s = basis.point_start(q);
      h.data[s] += c * v[0] * v[0];
      h.data[s + 1] += c * v[1] * v[1];
    }
    break;
  }
  case HessianMatrix::Layout::block2x2: {
    h.data.assign(3 * (n / 2), 0.0);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const double c = quad.weights[q] * eval.density[q];
      const double mu = quad.points[q];
      const int j = basis.point_start(q) / 2;
      h.data[3 * j] += c;
      h.data[3 * j + 1] += c * mu;
      h.data[3 * j + 2] += c * mu * mu;
    }
    break;
  }
  }
  return h;
}

HessianMatrix hessian(const MomentBasis& basis, std::span<const double> alpha) {
  return hessian_from(basis, eval_ansatz(basis, alpha));
}

Vec dual_gradient(const MomentBasis& basis, std::span<const double> alpha,
                  std::span<const double> u) {
  Vec q = moments_of(basis, alpha);
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] -= u[i];
  return q;
}

double dual_objective_from(const MomentBasis& basis, const AnsatzEval& eval,
                           std::span<const double> alpha, std::span<const double> u) {
  const auto& quad = basis.quadrature();
  double p = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q)
    p += quad.weights[q] * eval.density[q];
  return p - dot(u, alpha);
}

double dual_objective(const MomentBasis& basis, std::span<const double> alpha,
                      std::span<const double> u) {
  return dual_objective_from(basis, eval_ansatz(basis, alpha), alpha, u);
}

Vec flux_jacobian(const MomentBasis& basis, std::span<const double> alpha) {
  const AnsatzEval eval = eval_ansatz(basis, alpha);
  const auto& quad = basis.quadrature();
  const int n = basis.size();
  const int nnz = basis.point_nnz();
  Vec j(static_cast<std::size_t>(n) * n, 0.0);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double c = quad.weights[q] * quad.points[q] * eval.density[q];
    const double* v = basis.point_values(q);
    const int s = basis.point_start(q);
    for (int a = 0; a < nnz; ++a)
      for (int b = 0; b < nnz; ++b)
        j[(s + a) * n + (s + b)] += c * v[a] * v[b];
  }
  return j;
}

Vec half_flux_from(const MomentBasis& basis, const AnsatzEval& eval, FluxSide side) {
  const auto& quad = basis.quadrature();
  const int nnz = basis.point_nnz();
  Vec f(basis.size(), 0.0);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double mu = quad.points[q];
    const double mupm = side == FluxSide::plus ? std::max(mu, 0.0) : std::min(mu, 0.0);
    if (mupm == 0.0)
      continue;
    const double c = quad.weights[q] * mupm * eval.density[q];
    const double* v = basis.point_values(q);
    const int s = basis.point_start(q);
    for (int i = 0; i < nnz; ++i)
      f[s + i] += c * v[i];
  }
  return f;
}

Vec half_flux(const MomentBasis& basis, std::span<const double> alpha, FluxSide side) {
  return half_flux_from(basis, eval_ansatz(basis, alpha), side);
}

HessianMatrix mass_matrix(const MomentBasis& basis) {
  AnsatzEval eval;
  eval.log_density.assign(basis.quadrature().size(), 0.0);
  eval.density.assign(basis.quadrature().size(), 1.0);
  return hessian_from(basis, eval);
}

double cell_entropy_from(const MomentBasis& basis, const AnsatzEval& eval) {
  const auto& quad = basis.quadrature();
  double h = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q)
    h += quad.weights[q] * eval.density[q] * (eval.log_density[q] - 1.0);
  return h;
}

double cell_entropy(const MomentBasis& basis, std::span<const double> alpha) {
  return cell_entropy_from(basis, eval_ansatz(basis, alpha));
}

} // namespace slabmn
