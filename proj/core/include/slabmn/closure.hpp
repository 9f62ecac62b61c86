#ifndef SLABMN_CLOSURE_HPP
#define SLABMN_CLOSURE_HPP

#include <span>

#include "slabmn/basis.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

/// Symmetric positive definite Hessian <b b^T exp(alpha.b)> in the storage
/// format dictated by the basis kind and quadrature.
struct HessianMatrix {
  enum class Layout { dense, tridiagonal, diagonal, block2x2 };

  Layout layout{};
  int n = 0;
  // dense:       n*n row-major
  // tridiagonal: diag[0..n-1], then off[0..n-2]
  // diagonal:    n entries
  // block2x2:    (a, b, c) per block [[a,b],[b,c]], 3*(n/2) entries
  Vec data;

  Vec to_dense() const;
  Vec multiply(std::span<const double> x) const;
  /// this += c * other (same layout and size)
  void add_scaled(double c, const HessianMatrix& other);
};

HessianMatrix::Layout hessian_layout(const MomentBasis& basis);

/// exp(alpha.b) and alpha.b at every quadrature point. Throws NumericFailure
/// if any exponent exceeds the overflow guard (700).
struct AnsatzEval {
  Vec log_density; // alpha.b per point
  Vec density;     // exp(alpha.b) per point
};

AnsatzEval eval_ansatz(const MomentBasis& basis, std::span<const double> alpha);

/// psi_hat(mu) = exp(alpha.b(mu)), single angle.
double ansatz(const MomentBasis& basis, std::span<const double> alpha, double mu);

/// u = <b exp(alpha.b)>
Vec moments_of(const MomentBasis& basis, std::span<const double> alpha);
Vec moments_from(const MomentBasis& basis, const AnsatzEval& eval);

/// H = <b b^T exp(alpha.b)>
HessianMatrix hessian(const MomentBasis& basis, std::span<const double> alpha);
HessianMatrix hessian_from(const MomentBasis& basis, const AnsatzEval& eval);

/// q = moments_of(alpha) - u, the gradient of the dual objective.
Vec dual_gradient(const MomentBasis& basis, std::span<const double> alpha,
                  std::span<const double> u);

/// p = <exp(alpha.b)> - u.alpha
double dual_objective(const MomentBasis& basis, std::span<const double> alpha,
                      std::span<const double> u);
double dual_objective_from(const MomentBasis& basis, const AnsatzEval& eval,
                           std::span<const double> alpha, std::span<const double> u);

/// J = <mu b b^T exp(alpha.b)>, dense n x n.
Vec flux_jacobian(const MomentBasis& basis, std::span<const double> alpha);

enum class FluxSide { plus, minus };

/// <mu^{+/-} exp(alpha.b) b>
Vec half_flux(const MomentBasis& basis, std::span<const double> alpha, FluxSide side);
Vec half_flux_from(const MomentBasis& basis, const AnsatzEval& eval, FluxSide side);

/// M = <b b^T> = hessian at alpha = 0.
HessianMatrix mass_matrix(const MomentBasis& basis);

/// <eta(exp(p))> = <exp(p)(p - 1)> with p = alpha.b (Maxwell-Boltzmann).
double cell_entropy(const MomentBasis& basis, std::span<const double> alpha);
double cell_entropy_from(const MomentBasis& basis, const AnsatzEval& eval);

} // namespace slabmn

#endif
