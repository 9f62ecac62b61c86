#ifndef SLABMN_BASIS_HPP
#define SLABMN_BASIS_HPP

#include <span>
#include <string>

#include "slabmn/quadrature.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

enum class BasisKind { full_moment, hat_function, partial_moment };

enum class Realizable { yes, no, unsupported };

/// One of the three 1D angular moment bases on V = [-1,1] with its attached
/// quadrature. Immutable after construction; all queries are const and safe
/// for concurrent use.
///
/// - full_moment:    unnormalized Legendre polynomials P_0..P_N, n = N+1
/// - hat_function:   continuous piecewise linear hats on a uniform partition,
///                   n = k+1 nodes
/// - partial_moment: piecewise (1, mu) on a uniform partition, n = 2k
class MomentBasis {
public:
  static MomentBasis full_moment(int order);
  static MomentBasis hat_function(int n_moments, bool masslumping = false);
  static MomentBasis partial_moment(int n_moments);

  /// Parses the CLI names m<N>, hfm<n>, pmm<n>.
  static MomentBasis parse(const std::string& name, bool masslumping = false);

  BasisKind kind() const { return kind_; }
  int size() const { return n_; }
  const std::string& name() const { return name_; }
  bool masslumped() const { return masslumped_; }
  const Vec& partition() const { return partition_; }
  const Quadrature& quadrature() const { return quad_; }

  /// b(mu). Throws std::domain_error for mu outside [-1,1].
  Vec evaluate(double mu) const;

  /// alpha^1 with alpha^1 . b == 1.
  const Vec& unit_multiplier() const { return unit_multiplier_; }

  /// <b>, exact angular integral of each basis function.
  const Vec& isotropic_moment() const { return isotropic_moment_; }

  /// <b> evaluated with the attached quadrature (numerically realizable).
  const Vec& quad_isotropic_moment() const { return quad_isotropic_moment_; }

  /// rho = alpha^1 . u
  double density(std::span<const double> u) const {
    return dot(unit_multiplier_, u);
  }

  /// G u = <b> rho(u) / |V|, the isotropic moment with the same density.
  Vec iso_projection(std::span<const double> u) const;

  Realizable is_realizable(std::span<const double> u) const;

  /// log(rho/2) alpha^1 (Maxwell-Boltzmann). Throws std::domain_error for
  /// rho <= 0.
  Vec isotropic_multipliers(double rho) const;

  // Cached basis values at the quadrature points. Each point carries
  // point_nnz() contiguous nonzero entries starting at basis index
  // point_start(q); full-moment rows are dense (nnz = n).
  int point_nnz() const { return pt_nnz_; }
  int point_start(std::size_t q) const { return pt_start_[q]; }
  const double* point_values(std::size_t q) const {
    return pt_vals_.data() + q * pt_nnz_;
  }

  /// alpha . b at quadrature point q using the cached values.
  double point_dot(std::size_t q, std::span<const double> alpha) const {
    const double* v = point_values(q);
    const int s = pt_start_[q];
    double r = 0.0;
    for (int i = 0; i < pt_nnz_; ++i)
      r += v[i] * alpha[s + i];
    return r;
  }

private:
  MomentBasis() = default;
  void finalize();

  BasisKind kind_{};
  int n_ = 0;
  int legendre_order_ = 0; // full_moment only
  bool masslumped_ = false;
  std::string name_;
  Vec partition_;
  Quadrature quad_;
  Vec unit_multiplier_;
  Vec isotropic_moment_;
  Vec quad_isotropic_moment_;
  Vec iso_half_; // <b> / |V|, density-corrected so iso_projection preserves rho

  int pt_nnz_ = 0;
  std::vector<int> pt_start_;
  Vec pt_vals_;
};

} // namespace slabmn

#endif
