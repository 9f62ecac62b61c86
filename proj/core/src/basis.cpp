#include "slabmn/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slabmn {

namespace {

Vec uniform_partition(int k) {
  Vec p(k + 1);
  for (int i = 0; i <= k; ++i)
    p[i] = -1.0 + 2.0 * i / k;
  p.front() = -1.0;
  p.back() = 1.0;
  return p;
}

void legendre_all(int order, double x, double* out) {
  out[0] = 1.0;
  if (order >= 1)
    out[1] = x;
  for (int l = 1; l < order; ++l)
    out[l + 1] = ((2 * l + 1) * x * out[l] - l * out[l - 1]) / (l + 1);
}

int find_interval(const Vec& partition, double mu) {
  const int k = static_cast<int>(partition.size()) - 1;
  const int j = static_cast<int>(std::floor((mu + 1.0) * 0.5 * k));
  return std::clamp(j, 0, k - 1);
}

} // namespace

MomentBasis MomentBasis::full_moment(int order) {
  MomentBasis b;
  b.kind_ = BasisKind::full_moment;
  b.legendre_order_ = order;
  b.n_ = order + 1;
  b.name_ = "m" + std::to_string(order);
  b.partition_ = {-1.0, 0.0, 1.0}; // quadrature halves for the kinetic flux
  b.quad_ = composite_gauss_lobatto(b.partition_, 2 * order + 40);
  b.unit_multiplier_.assign(b.n_, 0.0);
  b.unit_multiplier_[0] = 1.0;
  b.isotropic_moment_.assign(b.n_, 0.0);
  b.isotropic_moment_[0] = 2.0;
  b.finalize();
  return b;
}

MomentBasis MomentBasis::hat_function(int n_moments, bool masslumping) {
  if (n_moments < 2)
    throw std::invalid_argument("hat_function: need at least 2 moments");
  MomentBasis b;
  b.kind_ = BasisKind::hat_function;
  b.n_ = n_moments;
  b.masslumped_ = masslumping;
  b.name_ = "hfm" + std::to_string(n_moments);
  const int k = n_moments - 1;
  b.partition_ = uniform_partition(k);
  b.quad_ = masslumping ? nodal_quadrature_for_partition(b.partition_)
                        : composite_gauss_lobatto(b.partition_, 15);
  b.unit_multiplier_.assign(b.n_, 1.0);
  b.isotropic_moment_.assign(b.n_, 2.0 / k);
  b.isotropic_moment_.front() = 1.0 / k;
  b.isotropic_moment_.back() = 1.0 / k;
  b.finalize();
  return b;
}

MomentBasis MomentBasis::partial_moment(int n_moments) {
  if (n_moments < 2 || n_moments % 2 != 0)
    throw std::invalid_argument("partial_moment: moment count must be even and >= 2");
  MomentBasis b;
  b.kind_ = BasisKind::partial_moment;
  b.n_ = n_moments;
  b.name_ = "pmm" + std::to_string(n_moments);
  const int k = n_moments / 2;
  b.partition_ = uniform_partition(k);
  b.quad_ = composite_gauss_lobatto(b.partition_, 15);
  b.unit_multiplier_.assign(b.n_, 0.0);
  b.isotropic_moment_.assign(b.n_, 0.0);
  for (int j = 0; j < k; ++j) {
    b.unit_multiplier_[2 * j] = 1.0;
    const double ml = b.partition_[j], mr = b.partition_[j + 1];
    b.isotropic_moment_[2 * j] = mr - ml;
    b.isotropic_moment_[2 * j + 1] = 0.5 * (mr * mr - ml * ml);
  }
  b.finalize();
  return b;
}

MomentBasis MomentBasis::parse(const std::string& name, bool masslumping) {
  auto number_after = [&](std::size_t prefix_len) {
    const int v = std::stoi(name.substr(prefix_len));
    if (v < 0)
      throw std::invalid_argument("bad basis name: " + name);
    return v;
  };
  if (name.rfind("hfm", 0) == 0)
    return hat_function(number_after(3), masslumping);
  if (name.rfind("pmm", 0) == 0)
    return partial_moment(number_after(3));
  if (name.rfind("m", 0) == 0) {
    if (masslumping)
      throw std::invalid_argument("masslumping requires a hat-function basis");
    return full_moment(number_after(1));
  }
  throw std::invalid_argument("unknown basis name: " + name +
                              " (expected m<N>, hfm<n> or pmm<n>)");
}

void MomentBasis::finalize() {
  const auto& q = quad_;
  const std::size_t nq = q.size();
  pt_nnz_ = (kind_ == BasisKind::full_moment) ? n_ : 2;
  pt_start_.resize(nq);
  pt_vals_.assign(nq * pt_nnz_, 0.0);

  for (std::size_t p = 0; p < nq; ++p) {
    const double mu = q.points[p];
    const int j = q.interval[p];
    double* v = pt_vals_.data() + p * pt_nnz_;
    switch (kind_) {
    case BasisKind::full_moment:
      pt_start_[p] = 0;
      legendre_all(legendre_order_, mu, v);
      break;
    case BasisKind::hat_function: {
      pt_start_[p] = j;
      const double ml = partition_[j], mr = partition_[j + 1];
      v[0] = (mr - mu) / (mr - ml);
      v[1] = (mu - ml) / (mr - ml);
      break;
    }
    case BasisKind::partial_moment:
      pt_start_[p] = 2 * j;
      v[0] = 1.0;
      v[1] = mu;
      break;
    }
  }

  quad_isotropic_moment_.assign(n_, 0.0);
  for (std::size_t p = 0; p < nq; ++p) {
    const double* v = pt_vals_.data() + p * pt_nnz_;
    for (int i = 0; i < pt_nnz_; ++i)
      quad_isotropic_moment_[pt_start_[p] + i] += q.weights[p] * v[i];
  }

  iso_half_.resize(n_);
  for (int i = 0; i < n_; ++i)
    iso_half_[i] = 0.5 * isotropic_moment_[i];
  // nudge so that density(iso_half_) == 1 bitwise; keeps iso_projection and
  // moment regularization exactly density-preserving
  for (int it = 0; it < 4; ++it) {
    const double d = density(iso_half_) - 1.0;
    if (d == 0.0)
      break;
    iso_half_[0] -= d;
  }
}

Vec MomentBasis::evaluate(double mu) const {
  if (!(mu >= -1.0 && mu <= 1.0))
    throw std::domain_error("MomentBasis::evaluate: mu outside [-1,1]");
  Vec b(n_, 0.0);
  switch (kind_) {
  case BasisKind::full_moment:
    legendre_all(legendre_order_, mu, b.data());
    break;
  case BasisKind::hat_function: {
    const int j = find_interval(partition_, mu);
    const double ml = partition_[j], mr = partition_[j + 1];
    b[j] = (mr - mu) / (mr - ml);
    b[j + 1] = (mu - ml) / (mr - ml);
    break;
  }
  case BasisKind::partial_moment: {
    const int j = find_interval(partition_, mu);
    b[2 * j] = 1.0;
    b[2 * j + 1] = mu;
    break;
  }
  }
  return b;
}

Vec MomentBasis::iso_projection(std::span<const double> u) const {
  const double rho = density(u);
  Vec g(n_);
  for (int i = 0; i < n_; ++i)
    g[i] = iso_half_[i] * rho;
  for (int it = 0; it < 4; ++it) {
    const double d = density(g) - rho;
    if (d == 0.0)
      break;
    g[0] -= d;
  }
  return g;
}

Realizable MomentBasis::is_realizable(std::span<const double> u) const {
  switch (kind_) {
  case BasisKind::hat_function:
    for (double x : u)
      if (!(x > 0.0))
        return Realizable::no;
    return Realizable::yes;
  case BasisKind::partial_moment:
    for (int j = 0; 2 * j < n_; ++j) {
      const double u0 = u[2 * j], u1 = u[2 * j + 1];
      const double ml = partition_[j], mr = partition_[j + 1];
      if (!(u0 > 0.0 && ml * u0 < u1 && u1 < mr * u0))
        return Realizable::no;
    }
    return Realizable::yes;
  case BasisKind::full_moment:
    // exact Hankel tests deliberately not implemented; the optimizer uses
    // the surrogate criterion instead
    return Realizable::unsupported;
  }
  return Realizable::unsupported;
}

Vec MomentBasis::isotropic_multipliers(double rho) const {
  if (!(rho > 0.0))
    throw std::domain_error("isotropic_multipliers: rho must be positive");
  const double c = std::log(0.5 * rho);
  Vec a(n_);
  for (int i = 0; i < n_; ++i)
    a[i] = c * unit_multiplier_[i];
  return a;
}

} // namespace slabmn
