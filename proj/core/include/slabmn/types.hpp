#ifndef SLABMN_TYPES_HPP
#define SLABMN_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slabmn {

using Vec = std::vector<double>;

// Recoverable numeric failure (exp overflow, singular Hessian, NaN/inf in a
// stage). The adaptive stepper catches it and halves the time step; the
// optimizer catches it and escalates to moment regularization.
class NumericFailure : public std::runtime_error {
public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double x : a)
    s += std::abs(x);
  return s;
}

inline void axpy(double c, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += c * x[i];
}

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x))
      return false;
  return true;
}

} // namespace slabmn

#endif
