#ifndef SLABMN_PROBLEMS_HPP
#define SLABMN_PROBLEMS_HPP

#include <functional>
#include <string>

#include "slabmn/types.hpp"

namespace slabmn {

enum class InitialKind { vacuum, vacuum_plus_dirac };

/// Declarative description of one benchmark problem: spatial domain,
/// piecewise-constant material coefficients, initial and boundary kinetic
/// densities.
struct ProblemSpec {
  std::string name;
  double x_left = 0.0;
  double x_right = 0.0;
  double tf = 0.0;
  std::function<double(double)> sigma_s;
  std::function<double(double)> sigma_a;
  std::function<double(double)> source_q;
  InitialKind initial = InitialKind::vacuum;
  // Kinetic boundary densities psi_b(mu) at the left/right domain ends.
  std::function<double(double)> boundary_left;
  std::function<double(double)> boundary_right;
  // If set, boundary_left is divided by its angular integral, computed with
  // the run's own quadrature, before use.
  bool normalize_boundary_left = false;
  double psi_vac = 5e-7;
};

/// Pure scattering pulse: all mass initially concentrated at x = 0,
/// sigma_s = 1, vacuum boundaries.
ProblemSpec plane_source();

/// Anisotropic beam entering from the left through layered absorbing and
/// scattering material, with an interior isotropic source. The left
/// boundary Gaussian exp(-1e5 (mu-1)^2) is normalized by the caller's
/// quadrature (see normalized_beam_boundary).
ProblemSpec source_beam();

ProblemSpec problem_by_name(const std::string& name);

} // namespace slabmn

#endif
