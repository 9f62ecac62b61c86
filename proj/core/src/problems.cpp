#include "slabmn/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace slabmn {

ProblemSpec plane_source() {
  ProblemSpec p;
  p.name = "planesource";
  p.x_left = -1.2;
  p.x_right = 1.2;
  p.tf = 1.0;
  p.sigma_s = [](double) { return 1.0; };
  p.sigma_a = [](double) { return 0.0; };
  p.source_q = [](double) { return 0.0; };
  p.initial = InitialKind::vacuum_plus_dirac;
  const double vac = p.psi_vac;
  p.boundary_left = [vac](double) { return vac; };
  p.boundary_right = [vac](double) { return vac; };
  return p;
}

ProblemSpec source_beam() {
  ProblemSpec p;
  p.name = "sourcebeam";
  p.x_left = 0.0;
  p.x_right = 3.0;
  p.tf = 2.5;
  p.sigma_a = [](double z) { return z <= 2.0 ? 1.0 : 0.0; };
  p.sigma_s = [](double z) {
    if (z <= 1.0)
      return 0.0;
    if (z <= 2.0)
      return 2.0;
    return 10.0;
  };
  p.source_q = [](double z) {
    return (z >= 1.0 && z <= 1.5) ? 0.5 : 0.0;
  };
  p.initial = InitialKind::vacuum;
  p.boundary_left = [](double mu) {
    const double d = mu - 1.0;
    return std::exp(-1e5 * d * d);
  };
  p.normalize_boundary_left = true;
  const double vac = p.psi_vac;
  p.boundary_right = [vac](double) { return vac; };
  return p;
}

ProblemSpec problem_by_name(const std::string& name) {
  if (name == "planesource")
    return plane_source();
  if (name == "sourcebeam")
    return source_beam();
  throw std::invalid_argument("unknown problem: " + name +
                              " (expected planesource or sourcebeam)");
}

} // namespace slabmn
