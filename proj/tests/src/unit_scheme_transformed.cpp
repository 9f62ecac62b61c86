#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "slabmn/problems.hpp"
#include "slabmn/scheme_standard.hpp"
#include "slabmn/scheme_transformed.hpp"

using namespace slabmn;

TEST_CASE("step controller algebra") {
  CHECK(StepController::dt_new(1.0, 1.0) == doctest::Approx(0.8));
  CHECK(StepController::dt_new(0.25, 0.512) == doctest::Approx(0.25));
  // Clamps at a factor five up and a factor five down.
  CHECK(StepController::dt_new(1.0, 1e-12) == doctest::Approx(5.0));
  CHECK(StepController::dt_new(1.0, 1e12) == doctest::Approx(0.2));
}

TEST_CASE("hat clipping clamps only components below the threshold") {
  Field state(2, 4);
  state.cell(0)[0] = -2000.0;
  state.cell(0)[1] = -999.0;
  state.cell(0)[2] = 0.5;
  state.cell(0)[3] = -1000.0;
  state.cell(1)[0] = 3.0;
  Field before = state;
  hf_clip(state, -1000.0);
  CHECK(state.cell(0)[0] == -1000.0);
  CHECK(state.cell(0)[1] == -999.0);
  CHECK(state.cell(0)[2] == 0.5);
  CHECK(state.cell(0)[3] == -1000.0);
  CHECK(state.cell(1)[0] == 3.0);
  hf_clip(before, -3000.0);
  CHECK(before.cell(0)[0] == -2000.0); // all entries already above threshold
}

namespace {

// A spatially uniform equilibrium problem: constant-in-angle boundary data
// matching the interior state, no absorption, no source.
ProblemSpec equilibrium_problem(double psi) {
  ProblemSpec p;
  p.name = "equilibrium";
  p.x_left = 0.0;
  p.x_right = 1.0;
  p.tf = 1.0;
  p.sigma_s = [](double) { return 1.3; };
  p.sigma_a = [](double) { return 0.0; };
  p.source_q = [](double) { return 0.0; };
  p.initial = InitialKind::vacuum;
  p.boundary_left = [psi](double) { return psi; };
  p.boundary_right = [psi](double) { return psi; };
  p.psi_vac = psi;
  return p;
}

} // namespace

TEST_CASE("equilibrium states have a vanishing multiplier update") {
  const double psi = 0.4;
  for (const char* name : {"m4", "hfm6", "pmm4"}) {
    const MomentBasis basis = MomentBasis::parse(name);
    TransformedScheme scheme(basis, equilibrium_problem(psi), 12,
                             TransformedConfig{});
    // Force the exact constant ansatz in every cell.
    Field alpha(12, basis.size());
    const Vec iso = basis.isotropic_multipliers(2.0 * psi);
    for (int i = 0; i < 12; ++i)
      for (int l = 0; l < basis.size(); ++l)
        alpha.cell(i)[l] = iso[l];
    Field up(12, basis.size());
    scheme.alpha_update(alpha, up);
    for (int i = 1; i < 11; ++i)
      for (int l = 0; l < basis.size(); ++l)
        CHECK(std::abs(up.cell(i)[l]) <= 1e-9);
  }
}

TEST_CASE("multiplier update shares its right-hand side with the moment scheme") {
  const MomentBasis basis = MomentBasis::parse("hfm6");
  const ProblemSpec problem = plane_source();
  const int n_x = 24;
  TransformedScheme tscheme(basis, problem, n_x, TransformedConfig{});
  StandardScheme sscheme(basis, problem, n_x);

  const Field& alpha = tscheme.state();
  Field up(n_x, basis.size());
  tscheme.alpha_update(alpha, up);

  // Reassemble H alpha_up and compare with the independently computed
  // moment-space right-hand side (flux divergence plus sources).
  Field u(n_x, basis.size());
  for (int i = 0; i < n_x; ++i) {
    const Vec m = moments_of(basis, alpha.cell(i));
    for (int l = 0; l < basis.size(); ++l)
      u.cell(i)[l] = m[l];
  }
  Field flux_rhs(n_x, basis.size());
  sscheme.hyperbolic_rhs(u, flux_rhs);
  const SourceCoefficients coeffs =
      sample_coefficients(problem, tscheme.grid());
  for (int i = 0; i < n_x; ++i) {
    const HessianMatrix H = hessian(basis, alpha.cell(i));
    const Vec lhs = H.multiply(up.cell(i));
    const Vec g = basis.iso_projection(u.cell(i));
    for (int l = 0; l < basis.size(); ++l) {
      const double source = coeffs.sigma_s[i] * (g[l] - u.cell(i)[l]) -
                            coeffs.sigma_a[i] * u.cell(i)[l] +
                            coeffs.q[i] * basis.isotropic_moment()[l];
      const double rhs = flux_rhs.cell(i)[l] + source;
      CHECK(std::abs(lhs[l] - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("vanishing regularization is continuous at zero") {
  const MomentBasis basis = MomentBasis::parse("pmm6");
  const ProblemSpec problem = plane_source();
  const int n_x = 12;
  TransformedConfig plain;
  TransformedConfig reg;
  reg.hessian_reg_eps = 1e-300;
  TransformedScheme a(basis, problem, n_x, plain);
  TransformedScheme b(basis, problem, n_x, reg);
  Field up_a(n_x, basis.size()), up_b(n_x, basis.size());
  a.alpha_update(a.state(), up_a);
  b.alpha_update(b.state(), up_b);
  for (int i = 0; i < n_x; ++i)
    for (int l = 0; l < basis.size(); ++l)
      CHECK(std::abs(up_a.cell(i)[l] - up_b.cell(i)[l]) <=
            1e-12 * (1.0 + std::abs(up_a.cell(i)[l])));
}

TEST_CASE("total entropy of reference states") {
  const MomentBasis basis = MomentBasis::parse("hfm6");
  const int n_x = 8;
  TransformedScheme scheme(basis, plane_source(), n_x, TransformedConfig{});
  Field zero(n_x, basis.size());
  CHECK(scheme.total_entropy(zero) ==
        doctest::Approx(-2.0 * n_x).epsilon(1e-12));
  Field unit(n_x, basis.size());
  for (int i = 0; i < n_x; ++i)
    for (int l = 0; l < basis.size(); ++l)
      unit.cell(i)[l] = basis.unit_multiplier()[l];
  CHECK(scheme.total_entropy(unit) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
  Field single(1, basis.size());
  for (int l = 0; l < basis.size(); ++l)
    single.cell(0)[l] = 2.0 * basis.unit_multiplier()[l];
  CHECK(scheme.total_entropy(single) ==
        doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-12));
}

TEST_CASE("adaptive run starts tiny and respects the growth clamp") {
  const MomentBasis basis = MomentBasis::parse("hfm10");
  TransformedConfig config;
  config.tau_step = 1e-3;
  TransformedScheme scheme(basis, plane_source(), 48, config, {}, true, 4);
  std::vector<double> dts;
  scheme.run(0.02, [&](const TransformedStepInfo& info) {
    dts.push_back(info.dt);
  });
  REQUIRE(!dts.empty());
  CHECK(dts.front() == doctest::Approx(1e-15));
  for (std::size_t i = 1; i < dts.size(); ++i)
    CHECK(dts[i] <= 5.0 * dts[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("relaxed runs keep the discrete entropy ledger consistent") {
  const MomentBasis basis = MomentBasis::parse("hfm10");
  TransformedConfig config;
  config.tau_step = 1e-3;
  config.relaxed = true;
  TransformedScheme scheme(basis, plane_source(), 48, config, {}, true, 4);
  scheme.run(0.05);
  const auto& ledger = scheme.entropy_ledger();
  REQUIRE(!ledger.empty());
  for (const EntropyRecord& rec : ledger) {
    CHECK(rec.gamma > 0.5);
    CHECK(rec.gamma < 1.5);
    CHECK(std::abs(rec.entropy - rec.entropy_est) <= 10.0 * config.bisection_tol);
  }
}

TEST_CASE("entropy decreases across relaxed steps without sources") {
  const MomentBasis basis = MomentBasis::parse("hfm10");
  TransformedConfig config;
  config.tau_step = 1e-3;
  config.relaxed = true;
  TransformedScheme scheme(basis, plane_source(), 48, config, {}, true, 4);
  scheme.run(0.05);
  const auto& ledger = scheme.entropy_ledger();
  for (std::size_t i = 1; i < ledger.size(); ++i)
    CHECK(ledger[i].entropy <= ledger[i - 1].entropy + 1e-9);
}

TEST_CASE("single embedded step of a quiescent state has zero error") {
  const double psi = 0.4;
  const MomentBasis basis = MomentBasis::parse("hfm6");
  TransformedScheme scheme(basis, equilibrium_problem(psi), 12,
                           TransformedConfig{});
  Field& alpha = scheme.state();
  const Vec iso = basis.isotropic_multipliers(2.0 * psi);
  for (int i = 0; i < 12; ++i)
    for (int l = 0; l < basis.size(); ++l)
      alpha.cell(i)[l] = iso[l];
  const double err = scheme.bogacki_shampine_step(1e-3);
  CHECK(err <= 1e-6);
}
