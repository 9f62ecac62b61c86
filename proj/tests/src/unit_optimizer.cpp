#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "slabmn/optimizer.hpp"

using namespace slabmn;

namespace {

Vec random_alpha(const MomentBasis& basis, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec a(basis.size());
  for (double& x : a)
    x = dist(rng);
  return a;
}

} // namespace

TEST_CASE("dual solve inverts the moment map") {
  std::mt19937 rng(61);
  const OptimizerConfig config;
  for (const char* name : {"m6", "hfm8", "pmm6"}) {
    const MomentBasis basis = MomentBasis::parse(name);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec alpha = random_alpha(basis, rng);
      const Vec u = moments_of(basis, alpha);
      const DualSolveResult res = solve_dual(basis, u, config);
      REQUIRE(res.converged);
      const Vec u_back = moments_of(basis, res.alpha);
      Vec diff(u.size());
      for (std::size_t l = 0; l < u.size(); ++l)
        diff[l] = u_back[l] - u[l];
      CHECK(norm2(diff) <= 1e-7 * (1.0 + norm2(u)));
    }
  }
}

TEST_CASE("gradient at the returned multipliers is small") {
  std::mt19937 rng(67);
  const OptimizerConfig config;
  const MomentBasis basis = MomentBasis::parse("hfm8");
  for (int trial = 0; trial < 10; ++trial) {
    const Vec u = moments_of(basis, random_alpha(basis, rng));
    const DualSolveResult res = solve_dual(basis, u, config);
    REQUIRE(res.converged);
    const Vec g = dual_gradient(basis, res.alpha, u);
    CHECK(norm2(g) <= config.tau * (1.0 + 10.0));
  }
}

TEST_CASE("dual solve preserves the local density exactly up to rounding") {
  std::mt19937 rng(71);
  const OptimizerConfig config;
  for (const char* name : {"m4", "hfm6", "pmm4"}) {
    const MomentBasis basis = MomentBasis::parse(name);
    const Vec u = moments_of(basis, random_alpha(basis, rng));
    const DualSolveResult res = solve_dual(basis, u, config);
    REQUIRE(res.converged);
    const double rho = basis.density(u);
    const double rho_back = basis.density(moments_of(basis, res.alpha));
    CHECK(rho_back == doctest::Approx(rho).epsilon(1e-14));
  }
}

TEST_CASE("warm-start guesses do not change the answer materially") {
  std::mt19937 rng(73);
  const OptimizerConfig config;
  const MomentBasis basis = MomentBasis::parse("pmm6");
  const Vec alpha = random_alpha(basis, rng);
  const Vec u = moments_of(basis, alpha);
  Vec guess = alpha;
  for (double& x : guess)
    x += 0.05;
  const DualSolveResult cold = solve_dual(basis, u, config);
  const DualSolveResult warm = solve_dual(basis, u, config, &guess);
  REQUIRE(cold.converged);
  REQUIRE(warm.converged);
  const Vec uc = moments_of(basis, cold.alpha);
  const Vec uw = moments_of(basis, warm.alpha);
  for (std::size_t l = 0; l < uc.size(); ++l)
    CHECK(uw[l] == doctest::Approx(uc[l]).epsilon(1e-7).scale(1.0));
  CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("vacuum floor replaces under-dense moments") {
  const MomentBasis basis = MomentBasis::parse("hfm6");
  const double rho_vac = 1e-6;
  Vec tiny(basis.size(), 1e-9);
  const Vec floored = apply_vacuum_floor(basis, tiny, rho_vac);
  CHECK(basis.density(floored) == doctest::Approx(rho_vac).epsilon(1e-13));
  Vec healthy(basis.size(), 0.5);
  const Vec kept = apply_vacuum_floor(basis, healthy, rho_vac);
  for (int l = 0; l < basis.size(); ++l)
    CHECK(kept[l] == healthy[l]);
}

TEST_CASE("regularized solve is total even for hostile moments") {
  const MomentBasis basis = MomentBasis::parse("hfm8");
  // Near the realizability boundary: one component dwarfs the others.
  Vec u(basis.size(), 1e-12);
  u[3] = 1.0;
  const OptimizerConfig config;
  const SolveReport report = solve_with_regularization(basis, u, config);
  CHECK(all_finite(report.alpha));
  // The moments of the result are realizable and carry the same density.
  const Vec u_back = moments_of(basis, report.alpha);
  CHECK(basis.is_realizable(u_back) == Realizable::yes);
  CHECK(basis.density(u_back) ==
        doctest::Approx(basis.density(u)).epsilon(1e-10));
}

TEST_CASE("isotropic moments solve in closed form") {
  const MomentBasis basis = MomentBasis::parse("m4");
  const double rho = 0.8;
  Vec u = basis.quad_isotropic_moment();
  for (double& x : u)
    x *= rho / 2.0;
  const OptimizerConfig config;
  const DualSolveResult res = solve_dual(basis, u, config);
  REQUIRE(res.converged);
  const Vec expected = basis.isotropic_multipliers(rho);
  for (int l = 0; l < basis.size(); ++l)
    CHECK(res.alpha[l] ==
          doctest::Approx(expected[l]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("per-cell cache returns exact hits on repeated solves") {
  std::mt19937 rng(79);
  const MomentBasis basis = MomentBasis::parse("hfm6");
  MomentSolver solver(basis, OptimizerConfig{}, 4);
  const Vec u = moments_of(basis, random_alpha(basis, rng));
  const SolveReport first = solver.solve(1, u);
  CHECK(first.cache_hit == CacheHit::miss);
  const SolveReport second = solver.solve(1, u);
  CHECK(second.cache_hit == CacheHit::exact);
  CHECK(second.iterations == 0);
  for (std::size_t l = 0; l < first.alpha.size(); ++l)
    CHECK(second.alpha[l] == first.alpha[l]);
}

TEST_CASE("disabling the cache still yields identical multipliers") {
  std::mt19937 rng(83);
  const MomentBasis basis = MomentBasis::parse("pmm6");
  MomentSolver cached(basis, OptimizerConfig{}, 2, true);
  MomentSolver uncached(basis, OptimizerConfig{}, 2, false);
  const Vec u = moments_of(basis, random_alpha(basis, rng));
  const SolveReport a = cached.solve(0, u);
  const SolveReport b = uncached.solve(0, u);
  for (std::size_t l = 0; l < a.alpha.size(); ++l)
    CHECK(a.alpha[l] == b.alpha[l]);
  const SolveReport c = uncached.solve(0, u);
  CHECK(c.cache_hit == CacheHit::miss);
}
