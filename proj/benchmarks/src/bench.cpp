#include <random>

#include <benchmark/benchmark.h>

#include "slabmn/basis.hpp"
#include "slabmn/closure.hpp"
#include "slabmn/linalg.hpp"
#include "slabmn/optimizer.hpp"
#include "slabmn/types.hpp"

namespace {

slabmn::Vec random_alpha(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  slabmn::Vec alpha(n);
  for (double& v : alpha)
    v = dist(rng);
  return alpha;
}

void BM_DualSolve(benchmark::State& state, const std::string& name) {
  const slabmn::MomentBasis basis = slabmn::MomentBasis::parse(name);
  std::mt19937 rng(7);
  std::vector<slabmn::Vec> inputs;
  for (int i = 0; i < 64; ++i)
    inputs.push_back(slabmn::moments_of(basis, random_alpha(rng, basis.size())));
  slabmn::OptimizerConfig cfg;
  std::size_t i = 0;
  for (auto _ : state) {
    auto result = slabmn::solve_dual(basis, inputs[i % inputs.size()], cfg);
    benchmark::DoNotOptimize(result.alpha.data());
    ++i;
  }
}

void BM_HessianSolve(benchmark::State& state, const std::string& name,
                     bool masslumping) {
  const slabmn::MomentBasis basis = slabmn::MomentBasis::parse(name, masslumping);
  std::mt19937 rng(7);
  const slabmn::Vec alpha = random_alpha(rng, basis.size());
  const slabmn::Vec rhs = random_alpha(rng, basis.size());
  for (auto _ : state) {
    const slabmn::HessianMatrix h = slabmn::hessian(basis, alpha);
    auto solved = slabmn::spd_solve(h, rhs);
    benchmark::DoNotOptimize(solved.x.data());
  }
}

} // namespace

BENCHMARK_CAPTURE(BM_DualSolve, m10, std::string("m10"));
BENCHMARK_CAPTURE(BM_DualSolve, hfm10, std::string("hfm10"));
BENCHMARK_CAPTURE(BM_DualSolve, pmm10, std::string("pmm10"));
BENCHMARK_CAPTURE(BM_HessianSolve, hfm41_full, std::string("hfm41"), false);
BENCHMARK_CAPTURE(BM_HessianSolve, hfm41_lumped, std::string("hfm41"), true);
BENCHMARK_CAPTURE(BM_HessianSolve, m10_dense, std::string("m10"), false);

BENCHMARK_MAIN();
