#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slabmn/acceptance.hpp"
#include "slabmn/harness.hpp"

namespace {

void add_solve_options(CLI::App& app, slabmn::RunConfig& config,
                       std::string& config_path) {
  app.add_option("--config", config_path,
                 "key=value config file (flags override file values)");
  app.add_option("--scheme", config.scheme,
                 "standard | transformed");
  app.add_option("--basis", config.basis,
                 "moment basis: m<N>, hfm<n> or pmm<n>");
  app.add_flag("--masslumping", config.masslumping,
               "nodal quadrature for hat-function bases");
  app.add_option("--problem", config.problem, "planesource | sourcebeam");
  app.add_option("--nx", config.n_x, "spatial cell count");
  app.add_option("--tf", config.tf, "final time (problem default if unset)");
  auto* dt_opt = app.add_option("--dt", config.dt,
                                "standard scheme time step");
  app.add_flag("--dt-cfl", config.dt_cfl,
               "standard scheme: use the CFL time step (default)");
  app.add_option("--tol", config.tol,
                 "transformed scheme adaptive tolerance");
  app.add_flag("--relaxed", config.relaxed,
               "entropy-stable relaxed Runge-Kutta mode");
  app.add_option("--hessian-reg", config.hessian_reg,
                 "isotropic Hessian regularization epsilon");
  app.add_flag("--hf-clip", config.hf_clip,
               "clip very negative hat-function multipliers");
  auto* fixed_opt = app.add_option("--fixed-dt", config.fixed_dt,
                                   "transformed scheme: fixed time step "
                                   "(disables adaptivity)");
  app.add_option("--tau", config.tau, "Newton gradient tolerance");
  app.add_option("--max-newton-iter", config.max_newton_iter,
                 "Newton iteration budget");
  app.add_option("--rho-vac", config.rho_vac, "vacuum density floor");
  app.add_flag("--no-cache", config.no_cache,
               "disable the optimizer solution caches");
  app.add_option("--out-dir", config.out_dir, "output directory for CSVs");
  app.add_option("--threads", config.threads, "worker thread count");
  app.add_option("--seed", config.seed,
                 "seed for randomized property tests");
  app.callback([&config, dt_opt, fixed_opt] {
    if (dt_opt->count() > 0)
      config.dt_cfl = false;
    if (fixed_opt->count() > 0)
      config.fixed_dt_mode = true;
  });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-entropy moment closure solver for 1D slab-geometry "
               "linear kinetic transport"};
  app.require_subcommand(1);

  slabmn::RunConfig config;
  std::string config_path;
  CLI::App* solve = app.add_subcommand("solve", "run one scheme");
  add_solve_options(*solve, config, config_path);

  std::string compare_a, compare_b;
  CLI::App* compare = app.add_subcommand(
      "compare", "L1/Linf distance between two solution.csv files");
  compare->add_option("a", compare_a, "first solution.csv")->required();
  compare->add_option("b", compare_b, "second solution.csv")->required();

  bool slow = false;
  unsigned selftest_seed = 12345;
  int selftest_threads = 1;
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the acceptance checks");
  selftest->add_flag("--slow", slow,
                     "include the long-running reference-table spot check");
  selftest->add_option("--seed", selftest_seed, "random seed");
  selftest->add_option("--threads", selftest_threads, "worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      // Re-parse after loading the config file so flags override it.
      if (!config_path.empty()) {
        slabmn::RunConfig file_config;
        slabmn::apply_config_file(file_config, config_path);
        config = file_config;
        CLI::App reparse{""};
        std::string ignored;
        slabmn::RunConfig flags = config;
        add_solve_options(reparse, flags, ignored);
        std::vector<std::string> args(argv + 2, argv + argc);
        std::reverse(args.begin(), args.end());
        reparse.parse(args);
        config = flags;
      }
      slabmn::RunRecord record = slabmn::run(config);
      std::cout << "steps=" << record.n_t
                << " wall_s=" << record.total_wall << "\n";
      if (!config.out_dir.empty())
        std::cout << "wrote " << config.out_dir << "/solution.csv\n";
    } else if (compare->parsed()) {
      const auto a = slabmn::read_solution_csv(compare_a);
      const auto b = slabmn::read_solution_csv(compare_b);
      const auto [l1, linf] = slabmn::compare(a, b);
      std::printf("L1=%.17g Linf=%.17g\n", l1, linf);
    } else if (selftest->parsed()) {
      return slabmn::run_acceptance(slow, selftest_seed, selftest_threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
