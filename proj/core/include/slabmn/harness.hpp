#ifndef SLABMN_HARNESS_HPP
#define SLABMN_HARNESS_HPP

#include <string>
#include <utility>
#include <vector>

#include "slabmn/grid.hpp"
#include "slabmn/optimizer.hpp"
#include "slabmn/problems.hpp"
#include "slabmn/scheme_standard.hpp"
#include "slabmn/scheme_transformed.hpp"
#include "slabmn/types.hpp"

namespace slabmn {

struct RunConfig {
  std::string scheme = "transformed"; // "standard" | "transformed"
  std::string basis = "m10";          // m<N>, hfm<n>, pmm<n>
  bool masslumping = false;
  std::string problem = "planesource"; // "planesource" | "sourcebeam"
  int n_x = 240;
  double tf = -1.0; // problem default when negative

  // standard scheme
  double dt = 0.0;    // explicit time step; 0 means use the CFL step
  bool dt_cfl = true; // use (1 - eps_gamma) dx

  // transformed scheme
  double tol = 1e-3; // tau_step
  bool relaxed = false;
  double hessian_reg = 0.0;
  bool hf_clip = false;
  bool fixed_dt_mode = false;
  double fixed_dt = 0.0;

  // optimizer
  double tau = 1e-9;
  int max_newton_iter = 200;
  double rho_vac = 1e-6;
  bool no_cache = false;

  std::string out_dir; // empty: no files written
  int threads = 1;
  unsigned seed = 0; // randomized property tests only

  OptimizerConfig optimizer() const;
  TransformedConfig transformed() const;
};

struct StepLog {
  double t = 0.0;
  double dt = 0.0;
  double wall_s = 0.0;
  double err = 0.0;
  int retries = 0;
};

struct RunRecord {
  RunConfig config;
  Grid grid;
  double tf = 0.0;
  Field alpha; // final multipliers
  Field u;     // final moments
  std::vector<StepLog> steps;
  std::vector<EntropyRecord> entropy; // transformed scheme only
  StandardStats standard_stats;       // standard scheme only
  double total_wall = 0.0;
  int n_t = 0;
};

/// Executes the configured scheme and, if out_dir is non-empty, writes
/// solution.csv, timesteps.csv, entropy.csv (transformed scheme) and
/// meta.txt there. Throws std::invalid_argument for invalid configurations.
RunRecord run(const RunConfig& config);

void write_outputs(const RunRecord& record, const std::string& out_dir);

/// A solution read back from solution.csv.
struct SolutionData {
  Vec x;
  Field u;
};

SolutionData read_solution_csv(const std::string& path);

/// (L1, Linf) between two solutions on the same grid:
/// L1 = sum_i dx sum_l |a - b|, Linf = max |a - b|.
/// Throws std::invalid_argument on shape mismatch.
std::pair<double, double> compare(const SolutionData& a,
                                  const SolutionData& b);
std::pair<double, double> compare_fields(double dx, const Field& a,
                                         const Field& b);

/// Applies key=value lines from a config file; '#' starts a comment.
/// Unknown keys raise std::invalid_argument.
void apply_config_file(RunConfig& config, const std::string& path);

} // namespace slabmn

#endif
