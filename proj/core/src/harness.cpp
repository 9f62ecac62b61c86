#include "slabmn/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "slabmn/scheme_standard.hpp"

namespace slabmn {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_solution_csv(const std::string& path, const Grid& grid,
                        const Field& u) {
  std::ofstream out(path);
  out << "x";
  for (int l = 0; l < u.n; ++l)
    out << ",u" << l;
  out << "\n";
  for (int i = 0; i < u.n_x; ++i) {
    out << fmt(grid.center(i));
    for (double v : u.cell(i))
      out << "," << fmt(v);
    out << "\n";
  }
}

} // namespace

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig opt;
  opt.tau = tau;
  opt.max_iterations = max_newton_iter;
  opt.rho_vac = rho_vac;
  return opt;
}

TransformedConfig RunConfig::transformed() const {
  TransformedConfig tc;
  tc.tau_step = tol;
  tc.hessian_reg_eps = hessian_reg;
  tc.hf_clip_enabled = hf_clip;
  tc.relaxed = relaxed;
  tc.adaptive = !fixed_dt_mode;
  tc.fixed_dt = fixed_dt;
  return tc;
}

RunRecord run(const RunConfig& config) {
  const MomentBasis basis = MomentBasis::parse(config.basis,
                                               config.masslumping);
  if (config.masslumping && basis.kind() != BasisKind::hat_function)
    throw std::invalid_argument(
        "--masslumping requires a hat-function basis (hfm<n>)");
  if (config.hf_clip && basis.kind() != BasisKind::hat_function)
    throw std::invalid_argument(
        "--hf-clip requires a hat-function basis (hfm<n>)");
  if (config.n_x <= 0)
    throw std::invalid_argument("--nx must be positive");
  if (config.threads <= 0)
    throw std::invalid_argument("--threads must be positive");

  ProblemSpec problem = problem_by_name(config.problem);
  if (config.tf >= 0.0)
    problem.tf = config.tf;

  RunRecord record;
  record.config = config;
  record.tf = problem.tf;
  const bool use_cache = !config.no_cache;
  const auto start = std::chrono::steady_clock::now();

  if (config.scheme == "standard") {
    StandardScheme scheme(basis, problem, config.n_x, config.optimizer(),
                          use_cache, config.threads);
    double dt = config.dt;
    if (config.dt_cfl || dt <= 0.0)
      dt = scheme.cfl();
    scheme.run(problem.tf, dt, [&](double t, double dt_taken, double wall) {
      record.steps.push_back(StepLog{t, dt_taken, wall, 0.0, 0});
    });
    record.grid = scheme.grid();
    record.u = scheme.state();
    record.alpha = scheme.multipliers_of(scheme.state());
    record.standard_stats = scheme.stats();
  } else if (config.scheme == "transformed") {
    if (config.fixed_dt_mode && config.fixed_dt <= 0.0)
      throw std::invalid_argument("fixed-dt mode needs --fixed-dt > 0");
    TransformedScheme scheme(basis, problem, config.n_x, config.transformed(),
                             config.optimizer(), use_cache, config.threads);
    scheme.run(problem.tf, [&](const TransformedStepInfo& info) {
      record.steps.push_back(
          StepLog{info.t, info.dt, info.wall_seconds, info.err, info.retries});
    });
    record.grid = scheme.grid();
    record.alpha = scheme.state();
    record.u = scheme.moments(scheme.state());
    record.entropy = scheme.entropy_ledger();
  } else {
    throw std::invalid_argument("unknown scheme: " + config.scheme +
                                " (expected standard or transformed)");
  }

  record.total_wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  record.n_t = static_cast<int>(record.steps.size());

  if (!config.out_dir.empty())
    write_outputs(record, config.out_dir);
  return record;
}

void write_outputs(const RunRecord& record, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  write_solution_csv((dir / "solution.csv").string(), record.grid, record.u);

  {
    std::ofstream out(dir / "timesteps.csv");
    out << "t,dt,wall_s,err,retries\n";
    for (const StepLog& s : record.steps)
      out << fmt(s.t) << "," << fmt(s.dt) << "," << fmt(s.wall_s) << ","
          << fmt(s.err) << "," << s.retries << "\n";
  }

  if (!record.entropy.empty()) {
    std::ofstream out(dir / "entropy.csv");
    out << "t,H,H_est,gamma\n";
    for (const EntropyRecord& e : record.entropy)
      out << fmt(e.t) << "," << fmt(e.entropy) << "," << fmt(e.entropy_est)
          << "," << fmt(e.gamma) << "\n";
  }

  {
    std::ofstream out(dir / "meta.txt");
    const RunConfig& c = record.config;
    out << "scheme=" << c.scheme << "\n"
        << "basis=" << c.basis << "\n"
        << "masslumping=" << (c.masslumping ? 1 : 0) << "\n"
        << "problem=" << c.problem << "\n"
        << "nx=" << c.n_x << "\n"
        << "tf=" << fmt(record.tf) << "\n"
        << "dt=" << fmt(c.dt) << "\n"
        << "tol=" << fmt(c.tol) << "\n"
        << "relaxed=" << (c.relaxed ? 1 : 0) << "\n"
        << "hessian_reg=" << fmt(c.hessian_reg) << "\n"
        << "hf_clip=" << (c.hf_clip ? 1 : 0) << "\n"
        << "fixed_dt_mode=" << (c.fixed_dt_mode ? 1 : 0) << "\n"
        << "fixed_dt=" << fmt(c.fixed_dt) << "\n"
        << "tau=" << fmt(c.tau) << "\n"
        << "max_newton_iter=" << c.max_newton_iter << "\n"
        << "rho_vac=" << fmt(c.rho_vac) << "\n"
        << "no_cache=" << (c.no_cache ? 1 : 0) << "\n"
        << "threads=" << c.threads << "\n"
        << "n_t=" << record.n_t << "\n"
        << "total_wall_s=" << fmt(record.total_wall) << "\n";
    if (c.scheme == "standard") {
      out << "min_component=" << fmt(record.standard_stats.min_component)
          << "\n"
          << "regularization_fallbacks="
          << record.standard_stats.regularization_fallbacks << "\n";
    }
  }
}

SolutionData read_solution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("empty file: " + path);
  int n = 0;
  for (char ch : line)
    if (ch == ',')
      ++n;
  if (n <= 0)
    throw std::invalid_argument("malformed header in " + path);

  SolutionData data;
  std::vector<double> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::istringstream row(line);
    std::string tok;
    std::getline(row, tok, ',');
    data.x.push_back(std::stod(tok));
    for (int l = 0; l < n; ++l) {
      if (!std::getline(row, tok, ','))
        throw std::invalid_argument("short row in " + path);
      rows.push_back(std::stod(tok));
    }
  }
  data.u.n_x = static_cast<int>(data.x.size());
  data.u.n = n;
  data.u.data = std::move(rows);
  return data;
}

std::pair<double, double> compare_fields(double dx, const Field& a,
                                         const Field& b) {
  if (a.n_x != b.n_x || a.n != b.n)
    throw std::invalid_argument("solution shapes differ");
  double l1 = 0.0, linf = 0.0;
  for (int i = 0; i < a.n_x; ++i) {
    double cell = 0.0;
    for (int l = 0; l < a.n; ++l) {
      const double d = std::abs(a.cell(i)[l] - b.cell(i)[l]);
      cell += d;
      linf = std::max(linf, d);
    }
    l1 += dx * cell;
  }
  return {l1, linf};
}

std::pair<double, double> compare(const SolutionData& a,
                                  const SolutionData& b) {
  if (a.x.size() != b.x.size())
    throw std::invalid_argument("grids differ");
  const double dx =
      a.x.size() > 1 ? a.x[1] - a.x[0] : 1.0;
  return compare_fields(dx, a.u, b.u);
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    // trim
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos)
      continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    auto as_bool = [&] { return value == "1" || value == "true"; };
    if (key == "scheme")
      config.scheme = value;
    else if (key == "basis")
      config.basis = value;
    else if (key == "masslumping")
      config.masslumping = as_bool();
    else if (key == "problem")
      config.problem = value;
    else if (key == "nx")
      config.n_x = std::stoi(value);
    else if (key == "tf")
      config.tf = std::stod(value);
    else if (key == "dt") {
      config.dt = std::stod(value);
      config.dt_cfl = false;
    } else if (key == "dt_cfl")
      config.dt_cfl = as_bool();
    else if (key == "tol")
      config.tol = std::stod(value);
    else if (key == "relaxed")
      config.relaxed = as_bool();
    else if (key == "hessian_reg")
      config.hessian_reg = std::stod(value);
    else if (key == "hf_clip")
      config.hf_clip = as_bool();
    else if (key == "fixed_dt_mode")
      config.fixed_dt_mode = as_bool();
    else if (key == "fixed_dt")
      config.fixed_dt = std::stod(value);
    else if (key == "tau")
      config.tau = std::stod(value);
    else if (key == "max_newton_iter")
      config.max_newton_iter = std::stoi(value);
    else if (key == "rho_vac")
      config.rho_vac = std::stod(value);
    else if (key == "no_cache")
      config.no_cache = as_bool();
    else if (key == "out_dir")
      config.out_dir = value;
    else if (key == "threads")
      config.threads = std::stoi(value);
    else if (key == "seed")
      config.seed = static_cast<unsigned>(std::stoul(value));
    else
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
  }
}

} // namespace slabmn
