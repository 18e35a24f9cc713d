#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "boxl0/cli.hpp"
#include "boxl0/kernels.hpp"

using namespace boxl0;

namespace {

// Value of --config, looked up before the full parse so file values can act as defaults.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(parse_algorithm(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-constrained l0-regularized least squares: solvers and benchmarks"};
  app.require_subcommand(1);
  std::string simd;
  app.add_option("--simd", simd, "Kernel variant: scalar or avx2 (default: best available)");

  // bench
  ExperimentConfig bench;
  std::string bench_out = "results.csv";
  std::string config_path;
  std::string exp_name = "e1";
  std::vector<std::string> bench_algs{"pga", "piht", "bnl0r"};
  bench.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bench.master_seed = 1;
  auto* b = app.add_subcommand("bench", "Run an experiment grid and write a CSV");
  b->add_option("--config", config_path, "Flat key = value config file; flags override it");
  b->add_option("--exp", exp_name, "Experiment: e1, e2, e3 or e4");
  b->add_option("--n", bench.sizes, "Problem sizes")->delimiter(',');
  b->add_option("--m-ratio", bench.m_ratio, "Rows per column (e1, e2)");
  b->add_option("--m", bench.m, "Absolute number of DFT samples (e4)");
  b->add_option("--trials", bench.trials, "Trials per size");
  b->add_option("--seed", bench.master_seed, "Master seed (default: BOXL0_SEED or 1)");
  b->add_option("--snr-db", bench.snr_db, "Measurement SNR in dB (e2, e3)");
  b->add_option("--nf", bench.nf, "Noise factor (e4)");
  b->add_option("--lambda", bench.lambda, "Fixed lambda (default: lambda-frac times the upper bound)");
  b->add_option("--lambda-frac", bench.lambda_frac, "Fraction of the lambda upper bound");
  b->add_option("--tau-cap", bench.tau_cap, "Upper cap on tau (0: none)");
  b->add_option("--tol-rel", bench.tol_rel, "Relative-change stopping tolerance");
  b->add_option("--tol-f", bench.tol_f, "Stop when f <= tol-f (default per experiment)");
  b->add_option("--max-iter", bench.max_iter, "Iteration limit");
  b->add_flag("--strict", bench.strict_acceptance, "Strict Newton acceptance test");
  b->add_option("--algorithms", bench_algs, "Subset of pga, piht, bnl0r")->delimiter(',');
  b->add_option("--jobs", bench.jobs, "Worker threads");
  b->add_option("--image", bench.image_path, "PGM image for e4 (default: built-in phantom)");
  b->add_option("--out", bench_out, "Output CSV path");

  // solve
  cli::SolveOptions solve;
  std::string solve_alg = "bnl0r";
  auto* s = app.add_subcommand("solve", "Solve a dense instance given as CSV files");
  s->add_option("--A", solve.a_path, "Matrix, one row per line")->required();
  s->add_option("--b", solve.b_path, "Observation vector")->required();
  s->add_option("--l", solve.l_path, "Lower bounds (x >= -l)")->required();
  s->add_option("--u", solve.u_path, "Upper bounds (x <= u)")->required();
  s->add_option("--lambda", solve.lambda, "Penalty weight");
  s->add_option("--algorithm", solve_alg, "bnl0r, piht or pga");
  s->add_option("--tau-cap", solve.tau_cap, "Upper cap on tau (0: none)");
  s->add_option("--max-iter", solve.max_iter, "Iteration limit");
  s->add_option("--tol-rel", solve.tol_rel, "Relative-change stopping tolerance");
  s->add_flag("--strict", solve.strict, "Strict Newton acceptance test");
  s->add_option("--x-out", solve.x_out, "Write the solution as CSV");

  // image
  cli::ImageOptions image;
  std::vector<std::string> image_algs{"pga", "piht", "bnl0r"};
  image.seed = 1;
  auto* im = app.add_subcommand("image", "Recover an image from partial Fourier samples of its Haar coefficients");
  im->add_option("--input", image.input, "PGM image (default: built-in phantom)");
  im->add_option("--side", image.side, "Phantom side when no input is given");
  im->add_option("--m", image.m, "Number of DFT samples (default: 14369 per 65536 pixels)");
  im->add_option("--nf", image.nf, "Noise factor");
  im->add_option("--lambda-frac", image.lambda_frac, "Fraction of the lambda upper bound");
  im->add_option("--seed", image.seed, "Seed for sampling and noise (default: BOXL0_SEED or 1)");
  im->add_option("--algorithms", image_algs, "Subset of pga, piht, bnl0r")->delimiter(',');
  im->add_option("--out-prefix", image.out_prefix, "Recovered images go to <prefix>_<ALG>.pgm");
  im->add_option("--csv", image.csv_out, "Also write result rows as CSV");

  // plot
  cli::PlotOptions plot;
  auto* p = app.add_subcommand("plot", "Plot a bench CSV as SVG");
  p->add_option("csv", plot.csv_path, "Bench CSV")->required();
  p->add_option("--metric", plot.metric, "res, time_s, iter or psnr");
  p->add_option("--out", plot.out_path, "Output SVG");

  // selftest
  std::vector<std::string> suites;
  bool inject = false;
  auto* st = app.add_subcommand("selftest", "Run the built-in invariant suites");
  st->add_option("--suite", suites, "Suites to run (default: all)")->delimiter(',');
  st->add_flag("--inject-fault", inject, "Corrupt one check per suite (exercises the failure path)");

  // Defaults from the environment and the config file come before flag parsing.
  bench.master_seed = cli::env_seed(bench.master_seed);
  image.seed = cli::env_seed(image.seed);
  const std::string pre_config = find_config_path(argc, argv);
  if (!pre_config.empty()) {
    try {
      std::string file_out = bench_out;
      const auto values = cli::load_config_file(pre_config);
      if (values.count("exp")) exp_name = values.at("exp");
      if (values.count("algorithms")) bench_algs.clear();
      cli::apply_config(values, bench, file_out);
      if (values.count("algorithms")) {
        for (Algorithm a : bench.algorithms) bench_algs.push_back(to_string(a));
      }
      bench_out = file_out;
    } catch (const std::exception& e) {
      std::cerr << "bench: " << e.what() << "\n";
      return cli::kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  if (!simd.empty() && !kernels::select_by_name(simd)) {
    std::cerr << "unknown or unsupported kernel variant '" << simd << "'\n";
    return cli::kExitUsage;
  }

  try {
    if (*b) {
      bench.experiment = parse_experiment(exp_name);
      bench.algorithms = parse_algorithms(bench_algs);
      return cli::cmd_bench(bench, bench_out, std::cout, std::cerr);
    }
    if (*s) {
      solve.algorithm = parse_algorithm(solve_alg);
      return cli::cmd_solve(solve, std::cout, std::cerr);
    }
    if (*im) {
      image.algorithms = parse_algorithms(image_algs);
      return cli::cmd_image(image, std::cout, std::cerr);
    }
    if (*p) return cli::cmd_plot(plot, std::cout, std::cerr);
    if (*st) return cli::cmd_selftest(suites, inject, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return cli::kExitUsage;
  }
  return cli::kExitUsage;
}
