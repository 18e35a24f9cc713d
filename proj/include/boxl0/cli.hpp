#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boxl0/bench.hpp"

namespace boxl0::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Flat `key = value` files: strings in double quotes, numbers, true/false and
// one-line arrays `[a, b]`; '#' starts a comment; [section] headers are ignored.
// Values are returned as raw text with quotes and brackets removed.
using ConfigValues = std::map<std::string, std::string>;
ConfigValues parse_config_text(const std::string& text, const std::string& source);
ConfigValues load_config_file(const std::string& path);

// Applies known keys to the bench config; throws InvalidArgument naming unknown keys.
// Recognised keys: exp, n, m_ratio, m, trials, seed, snr_db, nf, lambda, lambda_frac,
// tau_cap, tol_rel, tol_f, max_iter, strict, algorithms, jobs, image, out.
void apply_config(const ConfigValues& values, ExperimentConfig& config, std::string& out_path);

// Master seed from BOXL0_SEED when set, else `fallback`.
std::uint64_t env_seed(std::uint64_t fallback);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::optional<std::size_t> column(const std::string& name) const;
};

// Throws Io with the path in the message.
CsvTable read_csv_table(const std::string& path);
// All numeric cells of a headerless CSV, row by row.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);
// Writes to a temporary file next to `path`, then renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

std::string bench_csv(const std::vector<TrialResult>& rows);
// Table with one line per (algorithm, n): mean iter rounded to an integer, time, res.
std::string summary_table(const std::vector<CellSummary>& cells);

int cmd_bench(const ExperimentConfig& config, const std::string& out_path, std::ostream& out, std::ostream& err);

struct SolveOptions {
  std::string a_path;
  std::string b_path;
  std::string l_path;
  std::string u_path;
  double lambda = 1e-3;
  Algorithm algorithm = Algorithm::BNL0R;
  double tau_cap = 0.0;
  int max_iter = 2000;
  double tol_rel = 1e-6;
  bool strict = false;
  std::string x_out;
};
int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err);

struct ImageOptions {
  std::string input;      // PGM path; empty means the built-in phantom
  std::size_t side = 64;  // phantom side
  std::size_t m = 0;      // 0 means the default ratio
  double nf = 0.05;
  double lambda_frac = 1e-6;
  std::uint64_t seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::PGA, Algorithm::PIHT, Algorithm::BNL0R};
  std::string out_prefix = "recovered";
  std::string csv_out;  // empty means stdout only
};
int cmd_image(const ImageOptions& opt, std::ostream& out, std::ostream& err);

struct PlotOptions {
  std::string csv_path;
  std::string metric = "res";  // res, time_s, iter or psnr
  std::string out_path = "plot.svg";
};
// Decades 10^k covering [lo, hi].
std::vector<int> log_decades(double lo, double hi);
std::string render_svg(const CsvTable& table, const std::string& metric);
int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err);

struct SuiteResult {
  std::string name;
  bool passed;
  std::string detail;
};
std::vector<std::string> selftest_suite_names();
// Runs the named suites (all when empty). `inject_fault` corrupts one check per suite.
std::vector<SuiteResult> run_selftest(const std::vector<std::string>& suites, bool inject_fault);
int cmd_selftest(const std::vector<std::string>& suites, bool inject_fault, std::ostream& out, std::ostream& err);

}  // namespace boxl0::cli
