#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"
#include "boxl0/pgm_image.hpp"

using namespace boxl0;
using namespace boxl0::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("boxl0_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config text") {
  const ConfigValues v = parse_config_text(
      "# grid\n[bench]\nexp = \"e2\"\nn = [1000, 2000]\ntrials = 4\nstrict = true\nsnr_db = 25.5 # dB\n", "t.toml");
  CHECK(v.at("exp") == "e2");
  CHECK(v.at("n") == "1000,2000");
  ExperimentConfig cfg;
  std::string out;
  apply_config(v, cfg, out);
  CHECK(cfg.experiment == Experiment::E2);
  CHECK(cfg.sizes == std::vector<std::size_t>{1000, 2000});
  CHECK(cfg.trials == 4);
  CHECK(cfg.strict_acceptance);
  CHECK(cfg.snr_db == 25.5);

  ExperimentConfig other;
  CHECK_THROWS_AS(apply_config(parse_config_text("nonsense = 3\n", "t.toml"), other, out), Error);
  CHECK_THROWS_AS(parse_config_text("just words\n", "t.toml"), Error);
  CHECK_THROWS_AS(load_config_file("/nonexistent/boxl0.toml"), Error);
}

TEST_CASE("seed from the environment") {
  ::setenv("BOXL0_SEED", "99", 1);
  CHECK(env_seed(1) == 99);
  ::unsetenv("BOXL0_SEED");
  CHECK(env_seed(5) == 5);
}

TEST_CASE("solve command") {
  TempDir dir("solve");
  write(dir.file("A.csv"), "1,0,0\n0,1,0\n0,0,1\n");
  write(dir.file("b.csv"), "1\n0\n0\n");
  write(dir.file("b2.csv"), "1\n0\n");
  write(dir.file("l.csv"), "3\n3\n3\n");
  std::ostringstream out, err;
  SolveOptions opt;
  opt.a_path = dir.file("A.csv");
  opt.b_path = dir.file("b.csv");
  opt.l_path = opt.u_path = dir.file("l.csv");
  opt.lambda = 1e-4;
  opt.x_out = dir.file("x.csv");
  CHECK(cmd_solve(opt, out, err) == kExitOk);
  const auto x = read_numeric_csv(opt.x_out);
  REQUIRE(x.size() == 3);
  CHECK(x[0][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(x[1][0] == 0.0);
  CHECK(x[2][0] == 0.0);

  // sqrt(2 tau lambda) > 1 once lambda is large
  opt.lambda = 5.0;
  for (const char* alg : {"bnl0r", "piht"}) {
    opt.algorithm = parse_algorithm(alg);
    CHECK(cmd_solve(opt, out, err) == kExitOk);
    for (const auto& row : read_numeric_csv(opt.x_out)) CHECK(row[0] == 0.0);
  }

  opt.b_path = dir.file("b2.csv");
  std::ostringstream err2;
  CHECK(cmd_solve(opt, out, err2) == kExitUsage);
  CHECK(err2.str().find("b2.csv") != std::string::npos);
}

TEST_CASE("bench command writes the grid and is reproducible") {
  TempDir dir("bench");
  ExperimentConfig cfg;
  cfg.sizes = {1000};
  cfg.trials = 3;
  cfg.master_seed = 7;
  cfg.max_iter = 200;
  std::ostringstream out, err;
  CHECK(cmd_bench(cfg, dir.file("r.csv"), out, err) == kExitOk);
  CHECK(cmd_bench(cfg, dir.file("r2.csv"), out, err) == kExitOk);
  const CsvTable t = read_csv_table(dir.file("r.csv"));
  CHECK(t.rows.size() == 9);
  CHECK(t.header.size() == 15);
  const CsvTable t2 = read_csv_table(dir.file("r2.csv"));
  const std::size_t time_col = *t.column("time_s");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c != time_col) CHECK(t.rows[r][c] == t2.rows[r][c]);
    }
  }
  CHECK(out.str().find("BNL0R") != std::string::npos);

  cfg.trials = 0;
  CHECK(cmd_bench(cfg, dir.file("bad.csv"), out, err) == kExitUsage);
  CHECK_FALSE(fs::exists(dir.file("bad.csv")));
}

TEST_CASE("e2 rows leave psnr empty") {
  TempDir dir("bench_e2");
  ExperimentConfig cfg;
  cfg.experiment = Experiment::E2;
  cfg.sizes = {1000};
  cfg.trials = 1;
  cfg.max_iter = 100;
  cfg.algorithms = {Algorithm::BNL0R};
  std::ostringstream out, err;
  CHECK(cmd_bench(cfg, dir.file("e2.csv"), out, err) == kExitOk);
  const CsvTable t = read_csv_table(dir.file("e2.csv"));
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][*t.column("psnr")].empty());
  CHECK_FALSE(t.rows[0][*t.column("res")].empty());
}

TEST_CASE("summary rounds the iteration count") {
  std::vector<CellSummary> cells{{Algorithm::PIHT, 1000, 20, 0, 10.5, 0.1, 1e-5, std::nullopt},
                                 {Algorithm::BNL0R, 1000, 20, 0, 4.4, 0.01, 1e-16, std::nullopt}};
  const std::string s = summary_table(cells);
  CHECK(s.find(" 11 ") != std::string::npos);
  CHECK(s.find(" 4 ") != std::string::npos);
}

TEST_CASE("plot") {
  TempDir dir("plot");
  write(dir.file("r.csv"),
        "experiment,algorithm,n,m,s,seed,lambda,tau,iter,time_s,res,psnr,nnz,f_final,residual_F\n"
        "e1,PGA,1000,250,1,1,1,1,10,0.5,2e-1,,5,1,1\n"
        "e1,PIHT,1000,250,1,1,1,1,10,0.1,3e-5,,1,1,1\n"
        "e1,BNL0R,1000,250,1,1,1,1,3,0.01,0,,1,0,0\n"
        "e1,PGA,2000,500,2,1,1,1,10,0.9,1e-1,,5,1,1\n"
        "e1,PIHT,2000,500,2,1,1,1,10,0.2,2e-5,,1,1,1\n"
        "e1,BNL0R,2000,500,2,1,1,1,3,0.02,1e-16,,1,0,0\n");
  std::ostringstream out, err;
  PlotOptions opt{dir.file("r.csv"), "res", dir.file("r.svg")};
  CHECK(cmd_plot(opt, out, err) == kExitOk);
  const std::string svg = slurp(opt.out_path);
  CHECK(count(svg, "<polyline") == 3);
  CHECK(svg.find("<svg") != std::string::npos);

  write(dir.file("h.csv"), "experiment,algorithm,n,res\n");
  opt.csv_path = dir.file("h.csv");
  CHECK(cmd_plot(opt, out, err) == kExitUsage);
  write(dir.file("m.csv"), "experiment,n,res\ne1,1000,1\n");
  opt.csv_path = dir.file("m.csv");
  CHECK(cmd_plot(opt, out, err) == kExitUsage);

  CHECK(log_decades(3e-5, 0.2) == std::vector<int>{-5, -4, -3, -2, -1, 0});
  CHECK(log_decades(1e-16, 1e-16) == std::vector<int>{-16, -15});
  for (double lo : {1e-12, 4.2e-7, 0.3}) {
    const double hi = lo * 4321.0;
    const auto d = log_decades(lo, hi);
    CHECK(std::pow(10.0, d.front()) <= lo);
    CHECK(std::pow(10.0, d.back()) >= hi);
    CHECK(std::pow(10.0, d.front() + 1) > lo);
    CHECK(std::pow(10.0, d.back() - 1) < hi);
  }
}

TEST_CASE("selftest") {
  std::ostringstream out, err;
  CHECK(cmd_selftest({}, false, out, err) == kExitOk);
  CHECK(count(out.str(), "PASS") == selftest_suite_names().size());
  std::ostringstream one;
  CHECK(cmd_selftest({"prox"}, false, one, err) == kExitOk);
  CHECK(count(one.str(), "PASS") == 1);
  std::ostringstream bad;
  CHECK(cmd_selftest({}, true, bad, err) == kExitFailure);
  CHECK(count(bad.str(), "FAIL") == selftest_suite_names().size());
  CHECK(cmd_selftest({"nope"}, false, out, err) == kExitUsage);
}

TEST_CASE("pgm round trip and image command") {
  TempDir dir("image");
  GrayImage img{5, 3, Vector(15)};
  for (std::size_t i = 0; i < 15; ++i) img.pixels[i] = static_cast<double>(i * 17) / 255.0;
  write_pgm(dir.file("a.pgm"), img);
  const GrayImage back = read_pgm(dir.file("a.pgm"));
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  for (std::size_t i = 0; i < 15; ++i) CHECK(back.pixels[i] == doctest::Approx(img.pixels[i]));
  write(dir.file("bad.pgm"), "P2\n2 2\n255\n0 0 0 0\n");
  CHECK_THROWS_AS(read_pgm(dir.file("bad.pgm")), Error);

  std::ostringstream out, err;
  ImageOptions opt;
  opt.input = dir.file("a.pgm");
  CHECK(cmd_image(opt, out, err) == kExitUsage);

  opt.input.clear();
  opt.side = 32;
  opt.nf = 0.0;
  opt.algorithms = {Algorithm::BNL0R};
  opt.out_prefix = dir.file("rec");
  opt.csv_out = dir.file("img.csv");
  CHECK(cmd_image(opt, out, err) == kExitOk);
  const GrayImage rec = read_pgm(dir.file("rec_BNL0R.pgm"));
  CHECK(rec.width == 32);
  CHECK(rec.height == 32);
  const CsvTable t = read_csv_table(opt.csv_out);
  REQUIRE(t.rows.size() == 1);
  const std::string psnr = t.rows[0][*t.column("psnr")];
  CHECK((psnr == "inf" || std::stod(psnr) >= 40.0));
}

}
