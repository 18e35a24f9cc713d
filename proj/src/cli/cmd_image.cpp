#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"
#include "boxl0/pgm_image.hpp"

namespace boxl0::cli {

int cmd_image(const ImageOptions& opt, std::ostream& out, std::ostream& err) {
  GrayImage input;
  std::optional<Instance> inst;
  ExperimentConfig config;
  try {
    if (opt.input.empty()) {
      input.width = input.height = opt.side;
      input.pixels = phantom(opt.side);
    } else {
      input = read_pgm(opt.input);
    }
    if (input.width != input.height || !is_power_of_two(input.width)) {
      throw Error(ErrorCode::SideNotPowerOfTwo,
                  fmt::format("{}x{} image: side must be a power of two and the image square", input.width,
                              input.height));
    }
    config.experiment = Experiment::E4;
    config.sizes = {input.pixels.size()};
    config.image = input.pixels;
    config.m = opt.m;
    config.nf = opt.nf;
    config.lambda_frac = opt.lambda_frac;
    validate_config(config);
    inst = make_instance(config, input.pixels.size(), opt.seed);
  } catch (const std::exception& e) {
    fmt::print(err, "image: {}\n", e.what());
    return kExitUsage;
  }

  const SolverParams params = instance_params(config, *inst);
  std::vector<TrialResult> rows;
  int failed = 0;
  fmt::print(out, "n={} m={} nf={} lambda={:.3e} tol_f={:.3e}\n", inst->meta.n, inst->meta.m, inst->meta.nf,
             inst->problem.lambda_target, inst->tol_f);
  fmt::print(out, "{:<10}{:>10}{:>10}{:>8}{:>8}\n", "Algorithm", "PSNR", "time", "nnz", "iter");
  for (Algorithm a : opt.algorithms) {
    TrialResult r = run_algorithm(a, *inst, params, true);
    if (r.failed) {
      ++failed;
      fmt::print(err, "image: {} failed: {}\n", to_string(a), r.error);
      rows.push_back(std::move(r));
      continue;
    }
    fmt::print(out, "{:<10}{:>10.2f}{:>10.2f}{:>8}{:>8}\n", to_string(a), *r.psnr, r.time_s, r.nnz, r.iter);
    GrayImage recovered{input.width, input.height, haar_inverse(r.x_final, input.width)};
    const std::string path = fmt::format("{}_{}.pgm", opt.out_prefix, to_string(a));
    try {
      write_pgm(path, recovered);
    } catch (const std::exception& e) {
      fmt::print(err, "image: {}\n", e.what());
      ++failed;
    }
    r.x_final.clear();
    rows.push_back(std::move(r));
  }
  if (!opt.csv_out.empty()) {
    try {
      write_file_atomic(opt.csv_out, bench_csv(rows));
    } catch (const std::exception& e) {
      fmt::print(err, "image: {}\n", e.what());
      return kExitFailure;
    }
  }
  return failed > 0 ? kExitFailure : kExitOk;
}

}  // namespace boxl0::cli
