#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "boxl0/baselines.hpp"
#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"

namespace boxl0::cli {
namespace {

// Every number in the file, row after row; a single row or a single column both work.
Vector read_vector(const std::string& path) {
  Vector v;
  for (const auto& row : read_numeric_csv(path)) v.insert(v.end(), row.begin(), row.end());
  return v;
}

}  // namespace

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  std::optional<Problem> problem;
  try {
    const auto a_rows = read_numeric_csv(opt.a_path);
    if (a_rows.empty()) throw Error(ErrorCode::BadShape, opt.a_path + ": matrix is empty");
    const std::size_t m = a_rows.size();
    const std::size_t n = a_rows.front().size();
    Vector row_major;
    row_major.reserve(m * n);
    for (const auto& r : a_rows) {
      if (r.size() != n) throw Error(ErrorCode::BadShape, opt.a_path + ": rows have different lengths");
      row_major.insert(row_major.end(), r.begin(), r.end());
    }
    Vector b = read_vector(opt.b_path);
    if (b.size() != m) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("{}: expected {} values to match the rows of {}, found {}", opt.b_path, m, opt.a_path,
                              b.size()));
    }
    Vector l = read_vector(opt.l_path);
    Vector u = read_vector(opt.u_path);
    for (const auto& [path, v] : {std::pair{opt.l_path, &l}, std::pair{opt.u_path, &u}}) {
      if (v->size() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("{}: expected {} values to match the columns of {}, found {}", path, n, opt.a_path,
                                v->size()));
      }
      for (double x : *v) {
        if (!(x > 0.0)) throw Error(ErrorCode::NonpositiveBound, path + ": bounds must be > 0");
      }
    }
    auto map = std::make_shared<DenseMap>(DenseMap::from_row_major(m, n, row_major));
    problem = Problem{std::make_shared<LeastSquaresObjective>(map, std::move(b)), BoxBounds(std::move(l), std::move(u)),
                      opt.lambda};
    validate_problem(*problem);
  } catch (const std::exception& e) {
    fmt::print(err, "solve: {}\n", e.what());
    return kExitUsage;
  }

  SolverParams params = default_params(*problem);
  params.tau = opt.tau_cap;
  params.max_iter = opt.max_iter;
  params.tol_rel = opt.tol_rel;
  params.strict_acceptance = opt.strict;
  SolverReport rep;
  switch (opt.algorithm) {
    case Algorithm::BNL0R: rep = solve_bnl0r(*problem, params); break;
    case Algorithm::PIHT: rep = solve_piht(*problem, params); break;
    case Algorithm::PGA: rep = solve_pga(*problem, params); break;
  }
  fmt::print(out, "algorithm  {}\niterations {}\nnnz        {}\nf          {:.6e}\nresidual_F {:.6e}\ntime_s     {:.4f}\n",
             to_string(opt.algorithm), rep.iterations, rep.nnz, rep.f_final, rep.residual_norm, rep.wall_time);
  if (opt.algorithm == Algorithm::BNL0R) {
    fmt::print(out, "steps      {} newton, {} pgm\n", rep.newton_steps, rep.pgm_steps);
  }
  if (!opt.x_out.empty()) {
    std::string text;
    for (double v : rep.x_final) text += fmt::format("{:.17g}\n", v);
    try {
      write_file_atomic(opt.x_out, text);
    } catch (const std::exception& e) {
      fmt::print(err, "solve: {}\n", e.what());
      return kExitFailure;
    }
  }
  return kExitOk;
}

}  // namespace boxl0::cli
