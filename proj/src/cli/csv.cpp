#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"

namespace boxl0::cli {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, path + ": cannot open");
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    if (t.header.empty()) {
      t.header = split_fields(line);
    } else {
      t.rows.push_back(split_fields(line));
    }
  }
  if (t.header.empty()) throw Error(ErrorCode::Io, path + ": empty file");
  return t;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::vector<double> row;
    for (const std::string& f : split_fields(line)) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || *end != '\0' || !std::isfinite(v)) {
        throw Error(ErrorCode::Io, fmt::format("{}:{}: not a finite number: '{}'", path, lineno, f));
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, path + ": cannot write");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::Io, path + ": rename failed: " + ec.message());
  }
}

std::string bench_csv(const std::vector<TrialResult>& rows) {
  std::string out = csv_header() + "\n";
  for (const TrialResult& r : rows) out += csv_row(r) + "\n";
  return out;
}

std::string summary_table(const std::vector<CellSummary>& cells) {
  bool any_psnr = false;
  for (const auto& c : cells) any_psnr = any_psnr || c.mean_psnr.has_value();
  std::string out = fmt::format("{:<10}{:>8}{:>8}{:>12}{:>12}", "Algorithm", "n", "iter", "time", "res");
  if (any_psnr) out += fmt::format("{:>10}", "PSNR");
  out += fmt::format("{:>8}\n", "failed");
  for (const auto& c : cells) {
    if (c.trials == 0) {
      out += fmt::format("{:<10}{:>8}{:>8}{:>12}{:>12}", to_string(c.algorithm), c.n, "-", "-", "-");
      if (any_psnr) out += fmt::format("{:>10}", "-");
    } else {
      out += fmt::format("{:<10}{:>8}{:>8}{:>12.2f}{:>12.2e}", to_string(c.algorithm), c.n,
                         static_cast<long long>(std::llround(c.mean_iter)), c.mean_time, c.mean_res);
      if (any_psnr) out += c.mean_psnr ? fmt::format("{:>10.2f}", *c.mean_psnr) : fmt::format("{:>10}", "");
    }
    out += fmt::format("{:>8}\n", c.failed);
  }
  return out;
}

}  // namespace boxl0::cli
