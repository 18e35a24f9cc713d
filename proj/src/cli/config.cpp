#include <cstdlib>
#include <fstream>
#include <sstream>

#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"

namespace boxl0::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.size() >= 2 && item.front() == '"' && item.back() == '"') item = item.substr(1, item.size() - 2);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw Error(ErrorCode::InvalidArgument, key + ": not a number: '" + v + "'");
  return d;
}

long long to_integer(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw Error(ErrorCode::InvalidArgument, key + ": not an integer: '" + v + "'");
  return i;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const long long i = to_integer(key, v);
  if (i < 0) throw Error(ErrorCode::InvalidArgument, key + " must be >= 0");
  return static_cast<std::size_t>(i);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw Error(ErrorCode::InvalidArgument, key + ": expected true or false");
}

}  // namespace

ConfigValues parse_config_text(const std::string& text, const std::string& source) {
  ConfigValues values;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::InvalidArgument, source + ":" + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
      const auto items = split_list(value.substr(1, value.size() - 2));
      value.clear();
      for (std::size_t i = 0; i < items.size(); ++i) value += (i ? "," : "") + items[i];
    }
    values[key] = value;
  }
  return values;
}

ConfigValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_config(const ConfigValues& values, ExperimentConfig& c, std::string& out_path) {
  for (const auto& [key, v] : values) {
    if (key == "exp") {
      c.experiment = parse_experiment(v);
    } else if (key == "n") {
      c.sizes.clear();
      for (const auto& item : split_list(v)) c.sizes.push_back(to_size(key, item));
    } else if (key == "m_ratio") {
      c.m_ratio = to_double(key, v);
    } else if (key == "m") {
      c.m = to_size(key, v);
    } else if (key == "trials") {
      c.trials = static_cast<int>(to_integer(key, v));
    } else if (key == "seed") {
      c.master_seed = static_cast<std::uint64_t>(to_integer(key, v));
    } else if (key == "snr_db") {
      c.snr_db = to_double(key, v);
    } else if (key == "nf") {
      c.nf = to_double(key, v);
    } else if (key == "lambda") {
      c.lambda = to_double(key, v);
    } else if (key == "lambda_frac") {
      c.lambda_frac = to_double(key, v);
    } else if (key == "tau_cap") {
      c.tau_cap = to_double(key, v);
    } else if (key == "tol_rel") {
      c.tol_rel = to_double(key, v);
    } else if (key == "tol_f") {
      c.tol_f = to_double(key, v);
    } else if (key == "max_iter") {
      c.max_iter = static_cast<int>(to_integer(key, v));
    } else if (key == "strict") {
      c.strict_acceptance = to_bool(key, v);
    } else if (key == "algorithms") {
      c.algorithms.clear();
      for (const auto& item : split_list(v)) c.algorithms.push_back(parse_algorithm(item));
    } else if (key == "jobs") {
      c.jobs = static_cast<int>(to_integer(key, v));
    } else if (key == "image") {
      c.image.clear();
      c.image_path = v;
    } else if (key == "out") {
      out_path = v;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  }
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* s = std::getenv("BOXL0_SEED");
  if (s == nullptr || *s == '\0') return fallback;
  return static_cast<std::uint64_t>(to_integer("BOXL0_SEED", s));
}

}  // namespace boxl0::cli
