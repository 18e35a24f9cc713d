#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "boxl0/cli.hpp"
#include "boxl0/error.hpp"

namespace boxl0::cli {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 80;
constexpr double kRight = 150;
constexpr double kTop = 30;
constexpr double kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Series {
  std::string name;
  std::map<double, std::pair<double, int>> sums;  // n -> (sum, count)
};

std::string axis_label(const std::string& metric) {
  if (metric == "res") return "res";
  if (metric == "time_s") return "time (s)";
  if (metric == "iter") return "iterations";
  if (metric == "psnr") return "PSNR (dB)";
  return metric;
}

std::string format_tick(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e9) return fmt::format("{:.0f}", v);
  return fmt::format("{:.3g}", v);
}

}  // namespace

std::vector<int> log_decades(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "log axis needs 0 < lo <= hi");
  const int first = static_cast<int>(std::floor(std::log10(lo)));
  int last = static_cast<int>(std::ceil(std::log10(hi)));
  if (last == first) ++last;
  std::vector<int> out;
  for (int k = first; k <= last; ++k) out.push_back(k);
  return out;
}

std::string render_svg(const CsvTable& table, const std::string& metric) {
  const auto col_alg = table.column("algorithm");
  const auto col_n = table.column("n");
  const auto col_metric = table.column(metric);
  if (!col_alg || !col_n || !col_metric) {
    throw Error(ErrorCode::BadShape, "csv lacks one of the columns algorithm, n, " + metric);
  }
  if (table.rows.empty()) throw Error(ErrorCode::BadShape, "csv has no data rows");

  std::vector<Series> series;
  for (const auto& row : table.rows) {
    const std::size_t need = std::max({*col_alg, *col_n, *col_metric});
    if (row.size() <= need) throw Error(ErrorCode::BadShape, "csv row is shorter than the header");
    char* end = nullptr;
    const double n = std::strtod(row[*col_n].c_str(), &end);
    if (*end != '\0') throw Error(ErrorCode::BadShape, "non-numeric n '" + row[*col_n] + "'");
    const double v = std::strtod(row[*col_metric].c_str(), &end);
    if (row[*col_metric].empty() || *end != '\0' || !std::isfinite(v)) continue;
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.name == row[*col_alg]; });
    if (it == series.end()) {
      series.push_back({row[*col_alg], {}});
      it = series.end() - 1;
    }
    auto& cell = it->sums[n];
    cell.first += v;
    cell.second += 1;
  }
  if (series.empty()) throw Error(ErrorCode::BadShape, "no finite values in column " + metric);

  const bool log_y = metric == "res";
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY, min_pos = INFINITY;
  for (const auto& s : series) {
    for (const auto& [n, sc] : s.sums) {
      const double y = sc.first / sc.second;
      xmin = std::min(xmin, n);
      xmax = std::max(xmax, n);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
      if (y > 0.0) min_pos = std::min(min_pos, y);
    }
  }
  // Exact zeros have no place on a log axis; they are drawn one decade below the smallest positive mean.
  const double log_floor = std::isfinite(min_pos) ? min_pos / 10.0 : 1e-20;
  auto y_value = [&](double y) { return log_y ? std::max(y, log_floor) : y; };

  std::vector<double> yticks;
  double ylo, yhi;
  if (log_y) {
    const auto decades = log_decades(y_value(ymin), y_value(std::max(ymax, log_floor)));
    for (int k : decades) yticks.push_back(std::pow(10.0, k));
    ylo = std::log10(yticks.front());
    yhi = std::log10(yticks.back());
  } else {
    ylo = std::min(0.0, ymin);
    yhi = ymax > ylo ? ymax : ylo + 1.0;
    for (int i = 0; i <= 5; ++i) yticks.push_back(ylo + (yhi - ylo) * i / 5.0);
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double n) { return kLeft + (n - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    const double t = log_y ? std::log10(y_value(y)) : y;
    return kTop + (1.0 - (t - ylo) / (yhi - ylo)) * ph;
  };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
  // Axes.
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft, kTop + ph,
                     kLeft + pw);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop, kTop + ph);
  std::vector<double> xticks;
  for (const auto& s : series) {
    for (const auto& kv : s.sums) xticks.push_back(kv.first);
  }
  std::sort(xticks.begin(), xticks.end());
  xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
  for (double n : xticks) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n", px(n),
                       kTop + ph, kTop + ph + 5);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", px(n),
                       kTop + ph + 18, format_tick(n));
  }
  for (double t : yticks) {
    const double y = log_y ? kTop + (1.0 - (std::log10(t) - ylo) / (yhi - ylo)) * ph : py(t);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n", kLeft, y,
                       kLeft + pw);
    const std::string label = log_y ? fmt::format("1e{}", static_cast<int>(std::lround(std::log10(t)))) : format_tick(t);
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", kLeft - 6,
                       y + 4, label);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">n</text>\n", kLeft + pw / 2,
                     kHeight - 15);
  svg += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
      kTop + ph / 2, axis_label(metric));

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    std::string points;
    for (const auto& [n, sc] : series[i].sums) {
      points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", px(n), py(sc.first / sc.second));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, points);
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    svg += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"14\" height=\"4\" fill=\"{}\"/>\n", kLeft + pw + 15,
                       ly - 2, color);
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-size=\"12\">{}</text>\n", kLeft + pw + 35, ly + 4,
                       series[i].name);
  }
  svg += "</svg>\n";
  return svg;
}

int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err) {
  std::string svg;
  try {
    svg = render_svg(read_csv_table(opt.csv_path), opt.metric);
  } catch (const std::exception& e) {
    fmt::print(err, "plot: {}: {}\n", opt.csv_path, e.what());
    return kExitUsage;
  }
  try {
    write_file_atomic(opt.out_path, svg);
  } catch (const std::exception& e) {
    fmt::print(err, "plot: {}\n", e.what());
    return kExitFailure;
  }
  fmt::print(out, "wrote {}\n", opt.out_path);
  return kExitOk;
}

}  // namespace boxl0::cli
