#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "mdsense/experiment.hpp"

namespace mdsense {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 620.0;  // legend lives to the right of this
constexpr double kTop = 40.0;
constexpr double kBottom = 440.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
const char* const kRefPalette[] = {"#333333", "#7f7f7f"};

bool is_reference(const ResultRow& row) {
  return row.algorithm == "ground-truth" || row.algorithm == "nucmin";
}

double metric_of(const ResultRow& row, const std::string& metric) {
  if (metric == "nuclear_norm") return row.nuclear_norm;
  if (metric == "effective_rank") return row.effective_rank;
  if (metric == "recon_error") return row.recon_error;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + metric + "'");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '&') out += "&amp;";
    else if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else out += ch;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void settle(double pad_fraction, double min_span) {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < min_span) {
      const double mid = 0.5 * (lo + hi);
      lo = mid - 0.5 * min_span;
      hi = mid + 0.5 * min_span;
    }
    const double pad = pad_fraction * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

}  // namespace

std::string render_svg(const std::vector<ResultRow>& rows, const std::string& metric) {
  const bool log_y = metric == "recon_error";
  // Values at or below this are drawn on the floor of a log axis.
  constexpr double kLogFloor = 1e-16;
  const auto y_of = [&](double v) { return log_y ? std::log10(std::max(v, kLogFloor)) : v; };

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::pair<std::string, double>> refs;
  Range xr, yr;
  for (const ResultRow& row : rows) {
    const double v = metric_of(row, metric);
    if (!std::isfinite(v)) continue;
    if (is_reference(row)) {
      refs.emplace_back(row.algorithm, y_of(v));
      yr.add(y_of(v));
    } else if (row.alpha > 0.0) {
      const double x = std::log10(row.alpha);
      series[row.algorithm].emplace_back(x, y_of(v));
      xr.add(x);
      yr.add(y_of(v));
    }
  }
  xr.settle(0.03, 1.0);
  yr.settle(0.08, log_y ? 1.0 : 1e-3);
  const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kRight - kLeft); };
  const auto py = [&](double y) { return kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kBottom - kTop); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(0.5 * (kLeft + kRight)) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(metric) << " vs initialization size</text>\n";

  // Axes and ticks.
  svg << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kRight - kLeft << "\" height=\"" << kBottom - kTop << "\"/></g>\n";
  svg << "<g font-size=\"11\">\n";
  for (double t = std::ceil(xr.lo); t <= std::floor(xr.hi); t += 1.0) {
    const std::string x = num(px(t));
    svg << "<line x1=\"" << x << "\" y1=\"" << kBottom << "\" x2=\"" << x << "\" y2=\"" << kBottom + 5
        << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << kBottom + 18
        << "\" text-anchor=\"middle\">" << label(t) << "</text>\n";
  }
  const int y_ticks = 5;
  for (int k = 0; k <= y_ticks; ++k) {
    double t = yr.lo + (yr.hi - yr.lo) * k / y_ticks;
    if (log_y) t = std::round(t);
    if (t < yr.lo || t > yr.hi) continue;
    const std::string y = num(py(t));
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
        << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << y
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
        << (log_y ? "1e" + label(t) : label(t)) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << num(0.5 * (kLeft + kRight)) << "\" y=\"" << kBottom + 40
      << "\" text-anchor=\"middle\">log10(alpha)</text>\n";
  svg << "<text x=\"20\" y=\"" << num(0.5 * (kTop + kBottom)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << num(0.5 * (kTop + kBottom)) << ")\">" << escape(metric) << (log_y ? " (log scale)" : "") << "</text>\n";

  double legend_y = kTop + 10.0;
  const auto legend = [&](const std::string& name, const char* color, bool dashed) {
    svg << "<line x1=\"" << kRight + 15 << "\" y1=\"" << num(legend_y) << "\" x2=\"" << kRight + 45
        << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/><text x=\"" << kRight + 52 << "\" y=\""
        << num(legend_y) << "\" dominant-baseline=\"middle\">" << escape(name) << "</text>\n";
    legend_y += 20.0;
  };

  std::size_t ref_index = 0;
  for (const auto& [name, y] : refs) {
    const char* color = kRefPalette[ref_index++ % 2];
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(y)) << "\" x2=\"" << kRight << "\" y2=\""
        << num(py(y)) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    legend(name, color, true);
  }
  std::size_t index = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = kPalette[index++ % (sizeof kPalette / sizeof kPalette[0])];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      svg << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    }
    svg << "\"/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    legend(name, color, false);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mdsense
