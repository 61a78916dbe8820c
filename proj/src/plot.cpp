#include "rparallel/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rparallel/error.hpp"

namespace rparallel::plot {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000", "#393b79"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Roughly five "nice" ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  double span = hi - lo;
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return out;
}

}  // namespace

std::vector<Series> series_from_csv(const io::CsvTable& table, const std::string& label_prefix,
                                    const std::vector<std::string>& columns) {
  auto x = table.numbers("r");
  std::vector<std::string> names = columns;
  if (names.empty()) {
    for (const auto& h : table.header) {
      if (h == "r") continue;
      try {
        auto values = table.numbers(h);
        if (std::any_of(values.begin(), values.end(), [](double v) { return !is_missing(v); })) names.push_back(h);
      } catch (const ParseError&) {
        // non-numeric column such as kind or pair
      }
    }
  }
  std::vector<Series> out;
  for (const auto& name : names) {
    out.push_back({label_prefix.empty() ? name : label_prefix + ":" + name, x, table.numbers(name)});
  }
  return out;
}

std::string render_svg(const std::vector<Series>& series, const std::string& title) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (is_missing(s.y[i]) || is_missing(s.x[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  ymin = std::min(ymin, 0.0);
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return kTop + ph - (v - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(title) << "</text>\n";
  }

  svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
      << fmt(kTop + ph) << "\"/>\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
      << fmt(kTop + ph) << "\"/>\n";
  svg << "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  for (double t : ticks(xmin, xmax)) {
    svg << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
        << fmt(kTop + ph + 5) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax)) {
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(py(t)) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 15)
      << "\" text-anchor=\"middle\" font-size=\"13\">r</text>\n</g>\n";

  svg << "<g class=\"curves\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = kPalette[k % kPaletteSize];
    const std::string dash = k >= kPaletteSize ? " stroke-dasharray=\"6 3\"" : "";
    std::ostringstream points;
    std::size_t run = 0;
    auto flush = [&] {
      if (run > 0) {
        svg << "<polyline data-series=\"" << escape(s.label) << "\" stroke=\"" << color << "\"" << dash
            << " points=\"" << points.str() << "\"/>\n";
      }
      points.str("");
      run = 0;
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (is_missing(s.y[i]) || is_missing(s.x[i])) {
        flush();
        continue;
      }
      points << (run ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      ++run;
    }
    flush();
  }
  svg << "</g>\n<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    double y = kTop + 10 + 18 * static_cast<double>(k);
    double x = kLeft + pw + 15;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 24) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"" << kPalette[k % kPaletteSize] << "\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << fmt(x + 30) << "\" y=\"" << fmt(y + 4) << "\">" << escape(series[k].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace rparallel::plot
