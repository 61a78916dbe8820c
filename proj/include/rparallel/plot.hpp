#pragma once

#include <string>
#include <vector>

#include "rparallel/io.hpp"

namespace rparallel::plot {

/// One curve to draw: x and y samples; missing y values break the line.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Numeric columns of a measure or summary CSV as series against `r`.
/// With an empty `columns` every numeric column except `r` that has at least
/// one value is taken. Throws ParseError if the table has no `r` column or a
/// requested column is absent.
std::vector<Series> series_from_csv(const io::CsvTable& table, const std::string& label_prefix,
                                    const std::vector<std::string>& columns = {});

/// Static SVG line chart: axes with ticks, a legend and one <polyline> per
/// contiguous run of non-missing samples. Each polyline carries the series
/// label in a data-series attribute and a per-series stroke color.
std::string render_svg(const std::vector<Series>& series, const std::string& title = "");

}  // namespace rparallel::plot
