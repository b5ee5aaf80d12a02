#pragma once

#include <string>
#include <vector>

#include "arvdm/experiment.hpp"

namespace arvdm {

struct PlotSpec {
  std::string x_column;
  std::vector<std::string> y_columns;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

/// Deterministic static line chart: fixed canvas, fixed precision, no fonts
/// embedded. A pure function of (table, spec).
std::string render_line_chart(const CsvTable& table, const PlotSpec& spec);

}  // namespace arvdm
