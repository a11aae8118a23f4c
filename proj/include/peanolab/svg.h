#pragma once

#include <iosfwd>
#include <string>

#include "peanolab/exponents.h"

namespace peanolab {

struct PlotLabels {
  std::string title;
  std::string x_axis = "log x";
  std::string y_axis = "log y";
};

/// Log-log scatter of the fitted points, the fitted line, and a dashed guide
/// with the theoretical slope through the centroid of the points.
void write_loglog_svg(const RegressionFit& fit, double theory_slope, const PlotLabels& labels, std::ostream& out);

}  // namespace peanolab
