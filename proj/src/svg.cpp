#include "peanolab/svg.h"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "peanolab/errors.h"

namespace peanolab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

}  // namespace

void write_loglog_svg(const RegressionFit& fit, double theory_slope, const PlotLabels& labels, std::ostream& out) {
  const std::vector<double>& xs = fit.log_x;
  const std::vector<double>& ys = fit.log_y;
  if (xs.empty() || xs.size() != ys.size()) throw ShapeError("plot needs matching, non-empty point lists");

  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  auto [x0, x1] = std::minmax_element(xs.begin(), xs.end());
  double xlo = *x0, xhi = *x1;
  if (xhi == xlo) xhi = xlo + 1.0;
  double ylo = *std::min_element(ys.begin(), ys.end());
  double yhi = *std::max_element(ys.begin(), ys.end());
  for (const double x : {xlo, xhi}) {
    for (const double y : {fit.intercept + fit.slope * x, my + theory_slope * (x - mx)}) {
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (yhi == ylo) yhi = ylo + 1.0;
  const double pad_x = 0.05 * (xhi - xlo), pad_y = 0.05 * (yhi - ylo);
  xlo -= pad_x, xhi += pad_x, ylo -= pad_y, yhi += pad_y;

  auto px = [&](double x) { return kMargin + (x - xlo) / (xhi - xlo) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) { return kHeight - kMargin - (y - ylo) / (yhi - ylo) * (kHeight - 2 * kMargin); };
  auto line = [&](double slope, double through_x, double through_y, const char* style) {
    out << "<line x1=\"" << px(xlo) << "\" y1=\"" << py(through_y + slope * (xlo - through_x)) << "\" x2=\""
        << px(xhi) << "\" y2=\"" << py(through_y + slope * (xhi - through_x)) << "\" " << style << "/>\n";
  };

  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(labels.title) << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(labels.x_axis) << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kHeight / 2 << ")\">" << escape(labels.y_axis) << "</text>\n";
  // tick labels at the corners of the data range
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" font-size=\"11\">" << xlo
      << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" text-anchor=\"end\" font-size=\"11\">" << xhi << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
      << "\" text-anchor=\"end\" font-size=\"11\">" << ylo << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 10 << "\" text-anchor=\"end\" font-size=\"11\">"
      << yhi << "</text>\n";

  line(theory_slope, mx, my, "stroke=\"gray\" stroke-dasharray=\"6 4\"");
  line(fit.slope, 0.0, fit.intercept, "stroke=\"crimson\" stroke-width=\"2\"");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i]) << "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  out << std::setprecision(4);
  out << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 20 << "\" font-size=\"12\" fill=\"crimson\">fit slope "
      << fit.slope << "</text>\n";
  out << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 36 << "\" font-size=\"12\" fill=\"gray\">theory slope "
      << theory_slope << "</text>\n";
  out << "</svg>\n";
}

}  // namespace peanolab
