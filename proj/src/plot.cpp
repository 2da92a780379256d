#include "uavassoc/plot.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

namespace uavassoc::plot {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 60;
constexpr double kRight = 130;
constexpr double kTop = 20;
constexpr double kBottom = 50;

const char* colour(std::size_t k) {
  static const char* palette[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  return palette[k % 5];
}

}  // namespace

std::string coverage_svg(std::span<const harness::CoverageResult> rows, const std::string& x_label) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const harness::CoverageResult*>> lines;
  double xmin = 0.0;
  double xmax = 1.0;
  bool first = true;
  for (const auto& r : rows) {
    if (!lines.count(r.policy)) order.push_back(r.policy);
    lines[r.policy].push_back(&r);
    xmin = first ? r.axis_value : std::min(xmin, r.axis_value);
    xmax = first ? r.axis_value : std::max(xmax, r.axis_value);
    first = false;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - y) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double y = k / 5.0;
    os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << sy(y) << "\" y2=\""
       << sy(y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\">" << y
       << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double x = xmin + (xmax - xmin) * k / 5.0;
    os << "<text x=\"" << sx(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << x
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << x_label << "</text>\n";
  os << "<text transform=\"rotate(-90)\" x=\"" << -(kTop + ph / 2) << "\" y=\"16\" text-anchor=\"middle\">"
     << "coverage probability</text>\n";
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto pts = lines[order[k]];
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->axis_value < b->axis_value; });
    os << "<polyline fill=\"none\" stroke=\"" << colour(k) << "\" stroke-width=\"2\" points=\"";
    for (auto* p : pts) os << sx(p->axis_value) << ',' << sy(p->coverage) << ' ';
    os << "\"/>\n";
    const double ly = kTop + 20 + 20.0 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + pw + 10 << "\" x2=\"" << kLeft + pw + 30 << "\" y1=\"" << ly
       << "\" y2=\"" << ly << "\" stroke=\"" << colour(k) << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << ly + 4 << "\">" << order[k] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace uavassoc::plot
