#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>

namespace formation::plot {
namespace {

constexpr int kCanvas = 640;
constexpr double kMargin = 0.12;

constexpr std::array<const char*, 8> kPartPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void write_svg(std::ostream& out, const FormationSystem& sys,
               const Configuration& p,
               const std::optional<IndependentPartition>& partition) {
  double lo_x = p.points[0].x(), hi_x = lo_x, lo_y = p.points[0].y(), hi_y = lo_y;
  for (const auto& x : p.points) {
    lo_x = std::min(lo_x, x.x());
    hi_x = std::max(hi_x, x.x());
    lo_y = std::min(lo_y, x.y());
    hi_y = std::max(hi_y, x.y());
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double pad = kMargin * span;
  lo_x -= pad;
  lo_y -= pad;
  const double scale = kCanvas / (span + 2 * pad);

  auto sx = [&](double x) { return (x - lo_x) * scale; };
  auto sy = [&](double y) { return kCanvas - (y - lo_y) * scale; };  // y up

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- formctl svg v1 -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas
      << "\" height=\"" << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " "
      << kCanvas << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << std::fixed << std::setprecision(2);

  for (std::size_t e = 0; e < sys.graph.edges().size(); ++e) {
    const Edge& ed = sys.graph.edges()[e];
    const auto& a = p.points[static_cast<std::size_t>(ed.first - 1)];
    const auto& b = p.points[static_cast<std::size_t>(ed.second - 1)];
    const char* color;
    if (partition) {
      color = kPartPalette[static_cast<std::size_t>(partition->part_of(ed)) %
                           kPartPalette.size()];
    } else {
      const double d = (a - b).norm();
      const double target = sys.targets[e];
      if (d > target * (1.0 + 1e-9))
        color = "#d62728";
      else if (d < target * (1.0 - 1e-9))
        color = "#1f77b4";
      else
        color = "#2ca02c";
    }
    out << "  <line x1=\"" << sx(a.x()) << "\" y1=\"" << sy(a.y()) << "\" x2=\""
        << sx(b.x()) << "\" y2=\"" << sy(b.y()) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
  }

  for (int i = 0; i < p.size(); ++i) {
    const auto& x = p.points[static_cast<std::size_t>(i)];
    out << "  <circle cx=\"" << sx(x.x()) << "\" cy=\"" << sy(x.y())
        << "\" r=\"6\" fill=\"#333333\"/>\n";
    out << "  <text x=\"" << sx(x.x()) + 8 << "\" y=\"" << sy(x.y()) - 8
        << "\" font-family=\"sans-serif\" font-size=\"14\">" << i + 1
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace formation::plot
