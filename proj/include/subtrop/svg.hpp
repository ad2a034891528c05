#ifndef SUBTROP_SVG_HPP_
#define SUBTROP_SVG_HPP_

#include <string>
#include <vector>

namespace subtrop {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double half_width = 0.0;  // error bar extends y +- half_width
};

struct PlotSeries {
  std::string label;
  std::vector<PlotPoint> points;  // drawn in the given order
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 640;
  int height = 420;
};

// Minimal standalone SVG: axes with ticks, one polyline per series, vertical
// error bars and a legend. Output depends only on the input values.
std::string render_svg(const LinePlot& plot);

// Characters unsafe in XML text are escaped.
std::string xml_escape(const std::string& s);

}  // namespace subtrop

#endif  // SUBTROP_SVG_HPP_
