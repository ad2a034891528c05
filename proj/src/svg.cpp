#include "subtrop/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace subtrop {

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Roughly five ticks at 1/2/5 multiples of a power of ten.
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    step = f * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9;
       t += step) {
    out.push_back(t);
  }
  return out;
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string render_svg(const LinePlot& plot) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : plot.series) {
    for (const auto& p : s.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      const double hw = std::isfinite(p.half_width) ? p.half_width : 0.0;
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y - hw);
      y_hi = std::max(y_hi, p.y + hw);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  }
  if (x_hi <= x_lo) x_lo -= 0.5, x_hi += 0.5;
  y_lo = std::min(y_lo, 0.0);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  y_hi += 0.05 * (y_hi - y_lo);

  const double left = 70, right = 170, top = 40, bottom = 55;
  const double pw = plot.width - left - right;
  const double ph = plot.height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return top + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width
    << "\" height=\"" << plot.height << "\" viewBox=\"0 0 " << plot.width
    << ' ' << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\""
    << " font-size=\"14\">" << xml_escape(plot.title) << "</text>\n";

  o << "<g stroke=\"#333\" fill=\"none\">\n";
  o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\""
    << num(left + pw) << "\" y2=\"" << num(top + ph) << "\"/>\n";
  o << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\""
    << num(left) << "\" y2=\"" << num(top + ph) << "\"/>\n";
  o << "</g>\n";

  o << "<g fill=\"#333\">\n";
  for (double t : nice_ticks(x_lo, x_hi)) {
    o << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(top + ph)
      << "\" x2=\"" << num(sx(t)) << "\" y2=\"" << num(top + ph + 5)
      << "\" stroke=\"#333\"/>\n";
    o << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(top + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(y_lo, y_hi)) {
    o << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy(t))
      << "\" x2=\"" << num(left) << "\" y2=\"" << num(sy(t))
      << "\" stroke=\"#333\"/>\n";
    o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(t) + 4)
      << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\""
    << num(plot.height - 12.0) << "\" text-anchor=\"middle\">"
    << xml_escape(plot.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(top + ph / 2)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(top + ph / 2) << ")\">" << xml_escape(plot.y_label) << "</text>\n";
  o << "</g>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    const char* color = kPalette[s % kPalette.size()];
    o << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    std::string path;
    for (const auto& p : series.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      path += (path.empty() ? "" : " ") + num(sx(p.x)) + "," + num(sy(p.y));
    }
    if (!path.empty()) {
      o << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"" << path
        << "\"/>\n";
    }
    for (const auto& p : series.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      const double hw = std::isfinite(p.half_width) ? p.half_width : 0.0;
      if (hw > 0.0) {
        const double x = sx(p.x);
        o << "<line x1=\"" << num(x) << "\" y1=\"" << num(sy(p.y - hw))
          << "\" x2=\"" << num(x) << "\" y2=\"" << num(sy(p.y + hw)) << "\"/>\n";
        for (double y : {p.y - hw, p.y + hw}) {
          o << "<line x1=\"" << num(x - 4) << "\" y1=\"" << num(sy(y))
            << "\" x2=\"" << num(x + 4) << "\" y2=\"" << num(sy(y)) << "\"/>\n";
        }
      }
      o << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y))
        << "\" r=\"3\"/>\n";
    }
    const double ly = top + 10 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << num(left + pw + 15) << "\" y1=\"" << num(ly)
      << "\" x2=\"" << num(left + pw + 35) << "\" y2=\"" << num(ly)
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(left + pw + 40) << "\" y=\"" << num(ly + 4)
      << "\" stroke=\"none\" fill=\"#333\">" << xml_escape(series.label)
      << "</text>\n";
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace subtrop
