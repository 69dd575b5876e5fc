#include "pegtrace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pegtrace/shape_invariant.hpp"

namespace pegtrace {

namespace {

// Coordinates in a 1000-unit viewport with y up; fixed decimals keep the
// output diff-able.
struct Frame {
  double x0, y0, scale;
  double X(double x) const { return (x - x0) * scale; }
  double Y(double y) const { return 1000.0 - (y - y0) * scale; }
};

Frame fit(double xmin, double xmax, double ymin, double ymax) {
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double scale = 900.0 / span;
  return Frame{xmin - 50.0 / scale, ymin - 50.0 / scale, scale};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::string svg_polygon_diameters(const Polygon& p,
                                  const std::vector<Diameter>& positive) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Point& v : p.vertices()) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const Frame fr = fit(xmin, xmax, ymin, ymax);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" "
         "height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
  out << "  <polygon points=\"";
  for (const Point& v : p.vertices()) {
    out << fmt(fr.X(v.x)) << "," << fmt(fr.Y(v.y)) << " ";
  }
  out << "\" fill=\"#f0f0f0\" stroke=\"#333333\" stroke-width=\"3\"/>\n";
  int color = 0;
  for (const Diameter& d : positive) {
    out << "  <line x1=\"" << fmt(fr.X(d.q1.p.x)) << "\" y1=\""
        << fmt(fr.Y(d.q1.p.y)) << "\" x2=\"" << fmt(fr.X(d.q2.p.x))
        << "\" y2=\"" << fmt(fr.Y(d.q2.p.y)) << "\" stroke=\""
        << kPalette[color % 8] << "\" stroke-width=\"2.5\"/>\n";
    for (const Point& q : {d.q1.p, d.q2.p}) {
      out << "  <circle cx=\"" << fmt(fr.X(q.x)) << "\" cy=\""
          << fmt(fr.Y(q.y)) << "\" r=\"5\" fill=\"" << kPalette[color % 8]
          << "\"/>\n";
    }
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_shape_curves(const Polygon& p,
                             const std::vector<ArcComponent>& comps) {
  double m = 1e-9;
  for (const ArcComponent& c : comps) {
    for (const TraceSample& s : c.samples) {
      m = std::max({m, s.rect.X, s.rect.Y});
    }
  }
  const Frame fr = fit(0, m, 0, m);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" "
         "height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
  // Axes.
  out << "  <line x1=\"" << fmt(fr.X(0)) << "\" y1=\"" << fmt(fr.Y(0))
      << "\" x2=\"" << fmt(fr.X(m)) << "\" y2=\"" << fmt(fr.Y(0))
      << "\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
  out << "  <line x1=\"" << fmt(fr.X(0)) << "\" y1=\"" << fmt(fr.Y(0))
      << "\" x2=\"" << fmt(fr.X(0)) << "\" y2=\"" << fmt(fr.Y(m))
      << "\" stroke=\"#000000\" stroke-width=\"2\"/>\n";

  int color = 0;
  for (const ArcComponent& c : comps) {
    const ShapeLoop loop = shape_loop(shape_curve(c));
    // Shaded loop region under the curve-plus-axis closure.
    out << "  <path d=\"M";
    const size_t stride = std::max<size_t>(1, loop.chain.size() / 800);
    for (size_t i = 0; i < loop.chain.size(); i += stride) {
      const Vec2& z = loop.chain[i];
      out << fmt(fr.X(z.x)) << " " << fmt(fr.Y(z.y)) << " L";
    }
    const Vec2& zb = loop.chain.back();
    out << fmt(fr.X(zb.x)) << " " << fmt(fr.Y(zb.y)) << " Z\" fill=\""
        << kPalette[color % 8] << "\" fill-opacity=\"0.12\" stroke=\""
        << kPalette[color % 8] << "\" stroke-width=\"1.8\"/>\n";
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pegtrace
