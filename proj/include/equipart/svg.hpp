#pragma once

// Deterministic SVG rendering of planar instances: fan partitions over C^1
// and hyperplane splits over R^1 / R^2.  No timestamps, fixed numeric
// formatting, so equal inputs give byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "equipart/algebra.hpp"
#include "equipart/groups.hpp"
#include "equipart/measures.hpp"
#include "equipart/partition.hpp"

namespace equipart::svg {

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string fmt_scalar(const FScalar& s) {
  std::string out = fmt(s[0]);
  const char* names[4] = {"", "i", "j", "k"};
  for (int k = 1; k < s.dimension(); ++k) {
    if (s[k] >= 0) out += "+";
    out += fmt(s[k]);
    out += names[k];
  }
  return out;
}

struct Frame {
  double cx = 0, cy = 0, scale = 1;  // world center and world->screen scale
  static constexpr double size = 640, pad = 48;

  double sx(double x) const { return size / 2 + (x - cx) * scale; }
  double sy(double y) const { return size / 2 - (y - cy) * scale; }
};

inline Frame fit(const std::vector<std::pair<double, double>>& pts) {
  double lo_x = -1, hi_x = 1, lo_y = -1, hi_y = 1;
  if (!pts.empty()) {
    lo_x = hi_x = pts[0].first;
    lo_y = hi_y = pts[0].second;
    for (const auto& [x, y] : pts) {
      lo_x = std::min(lo_x, x);
      hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
  }
  Frame f;
  f.cx = (lo_x + hi_x) / 2;
  f.cy = (lo_y + hi_y) / 2;
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  f.scale = (Frame::size - 2 * Frame::pad) / span;
  return f;
}

inline void circle(std::string& s, double cx, double cy, double r, const char* fill) {
  s += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
       "\" fill=\"" + fill + "\" fill-opacity=\"0.75\"/>\n";
}

inline void line(std::string& s, double x1, double y1, double x2, double y2,
                 const char* stroke, double width) {
  s += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
       "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
       fmt(width) + "\"/>\n";
}

inline void text(std::string& s, double x, double y, const std::string& msg) {
  s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
       "\" font-family=\"monospace\" font-size=\"12\" fill=\"#222\">" + msg +
       "</text>\n";
}

inline const char* weight_color(const FScalar& w) {
  return w[0] >= 0 ? "#2b6cb0" : "#c53030";
}

inline void draw_atoms(std::string& s, const Frame& f,
                       const std::vector<MassDistribution>& measures,
                       bool one_dim) {
  double wmax = 0;
  for (const auto& m : measures)
    for (const auto& atom : m.atoms()) wmax = std::max(wmax, norm(atom.w));
  if (wmax <= 0) wmax = 1;
  for (const auto& m : measures) {
    for (const auto& atom : m.atoms()) {
      const double x = atom.x[0][0];
      const double y = one_dim ? 0.0 : (atom.x.algebra() == Algebra::C
                                            ? atom.x[0][1]
                                            : (atom.x.size() > 1 ? atom.x[1][0] : 0.0));
      const double r = 3.0 + 7.0 * std::sqrt(norm(atom.w) / wmax);
      circle(s, f.sx(x), f.sy(y), r, weight_color(atom.w));
    }
  }
}

}  // namespace detail

/// Renders the partition over the given planar instance.  Supports F = C with
/// n = 1 (cyclic fans) and F = R with n <= 2; throws std::invalid_argument for
/// anything else.
inline std::string render_plot_svg(const FiniteSubgroup& G,
                                   const std::vector<MassDistribution>& measures,
                                   const PartitionParams& params) {
  const Algebra a = G.algebra;
  const int n = params.ambient_dim();
  const bool planar_c = (a == Algebra::C && n == 1);
  const bool planar_r = (a == Algebra::R && (n == 1 || n == 2));
  if (!planar_c && !planar_r)
    throw std::invalid_argument(
        "plot: unsupported dimension (supported: algebra C with n=1, algebra R "
        "with n<=2)");
  if (measures.empty()) throw std::invalid_argument("plot: no measures");

  std::vector<std::pair<double, double>> pts;
  for (const auto& m : measures)
    for (const auto& atom : m.atoms()) {
      const double x = atom.x[0][0];
      const double y = (n == 1 && a == Algebra::R)
                           ? 0.0
                           : (a == Algebra::C ? atom.x[0][1] : atom.x[1][0]);
      pts.emplace_back(x, y);
    }
  const detail::Frame f = detail::fit(pts);
  const double world_span = (detail::Frame::size - 2 * detail::Frame::pad) / f.scale;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 640\" "
       "width=\"640\" height=\"640\">\n";
  s += "<rect width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";

  std::vector<RegionMeasures> rms;
  for (const auto& m : measures) rms.push_back(measure_regions(m, params, G));
  const ABView view = ab_view(params);

  if (planar_c && view.defined) {
    // Fan center x0 = conj(b) * a and rays in the directions lambda_k * a.
    const FScalar x0 = conj(view.b) * view.a[0];
    const double L = 0.9 * world_span;
    for (const auto& fb : fan_boundary(params, G)) {
      const FScalar dir = fb.lambda * view.a[0];
      detail::line(s, f.sx(x0[0]), f.sy(x0[1]), f.sx(x0[0] + L * dir[0]),
                   f.sy(x0[1] + L * dir[1]), "#444444", 1.5);
    }
    for (int g = 0; g < G.order(); ++g) {
      const FScalar dir = G.element(g) * view.a[0];
      std::string label = "S" + std::to_string(g) + ":";
      for (const auto& rm : rms)
        label += " " + detail::fmt_scalar(rm.values[static_cast<std::size_t>(g)]);
      detail::text(s, f.sx(x0[0] + 0.55 * L * dir[0]), f.sy(x0[1] + 0.55 * L * dir[1]),
                   label);
    }
  } else if (planar_r && view.defined) {
    if (n == 1) {
      detail::line(s, f.sx(f.cx - world_span), f.sy(0), f.sx(f.cx + world_span),
                   f.sy(0), "#bbbbbb", 1.0);
      const double t = view.b[0] * view.a[0][0];  // threshold x with x*a = b
      detail::line(s, f.sx(t), f.sy(0) - 60, f.sx(t), f.sy(0) + 60, "#444444", 1.5);
      for (int g = 0; g < G.order(); ++g) {
        const double side = G.element(g)[0] * view.a[0][0];
        std::string label = (G.element(g)[0] > 0 ? "R+:" : "R-:");
        for (const auto& rm : rms)
          label += " " + detail::fmt_scalar(rm.values[static_cast<std::size_t>(g)]);
        detail::text(s, f.sx(t + 0.3 * world_span * side), f.sy(0) - 70, label);
      }
    } else {
      // Line <x, a> = b; drawn through p0 = b*a along the perpendicular.
      const double ax = view.a[0][0], ay = view.a[1][0], b = view.b[0];
      const double px = b * ax, py = b * ay;
      const double L = 1.2 * world_span;
      detail::line(s, f.sx(px - L * ay), f.sy(py + L * ax), f.sx(px + L * ay),
                   f.sy(py - L * ax), "#444444", 1.5);
      for (int g = 0; g < G.order(); ++g) {
        const double side = G.element(g)[0];
        std::string label = (side > 0 ? "R+:" : "R-:");
        for (const auto& rm : rms)
          label += " " + detail::fmt_scalar(rm.values[static_cast<std::size_t>(g)]);
        detail::text(s, f.sx(px + side * 0.35 * world_span * ax),
                     f.sy(py + side * 0.35 * world_span * ay), label);
      }
    }
  } else {
    detail::text(s, detail::Frame::pad, detail::Frame::pad,
                 "pole parameters: one region covers the whole space");
  }

  detail::draw_atoms(s, f, measures, planar_r && n == 1);
  s += "</svg>\n";
  return s;
}

}  // namespace equipart::svg
