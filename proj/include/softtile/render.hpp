#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>

#include "softtile/digest.hpp"
#include "softtile/geometry.hpp"
#include "softtile/qor.hpp"
#include "softtile/soft_placer.hpp"
#include "softtile/tiler.hpp"

namespace softtile {

enum class RenderTarget { Layout, Density, Congestion, TopLevel };
enum class ColorScale { Linear, Log };

inline std::string_view to_string(RenderTarget t) {
  switch (t) {
    case RenderTarget::Layout: return "layout";
    case RenderTarget::Density: return "density";
    case RenderTarget::Congestion: return "congestion";
    case RenderTarget::TopLevel: return "toplevel";
  }
  return "layout";
}

inline RenderTarget render_target_from_string(std::string_view s) {
  for (auto t : {RenderTarget::Layout, RenderTarget::Density, RenderTarget::Congestion, RenderTarget::TopLevel})
    if (to_string(t) == s) return t;
  throw Error(ErrorKind::Usage, "unknown render target '" + std::string(s) + "'");
}

struct RenderSpec {
  RenderTarget target = RenderTarget::Layout;
  ColorScale scale = ColorScale::Linear;
  double um_per_px = 2.0;
};

struct DensityView {
  DensityMap map;
  FloorplanLayout layout;
};

struct CongestionView {
  CongestionMap map;
  FloorplanLayout layout;
};

using RenderInput = std::variant<FloorplanLayout, DensityView, CongestionView, TopLevelPlan>;

struct Rgb {
  int r, g, b;
};

/// Dark blue -> blue -> cyan -> yellow -> red for t in [0, 1].
inline Rgb heat_color(double t) {
  static constexpr std::array<Rgb, 5> stops{{{0, 0, 139}, {0, 0, 255}, {0, 255, 255}, {255, 255, 0}, {255, 0, 0}}};
  if (!(t > 0.0)) return stops.front();
  if (t >= 1.0) return stops.back();
  const double s = t * (stops.size() - 1);
  const auto i = static_cast<std::size_t>(s);
  const double f = s - static_cast<double>(i);
  auto mix = [f](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
  return {mix(stops[i].r, stops[i + 1].r), mix(stops[i].g, stops[i + 1].g), mix(stops[i].b, stops[i + 1].b)};
}

namespace detail {

class SvgWriter {
 public:
  SvgWriter(double width_um, double height_um, double um_per_px) : h_um_(height_um), scale_(um_per_px) {
    if (!(um_per_px > 0.0)) throw Error(ErrorKind::Usage, "render scale must be positive");
    const double w = width_um / scale_, h = height_um / scale_;
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(w) + "\" height=\"" + num(h) +
            "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

  static std::string color(Rgb c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
  }

  void open_group(std::string_view id) { out_ += "<g id=\"" + std::string(id) + "\">\n"; }
  void close_group() { out_ += "</g>\n"; }

  /// `r` is in die coordinates (y up); SVG y grows downwards.
  void rect(const Rect& r, std::string_view fill, std::string_view extra = {}) {
    out_ += "<rect x=\"" + num(r.x / scale_) + "\" y=\"" + num((h_um_ - r.top()) / scale_) + "\" width=\"" +
            num(r.w / scale_) + "\" height=\"" + num(r.h / scale_) + "\" fill=\"" + std::string(fill) + "\"";
    if (!extra.empty()) out_ += " " + std::string(extra);
    out_ += "/>\n";
  }

  void line(Point a, Point b, std::string_view stroke) {
    out_ += "<line x1=\"" + num(a.x / scale_) + "\" y1=\"" + num((h_um_ - a.y) / scale_) + "\" x2=\"" +
            num(b.x / scale_) + "\" y2=\"" + num((h_um_ - b.y) / scale_) + "\" stroke=\"" + std::string(stroke) +
            "\"/>\n";
  }

  void text(Point at, std::string_view s, double size_px = 10.0) {
    std::string escaped;
    for (char c : s) {
      if (c == '<') escaped += "&lt;";
      else if (c == '>') escaped += "&gt;";
      else if (c == '&') escaped += "&amp;";
      else escaped += c;
    }
    out_ += "<text x=\"" + num(at.x / scale_) + "\" y=\"" + num((h_um_ - at.y) / scale_) + "\" font-size=\"" +
            num(size_px) + "\" font-family=\"monospace\">" + escaped + "</text>\n";
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  double h_um_;
  double scale_;
  std::string out_;
};

inline std::string region_color(std::string_view module_id) {
  static constexpr std::array<Rgb, 8> palette{{{141, 211, 199}, {255, 255, 179}, {190, 186, 218}, {251, 128, 114},
                                               {128, 177, 211}, {253, 180, 98}, {179, 222, 105}, {252, 205, 229}}};
  return SvgWriter::color(palette[fnv1a64(module_id) % palette.size()]);
}

inline void draw_die(SvgWriter& w, const FloorplanLayout& layout) {
  w.rect(layout.die.rect(), "none", "stroke=\"black\" stroke-width=\"1\"");
}

inline void draw_macros(SvgWriter& w, const FloorplanLayout& layout) {
  w.open_group("macros");
  for (const auto& m : layout.macros) w.rect(m.rect, "black");
  w.close_group();
}

inline double scaled(double v, double max, ColorScale scale) {
  if (!(max > 0.0) || !(v > 0.0)) return 0.0;
  const double t = std::min(v / max, 1.0);
  return scale == ColorScale::Log ? std::log10(1.0 + 9.0 * t) : t;
}

inline std::string render_layout(const FloorplanLayout& layout, const RenderSpec& spec) {
  SvgWriter w(layout.die.width, layout.die.height, spec.um_per_px);
  draw_die(w, layout);
  w.open_group("regions");
  for (const auto& r : layout.regions) {
    const std::string fill = region_color(r.module_id);
    for (const auto& rect : r.rects) w.rect(rect, fill, "fill-opacity=\"0.8\"");
  }
  w.close_group();
  draw_macros(w, layout);
  w.open_group("io");
  for (const auto& pin : layout.io_pins) w.line(pin.position, {pin.position.x + 4.0 * spec.um_per_px, pin.position.y}, "#d4a000");
  w.close_group();
  w.open_group("labels");
  for (const auto& r : layout.regions) {
    if (r.rects.empty()) continue;
    const auto big = std::max_element(r.rects.begin(), r.rects.end(),
                                      [](const Rect& a, const Rect& b) { return a.area() < b.area(); });
    w.text(big->center(), r.module_id, 8.0);
  }
  w.close_group();
  return w.finish();
}

inline std::string render_grid(const FloorplanLayout& layout, int nx, int ny, double bin,
                               const std::vector<double>& values, double max, ColorScale scale, double um_per_px) {
  SvgWriter w(layout.die.width, layout.die.height, um_per_px);
  w.open_group("bins");
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Rect cell = BinGrid{nx, ny, bin}.cell(ix, iy, layout.die);
      const double v = values[static_cast<std::size_t>(iy) * nx + ix];
      w.rect(cell, SvgWriter::color(heat_color(scaled(v, max, scale))));
    }
  w.close_group();
  draw_macros(w, layout);
  draw_die(w, layout);
  return w.finish();
}

inline std::string render_toplevel(const TopLevelPlan& plan, const RenderSpec& spec) {
  SvgWriter w(plan.die.w, plan.die.h, spec.um_per_px);
  w.rect(plan.die, "none", "stroke=\"black\" stroke-width=\"1\"");
  w.open_group("tiles");
  for (const auto& t : plan.tiles) {
    std::string_view fill = "#9ecae1";
    if (t.kind == TileKind::Cache) fill = "#a1d99b";
    if (t.kind == TileKind::Manager) fill = "#9e6fcf";
    if (t.kind == TileKind::Io) fill = "#ffd92f";
    w.rect(t.rect, fill, "stroke=\"black\" stroke-width=\"0.5\"");
  }
  w.close_group();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s: %s Q=%g, utilization %.4f", plan.template_name.c_str(),
                std::string(to_string(plan.style)).c_str(), plan.q, plan.utilization);
  w.text({plan.die.w * 0.02, plan.die.h * 0.98}, buf, 14.0);
  return w.finish();
}

}  // namespace detail

/// Renders one of the supported inputs; the input must match spec.target.
inline std::string render_svg(const RenderInput& input, const RenderSpec& spec) {
  auto mismatch = [&]() -> std::string {
    throw Error(ErrorKind::Usage, "render target '" + std::string(to_string(spec.target)) +
                                      "' does not match the supplied input");
  };
  switch (spec.target) {
    case RenderTarget::Layout:
      if (const auto* l = std::get_if<FloorplanLayout>(&input)) return detail::render_layout(*l, spec);
      return mismatch();
    case RenderTarget::Density:
      if (const auto* d = std::get_if<DensityView>(&input))
        return detail::render_grid(d->layout, d->map.nx, d->map.ny, d->map.bin, d->map.utilization, 1.0, spec.scale,
                                   spec.um_per_px);
      return mismatch();
    case RenderTarget::Congestion:
      if (const auto* c = std::get_if<CongestionView>(&input)) {
        std::vector<double> ratio(c->map.demand.size(), 0.0);
        double max = 0.0;
        for (std::size_t k = 0; k < ratio.size(); ++k) {
          ratio[k] = c->map.capacity[k] > 0.0 ? c->map.demand[k] / c->map.capacity[k] : (c->map.demand[k] > 0.0 ? 1.0 : 0.0);
          max = std::max(max, ratio[k]);
        }
        return detail::render_grid(c->layout, c->map.nx, c->map.ny, c->map.bin, ratio, std::max(max, 1.0), spec.scale,
                                   spec.um_per_px);
      }
      return mismatch();
    case RenderTarget::TopLevel:
      if (const auto* p = std::get_if<TopLevelPlan>(&input)) return detail::render_toplevel(*p, spec);
      return mismatch();
  }
  return mismatch();
}

}  // namespace softtile
