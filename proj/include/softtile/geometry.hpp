#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "softtile/error.hpp"

namespace softtile {

// All lengths are in micrometres unless a name says otherwise.

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double manhattan(Point a, Point b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

/// Axis-aligned rectangle anchored at its lower-left corner.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double top() const { return y + h; }
  double area() const { return w * h; }
  Point center() const { return {x + w / 2.0, y + h / 2.0}; }
  bool empty() const { return w <= 0.0 || h <= 0.0; }

  Rect inflated(double margin) const {
    return {x - margin, y - margin, w + 2.0 * margin, h + 2.0 * margin};
  }

  Rect translated(double dx, double dy) const { return {x + dx, y + dy, w, h}; }

  /// Boundary-inclusive containment with an absolute slack `eps`.
  bool contains(const Rect& other, double eps = 1e-9) const {
    return other.x >= x - eps && other.y >= y - eps &&
           other.right() <= right() + eps && other.top() <= top() + eps;
  }

  bool contains(Point p, double eps = 1e-9) const {
    return p.x >= x - eps && p.x <= right() + eps && p.y >= y - eps &&
           p.y <= top() + eps;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// True iff the interiors intersect; touching edges and zero-area rects never
/// overlap.
inline bool overlaps(const Rect& a, const Rect& b) {
  if (a.empty() || b.empty()) return false;
  return a.x < b.right() && b.x < a.right() && a.y < b.top() && b.y < a.top();
}

inline double intersection_area(const Rect& a, const Rect& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double h = std::min(a.top(), b.top()) - std::max(a.y, b.y);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

/// L-infinity distance between corresponding corners.
inline double corner_distance(const Rect& a, const Rect& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y),
                   std::abs(a.right() - b.right()), std::abs(a.top() - b.top())});
}

/// Die outline of a tile. The die always sits at the origin; the I/O edge is
/// fixed to the left side.
struct DieOutline {
  double width = 0.0;
  double height = 0.0;
  double aspect = 1.0;  ///< requested width/height, kept verbatim for keys

  double area() const { return width * height; }
  double ratio() const { return width / height; }
  Rect rect() const { return {0.0, 0.0, width, height}; }

  friend bool operator==(const DieOutline&, const DieOutline&) = default;
};

enum class Orientation { R0, MY };

inline std::string_view to_string(Orientation o) { return o == Orientation::R0 ? "R0" : "MY"; }

inline Orientation orientation_from_string(std::string_view s) {
  if (s == "R0") return Orientation::R0;
  if (s == "MY") return Orientation::MY;
  throw Error(ErrorKind::Parse, "unknown orientation '" + std::string(s) + "'");
}

enum class FloorplanStyle { OneSided, TwoSided, UShape };

inline constexpr FloorplanStyle kAllStyles[] = {FloorplanStyle::OneSided, FloorplanStyle::TwoSided,
                                                FloorplanStyle::UShape};

inline std::string_view to_string(FloorplanStyle s) {
  switch (s) {
    case FloorplanStyle::OneSided: return "1-sided";
    case FloorplanStyle::TwoSided: return "2-sided";
    case FloorplanStyle::UShape: return "u-shape";
  }
  return "?";
}

inline FloorplanStyle style_from_string(std::string_view s) {
  for (FloorplanStyle style : kAllStyles)
    if (to_string(style) == s) return style;
  throw Error(ErrorKind::Usage, "unknown floorplan style '" + std::string(s) +
                                    "' (expected 1-sided, 2-sided or u-shape)");
}

struct MacroPlacement {
  std::string macro_id;
  Rect rect;
  Orientation orientation = Orientation::R0;

  friend bool operator==(const MacroPlacement&, const MacroPlacement&) = default;
};

/// Rectilinear region assigned to one soft module.
struct RegionPlacement {
  std::string module_id;
  std::vector<Rect> rects;
  double area = 0.0;         ///< sum of rect areas
  double utilization = 0.0;  ///< cell area / region area

  friend bool operator==(const RegionPlacement&, const RegionPlacement&) = default;
};

struct IoPin {
  std::string name;
  Point position;

  friend bool operator==(const IoPin&, const IoPin&) = default;
};

struct FloorplanLayout {
  DieOutline die;
  FloorplanStyle style = FloorplanStyle::OneSided;
  double halo = 2.0;
  std::vector<MacroPlacement> macros;
  std::vector<RegionPlacement> regions;
  std::vector<IoPin> io_pins;

  friend bool operator==(const FloorplanLayout&, const FloorplanLayout&) = default;
};

/// Lists every macro or region rect that extends beyond the die. The die
/// boundary itself is inclusive.
inline std::vector<std::string> within_die(const FloorplanLayout& layout, double eps = 1e-6) {
  std::vector<std::string> offenders;
  const Rect die = layout.die.rect();
  for (const auto& m : layout.macros)
    if (!die.contains(m.rect, eps)) offenders.push_back(m.macro_id);
  for (const auto& r : layout.regions)
    for (const auto& rect : r.rects)
      if (!die.contains(rect, eps)) {
        offenders.push_back(r.module_id);
        break;
      }
  return offenders;
}

/// Pairs of macros whose halo-inflated rects intersect the other macro.
inline std::vector<std::pair<std::string, std::string>> halo_conflicts(
    const FloorplanLayout& layout, double eps = 1e-6) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& ms = layout.macros;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const Rect a = ms[i].rect.inflated(layout.halo - eps);
      const Rect b = ms[j].rect.inflated(layout.halo - eps);
      if (overlaps(a, b)) out.emplace_back(ms[i].macro_id, ms[j].macro_id);
    }
  return out;
}

/// Reflection about the horizontal midline y = H/2.
inline Rect mirror_about_midline(const Rect& r, double die_height) {
  return {r.x, die_height - r.y - r.h, r.w, r.h};
}

/// Maximum distance between a macro and the reflection of its greedily matched
/// mirror partner. A macro may be its own partner (self-mirror about the
/// midline); unmatched macros fall back to their own reflection.
inline double vertical_symmetry_error(const FloorplanLayout& layout) {
  const auto& ms = layout.macros;
  const double H = layout.die.height;
  struct Candidate {
    double distance;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(ms.size() * (ms.size() + 1) / 2);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j)
      candidates.push_back({corner_distance(ms[i].rect, mirror_about_midline(ms[j].rect, H)), i, j});
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });

  std::vector<bool> used(ms.size(), false);
  double worst = 0.0;
  for (const auto& c : candidates) {
    if (used[c.i] || used[c.j]) continue;
    used[c.i] = used[c.j] = true;
    worst = std::max(worst, c.distance);
  }
  return worst;
}

/// Decomposes the die minus the halo-inflated macros into disjoint rects using
/// vertical guillotine cuts at every macro x-boundary. Horizontally adjacent
/// pieces with identical y-extent are merged.
inline std::vector<Rect> free_space(const FloorplanLayout& layout) {
  const Rect die = layout.die.rect();
  std::vector<Rect> blocked;
  blocked.reserve(layout.macros.size());
  for (const auto& m : layout.macros) {
    Rect r = m.rect.inflated(layout.halo);
    const double x0 = std::clamp(r.x, die.x, die.right());
    const double x1 = std::clamp(r.right(), die.x, die.right());
    const double y0 = std::clamp(r.y, die.y, die.top());
    const double y1 = std::clamp(r.top(), die.y, die.top());
    if (x1 > x0 && y1 > y0) blocked.push_back({x0, y0, x1 - x0, y1 - y0});
  }

  std::vector<double> cuts{die.x, die.right()};
  for (const auto& b : blocked) {
    cuts.push_back(b.x);
    cuts.push_back(b.right());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  constexpr double kSliver = 1e-9;
  std::vector<Rect> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double x0 = cuts[k];
    const double x1 = cuts[k + 1];
    if (x1 - x0 <= kSliver) continue;

    std::vector<std::pair<double, double>> spans;
    for (const auto& b : blocked)
      if (b.x < x1 - kSliver && b.right() > x0 + kSliver) spans.emplace_back(b.y, b.top());
    std::sort(spans.begin(), spans.end());

    std::vector<Rect> strip;
    double cursor = die.y;
    for (const auto& [lo, hi] : spans) {
      if (lo > cursor + kSliver) strip.push_back({x0, cursor, x1 - x0, lo - cursor});
      cursor = std::max(cursor, hi);
    }
    if (die.top() > cursor + kSliver) strip.push_back({x0, cursor, x1 - x0, die.top() - cursor});

    for (const Rect& piece : strip) {
      auto match = std::find_if(out.begin(), out.end(), [&](const Rect& r) {
        return std::abs(r.right() - x0) <= kSliver && r.y == piece.y && r.h == piece.h;
      });
      if (match != out.end())
        match->w = x1 - match->x;
      else
        out.push_back(piece);
    }
  }
  return out;
}

}  // namespace softtile
