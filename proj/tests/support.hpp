#pragma once

// Independent checks shared by the unit suites and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "softtile/softtile.hpp"

namespace check {

using namespace softtile;

inline double spm_pitch_y(const ClusterSpec& spec, double halo) {
  double h = 0.0;
  for (const auto& m : spec.macros)
    if (is_spm(m.group)) h = std::max(h, m.height);
  return h + 2.0 * halo;
}

/// Superbank members occupy one run of consecutive slots in column-major
/// order: whole columns in the middle of the run, and a run touching a column
/// end at each side. Either vertical direction per column is accepted.
/// Mirrored styles are checked per die half.
inline std::string superbank_contiguity(const ClusterSpec& spec, const FloorplanLayout& layout) {
  struct Slot {
    double x, y;
    int bank;
  };
  std::map<int, std::vector<Slot>> arms;
  const double mid = layout.die.height / 2.0;
  for (const auto& p : layout.macros) {
    const MacroSpec* m = spec.find_macro(p.macro_id);
    if (!m || !is_spm(m->group)) continue;
    const Point c = p.rect.center();
    const int arm = layout.style == FloorplanStyle::OneSided ? 0 : (c.y > mid ? 1 : 2);
    arms[arm].push_back({c.x, c.y, superbank_index(m->group)});
  }
  for (auto& [arm, slots] : arms) {
    // columns ordered from the right edge inward
    std::vector<std::vector<Slot>> cols;
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.x > b.x; });
    for (const auto& s : slots) {
      if (cols.empty() || std::abs(cols.back().front().x - s.x) > 1e-6) cols.emplace_back();
      cols.back().push_back(s);
    }
    for (auto& c : cols) std::sort(c.begin(), c.end(), [](const Slot& a, const Slot& b) { return a.y < b.y; });

    std::map<int, std::vector<int>> cols_of;  // bank -> columns it touches
    for (std::size_t j = 0; j < cols.size(); ++j) {
      std::map<int, std::pair<int, int>> span;  // bank -> (first, last) index in column
      for (int i = 0; i < static_cast<int>(cols[j].size()); ++i) {
        const int b = cols[j][i].bank;
        auto it = span.find(b);
        if (it == span.end())
          span[b] = {i, i};
        else
          it->second.second = i;
      }
      for (const auto& [b, s] : span) {
        const int count = static_cast<int>(std::count_if(cols[j].begin(), cols[j].end(),
                                                         [b = b](const Slot& x) { return x.bank == b; }));
        if (s.second - s.first + 1 != count) return "superbank " + std::to_string(b) + " is split inside a column";
        cols_of[b].push_back(static_cast<int>(j));
      }
    }
    for (const auto& [b, js] : cols_of) {
      for (std::size_t k = 1; k < js.size(); ++k)
        if (js[k] != js[k - 1] + 1) return "superbank " + std::to_string(b) + " skips a column";
      if (js.size() < 2) continue;
      for (std::size_t k = 0; k < js.size(); ++k) {
        const auto& col = cols[static_cast<std::size_t>(js[k])];
        const bool first = col.front().bank == b, last = col.back().bank == b;
        const bool whole = std::all_of(col.begin(), col.end(), [b = b](const Slot& x) { return x.bank == b; });
        const bool interior = k > 0 && k + 1 < js.size();
        if (interior ? !whole : !(first || last))
          return "superbank " + std::to_string(b) + " does not continue across a column end";
      }
    }
  }
  return {};
}

/// Everything the geometry suite demands of a generated layout; empty when
/// the layout is sound.
inline std::vector<std::string> layout_problems(const ClusterSpec& spec, const FloorplanLayout& layout,
                                                std::size_t expected_macros = 36) {
  std::vector<std::string> out;
  if (layout.macros.size() != expected_macros)
    out.push_back("macro count " + std::to_string(layout.macros.size()));
  // pairwise halo check written out directly rather than via halo_conflicts
  for (std::size_t i = 0; i < layout.macros.size(); ++i)
    for (std::size_t j = i + 1; j < layout.macros.size(); ++j) {
      const Rect& a = layout.macros[i].rect;
      const Rect& b = layout.macros[j].rect;
      const double gx = std::max(a.x, b.x) - std::min(a.right(), b.right());
      const double gy = std::max(a.y, b.y) - std::min(a.top(), b.top());
      if (std::max(gx, gy) < layout.halo - 1e-6)
        out.push_back("halo violated between " + layout.macros[i].macro_id + " and " + layout.macros[j].macro_id);
    }
  const Rect die = layout.die.rect();
  for (const auto& m : layout.macros)
    if (m.rect.x < -1e-6 || m.rect.y < -1e-6 || m.rect.right() > die.w + 1e-6 || m.rect.top() > die.h + 1e-6)
      out.push_back(m.macro_id + " leaves the die");
  if (const auto why = superbank_contiguity(spec, layout); !why.empty()) out.push_back(why);
  const double sym = vertical_symmetry_error(layout);
  if (sym > spm_pitch_y(spec, layout.halo) + 1e-9) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "symmetry error %.3f exceeds one pitch", sym);
    out.push_back(buf);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : "; ") + e;
  return s;
}

/// Per-axis max - min, computed without sharing code with hpwl().
inline double brute_half_perimeter(const std::vector<Point>& pins) {
  double best_x = 0.0, best_y = 0.0;
  for (const auto& a : pins)
    for (const auto& b : pins) {
      best_x = std::max(best_x, std::abs(a.x - b.x));
      best_y = std::max(best_y, std::abs(a.y - b.y));
    }
  return best_x + best_y;
}

/// f[n] recomputed from the definition for the u-shape oracle.
inline std::vector<int> ushape_reference(int hh, double p, int count) {
  std::vector<int> out;
  int left = count / 2;
  for (int n = 1; left > 0; ++n) {
    double f = std::pow(static_cast<double>(n) / hh, -p);
    double r = std::floor(f + 0.5);
    r = std::max(1.0, std::min(r, static_cast<double>(hh)));
    int rows = static_cast<int>(r);
    rows = std::min(rows, left);
    out.push_back(rows);
    left -= rows;
  }
  return out;
}

/// Linear scan over the 0.01 grid of [0.05, 8].
inline double exponent_scan(int hh, int count, int max_columns) {
  const int target = std::min(hh, count / 2);
  for (int k = 5; k <= 800; ++k) {
    const auto cols = ushape_reference(hh, k / 100.0, count);
    if (static_cast<int>(cols.size()) <= max_columns && cols.front() == target) return k / 100.0;
  }
  return -1.0;
}

}  // namespace check
