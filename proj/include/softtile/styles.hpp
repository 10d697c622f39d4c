#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "softtile/cluster.hpp"
#include "softtile/error.hpp"
#include "softtile/geometry.hpp"

namespace softtile {

struct LayoutParams {
  double halo_um = 2.0;
  /// Gap between the left die edge and the I$ macro column.
  double icache_inset_um = 0.0;
  /// Standard-cell channel kept free between the I$ column and the SPM block.
  double core_channel_um = 150.0;
  /// Share of the die width the 2-sided SPM rows may span, measured from the
  /// right edge.
  double two_sided_width_fraction = 0.5;
};

/// Column heights of the U-shaped SPM arrangement, in macro rows per die half.
struct UShapeParams {
  double p = 1.0;
  int half_height_rows = 1;  ///< HH
  std::vector<int> column_heights;

  int macro_count() const {
    int n = 0;
    for (int h : column_heights) n += 2 * h;
    return n;
  }
};

/// Samples f[n] = (n / HH)^(-p) for n = 1, 2, ..., rounding half-up and clamping
/// to [1, HH] rows, until the per-half budget macro_count / 2 is spent. The
/// last column is truncated to the remaining budget.
inline UShapeParams ushape_heights(int half_height_rows, double p, int macro_count) {
  if (half_height_rows < 1) throw Error(ErrorKind::InvalidArgument, "HH must be at least one row");
  if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "u-shape exponent must be positive");
  if (macro_count < 0) throw Error(ErrorKind::InvalidArgument, "negative macro count");
  if (macro_count % 2 != 0)
    throw Error(ErrorKind::OddCount, "u-shape needs an even macro count, got " + std::to_string(macro_count));

  UShapeParams out{p, half_height_rows, {}};
  const double hh = half_height_rows;
  int budget = macro_count / 2;
  for (int n = 1; budget > 0; ++n) {
    const double f = std::min(std::pow(n / hh, -p), hh);
    const int rows = std::min(std::clamp(static_cast<int>(std::floor(f + 0.5)), 1, half_height_rows), budget);
    out.column_heights.push_back(rows);
    budget -= rows;
  }
  return out;
}

inline constexpr double kExponentLo = 0.05;
inline constexpr double kExponentHi = 8.0;
inline constexpr int kExponentSteps = 795;  // 0.01 grid over [kExponentLo, kExponentHi]

inline double exponent_at(int index) { return (5 + index) / 100.0; }

/// Smallest exponent on the 0.01 grid whose first column reaches
/// min(HH, macro_count / 2) rows (closing the central channel) while the arms
/// fit in max_columns. Feasibility is monotone in p, so this is a binary
/// search over the grid index.
inline double select_exponent_p(int half_height_rows, int macro_count, int max_columns) {
  if (macro_count == 0) return kExponentLo;
  if (macro_count % 2 != 0)
    throw Error(ErrorKind::OddCount, "u-shape needs an even macro count, got " + std::to_string(macro_count));
  const int target = std::min(half_height_rows, macro_count / 2);
  auto feasible = [&](int index) {
    const UShapeParams u = ushape_heights(half_height_rows, exponent_at(index), macro_count);
    return static_cast<int>(u.column_heights.size()) <= max_columns && u.column_heights.front() == target;
  };
  if (!feasible(kExponentSteps))
    throw Error(ErrorKind::Infeasible, "no u-shape exponent fits " + std::to_string(macro_count) + " macros in " +
                                           std::to_string(max_columns) + " columns (binding dimension: width)");
  int lo = 0, hi = kExponentSteps;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (feasible(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return exponent_at(lo);
}

namespace detail {

struct MacroGrid {
  double pitch_x = 0.0;
  double pitch_y = 0.0;
  int rows = 0;         ///< full-height rows
  int half_rows = 0;    ///< rows per die half (HH)
  int max_columns = 0;  ///< SPM columns that fit the width budget
};

inline std::vector<const MacroSpec*> spm_macros(const ClusterSpec& spec) {
  std::vector<const MacroSpec*> out;
  for (const auto& m : spec.macros)
    if (is_spm(m.group)) out.push_back(&m);
  // Superbank-major so each superbank fills consecutive slots.
  std::stable_sort(out.begin(), out.end(), [](const MacroSpec* a, const MacroSpec* b) {
    return superbank_index(a->group) < superbank_index(b->group);
  });
  return out;
}

inline std::vector<const MacroSpec*> icache_macros(const ClusterSpec& spec) {
  std::vector<const MacroSpec*> out;
  for (const auto& m : spec.macros)
    if (!is_spm(m.group)) out.push_back(&m);
  return out;
}

inline std::pair<double, double> slot_pitch(const std::vector<const MacroSpec*>& ms, double halo) {
  double w = 0.0, h = 0.0;
  for (const auto* m : ms) {
    w = std::max(w, m->width);
    h = std::max(h, m->height);
  }
  return {w + 2.0 * halo, h + 2.0 * halo};
}

inline int fit_count(double extent, double pitch) {
  return pitch > 0.0 ? static_cast<int>(std::floor(extent / pitch + 1e-9)) : 0;
}

/// Balanced split of `count` items over `columns` columns, larger ones first.
inline std::vector<int> balanced(int count, int columns) {
  std::vector<int> out(columns, count / columns);
  for (int j = 0; j < count % columns; ++j) ++out[j];
  return out;
}

inline MacroPlacement place_in_slot(const MacroSpec& m, double slot_x, double slot_y, double pitch_x,
                                    double pitch_y, Orientation o) {
  return {m.id,
          {slot_x + (pitch_x - m.width) / 2.0, slot_y + (pitch_y - m.height) / 2.0, m.width, m.height},
          o};
}

struct Slot {
  double x, y;
};

class Builder {
 public:
  Builder(const ClusterSpec& spec, const DieOutline& die, FloorplanStyle style, const LayoutParams& params)
      : spec_(spec), params_(params), spm_(spm_macros(spec)), icache_(icache_macros(spec)) {
    layout_.die = die;
    layout_.style = style;
    layout_.halo = params.halo_um;

    const auto [ipx, ipy] = slot_pitch(icache_, params.halo_um);
    icache_pitch_x_ = ipx;
    icache_pitch_y_ = ipy;
    const int icache_rows = fit_count(die.height, ipy);
    if (!icache_.empty() && icache_rows == 0) infeasible("height", "I$ macro taller than the die");
    icache_columns_ = icache_.empty() ? 0 : (static_cast<int>(icache_.size()) + icache_rows - 1) / icache_rows;

    const auto [px, py] = slot_pitch(spm_.empty() ? icache_ : spm_, params.halo_um);
    grid_.pitch_x = px;
    grid_.pitch_y = py;
    grid_.rows = fit_count(die.height, py);
    grid_.half_rows = fit_count(die.height / 2.0, py);
    const double reserve =
        icache_.empty() ? params.core_channel_um
                        : params.icache_inset_um + icache_columns_ * ipx + params.core_channel_um;
    grid_.max_columns = fit_count(die.width - reserve, px);
  }

  const MacroGrid& grid() const { return grid_; }
  const std::vector<const MacroSpec*>& spm() const { return spm_; }

  [[noreturn]] void infeasible(const std::string& dimension, const std::string& why) const {
    throw Error(ErrorKind::Infeasible, std::string(to_string(layout_.style)) + " at Q=" +
                                           std::to_string(layout_.die.aspect) + " is infeasible: " + why +
                                           " (binding dimension: " + dimension + ")");
  }

  void require_columns(int columns) const {
    if (columns > grid_.max_columns)
      infeasible("width", std::to_string(columns) + " SPM columns needed, " + std::to_string(grid_.max_columns) +
                              " fit");
  }

  /// SPM slot for column j (0 = rightmost).
  double column_x(int j) const { return layout_.die.width - (j + 1) * grid_.pitch_x; }

  void place_spm(const std::vector<Slot>& slots) {
    for (std::size_t i = 0; i < spm_.size(); ++i)
      layout_.macros.push_back(
          place_in_slot(*spm_[i], slots[i].x, slots[i].y, grid_.pitch_x, grid_.pitch_y, Orientation::R0));
  }

  /// Compact block against the right edge: fewest full-height columns,
  /// balanced and vertically centred, filled column-major in a snake.
  std::vector<Slot> compact_block_slots() const {
    const int n = static_cast<int>(spm_.size());
    std::vector<Slot> slots;
    if (n == 0) return slots;
    if (grid_.rows == 0) infeasible("height", "SPM macro taller than the die");
    const int columns = (n + grid_.rows - 1) / grid_.rows;
    require_columns(columns);
    const auto counts = balanced(n, columns);
    for (int j = 0; j < columns; ++j) {
      const double y0 = (layout_.die.height - counts[j] * grid_.pitch_y) / 2.0;
      for (int r = 0; r < counts[j]; ++r) {
        const int row = (j % 2 == 0) ? counts[j] - 1 - r : r;  // top-down, then bottom-up
        slots.push_back({column_x(j), y0 + row * grid_.pitch_y});
      }
    }
    return slots;
  }

  /// Top-half slots for the given per-column heights, mirrored into the bottom
  /// half. Columns are filled alternately inward-out and outward-in.
  std::vector<Slot> mirrored_arm_slots(const std::vector<int>& heights, bool first_from_inner) const {
    std::vector<Slot> top, bottom;
    const double H = layout_.die.height;
    for (std::size_t j = 0; j < heights.size(); ++j) {
      const bool inner_first = (j % 2 == 0) == first_from_inner;
      for (int r = 0; r < heights[j]; ++r) {
        const int row = inner_first ? heights[j] - 1 - r : r;  // row 0 touches the die edge
        top.push_back({column_x(static_cast<int>(j)), H - (row + 1) * grid_.pitch_y});
        bottom.push_back({column_x(static_cast<int>(j)), row * grid_.pitch_y});
      }
    }
    top.insert(top.end(), bottom.begin(), bottom.end());
    return top;
  }

  void place_icache() {
    if (icache_.empty()) return;
    const int n = static_cast<int>(icache_.size());
    const auto counts = balanced(n, icache_columns_);
    std::size_t k = 0;
    for (int c = 0; c < icache_columns_; ++c) {
      const double x = params_.icache_inset_um + c * icache_pitch_x_;
      const double y0 = (layout_.die.height - counts[c] * icache_pitch_y_) / 2.0;
      for (int r = counts[c] - 1; r >= 0; --r, ++k)
        layout_.macros.push_back(
            place_in_slot(*icache_[k], x, y0 + r * icache_pitch_y_, icache_pitch_x_, icache_pitch_y_, Orientation::MY));
    }
    const double right = params_.icache_inset_um + icache_columns_ * icache_pitch_x_;
    if (right > layout_.die.width + 1e-9) infeasible("width", "I$ macros wider than the die");
  }

  FloorplanLayout finish() {
    place_icache();
    const double H = layout_.die.height;
    const auto n = spec_.io_pins.size();
    for (std::size_t i = 0; i < n; ++i)
      layout_.io_pins.push_back({spec_.io_pins[i], {0.0, (static_cast<double>(i) + 0.5) * H / static_cast<double>(n)}});
    return std::move(layout_);
  }

 private:
  const ClusterSpec& spec_;
  LayoutParams params_;
  std::vector<const MacroSpec*> spm_;
  std::vector<const MacroSpec*> icache_;
  double icache_pitch_x_ = 0.0;
  double icache_pitch_y_ = 0.0;
  int icache_columns_ = 0;
  MacroGrid grid_;
  FloorplanLayout layout_;
};

}  // namespace detail

/// All SPM macros in the most compact block against the right edge.
inline FloorplanLayout place_one_sided(const ClusterSpec& spec, const DieOutline& die, const LayoutParams& params = {}) {
  detail::Builder b(spec, die, FloorplanStyle::OneSided, params);
  b.place_spm(b.compact_block_slots());
  return b.finish();
}

/// SPM macros in the widest block: as few stacked rows as the width budget
/// allows, split between a top and a mirrored bottom row group.
inline FloorplanLayout place_two_sided(const ClusterSpec& spec, const DieOutline& die, const LayoutParams& params = {}) {
  detail::Builder b(spec, die, FloorplanStyle::TwoSided, params);
  const int n = static_cast<int>(b.spm().size());
  if (n == 1) {
    b.place_spm(b.compact_block_slots());
    return b.finish();
  }
  if (n % 2 != 0) throw Error(ErrorKind::OddCount, "2-sided needs an even SPM macro count");
  if (n > 0) {
    const int half = n / 2;
    const auto& g = b.grid();
    const int max_columns =
        std::min(g.max_columns, detail::fit_count(params.two_sided_width_fraction * die.width, g.pitch_x));
    if (max_columns < 1) b.infeasible("width", "no SPM column fits the width budget");
    const int rows_half = (half + max_columns - 1) / max_columns;
    if (2 * rows_half > g.rows)
      b.infeasible("height", std::to_string(2 * rows_half) + " SPM rows needed, " + std::to_string(g.rows) + " fit");
    const int columns = (half + rows_half - 1) / rows_half;
    b.place_spm(b.mirrored_arm_slots(detail::balanced(half, columns), false));
  }
  return b.finish();
}

/// U-shape with an explicit exponent; place_u_shape picks the exponent.
inline FloorplanLayout place_u_shape_with_exponent(const ClusterSpec& spec, const DieOutline& die, double p,
                                                   const LayoutParams& params = {}) {
  detail::Builder b(spec, die, FloorplanStyle::UShape, params);
  const int n = static_cast<int>(b.spm().size());
  if (n == 1) {
    b.place_spm(b.compact_block_slots());
    return b.finish();
  }
  if (n > 0) {
    if (b.grid().half_rows < 1) b.infeasible("height", "no SPM row fits in half the die");
    const UShapeParams u = ushape_heights(b.grid().half_rows, p, n);
    b.require_columns(static_cast<int>(u.column_heights.size()));
    b.place_spm(b.mirrored_arm_slots(u.column_heights, true));
  }
  return b.finish();
}

inline double select_exponent_p(const ClusterSpec& spec, const DieOutline& die, const LayoutParams& params = {}) {
  detail::Builder b(spec, die, FloorplanStyle::UShape, params);
  const int n = static_cast<int>(b.spm().size());
  if (n == 0) return kExponentLo;
  if (b.grid().half_rows < 1) b.infeasible("height", "no SPM row fits in half the die");
  return select_exponent_p(b.grid().half_rows, n, b.grid().max_columns);
}

/// SPM macros as a vertically symmetric U opening towards the I/O edge, the
/// column heights sampled from the generator function.
inline FloorplanLayout place_u_shape(const ClusterSpec& spec, const DieOutline& die, const LayoutParams& params = {}) {
  const int n = static_cast<int>(detail::spm_macros(spec).size());
  const double p = (n <= 1) ? kExponentLo : select_exponent_p(spec, die, params);
  return place_u_shape_with_exponent(spec, die, p, params);
}

inline FloorplanLayout place(FloorplanStyle style, const ClusterSpec& spec, const DieOutline& die,
                             const LayoutParams& params = {}) {
  switch (style) {
    case FloorplanStyle::OneSided: return place_one_sided(spec, die, params);
    case FloorplanStyle::TwoSided: return place_two_sided(spec, die, params);
    case FloorplanStyle::UShape: return place_u_shape(spec, die, params);
  }
  throw Error(ErrorKind::Internal, "unknown style");
}

}  // namespace softtile
