#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softtile/cluster.hpp"
#include "softtile/error.hpp"
#include "softtile/geometry.hpp"
#include "softtile/soft_placer.hpp"

namespace softtile {

enum class NetModel { BoundingBox, Star };

/// Half-perimeter of the bounding box of `pins`.
inline double hpwl(std::span<const Point> pins) {
  if (pins.empty()) return 0.0;
  double x0 = pins[0].x, x1 = pins[0].x, y0 = pins[0].y, y1 = pins[0].y;
  for (const Point& p : pins.subspan(1)) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return (x1 - x0) + (y1 - y0);
}

/// Sum of Manhattan distances from each pin to the pin barycentre.
inline double star_length(std::span<const Point> pins) {
  if (pins.empty()) return 0.0;
  Point c;
  for (const Point& p : pins) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(pins.size());
  c.y /= static_cast<double>(pins.size());
  double sum = 0.0;
  for (const Point& p : pins) sum += manhattan(p, c);
  return sum;
}

namespace detail {

inline std::vector<Point> net_pins(const NetSpec& net, const EndpointMap& endpoints, const CentroidSolution& centroids) {
  std::vector<Point> pins;
  pins.reserve(net.endpoints.size());
  for (const auto& ep : net.endpoints) pins.push_back(endpoints.position(ep, centroids.centroids));
  return pins;
}

}  // namespace detail

/// Bit-width weighted wirelength over all nets, in metres. Soft-module
/// endpoints sit at their centroids, macros at their pins.
inline double estimate_wirelength(const ClusterSpec& spec, const FloorplanLayout& layout,
                                  const CentroidSolution& centroids, NetModel model = NetModel::BoundingBox) {
  const EndpointMap endpoints(spec, layout);
  double total_um = 0.0;
  for (const auto& net : spec.nets) {
    const auto pins = detail::net_pins(net, endpoints, centroids);
    total_um += net.bit_width * (model == NetModel::BoundingBox ? hpwl(pins) : star_length(pins));
  }
  return total_um * 1e-6;
}

struct CongestionParams {
  double bin_um = 25.0;
  /// Routing capacity per µm of bin width in each direction, in bit-tracks.
  double tracks_per_um = 375.0;
  /// Fraction of capacity lost over macros (and their halos).
  double macro_blockage = 0.7;
};

/// Rectangular-uniform wire density: each net's bit-width x HPWL is spread
/// evenly over the bins its bounding box covers.
struct CongestionMap {
  int nx = 0;
  int ny = 0;
  double bin = 0.0;
  std::vector<double> demand;    ///< wire-µm per bin, row-major, row 0 at the bottom
  std::vector<double> capacity;  ///< wire-µm per bin
  double net_demand = 0.0;       ///< sum of per-net contributions before binning
  int overflow_count = 0;
  double overflow_total = 0.0;
  bool zero_capacity = false;

  double at(int ix, int iy) const { return demand[static_cast<std::size_t>(iy) * nx + ix]; }
  double total_demand() const { return std::accumulate(demand.begin(), demand.end(), 0.0); }

  /// Bin (ix, iy) with the highest demand; first in row-major order on ties.
  std::pair<int, int> peak_bin() const {
    const auto it = std::max_element(demand.begin(), demand.end());
    const auto k = static_cast<int>(it - demand.begin());
    return {k % nx, k / nx};
  }

  double peak_ratio() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < demand.size(); ++k)
      if (capacity[k] > 0.0) worst = std::max(worst, demand[k] / capacity[k]);
    return worst;
  }
};

namespace detail {

inline void spread(CongestionMap& map, const BinGrid& grid, const DieOutline& die, const Rect& box, double amount) {
  if (amount <= 0.0) return;
  auto add = [&](int ix, int iy, double v) { map.demand[static_cast<std::size_t>(iy) * grid.nx + ix] += v; };
  const int x0 = grid.clamp_x(box.x), x1 = grid.clamp_x(box.right());
  const int y0 = grid.clamp_y(box.y), y1 = grid.clamp_y(box.top());
  if (box.w > 0.0 && box.h > 0.0) {
    // Shares are computed against the binned total so that rounding never
    // creates or loses demand.
    std::vector<std::pair<std::size_t, double>> shares;
    double sum = 0.0;
    for (int iy = y0; iy <= y1; ++iy)
      for (int ix = x0; ix <= x1; ++ix) {
        const Rect cell = grid.cell(ix, iy, die);
        const double a = intersection_area(box, cell);
        if (a > 0.0) {
          shares.emplace_back(static_cast<std::size_t>(iy) * grid.nx + ix, a);
          sum += a;
        }
      }
    if (sum <= 0.0) {
      add(x0, y0, amount);
      return;
    }
    for (const auto& [k, a] : shares) map.demand[k] += amount * a / sum;
    return;
  }
  if (box.w > 0.0 || box.h > 0.0) {
    const bool horizontal = box.w > 0.0;
    const int lo = horizontal ? x0 : y0, hi = horizontal ? x1 : y1;
    std::vector<std::pair<int, double>> shares;
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double a0 = i * grid.bin, a1 = a0 + grid.bin;
      const double s0 = horizontal ? box.x : box.y, s1 = horizontal ? box.right() : box.top();
      const double len = std::min(a1, s1) - std::max(a0, s0);
      if (len > 0.0) {
        shares.emplace_back(i, len);
        sum += len;
      }
    }
    if (sum <= 0.0) {
      add(x0, y0, amount);
      return;
    }
    for (const auto& [i, len] : shares) {
      if (horizontal)
        add(i, y0, amount * len / sum);
      else
        add(x0, i, amount * len / sum);
    }
    return;
  }
  add(x0, y0, amount);
}

}  // namespace detail

inline CongestionMap congestion(const ClusterSpec& spec, const FloorplanLayout& layout,
                                const CentroidSolution& centroids, const CongestionParams& params = {}) {
  const auto grid = detail::BinGrid::over(layout.die, params.bin_um);
  CongestionMap map;
  map.nx = grid.nx;
  map.ny = grid.ny;
  map.bin = grid.bin;
  const std::size_t count = static_cast<std::size_t>(grid.nx) * grid.ny;
  map.demand.assign(count, 0.0);
  map.capacity.assign(count, 0.0);
  map.zero_capacity = !(params.tracks_per_um > 0.0);

  const auto blocked = detail::blocked_rects(layout);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Rect cell = grid.cell(ix, iy, layout.die);
      double covered = 0.0;
      for (const auto& b : blocked) covered += intersection_area(cell, b);
      const double usable = cell.area() - params.macro_blockage * std::min(covered, cell.area());
      map.capacity[static_cast<std::size_t>(iy) * grid.nx + ix] = 2.0 * params.tracks_per_um * std::max(usable, 0.0);
    }

  const EndpointMap endpoints(spec, layout);
  for (const auto& net : spec.nets) {
    const auto pins = detail::net_pins(net, endpoints, centroids);
    if (pins.empty()) continue;
    double x0 = pins[0].x, x1 = pins[0].x, y0 = pins[0].y, y1 = pins[0].y;
    for (const Point& p : pins) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const double amount = net.bit_width * ((x1 - x0) + (y1 - y0));
    map.net_demand += amount;
    detail::spread(map, grid, layout.die, {x0, y0, x1 - x0, y1 - y0}, amount);
  }

  for (std::size_t k = 0; k < count; ++k) {
    const double excess = map.demand[k] - map.capacity[k];
    if (excess > 0.0) {
      ++map.overflow_count;
      map.overflow_total += excess;
    }
  }
  return map;
}

/// Longest TCDM access in mm: the farthest crossbar master to SPM macro pin
/// (Manhattan), plus the longest core-to-nearest-I$-macro return leg.
inline double critical_path_length(const ClusterSpec& spec, const FloorplanLayout& layout,
                                   const CentroidSolution& centroids) {
  const EndpointMap endpoints(spec, layout);
  auto kind_of = [&](const std::string& id) -> std::optional<ModuleKind> {
    if (const auto* m = spec.find_module(id)) return m->kind;
    return std::nullopt;
  };

  double xbar = 0.0;
  for (const auto& net : spec.nets) {
    if (net.latency != LatencyClass::SingleCycle) continue;
    const std::string* master = nullptr;
    const std::string* bank = nullptr;
    bool via_crossbar = false;
    for (const auto& ep : net.endpoints) {
      if (const auto kind = kind_of(ep)) {
        if (*kind == ModuleKind::SpmCrossbar)
          via_crossbar = true;
        else if (!master)
          master = &ep;
      } else if (const auto* macro = spec.find_macro(ep); macro && is_spm(macro->group) && !bank) {
        bank = &ep;
      }
    }
    if (!via_crossbar || !master || !bank) continue;
    xbar = std::max(xbar, manhattan(endpoints.position(*master, centroids.centroids),
                                    endpoints.position(*bank, centroids.centroids)));
  }

  std::vector<Point> icache_pins;
  for (const auto& placed : layout.macros)
    if (const auto* m = spec.find_macro(placed.macro_id); m && !is_spm(m->group))
      icache_pins.push_back(macro_pin(*m, placed));
  double leg = 0.0;
  if (!icache_pins.empty())
    for (std::size_t i = 0; i < spec.modules.size(); ++i) {
      if (spec.modules[i].kind != ModuleKind::ComputeCore) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (const Point& pin : icache_pins) nearest = std::min(nearest, manhattan(centroids.centroids[i], pin));
      leg = std::max(leg, nearest);
    }
  return (xbar + leg) * 1e-3;
}

/// Linear buffered-wire delay model: period_ns = d0 + k * length_mm.
struct CalibrationParams {
  double d0_ns = 1.0;
  double k_ns_per_mm = 0.0;

  friend bool operator==(const CalibrationParams&, const CalibrationParams&) = default;
};

struct CalibrationAnchor {
  double length_mm = 0.0;
  double freq_mhz = 0.0;
};

/// Least-squares fit of 1000 / f = d0 + k * L; exact for two anchors.
inline CalibrationParams calibrate(std::span<const CalibrationAnchor> anchors) {
  if (anchors.size() < 2) throw Error(ErrorKind::InvalidArgument, "calibration needs at least two anchors");
  double mean_l = 0.0, mean_t = 0.0, scale = 0.0;
  for (const auto& a : anchors) {
    if (!(a.freq_mhz > 0.0)) throw Error(ErrorKind::InvalidArgument, "anchor frequency must be positive");
    mean_l += a.length_mm;
    mean_t += 1000.0 / a.freq_mhz;
    scale = std::max(scale, std::abs(a.length_mm));
  }
  mean_l /= static_cast<double>(anchors.size());
  mean_t /= static_cast<double>(anchors.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& a : anchors) {
    sxx += (a.length_mm - mean_l) * (a.length_mm - mean_l);
    sxy += (a.length_mm - mean_l) * (1000.0 / a.freq_mhz - mean_t);
  }
  if (sxx <= 1e-24 * std::max(1.0, scale * scale))
    throw Error(ErrorKind::SingularFit, "calibration anchors share the same critical-path length");
  CalibrationParams cal{mean_t - (sxy / sxx) * mean_l, sxy / sxx};
  if (!(cal.d0_ns > 0.0) || cal.k_ns_per_mm < 0.0)
    throw Error(ErrorKind::Validation, "calibration gives a non-physical delay model (d0 = " +
                                           std::to_string(cal.d0_ns) + " ns, k = " + std::to_string(cal.k_ns_per_mm) +
                                           " ns/mm)");
  return cal;
}

inline double effective_frequency(double critical_path_mm, const CalibrationParams& cal, double target_mhz) {
  return std::min(target_mhz, 1000.0 / (cal.d0_ns + cal.k_ns_per_mm * critical_path_mm));
}

struct Thresholds {
  /// Largest congestion-overflow bin count still considered routable.
  int max_overflow_bins = 0;
};

struct QorEstimate {
  FloorplanStyle style = FloorplanStyle::OneSided;
  double q = 1.0;
  double wirelength_m = 0.0;
  double freq_mhz = 0.0;
  int overflow_bins = 0;
  double overflow_total = 0.0;
  double mean_density = 0.0;
  double peak_density = 0.0;
  bool feasible = false;

  friend bool operator==(const QorEstimate&, const QorEstimate&) = default;
};

struct AssessInputs {
  const ClusterSpec& spec;
  const FloorplanLayout& layout;
  const std::vector<RegionPlacement>& regions;
  const CentroidSolution& centroids;
};

/// Bundles all proxy metrics. feasible = placement succeeded and the overflow
/// bin count stays within the threshold.
inline QorEstimate assess(const AssessInputs& in, const CalibrationParams& cal, const Thresholds& thresholds,
                          const CongestionParams& congestion_params = {}, double density_bin_um = 10.0,
                          bool placement_ok = true) {
  QorEstimate q;
  q.style = in.layout.style;
  q.q = in.layout.die.aspect;
  q.wirelength_m = estimate_wirelength(in.spec, in.layout, in.centroids);
  q.freq_mhz = effective_frequency(critical_path_length(in.spec, in.layout, in.centroids), cal, in.spec.target_freq_mhz);
  const CongestionMap cmap = congestion(in.spec, in.layout, in.centroids, congestion_params);
  q.overflow_bins = cmap.overflow_count;
  q.overflow_total = cmap.overflow_total;
  const DensityMap dmap = density_map(in.regions, in.layout, density_bin_um);
  q.mean_density = dmap.mean();
  q.peak_density = dmap.peak();
  q.feasible = placement_ok && q.overflow_bins <= thresholds.max_overflow_bins;
  return q;
}

/// Threshold that best reproduces a reference feasible set: among the
/// candidates {0} and every observed bin count, the smallest one with the
/// most agreements.
inline int fit_overflow_threshold(std::span<const std::pair<int, bool>> observed_vs_reference) {
  std::vector<int> candidates{0};
  for (const auto& [bins, _] : observed_vs_reference) candidates.push_back(bins);
  std::sort(candidates.begin(), candidates.end());
  int best = 0, best_agree = -1;
  for (int t : candidates) {
    int agree = 0;
    for (const auto& [bins, feasible] : observed_vs_reference) agree += ((bins <= t) == feasible) ? 1 : 0;
    if (agree > best_agree) {
      best_agree = agree;
      best = t;
    }
  }
  return best;
}

}  // namespace softtile
