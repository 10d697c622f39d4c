#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "softtile/cluster.hpp"
#include "softtile/error.hpp"
#include "softtile/geometry.hpp"

namespace softtile {

/// Pin location of a placed macro: the middle of its port edge, after the
/// orientation has been applied (MY swaps left and right).
inline Point macro_pin(const MacroSpec& spec, const MacroPlacement& placed) {
  Edge side = spec.port_side;
  if (placed.orientation == Orientation::MY) {
    if (side == Edge::Left)
      side = Edge::Right;
    else if (side == Edge::Right)
      side = Edge::Left;
  }
  const Rect& r = placed.rect;
  switch (side) {
    case Edge::Left: return {r.x, r.y + r.h / 2.0};
    case Edge::Right: return {r.right(), r.y + r.h / 2.0};
    case Edge::Bottom: return {r.x + r.w / 2.0, r.y};
    case Edge::Top: return {r.x + r.w / 2.0, r.top()};
  }
  return r.center();
}

/// Net in solver form: movable endpoints by index, fixed ones by position.
struct PlacementNet {
  double weight = 1.0;
  std::vector<int> movable;
  std::vector<Point> fixed;
};

struct PlacementProblem {
  std::vector<std::string> module_ids;
  std::vector<PlacementNet> nets;
};

struct SolverOptions {
  Point init;
  double rel_tol = 1e-6;
  int max_iter = 10000;
  std::optional<Rect> clamp;
};

struct CentroidSolution {
  std::vector<std::string> module_ids;
  std::vector<Point> centroids;
  double residual = 0.0;          ///< final gradient norm
  double initial_residual = 0.0;  ///< gradient norm at the starting point
  int iterations = 0;
  std::vector<std::string> warnings;

  const Point& at(std::string_view id) const {
    for (std::size_t i = 0; i < module_ids.size(); ++i)
      if (module_ids[i] == id) return centroids[i];
    throw Error(ErrorKind::Internal, "no centroid for module '" + std::string(id) + "'");
  }
};

// Star model: each net pulls its endpoints towards a virtual star node at the
// endpoint barycentre,  phi = sum_nets w * sum_e |p_e - bary|^2.  The star
// node is eliminated in closed form, leaving the module centroids as the only
// unknowns.

namespace detail {

template <class Coord>
long double net_axis_objective(const PlacementNet& net, const std::vector<double>& pos, Coord coord) {
  const std::size_t k = net.movable.size() + net.fixed.size();
  if (k == 0) return 0.0L;
  long double mean = 0.0L;
  for (int i : net.movable) mean += pos[i];
  for (const Point& f : net.fixed) mean += coord(f);
  mean /= static_cast<long double>(k);
  long double sum = 0.0L;
  for (int i : net.movable) sum += (pos[i] - mean) * (pos[i] - mean);
  for (const Point& f : net.fixed) sum += (coord(f) - mean) * (coord(f) - mean);
  return net.weight * sum;
}

inline double px(const Point& p) { return p.x; }
inline double py(const Point& p) { return p.y; }

}  // namespace detail

inline double objective(const PlacementProblem& problem, const std::vector<Point>& centroids) {
  std::vector<double> xs(centroids.size()), ys(centroids.size());
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    xs[i] = centroids[i].x;
    ys[i] = centroids[i].y;
  }
  long double total = 0.0L;
  for (const auto& net : problem.nets) {
    total += detail::net_axis_objective(net, xs, detail::px);
    total += detail::net_axis_objective(net, ys, detail::py);
  }
  return static_cast<double>(total);
}

/// Analytic gradient of objective(); entry i is d(phi)/d(centroid i).
inline std::vector<Point> gradient(const PlacementProblem& problem, const std::vector<Point>& centroids) {
  std::vector<Point> g(centroids.size());
  for (const auto& net : problem.nets) {
    const double k = static_cast<double>(net.movable.size() + net.fixed.size());
    if (k == 0) continue;
    Point mean;
    for (int i : net.movable) {
      mean.x += centroids[i].x;
      mean.y += centroids[i].y;
    }
    for (const Point& f : net.fixed) {
      mean.x += f.x;
      mean.y += f.y;
    }
    mean.x /= k;
    mean.y /= k;
    for (int i : net.movable) {
      g[i].x += 2.0 * net.weight * (centroids[i].x - mean.x);
      g[i].y += 2.0 * net.weight * (centroids[i].y - mean.y);
    }
  }
  return g;
}

/// Per-coordinate sum of the absolute per-net gradient terms; the natural
/// magnitude against which a gradient near a stationary point is judged.
inline std::vector<Point> gradient_scale(const PlacementProblem& problem, const std::vector<Point>& centroids) {
  std::vector<Point> s(centroids.size());
  for (const auto& net : problem.nets) {
    const double k = static_cast<double>(net.movable.size() + net.fixed.size());
    if (k == 0) continue;
    Point mean;
    for (int i : net.movable) {
      mean.x += centroids[i].x;
      mean.y += centroids[i].y;
    }
    for (const Point& f : net.fixed) {
      mean.x += f.x;
      mean.y += f.y;
    }
    mean.x /= k;
    mean.y /= k;
    for (int i : net.movable) {
      s[i].x += std::abs(2.0 * net.weight * (centroids[i].x - mean.x));
      s[i].y += std::abs(2.0 * net.weight * (centroids[i].y - mean.y));
    }
  }
  return s;
}

namespace detail {

inline double norm(const std::vector<Point>& v, const std::vector<bool>& active) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (active[i]) s += v[i].x * v[i].x + v[i].y * v[i].y;
  return std::sqrt(s);
}

/// Hessian-vector product of the star objective (fixed endpoints drop out).
inline std::vector<Point> hessian_times(const PlacementProblem& problem, const std::vector<Point>& v) {
  std::vector<Point> out(v.size());
  for (const auto& net : problem.nets) {
    const double k = static_cast<double>(net.movable.size() + net.fixed.size());
    if (k == 0) continue;
    Point mean;
    for (int i : net.movable) {
      mean.x += v[i].x;
      mean.y += v[i].y;
    }
    mean.x /= k;
    mean.y /= k;
    for (int i : net.movable) {
      out[i].x += 2.0 * net.weight * (v[i].x - mean.x);
      out[i].y += 2.0 * net.weight * (v[i].y - mean.y);
    }
  }
  return out;
}

/// Modules in net-connected components that touch no fixed endpoint.
inline std::vector<bool> unanchored(const PlacementProblem& problem) {
  const std::size_t n = problem.module_ids.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& net : problem.nets)
    for (std::size_t k = 1; k < net.movable.size(); ++k)
      parent[find(net.movable[k])] = find(net.movable[0]);
  std::vector<bool> anchored_root(n, false);
  for (const auto& net : problem.nets)
    if (!net.fixed.empty() && !net.movable.empty()) anchored_root[find(net.movable[0])] = true;
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = !anchored_root[find(i)];
  return out;
}

}  // namespace detail

/// Minimises the star-model quadratic wirelength by conjugate gradients,
/// starting every module at options.init. Modules without a path to a fixed
/// endpoint stay at options.init and are reported in warnings.
inline CentroidSolution solve_centroids(const PlacementProblem& problem, const SolverOptions& options = {}) {
  const std::size_t n = problem.module_ids.size();
  CentroidSolution sol;
  sol.module_ids = problem.module_ids;
  sol.centroids.assign(n, options.init);

  const std::vector<bool> floating = detail::unanchored(problem);
  std::vector<bool> active(n);
  for (std::size_t i = 0; i < n; ++i) {
    active[i] = !floating[i];
    if (floating[i]) sol.warnings.push_back("isolated module '" + problem.module_ids[i] + "' left at the die centre");
  }

  auto masked = [&](std::vector<Point> v) {
    for (std::size_t i = 0; i < n; ++i)
      if (!active[i]) v[i] = {};
    return v;
  };

  std::vector<Point> r = masked(gradient(problem, sol.centroids));
  for (auto& e : r) e = {-e.x, -e.y};
  sol.initial_residual = detail::norm(r, active);
  sol.residual = sol.initial_residual;
  const double stop = options.rel_tol * sol.initial_residual;
  std::vector<Point> d = r;
  double rr = sol.residual * sol.residual;

  while (sol.residual > stop && sol.iterations < options.max_iter) {
    const std::vector<Point> hd = masked(detail::hessian_times(problem, d));
    double dhd = 0.0;
    for (std::size_t i = 0; i < n; ++i) dhd += d[i].x * hd[i].x + d[i].y * hd[i].y;
    if (!(dhd > 0.0)) break;
    const double alpha = rr / dhd;
    for (std::size_t i = 0; i < n; ++i) {
      sol.centroids[i].x += alpha * d[i].x;
      sol.centroids[i].y += alpha * d[i].y;
      r[i].x -= alpha * hd[i].x;
      r[i].y -= alpha * hd[i].y;
    }
    ++sol.iterations;
    // Refresh the residual from the true gradient now and then to stop drift.
    if (sol.iterations % 50 == 0) {
      r = masked(gradient(problem, sol.centroids));
      for (auto& e : r) e = {-e.x, -e.y};
    }
    const double rr_next = [&] {
      double s = 0.0;
      for (const auto& e : r) s += e.x * e.x + e.y * e.y;
      return s;
    }();
    const double beta = rr_next / rr;
    rr = rr_next;
    sol.residual = std::sqrt(rr);
    for (std::size_t i = 0; i < n; ++i) {
      d[i].x = r[i].x + beta * d[i].x;
      d[i].y = r[i].y + beta * d[i].y;
    }
  }

  if (options.clamp) {
    const Rect& c = *options.clamp;
    for (auto& p : sol.centroids) {
      p.x = std::clamp(p.x, c.x, c.right());
      p.y = std::clamp(p.y, c.y, c.top());
    }
  }
  sol.residual = detail::norm(masked(gradient(problem, sol.centroids)), active);
  return sol;
}

/// Where every net endpoint of a spec sits in a given layout.
class EndpointMap {
 public:
  using Entry = std::variant<int, Point>;  // movable module index or fixed position

  EndpointMap(const ClusterSpec& spec, const FloorplanLayout& layout) {
    for (std::size_t i = 0; i < spec.modules.size(); ++i) map_.emplace(spec.modules[i].id, static_cast<int>(i));
    for (const auto& placed : layout.macros) {
      const MacroSpec* m = spec.find_macro(placed.macro_id);
      if (!m) throw Error(ErrorKind::Internal, "layout macro '" + placed.macro_id + "' not in spec");
      map_.emplace(placed.macro_id, macro_pin(*m, placed));
    }
    for (const auto& pin : layout.io_pins) map_.emplace(pin.name, pin.position);
  }

  const Entry& operator[](const std::string& name) const {
    auto it = map_.find(name);
    if (it == map_.end()) throw Error(ErrorKind::Internal, "unresolved endpoint '" + name + "'");
    return it->second;
  }

  /// Position given the module centroids.
  Point position(const std::string& name, const std::vector<Point>& centroids) const {
    const Entry& e = (*this)[name];
    if (const int* idx = std::get_if<int>(&e)) return centroids.at(*idx);
    return std::get<Point>(e);
  }

 private:
  std::unordered_map<std::string, Entry> map_;
};

/// Solver form of the spec's nets with macros and I/O pins fixed at their
/// placed positions; net weight = bit-width.
inline PlacementProblem build_problem(const ClusterSpec& spec, const FloorplanLayout& layout) {
  const EndpointMap endpoints(spec, layout);
  PlacementProblem problem;
  for (const auto& m : spec.modules) problem.module_ids.push_back(m.id);
  for (const auto& net : spec.nets) {
    PlacementNet pn;
    pn.weight = net.bit_width;
    for (const auto& ep : net.endpoints) {
      const auto& e = endpoints[ep];
      if (const int* idx = std::get_if<int>(&e))
        pn.movable.push_back(*idx);
      else
        pn.fixed.push_back(std::get<Point>(e));
    }
    problem.nets.push_back(std::move(pn));
  }
  return problem;
}

inline CentroidSolution quadratic_centroids(const ClusterSpec& spec, const FloorplanLayout& layout) {
  if (layout.macros.empty() && layout.io_pins.empty())
    throw Error(ErrorKind::InvalidArgument, "layout has no fixed anchors");
  SolverOptions options;
  options.init = layout.die.rect().center();
  options.clamp = layout.die.rect();
  return solve_centroids(build_problem(spec, layout), options);
}

namespace detail {

inline double free_area_in(const std::vector<Rect>& pool, const Rect& window) {
  double a = 0.0;
  for (const auto& r : pool) a += intersection_area(r, window);
  return a;
}

/// Window split at `cut` along x (horizontal = true) or y.
inline std::pair<Rect, Rect> split_window(const Rect& w, bool horizontal, double cut) {
  if (horizontal) return {{w.x, w.y, cut - w.x, w.h}, {cut, w.y, w.right() - cut, w.h}};
  return {{w.x, w.y, w.w, cut - w.y}, {w.x, cut, w.w, w.top() - cut}};
}

/// Coordinate along the axis where the free area before it equals `area`.
inline double cut_for_area(const std::vector<Rect>& pool, const Rect& w, bool horizontal, double area) {
  double lo = horizontal ? w.x : w.y, hi = horizontal ? w.right() : w.top();
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    const double mid = (lo + hi) / 2.0;
    if (free_area_in(pool, split_window(w, horizontal, mid).first) < area)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2.0;
}

struct Bisection {
  const std::vector<Rect>& pool;
  const std::vector<double>& need;
  const std::vector<Point>& centre;
  const std::vector<std::string>& ids;
  std::vector<std::vector<Rect>> out;

  void run(std::vector<std::size_t> members, const Rect& window) {
    if (members.empty()) return;
    const bool horizontal = window.w >= window.h;
    auto along = [&](std::size_t i) { return horizontal ? centre[i].x : centre[i].y; };
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (along(a) != along(b)) return along(a) < along(b);
      return ids[a] < ids[b];
    });
    const double free = free_area_in(pool, window);
    if (members.size() == 1) {
      leaf(members[0], window, horizontal, free);
      return;
    }
    double total = 0.0;
    for (std::size_t i : members) total += need[i];
    // Split where the cumulative demand crosses half, keeping both sides nonempty.
    std::size_t k = 1;
    double left = need[members[0]];
    while (k + 1 < members.size() && left + need[members[k]] <= total / 2.0) left += need[members[k++]];
    const double cut = cut_for_area(pool, window, horizontal, free * left / total);
    const auto [a, b] = split_window(window, horizontal, cut);
    run({members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k)}, a);
    run({members.begin() + static_cast<std::ptrdiff_t>(k), members.end()}, b);
  }

  // The window holds a little slack; keep exactly the needed free area,
  // centred on the module's centroid along the long side.
  void leaf(std::size_t i, const Rect& window, bool horizontal, double free) {
    const double lo = horizontal ? window.x : window.y, hi = horizontal ? window.right() : window.top();
    const double c = std::clamp(horizontal ? centre[i].x : centre[i].y, lo, hi);
    const double want = std::min(need[i], free);
    const double at_c = free_area_in(pool, split_window(window, horizontal, c).first);
    const double a0 = std::clamp(at_c - want / 2.0, 0.0, free - want);
    const double u0 = a0 <= 0.0 ? lo : cut_for_area(pool, window, horizontal, a0);
    const double u1 = a0 + want >= free ? hi : cut_for_area(pool, window, horizontal, a0 + want);
    const Rect keep = horizontal ? Rect{u0, window.y, u1 - u0, window.h} : Rect{window.x, u0, window.w, u1 - u0};
    for (const auto& r : pool) {
      const double x0 = std::max(r.x, keep.x), x1 = std::min(r.right(), keep.right());
      const double y0 = std::max(r.y, keep.y), y1 = std::min(r.top(), keep.top());
      if (x1 - x0 > 1e-9 && y1 - y0 > 1e-9) out[i].push_back({x0, y0, x1 - x0, y1 - y0});
    }
  }
};

}  // namespace detail

/// Recursive bisection of the free space: the current window is cut across
/// its longer side, modules are ordered by centroid along that side (ties by
/// id) and split into two halves of equal demand, each half receiving the
/// same share of free area. A leaf keeps exactly area / target-utilization of
/// free space, centred on the module's centroid.
inline std::vector<RegionPlacement> legalize_regions(const CentroidSolution& centroids, const FloorplanLayout& layout,
                                                     const ClusterSpec& spec) {
  const std::vector<Rect> pool = free_space(layout);
  double available = 0.0;
  for (const auto& r : pool) available += r.area();
  std::vector<double> need;
  std::vector<Point> centre;
  std::vector<std::string> ids;
  double demanded = 0.0;
  for (const auto& m : spec.modules) {
    need.push_back(m.area / spec.target_utilization);
    centre.push_back(centroids.at(m.id));
    ids.push_back(m.id);
    demanded += need.back();
  }
  if (demanded > available * (1.0 + 1e-9)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "regions demand %.1f um^2 but only %.1f um^2 of free space is available", demanded,
                  available);
    throw Error(ErrorKind::OverUtilization, buf);
  }

  detail::Bisection b{pool, need, centre, ids, std::vector<std::vector<Rect>>(spec.modules.size())};
  std::vector<std::size_t> all(spec.modules.size());
  std::iota(all.begin(), all.end(), 0);
  b.run(all, layout.die.rect());

  std::vector<RegionPlacement> regions;
  for (std::size_t i = 0; i < spec.modules.size(); ++i) {
    RegionPlacement region{ids[i], std::move(b.out[i]), 0.0, spec.target_utilization};
    for (const auto& r : region.rects) region.area += r.area();
    regions.push_back(std::move(region));
  }
  return regions;
}

/// Area-weighted centre of every legalized module; modules without a region
/// keep their quadratic centroid.
inline CentroidSolution region_centroids(const CentroidSolution& centroids, const std::vector<RegionPlacement>& regions) {
  CentroidSolution out = centroids;
  for (const auto& region : regions) {
    double a = 0.0, x = 0.0, y = 0.0;
    for (const auto& r : region.rects) {
      a += r.area();
      x += r.area() * r.center().x;
      y += r.area() * r.center().y;
    }
    if (!(a > 0.0)) continue;
    for (std::size_t i = 0; i < out.module_ids.size(); ++i)
      if (out.module_ids[i] == region.module_id) out.centroids[i] = {x / a, y / a};
  }
  return out;
}

/// Placeable-cell utilisation per bin; bins fully covered by macros read 0.
struct DensityMap {
  int nx = 0;
  int ny = 0;
  double bin = 0.0;
  std::vector<double> utilization;  ///< row-major, row 0 at the bottom
  std::vector<double> placeable;    ///< placeable area per bin, µm²
  double cell_area = 0.0;           ///< total cell area mapped

  double at(int ix, int iy) const { return utilization[static_cast<std::size_t>(iy) * nx + ix]; }

  /// Area-weighted mean over placeable bins: total cell area / placeable area.
  double mean() const {
    const double total = std::accumulate(placeable.begin(), placeable.end(), 0.0);
    return total > 0.0 ? cell_area / total : 0.0;
  }

  double peak() const {
    return utilization.empty() ? 0.0 : *std::max_element(utilization.begin(), utilization.end());
  }

  /// Row-major CSV with the northmost row first.
  std::string to_csv() const {
    std::ostringstream os;
    char buf[32];
    for (int iy = ny - 1; iy >= 0; --iy) {
      for (int ix = 0; ix < nx; ++ix) {
        std::snprintf(buf, sizeof buf, "%.4f", at(ix, iy));
        os << (ix ? "," : "") << buf;
      }
      os << '\n';
    }
    return os.str();
  }
};

namespace detail {

struct BinGrid {
  int nx, ny;
  double bin;

  static BinGrid over(const DieOutline& die, double bin) {
    if (!(bin > 0.0)) throw Error(ErrorKind::InvalidArgument, "bin size must be positive");
    const int nx = std::max(1, static_cast<int>(std::ceil(die.width / bin - 1e-9)));
    const int ny = std::max(1, static_cast<int>(std::ceil(die.height / bin - 1e-9)));
    return {nx, ny, bin};
  }

  Rect cell(int ix, int iy, const DieOutline& die) const {
    const double x0 = ix * bin, y0 = iy * bin;
    return {x0, y0, std::min(bin, die.width - x0), std::min(bin, die.height - y0)};
  }

  int clamp_x(double x) const { return std::clamp(static_cast<int>(std::floor(x / bin)), 0, nx - 1); }
  int clamp_y(double y) const { return std::clamp(static_cast<int>(std::floor(y / bin)), 0, ny - 1); }
};

/// Halo-inflated macro rects clipped to the die.
inline std::vector<Rect> blocked_rects(const FloorplanLayout& layout) {
  std::vector<Rect> out;
  const Rect die = layout.die.rect();
  for (const auto& m : layout.macros) {
    const Rect r = m.rect.inflated(layout.halo);
    const double x0 = std::max(r.x, die.x), y0 = std::max(r.y, die.y);
    const double x1 = std::min(r.right(), die.right()), y1 = std::min(r.top(), die.top());
    if (x1 > x0 && y1 > y0) out.push_back({x0, y0, x1 - x0, y1 - y0});
  }
  return out;
}

}  // namespace detail

inline DensityMap density_map(const std::vector<RegionPlacement>& regions, const FloorplanLayout& layout, double bin) {
  const auto grid = detail::BinGrid::over(layout.die, bin);
  DensityMap map{grid.nx, grid.ny, bin, {}, {}, 0.0};
  const std::size_t count = static_cast<std::size_t>(grid.nx) * grid.ny;
  map.utilization.assign(count, 0.0);
  map.placeable.assign(count, 0.0);
  std::vector<double> cells(count, 0.0);

  const auto blocked = detail::blocked_rects(layout);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Rect cell = grid.cell(ix, iy, layout.die);
      double free = cell.area();
      for (const auto& b : blocked) free -= intersection_area(cell, b);
      map.placeable[static_cast<std::size_t>(iy) * grid.nx + ix] = std::max(free, 0.0);
    }

  for (const auto& region : regions)
    for (const auto& r : region.rects) {
      const int x0 = grid.clamp_x(r.x), x1 = grid.clamp_x(r.right() - 1e-12);
      const int y0 = grid.clamp_y(r.y), y1 = grid.clamp_y(r.top() - 1e-12);
      for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix) {
          const double a = intersection_area(r, grid.cell(ix, iy, layout.die)) * region.utilization;
          cells[static_cast<std::size_t>(iy) * grid.nx + ix] += a;
          map.cell_area += a;
        }
    }

  for (std::size_t k = 0; k < count; ++k) {
    const double free = map.placeable[k];
    map.utilization[k] = free > 1e-9 * bin * bin ? std::clamp(cells[k] / free, 0.0, 1.0) : 0.0;
  }
  return map;
}

}  // namespace softtile
