#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "softtile/cluster.hpp"
#include "softtile/geometry.hpp"
#include "softtile/json_util.hpp"
#include "softtile/sweep.hpp"

namespace softtile {

enum class QuadrantArrangement { Grid2x2, Column1x4, Row4x1 };

inline std::string_view to_string(QuadrantArrangement a) {
  switch (a) {
    case QuadrantArrangement::Grid2x2: return "2x2";
    case QuadrantArrangement::Column1x4: return "1x4";
    case QuadrantArrangement::Row4x1: return "4x1";
  }
  return "2x2";
}

inline QuadrantArrangement arrangement_from_string(std::string_view s) {
  for (auto a : {QuadrantArrangement::Grid2x2, QuadrantArrangement::Column1x4, QuadrantArrangement::Row4x1})
    if (to_string(a) == s) return a;
  throw Error(ErrorKind::Usage, "unknown quadrant arrangement '" + std::string(s) + "' (expected 2x2, 1x4 or 4x1)");
}

/// Four cluster tiles plus the shared read-only cache strip.
struct QuadrantTemplate {
  QuadrantArrangement arrangement = QuadrantArrangement::Grid2x2;
  /// Cache strip area as a fraction of the four tiles' area.
  double cache_frac = 0.15;
  Edge cache_side = Edge::Bottom;
  double channel_um = 20.0;
};

enum class TileKind { Cluster, Cache, Manager, Io };

inline std::string_view to_string(TileKind k) {
  switch (k) {
    case TileKind::Cluster: return "cluster";
    case TileKind::Cache: return "cache";
    case TileKind::Manager: return "manager";
    case TileKind::Io: return "io";
  }
  return "cluster";
}

struct TileRect {
  TileKind kind = TileKind::Cluster;
  Rect rect;
  int quadrant = -1;

  friend bool operator==(const TileRect&, const TileRect&) = default;
};

struct QuadrantLayout {
  Rect outline;
  std::vector<TileRect> tiles;
};

/// Tiles of `tile_w` x `tile_h` in the template's arrangement with the cache
/// strip on the requested side, anchored at the origin.
inline QuadrantLayout compose_quadrant(double tile_w, double tile_h, const QuadrantTemplate& t) {
  if (!(tile_w > 0.0) || !(tile_h > 0.0)) throw Error(ErrorKind::InvalidArgument, "tile dimensions must be positive");
  if (t.channel_um < 0.0 || t.cache_frac < 0.0)
    throw Error(ErrorKind::InvalidArgument, "channels and strip fractions must not be negative");
  int cols = 2, rows = 2;
  if (t.arrangement == QuadrantArrangement::Column1x4) cols = 1, rows = 4;
  if (t.arrangement == QuadrantArrangement::Row4x1) cols = 4, rows = 1;
  const double c = t.channel_um;
  const double block_w = cols * tile_w + (cols - 1) * c;
  const double block_h = rows * tile_h + (rows - 1) * c;

  const double cache_area = t.cache_frac * 4.0 * tile_w * tile_h;
  const bool horizontal_strip = t.cache_side == Edge::Bottom || t.cache_side == Edge::Top;
  double ox = 0.0, oy = 0.0;  // offset of the cluster block
  Rect strip;
  if (cache_area > 0.0) {
    if (horizontal_strip) {
      const double sh = cache_area / block_w;
      strip = {0.0, 0.0, block_w, sh};
      if (t.cache_side == Edge::Bottom)
        oy = sh + c;
      else
        strip.y = block_h + c;
    } else {
      const double sw = cache_area / block_h;
      strip = {0.0, 0.0, sw, block_h};
      if (t.cache_side == Edge::Left)
        ox = sw + c;
      else
        strip.x = block_w + c;
    }
  }

  QuadrantLayout q;
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < cols; ++k)
      q.tiles.push_back({TileKind::Cluster, {ox + k * (tile_w + c), oy + (rows - 1 - r) * (tile_h + c), tile_w, tile_h}});
  if (cache_area > 0.0) q.tiles.push_back({TileKind::Cache, strip});
  double right = 0.0, top = 0.0;
  for (const auto& tile : q.tiles) {
    right = std::max(right, tile.rect.right());
    top = std::max(top, tile.rect.top());
  }
  q.outline = {0.0, 0.0, right, top};
  return q;
}

/// Top-level arrangement of eight quadrants, one manager strip and an I/O
/// strip on the left die edge.
struct TopLevelTemplate {
  std::string name;
  int grid_rows = 2;
  int grid_cols = 4;
  double demanded_q = 1.0;
  double channel_um = 20.0;
  /// Overrides the quadrant template's cache strip fraction when set.
  std::optional<double> cache_frac;
  /// I/O strip area as a fraction of the die.
  double io_frac = 0.05;
  /// Manager core area in cluster-tile equivalents.
  double manager_clusters = 1.0;

  friend bool operator==(const TopLevelTemplate&, const TopLevelTemplate&) = default;
};

inline std::vector<TopLevelTemplate> builtin_templates() {
  return {
      {"wide", 4, 2, 2.5, 20.0, 0.15, 0.05, 1.0},
      {"square", 2, 4, 1.0, 20.0, 0.15, 0.05, 1.0},
      {"tall", 2, 4, 0.4, 20.0, 0.15, 0.05, 1.0},
  };
}

struct PlanConstraints {
  double min_freq_mhz = 0.0;
  double q_tolerance = 0.05;
};

struct TopLevelPlan {
  std::string template_name;
  bool accepted = false;
  std::string reason;
  Rect die;
  std::vector<TileRect> tiles;
  double utilization = 0.0;
  double cluster_area_um2 = 0.0;
  double channel_area_um2 = 0.0;
  FloorplanStyle style = FloorplanStyle::OneSided;
  double q = 0.0;
  double tile_freq_mhz = 0.0;
  double tile_w = 0.0;
  double tile_h = 0.0;
};

namespace detail {

inline void validate_template(const TopLevelTemplate& t) {
  if (t.grid_rows < 1 || t.grid_cols < 1 || t.grid_rows * t.grid_cols != 8)
    throw Error(ErrorKind::InvalidArgument, "template '" + t.name + "' must arrange exactly 8 quadrants");
  if (!(t.demanded_q > 0.0)) throw Error(ErrorKind::InvalidAspect, "template '" + t.name + "' demands Q <= 0");
  if (t.channel_um < 0.0 || t.io_frac < 0.0 || t.io_frac >= 1.0 || t.manager_clusters < 0.0 ||
      (t.cache_frac && *t.cache_frac < 0.0))
    throw Error(ErrorKind::InvalidArgument, "template '" + t.name + "' has a negative or oversized strip");
}

inline void layout_plan(TopLevelPlan& plan, const TopLevelTemplate& t, QuadrantTemplate quadrant) {
  if (t.cache_frac) quadrant.cache_frac = *t.cache_frac;
  const QuadrantLayout quad = compose_quadrant(plan.tile_w, plan.tile_h, quadrant);
  const double c = t.channel_um;
  const double qw = quad.outline.w, qh = quad.outline.h;
  const double core_w = t.grid_cols * qw + (t.grid_cols - 1) * c;
  const double core_h = t.grid_rows * qh + (t.grid_rows - 1) * c;

  const double manager_area = t.manager_clusters * plan.tile_w * plan.tile_h;
  const double manager_h = manager_area > 0.0 ? manager_area / core_w : 0.0;
  const double body_h = manager_area > 0.0 ? core_h + c + manager_h : core_h;
  // The I/O strip takes io_frac of the final die: w_io = f (core_w + c) / (1 - f).
  const double io_w = t.io_frac > 0.0 ? t.io_frac * (core_w + c) / (1.0 - t.io_frac) : 0.0;
  const double ox = io_w > 0.0 ? io_w + c : 0.0;

  plan.tiles.clear();
  for (int r = 0; r < t.grid_rows; ++r)
    for (int k = 0; k < t.grid_cols; ++k) {
      const int index = r * t.grid_cols + k;
      const double x = ox + k * (qw + c), y = (t.grid_rows - 1 - r) * (qh + c);
      for (const auto& tile : quad.tiles) plan.tiles.push_back({tile.kind, tile.rect.translated(x, y), index});
    }
  if (manager_area > 0.0) plan.tiles.push_back({TileKind::Manager, {ox, core_h + c, core_w, manager_h}});
  if (io_w > 0.0) plan.tiles.push_back({TileKind::Io, {0.0, 0.0, io_w, body_h}});

  plan.die = {0.0, 0.0, ox + core_w, body_h};
  double active = 0.0;
  plan.cluster_area_um2 = 0.0;
  for (const auto& tile : plan.tiles) {
    active += tile.rect.area();
    if (tile.kind == TileKind::Cluster) plan.cluster_area_um2 += tile.rect.area();
  }
  // Summing 32+ rect areas can miss the die area by a few ulps.
  const bool tight = std::abs(active - plan.die.area()) <= 1e-9 * plan.die.area();
  plan.utilization = tight ? 1.0 : std::min(1.0, active / plan.die.area());
  plan.channel_area_um2 = std::max(0.0, plan.die.area() - active);
}

}  // namespace detail

/// Picks the fastest feasible characterized tile at the template's demanded
/// aspect ratio and lays out the die around it. Plans without a qualifying
/// tile come back rejected with a reason.
inline TopLevelPlan evaluate_plan(const TopLevelTemplate& t, const QuadrantTemplate& quadrant,
                                  const CharacterizationDB& db, const PlanConstraints& constraints = {}) {
  detail::validate_template(t);
  TopLevelPlan plan;
  plan.template_name = t.name;

  std::vector<const CharacterizationRecord*> candidates;
  for (const auto& r : db.records)
    if (std::abs(r.q - t.demanded_q) <= constraints.q_tolerance + 1e-12) candidates.push_back(&r);
  if (candidates.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "no characterized tile at Q=%g (tolerance %g)", t.demanded_q,
                  constraints.q_tolerance);
    throw Error(ErrorKind::MissingCharacterization, buf);
  }

  const CharacterizationRecord* best = nullptr;
  for (const auto* r : candidates) {
    if (!r->has_metrics || !r->estimate.feasible || r->estimate.freq_mhz < constraints.min_freq_mhz) continue;
    if (!best) {
      best = r;
      continue;
    }
    const double fa = r->estimate.freq_mhz, fb = best->estimate.freq_mhz;
    const double da = std::abs(r->q - t.demanded_q), dbq = std::abs(best->q - t.demanded_q);
    if (fa > fb || (fa == fb && (to_string(r->style) < to_string(best->style) ||
                                 (r->style == best->style && da < dbq))))
      best = r;
  }
  if (!best) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "no feasible tile at Q=%g reaches %.1f MHz", t.demanded_q,
                  constraints.min_freq_mhz);
    plan.reason = buf;
    return plan;
  }

  plan.accepted = true;
  plan.style = best->style;
  plan.q = best->q;
  plan.tile_freq_mhz = best->estimate.freq_mhz;
  const double area = db.core_area_mm2 * 1e6;
  plan.tile_w = std::sqrt(area * best->q);
  plan.tile_h = std::sqrt(area / best->q);
  detail::layout_plan(plan, t, quadrant);
  return plan;
}

struct RankedPlans {
  std::vector<TopLevelPlan> accepted;
  std::vector<std::pair<std::string, std::string>> rejected;  ///< (template, reason)
};

inline RankedPlans rank_plans(const std::vector<TopLevelTemplate>& templates, const QuadrantTemplate& quadrant,
                              const CharacterizationDB& db, const PlanConstraints& constraints = {}) {
  RankedPlans out;
  for (const auto& t : templates) {
    try {
      TopLevelPlan plan = evaluate_plan(t, quadrant, db, constraints);
      if (plan.accepted)
        out.accepted.push_back(std::move(plan));
      else
        out.rejected.emplace_back(t.name, plan.reason);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MissingCharacterization) throw;
      out.rejected.emplace_back(t.name, e.what());
    }
  }
  std::stable_sort(out.accepted.begin(), out.accepted.end(), [](const TopLevelPlan& a, const TopLevelPlan& b) {
    if (a.utilization != b.utilization) return a.utilization > b.utilization;
    if (a.tile_freq_mhz != b.tile_freq_mhz) return a.tile_freq_mhz > b.tile_freq_mhz;
    return a.template_name < b.template_name;
  });
  return out;
}

inline std::vector<TopLevelTemplate> templates_from_json(const Json& j) {
  using namespace detail;
  std::vector<TopLevelTemplate> out;
  auto one = [&](const Json& t, const std::string& p) {
    json_reject_unknown(t, p,
                        {"name", "grid_rows", "grid_cols", "demanded_q", "channel_um", "cache_frac", "io_frac",
                         "manager_clusters"});
    TopLevelTemplate tt;
    tt.name = json_string(json_field(t, p, "name"), json_child(p, "name"));
    tt.grid_rows = json_int(json_field(t, p, "grid_rows"), json_child(p, "grid_rows"));
    tt.grid_cols = json_int(json_field(t, p, "grid_cols"), json_child(p, "grid_cols"));
    tt.demanded_q = json_number(json_field(t, p, "demanded_q"), json_child(p, "demanded_q"));
    tt.channel_um = json_number(json_field(t, p, "channel_um"), json_child(p, "channel_um"));
    tt.cache_frac = json_number(json_field(t, p, "cache_frac"), json_child(p, "cache_frac"));
    tt.io_frac = json_number(json_field(t, p, "io_frac"), json_child(p, "io_frac"));
    if (const Json* m = json_optional(t, p, "manager_clusters"))
      tt.manager_clusters = json_number(*m, json_child(p, "manager_clusters"));
    validate_template(tt);
    out.push_back(std::move(tt));
  };
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) one(j[i], json_child("", i));
  } else {
    one(j, "");
  }
  return out;
}

inline std::vector<TopLevelTemplate> load_templates(std::string_view text) {
  return templates_from_json(detail::parse_json(text));
}

inline Json plans_to_json(const RankedPlans& ranked) {
  Json accepted = Json::array();
  for (const auto& p : ranked.accepted) {
    Json tiles = Json::array();
    for (const auto& t : p.tiles)
      tiles.push_back({{"kind", to_string(t.kind)}, {"quadrant", t.quadrant},
                       {"rect", {t.rect.x, t.rect.y, t.rect.w, t.rect.h}}});
    accepted.push_back({{"template", p.template_name},
                        {"style", to_string(p.style)},
                        {"q", p.q},
                        {"tile_freq_mhz", p.tile_freq_mhz},
                        {"tile", {p.tile_w, p.tile_h}},
                        {"die", {p.die.w, p.die.h}},
                        {"utilization", p.utilization},
                        {"cluster_area_mm2", p.cluster_area_um2 * 1e-6},
                        {"channel_area_mm2", p.channel_area_um2 * 1e-6},
                        {"tiles", tiles}});
  }
  Json rejected = Json::array();
  for (const auto& [name, reason] : ranked.rejected) rejected.push_back({{"template", name}, {"reason", reason}});
  return {{"accepted", accepted}, {"rejected", rejected}};
}

}  // namespace softtile
