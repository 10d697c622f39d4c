#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "softtile/config.hpp"
#include "softtile/layout_io.hpp"
#include "softtile/qor.hpp"
#include "softtile/reference.hpp"
#include "softtile/soft_placer.hpp"
#include "softtile/spec_io.hpp"
#include "softtile/styles.hpp"

namespace softtile {

/// One pass of the pipeline for a single (style, Q): macro placement,
/// quadratic centroids, region legalization and metric extraction. Geometric
/// failures are captured, not thrown.
struct Evaluation {
  FloorplanStyle style = FloorplanStyle::OneSided;
  double q = 1.0;
  bool placed = false;
  std::string failure;
  FloorplanLayout layout;          ///< includes the legalized regions
  CentroidSolution quadratic;      ///< raw solver output
  CentroidSolution positions;      ///< region centres used by the metrics
  double critical_path_mm = 0.0;
  QorEstimate estimate;
};

/// Everything except the frequency, which needs a calibration.
inline Evaluation measure(const ClusterSpec& spec, FloorplanStyle style, double q, const Config& config = {}) {
  Evaluation e;
  e.style = style;
  e.q = q;
  e.estimate.style = style;
  e.estimate.q = q;
  const DieOutline die = die_outline(spec, q);
  try {
    e.layout = place(style, spec, die, config.layout);
    e.quadratic = quadratic_centroids(spec, e.layout);
    e.layout.regions = legalize_regions(e.quadratic, e.layout, spec);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Infeasible && err.kind() != ErrorKind::OverUtilization &&
        err.kind() != ErrorKind::OddCount)
      throw;
    e.failure = err.what();
    e.layout.die = die;
    e.layout.style = style;
    e.layout.macros.clear();
    e.layout.regions.clear();
    return e;
  }
  e.placed = true;
  e.positions = region_centroids(e.quadratic, e.layout.regions);
  e.critical_path_mm = critical_path_length(spec, e.layout, e.positions);
  e.estimate = assess({spec, e.layout, e.layout.regions, e.positions}, CalibrationParams{}, config.thresholds,
                      config.congestion, config.density_bin_um);
  return e;
}

inline void apply_calibration(Evaluation& e, const ClusterSpec& spec, const CalibrationParams& cal) {
  if (!e.placed) return;
  e.estimate.freq_mhz = effective_frequency(e.critical_path_mm, cal, spec.target_freq_mhz);
}

/// Two-point fit on the published square u-shape and tall 1-sided tiles.
inline CalibrationParams auto_calibration(const ClusterSpec& spec, const Config& config,
                                          const std::vector<Evaluation>& known = {}) {
  auto length_of = [&](FloorplanStyle style, double q) {
    for (const auto& e : known)
      if (e.style == style && same_aspect(e.q, q) && e.placed) return e.critical_path_mm;
    const Evaluation e = measure(spec, style, q, config);
    if (!e.placed) throw Error(ErrorKind::Infeasible, "calibration anchor is infeasible: " + e.failure);
    return e.critical_path_mm;
  };
  const CalibrationAnchor anchors[] = {
      {length_of(FloorplanStyle::UShape, 1.0), published_qor(FloorplanStyle::UShape, 1.0).freq_mhz},
      {length_of(FloorplanStyle::OneSided, 0.4), published_qor(FloorplanStyle::OneSided, 0.4).freq_mhz},
  };
  return calibrate(anchors);
}

inline Evaluation evaluate(const ClusterSpec& spec, FloorplanStyle style, double q, const Config& config = {}) {
  Evaluation e = measure(spec, style, q, config);
  const CalibrationParams cal = config.calibration ? *config.calibration : auto_calibration(spec, config, {e});
  apply_calibration(e, spec, cal);
  return e;
}

struct CharacterizationRecord {
  FloorplanStyle style = FloorplanStyle::OneSided;
  double q = 1.0;
  bool has_metrics = false;  ///< false when the outline could not be placed
  QorEstimate estimate;
  std::string layout_digest;

  friend bool operator==(const CharacterizationRecord&, const CharacterizationRecord&) = default;
};

struct CharacterizationDB {
  std::vector<CharacterizationRecord> records;  ///< sorted by (style, q)
  std::vector<double> grid;
  std::string spec_digest;
  std::string config_digest;
  CalibrationParams calibration;
  double core_area_mm2 = 0.9;

  const CharacterizationRecord* find(FloorplanStyle style, double q) const {
    for (const auto& r : records)
      if (r.style == style && same_aspect(r.q, q)) return &r;
    return nullptr;
  }

  void sort() {
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
      return a.style != b.style ? a.style < b.style : a.q < b.q;
    });
  }

  friend bool operator==(const CharacterizationDB&, const CharacterizationDB&) = default;
};

/// 0.4, 0.5, ..., 2.5.
inline std::vector<double> default_q_grid() {
  std::vector<double> g;
  for (int k = 4; k <= 25; ++k) g.push_back(k / 10.0);
  return g;
}

inline std::vector<double> published_q_grid() { return {0.4, 1.0, 2.5}; }

/// Runs `count` independent jobs on up to `threads` workers.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          job(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline CharacterizationDB sweep(const ClusterSpec& spec, const std::vector<FloorplanStyle>& styles,
                                std::vector<double> grid, const Config& config = {}, unsigned threads = 1) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "the Q grid is empty");
  for (double q : grid)
    if (!(q > 0.0) || !std::isfinite(q))
      throw Error(ErrorKind::InvalidAspect, "Q grid values must be positive, got " + std::to_string(q));
  const auto violations = validate(spec);
  if (!violations.empty()) throw Error(ErrorKind::Validation, "invalid cluster spec: " + violations.front().message);

  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return same_aspect(a, b); }), grid.end());
  std::vector<FloorplanStyle> style_set = styles;
  std::sort(style_set.begin(), style_set.end());
  style_set.erase(std::unique(style_set.begin(), style_set.end()), style_set.end());

  std::vector<Evaluation> evals(style_set.size() * grid.size());
  parallel_for(evals.size(), threads, [&](std::size_t i) {
    evals[i] = measure(spec, style_set[i / grid.size()], grid[i % grid.size()], config);
  });

  CharacterizationDB db;
  db.grid = grid;
  db.spec_digest = spec_digest(spec);
  db.config_digest = config_digest(config);
  db.core_area_mm2 = spec.core_area_mm2;
  db.calibration = config.calibration ? *config.calibration : auto_calibration(spec, config, evals);
  for (auto& e : evals) {
    apply_calibration(e, spec, db.calibration);
    CharacterizationRecord r;
    r.style = e.style;
    r.q = e.q;
    r.has_metrics = e.placed;
    r.estimate = e.estimate;
    if (e.placed) r.layout_digest = layout_digest(e.layout);
    db.records.push_back(std::move(r));
  }
  db.sort();
  return db;
}

enum class Metric { Frequency, Wirelength, Overflow };

inline Metric metric_from_string(std::string_view s) {
  if (s == "frequency") return Metric::Frequency;
  if (s == "wirelength") return Metric::Wirelength;
  if (s == "overflow") return Metric::Overflow;
  throw Error(ErrorKind::Usage, "unknown metric '" + std::string(s) + "' (expected frequency, wirelength or overflow)");
}

/// Winning feasible record per aspect ratio: highest frequency, or lowest
/// wirelength / overflow total. Ties go to the lexicographically first style.
inline std::map<double, CharacterizationRecord> best_per_aspect(const CharacterizationDB& db, Metric metric) {
  if (db.records.empty()) throw Error(ErrorKind::InvalidArgument, "characterization database is empty");
  auto better = [&](const CharacterizationRecord& a, const CharacterizationRecord& b) {
    switch (metric) {
      case Metric::Frequency: return a.estimate.freq_mhz > b.estimate.freq_mhz;
      case Metric::Wirelength: return a.estimate.wirelength_m < b.estimate.wirelength_m;
      case Metric::Overflow: return a.estimate.overflow_total < b.estimate.overflow_total;
    }
    return false;
  };
  std::vector<const CharacterizationRecord*> order;
  for (const auto& r : db.records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    return to_string(a->style) < to_string(b->style);
  });
  std::map<double, CharacterizationRecord> out;
  for (const auto* r : order) {
    if (!r->has_metrics || !r->estimate.feasible) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& kv) { return same_aspect(kv.first, r->q); });
    if (it == out.end())
      out.emplace(r->q, *r);
    else if (better(*r, it->second))
      it->second = *r;
  }
  return out;
}

inline constexpr std::string_view kDbCsvHeader =
    "style,q,est_freq_mhz,est_wl_m,overflow_bins,overflow_total,mean_density,peak_density,feasible,layout_digest";

inline std::string format_g4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string export_csv(const CharacterizationDB& db) {
  std::string out(kDbCsvHeader);
  out += '\n';
  for (const auto& r : db.records) {
    out += std::string(to_string(r.style)) + "," + format_g4(r.q) + ",";
    if (r.has_metrics) {
      const auto& e = r.estimate;
      out += format_g4(e.freq_mhz) + "," + format_g4(e.wirelength_m) + "," + std::to_string(e.overflow_bins) + "," +
             format_g4(e.overflow_total) + "," + format_g4(e.mean_density) + "," + format_g4(e.peak_density) + ",";
    } else {
      out += ",,,,,,";
    }
    out += (r.has_metrics && r.estimate.feasible) ? "true" : "false";
    out += "," + r.layout_digest + "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

inline double csv_number(const std::string& cell, int line, const char* column) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size())
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": bad number '" + cell + "' in column " + column);
  return v;
}

}  // namespace detail

/// Reads a CSV written by export_csv. Values carry the CSV's 4 significant
/// digits; sweep metadata is not part of the CSV and stays at its defaults.
inline CharacterizationDB import_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty CSV document");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDbCsvHeader) throw Error(ErrorKind::Parse, "line 1: unexpected CSV header");
  CharacterizationDB db;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto c = detail::split_csv_line(line);
    if (c.size() != 10) throw Error(ErrorKind::Parse, "line " + std::to_string(n) + ": expected 10 columns");
    CharacterizationRecord r;
    r.style = detail::style_at(c[0], "line " + std::to_string(n));
    r.q = detail::csv_number(c[1], n, "q");
    r.estimate.style = r.style;
    r.estimate.q = r.q;
    r.has_metrics = !c[2].empty();
    if (r.has_metrics) {
      r.estimate.freq_mhz = detail::csv_number(c[2], n, "est_freq_mhz");
      r.estimate.wirelength_m = detail::csv_number(c[3], n, "est_wl_m");
      r.estimate.overflow_bins = static_cast<int>(detail::csv_number(c[4], n, "overflow_bins"));
      r.estimate.overflow_total = detail::csv_number(c[5], n, "overflow_total");
      r.estimate.mean_density = detail::csv_number(c[6], n, "mean_density");
      r.estimate.peak_density = detail::csv_number(c[7], n, "peak_density");
    }
    if (c[8] != "true" && c[8] != "false")
      throw Error(ErrorKind::Parse, "line " + std::to_string(n) + ": feasible must be true or false");
    r.estimate.feasible = c[8] == "true";
    r.layout_digest = c[9];
    if (db.find(r.style, r.q)) throw Error(ErrorKind::Parse, "line " + std::to_string(n) + ": duplicate (style, q)");
    if (std::find_if(db.grid.begin(), db.grid.end(), [&](double g) { return same_aspect(g, r.q); }) == db.grid.end())
      db.grid.push_back(r.q);
    db.records.push_back(std::move(r));
  }
  std::sort(db.grid.begin(), db.grid.end());
  db.sort();
  return db;
}

inline Json db_to_json(const CharacterizationDB& db) {
  Json records = Json::array();
  for (const auto& r : db.records) {
    Json j = {{"style", to_string(r.style)}, {"q", r.q}, {"has_metrics", r.has_metrics},
              {"feasible", r.estimate.feasible}, {"layout_digest", r.layout_digest}};
    if (r.has_metrics) {
      const auto& e = r.estimate;
      j["est_freq_mhz"] = e.freq_mhz;
      j["est_wl_m"] = e.wirelength_m;
      j["overflow_bins"] = e.overflow_bins;
      j["overflow_total"] = e.overflow_total;
      j["mean_density"] = e.mean_density;
      j["peak_density"] = e.peak_density;
    }
    records.push_back(std::move(j));
  }
  return {{"grid", db.grid},
          {"spec_digest", db.spec_digest},
          {"config_digest", db.config_digest},
          {"calibration", {{"d0_ns", db.calibration.d0_ns}, {"k_ns_per_mm", db.calibration.k_ns_per_mm}}},
          {"core_area_mm2", db.core_area_mm2},
          {"records", records}};
}

inline std::string export_json(const CharacterizationDB& db) { return db_to_json(db).dump(2) + "\n"; }

inline CharacterizationDB import_json(std::string_view text) {
  using namespace detail;
  const Json j = parse_json(text);
  json_reject_unknown(j, "", {"grid", "spec_digest", "config_digest", "calibration", "core_area_mm2", "records"});
  CharacterizationDB db;
  const Json& grid = json_array(json_field(j, "", "grid"), "/grid");
  for (std::size_t i = 0; i < grid.size(); ++i) db.grid.push_back(json_number(grid[i], json_child("/grid", i)));
  db.spec_digest = json_string(json_field(j, "", "spec_digest"), "/spec_digest");
  db.config_digest = json_string(json_field(j, "", "config_digest"), "/config_digest");
  const Json& cal = json_field(j, "", "calibration");
  db.calibration.d0_ns = json_number(json_field(cal, "/calibration", "d0_ns"), "/calibration/d0_ns");
  db.calibration.k_ns_per_mm = json_number(json_field(cal, "/calibration", "k_ns_per_mm"), "/calibration/k_ns_per_mm");
  db.core_area_mm2 = json_number(json_field(j, "", "core_area_mm2"), "/core_area_mm2");
  const Json& records = json_array(json_field(j, "", "records"), "/records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string p = json_child("/records", i);
    const Json& rj = records[i];
    CharacterizationRecord r;
    const std::string style = json_string(json_field(rj, p, "style"), json_child(p, "style"));
    r.style = style_at(style, json_child(p, "style"));
    r.q = json_number(json_field(rj, p, "q"), json_child(p, "q"));
    r.estimate.style = r.style;
    r.estimate.q = r.q;
    r.has_metrics = json_bool(json_field(rj, p, "has_metrics"), json_child(p, "has_metrics"));
    r.estimate.feasible = json_bool(json_field(rj, p, "feasible"), json_child(p, "feasible"));
    r.layout_digest = json_string(json_field(rj, p, "layout_digest"), json_child(p, "layout_digest"));
    if (r.has_metrics) {
      auto num = [&](const char* key) { return json_number(json_field(rj, p, key), json_child(p, key)); };
      r.estimate.freq_mhz = num("est_freq_mhz");
      r.estimate.wirelength_m = num("est_wl_m");
      r.estimate.overflow_bins = json_int(json_field(rj, p, "overflow_bins"), json_child(p, "overflow_bins"));
      r.estimate.overflow_total = num("overflow_total");
      r.estimate.mean_density = num("mean_density");
      r.estimate.peak_density = num("peak_density");
    }
    db.records.push_back(std::move(r));
  }
  db.sort();
  return db;
}

}  // namespace softtile
