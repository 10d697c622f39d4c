#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "softtile/digest.hpp"
#include "softtile/error.hpp"
#include "softtile/geometry.hpp"

namespace softtile {

/// One physically implemented tile instance (style x aspect ratio) as
/// published; these numbers come from a commercial flow and are never
/// recomputed here.
struct PublishedRecord {
  FloorplanStyle style = FloorplanStyle::OneSided;
  double q = 1.0;
  double freq_mhz = 0.0;
  double tns_ns = 0.0;
  int violating_paths = 0;
  double rtwl_m = 0.0;
  int drcs = 0;
  double buffers = 0.0;
  double cell_density = 0.0;  ///< fraction

  friend bool operator==(const PublishedRecord&, const PublishedRecord&) = default;
};

enum class PublishedMetric { Frequency, Tns, ViolatingPaths, Wirelength, Drcs, Buffers, CellDensity };

inline constexpr std::array<PublishedRecord, 9> kPublishedTable{{
    {FloorplanStyle::OneSided, 0.4, 888.8, -33.8, 5352, 17.1, 36, 141.1e3, 0.595},
    {FloorplanStyle::TwoSided, 0.4, 886.5, -48.2, 5787, 17.6, 417, 143.8e3, 0.607},
    {FloorplanStyle::UShape, 0.4, 875.7, -103.3, 6819, 17.0, 259, 140.0e3, 0.597},
    {FloorplanStyle::OneSided, 1.0, 927.6, -25.5, 4890, 15.8, 38, 130.8e3, 0.573},
    {FloorplanStyle::TwoSided, 1.0, 939.8, -30.2, 5372, 15.9, 227, 131.0e3, 0.579},
    {FloorplanStyle::UShape, 1.0, 940.7, -24.7, 4459, 15.6, 38, 128.9e3, 0.574},
    {FloorplanStyle::OneSided, 2.5, 921.7, -37.5, 6163, 16.9, 654, 138.1e3, 0.587},
    {FloorplanStyle::TwoSided, 2.5, 909.1, -40.2, 5871, 16.9, 2943, 137.3e3, 0.589},
    {FloorplanStyle::UShape, 2.5, 925.1, -78.2, 8271, 16.6, 86, 133.6e3, 0.585},
}};

inline constexpr double kPublishedAspects[] = {0.4, 1.0, 2.5};

inline bool same_aspect(double a, double b) { return std::abs(a - b) <= 1e-9; }

inline const PublishedRecord& published_qor(FloorplanStyle style, double q) {
  for (const auto& r : kPublishedTable)
    if (r.style == style && same_aspect(r.q, q)) return r;
  char buf[96];
  std::snprintf(buf, sizeof buf, "no published instance for %s at Q=%g", std::string(to_string(style)).c_str(), q);
  throw Error(ErrorKind::NotPublished, buf);
}

/// Routability verdict of the published instances: every 1-sided tile, the
/// square and wide u-shape and the square 2-sided tile count as feasible.
inline bool reference_feasible(FloorplanStyle style, double q) {
  published_qor(style, q);
  switch (style) {
    case FloorplanStyle::OneSided: return true;
    case FloorplanStyle::TwoSided: return same_aspect(q, 1.0);
    case FloorplanStyle::UShape: return same_aspect(q, 1.0) || same_aspect(q, 2.5);
  }
  return false;
}

inline double metric_value(const PublishedRecord& r, PublishedMetric m) {
  switch (m) {
    case PublishedMetric::Frequency: return r.freq_mhz;
    case PublishedMetric::Tns: return r.tns_ns;
    case PublishedMetric::ViolatingPaths: return r.violating_paths;
    case PublishedMetric::Wirelength: return r.rtwl_m;
    case PublishedMetric::Drcs: return r.drcs;
    case PublishedMetric::Buffers: return r.buffers;
    case PublishedMetric::CellDensity: return r.cell_density;
  }
  return 0.0;
}

/// Signed percentage by which `a` differs from `b`.
inline double relative_gap(const PublishedRecord& a, const PublishedRecord& b, PublishedMetric metric) {
  const double vb = metric_value(b, metric);
  if (vb == 0.0) throw Error(ErrorKind::Division, "relative gap against a zero reference value");
  return 100.0 * (metric_value(a, metric) - vb) / vb;
}

inline std::string published_table_csv() {
  std::string out = "style,q,eff_freq_mhz,tns_ns,violating_paths,rtwl_m,drcs,buffers,cell_density\n";
  char buf[192];
  for (const auto& r : kPublishedTable) {
    std::snprintf(buf, sizeof buf, "%s,%.1f,%.1f,%.1f,%d,%.1f,%d,%.1f,%.3f\n", std::string(to_string(r.style)).c_str(),
                  r.q, r.freq_mhz, r.tns_ns, r.violating_paths, r.rtwl_m, r.drcs, r.buffers, r.cell_density);
    out += buf;
  }
  return out;
}

/// Checksum of published_table_csv(); any edit to the stored table changes it.
inline constexpr std::string_view kPublishedTableDigest = "2980f457a74382f2";

inline std::string published_table_digest() { return hex_digest(published_table_csv()); }

}  // namespace softtile
