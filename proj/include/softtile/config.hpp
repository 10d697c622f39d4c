#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "softtile/cluster.hpp"
#include "softtile/digest.hpp"
#include "softtile/json_util.hpp"
#include "softtile/qor.hpp"
#include "softtile/styles.hpp"

namespace softtile {

/// Every tunable of the generate / assess pipeline in one place. Loaded from
/// the file given with --config; unknown keys are rejected.
struct Config {
  LayoutParams layout;
  CongestionParams congestion;
  Thresholds thresholds;
  double density_bin_um = 10.0;
  /// Fixed delay model; when absent the sweep fits one on the two published
  /// anchor instances.
  std::optional<CalibrationParams> calibration;
  /// Accepted vertical-symmetry error; absent means one macro pitch.
  std::optional<double> symmetry_tolerance_um;
};

inline Json config_to_json(const Config& c) {
  Json j = {{"layout",
             {{"halo_um", c.layout.halo_um},
              {"icache_inset_um", c.layout.icache_inset_um},
              {"core_channel_um", c.layout.core_channel_um},
              {"two_sided_width_fraction", c.layout.two_sided_width_fraction}}},
            {"congestion",
             {{"bin_um", c.congestion.bin_um},
              {"tracks_per_um", c.congestion.tracks_per_um},
              {"macro_blockage", c.congestion.macro_blockage}}},
            {"thresholds", {{"max_overflow_bins", c.thresholds.max_overflow_bins}}},
            {"density_bin_um", c.density_bin_um}};
  if (c.calibration) j["calibration"] = {{"d0_ns", c.calibration->d0_ns}, {"k_ns_per_mm", c.calibration->k_ns_per_mm}};
  if (c.symmetry_tolerance_um) j["symmetry_tolerance_um"] = *c.symmetry_tolerance_um;
  return j;
}

inline Config config_from_json(const Json& j) {
  using namespace detail;
  Config c;
  json_reject_unknown(j, "",
                      {"layout", "congestion", "thresholds", "density_bin_um", "calibration", "symmetry_tolerance_um"});
  auto number = [](const Json& obj, const std::string& path, std::string_view key, double& out) {
    if (const Json* v = json_optional(obj, path, key)) out = json_number(*v, json_child(path, key));
  };
  if (const Json* l = json_optional(j, "", "layout")) {
    json_reject_unknown(*l, "/layout", {"halo_um", "icache_inset_um", "core_channel_um", "two_sided_width_fraction"});
    number(*l, "/layout", "halo_um", c.layout.halo_um);
    number(*l, "/layout", "icache_inset_um", c.layout.icache_inset_um);
    number(*l, "/layout", "core_channel_um", c.layout.core_channel_um);
    number(*l, "/layout", "two_sided_width_fraction", c.layout.two_sided_width_fraction);
  }
  if (const Json* g = json_optional(j, "", "congestion")) {
    json_reject_unknown(*g, "/congestion", {"bin_um", "tracks_per_um", "macro_blockage"});
    number(*g, "/congestion", "bin_um", c.congestion.bin_um);
    number(*g, "/congestion", "tracks_per_um", c.congestion.tracks_per_um);
    number(*g, "/congestion", "macro_blockage", c.congestion.macro_blockage);
  }
  if (const Json* t = json_optional(j, "", "thresholds")) {
    json_reject_unknown(*t, "/thresholds", {"max_overflow_bins"});
    if (const Json* v = json_optional(*t, "/thresholds", "max_overflow_bins"))
      c.thresholds.max_overflow_bins = json_int(*v, "/thresholds/max_overflow_bins");
  }
  number(j, "", "density_bin_um", c.density_bin_um);
  if (const Json* k = json_optional(j, "", "calibration")) {
    json_reject_unknown(*k, "/calibration", {"d0_ns", "k_ns_per_mm"});
    CalibrationParams cal;
    cal.d0_ns = json_number(json_field(*k, "/calibration", "d0_ns"), "/calibration/d0_ns");
    cal.k_ns_per_mm = json_number(json_field(*k, "/calibration", "k_ns_per_mm"), "/calibration/k_ns_per_mm");
    if (!(cal.d0_ns > 0.0) || cal.k_ns_per_mm < 0.0)
      throw Error(ErrorKind::Validation, "calibration needs d0_ns > 0 and k_ns_per_mm >= 0");
    c.calibration = cal;
  }
  if (const Json* s = json_optional(j, "", "symmetry_tolerance_um"))
    c.symmetry_tolerance_um = json_number(*s, "/symmetry_tolerance_um");

  if (!(c.congestion.bin_um > 0.0)) throw Error(ErrorKind::Validation, "congestion bin_um must be positive");
  if (!(c.density_bin_um > 0.0)) throw Error(ErrorKind::Validation, "density_bin_um must be positive");
  if (c.layout.halo_um < 0.0) throw Error(ErrorKind::Validation, "halo_um must not be negative");
  return c;
}

inline Config load_config(std::string_view text) { return config_from_json(detail::parse_json(text)); }

inline std::string config_digest(const Config& c) { return hex_digest(config_to_json(c).dump()); }

}  // namespace softtile
