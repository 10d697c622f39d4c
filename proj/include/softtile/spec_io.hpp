#pragma once

#include <string>
#include <string_view>

#include "softtile/cluster.hpp"
#include "softtile/digest.hpp"
#include "softtile/json_util.hpp"

namespace softtile {

inline Json spec_to_json(const ClusterSpec& spec) {
  Json j = Json::object();
  Json modules = Json::array();
  for (const auto& m : spec.modules)
    modules.push_back({{"id", m.id}, {"kind", to_string(m.kind)}, {"area", m.area}, {"anchors", m.anchors}});
  Json macros = Json::array();
  for (const auto& m : spec.macros)
    macros.push_back({{"id", m.id},
                      {"width", m.width},
                      {"height", m.height},
                      {"group", to_string(m.group)},
                      {"port_side", to_string(m.port_side)}});
  Json nets = Json::array();
  for (const auto& n : spec.nets)
    nets.push_back({{"id", n.id},
                    {"endpoints", n.endpoints},
                    {"bit_width", n.bit_width},
                    {"latency_class", to_string(n.latency)}});
  j["modules"] = std::move(modules);
  j["macros"] = std::move(macros);
  j["nets"] = std::move(nets);
  j["io_pins"] = spec.io_pins;
  j["core_area_mm2"] = spec.core_area_mm2;
  j["target_freq_mhz"] = spec.target_freq_mhz;
  j["target_utilization"] = spec.target_utilization;
  return j;
}

inline std::string save_spec(const ClusterSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

/// Parses without checking invariants; load_spec adds validation.
inline ClusterSpec spec_from_json(const Json& j) {
  using namespace detail;
  const std::string root;
  json_reject_unknown(j, root,
                      {"modules", "macros", "nets", "io_pins", "core_area_mm2", "target_freq_mhz", "target_utilization"});
  ClusterSpec spec;

  const std::string mpath = "/modules";
  const Json& modules = json_array(json_field(j, root, "modules"), mpath);
  for (std::size_t i = 0; i < modules.size(); ++i) {
    const std::string p = json_child(mpath, i);
    const Json& m = modules[i];
    json_reject_unknown(m, p, {"id", "kind", "area", "anchors"});
    SoftModuleSpec s;
    s.id = json_string(json_field(m, p, "id"), json_child(p, "id"));
    const std::string kp = json_child(p, "kind");
    const std::string kind = json_string(json_field(m, p, "kind"), kp);
    s.kind = json_enum(kp, [&] { return module_kind_from_string(kind); });
    s.area = json_number(json_field(m, p, "area"), json_child(p, "area"));
    if (const Json* anchors = json_optional(m, p, "anchors")) {
      const std::string ap = json_child(p, "anchors");
      json_array(*anchors, ap);
      for (std::size_t k = 0; k < anchors->size(); ++k) s.anchors.push_back(json_string((*anchors)[k], json_child(ap, k)));
    }
    spec.modules.push_back(std::move(s));
  }

  const std::string cpath = "/macros";
  const Json& macros = json_array(json_field(j, root, "macros"), cpath);
  for (std::size_t i = 0; i < macros.size(); ++i) {
    const std::string p = json_child(cpath, i);
    const Json& m = macros[i];
    json_reject_unknown(m, p, {"id", "width", "height", "group", "port_side"});
    MacroSpec s;
    s.id = json_string(json_field(m, p, "id"), json_child(p, "id"));
    s.width = json_number(json_field(m, p, "width"), json_child(p, "width"));
    s.height = json_number(json_field(m, p, "height"), json_child(p, "height"));
    const std::string gp = json_child(p, "group");
    const std::string group = json_string(json_field(m, p, "group"), gp);
    s.group = json_enum(gp, [&] { return macro_group_from_string(group); });
    const std::string sp = json_child(p, "port_side");
    const std::string side = json_string(json_field(m, p, "port_side"), sp);
    s.port_side = json_enum(sp, [&] { return edge_from_string(side); });
    spec.macros.push_back(std::move(s));
  }

  const std::string npath = "/nets";
  const Json& nets = json_array(json_field(j, root, "nets"), npath);
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const std::string p = json_child(npath, i);
    const Json& n = nets[i];
    json_reject_unknown(n, p, {"id", "endpoints", "bit_width", "latency_class"});
    NetSpec s;
    s.id = json_string(json_field(n, p, "id"), json_child(p, "id"));
    const std::string ep = json_child(p, "endpoints");
    const Json& endpoints = json_array(json_field(n, p, "endpoints"), ep);
    for (std::size_t k = 0; k < endpoints.size(); ++k) s.endpoints.push_back(json_string(endpoints[k], json_child(ep, k)));
    s.bit_width = json_int(json_field(n, p, "bit_width"), json_child(p, "bit_width"));
    if (const Json* lc = json_optional(n, p, "latency_class")) {
      const std::string lp = json_child(p, "latency_class");
      const std::string name = json_string(*lc, lp);
      s.latency = json_enum(lp, [&] { return latency_class_from_string(name); });
    }
    spec.nets.push_back(std::move(s));
  }

  if (const Json* pins = json_optional(j, root, "io_pins")) {
    json_array(*pins, "/io_pins");
    for (std::size_t k = 0; k < pins->size(); ++k) spec.io_pins.push_back(json_string((*pins)[k], json_child("/io_pins", k)));
  } else {
    for (int i = 0; i < ClusterParams{}.io_pin_count; ++i) spec.io_pins.push_back(detail::indexed("io", i));
  }
  spec.core_area_mm2 = json_number(json_field(j, root, "core_area_mm2"), "/core_area_mm2");
  spec.target_freq_mhz = json_number(json_field(j, root, "target_freq_mhz"), "/target_freq_mhz");
  spec.target_utilization = json_number(json_field(j, root, "target_utilization"), "/target_utilization");
  return spec;
}

/// Parses and validates a cluster-spec document. Schema problems raise a
/// parse error naming the offending path; invariant violations raise a
/// validation error listing every violation.
inline ClusterSpec load_spec(std::string_view text) {
  ClusterSpec spec = spec_from_json(detail::parse_json(text));
  const auto violations = validate(spec);
  if (!violations.empty()) {
    std::string msg = "invalid cluster spec:";
    for (const auto& v : violations) msg += " [" + v.code + "] " + v.message + ";";
    throw Error(ErrorKind::Validation, msg);
  }
  return spec;
}

inline std::string spec_digest(const ClusterSpec& spec) { return hex_digest(spec_to_json(spec).dump()); }

}  // namespace softtile
