#pragma once

#include <string>
#include <string_view>

#include "softtile/digest.hpp"
#include "softtile/geometry.hpp"
#include "softtile/json_util.hpp"

namespace softtile {

inline constexpr int kLayoutSchemaVersion = 1;

namespace detail {

inline FloorplanStyle style_at(const std::string& name, const std::string& path) {
  try {
    return style_from_string(name);
  } catch (const Error& e) {
    json_fail(path, e.what());
  }
}

inline Json rect_to_json(const Rect& r) { return Json::array({r.x, r.y, r.w, r.h}); }

inline Rect rect_from_json(const Json& j, const std::string& path) {
  json_array(j, path);
  if (j.size() != 4) json_fail(path, "expected [x, y, w, h]");
  Rect r{json_number(j[0], json_child(path, 0)), json_number(j[1], json_child(path, 1)),
         json_number(j[2], json_child(path, 2)), json_number(j[3], json_child(path, 3))};
  if (r.w < 0.0 || r.h < 0.0) json_fail(path, "negative rect size");
  return r;
}

}  // namespace detail

inline Json layout_to_json(const FloorplanLayout& layout) {
  using detail::rect_to_json;
  Json macros = Json::array();
  for (const auto& m : layout.macros)
    macros.push_back({{"id", m.macro_id}, {"rect", rect_to_json(m.rect)}, {"orientation", to_string(m.orientation)}});
  Json regions = Json::array();
  for (const auto& r : layout.regions) {
    Json rects = Json::array();
    for (const auto& rect : r.rects) rects.push_back(rect_to_json(rect));
    regions.push_back({{"id", r.module_id}, {"rects", rects}, {"area", r.area}, {"utilization", r.utilization}});
  }
  Json pins = Json::array();
  for (const auto& p : layout.io_pins) pins.push_back({{"name", p.name}, {"x", p.position.x}, {"y", p.position.y}});
  return {{"schema_version", kLayoutSchemaVersion},
          {"style", to_string(layout.style)},
          {"die", {{"width", layout.die.width}, {"height", layout.die.height}, {"aspect", layout.die.aspect}}},
          {"halo", layout.halo},
          {"macros", macros},
          {"regions", regions},
          {"io_pins", pins}};
}

inline std::string save_layout(const FloorplanLayout& layout) { return layout_to_json(layout).dump(2) + "\n"; }

inline FloorplanLayout layout_from_json(const Json& j) {
  using namespace detail;
  const std::string root;
  json_object(j, root);
  const int version = json_int(json_field(j, root, "schema_version"), "/schema_version");
  if (version > kLayoutSchemaVersion)
    throw Error(ErrorKind::VersionMismatch, "layout schema_version " + std::to_string(version) +
                                                " is newer than the supported version " +
                                                std::to_string(kLayoutSchemaVersion));
  if (version < 1) json_fail("/schema_version", "must be at least 1");
  json_reject_unknown(j, root, {"schema_version", "style", "die", "halo", "macros", "regions", "io_pins"});

  FloorplanLayout layout;
  const std::string style = json_string(json_field(j, root, "style"), "/style");
  layout.style = style_at(style, "/style");
  const Json& die = json_field(j, root, "die");
  json_reject_unknown(die, "/die", {"width", "height", "aspect"});
  layout.die.width = json_number(json_field(die, "/die", "width"), "/die/width");
  layout.die.height = json_number(json_field(die, "/die", "height"), "/die/height");
  layout.die.aspect = json_number(json_field(die, "/die", "aspect"), "/die/aspect");
  layout.halo = json_number(json_field(j, root, "halo"), "/halo");

  const Json& macros = json_array(json_field(j, root, "macros"), "/macros");
  for (std::size_t i = 0; i < macros.size(); ++i) {
    const std::string p = json_child("/macros", i);
    json_reject_unknown(macros[i], p, {"id", "rect", "orientation"});
    MacroPlacement m;
    m.macro_id = json_string(json_field(macros[i], p, "id"), json_child(p, "id"));
    m.rect = rect_from_json(json_field(macros[i], p, "rect"), json_child(p, "rect"));
    const std::string op = json_child(p, "orientation");
    const std::string o = json_string(json_field(macros[i], p, "orientation"), op);
    m.orientation = json_enum(op, [&] { return orientation_from_string(o); });
    layout.macros.push_back(std::move(m));
  }

  const Json& regions = json_array(json_field(j, root, "regions"), "/regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string p = json_child("/regions", i);
    json_reject_unknown(regions[i], p, {"id", "rects", "area", "utilization"});
    RegionPlacement r;
    r.module_id = json_string(json_field(regions[i], p, "id"), json_child(p, "id"));
    const std::string rp = json_child(p, "rects");
    const Json& rects = json_array(json_field(regions[i], p, "rects"), rp);
    for (std::size_t k = 0; k < rects.size(); ++k) r.rects.push_back(rect_from_json(rects[k], json_child(rp, k)));
    r.area = json_number(json_field(regions[i], p, "area"), json_child(p, "area"));
    r.utilization = json_number(json_field(regions[i], p, "utilization"), json_child(p, "utilization"));
    layout.regions.push_back(std::move(r));
  }

  const Json& pins = json_array(json_field(j, root, "io_pins"), "/io_pins");
  for (std::size_t i = 0; i < pins.size(); ++i) {
    const std::string p = json_child("/io_pins", i);
    json_reject_unknown(pins[i], p, {"name", "x", "y"});
    IoPin pin;
    pin.name = json_string(json_field(pins[i], p, "name"), json_child(p, "name"));
    pin.position.x = json_number(json_field(pins[i], p, "x"), json_child(p, "x"));
    pin.position.y = json_number(json_field(pins[i], p, "y"), json_child(p, "y"));
    layout.io_pins.push_back(std::move(pin));
  }
  return layout;
}

inline FloorplanLayout load_layout(std::string_view text) { return layout_from_json(detail::parse_json(text)); }

/// Content hash of the compact serialized layout.
inline std::string layout_digest(const FloorplanLayout& layout) { return hex_digest(layout_to_json(layout).dump()); }

}  // namespace softtile
