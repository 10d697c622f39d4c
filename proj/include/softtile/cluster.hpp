#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "softtile/error.hpp"
#include "softtile/geometry.hpp"

namespace softtile {

enum class ModuleKind { ComputeCore, Fpu, SpmCrossbar, WideCrossbar, Dma, AxiXbar, IcacheCtrl, Misc };

inline constexpr std::pair<ModuleKind, std::string_view> kModuleKindNames[] = {
    {ModuleKind::ComputeCore, "compute-core"}, {ModuleKind::Fpu, "fpu"},
    {ModuleKind::SpmCrossbar, "spm-crossbar"}, {ModuleKind::WideCrossbar, "wide-crossbar"},
    {ModuleKind::Dma, "dma"},                  {ModuleKind::AxiXbar, "axi-xbar"},
    {ModuleKind::IcacheCtrl, "icache-ctrl"},   {ModuleKind::Misc, "misc"},
};

inline std::string_view to_string(ModuleKind k) {
  for (const auto& [kind, name] : kModuleKindNames)
    if (kind == k) return name;
  return "misc";
}

inline ModuleKind module_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kModuleKindNames)
    if (name == s) return kind;
  throw Error(ErrorKind::Parse, "unknown module kind '" + std::string(s) + "'");
}

enum class MacroGroup { Superbank0, Superbank1, Superbank2, Superbank3, Icache };

inline bool is_spm(MacroGroup g) { return g != MacroGroup::Icache; }

inline int superbank_index(MacroGroup g) { return is_spm(g) ? static_cast<int>(g) : -1; }

inline std::string to_string(MacroGroup g) {
  return is_spm(g) ? "spm-superbank-" + std::to_string(superbank_index(g)) : "icache";
}

inline MacroGroup macro_group_from_string(std::string_view s) {
  if (s == "icache") return MacroGroup::Icache;
  for (int i = 0; i < 4; ++i)
    if (s == "spm-superbank-" + std::to_string(i)) return static_cast<MacroGroup>(i);
  throw Error(ErrorKind::Parse, "unknown macro group '" + std::string(s) + "'");
}

enum class Edge { Left, Right, Bottom, Top };

inline std::string_view to_string(Edge e) {
  switch (e) {
    case Edge::Left: return "left";
    case Edge::Right: return "right";
    case Edge::Bottom: return "bottom";
    case Edge::Top: return "top";
  }
  return "left";
}

inline Edge edge_from_string(std::string_view s) {
  for (Edge e : {Edge::Left, Edge::Right, Edge::Bottom, Edge::Top})
    if (to_string(e) == s) return e;
  throw Error(ErrorKind::Parse, "unknown edge '" + std::string(s) + "'");
}

enum class LatencyClass { SingleCycle, Pipelineable };

inline std::string_view to_string(LatencyClass c) {
  return c == LatencyClass::SingleCycle ? "single-cycle" : "pipelineable";
}

inline LatencyClass latency_class_from_string(std::string_view s) {
  if (s == "single-cycle") return LatencyClass::SingleCycle;
  if (s == "pipelineable") return LatencyClass::Pipelineable;
  throw Error(ErrorKind::Parse, "unknown latency class '" + std::string(s) + "'");
}

struct SoftModuleSpec {
  std::string id;
  ModuleKind kind = ModuleKind::Misc;
  double area = 0.0;  ///< placeable standard-cell area, µm²
  std::vector<std::string> anchors;

  friend bool operator==(const SoftModuleSpec&, const SoftModuleSpec&) = default;
};

struct MacroSpec {
  std::string id;
  double width = 0.0;
  double height = 0.0;
  MacroGroup group = MacroGroup::Icache;
  Edge port_side = Edge::Left;

  double area() const { return width * height; }

  friend bool operator==(const MacroSpec&, const MacroSpec&) = default;
};

struct NetSpec {
  std::string id;
  std::vector<std::string> endpoints;
  int bit_width = 1;
  LatencyClass latency = LatencyClass::SingleCycle;

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

struct ClusterSpec {
  std::vector<SoftModuleSpec> modules;
  std::vector<MacroSpec> macros;
  std::vector<NetSpec> nets;
  std::vector<std::string> io_pins;
  double core_area_mm2 = 0.0;
  double target_freq_mhz = 0.0;
  double target_utilization = 0.0;

  double core_area_um2() const { return core_area_mm2 * 1e6; }

  double total_module_area() const {
    double a = 0.0;
    for (const auto& m : modules) a += m.area;
    return a;
  }

  double total_macro_area() const {
    double a = 0.0;
    for (const auto& m : macros) a += m.area();
    return a;
  }

  const SoftModuleSpec* find_module(std::string_view id) const {
    for (const auto& m : modules)
      if (m.id == id) return &m;
    return nullptr;
  }

  const MacroSpec* find_macro(std::string_view id) const {
    for (const auto& m : macros)
      if (m.id == id) return &m;
    return nullptr;
  }

  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

/// Knobs behind the built-in cluster. Every open modelling choice lives here.
struct ClusterParams {
  double core_area_mm2 = 0.9;
  double target_freq_mhz = 1000.0;
  double target_utilization = 0.575;
  double placeable_mge = 4.5;
  /// Fraction of the core area taken by the 32 SPM macros.
  double spm_area_fraction = 0.20;
  /// Macro height over width.
  double macro_aspect_hw = 2.0;
  /// Halo assumed when sizing the gate-equivalent area; match LayoutParams::halo.
  double sizing_halo_um = 2.0;
  /// Fraction of the free area the cells fill at target utilization.
  double fill_fraction = 0.995;
  int io_pin_count = 64;
  /// TCDM master ports per worker core, DMA core, DMA engine and narrow AXI xbar.
  int ports_per_worker = 2;
  int ports_dma_core = 1;
  int ports_dma_engine = 4;
  int ports_axi_narrow = 5;
};

namespace detail {

// Share of the placeable gate count per module instance.
inline constexpr double kWorkerCoreMge = 0.18;
inline constexpr double kFpuMge = 0.22;
inline constexpr double kSpmCrossbarMge = 0.55;
inline constexpr double kWideCrossbarMge = 0.15;
inline constexpr double kDmaMge = 0.12;
inline constexpr double kAxiXbarMge = 0.08;
inline constexpr double kIcacheCtrlMge = 0.14;

inline std::string indexed(std::string_view stem, int i) { return std::string(stem) + std::to_string(i); }

}  // namespace detail

inline constexpr int kWorkerCores = 8;
inline constexpr int kSpmBanks = 32;
inline constexpr int kBanksPerSuperbank = 8;
inline constexpr int kIcacheMacros = 4;

/// Single SPM macro footprint (w, h) from the area fraction and shape.
inline std::pair<double, double> default_macro_size(const ClusterParams& p) {
  const double area = p.spm_area_fraction * p.core_area_mm2 * 1e6 / kSpmBanks;
  const double w = std::sqrt(area / p.macro_aspect_hw);
  return {w, w * p.macro_aspect_hw};
}

/// µm² per gate equivalent such that the placeable gate count fills the free
/// area (die minus halo'd macro slots) at target utilization.
inline double gate_equivalent_area_um2(const ClusterParams& p) {
  const auto [w, h] = default_macro_size(p);
  const double slot = (w + 2.0 * p.sizing_halo_um) * (h + 2.0 * p.sizing_halo_um);
  const double free_area = p.core_area_mm2 * 1e6 - (kSpmBanks + kIcacheMacros) * slot;
  return p.target_utilization * p.fill_fraction * free_area / (p.placeable_mge * 1e6);
}

/// The Manticore Snitch cluster tile: 9 cores, 8 FPUs, the SPM and wide
/// crossbars, the DMA engine, two AXI crossbars, the I$ controller, 32 SPM
/// banks in 4 superbanks and 4 I$ macros.
inline ClusterSpec default_manticore_cluster(const ClusterParams& p = {}) {
  using detail::indexed;
  ClusterSpec spec;
  spec.core_area_mm2 = p.core_area_mm2;
  spec.target_freq_mhz = p.target_freq_mhz;
  spec.target_utilization = p.target_utilization;

  const double ge = gate_equivalent_area_um2(p);
  auto add_module = [&](std::string id, ModuleKind kind, double mge, std::vector<std::string> anchors) {
    spec.modules.push_back({std::move(id), kind, mge * 1e6 * ge, std::move(anchors)});
  };
  for (int c = 0; c < kWorkerCores; ++c)
    add_module(indexed("cc", c), ModuleKind::ComputeCore, detail::kWorkerCoreMge, {"icache", "spm_xbar"});
  add_module(indexed("cc", kWorkerCores), ModuleKind::ComputeCore, detail::kWorkerCoreMge,
             {"icache", "dma"});
  for (int f = 0; f < kWorkerCores; ++f)
    add_module(indexed("fpu", f), ModuleKind::Fpu, detail::kFpuMge, {indexed("cc", f)});
  add_module("spm_xbar", ModuleKind::SpmCrossbar, detail::kSpmCrossbarMge, {"spm-superbank-0", "spm-superbank-1",
                                                                             "spm-superbank-2", "spm-superbank-3"});
  add_module("wide_xbar", ModuleKind::WideCrossbar, detail::kWideCrossbarMge,
             {"spm-superbank-0", "spm-superbank-1", "spm-superbank-2", "spm-superbank-3"});
  add_module("dma", ModuleKind::Dma, detail::kDmaMge, {"wide_xbar", "axi_xbar_wide"});
  add_module("axi_xbar_wide", ModuleKind::AxiXbar, detail::kAxiXbarMge, {"io"});
  add_module("axi_xbar_narrow", ModuleKind::AxiXbar, detail::kAxiXbarMge, {"io"});
  add_module("icache_ctrl", ModuleKind::IcacheCtrl, detail::kIcacheCtrlMge, {"icache"});

  const auto [mw, mh] = default_macro_size(p);
  for (int b = 0; b < kSpmBanks; ++b)
    spec.macros.push_back(
        {indexed("spm_b", b), mw, mh, static_cast<MacroGroup>(b / kBanksPerSuperbank), Edge::Left});
  for (int k = 0; k < kIcacheMacros; ++k)
    spec.macros.push_back({indexed("icache", k), mw, mh, MacroGroup::Icache, Edge::Left});

  for (int i = 0; i < p.io_pin_count; ++i) spec.io_pins.push_back(indexed("io", i));

  // TCDM crossbar: one 64-bit single-cycle link per master port and bank.
  std::vector<std::string> masters;
  for (int c = 0; c < kWorkerCores; ++c)
    for (int k = 0; k < p.ports_per_worker; ++k) masters.push_back(indexed("cc", c));
  for (int k = 0; k < p.ports_dma_core; ++k) masters.push_back(indexed("cc", kWorkerCores));
  for (int k = 0; k < p.ports_dma_engine; ++k) masters.push_back("dma");
  for (int k = 0; k < p.ports_axi_narrow; ++k) masters.push_back("axi_xbar_narrow");
  for (std::size_t m = 0; m < masters.size(); ++m)
    for (int b = 0; b < kSpmBanks; ++b)
      spec.nets.push_back({"xbar_m" + std::to_string(m) + "_b" + std::to_string(b),
                           {masters[m], "spm_xbar", indexed("spm_b", b)},
                           64,
                           LatencyClass::SingleCycle});

  for (int sb = 0; sb < kSpmBanks / kBanksPerSuperbank; ++sb) {
    NetSpec net{indexed("wide_sb", sb), {"dma", "wide_xbar"}, 512, LatencyClass::SingleCycle};
    for (int b = 0; b < kBanksPerSuperbank; ++b) net.endpoints.push_back(indexed("spm_b", sb * kBanksPerSuperbank + b));
    spec.nets.push_back(std::move(net));
  }

  for (int c = 0; c < kWorkerCores; ++c)
    spec.nets.push_back({indexed("ccfpu", c), {indexed("cc", c), indexed("fpu", c)}, 192, LatencyClass::SingleCycle});
  for (int c = 0; c <= kWorkerCores; ++c) {
    spec.nets.push_back({indexed("ifetch", c), {indexed("cc", c), "icache_ctrl"}, 64, LatencyClass::SingleCycle});
    spec.nets.push_back(
        {indexed("axi_narrow_cc", c), {indexed("cc", c), "axi_xbar_narrow"}, 64, LatencyClass::Pipelineable});
  }
  for (int k = 0; k < kIcacheMacros; ++k)
    spec.nets.push_back({indexed("icache_mem", k), {"icache_ctrl", indexed("icache", k)}, 128, LatencyClass::SingleCycle});

  spec.nets.push_back({"axi_wide_dma", {"dma", "axi_xbar_wide"}, 512, LatencyClass::Pipelineable});
  spec.nets.push_back({"axi_wide_icache", {"icache_ctrl", "axi_xbar_wide"}, 512, LatencyClass::Pipelineable});
  spec.nets.push_back({"axi_bridge", {"axi_xbar_narrow", "axi_xbar_wide"}, 64, LatencyClass::Pipelineable});

  // The wide port takes the centre half of the I/O edge, the narrow port the rest.
  const int n = p.io_pin_count;
  NetSpec wide_io{"axi_wide_io", {"axi_xbar_wide"}, 512, LatencyClass::Pipelineable};
  NetSpec narrow_io{"axi_narrow_io", {"axi_xbar_narrow"}, 64, LatencyClass::Pipelineable};
  for (int i = 0; i < n; ++i) {
    if (i >= n / 4 && i < n - n / 4)
      wide_io.endpoints.push_back(indexed("io", i));
    else
      narrow_io.endpoints.push_back(indexed("io", i));
  }
  if (wide_io.endpoints.size() > 1) spec.nets.push_back(std::move(wide_io));
  if (narrow_io.endpoints.size() > 1) spec.nets.push_back(std::move(narrow_io));
  return spec;
}

struct Violation {
  std::string code;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Returns every violated invariant; an empty list means the spec is usable.
inline std::vector<Violation> validate(const ClusterSpec& spec) {
  std::vector<Violation> out;
  auto report = [&](std::string code, std::string msg) { out.push_back({std::move(code), std::move(msg)}); };

  if (spec.modules.empty()) report("no-modules", "no modules");
  if (!(spec.core_area_mm2 > 0.0)) report("nonpositive-dimension", "core_area_mm2 must be positive");
  if (!(spec.target_freq_mhz > 0.0)) report("nonpositive-dimension", "target_freq_mhz must be positive");
  if (!(spec.target_utilization > 0.0 && spec.target_utilization <= 1.0))
    report("bad-utilization", "target_utilization must lie in (0, 1]");

  std::unordered_map<std::string, int> ids;
  auto claim = [&](const std::string& id) {
    if (++ids[id] == 2) report("duplicate-id", "duplicate id '" + id + "'");
  };
  for (const auto& m : spec.modules) {
    claim(m.id);
    if (!(m.area > 0.0)) report("nonpositive-dimension", "module '" + m.id + "' has nonpositive area");
  }
  for (const auto& m : spec.macros) {
    claim(m.id);
    if (!(m.width > 0.0) || !(m.height > 0.0))
      report("nonpositive-dimension", "macro '" + m.id + "' has nonpositive size");
  }
  for (const auto& pin : spec.io_pins) claim(pin);

  if (spec.core_area_mm2 > 0.0 && spec.total_macro_area() > spec.core_area_um2())
    report("macros-exceed-die", "macros exceed die");

  std::set<std::string> net_ids;
  for (const auto& net : spec.nets) {
    if (!net_ids.insert(net.id).second) report("duplicate-id", "duplicate net id '" + net.id + "'");
    if (net.endpoints.size() < 2) report("bad-net", "net '" + net.id + "' has fewer than 2 endpoints");
    if (net.bit_width < 1) report("bad-net", "net '" + net.id + "' has bit-width < 1");
    for (const auto& ep : net.endpoints)
      if (!ids.contains(ep))
        report("dangling-endpoint", "net '" + net.id + "' endpoint '" + ep + "' does not resolve");
  }
  return out;
}

/// Die outline of the spec's core area at aspect ratio q = width / height.
inline DieOutline die_outline(const ClusterSpec& spec, double q) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw Error(ErrorKind::InvalidAspect, "aspect ratio must be positive, got " + std::to_string(q));
  const double area = spec.core_area_um2();
  return {std::sqrt(area * q), std::sqrt(area / q), q};
}

}  // namespace softtile
