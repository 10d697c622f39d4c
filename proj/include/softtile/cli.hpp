#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "softtile/config.hpp"
#include "softtile/layout_io.hpp"
#include "softtile/ordering.hpp"
#include "softtile/render.hpp"
#include "softtile/spec_io.hpp"
#include "softtile/sweep.hpp"
#include "softtile/tiler.hpp"

namespace softtile {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2, kExitInternal = 3 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
    case ErrorKind::OverUtilization:
    case ErrorKind::OddCount: return kExitInfeasible;
    case ErrorKind::Internal: return kExitInternal;
    default: return kExitUsage;
  }
}

namespace cli {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Usage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Usage, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::Usage, "failed writing '" + path + "'");
}

inline bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline ClusterSpec load_spec_arg(const std::string& arg) {
  if (arg == "default") return default_manticore_cluster();
  return load_spec(read_file(arg));
}

inline Config load_config_arg(const std::string& path) { return path.empty() ? Config{} : load_config(read_file(path)); }

inline std::vector<FloorplanStyle> parse_styles(const std::string& arg) {
  if (arg == "all") return {std::begin(kAllStyles), std::end(kAllStyles)};
  std::vector<FloorplanStyle> out;
  std::stringstream ss(arg);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(style_from_string(item));
  if (out.empty()) throw Error(ErrorKind::Usage, "no styles given");
  return out;
}

inline std::vector<double> parse_grid(const std::string& arg) {
  if (arg == "published") return published_q_grid();
  if (arg == "default" || arg == "full") return default_q_grid();
  std::vector<double> out;
  std::stringstream ss(arg);
  for (std::string item; std::getline(ss, item, ',');) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size())
      throw Error(ErrorKind::Usage, "bad Q value '" + item + "' in --grid");
    out.push_back(v);
  }
  return out;
}

/// FLOORPLAN_THREADS caps the worker count; unset means all hardware threads.
inline unsigned thread_budget() {
  const char* env = std::getenv("FLOORPLAN_THREADS");
  if (!env) return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*env == '\0' || *end != '\0' || v < 1)
    throw Error(ErrorKind::Usage, "FLOORPLAN_THREADS must be a positive integer, got '" + std::string(env) + "'");
  return static_cast<unsigned>(std::min<long>(v, 1024));
}

inline CharacterizationDB load_db(const std::string& path) {
  const std::string text = read_file(path);
  return ends_with(path, ".json") ? import_json(text) : import_csv(text);
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace cli

/// Entry point of the floorplan tool. Returns the process exit code; every
/// failure prints exactly one `error[<kind>]: <message>` line to `err`.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Soft-tile floorplan generator and QoR estimator"};
  app.require_subcommand(1);

  std::string spec_arg = "default", config_path;

  // generate
  auto* gen = app.add_subcommand("generate", "Place one floorplan style at one aspect ratio");
  std::string gen_style, gen_out, gen_svg;
  double gen_q = 1.0;
  gen->add_option("--style", gen_style, "1-sided, 2-sided or u-shape")->required();
  gen->add_option("--q", gen_q, "Aspect ratio width/height")->required();
  gen->add_option("--spec", spec_arg, "Cluster spec JSON file or 'default'");
  gen->add_option("--config", config_path, "Config JSON file");
  gen->add_option("--out", gen_out, "Layout JSON output");
  gen->add_option("--svg", gen_svg, "Layout SVG output");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Characterize styles over a grid of aspect ratios");
  std::string sw_styles = "all", sw_grid = "published", sw_out;
  sw->add_option("--styles", sw_styles, "'all' or a comma list of styles");
  sw->add_option("--grid", sw_grid, "'published', 'default' or a comma list of Q values");
  sw->add_option("--spec", spec_arg, "Cluster spec JSON file or 'default'");
  sw->add_option("--config", config_path, "Config JSON file");
  sw->add_option("--out", sw_out, "Database output (.csv or .json)")->required();

  // tile
  auto* tile = app.add_subcommand("tile", "Rank top-level floorplans built from characterized tiles");
  std::string tile_db, tile_templates = "builtin", tile_out, tile_svg, tile_arrangement = "2x2";
  double tile_min_freq = 0.0, tile_q_tol = 0.05, tile_quad_channel = 20.0, tile_cache = 0.15;
  tile->add_option("--db", tile_db, "Characterization database (.csv or .json)")->required();
  tile->add_option("--templates", tile_templates, "Template JSON file or 'builtin'");
  tile->add_option("--quadrant", tile_arrangement, "Quadrant arrangement: 2x2, 1x4 or 4x1");
  tile->add_option("--quadrant-channel", tile_quad_channel, "Channel between clusters of a quadrant, um");
  tile->add_option("--cache-frac", tile_cache, "Quadrant cache strip as a fraction of its clusters");
  tile->add_option("--min-freq", tile_min_freq, "Minimum tile frequency in MHz");
  tile->add_option("--q-tol", tile_q_tol, "Tolerance when matching demanded aspect ratios");
  tile->add_option("--out", tile_out, "Ranked plans JSON output")->required();
  tile->add_option("--svg", tile_svg, "SVG of the best plan");

  // compare
  auto* cmp = app.add_subcommand("compare", "Check a database against the published orderings");
  std::string cmp_db, cmp_out, cmp_table;
  cmp->add_option("--db", cmp_db, "Characterization database, or 'published' for the published table")->required();
  cmp->add_option("--out", cmp_out, "Report output (stdout when absent)");
  cmp->add_option("--table-out", cmp_table, "Write the published table as CSV");

  // render
  auto* ren = app.add_subcommand("render", "Render a layout, density map, congestion map or top-level plan");
  std::string ren_layout, ren_target = "layout", ren_out, ren_color = "linear", ren_db, ren_template;
  double ren_scale = 2.0;
  ren->add_option("--layout", ren_layout, "Layout JSON from generate");
  ren->add_option("--target", ren_target, "layout, density, congestion or toplevel");
  ren->add_option("--spec", spec_arg, "Cluster spec JSON file or 'default'");
  ren->add_option("--config", config_path, "Config JSON file");
  ren->add_option("--db", ren_db, "Database for the toplevel target");
  ren->add_option("--template", ren_template, "Built-in template name for the toplevel target");
  ren->add_option("--color", ren_color, "linear or log");
  ren->add_option("--scale", ren_scale, "Micrometres per pixel");
  ren->add_option("--out", ren_out, "SVG output")->required();

  auto fail = [&](std::string_view kind, std::string msg, int code) {
    for (char& c : msg)
      if (c == '\n' || c == '\r') c = ' ';
    err << "error[" << kind << "]: " << msg << "\n";
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitUsage);
  }

  try {
    if (*gen) {
      const FloorplanStyle style = style_from_string(gen_style);
      const ClusterSpec spec = cli::load_spec_arg(spec_arg);
      const Config config = cli::load_config_arg(config_path);
      const Evaluation e = evaluate(spec, style, gen_q, config);
      if (!e.placed) return fail("infeasible", e.failure, kExitInfeasible);
      if (!gen_out.empty()) cli::write_file(gen_out, save_layout(e.layout));
      if (!gen_svg.empty()) cli::write_file(gen_svg, render_svg(e.layout, {RenderTarget::Layout}));
      const double sym = vertical_symmetry_error(e.layout);
      double tol = 0.0;
      if (config.symmetry_tolerance_um) {
        tol = *config.symmetry_tolerance_um;
      } else if (!spec.macros.empty()) {
        tol = spec.macros.front().height + 2.0 * config.layout.halo_um;
      }
      out << to_string(style) << " Q=" << cli::fmt("%g", gen_q) << " wl_m=" << cli::fmt("%.4g", e.estimate.wirelength_m)
          << " freq_mhz=" << cli::fmt("%.4g", e.estimate.freq_mhz) << " overflow_bins=" << e.estimate.overflow_bins
          << " feasible=" << (e.estimate.feasible ? "true" : "false") << " symmetry_um=" << cli::fmt("%.3g", sym)
          << (sym <= tol + 1e-9 ? " symmetric" : " asymmetric") << "\n";
      return kExitOk;
    }

    if (*sw) {
      const ClusterSpec spec = cli::load_spec_arg(spec_arg);
      const Config config = cli::load_config_arg(config_path);
      const auto db = sweep(spec, cli::parse_styles(sw_styles), cli::parse_grid(sw_grid), config, cli::thread_budget());
      cli::write_file(sw_out, cli::ends_with(sw_out, ".json") ? export_json(db) : export_csv(db));
      int feasible = 0;
      for (const auto& r : db.records) feasible += r.estimate.feasible ? 1 : 0;
      out << db.records.size() << " records, " << feasible << " feasible\n";
      return kExitOk;
    }

    if (*tile) {
      const auto db = cli::load_db(tile_db);
      const auto templates =
          tile_templates == "builtin" ? builtin_templates() : load_templates(cli::read_file(tile_templates));
      QuadrantTemplate quadrant;
      quadrant.arrangement = arrangement_from_string(tile_arrangement);
      quadrant.channel_um = tile_quad_channel;
      quadrant.cache_frac = tile_cache;
      const auto ranked = rank_plans(templates, quadrant, db, {tile_min_freq, tile_q_tol});
      cli::write_file(tile_out, plans_to_json(ranked).dump(2) + "\n");
      if (!tile_svg.empty()) {
        if (ranked.accepted.empty()) return fail("infeasible", "no plan accepted, nothing to render", kExitInfeasible);
        cli::write_file(tile_svg, render_svg(ranked.accepted.front(), {RenderTarget::TopLevel, ColorScale::Linear, 10.0}));
      }
      for (const auto& p : ranked.accepted)
        out << p.template_name << ": " << to_string(p.style) << " Q=" << cli::fmt("%g", p.q)
            << " utilization=" << cli::fmt("%.4f", p.utilization) << "\n";
      for (const auto& [name, reason] : ranked.rejected) out << name << ": rejected (" << reason << ")\n";
      return kExitOk;
    }

    if (*cmp) {
      const auto db = cmp_db == "published" ? published_characterization() : cli::load_db(cmp_db);
      std::string text = ordering_report(db).to_text();
      const auto& u1 = published_qor(FloorplanStyle::UShape, 1.0);
      text += "published gap 1-sided@0.4 vs u-shape@1: " +
              cli::fmt("%.2f%%", relative_gap(published_qor(FloorplanStyle::OneSided, 0.4), u1, PublishedMetric::Frequency)) +
              "\n";
      text += "published gap 1-sided@1 vs u-shape@1: " +
              cli::fmt("%.2f%%", relative_gap(published_qor(FloorplanStyle::OneSided, 1.0), u1, PublishedMetric::Frequency)) +
              "\n";
      text += "published gap u-shape@2.5 vs u-shape@1: " +
              cli::fmt("%.2f%%", relative_gap(published_qor(FloorplanStyle::UShape, 2.5), u1, PublishedMetric::Frequency)) +
              "\n";
      if (!cmp_table.empty()) cli::write_file(cmp_table, published_table_csv());
      if (cmp_out.empty())
        out << text;
      else
        cli::write_file(cmp_out, text);
      return kExitOk;
    }

    if (*ren) {
      RenderSpec rs;
      rs.target = render_target_from_string(ren_target);
      if (ren_color == "log")
        rs.scale = ColorScale::Log;
      else if (ren_color != "linear")
        throw Error(ErrorKind::Usage, "--color must be linear or log");
      rs.um_per_px = ren_scale;
      std::string svg;
      if (rs.target == RenderTarget::TopLevel) {
        if (ren_db.empty() || ren_template.empty())
          throw Error(ErrorKind::Usage, "the toplevel target needs --db and --template");
        const auto db = cli::load_db(ren_db);
        const TopLevelTemplate* chosen = nullptr;
        const auto templates = builtin_templates();
        for (const auto& t : templates)
          if (t.name == ren_template) chosen = &t;
        if (!chosen) throw Error(ErrorKind::Usage, "unknown template '" + ren_template + "'");
        const TopLevelPlan plan = evaluate_plan(*chosen, QuadrantTemplate{}, db);
        if (!plan.accepted) return fail("infeasible", plan.reason, kExitInfeasible);
        svg = render_svg(plan, rs);
      } else {
        if (ren_layout.empty()) throw Error(ErrorKind::Usage, "--layout is required for this target");
        const FloorplanLayout layout = load_layout(cli::read_file(ren_layout));
        if (rs.target == RenderTarget::Layout) {
          svg = render_svg(layout, rs);
        } else if (rs.target == RenderTarget::Density) {
          const Config config = cli::load_config_arg(config_path);
          svg = render_svg(DensityView{density_map(layout.regions, layout, config.density_bin_um), layout}, rs);
        } else {
          const ClusterSpec spec = cli::load_spec_arg(spec_arg);
          const Config config = cli::load_config_arg(config_path);
          CentroidSolution base;
          for (const auto& m : spec.modules) {
            base.module_ids.push_back(m.id);
            base.centroids.push_back(layout.die.rect().center());
          }
          const auto positions = region_centroids(base, layout.regions);
          svg = render_svg(CongestionView{congestion(spec, layout, positions, config.congestion), layout}, rs);
        }
      }
      cli::write_file(ren_out, svg);
      return kExitOk;
    }
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
  return fail("usage", "no subcommand given", kExitUsage);
}

}  // namespace softtile
