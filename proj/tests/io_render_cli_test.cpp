#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "softtile/cli.hpp"
#include "support.hpp"

using namespace softtile;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("floorplan_io_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "floorplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const Evaluation& square_u() {
  static const Evaluation e = measure(default_manticore_cluster(), FloorplanStyle::UShape, 1.0);
  return e;
}

}  // namespace

TEST(SpecIo, RoundTripIsEquivalent) {
  const ClusterSpec spec = default_manticore_cluster();
  const std::string text = save_spec(spec);
  const ClusterSpec back = load_spec(text);
  EXPECT_EQ(save_spec(back), text);
  EXPECT_EQ(spec_digest(back), spec_digest(spec));
  EXPECT_EQ(back.macros.size(), 36u);
}

TEST(SpecIo, MissingMacrosNamesThePath) {
  Json j = spec_to_json(default_manticore_cluster());
  j.erase("macros");
  const std::string msg = message_of([&] { load_spec(j.dump()); });
  EXPECT_EQ(kind_of([&] { load_spec(j.dump()); }), ErrorKind::Parse);
  EXPECT_NE(msg.find("\"/macros\""), std::string::npos) << msg;
}

TEST(SpecIo, ZeroBitWidthIsAValidationError) {
  Json j = spec_to_json(default_manticore_cluster());
  j["nets"][0]["bit_width"] = 0;
  EXPECT_EQ(kind_of([&] { load_spec(j.dump()); }), ErrorKind::Validation);
}

TEST(SpecIo, MalformedInput) {
  const std::string text = save_spec(default_manticore_cluster());
  EXPECT_EQ(kind_of([&] { load_spec(text.substr(0, text.size() / 2)); }), ErrorKind::Parse);
  Json j = spec_to_json(default_manticore_cluster());
  j["surprise"] = 1;
  EXPECT_EQ(kind_of([&] { load_spec(j.dump()); }), ErrorKind::Parse);
  j = spec_to_json(default_manticore_cluster());
  j["macros"][0]["width"] = "wide";
  const std::string msg = message_of([&] { load_spec(j.dump()); });
  EXPECT_NE(msg.find("/macros/0/width"), std::string::npos) << msg;
}

TEST(LayoutIo, RoundTripAndDigest) {
  const FloorplanLayout& l = square_u().layout;
  const std::string text = save_layout(l);
  const FloorplanLayout back = load_layout(text);
  EXPECT_EQ(back, l);
  EXPECT_EQ(layout_digest(back), layout_digest(l));
  EXPECT_EQ(layout_digest(l).size(), 16u);
  FloorplanLayout moved = l;
  moved.macros[0].rect.x += 1e-6;
  EXPECT_NE(layout_digest(moved), layout_digest(l));
}

TEST(LayoutIo, VersionAndStyleErrors) {
  Json j = layout_to_json(square_u().layout);
  j["schema_version"] = kLayoutSchemaVersion + 1;
  EXPECT_EQ(kind_of([&] { load_layout(j.dump()); }), ErrorKind::VersionMismatch);
  j["schema_version"] = kLayoutSchemaVersion;
  j["style"] = "zigzag";
  EXPECT_EQ(kind_of([&] { load_layout(j.dump()); }), ErrorKind::Parse);
}

TEST(Config, RoundTripAndStrictness) {
  Config c;
  c.congestion.bin_um = 12.5;
  c.calibration = CalibrationParams{0.3, 0.2};
  c.symmetry_tolerance_um = 50.0;
  const Config back = load_config(config_to_json(c).dump());
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(config_digest(back), config_digest(c));
  EXPECT_NE(config_digest(back), config_digest(Config{}));
  Json j = config_to_json(c);
  j["congestion"]["bins"] = 3;
  EXPECT_EQ(kind_of([&] { load_config(j.dump()); }), ErrorKind::Parse);
  j = config_to_json(c);
  j["congestion"]["bin_um"] = 0;
  EXPECT_NE(kind_of([&] { load_config(j.dump()); }), ErrorKind::Internal);
}

TEST(Render, LayoutSvgUsesOnlyPlainElements) {
  const std::string svg = render_svg(square_u().layout, {RenderTarget::Layout});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  const std::regex tag("<([a-zA-Z]+)[ >/]");
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it)
    seen.insert((*it)[1]);
  for (const auto& t : seen) EXPECT_TRUE(t == "svg" || t == "rect" || t == "line" || t == "text" || t == "g") << t;
  std::size_t black = 0;
  for (std::size_t at = svg.find("fill=\"black\""); at != std::string::npos; at = svg.find("fill=\"black\"", at + 1)) ++black;
  EXPECT_EQ(black, 36u);
  EXPECT_NE(svg.find(">spm_xbar</text>"), std::string::npos);
}

TEST(Render, ZeroDensityIsDarkBlue) {
  DensityMap m;
  m.nx = 3;
  m.ny = 2;
  m.bin = 10;
  m.utilization.assign(6, 0.0);
  m.placeable.assign(6, 100.0);
  FloorplanLayout l;
  l.die = {30, 20, 1.5};
  const std::string svg = render_svg(DensityView{m, l}, {RenderTarget::Density});
  std::size_t dark = 0;
  for (std::size_t at = svg.find("#00008b"); at != std::string::npos; at = svg.find("#00008b", at + 1)) ++dark;
  EXPECT_EQ(dark, 6u);
  EXPECT_EQ(heat_color(1.0).r, 255);
  EXPECT_EQ(heat_color(1.0).g, 0);
}

TEST(Render, MismatchedTargetIsUsageError) {
  EXPECT_EQ(kind_of([] { render_svg(square_u().layout, {RenderTarget::Density}); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { render_svg(square_u().layout, {RenderTarget::Layout, ColorScale::Linear, 0.0}); }),
            ErrorKind::Usage);
}

TEST(Render, CongestionAndTopLevel) {
  const auto& e = square_u();
  const auto m = congestion(default_manticore_cluster(), e.layout, e.positions);
  const std::string svg = render_svg(CongestionView{m, e.layout}, {RenderTarget::Congestion, ColorScale::Log});
  EXPECT_NE(svg.find("<g id=\"bins\">"), std::string::npos);
  const auto plan = evaluate_plan(builtin_templates()[1], QuadrantTemplate{}, published_characterization());
  const std::string top = render_svg(plan, {RenderTarget::TopLevel, ColorScale::Linear, 10.0});
  EXPECT_NE(top.find("square: u-shape"), std::string::npos);
}

TEST(Cli, GenerateWritesLayoutAndSvg) {
  const auto json = scratch() / "u1.json", svg = scratch() / "u1.svg";
  const CliRun r = run({"generate", "--style", "u-shape", "--q", "1", "--out", json.string(), "--svg", svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(" symmetric\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("freq_mhz=940.7"), std::string::npos) << r.out;
  EXPECT_EQ(load_layout(slurp(json)), square_u().layout);
  EXPECT_EQ(slurp(svg).rfind("<?xml", 0), 0u);

  for (const char* target : {"layout", "density", "congestion"}) {
    const auto out = scratch() / (std::string(target) + ".svg");
    const CliRun rr = run({"render", "--layout", json.string(), "--target", target, "--out", out.string()});
    EXPECT_EQ(rr.code, 0) << rr.err;
    EXPECT_TRUE(fs::exists(out));
  }
}

TEST(Cli, ExitCodes) {
  CliRun r = run({"generate", "--style", "2-sided", "--q", "0.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error[", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = run({"generate", "--style", "3-sided", "--q", "1"});
  EXPECT_EQ(r.code, 1);
  r = run({"generate", "--style", "u-shape", "--q", "-1"});
  EXPECT_EQ(r.code, 1);
  r = run({"generate", "--style", "u-shape"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error[usage]", 0), 0u) << r.err;
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);

  const auto bad_spec = scratch() / "bad_spec.json";
  std::ofstream(bad_spec) << "{\"modules\": [";
  r = run({"sweep", "--spec", bad_spec.string(), "--out", (scratch() / "x.csv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[parse]"), std::string::npos) << r.err;
}

TEST(Cli, SweepTileCompare) {
  const auto db = scratch() / "db.csv", plans = scratch() / "plans.json", top = scratch() / "top.svg";
  CliRun r = run({"sweep", "--grid", "published", "--out", db.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "9 records, 8 feasible\n");
  r = run({"tile", "--db", db.string(), "--out", plans.string(), "--svg", top.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(slurp(plans));
  EXPECT_FALSE(j.at("accepted").empty());
  r = run({"compare", "--db", "published"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("-5.52%"), std::string::npos) << r.out;
  r = run({"compare", "--db", db.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("PASS overflow-argmax-wide-2-sided"), std::string::npos) << r.out;
}

TEST(Cli, ThreadBudgetMustBePositive) {
  ::setenv("FLOORPLAN_THREADS", "0", 1);
  const CliRun r = run({"sweep", "--grid", "1", "--styles", "u-shape", "--out", (scratch() / "t.csv").string()});
  ::unsetenv("FLOORPLAN_THREADS");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FLOORPLAN_THREADS"), std::string::npos);
}

TEST(Cli, BinaryReportsInfeasibleOutline) {
  const std::string cmd = std::string("\"") + FLOORPLAN_BIN + "\" generate --style 2-sided --q 0.1 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
