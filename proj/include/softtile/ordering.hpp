#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "softtile/reference.hpp"
#include "softtile/sweep.hpp"

namespace softtile {

struct OrderingCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct OrderingReport {
  std::vector<OrderingCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& c : checks) out += (c.pass ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
    return out;
  }
};

/// The published table loaded as if it were a sweep: wirelength is the
/// routed length, overflow is the DRC count and feasibility follows the
/// published verdicts.
inline CharacterizationDB published_characterization() {
  CharacterizationDB db;
  db.grid = {kPublishedAspects[0], kPublishedAspects[1], kPublishedAspects[2]};
  db.core_area_mm2 = 0.9;
  for (const auto& p : kPublishedTable) {
    CharacterizationRecord r;
    r.style = p.style;
    r.q = p.q;
    r.has_metrics = true;
    r.estimate.style = p.style;
    r.estimate.q = p.q;
    r.estimate.freq_mhz = p.freq_mhz;
    r.estimate.wirelength_m = p.rtwl_m;
    r.estimate.overflow_bins = p.drcs;
    r.estimate.overflow_total = p.drcs;
    r.estimate.mean_density = p.cell_density;
    r.estimate.peak_density = p.cell_density;
    r.estimate.feasible = reference_feasible(p.style, p.q);
    db.records.push_back(r);
  }
  db.sort();
  return db;
}

/// Compares the database against the orderings seen in the published table.
inline OrderingReport ordering_report(const CharacterizationDB& db) {
  std::vector<const CharacterizationRecord*> keyed;
  for (const auto& p : kPublishedTable) {
    const auto* r = db.find(p.style, p.q);
    if (!r) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "database lacks %s at Q=%g", std::string(to_string(p.style)).c_str(), p.q);
      throw Error(ErrorKind::IncompleteDb, buf);
    }
    keyed.push_back(r);
  }
  auto label = [](const CharacterizationRecord& r) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s@%g", std::string(to_string(r.style)).c_str(), r.q);
    return std::string(buf);
  };

  OrderingReport report;
  char buf[256];
  for (FloorplanStyle style : kAllStyles) {
    const auto* tall = db.find(style, 0.4);
    const auto* square = db.find(style, 1.0);
    const auto* wide = db.find(style, 2.5);
    OrderingCheck c;
    c.name = "wirelength-minimum-at-square[" + std::string(to_string(style)) + "]";
    if (!tall->has_metrics || !square->has_metrics || !wide->has_metrics) {
      c.detail = "an instance has no metrics";
    } else {
      const double a = tall->estimate.wirelength_m, b = square->estimate.wirelength_m, d = wide->estimate.wirelength_m;
      c.pass = b < a && b < d;
      std::snprintf(buf, sizeof buf, "Q=1 %.4g, Q=0.4 %.4g, Q=2.5 %.4g", b, a, d);
      c.detail = buf;
    }
    report.checks.push_back(c);
  }

  const CharacterizationRecord* fastest = nullptr;
  const CharacterizationRecord* worst = nullptr;
  for (const auto* r : keyed) {
    if (!r->has_metrics) continue;
    if (!fastest || r->estimate.freq_mhz > fastest->estimate.freq_mhz) fastest = r;
    if (!worst || r->estimate.overflow_total > worst->estimate.overflow_total) worst = r;
  }
  {
    OrderingCheck c{"frequency-argmax-square", false, "no instance has metrics"};
    if (fastest) {
      c.pass = same_aspect(fastest->q, 1.0) &&
               (fastest->style == FloorplanStyle::UShape || fastest->style == FloorplanStyle::TwoSided);
      std::snprintf(buf, sizeof buf, "fastest is %s at %.4g MHz", label(*fastest).c_str(), fastest->estimate.freq_mhz);
      c.detail = buf;
    }
    report.checks.push_back(c);
  }
  {
    OrderingCheck c{"overflow-argmax-wide-2-sided", false, "no instance has metrics"};
    if (worst) {
      c.pass = worst->style == FloorplanStyle::TwoSided && same_aspect(worst->q, 2.5);
      std::snprintf(buf, sizeof buf, "largest overflow total is %s (%.4g over %d bins)", label(*worst).c_str(),
                    worst->estimate.overflow_total, worst->estimate.overflow_bins);
      c.detail = buf;
    }
    report.checks.push_back(c);
  }
  {
    const auto* r = db.find(FloorplanStyle::OneSided, 0.4);
    OrderingCheck c{"tall-1-sided-feasible", r->has_metrics && r->estimate.feasible, ""};
    std::snprintf(buf, sizeof buf, "1-sided@0.4 is %s (%d overflow bins)", c.pass ? "feasible" : "infeasible",
                  r->estimate.overflow_bins);
    c.detail = buf;
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace softtile
