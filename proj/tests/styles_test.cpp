#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace softtile;

TEST(UShape, SmallExponentGivesSingleRows) {
  const auto u = ushape_heights(16, 0.001, 32);
  EXPECT_EQ(u.column_heights, std::vector<int>(16, 1));
  EXPECT_EQ(u.macro_count(), 32);
}

TEST(UShape, MatchesDefinitionAndIsNonIncreasing) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> hh_dist(1, 40);
  std::uniform_real_distribution<double> p_dist(0.05, 8.0);
  for (int t = 0; t < 1000; ++t) {
    const int hh = hh_dist(rng);
    const double p = p_dist(rng);
    const int count = 2 * (hh * hh + 1);
    const auto u = ushape_heights(hh, p, count);
    ASSERT_EQ(u.column_heights, check::ushape_reference(hh, p, count)) << "HH=" << hh << " p=" << p;
    for (std::size_t n = 1; n < u.column_heights.size(); ++n)
      ASSERT_LE(u.column_heights[n], u.column_heights[n - 1]);
    for (int h : u.column_heights) {
      ASSERT_GE(h, 0);
      ASSERT_LE(h, hh);
    }
    ASSERT_GE(static_cast<int>(u.column_heights.size()), hh);
    ASSERT_EQ(u.column_heights[static_cast<std::size_t>(hh - 1)], 1);  // n = HH
    ASSERT_EQ(u.macro_count(), count);
  }
}

TEST(UShape, RejectsOddCountsAndBadInput) {
  auto kind_of = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  EXPECT_EQ(kind_of([] { ushape_heights(8, 1.0, 31); }), ErrorKind::OddCount);
  EXPECT_EQ(kind_of([] { select_exponent_p(8, 31, 10); }), ErrorKind::OddCount);
  EXPECT_EQ(kind_of([] { ushape_heights(0, 1.0, 32); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { ushape_heights(8, 0.0, 32); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { select_exponent_p(2, 32, 3); }), ErrorKind::Infeasible);
}

TEST(UShape, ExponentMatchesExhaustiveScan) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> hh_dist(1, 24), half_dist(1, 40), col_dist(1, 40);
  int compared = 0;
  for (int t = 0; t < 50; ++t) {
    const int hh = hh_dist(rng), count = 2 * half_dist(rng), cols = col_dist(rng);
    const double expect = check::exponent_scan(hh, count, cols);
    if (expect < 0.0) {
      EXPECT_THROW(select_exponent_p(hh, count, cols), Error);
      continue;
    }
    EXPECT_DOUBLE_EQ(select_exponent_p(hh, count, cols), expect) << hh << " " << count << " " << cols;
    ++compared;
  }
  EXPECT_GT(compared, 25);
}

TEST(Styles, EveryGridPointIsSound) {
  const ClusterSpec spec = default_manticore_cluster();
  for (auto style : kAllStyles)
    for (double q : default_q_grid()) {
      const FloorplanLayout l = place(style, spec, die_outline(spec, q));
      const auto problems = check::layout_problems(spec, l);
      EXPECT_TRUE(problems.empty()) << to_string(style) << "@" << q << ": " << check::join(problems);
      EXPECT_TRUE(halo_conflicts(l).empty());
      EXPECT_TRUE(within_die(l).empty());
      EXPECT_EQ(l.io_pins.size(), 64u);
    }
}

TEST(Styles, IcacheAgainstLeftEdgeSplitAtMidline) {
  const ClusterSpec spec = default_manticore_cluster();
  for (auto style : kAllStyles)
    for (double q : {0.4, 1.0, 2.5}) {
      const FloorplanLayout l = place(style, spec, die_outline(spec, q));
      int above = 0, below = 0;
      for (const auto& m : l.macros) {
        if (spec.find_macro(m.macro_id)->group != MacroGroup::Icache) continue;
        EXPECT_NEAR(m.rect.x, l.halo, 1e-9);
        EXPECT_EQ(m.orientation, Orientation::MY);
        (m.rect.center().y > l.die.height / 2.0 ? above : below)++;
      }
      EXPECT_EQ(above, 2);
      EXPECT_EQ(below, 2);
    }
}

TEST(Styles, OneSidedIsACompactRightBlock) {
  const ClusterSpec spec = default_manticore_cluster();
  const double pitch_y = check::spm_pitch_y(spec, 2.0);
  for (double q : default_q_grid()) {
    const auto l = place_one_sided(spec, die_outline(spec, q));
    const int rows = static_cast<int>(std::floor(l.die.height / pitch_y + 1e-9));
    const int want_cols = (32 + rows - 1) / rows;
    std::vector<double> xs;
    for (const auto& m : l.macros)
      if (is_spm(spec.find_macro(m.macro_id)->group)) xs.push_back(m.rect.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-6; }), xs.end());
    EXPECT_EQ(static_cast<int>(xs.size()), want_cols) << q;
    double right = 0.0;
    for (const auto& m : l.macros) right = std::max(right, m.rect.right());
    EXPECT_NEAR(right, l.die.width - l.halo, 1e-9);
  }
}

TEST(Styles, TwoSidedRowsHugTopAndBottom) {
  const ClusterSpec spec = default_manticore_cluster();
  const auto l = place_two_sided(spec, die_outline(spec, 2.5));
  double lo = 1e18, hi = 0.0;
  for (const auto& m : l.macros)
    if (is_spm(spec.find_macro(m.macro_id)->group)) {
      lo = std::min(lo, m.rect.y);
      hi = std::max(hi, m.rect.top());
    }
  EXPECT_NEAR(lo, l.halo, 1e-9);
  EXPECT_NEAR(hi, l.die.height - l.halo, 1e-9);
  // the SPM rows stay inside the right half of the die
  for (const auto& m : l.macros)
    if (is_spm(spec.find_macro(m.macro_id)->group)) { EXPECT_GE(m.rect.x, l.die.width / 2.0 - 1e-9); }
}

TEST(Styles, UShapeFirstColumnClosesTheChannel) {
  const ClusterSpec spec = default_manticore_cluster();
  const double pitch_y = check::spm_pitch_y(spec, 2.0);
  for (double q : {0.4, 1.0, 2.5}) {
    const DieOutline die = die_outline(spec, q);
    const auto l = place_u_shape(spec, die);
    const int hh = static_cast<int>(std::floor(die.height / 2.0 / pitch_y + 1e-9));
    int right_column = 0;
    double right = 0.0;
    for (const auto& m : l.macros) right = std::max(right, m.rect.right());
    for (const auto& m : l.macros)
      if (std::abs(m.rect.right() - right) < 1e-6) ++right_column;
    EXPECT_EQ(right_column, 2 * std::min(hh, 16)) << q;
  }
}

TEST(Styles, InfeasibleOutlineNamesBindingDimension) {
  const ClusterSpec spec = default_manticore_cluster();
  try {
    place(FloorplanStyle::TwoSided, spec, die_outline(spec, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
    EXPECT_NE(std::string(e.what()).find("binding dimension"), std::string::npos);
  }
}

TEST(Styles, OddSpmCountIsRejectedByMirroredStyles) {
  ClusterSpec spec = default_manticore_cluster();
  spec.macros.erase(spec.macros.begin());
  try {
    place(FloorplanStyle::TwoSided, spec, die_outline(spec, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OddCount);
  }
  EXPECT_NO_THROW(place(FloorplanStyle::OneSided, spec, die_outline(spec, 1.0)));
}

TEST(Styles, PlacementIsDeterministic) {
  const ClusterSpec spec = default_manticore_cluster();
  for (auto style : kAllStyles) EXPECT_EQ(place(style, spec, die_outline(spec, 1.3)), place(style, spec, die_outline(spec, 1.3)));
}

TEST(Styles, ContiguityCheckCatchesSwappedBanks) {
  const ClusterSpec spec = default_manticore_cluster();
  auto l = place_one_sided(spec, die_outline(spec, 1.0));
  ASSERT_TRUE(check::superbank_contiguity(spec, l).empty());
  // swap a bank of superbank 0 with one of superbank 3
  std::swap(l.macros[0].rect, l.macros[31].rect);
  EXPECT_FALSE(check::superbank_contiguity(spec, l).empty());
}
