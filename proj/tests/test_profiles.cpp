// test_profiles.cpp - Grid, interpolation, simplex weights and convex combinations
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#include <gtest/gtest.h>

#include "emiprior/profiles.hpp"
#include "oracles.hpp"

using namespace emiprior;

namespace {

EmissivityProfile constant(const WavenumberGrid& g, double v, std::string label) {
  return EmissivityProfile(g, std::vector<double>(g.size(), v), std::move(label));
}

} // namespace

TEST(Grid, ReferenceGridHas321Points) {
  auto g = WavenumberGrid::uniform(50, 5, 321);
  EXPECT_EQ(g.size(), 321u);
  EXPECT_EQ(g.front(), 50.0);
  EXPECT_EQ(g.back(), 1650.0);
  EXPECT_EQ(g[100], 550.0);
}

TEST(Grid, RejectsNonMonotone) {
  EXPECT_THROW(WavenumberGrid({50, 55, 55}), InvariantError);
  EXPECT_THROW(WavenumberGrid({50, 45}), InvariantError);
  EXPECT_THROW(WavenumberGrid(std::vector<double>{}), InvariantError);
}

TEST(Interpolate, ConstantProfile) {
  auto g = WavenumberGrid::uniform(50, 5, 321);
  EXPECT_EQ(constant(g, 0.9, "c").at(884.96), 0.9);
}

TEST(Interpolate, LinearBetweenNodes) {
  WavenumberGrid g({880, 885});
  EmissivityProfile p(g, {0.8, 0.9});
  EXPECT_NEAR(p.at(884), 0.88, 1e-15);
}

TEST(Interpolate, ExactAtNodes) {
  Rng rng(3);
  auto set = oracle::synthetic_set(3);
  const auto& p = (*set)[4];
  for (std::size_t k = 0; k < p.grid().size(); ++k) EXPECT_EQ(p.at(p.grid()[k]), p.values()[k]);
}

TEST(Interpolate, OutsideSpanThrows) {
  auto g = WavenumberGrid::uniform(50, 5, 321);
  auto p = constant(g, 0.9, "c");
  EXPECT_THROW(p.at(49.9), RangeError);
  EXPECT_THROW(p.at(1650.1), RangeError);
  EXPECT_NO_THROW(p.at(1650.0));
}

TEST(Profile, RejectsOutOfRangeValues) {
  WavenumberGrid g({100, 200});
  EXPECT_THROW(EmissivityProfile(g, {0.5, 1.01}), InvariantError);
  EXPECT_THROW(EmissivityProfile(g, {0.5}), AlignmentError);
}

TEST(ProfileSetTest, RequiresSharedGridAndUniqueLabels) {
  WavenumberGrid a({100, 200}), b({100, 300});
  EXPECT_THROW(ProfileSet({constant(a, 0.9, "x"), constant(b, 0.9, "y")}), AlignmentError);
  EXPECT_THROW(ProfileSet({constant(a, 0.9, "x"), constant(a, 0.8, "x")}), InvariantError);
}

TEST(Simplex, Validation) {
  EXPECT_NO_THROW(SimplexWeights({0.25, 0.75}));
  EXPECT_THROW(SimplexWeights({-0.1, 1.1}), InvariantError);
  EXPECT_THROW(SimplexWeights({0.5, 0.6}), InvariantError);
  auto w = SimplexWeights::normalized({1, 3});
  EXPECT_EQ(w[0], 0.25);
  EXPECT_EQ(w.support(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(SimplexWeights::unit(4, 2).support(), (std::vector<std::size_t>{2}));
}

TEST(Convex, UnitWeightsReproduceProfile) {
  auto set = oracle::synthetic_set(5);
  for (std::size_t i = 0; i < set->size(); ++i) {
    auto e = convex_combination(*set, SimplexWeights::unit(set->size(), i));
    for (std::size_t k = 0; k < e.size(); ++k) ASSERT_EQ(e.values()[k], (*set)[i].values()[k]);
  }
}

TEST(Convex, TwoConstantsAverage) {
  auto g = WavenumberGrid::uniform(50, 5, 321);
  ProfileSet set({constant(g, 0.8, "a"), constant(g, 1.0, "b")});
  auto e = convex_combination(set, SimplexWeights({0.5, 0.5}));
  for (double v : e.values()) EXPECT_NEAR(v, 0.9, 1e-15);
}

TEST(Convex, MatchesDirectSum) {
  auto set = oracle::synthetic_set(6);
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(set->size());
    for (auto& v : w) v = rng.uniform();
    auto sw = SimplexWeights::normalized(w);
    auto e = convex_combination(*set, sw);
    for (std::size_t k = 0; k < e.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < set->size(); ++i) s += sw[i] * (*set)[i].values()[k];
      ASSERT_NEAR(e.values()[k], s, 1e-15);
    }
  }
}

TEST(Convex, StaysInPointwiseEnvelope) {
  auto set = oracle::synthetic_set(7);
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(set->size());
    for (auto& v : w) v = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
    w[rng.index(w.size())] += 0.1;
    auto sw = SimplexWeights::normalized(w);
    auto e = convex_combination(*set, sw);
    for (std::size_t k = 0; k < e.size(); ++k) {
      double lo = 1.0, hi = 0.0;
      for (auto i : sw.support()) {
        lo = std::min(lo, (*set)[i].values()[k]);
        hi = std::max(hi, (*set)[i].values()[k]);
      }
      ASSERT_GE(e.values()[k], lo);
      ASSERT_LE(e.values()[k], hi);
    }
  }
}

TEST(Convex, LengthMismatch) {
  auto set = oracle::synthetic_set(8);
  EXPECT_THROW(convex_combination(*set, SimplexWeights::unit(3, 0)), AlignmentError);
}

TEST(ProfileIo, RoundTripIsExact) {
  auto set = oracle::synthetic_set(9);
  auto dir = oracle::scratch_dir("profiles_io");
  save_profile_set(*set, (dir / "p.csv").string());
  auto back = load_profile_set((dir / "p.csv").string());
  ASSERT_EQ(back.labels(), set->labels());
  for (std::size_t i = 0; i < set->size(); ++i)
    for (std::size_t k = 0; k < set->grid().size(); ++k) ASSERT_EQ(back[i].values()[k], (*set)[i].values()[k]);
}

TEST(ProfileIo, ErrorsCarryRowNumbers) {
  auto dir = oracle::scratch_dir("profiles_bad");
  {
    std::ofstream(dir / "a.csv") << "wavenumber,X\n50,0.9\n55,1.2\n";
    std::ofstream(dir / "b.csv") << "wavenumber,X\n55,0.9\n50,0.9\n";
    std::ofstream(dir / "c.csv") << "wavenumber,X\n50,0.9\n55,abc\n";
  }
  for (const char* f : {"a.csv", "b.csv", "c.csv"}) {
    try {
      load_profile_set((dir / f).string());
      FAIL() << f;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
  }
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    ASSERT_EQ(csv::parse_double(csv::format(x)), x);
  }
}
