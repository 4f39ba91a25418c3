// test_landcover.cpp - Footprint fractions, correspondence matrix and a-priori weights
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#include <gtest/gtest.h>

#include "emiprior/landcover.hpp"
#include "oracles.hpp"

using namespace emiprior;

namespace {

const CorrespondenceMatrix& shipped() {
  static const CorrespondenceMatrix m = load_correspondence(std::string(EMIPRIOR_DATA_DIR) + "/correspondence.json");
  return m;
}

// Spherical law of cosines, coded separately from the library haversine.
double distance_km(double lat1, double lon1, double lat2, double lon2) {
  const double r = std::numbers::pi / 180.0;
  const double c = std::sin(lat1 * r) * std::sin(lat2 * r) + std::cos(lat1 * r) * std::cos(lat2 * r) * std::cos((lon2 - lon1) * r);
  return 6371.0 * std::acos(std::clamp(c, -1.0, 1.0));
}

std::array<double, 17> brute_force(const LandCoverGrid& map, double lat, double lon, double radius) {
  std::array<double, 17> counts{};
  double total = 0;
  for (std::size_t r = 0; r < map.rows(); ++r)
    for (std::size_t c = 0; c < map.cols(); ++c)
      if (distance_km(lat, lon, map.lat0() + map.step() * static_cast<double>(r),
                      map.lon0() + map.step() * static_cast<double>(c)) <= radius) {
        counts[static_cast<std::size_t>(map.cls(r, c) - 1)] += 1;
        total += 1;
      }
  for (auto& v : counts) v /= total;
  return counts;
}

LandCoverGrid random_map(Rng& rng, double lat0, double lon0, double step, std::size_t nr, std::size_t nc) {
  std::vector<std::uint8_t> cls(nr * nc);
  for (auto& c : cls) c = static_cast<std::uint8_t>(1 + rng.index(17));
  return LandCoverGrid(lat0, lon0, step, nr, nc, std::move(cls));
}

} // namespace

TEST(Haversine, KnownDistances) {
  EXPECT_NEAR(haversine_km(0, 0, 0, 1), 6371.0 * std::numbers::pi / 180.0, 1e-9);
  EXPECT_NEAR(haversine_km(0, 0, 90, 0), 6371.0 * std::numbers::pi / 2, 1e-9);
  EXPECT_EQ(haversine_km(10, 20, 10, 20), 0.0);
}

TEST(Footprint, UniformMapIsUnit) {
  LandCoverGrid map(40, 10, 0.01, 100, 100, std::vector<std::uint8_t>(10000, 17));
  auto t = fov_fractions(map, {40.5, 10.5});
  for (std::size_t l = 0; l < 17; ++l) EXPECT_EQ(t[l], l == 16 ? 1.0 : 0.0);
}

TEST(Footprint, HalfPlaneSplit) {
  // Columns left of lon 10.5 are class 1, the rest class 7; centre sits on
  // the boundary between two cell columns.
  const std::size_t n = 200;
  std::vector<std::uint8_t> cls(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) cls[r * n + c] = c < 100 ? 1 : 7;
  LandCoverGrid map(0.0, 9.505, 0.01, n, n, std::move(cls));
  auto t = fov_fractions(map, {1.0, 10.5});
  EXPECT_NEAR(t[0], 0.5, 0.02);
  EXPECT_NEAR(t[6], 0.5, 0.02);
  EXPECT_NEAR(t[0] + t[6], 1.0, 1e-15);
}

TEST(Footprint, MatchesExhaustiveScan) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const double lat0 = rng.uniform(-70, 60);
    auto map = random_map(rng, lat0, rng.uniform(-170, 150), 0.02, 60, 60);
    const GridPoint p{lat0 + rng.uniform(0.1, 1.1), map.lon0() + rng.uniform(0.1, 1.1)};
    const double radius = rng.uniform(2, 20);
    auto t = fov_fractions(map, p, radius);
    auto ref = brute_force(map, p.lat, p.lon, radius);
    for (std::size_t l = 0; l < 17; ++l) ASSERT_NEAR(t[l], ref[l], 1e-12) << trial;
  }
}

TEST(Footprint, NearPoleAndDateline) {
  Rng rng(22);
  auto polar = random_map(rng, 89.5, -180, 0.5, 2, 720);
  auto t = fov_fractions(polar, {89.9, 0.0}, 60.0);
  auto ref = brute_force(polar, 89.9, 0.0, 60.0);
  for (std::size_t l = 0; l < 17; ++l) EXPECT_NEAR(t[l], ref[l], 1e-12);

  auto west = random_map(rng, 0.0, -180.0, 0.01, 50, 50);
  auto w = fov_fractions(west, {0.2, 179.99}, 7.5);
  auto wref = brute_force(west, 0.2, 179.99, 7.5);
  for (std::size_t l = 0; l < 17; ++l) EXPECT_NEAR(w[l], wref[l], 1e-12);
}

TEST(Footprint, EmptyThrows) {
  LandCoverGrid map(40, 10, 0.01, 10, 10, std::vector<std::uint8_t>(100, 3));
  EXPECT_THROW(fov_fractions(map, {0.0, 0.0}), EmptyFootprintError);
}

TEST(LandCoverIo, BinaryAndCsvRoundTrip) {
  Rng rng(23);
  auto map = random_map(rng, 12.5, -3.25, 0.05, 17, 31);
  auto dir = oracle::scratch_dir("landcover_io");
  for (const char* name : {"m.bin", "m.csv"}) {
    save_land_cover(map, (dir / name).string());
    auto back = load_land_cover((dir / name).string());
    EXPECT_EQ(back.lat0(), map.lat0());
    EXPECT_EQ(back.step(), map.step());
    EXPECT_EQ(back.rows(), map.rows());
    EXPECT_TRUE(std::equal(back.classes().begin(), back.classes().end(), map.classes().begin()));
  }
  std::ofstream(dir / "bad.bin", std::ios::binary) << "NOTMAGIC";
  EXPECT_THROW(load_land_cover((dir / "bad.bin").string()), ParseError);
}

TEST(Correspondence, ShippedTableIsRowStochastic) {
  EXPECT_EQ(shipped().labels(), synth::reference_labels());
  for (std::size_t l = 0; l < 17; ++l) {
    double s = 0;
    for (std::size_t i = 0; i < 12; ++i) s += shipped()(l, i);
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(Correspondence, RejectsBadRows) {
  std::vector<std::vector<double>> rows(17, std::vector<double>{0.5, 0.5});
  EXPECT_NO_THROW(CorrespondenceMatrix({"a", "b"}, rows));
  rows[3] = {0.5, 0.6};
  EXPECT_THROW(CorrespondenceMatrix({"a", "b"}, rows), InvariantError);
  rows.pop_back();
  EXPECT_THROW(CorrespondenceMatrix({"a", "b"}, rows), InvariantError);
}

TEST(Apriori, EvergreenBroadleafIsForest) {
  auto a = apriori_weights(ClassFractions::unit(15), shipped());
  EXPECT_EQ(oracle::vec(a.values()), oracle::vec(SimplexWeights::unit(12, 11).values()));
}

TEST(Apriori, SnowAndIceSplitsEvenly) {
  auto a = apriori_weights(ClassFractions::unit(2), shipped());
  const std::vector<double> expect = {0, 0, 0, 0, 0, 0, 0, 0.25, 0.25, 0.25, 0.25, 0};
  EXPECT_EQ(oracle::vec(a.values()), expect);
}

TEST(Apriori, CroplandAndNeedleleafMix) {
  std::array<double, 17> t{};
  t[4] = 0.5;
  t[15] = 0.5;
  auto a = apriori_weights(ClassFractions(t), shipped());
  EXPECT_NEAR(a[2], 0.05, 1e-16);  // GRS
  EXPECT_NEAR(a[4], 0.45, 1e-16);  // DEC
  EXPECT_NEAR(a[5], 0.5, 1e-16);   // CON
  for (std::size_t i : {0, 1, 3, 6, 7, 8, 9, 10, 11}) EXPECT_EQ(a[i], 0.0);
}

TEST(Apriori, WaterUnitGivesWaterProfile) {
  auto set = oracle::synthetic_set(24);
  auto a = apriori_weights(ClassFractions::unit(17), shipped());
  auto h = apriori_profile(a, *set);
  for (std::size_t k = 0; k < h.size(); ++k) ASSERT_EQ(h.values()[k], (*set)[6].values()[k]);
}

TEST(Apriori, GroupedFormMatchesDoubleSum) {
  auto set = oracle::synthetic_set(25);
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, 17> raw{};
    double s = 0;
    for (auto& v : raw) s += (v = rng.uniform() < 0.5 ? 0.0 : rng.uniform());
    raw[rng.index(17)] += 0.01;
    s = 0;
    for (double v : raw) s += v;
    for (auto& v : raw) v /= s;
    ClassFractions t;
    try {
      t = ClassFractions(raw);
    } catch (const InvariantError&) {
      continue;
    }
    auto h = apriori_profile(apriori_weights(t, shipped()), *set);
    for (std::size_t k = 0; k < h.size(); ++k) {
      double d = 0;
      for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t l = 0; l < 17; ++l) d += t[l] * shipped()(l, i) * (*set)[i].values()[k];
      ASSERT_NEAR(h.values()[k], d, 1e-14 * std::abs(d));
    }
  }
}
