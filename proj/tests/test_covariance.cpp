// test_covariance.cpp - Sample covariance, channel reduction, restriction and inversion
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#include <gtest/gtest.h>

#include "emiprior/covariance.hpp"
#include "oracles.hpp"

using namespace emiprior;

namespace {

// Textbook two-pass covariance with 1/N normalization.
std::vector<std::vector<double>> two_pass(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size(), m = x[0].size();
  std::vector<double> mean(m, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < m; ++j) mean[j] += row[j];
  for (auto& v : mean) v /= static_cast<double>(n);
  std::vector<std::vector<double>> s(m, std::vector<double>(m, 0.0));
  for (const auto& row : x)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) s[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
  for (auto& r : s)
    for (auto& v : r) v /= static_cast<double>(n);
  return s;
}

CovarianceMatrix from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> ch(static_cast<std::size_t>(m.rows()));
  for (std::size_t i = 0; i < ch.size(); ++i) ch[i] = 100.0 + static_cast<double>(i);
  return CovarianceMatrix(ch, m);
}

} // namespace

TEST(SampleVcm, IdenticalSamplesGiveZero) {
  auto s = sample_vcm({{0.9, 0.8, 0.7}, {0.9, 0.8, 0.7}, {0.9, 0.8, 0.7}});
  EXPECT_EQ(s.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(SampleVcm, TwoPointsAllOnes) {
  auto s = sample_vcm({{0, 0}, {2, 2}});
  EXPECT_EQ(s.matrix(), Eigen::MatrixXd::Ones(2, 2));
}

TEST(SampleVcm, MatchesTwoPassOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> x(50, std::vector<double>(9));
    for (auto& row : x)
      for (auto& v : row) v = 0.9 + 0.05 * rng.normal();
    auto s = sample_vcm(x);
    auto ref = two_pass(x);
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b) ASSERT_NEAR(s(a, b), ref[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], 1e-13);
    EXPECT_GE(s.min_eigenvalue(), -1e-10 * s.matrix().trace());
  }
}

TEST(SampleVcm, Errors) {
  EXPECT_THROW(sample_vcm({{1.0, 2.0}}), InsufficientDataError);
  EXPECT_THROW(sample_vcm({{1.0, 2.0}, {1.0}}), AlignmentError);
}

TEST(ProfileVcm, ConstantProfiles) {
  auto g = WavenumberGrid::uniform(50, 5, 321);
  ProfileSet set({EmissivityProfile(g, std::vector<double>(321, 0.8), "a"),
                  EmissivityProfile(g, std::vector<double>(321, 1.0), "b")});
  auto s = profile_vcm(set);
  for (int a = 0; a < 321; a += 40)
    for (int b = 0; b < 321; b += 40) EXPECT_NEAR(s(a, b), 0.01, 1e-16);
  ProfileSet same({EmissivityProfile(g, std::vector<double>(321, 0.8), "a"),
                   EmissivityProfile(g, std::vector<double>(321, 0.8), "b")});
  EXPECT_EQ(profile_vcm(same).matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProfileVcm, EqualsSampleVcmOfRows) {
  auto set = oracle::synthetic_set(32);
  std::vector<std::vector<double>> rows;
  for (const auto& p : *set) rows.emplace_back(p.values().begin(), p.values().end());
  auto s = profile_vcm(*set);
  auto ref = two_pass(rows);
  for (int a = 0; a < 321; a += 7)
    for (int b = 0; b < 321; b += 11) ASSERT_NEAR(s(a, b), ref[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], 1e-15);
}

TEST(Covariance, RejectsInvalidMatrices) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  EXPECT_THROW(from_matrix(asym), InvariantError);
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_THROW(from_matrix(indef), InvariantError);
}

TEST(Reduce, DiagonalKeepsAll) {
  Rng rng(33);
  Eigen::VectorXd d(20);
  for (int i = 0; i < 20; ++i) d(i) = rng.uniform(0.1, 2.0);
  auto sel = reduce_channels(from_matrix(d.asDiagonal()), 0.9);
  EXPECT_EQ(sel.indices.size(), 20u);
  for (std::size_t k = 1; k < sel.indices.size(); ++k)
    EXPECT_GE(d(static_cast<Eigen::Index>(sel.indices[k - 1])), d(static_cast<Eigen::Index>(sel.indices[k])));
}

TEST(Reduce, RankOneKeepsOne) {
  Rng rng(34);
  Eigen::VectorXd v(15);
  for (int i = 0; i < 15; ++i) v(i) = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.1, 1.0);
  auto sel = reduce_channels(from_matrix(v * v.transpose()), 0.9);
  ASSERT_EQ(sel.indices.size(), 1u);
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  EXPECT_EQ(sel.indices[0], static_cast<std::size_t>(imax));
}

TEST(Reduce, PicksAreMutuallyBelowThreshold) {
  auto set = oracle::synthetic_set(35);
  auto s = profile_vcm(*set);
  for (double c : {0.5, 0.8, 0.9, 0.95}) {
    auto sel = reduce_channels(s, c);
    ASSERT_GE(sel.indices.size(), 1u);
    const auto r = s.correlation();
    for (std::size_t a = 0; a < sel.indices.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        ASSERT_LT(std::abs(r(static_cast<Eigen::Index>(sel.indices[a]), static_cast<Eigen::Index>(sel.indices[b]))), c);
    // Every unpicked channel is correlated with some pick.
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (s(j, j) < kZeroVariance) continue;
      bool covered = false;
      for (auto p : sel.indices) covered |= std::abs(r(static_cast<Eigen::Index>(p), j)) >= c;
      ASSERT_TRUE(covered) << j;
    }
  }
}

TEST(Reduce, DropsZeroVarianceAndBreaksTiesLow) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  m(3, 3) = 0.5;
  auto sel = reduce_channels(from_matrix(m));
  EXPECT_EQ(sel.dropped, std::vector<std::size_t>{0});
  EXPECT_EQ(sel.indices, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_THROW(reduce_channels(from_matrix(m), 1.0), InvariantError);
}

TEST(Restrict, IdentityAndSingleton) {
  Rng rng(36);
  auto s = from_matrix(oracle::random_spd(rng, 8));
  ChannelSelection all;
  for (std::size_t i = 0; i < 8; ++i) all.indices.push_back(i);
  EXPECT_EQ(restrict(s, all).matrix(), s.matrix());
  ChannelSelection one;
  one.indices = {5};
  auto r = restrict(s, one);
  EXPECT_EQ(r.size(), 1);
  EXPECT_EQ(r(0, 0), s(5, 5));
  one.indices = {8};
  EXPECT_THROW(restrict(s, one), RangeError);
}

TEST(Restrict, EntriesFollowSelectionOrder) {
  Rng rng(37);
  auto s = from_matrix(oracle::random_spd(rng, 12));
  ChannelSelection sel;
  sel.indices = {7, 2, 11, 0};
  auto r = restrict(s, sel);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      EXPECT_EQ(r(a, b), s(static_cast<Eigen::Index>(sel.indices[static_cast<std::size_t>(a)]),
                           static_cast<Eigen::Index>(sel.indices[static_cast<std::size_t>(b)])));
  EXPECT_EQ(r.channels()[0], s.channels()[7]);
}

TEST(Inverse, RegularAndSingular) {
  Rng rng(38);
  Eigen::MatrixXd a = oracle::random_spd(rng, 6);
  auto inv = inverse_spd(a);
  EXPECT_EQ(inv.jitter, 0.0);
  EXPECT_LT((inv.inverse * a - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);

  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(5, 1, 2);
  auto sing = inverse_spd(v * v.transpose());
  EXPECT_GT(sing.jitter, 0.0);
  EXPECT_TRUE(sing.inverse.allFinite());
}

TEST(CovarianceIo, CsvAndSelectionJsonRoundTrip) {
  Rng rng(39);
  auto s = from_matrix(oracle::random_spd(rng, 5));
  auto dir = oracle::scratch_dir("cov_io");
  save_covariance_csv(s, (dir / "s.csv").string());
  auto back = load_covariance_csv((dir / "s.csv").string());
  EXPECT_EQ(back.matrix(), s.matrix());
  EXPECT_EQ(back.channels(), s.channels());
  auto sel = reduce_channels(s, 0.3);
  auto sel2 = selection_from_json(to_json(sel));
  EXPECT_EQ(sel2.indices, sel.indices);
  EXPECT_EQ(sel2.channels, sel.channels);
}
