// evaluation.hpp - Coincidence matching and RMSE comparison against reference emissivities
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ancillary.hpp"
#include "error.hpp"
#include "landcover.hpp"
#include "profiles.hpp"
#include "stats.hpp"

namespace emiprior {

inline constexpr double kDefaultCoincidenceTolerance = 0.05;

/// Emissivity channels of the reference sounder inside 100-1600 cm-1.
inline const std::vector<double>& iasi_channels() {
  static const std::vector<double> c = {765.0, 900.0, 991.0, 1071.0, 1160.0, 1228.0};
  return c;
}

struct CoincidencePair {
  GridPoint grid_point;
  std::size_t grid_index = 0;
  GridPoint reference_point;
  std::size_t reference_index = 0;
  std::vector<double> reference_channels;
  std::vector<double> reference_values;
};

/// Matches every reference record to the nearest grid point (Euclidean
/// distance in degrees, ties to the lower grid index) among those within
/// `tol_deg` in both latitude and longitude. Unmatched records are
/// skipped; output follows reference order. Longitudes do not wrap.
inline std::vector<CoincidencePair> match_coincidences(std::span<const GridPoint> grid,
                                                       std::span<const HingeRecord> refs,
                                                       double tol_deg = kDefaultCoincidenceTolerance) {
  if (!(tol_deg > 0.0)) throw InvariantError("coincidence tolerance must be positive");
  std::vector<std::size_t> by_lat(grid.size());
  std::iota(by_lat.begin(), by_lat.end(), 0);
  std::stable_sort(by_lat.begin(), by_lat.end(),
                   [&](std::size_t a, std::size_t b) { return grid[a].lat < grid[b].lat; });

  std::vector<CoincidencePair> out;
  for (std::size_t r = 0; r < refs.size(); ++r) {
    const auto& ref = refs[r];
    auto lo = std::lower_bound(by_lat.begin(), by_lat.end(), ref.lat - tol_deg,
                               [&](std::size_t g, double v) { return grid[g].lat < v; });
    std::size_t best = grid.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (auto it = lo; it != by_lat.end() && grid[*it].lat <= ref.lat + tol_deg; ++it) {
      const auto& g = grid[*it];
      const double dlat = g.lat - ref.lat, dlon = g.lon - ref.lon;
      if (std::abs(dlat) > tol_deg || std::abs(dlon) > tol_deg) continue;
      const double d2 = dlat * dlat + dlon * dlon;
      if (d2 < best_d2 || (d2 == best_d2 && *it < best)) {
        best_d2 = d2;
        best = *it;
      }
    }
    if (best == grid.size()) continue;
    out.push_back({grid[best], best, GridPoint{ref.lat, ref.lon}, r, ref.wavenumbers, ref.emissivities});
  }
  return out;
}

inline double pointwise_rmse(const EmissivityProfile& estimate, const CoincidencePair& pair) {
  if (pair.reference_channels.size() != pair.reference_values.size() || pair.reference_channels.empty())
    throw AlignmentError("coincidence has no aligned reference channels");
  double acc = 0.0;
  for (std::size_t k = 0; k < pair.reference_channels.size(); ++k) {
    const double d = estimate.at(pair.reference_channels[k]) - pair.reference_values[k];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pair.reference_channels.size()));
}

/// Piecewise-linear interpolation through hinge values, held constant
/// beyond the outermost hinges, sampled on `grid`.
inline EmissivityProfile linear_spline_profile(const HingeRecord& hinge, const WavenumberGrid& grid,
                                               std::string label = "spline") {
  if (hinge.wavenumbers.empty()) throw InsufficientDataError("spline needs at least one hinge value");
  std::vector<double> v(grid.size());
  const auto& x = hinge.wavenumbers;
  const auto& y = hinge.emissivities;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double nu = std::clamp(grid[k], x.front(), x.back());
    v[k] = interpolate_linear(x, y, nu);
  }
  return EmissivityProfile(grid, std::move(v), std::move(label));
}

struct RmseReport {
  std::string label;
  std::vector<double> values;
  double mean = 0.0;
  std::size_t count = 0;

  static RmseReport from(std::string label, std::vector<double> values) {
    RmseReport r;
    r.label = std::move(label);
    r.count = values.size();
    for (double v : values) r.mean += v;
    if (!values.empty()) r.mean /= static_cast<double>(values.size());
    r.values = std::move(values);
    return r;
  }
};

struct MethodComparison {
  RmseReport bayes_reference;   // BAYES-IASI
  RmseReport camel_reference;   // CAMEL-IASI
  RmseReport camel_bayes;       // CAMEL-BAYES
  stats::TTestResult ttest;     // bayes_reference vs camel_reference
};

/// Per-coincidence RMSE of the Bayesian and spline estimates against the
/// reference values, and of the two estimates against each other, all on
/// the reference channels. `bayes` and `spline` are indexed by grid point.
inline MethodComparison compare_methods(std::span<const EmissivityProfile> bayes,
                                        std::span<const EmissivityProfile> spline,
                                        std::span<const CoincidencePair> pairs) {
  if (bayes.size() != spline.size())
    throw AlignmentError("Bayesian and spline estimates are not aligned by grid point");
  std::vector<double> br, cr, cb;
  for (const auto& p : pairs) {
    if (p.grid_index >= bayes.size()) throw AlignmentError("coincidence refers to a missing grid point");
    const auto& eb = bayes[p.grid_index];
    const auto& es = spline[p.grid_index];
    br.push_back(pointwise_rmse(eb, p));
    cr.push_back(pointwise_rmse(es, p));
    CoincidencePair between = p;
    between.reference_values = interpolate_profile(eb, p.reference_channels);
    cb.push_back(pointwise_rmse(es, between));
  }
  MethodComparison m;
  if (br.size() >= 2) m.ttest = stats::two_sample_ttest(br, cr);
  m.bayes_reference = RmseReport::from("BAYES-IASI", std::move(br));
  m.camel_reference = RmseReport::from("CAMEL-IASI", std::move(cr));
  m.camel_bayes = RmseReport::from("CAMEL-BAYES", std::move(cb));
  return m;
}

} // namespace emiprior
