// synth.hpp - Seeded synthetic profile sets, land-cover maps and observations
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ancillary.hpp"
#include "bayes.hpp"
#include "evaluation.hpp"
#include "landcover.hpp"
#include "profiles.hpp"

namespace emiprior::synth {

/// mt19937_64 with distributions written out explicitly, so a seed gives
/// the same stream with every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  /// Standard normal by Box-Muller; no cached second value.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// Acronyms of the 12 reference profiles, in correspondence-table order.
inline const std::vector<std::string>& reference_labels() {
  static const std::vector<std::string> l = {"DES", "D&G", "GRS", "DGR", "DEC", "CON",
                                             "WAT", "FSN", "MSN", "CSN", "ICE", "FOR"};
  return l;
}

struct ProfileSpec {
  double start = 50.0;
  double step = 5.0;
  std::size_t count = 321;
  int features_per_profile = 40;   // narrow spectral features
  double feature_width_min = 4.0;  // cm-1, Gaussian sigma
  double feature_width_max = 12.0;
  double feature_amplitude = 0.04;
};

/// Twelve smooth base spectra with narrow Gaussian features (narrower
/// than the hinge spacing) scattered over the window region.
inline ProfileSet profile_set(Rng& rng, const ProfileSpec& spec = {}) {
  const auto grid = WavenumberGrid::uniform(spec.start, spec.step, spec.count);
  std::vector<EmissivityProfile> out;
  for (const auto& label : reference_labels()) {
    const double base = rng.uniform(0.90, 0.985);
    const double slope = rng.uniform(-0.03, 0.03);
    const double broad_center = rng.uniform(800.0, 1300.0);
    const double broad_depth = rng.uniform(0.0, 0.08);
    const double broad_width = rng.uniform(40.0, 120.0);
    struct Feature { double c, w, a; };
    std::vector<Feature> feats;
    for (int f = 0; f < spec.features_per_profile; ++f)
      feats.push_back({rng.uniform(600.0, 1400.0),
                       rng.uniform(spec.feature_width_min, spec.feature_width_max),
                       rng.uniform(-spec.feature_amplitude, spec.feature_amplitude)});
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double nu = grid[k];
      double e = base + slope * (nu - 850.0) / 800.0;
      e -= broad_depth * std::exp(-0.5 * std::pow((nu - broad_center) / broad_width, 2));
      for (const auto& f : feats) e += f.a * std::exp(-0.5 * std::pow((nu - f.c) / f.w, 2));
      v[k] = std::clamp(e, 0.6, 1.0);
    }
    out.emplace_back(grid, std::move(v), label);
  }
  return ProfileSet(std::move(out));
}

struct SceneSpec {
  std::size_t n_lat = 40;
  std::size_t n_lon = 50;
  double lat0 = 10.0;        // first grid point
  double lon0 = 0.0;
  double grid_step = 0.25;
  double map_step = 0.05;
  double patch_step = 0.1;   // land-cover patch size
  double mix_probability = 0.5;
  bool land_only = true;
  double camel_noise = 0.005;
  double reference_noise = 0.0;
  double reference_offset = 0.03;  // max |offset| of reference positions, degrees
  double missing_channel_probability = 0.0;
  double truth_spread = 0.8;  // log-normal sigma of truth/prior weight ratios
  int month = 1;
};

/// A synthetic scene: grid, land-cover map, truth weights and the
/// observations derived from them.
struct Scene {
  std::vector<GridPoint> grid;
  LandCoverGrid map;
  std::vector<SimplexWeights> apriori;
  std::vector<SimplexWeights> truth;
  std::vector<HingeRecord> camel;       // one per land grid point, same order as grid
  std::vector<std::size_t> camel_point; // grid index of each CAMEL record
  std::vector<HingeRecord> reference;   // reference-channel records near land points
  std::vector<GeoAncillary> ancillary;
};

inline nlohmann::json to_json(const SceneSpec& s) {
  return {{"n_lat", s.n_lat}, {"n_lon", s.n_lon}, {"lat0", s.lat0}, {"lon0", s.lon0},
          {"grid_step", s.grid_step}, {"map_step", s.map_step}, {"patch_step", s.patch_step},
          {"mix_probability", s.mix_probability}, {"land_only", s.land_only},
          {"camel_noise", s.camel_noise}, {"reference_noise", s.reference_noise},
          {"reference_offset", s.reference_offset},
          {"missing_channel_probability", s.missing_channel_probability},
          {"truth_spread", s.truth_spread}, {"month", s.month}};
}

inline SceneSpec scene_spec_from_json(const nlohmann::json& j) {
  SceneSpec s;
  s.n_lat = j.value("n_lat", s.n_lat);
  s.n_lon = j.value("n_lon", s.n_lon);
  s.lat0 = j.value("lat0", s.lat0);
  s.lon0 = j.value("lon0", s.lon0);
  s.grid_step = j.value("grid_step", s.grid_step);
  s.map_step = j.value("map_step", s.map_step);
  s.patch_step = j.value("patch_step", s.patch_step);
  s.mix_probability = j.value("mix_probability", s.mix_probability);
  s.land_only = j.value("land_only", s.land_only);
  s.camel_noise = j.value("camel_noise", s.camel_noise);
  s.reference_noise = j.value("reference_noise", s.reference_noise);
  s.reference_offset = j.value("reference_offset", s.reference_offset);
  s.missing_channel_probability = j.value("missing_channel_probability", s.missing_channel_probability);
  s.truth_spread = j.value("truth_spread", s.truth_spread);
  s.month = j.value("month", s.month);
  return s;
}

/// Land-cover raster covering the grid plus a margin wider than the
/// field of view, built from square patches; a patch is either one class
/// or a checkerboard of two.
inline LandCoverGrid land_cover_map(Rng& rng, const SceneSpec& s) {
  const double margin = 0.2;
  const double lat_lo = s.lat0 - margin, lon_lo = s.lon0 - margin;
  const double lat_hi = s.lat0 + s.grid_step * static_cast<double>(s.n_lat - 1) + margin;
  const double lon_hi = s.lon0 + s.grid_step * static_cast<double>(s.n_lon - 1) + margin;
  const auto nrows = static_cast<std::size_t>(std::ceil((lat_hi - lat_lo) / s.map_step)) + 1;
  const auto ncols = static_cast<std::size_t>(std::ceil((lon_hi - lon_lo) / s.map_step)) + 1;
  const auto per_patch = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s.patch_step / s.map_step)));
  const std::size_t prow = (nrows + per_patch - 1) / per_patch, pcol = (ncols + per_patch - 1) / per_patch;
  const int nclasses = s.land_only ? 16 : 17;
  std::vector<std::uint8_t> patch_a(prow * pcol), patch_b(prow * pcol);
  std::vector<bool> mixed(prow * pcol);
  for (std::size_t p = 0; p < prow * pcol; ++p) {
    patch_a[p] = static_cast<std::uint8_t>(1 + rng.index(static_cast<std::size_t>(nclasses)));
    patch_b[p] = static_cast<std::uint8_t>(1 + rng.index(static_cast<std::size_t>(nclasses)));
    mixed[p] = rng.uniform() < s.mix_probability;
  }
  std::vector<std::uint8_t> cls(nrows * ncols);
  for (std::size_t r = 0; r < nrows; ++r)
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::size_t p = (r / per_patch) * pcol + c / per_patch;
      cls[r * ncols + c] = mixed[p] && ((r + c) % 2) ? patch_b[p] : patch_a[p];
    }
  return LandCoverGrid(lat_lo, lon_lo, s.map_step, nrows, ncols, std::move(cls));
}

/// Truth weights on the support of `a`: a_i g_i renormalized, with g_i
/// log-normal.
inline SimplexWeights truth_weights(Rng& rng, const SimplexWeights& a, double spread) {
  std::vector<double> w(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > kSupportThreshold) w[i] = a[i] * std::exp(spread * rng.normal());
  return SimplexWeights::normalized(std::move(w));
}

inline Scene scene(Rng& rng, const ProfileSet& set, const CorrespondenceMatrix& m, const SceneSpec& s,
                   double fov_radius_km = kDefaultFovRadiusKm) {
  Scene sc;
  sc.map = land_cover_map(rng, s);
  const auto& cc = camel_channels();
  const auto& ic = iasi_channels();
  const std::size_t water = set.index_of("WAT");
  for (std::size_t i = 0; i < s.n_lat; ++i)
    for (std::size_t j = 0; j < s.n_lon; ++j) {
      GridPoint g{s.lat0 + s.grid_step * static_cast<double>(i), s.lon0 + s.grid_step * static_cast<double>(j)};
      sc.grid.push_back(g);
      const auto t = fov_fractions(sc.map, g, fov_radius_km);
      auto a = apriori_weights(t, m);
      auto truth = truth_weights(rng, a, s.truth_spread);
      const auto profile = convex_combination(set, truth, "truth");

      GeoAncillary anc{g.lat, g.lon, {}};
      const bool is_water = t[16] > 0.5;
      anc.record.surface = is_water ? Surface::water : Surface::land;
      const bool snowy = t[1] > 0.5;
      anc.record.skin_temperature = snowy ? rng.uniform(-25.0, -2.0) : rng.uniform(-2.0, 35.0);
      if (is_water) {
        anc.record.snow_fraction = std::numeric_limits<double>::quiet_NaN();
        anc.record.soil_humidity = std::numeric_limits<double>::quiet_NaN();
      } else {
        anc.record.snow_fraction = snowy ? rng.uniform(0.6, 1.0) : rng.uniform(0.0, 0.3);
        anc.record.soil_humidity = rng.uniform(5.0, 60.0);
      }
      sc.ancillary.push_back(anc);

      if (!is_water && truth[water] < 0.5) {
        HingeRecord h;
        h.lat = g.lat;
        h.lon = g.lon;
        h.month = s.month;
        for (double nu : cc) {
          const double noisy = std::clamp(profile.at(nu) + s.camel_noise * rng.normal(), 0.0, 1.0);
          if (rng.uniform() < s.missing_channel_probability) continue;
          h.wavenumbers.push_back(nu);
          h.emissivities.push_back(noisy);
        }
        sc.camel.push_back(std::move(h));
        sc.camel_point.push_back(sc.grid.size() - 1);

        HingeRecord r;
        r.lat = g.lat + rng.uniform(-s.reference_offset, s.reference_offset);
        r.lon = g.lon + rng.uniform(-s.reference_offset, s.reference_offset);
        r.month = s.month;
        for (double nu : ic) {
          r.wavenumbers.push_back(nu);
          r.emissivities.push_back(std::clamp(profile.at(nu) + s.reference_noise * rng.normal(), 0.0, 1.0));
        }
        sc.reference.push_back(std::move(r));
      }
      sc.apriori.push_back(std::move(a));
      sc.truth.push_back(std::move(truth));
    }
  return sc;
}

} // namespace emiprior::synth
