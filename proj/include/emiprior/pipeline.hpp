// pipeline.hpp - Batch drivers behind the emiprior command-line tool
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ancillary.hpp"
#include "bayes.hpp"
#include "covariance.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "landcover.hpp"
#include "log.hpp"
#include "profiles.hpp"
#include "rte.hpp"
#include "synth.hpp"

#ifndef EMIPRIOR_DATA_DIR
#define EMIPRIOR_DATA_DIR "data"
#endif

namespace emiprior {

namespace fs = std::filesystem;

/// Runs body(i) for i in [0, n) on `workers` threads with a static
/// contiguous partition. Results must be written to per-index slots; the
/// first exception by index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct PipelineConfig {
  fs::path base_dir = ".";
  fs::path out_dir = ".";

  std::string profiles;
  std::string landcover;
  std::string correspondence = std::string(EMIPRIOR_DATA_DIR) + "/correspondence.json";
  std::string constraints = std::string(EMIPRIOR_DATA_DIR) + "/constraints.json";
  std::string camel;
  std::string ancillary;
  std::string grid;
  std::string reference;
  std::string column;
  std::string emissivity;  // optional override for cmd_rte: scalar or profile CSV

  double snow_threshold = kDefaultSnowThreshold;
  double fov_radius_km = kDefaultFovRadiusKm;
  double channel_threshold = kDefaultChannelThreshold;
  double coincidence_tol = kDefaultCoincidenceTolerance;

  double rte_start = 50.0;
  double rte_step = 5.0;
  std::size_t rte_count = 321;

  std::uint64_t seed = 0;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  synth::ProfileSpec profile_spec;
  synth::SceneSpec scene_spec;

  std::string resolve(const std::string& p) const {
    if (p.empty()) return p;
    fs::path path(p);
    return path.is_absolute() ? path.string() : (base_dir / path).string();
  }

  std::string require(const std::string& p, const char* what) const {
    if (p.empty()) throw ConfigError(std::string("config needs '") + what + "'");
    auto r = resolve(p);
    if (!fs::exists(r)) throw ConfigError(std::string(what) + " file '" + r + "' does not exist");
    return r;
  }

  void validate() const {
    if (!(snow_threshold >= 0.0 && snow_threshold <= 1.0)) throw ConfigError("snow_threshold outside [0, 1]");
    if (!(fov_radius_km > 0.0)) throw ConfigError("fov_radius_km must be positive");
    if (!(channel_threshold > 0.0 && channel_threshold < 1.0)) throw ConfigError("channel_threshold outside (0, 1)");
    if (!(coincidence_tol > 0.0)) throw ConfigError("coincidence_tol must be positive");
    if (workers == 0) throw ConfigError("workers must be at least 1");
  }

  fs::path output(const std::string& name) const {
    fs::create_directories(out_dir);
    return out_dir / name;
  }
};

inline PipelineConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;
  try {
    auto str = [&](const char* key, std::string& dst) {
      if (j.contains(key) && !j[key].is_null()) dst = j[key].get<std::string>();
    };
    str("profiles", c.profiles);
    str("landcover", c.landcover);
    str("correspondence", c.correspondence);
    str("constraints", c.constraints);
    str("camel", c.camel);
    str("ancillary", c.ancillary);
    str("grid", c.grid);
    str("reference", c.reference);
    str("column", c.column);
    if (j.contains("emissivity") && !j["emissivity"].is_null())
      c.emissivity = j["emissivity"].is_number() ? csv::format(j["emissivity"].get<double>())
                                                 : j["emissivity"].get<std::string>();
    c.snow_threshold = j.value("snow_threshold", c.snow_threshold);
    c.fov_radius_km = j.value("fov_radius_km", c.fov_radius_km);
    c.channel_threshold = j.value("channel_threshold", c.channel_threshold);
    c.coincidence_tol = j.value("coincidence_tol", c.coincidence_tol);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("rte")) {
      const auto& r = j["rte"];
      c.rte_start = r.value("wavenumber_start", c.rte_start);
      c.rte_step = r.value("wavenumber_step", c.rte_step);
      c.rte_count = r.value("wavenumber_count", c.rte_count);
    }
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      if (s.contains("scene")) c.scene_spec = synth::scene_spec_from_json(s["scene"]);
      if (s.contains("profiles")) {
        const auto& p = s["profiles"];
        c.profile_spec.features_per_profile = p.value("features_per_profile", c.profile_spec.features_per_profile);
        c.profile_spec.feature_width_min = p.value("feature_width_min", c.profile_spec.feature_width_min);
        c.profile_spec.feature_width_max = p.value("feature_width_max", c.profile_spec.feature_width_max);
        c.profile_spec.feature_amplitude = p.value("feature_amplitude", c.profile_spec.feature_amplitude);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  auto dir = fs::path(path).parent_path();
  return config_from_json(j, dir.empty() ? fs::path(".") : dir);
}

/// Grid points sorted by (lat, lon). Taken from the grid file, else from
/// the CAMEL records, else from the ancillary records.
inline std::vector<GridPoint> load_grid(const PipelineConfig& cfg) {
  std::vector<GridPoint> g;
  if (!cfg.grid.empty()) {
    auto t = csv::read(cfg.require(cfg.grid, "grid"));
    const auto ilat = t.column("lat"), ilon = t.column("lon");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      GridPoint p{csv::parse_double(t.rows[r][ilat], t.line_numbers[r]),
                  csv::parse_double(t.rows[r][ilon], t.line_numbers[r])};
      try {
        p.validate();
      } catch (const Error& e) {
        throw ParseError(e.what(), t.line_numbers[r]);
      }
      g.push_back(p);
    }
  } else if (!cfg.camel.empty()) {
    for (const auto& h : load_hinge_records(cfg.require(cfg.camel, "camel"))) g.push_back({h.lat, h.lon});
  } else if (!cfg.ancillary.empty()) {
    for (const auto& a : load_ancillary_records(cfg.require(cfg.ancillary, "ancillary"))) g.push_back({a.lat, a.lon});
  } else {
    throw ConfigError("config needs 'grid', 'camel' or 'ancillary' to define grid points");
  }
  std::sort(g.begin(), g.end(), [](const GridPoint& a, const GridPoint& b) {
    return a.lat < b.lat || (a.lat == b.lat && a.lon < b.lon);
  });
  return g;
}

inline void save_grid(const std::vector<GridPoint>& g, const std::string& path) {
  auto out = csv::open_output(path);
  out << "lat,lon\n";
  for (const auto& p : g) out << csv::format(p.lat) << ',' << csv::format(p.lon) << '\n';
}

using PointKey = std::pair<double, double>;

template <typename T>
std::map<PointKey, std::size_t> index_by_point(const std::vector<T>& records) {
  std::map<PointKey, std::size_t> m;
  for (std::size_t i = 0; i < records.size(); ++i) m.emplace(PointKey{records[i].lat, records[i].lon}, i);
  return m;
}

/// CAMEL covariance from the records that have every channel.
inline CovarianceMatrix camel_covariance(const std::vector<HingeRecord>& camel) {
  std::vector<double> channels;
  for (const auto& h : camel)
    if (h.wavenumbers.size() > channels.size()) channels = h.wavenumbers;
  std::vector<std::vector<double>> samples;
  for (const auto& h : camel)
    if (h.wavenumbers == channels) samples.push_back(h.emissivities);
  if (samples.size() < 2) throw InsufficientDataError("fewer than 2 complete CAMEL records for the covariance");
  return sample_vcm(samples, channels);
}

// select -------------------------------------------------------------------

struct SelectRow {
  GridPoint point;
  Selection selection;
  double rms_constant = std::numeric_limits<double>::quiet_NaN();  // constant 0.99 profile
  std::string error;  // non-empty when no profile could be selected
};

inline std::vector<SelectRow> run_select(const PipelineConfig& cfg) {
  cfg.validate();
  const auto set = load_profile_set(cfg.require(cfg.profiles, "profiles"));
  const auto table = load_constraint_table(cfg.require(cfg.constraints, "constraints"));
  table.check_aligned(set);
  auto anc = load_ancillary_records(cfg.require(cfg.ancillary, "ancillary"));
  std::sort(anc.begin(), anc.end(), [](const GeoAncillary& a, const GeoAncillary& b) {
    return a.lat < b.lat || (a.lat == b.lat && a.lon < b.lon);
  });
  std::vector<HingeRecord> hinges;
  if (!cfg.camel.empty()) hinges = load_hinge_records(cfg.require(cfg.camel, "camel"));
  const auto by_point = index_by_point(hinges);
  const EmissivityProfile constant(set.grid(), std::vector<double>(set.grid().size(), 0.99), "constant");

  std::vector<SelectRow> rows(anc.size());
  parallel_for(anc.size(), cfg.workers, [&](std::size_t i) {
    auto& row = rows[i];
    row.point = {anc[i].lat, anc[i].lon};
    const HingeRecord* h = nullptr;
    if (auto it = by_point.find({anc[i].lat, anc[i].lon}); it != by_point.end()) h = &hinges[it->second];
    try {
      row.selection = select_profile(anc[i].record, h, set, table, cfg.snow_threshold);
      if (h && !h->wavenumbers.empty()) row.rms_constant = rms_to_hinges(constant, *h);
    } catch (const NoSelectionError& e) {
      row.error = e.kind();
    }
  });

  auto out = csv::open_output(cfg.output("selection.csv").string());
  out << "lat,lon,label\n";
  for (const auto& r : rows)
    out << csv::format(r.point.lat) << ',' << csv::format(r.point.lon) << ','
        << (r.error.empty() ? r.selection.label : "") << '\n';
  auto rms = csv::open_output(cfg.output("rms_map.csv").string());
  rms << "lat,lon,rms_selected,rms_constant_0.99\n";
  auto opt = [](double v) { return std::isnan(v) ? std::string() : csv::format(v); };
  for (const auto& r : rows)
    rms << csv::format(r.point.lat) << ',' << csv::format(r.point.lon) << ',' << opt(r.selection.rms)
        << ',' << opt(r.rms_constant) << '\n';
  return rows;
}

// apriori ------------------------------------------------------------------

struct AprioriRow {
  GridPoint point;
  std::optional<SimplexWeights> weights;  // empty when the footprint has no cells
};

inline std::vector<AprioriRow> compute_apriori(const PipelineConfig& cfg, const std::vector<GridPoint>& grid,
                                               const LandCoverGrid& map, const CorrespondenceMatrix& m) {
  std::vector<AprioriRow> rows(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    rows[i].point = grid[i];
    try {
      rows[i].weights = apriori_weights(fov_fractions(map, grid[i], cfg.fov_radius_km), m);
    } catch (const EmptyFootprintError&) {
    }
  });
  return rows;
}

inline std::vector<AprioriRow> run_apriori(const PipelineConfig& cfg) {
  cfg.validate();
  const auto set = load_profile_set(cfg.require(cfg.profiles, "profiles"));
  const auto m = load_correspondence(cfg.require(cfg.correspondence, "correspondence"));
  m.check_aligned(set);
  const auto map = load_land_cover(cfg.require(cfg.landcover, "landcover"));
  const auto grid = load_grid(cfg);
  auto rows = compute_apriori(cfg, grid, map, m);

  auto out = csv::open_output(cfg.output("apriori.csv").string());
  out << "lat,lon";
  for (const auto& l : set.labels()) out << ',' << l;
  out << '\n';
  for (const auto& r : rows) {
    out << csv::format(r.point.lat) << ',' << csv::format(r.point.lon);
    for (std::size_t i = 0; i < set.size(); ++i)
      out << ',' << (r.weights ? csv::format((*r.weights)[i]) : std::string());
    out << '\n';
  }
  return rows;
}

// reduce -------------------------------------------------------------------

inline ChannelSelection run_reduce(const PipelineConfig& cfg) {
  cfg.validate();
  const auto set = load_profile_set(cfg.require(cfg.profiles, "profiles"));
  const auto s = profile_vcm(set);
  auto sel = reduce_channels(s, cfg.channel_threshold);
  {
    std::ofstream out(cfg.output("selection.json"));
    out << to_json(sel).dump(2) << '\n';
  }
  const auto sub = restrict(s, sel);
  save_covariance_csv(sub.correlation(), sub.channels(), cfg.output("correlation.csv").string());
  save_covariance_csv(sub, cfg.output("reduced_covariance.csv").string());
  return sel;
}

// fit ----------------------------------------------------------------------

struct FitRow {
  GridPoint point;
  std::optional<BayesFit> fit;
  std::string error;
};

struct FitRun {
  std::shared_ptr<const ProfileSet> set;
  std::vector<HingeRecord> camel;
  std::map<PointKey, std::size_t> camel_index;
  ChannelSelection selection;
  std::vector<FitRow> rows;  // sorted by (lat, lon)
};

inline FitRun compute_fits(const PipelineConfig& cfg) {
  cfg.validate();
  FitRun run;
  run.set = std::make_shared<const ProfileSet>(load_profile_set(cfg.require(cfg.profiles, "profiles")));
  const auto m = load_correspondence(cfg.require(cfg.correspondence, "correspondence"));
  m.check_aligned(*run.set);
  const auto map = load_land_cover(cfg.require(cfg.landcover, "landcover"));
  run.camel = load_hinge_records(cfg.require(cfg.camel, "camel"));
  run.camel_index = index_by_point(run.camel);
  const auto grid = load_grid(cfg);

  const auto s_c = camel_covariance(run.camel);
  const auto s_h = profile_vcm(*run.set);
  run.selection = reduce_channels(s_h, cfg.channel_threshold);
  const auto s_r = restrict(s_h, run.selection);
  const BayesFitter fitter(run.set, s_c, s_r, run.selection);
  logger().info("fitting {} grid points with {} super channels", grid.size(), run.selection.indices.size());

  const auto apriori = compute_apriori(cfg, grid, map, m);
  run.rows.resize(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    auto& row = run.rows[i];
    row.point = grid[i];
    if (!apriori[i].weights) {
      row.error = "empty_footprint";
      return;
    }
    const HingeRecord* h = nullptr;
    if (auto it = run.camel_index.find({grid[i].lat, grid[i].lon}); it != run.camel_index.end())
      h = &run.camel[it->second];
    row.fit = fitter.fit(h, *apriori[i].weights);
  });
  return run;
}

inline void save_fits(const FitRun& run, const std::string& path) {
  auto out = csv::open_output(path);
  out << "lat,lon";
  for (const auto& l : run.set->labels()) out << ',' << l;
  out << ",cost,cost_camel,cost_prior,kkt_residual,flags\n";
  for (const auto& r : run.rows) {
    out << csv::format(r.point.lat) << ',' << csv::format(r.point.lon);
    if (r.fit) {
      for (double w : r.fit->weights.values()) out << ',' << csv::format(w);
      out << ',' << csv::format(r.fit->cost) << ',' << csv::format(r.fit->cost_camel_term) << ','
          << csv::format(r.fit->cost_prior_term) << ',' << csv::format(r.fit->kkt_residual) << ','
          << flags_to_string(r.fit->flags) << '\n';
    } else {
      for (std::size_t i = 0; i < run.set->size() + 4; ++i) out << ',';
      out << r.error << '\n';
    }
  }
}

inline FitRun run_fit(const PipelineConfig& cfg) {
  auto run = compute_fits(cfg);
  save_fits(run, cfg.output("fits.csv").string());
  std::size_t ok = 0, prior_only = 0, flat = 0;
  double max_kkt = 0.0;
  for (const auto& r : run.rows) {
    if (!r.fit) continue;
    ++ok;
    prior_only += (r.fit->flags & kFlagPriorOnly) != 0;
    flat += (r.fit->flags & kFlagFlat) != 0;
    max_kkt = std::max(max_kkt, r.fit->kkt_residual);
  }
  nlohmann::json summary = {{"points", run.rows.size()}, {"fitted", ok},
                            {"prior_only", prior_only}, {"flat", flat},
                            {"max_kkt_residual", max_kkt},
                            {"labels", run.set->labels()},
                            {"selection", to_json(run.selection)}};
  std::ofstream(cfg.output("fits.json")) << summary.dump(2) << '\n';
  return run;
}

// evaluate -----------------------------------------------------------------

struct EvaluationRun {
  std::vector<GridPoint> grid;  // points with both a fit and CAMEL data
  std::vector<CoincidencePair> pairs;
  MethodComparison comparison;
};

inline EvaluationRun run_evaluate(const PipelineConfig& cfg) {
  auto fits = compute_fits(cfg);
  const auto refs = load_hinge_records(cfg.require(cfg.reference, "reference"));

  EvaluationRun ev;
  std::vector<EmissivityProfile> bayes, spline;
  for (const auto& r : fits.rows) {
    if (!r.fit) continue;
    auto it = fits.camel_index.find({r.point.lat, r.point.lon});
    if (it == fits.camel_index.end() || fits.camel[it->second].wavenumbers.empty()) continue;
    ev.grid.push_back(r.point);
    bayes.push_back(convex_combination(*fits.set, r.fit->weights, "bayes"));
    spline.push_back(linear_spline_profile(fits.camel[it->second], fits.set->grid()));
  }
  ev.pairs = match_coincidences(ev.grid, refs, cfg.coincidence_tol);
  ev.comparison = compare_methods(bayes, spline, ev.pairs);

  {
    auto out = csv::open_output(cfg.output("evaluation.csv").string());
    out << "ref_lat,ref_lon,grid_lat,grid_lon,rmse_bayes_ref,rmse_camel_ref,rmse_camel_bayes\n";
    const auto& c = ev.comparison;
    for (std::size_t k = 0; k < ev.pairs.size(); ++k) {
      const auto& p = ev.pairs[k];
      out << csv::format(p.reference_point.lat) << ',' << csv::format(p.reference_point.lon) << ','
          << csv::format(p.grid_point.lat) << ',' << csv::format(p.grid_point.lon) << ','
          << csv::format(c.bayes_reference.values[k]) << ',' << csv::format(c.camel_reference.values[k])
          << ',' << csv::format(c.camel_bayes.values[k]) << '\n';
    }
  }
  const auto& c = ev.comparison;
  auto row = [](const RmseReport& r) {
    return nlohmann::json{{"label", r.label}, {"mean_rmse", r.mean}, {"count", r.count}};
  };
  nlohmann::json report = {
      {"coincidences", ev.pairs.size()},
      {"references", refs.size()},
      {"tolerance_deg", cfg.coincidence_tol},
      {"rows", {row(c.bayes_reference), row(c.camel_reference), row(c.camel_bayes)}},
      {"ttest", {{"samples", {"BAYES-IASI", "CAMEL-IASI"}},
                 {"t_statistic", c.ttest.t_statistic},
                 {"p_value", c.ttest.p_value},
                 {"dof", c.ttest.dof}}}};
  std::ofstream(cfg.output("evaluation.json")) << report.dump(2) << '\n';
  return ev;
}

// rte ----------------------------------------------------------------------

inline std::vector<double> run_rte(const PipelineConfig& cfg) {
  auto col = rte::load_column(cfg.require(cfg.column, "column"));
  if (!cfg.emissivity.empty()) {
    double v = 0.0;
    auto res = std::from_chars(cfg.emissivity.data(), cfg.emissivity.data() + cfg.emissivity.size(), v);
    if (res.ec == std::errc() && res.ptr == cfg.emissivity.data() + cfg.emissivity.size()) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("emissivity override outside [0, 1]");
      col.emissivity = v;
    } else {
      col.emissivity = load_profile_set(cfg.require(cfg.emissivity, "emissivity"))[0];
    }
  }
  if (cfg.rte_count == 0 || !(cfg.rte_step > 0.0)) throw ConfigError("rte wavenumber grid is empty");
  const auto grid = WavenumberGrid::uniform(cfg.rte_start, cfg.rte_step, cfg.rte_count);
  std::vector<double> radiance(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t k) { radiance[k] = rte::column_radiance(col, grid[k]); });
  rte::save_spectrum(grid.values(), radiance, cfg.output("spectrum.csv").string());
  return radiance;
}

// synth --------------------------------------------------------------------

/// Writes a complete synthetic bundle plus a config.json that points at
/// it, so every other command can run on the output directory.
inline void run_synth(const PipelineConfig& cfg) {
  synth::Rng rng(cfg.seed);
  const auto set = synth::profile_set(rng, cfg.profile_spec);
  const auto m = load_correspondence(cfg.require(cfg.correspondence, "correspondence"));
  m.check_aligned(set);
  const auto table = load_constraint_table(cfg.require(cfg.constraints, "constraints"));
  const auto scene = synth::scene(rng, set, m, cfg.scene_spec, cfg.fov_radius_km);

  save_profile_set(set, cfg.output("profiles.csv").string());
  save_land_cover(scene.map, cfg.output("landcover.bin").string());
  std::ofstream(cfg.output("correspondence.json")) << to_json(m).dump(2) << '\n';
  std::ofstream(cfg.output("constraints.json")) << to_json(table).dump(2) << '\n';
  save_hinge_records(scene.camel, camel_channels(), cfg.output("camel.csv").string());
  save_hinge_records(scene.reference, iasi_channels(), cfg.output("reference.csv").string());
  save_ancillary_records(scene.ancillary, cfg.output("ancillary.csv").string());
  save_grid(scene.grid, cfg.output("grid.csv").string());
  {
    auto out = csv::open_output(cfg.output("truth.csv").string());
    out << "lat,lon";
    for (const auto& l : set.labels()) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < scene.grid.size(); ++i) {
      out << csv::format(scene.grid[i].lat) << ',' << csv::format(scene.grid[i].lon);
      for (double w : scene.truth[i].values()) out << ',' << csv::format(w);
      out << '\n';
    }
  }
  {
    // A mid-latitude clear-sky column with a few layers.
    auto out = csv::open_output(cfg.output("column.csv").string());
    out << "# surface_temperature=" << csv::format(rng.uniform(280.0, 300.0)) << '\n'
        << "# emissivity=profiles.csv\n# emissivity_label=GRS\noptical_depth,temperature\n";
    double t = 285.0;
    for (int l = 0; l < 8; ++l) {
      out << csv::format(rng.uniform(0.01, 0.3)) << ',' << csv::format(t) << '\n';
      t -= rng.uniform(4.0, 9.0);
    }
  }
  nlohmann::json config = {
      {"profiles", "profiles.csv"}, {"landcover", "landcover.bin"},
      {"correspondence", "correspondence.json"}, {"constraints", "constraints.json"},
      {"camel", "camel.csv"}, {"ancillary", "ancillary.csv"}, {"grid", "grid.csv"},
      {"reference", "reference.csv"}, {"column", "column.csv"},
      {"snow_threshold", cfg.snow_threshold}, {"fov_radius_km", cfg.fov_radius_km},
      {"channel_threshold", cfg.channel_threshold}, {"coincidence_tol", cfg.coincidence_tol},
      {"seed", cfg.seed},
      {"rte", {{"wavenumber_start", cfg.rte_start}, {"wavenumber_step", cfg.rte_step},
               {"wavenumber_count", cfg.rte_count}}},
      {"synth", {{"scene", synth::to_json(cfg.scene_spec)}}}};
  std::ofstream(cfg.output("config.json")) << config.dump(2) << '\n';
}

} // namespace emiprior
