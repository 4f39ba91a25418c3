// ancillary.hpp - Profile selection from ancillary constraints and hinge-point RMS
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "profiles.hpp"

namespace emiprior {

enum class Surface { land, water, any };

inline Surface parse_surface(const std::string& s, std::size_t row = 0) {
  if (s == "land") return Surface::land;
  if (s == "water") return Surface::water;
  if (s == "any") return Surface::any;
  throw ParseError("unknown surface '" + s + "'", row);
}

inline const char* to_string(Surface s) {
  switch (s) {
  case Surface::land: return "land";
  case Surface::water: return "water";
  default: return "any";
  }
}

/// Monthly ancillary data at one grid point. Snow fraction and soil
/// humidity are only defined over land; over water they may be NaN.
struct AncillaryRecord {
  double snow_fraction = 0.0;     // [0, 1]
  double skin_temperature = 0.0;  // deg C
  double soil_humidity = 0.0;     // percent, [0, 100]
  Surface surface = Surface::land;

  void validate() const {
    if (surface == Surface::any) throw InvariantError("ancillary surface must be land or water");
    if (!std::isfinite(skin_temperature)) throw InvariantError("skin temperature is not finite");
    if (surface == Surface::land) {
      if (!(snow_fraction >= 0.0 && snow_fraction <= 1.0))
        throw InvariantError("snow fraction outside [0, 1]");
      if (!(soil_humidity >= 0.0 && soil_humidity <= 100.0))
        throw InvariantError("soil humidity outside [0, 100]");
    }
  }
};

/// Closed interval with optional ends; an absent end is unbounded.
struct Interval {
  std::optional<double> min;
  std::optional<double> max;

  bool contains(double x) const {
    return (!min || x >= *min) && (!max || x <= *max);
  }
};

struct ConstraintRule {
  std::string label;
  Surface surface = Surface::land;
  bool snow_required = false;
  Interval temperature;
  Interval humidity;
};

/// One rule per profile label. Shipped as data/constraints.json.
struct ConstraintTable {
  int version = 1;
  std::vector<ConstraintRule> rules;

  const ConstraintRule& rule(const std::string& label) const {
    for (const auto& r : rules)
      if (r.label == label) return r;
    throw AlignmentError("no constraint rule for label '" + label + "'");
  }

  /// Every label of `set` has exactly one rule and vice versa.
  void check_aligned(const ProfileSet& set) const {
    if (rules.size() != set.size())
      throw AlignmentError("constraint table has " + std::to_string(rules.size())
                           + " rules for " + std::to_string(set.size()) + " profiles");
    for (const auto& p : set) {
      int n = 0;
      for (const auto& r : rules) n += r.label == p.label();
      if (n != 1) throw AlignmentError("label '" + p.label() + "' needs exactly one rule");
    }
  }
};

namespace detail {
inline Interval interval_from_json(const nlohmann::json& j, const char* key) {
  Interval iv;
  if (!j.contains(key) || j[key].is_null()) return iv;
  const auto& r = j[key];
  if (!r.is_array() || r.size() != 2) throw ParseError(std::string(key) + " must be [min, max]");
  if (!r[0].is_null()) iv.min = r[0].get<double>();
  if (!r[1].is_null()) iv.max = r[1].get<double>();
  return iv;
}

inline nlohmann::json interval_to_json(const Interval& iv) {
  if (!iv.min && !iv.max) return nullptr;
  nlohmann::json j = nlohmann::json::array();
  j.push_back(iv.min ? nlohmann::json(*iv.min) : nlohmann::json(nullptr));
  j.push_back(iv.max ? nlohmann::json(*iv.max) : nlohmann::json(nullptr));
  return j;
}
} // namespace detail

inline ConstraintTable constraint_table_from_json(const nlohmann::json& j) {
  ConstraintTable t;
  try {
    t.version = j.at("version").get<int>();
    for (const auto& r : j.at("rules")) {
      ConstraintRule rule;
      rule.label = r.at("label").get<std::string>();
      rule.surface = parse_surface(r.value("surface", std::string("land")));
      rule.snow_required = r.at("snow_required").get<bool>();
      rule.temperature = detail::interval_from_json(r, "temperature_c");
      rule.humidity = detail::interval_from_json(r, "humidity_pct");
      t.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("constraint table: ") + e.what());
  }
  return t;
}

inline nlohmann::json to_json(const ConstraintTable& t) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : t.rules)
    rules.push_back({{"label", r.label},
                     {"surface", to_string(r.surface)},
                     {"snow_required", r.snow_required},
                     {"temperature_c", detail::interval_to_json(r.temperature)},
                     {"humidity_pct", detail::interval_to_json(r.humidity)}});
  return {{"version", t.version}, {"rules", rules}};
}

inline ConstraintTable load_constraint_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return constraint_table_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

/// Geolocated hinge-point emissivities (CAMEL/MODIS style). Only present
/// channels are stored; missing channels are dropped at read time.
struct HingeRecord {
  std::vector<double> wavenumbers;
  std::vector<double> emissivities;
  double lat = 0.0;
  double lon = 0.0;
  int month = 0;  // 1..12, 0 when not applicable

  void validate() const {
    if (wavenumbers.size() != emissivities.size())
      throw AlignmentError("hinge record has mismatched channel and value counts");
    for (std::size_t k = 1; k < wavenumbers.size(); ++k)
      if (!(wavenumbers[k] > wavenumbers[k - 1]))
        throw InvariantError("hinge wavenumbers must be strictly increasing");
    for (double e : emissivities)
      if (!(e >= 0.0 && e <= 1.0)) throw InvariantError("hinge emissivity outside [0, 1]");
    if (month < 0 || month > 12) throw InvariantError("month outside 1..12");
  }
};

/// Hinge CSV: `lat,lon[,month],<wavenumber1>,<wavenumber2>,...`; an empty
/// or `nan` cell marks a missing channel.
inline std::vector<HingeRecord> load_hinge_records(const std::string& path) {
  auto table = csv::read(path);
  const std::size_t ilat = table.column("lat"), ilon = table.column("lon");
  std::optional<std::size_t> imonth;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == "month") imonth = i;
  std::vector<std::size_t> chan_cols;
  std::vector<double> channels;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i == ilat || i == ilon || (imonth && i == *imonth)) continue;
    chan_cols.push_back(i);
    channels.push_back(csv::parse_double(table.header[i], 1));
  }
  for (std::size_t k = 1; k < channels.size(); ++k)
    if (!(channels[k] > channels[k - 1]))
      throw ParseError("channel columns must be strictly increasing wavenumbers", 1);

  std::vector<HingeRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    HingeRecord h;
    h.lat = csv::parse_double(row[ilat], line);
    h.lon = csv::parse_double(row[ilon], line);
    if (imonth) h.month = static_cast<int>(csv::parse_int(row[*imonth], line));
    for (std::size_t c = 0; c < chan_cols.size(); ++c) {
      const auto& cell = row[chan_cols[c]];
      if (cell.empty() || cell == "nan" || cell == "NaN") continue;
      h.wavenumbers.push_back(channels[c]);
      h.emissivities.push_back(csv::parse_double(cell, line));
    }
    try {
      h.validate();
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    }
    out.push_back(std::move(h));
  }
  return out;
}

/// Writes records sharing the channel list `channels`; values absent from
/// a record are written as empty cells.
inline void save_hinge_records(const std::vector<HingeRecord>& records,
                               std::span<const double> channels, const std::string& path,
                               bool with_month = true) {
  auto out = csv::open_output(path);
  out << "lat,lon";
  if (with_month) out << ",month";
  for (double c : channels) out << ',' << csv::format(c);
  out << '\n';
  for (const auto& h : records) {
    out << csv::format(h.lat) << ',' << csv::format(h.lon);
    if (with_month) out << ',' << h.month;
    std::size_t j = 0;
    for (double c : channels) {
      out << ',';
      while (j < h.wavenumbers.size() && h.wavenumbers[j] < c) ++j;
      if (j < h.wavenumbers.size() && h.wavenumbers[j] == c) out << csv::format(h.emissivities[j]);
    }
    out << '\n';
  }
}

struct GeoAncillary {
  double lat = 0.0;
  double lon = 0.0;
  AncillaryRecord record;
};

/// Ancillary CSV: `lat,lon,surface,snow_fraction,skin_temperature,soil_humidity`.
/// Snow and humidity may be empty over water.
inline std::vector<GeoAncillary> load_ancillary_records(const std::string& path) {
  auto table = csv::read(path);
  const std::size_t ilat = table.column("lat"), ilon = table.column("lon"),
                    isurf = table.column("surface"), isnow = table.column("snow_fraction"),
                    itemp = table.column("skin_temperature"), ihum = table.column("soil_humidity");
  auto optional_number = [](const std::string& s, std::size_t line) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : csv::parse_double(s, line);
  };
  std::vector<GeoAncillary> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    GeoAncillary g;
    g.lat = csv::parse_double(row[ilat], line);
    g.lon = csv::parse_double(row[ilon], line);
    g.record.surface = parse_surface(row[isurf], line);
    g.record.snow_fraction = optional_number(row[isnow], line);
    g.record.skin_temperature = csv::parse_double(row[itemp], line);
    g.record.soil_humidity = optional_number(row[ihum], line);
    try {
      g.record.validate();
    } catch (const Error& e) {
      throw ParseError(e.what(), line);
    }
    out.push_back(g);
  }
  return out;
}

inline void save_ancillary_records(const std::vector<GeoAncillary>& recs, const std::string& path) {
  auto out = csv::open_output(path);
  out << "lat,lon,surface,snow_fraction,skin_temperature,soil_humidity\n";
  auto opt = [](double v) { return std::isnan(v) ? std::string() : csv::format(v); };
  for (const auto& g : recs)
    out << csv::format(g.lat) << ',' << csv::format(g.lon) << ',' << to_string(g.record.surface)
        << ',' << opt(g.record.snow_fraction) << ',' << csv::format(g.record.skin_temperature)
        << ',' << opt(g.record.soil_humidity) << '\n';
}

inline constexpr double kDefaultSnowThreshold = 0.5;

/// Labels whose rule admits `rec`, in table order. Over land the snow flag
/// (fraction strictly above threshold) must match and temperature and
/// humidity must fall in the rule's closed ranges; over water only
/// temperature is checked, on rules not restricted to land.
inline std::vector<std::string> admissible_labels(const AncillaryRecord& rec,
                                                  const ConstraintTable& table,
                                                  double snow_threshold = kDefaultSnowThreshold) {
  rec.validate();
  if (!(snow_threshold >= 0.0 && snow_threshold <= 1.0))
    throw InvariantError("snow threshold outside [0, 1]");
  std::vector<std::string> out;
  for (const auto& rule : table.rules) {
    bool ok;
    if (rec.surface == Surface::water) {
      ok = rule.surface != Surface::land && rule.temperature.contains(rec.skin_temperature);
    } else {
      const bool snow = rec.snow_fraction > snow_threshold;
      ok = rule.surface != Surface::water && rule.snow_required == snow
           && rule.temperature.contains(rec.skin_temperature)
           && rule.humidity.contains(rec.soil_humidity);
    }
    if (ok) out.push_back(rule.label);
  }
  return out;
}

inline double rms_to_hinges(const EmissivityProfile& profile, const HingeRecord& hinge) {
  if (hinge.wavenumbers.empty()) throw InsufficientDataError("hinge record has no channels");
  double acc = 0.0;
  for (std::size_t k = 0; k < hinge.wavenumbers.size(); ++k) {
    double d = profile.at(hinge.wavenumbers[k]) - hinge.emissivities[k];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(hinge.wavenumbers.size()));
}

struct Selection {
  std::string label;
  std::size_t index = 0;
  double rms = std::numeric_limits<double>::quiet_NaN();  // NaN without hinge data
};

/// Minimum-RMS admissible profile; without hinge data (e.g. over water)
/// the first admissible label in set order. Ties go to the lower index.
inline Selection select_profile(const AncillaryRecord& rec, const HingeRecord* hinge,
                                const ProfileSet& set, const ConstraintTable& table,
                                double snow_threshold = kDefaultSnowThreshold) {
  table.check_aligned(set);
  auto labels = admissible_labels(rec, table, snow_threshold);
  if (labels.empty()) throw NoSelectionError("no admissible profile for ancillary record");
  std::vector<std::size_t> idx;
  for (const auto& l : labels) idx.push_back(set.index_of(l));
  std::sort(idx.begin(), idx.end());

  Selection best;
  if (!hinge || hinge->wavenumbers.empty()) {
    best.index = idx.front();
    best.label = set[best.index].label();
    return best;
  }
  best.rms = std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) {
    double r = rms_to_hinges(set[i], *hinge);
    if (r < best.rms) {
      best.rms = r;
      best.index = i;
    }
  }
  best.label = set[best.index].label();
  return best;
}

inline Selection select_profile(const AncillaryRecord& rec, const std::optional<HingeRecord>& hinge,
                                const ProfileSet& set, const ConstraintTable& table,
                                double snow_threshold = kDefaultSnowThreshold) {
  return select_profile(rec, hinge ? &*hinge : nullptr, set, table, snow_threshold);
}

} // namespace emiprior
