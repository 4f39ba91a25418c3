// rte.hpp - Clear-sky layered radiative transfer at nadir
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "profiles.hpp"

namespace emiprior::rte {

/// First radiation constant 2hc^2 in W m-2 sr-1 (cm-1)-4.
inline constexpr double kC1 = 1.191042972e-8;
/// Second radiation constant hc/k in K cm.
inline constexpr double kC2 = 1.438776877;

/// Planck spectral radiance in W m-2 sr-1 (cm-1)-1 for a wavenumber in cm-1.
inline double planck(double wavenumber, double temperature) {
  if (!(wavenumber > 0.0)) throw InvariantError("Planck wavenumber must be positive");
  if (!(temperature > 0.0)) throw InvariantError("Planck temperature must be positive");
  const double x = kC2 * wavenumber / temperature;
  return kC1 * wavenumber * wavenumber * wavenumber / std::expm1(x);
}

/// Homogeneous layer: I = I0 exp(-tau) + B(T) (1 - exp(-tau)).
inline double layer_step(double i0, double tau, double temperature, double wavenumber) {
  if (!(tau >= 0.0)) throw InvariantError("optical depth must be nonnegative");
  if (std::isinf(tau)) return planck(wavenumber, temperature);
  return i0 * std::exp(-tau) - planck(wavenumber, temperature) * std::expm1(-tau);
}

struct Layer {
  double optical_depth = 0.0;  // tau, dimensionless
  double temperature = 0.0;    // K
};

/// Layers are ordered bottom (surface) to top. The surface emissivity is
/// either a scalar or a spectral profile interpolated at the wavenumber.
/// Optical depths are taken as given at every wavenumber.
struct AtmosphericColumn {
  std::vector<Layer> layers;
  double surface_temperature = 0.0;  // K
  std::variant<double, EmissivityProfile> emissivity = 1.0;

  void validate() const {
    for (const auto& l : layers) {
      if (!(l.optical_depth >= 0.0)) throw InvariantError("optical depth must be nonnegative");
      if (!(l.temperature > 0.0)) throw InvariantError("layer temperature must be positive");
    }
    if (!(surface_temperature > 0.0)) throw InvariantError("surface temperature must be positive");
  }

  double emissivity_at(double wavenumber) const {
    const double e = std::holds_alternative<double>(emissivity)
                         ? std::get<double>(emissivity)
                         : std::get<EmissivityProfile>(emissivity).at(wavenumber);
    if (!(e >= 0.0 && e <= 1.0)) throw InvariantError("surface emissivity outside [0, 1]");
    return e;
  }
};

namespace detail {

/// The pieces of the column solution that do not depend on emissivity:
/// total transmittance, downwelling radiance at the surface and upwelling
/// atmospheric emission at the top.
struct ColumnTerms {
  double transmittance = 1.0;
  double downwelling = 0.0;
  double upwelling = 0.0;
  double surface_planck = 0.0;
};

inline ColumnTerms column_terms(const AtmosphericColumn& col, double wavenumber) {
  col.validate();
  const std::size_t n = col.layers.size();
  ColumnTerms t;
  t.surface_planck = planck(wavenumber, col.surface_temperature);
  // above[i] = sum of tau_j for j > i, accumulated from the top.
  std::vector<double> above(n, 0.0);
  for (std::size_t i = n; i-- > 1;) above[i - 1] = above[i] + col.layers[i].optical_depth;
  const double total = n ? above[0] + col.layers[0].optical_depth : 0.0;
  double below = 0.0;  // sum of tau_j for j < i
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = col.layers[i].optical_depth;
    const double emit = -planck(wavenumber, col.layers[i].temperature) * std::expm1(-tau);
    t.downwelling += emit * std::exp(-below);
    t.upwelling += emit * std::exp(-above[i]);
    below += tau;
  }
  t.transmittance = std::exp(-total);
  return t;
}

} // namespace detail

/// Top-of-atmosphere radiance:
///   [e B(T_E) + (1 - e) sum_i B(T_i)(1 - e^-tau_i) e^-sum_{j<i} tau_j] e^-sum tau
///   + sum_i B(T_i)(1 - e^-tau_i) e^-sum_{j>i} tau_j
inline double column_radiance(const AtmosphericColumn& col, double wavenumber) {
  const double e = col.emissivity_at(wavenumber);
  const auto t = detail::column_terms(col, wavenumber);
  return (e * t.surface_planck + (1.0 - e) * t.downwelling) * t.transmittance + t.upwelling;
}

/// dI/de, exact since the radiance is affine in the emissivity.
inline double emissivity_jacobian(const AtmosphericColumn& col, double wavenumber) {
  const auto t = detail::column_terms(col, wavenumber);
  return (t.surface_planck - t.downwelling) * t.transmittance;
}

inline std::vector<double> spectrum(const AtmosphericColumn& col, std::span<const double> wavenumbers) {
  std::vector<double> out;
  out.reserve(wavenumbers.size());
  for (double nu : wavenumbers) out.push_back(column_radiance(col, nu));
  return out;
}

/// Column CSV:
///
///   # surface_temperature=<K>
///   # emissivity=<scalar or path to a profile CSV>
///   optical_depth,temperature
///   <tau_1>,<T_1>          (bottom layer first)
///
/// A relative emissivity path is resolved against the column file's
/// directory; with several profiles in that file the first is used
/// unless `emissivity_label=<label>` is given.
inline AtmosphericColumn load_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  AtmosphericColumn col;
  std::string line, emis = "1", label;
  bool have_header = false, have_ts = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto v = csv::trim(line);
    if (v.empty()) continue;
    if (v.front() == '#') {
      v.remove_prefix(1);
      v = csv::trim(v);
      auto eq = v.find('=');
      if (eq == std::string_view::npos) continue;
      auto key = csv::trim(v.substr(0, eq));
      auto val = std::string(csv::trim(v.substr(eq + 1)));
      if (key == "surface_temperature") {
        col.surface_temperature = csv::parse_double(val, lineno);
        have_ts = true;
      } else if (key == "emissivity") emis = val;
      else if (key == "emissivity_label") label = val;
      continue;
    }
    auto f = csv::split(v);
    if (!have_header) {
      if (f != std::vector<std::string>{"optical_depth", "temperature"})
        throw ParseError("column header must be 'optical_depth,temperature'", lineno);
      have_header = true;
      continue;
    }
    if (f.size() != 2) throw ParseError("layer rows need 2 fields", lineno);
    Layer l{csv::parse_double(f[0], lineno), csv::parse_double(f[1], lineno)};
    if (!(l.optical_depth >= 0.0) || !(l.temperature > 0.0))
      throw ParseError("layer needs tau >= 0 and T > 0", lineno);
    col.layers.push_back(l);
  }
  if (!have_ts) throw ParseError("column file lacks '# surface_temperature=' in '" + path + "'");
  double scalar = 0.0;
  auto res = std::from_chars(emis.data(), emis.data() + emis.size(), scalar);
  if (res.ec == std::errc() && res.ptr == emis.data() + emis.size()) {
    col.emissivity = scalar;
  } else {
    std::string p = emis;
    if (!p.empty() && p.front() != '/') {
      auto slash = path.find_last_of('/');
      if (slash != std::string::npos) p = path.substr(0, slash + 1) + p;
    }
    auto set = load_profile_set(p);
    col.emissivity = label.empty() ? set[0] : set[set.index_of(label)];
  }
  if (std::holds_alternative<double>(col.emissivity) && !(scalar >= 0.0 && scalar <= 1.0))
    throw ParseError("surface emissivity outside [0, 1] in '" + path + "'");
  col.validate();
  return col;
}

inline void save_spectrum(std::span<const double> wavenumbers, std::span<const double> radiance,
                          const std::string& path) {
  auto out = csv::open_output(path);
  out << "wavenumber,radiance\n";
  for (std::size_t k = 0; k < wavenumbers.size(); ++k)
    out << csv::format(wavenumbers[k]) << ',' << csv::format(radiance[k]) << '\n';
}

} // namespace emiprior::rte
