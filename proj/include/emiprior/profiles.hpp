// profiles.hpp - Spectral emissivity profiles and their convex combinations
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "csv.hpp"
#include "error.hpp"

namespace emiprior {

/// Tolerance on the sum of simplex weights.
inline constexpr double kSimplexTolerance = 1e-12;

/// Strictly increasing list of positive wavenumbers in cm-1.
class WavenumberGrid {
public:
  WavenumberGrid() = default;

  explicit WavenumberGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvariantError("wavenumber grid is empty");
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!(values_[k] > 0.0) || !std::isfinite(values_[k]))
        throw InvariantError("wavenumber grid value must be positive and finite");
      if (k > 0 && !(values_[k] > values_[k - 1]))
        throw InvariantError("wavenumber grid must be strictly increasing");
    }
  }

  /// Grid start + step*k, k = 0..n-1; the reference profiles use
  /// uniform(50, 5, 321).
  static WavenumberGrid uniform(double start, double step, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = start + step * static_cast<double>(k);
    return WavenumberGrid(std::move(v));
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  bool contains(double nu) const { return nu >= values_.front() && nu <= values_.back(); }

  friend bool operator==(const WavenumberGrid&, const WavenumberGrid&) = default;

private:
  std::vector<double> values_;
};

/// Piecewise-linear interpolation of (x, y) at t. Exact at nodes; throws
/// RangeError outside [x.front(), x.back()].
inline double interpolate_linear(std::span<const double> x, std::span<const double> y, double t) {
  if (!(t >= x.front() && t <= x.back()))
    throw RangeError("wavenumber " + csv::format(t) + " outside ["
                     + csv::format(x.front()) + ", " + csv::format(x.back()) + "]");
  auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.end()) return y.back();
  std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  if (t == x[k]) return y[k];
  double f = (t - x[k]) / (x[k + 1] - x[k]);
  return y[k] + f * (y[k + 1] - y[k]);
}

/// Spectral emissivity on a wavenumber grid, labelled with the profile
/// acronym (DES, GRS, ...) or an output tag.
class EmissivityProfile {
public:
  EmissivityProfile() = default;

  EmissivityProfile(WavenumberGrid grid, std::vector<double> values, std::string label = {})
    : grid_(std::move(grid)), values_(std::move(values)), label_(std::move(label)) {
    if (values_.size() != grid_.size())
      throw AlignmentError("profile '" + label_ + "' has " + std::to_string(values_.size())
                           + " values for a grid of " + std::to_string(grid_.size()));
    for (double v : values_)
      if (!(v >= 0.0 && v <= 1.0))
        throw InvariantError("profile '" + label_ + "' has emissivity outside [0, 1]: "
                             + csv::format(v));
  }

  const WavenumberGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(double wavenumber) const {
    return interpolate_linear(grid_.values(), values_, wavenumber);
  }

  friend bool operator==(const EmissivityProfile&, const EmissivityProfile&) = default;

private:
  WavenumberGrid grid_;
  std::vector<double> values_;
  std::string label_;
};

/// Ordered set of reference profiles sharing one grid.
class ProfileSet {
public:
  ProfileSet() = default;

  explicit ProfileSet(std::vector<EmissivityProfile> profiles) : profiles_(std::move(profiles)) {
    if (profiles_.empty()) throw InvariantError("profile set is empty");
    std::unordered_set<std::string> seen;
    for (const auto& p : profiles_) {
      if (!(p.grid() == profiles_.front().grid()))
        throw AlignmentError("profile '" + p.label() + "' is on a different grid");
      if (!seen.insert(p.label()).second)
        throw InvariantError("duplicate profile label '" + p.label() + "'");
    }
  }

  std::size_t size() const noexcept { return profiles_.size(); }
  const EmissivityProfile& operator[](std::size_t i) const { return profiles_[i]; }
  const WavenumberGrid& grid() const { return profiles_.front().grid(); }
  auto begin() const { return profiles_.begin(); }
  auto end() const { return profiles_.end(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& p : profiles_) out.push_back(p.label());
    return out;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < profiles_.size(); ++i)
      if (profiles_[i].label() == label) return i;
    throw RangeError("unknown profile label '" + label + "'");
  }

  /// Values of every profile at `wavenumbers`, one row per wavenumber and
  /// one column per profile.
  std::vector<std::vector<double>> sample(std::span<const double> wavenumbers) const {
    std::vector<std::vector<double>> out(wavenumbers.size(), std::vector<double>(size()));
    for (std::size_t r = 0; r < wavenumbers.size(); ++r)
      for (std::size_t i = 0; i < size(); ++i) out[r][i] = profiles_[i].at(wavenumbers[r]);
    return out;
  }

private:
  std::vector<EmissivityProfile> profiles_;
};

/// Nonnegative weights summing to one, aligned with a ProfileSet.
class SimplexWeights {
public:
  SimplexWeights() = default;

  explicit SimplexWeights(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw InvariantError("simplex weights are empty");
    double sum = 0.0;
    for (double v : w_) {
      if (!(v >= 0.0)) throw InvariantError("negative simplex weight " + csv::format(v));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw InvariantError("simplex weights sum to " + csv::format(sum));
  }

  static SimplexWeights unit(std::size_t n, std::size_t i) {
    std::vector<double> w(n, 0.0);
    w.at(i) = 1.0;
    return SimplexWeights(std::move(w));
  }

  /// Explicit renormalization: clamps negatives to zero and divides by
  /// the sum. This is the only place weights are rescaled.
  static SimplexWeights normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double& v : w) {
      v = std::max(v, 0.0);
      sum += v;
    }
    if (!(sum > 0.0)) throw InvariantError("cannot normalize all-zero weights");
    for (double& v : w) v /= sum;
    return SimplexWeights(std::move(w));
  }

  std::span<const double> values() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }

  /// Indices with weight strictly above `threshold`.
  std::vector<std::size_t> support(double threshold = 0.0) const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > threshold) s.push_back(i);
    return s;
  }

  friend bool operator==(const SimplexWeights&, const SimplexWeights&) = default;

private:
  std::vector<double> w_;
};

inline std::vector<double> interpolate_profile(const EmissivityProfile& profile,
                                               std::span<const double> targets) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (double t : targets) out.push_back(profile.at(t));
  return out;
}

inline std::vector<double> interpolate_profile(const EmissivityProfile& profile,
                                               const WavenumberGrid& targets) {
  return interpolate_profile(profile, targets.values());
}

/// Sum_i w_i H_i(nu_k) at every grid point. The result is clamped into
/// [min_i H_i, max_i H_i] pointwise, which only touches rounding noise.
inline EmissivityProfile convex_combination(const ProfileSet& set, const SimplexWeights& w,
                                            std::string label = "combination") {
  if (w.size() != set.size())
    throw AlignmentError("weights of length " + std::to_string(w.size())
                         + " for a set of " + std::to_string(set.size()) + " profiles");
  const std::size_t n = set.grid().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0, lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      double h = set[i].values()[k];
      acc += w[i] * h;
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    out[k] = std::clamp(acc, lo, hi);
  }
  return EmissivityProfile(set.grid(), std::move(out), std::move(label));
}

/// Profile-set CSV: header `wavenumber,<label1>,...`, one row per
/// wavenumber. Errors carry the 1-based file line.
inline ProfileSet load_profile_set(const std::string& path) {
  auto table = csv::read(path);
  if (table.header.size() < 2 || table.header.front() != "wavenumber")
    throw ParseError("profile file '" + path + "' must start with 'wavenumber,<label>...'", 1);
  const std::size_t np = table.header.size() - 1;
  std::vector<double> nu;
  std::vector<std::vector<double>> cols(np);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    double v = csv::parse_double(row[0], line);
    if (!(v > 0.0)) throw ParseError("wavenumber must be positive", line);
    if (!nu.empty() && !(v > nu.back()))
      throw ParseError("wavenumbers must be strictly increasing", line);
    nu.push_back(v);
    for (std::size_t i = 0; i < np; ++i) {
      double e = csv::parse_double(row[i + 1], line);
      if (!(e >= 0.0 && e <= 1.0))
        throw ParseError("emissivity " + std::string(row[i + 1]) + " outside [0, 1]", line);
      cols[i].push_back(e);
    }
  }
  if (nu.empty()) throw ParseError("profile file '" + path + "' has no data rows");
  WavenumberGrid grid(std::move(nu));
  std::vector<EmissivityProfile> profiles;
  for (std::size_t i = 0; i < np; ++i)
    profiles.emplace_back(grid, std::move(cols[i]), table.header[i + 1]);
  return ProfileSet(std::move(profiles));
}

inline void save_profile_set(const ProfileSet& set, const std::string& path) {
  auto out = csv::open_output(path);
  out << "wavenumber";
  for (const auto& p : set) out << ',' << p.label();
  out << '\n';
  for (std::size_t k = 0; k < set.grid().size(); ++k) {
    out << csv::format(set.grid()[k]);
    for (const auto& p : set) out << ',' << csv::format(p.values()[k]);
    out << '\n';
  }
}

inline void save_profile(const EmissivityProfile& profile, const std::string& path) {
  save_profile_set(ProfileSet({profile}), path);
}

} // namespace emiprior
