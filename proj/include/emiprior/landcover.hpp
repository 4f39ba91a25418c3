// landcover.hpp - A-priori profile weights from a 17-class land-cover map
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "profiles.hpp"

namespace emiprior {

inline constexpr std::size_t kLandCoverClasses = 17;
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultFovRadiusKm = 7.5;

struct GridPoint {
  double lat = 0.0;  // [-90, 90]
  double lon = 0.0;  // [-180, 180)

  void validate() const {
    if (!(lat >= -90.0 && lat <= 90.0)) throw InvariantError("latitude outside [-90, 90]");
    if (!(lon >= -180.0 && lon < 180.0)) throw InvariantError("longitude outside [-180, 180)");
  }
};

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double s1 = std::sin(0.5 * (lat2 - lat1) * deg);
  const double s2 = std::sin(0.5 * (lon2 - lon1) * deg);
  const double h = s1 * s1 + std::cos(lat1 * deg) * std::cos(lat2 * deg) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Regular lat/lon raster of land-cover class ids (1..17). Cell (r, c) is
/// centred at (lat0 + r*step, lon0 + c*step); storage is row-major.
class LandCoverGrid {
public:
  LandCoverGrid() = default;

  LandCoverGrid(double lat0, double lon0, double step, std::size_t nrows, std::size_t ncols,
                std::vector<std::uint8_t> classes)
    : lat0_(lat0), lon0_(lon0), step_(step), nrows_(nrows), ncols_(ncols),
      classes_(std::move(classes)) {
    if (!(step_ > 0.0)) throw InvariantError("land-cover step must be positive");
    if (classes_.size() != nrows_ * ncols_)
      throw AlignmentError("land-cover raster has " + std::to_string(classes_.size())
                           + " cells, expected " + std::to_string(nrows_ * ncols_));
    for (auto c : classes_)
      if (c < 1 || c > kLandCoverClasses)
        throw InvariantError("land-cover class " + std::to_string(c) + " outside 1..17");
  }

  double lat0() const noexcept { return lat0_; }
  double lon0() const noexcept { return lon0_; }
  double step() const noexcept { return step_; }
  std::size_t rows() const noexcept { return nrows_; }
  std::size_t cols() const noexcept { return ncols_; }
  double cell_lat(std::size_t r) const { return lat0_ + step_ * static_cast<double>(r); }
  double cell_lon(std::size_t c) const { return lon0_ + step_ * static_cast<double>(c); }
  int cls(std::size_t r, std::size_t c) const { return classes_[r * ncols_ + c]; }
  std::span<const std::uint8_t> classes() const noexcept { return classes_; }

private:
  double lat0_ = 0.0, lon0_ = 0.0, step_ = 1.0;
  std::size_t nrows_ = 0, ncols_ = 0;
  std::vector<std::uint8_t> classes_;
};

namespace detail {
inline constexpr char kLandCoverMagic[8] = {'E', 'M', 'I', 'L', 'C', 'V', '1', '\0'};

template <typename T> void write_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T> T read_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw ParseError("truncated land-cover header");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
} // namespace detail

/// Binary raster: 8-byte magic "EMILCV1\0", little-endian float64 lat0,
/// lon0, step, uint32 nrows, ncols, then nrows*ncols class bytes.
inline void save_land_cover_binary(const LandCoverGrid& g, const std::string& path) {
  auto out = csv::open_output(path);
  out.write(detail::kLandCoverMagic, 8);
  detail::write_le(out, g.lat0());
  detail::write_le(out, g.lon0());
  detail::write_le(out, g.step());
  detail::write_le(out, static_cast<std::uint32_t>(g.rows()));
  detail::write_le(out, static_cast<std::uint32_t>(g.cols()));
  out.write(reinterpret_cast<const char*>(g.classes().data()),
            static_cast<std::streamsize>(g.classes().size()));
}

inline LandCoverGrid load_land_cover_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, detail::kLandCoverMagic, 8) != 0)
    throw ParseError("'" + path + "' is not a land-cover raster");
  const double lat0 = detail::read_le<double>(in), lon0 = detail::read_le<double>(in),
               step = detail::read_le<double>(in);
  const std::size_t nrows = detail::read_le<std::uint32_t>(in),
                    ncols = detail::read_le<std::uint32_t>(in);
  std::vector<std::uint8_t> cls(nrows * ncols);
  if (!in.read(reinterpret_cast<char*>(cls.data()), static_cast<std::streamsize>(cls.size())))
    throw ParseError("'" + path + "' has fewer class bytes than its header declares");
  try {
    return LandCoverGrid(lat0, lon0, step, nrows, ncols, std::move(cls));
  } catch (const Error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

/// CSV raster: header `lat0,lon0,step,nrows,ncols`, one line with those
/// values, then nrows lines of ncols class ids.
inline void save_land_cover_csv(const LandCoverGrid& g, const std::string& path) {
  auto out = csv::open_output(path);
  out << "lat0,lon0,step,nrows,ncols\n"
      << csv::format(g.lat0()) << ',' << csv::format(g.lon0()) << ',' << csv::format(g.step())
      << ',' << g.rows() << ',' << g.cols() << '\n';
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) out << (c ? "," : "") << g.cls(r, c);
    out << '\n';
  }
}

inline LandCoverGrid load_land_cover_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      auto v = csv::trim(line);
      if (!v.empty() && v.front() != '#') return true;
    }
    return false;
  };
  if (!next() || csv::split(line) != std::vector<std::string>{"lat0", "lon0", "step", "nrows", "ncols"})
    throw ParseError("land-cover CSV must start with 'lat0,lon0,step,nrows,ncols'", lineno);
  if (!next()) throw ParseError("land-cover CSV header values missing", lineno);
  auto h = csv::split(line);
  if (h.size() != 5) throw ParseError("land-cover CSV header needs 5 values", lineno);
  const double lat0 = csv::parse_double(h[0], lineno), lon0 = csv::parse_double(h[1], lineno),
               step = csv::parse_double(h[2], lineno);
  const long long nr = csv::parse_int(h[3], lineno), nc = csv::parse_int(h[4], lineno);
  if (nr < 0 || nc < 0) throw ParseError("negative raster dimensions", lineno);
  std::vector<std::uint8_t> cls;
  cls.reserve(static_cast<std::size_t>(nr * nc));
  for (long long r = 0; r < nr; ++r) {
    if (!next()) throw ParseError("land-cover CSV has fewer rows than declared", lineno);
    auto f = csv::split(line);
    if (static_cast<long long>(f.size()) != nc)
      throw ParseError("land-cover row has " + std::to_string(f.size()) + " cells", lineno);
    for (const auto& s : f) {
      long long v = csv::parse_int(s, lineno);
      if (v < 1 || v > static_cast<long long>(kLandCoverClasses))
        throw ParseError("land-cover class " + s + " outside 1..17", lineno);
      cls.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return LandCoverGrid(lat0, lon0, step, static_cast<std::size_t>(nr),
                       static_cast<std::size_t>(nc), std::move(cls));
}

/// Picks the format from the extension: `.csv` is text, anything else binary.
inline LandCoverGrid load_land_cover(const std::string& path) {
  return detail::ends_with(path, ".csv") ? load_land_cover_csv(path) : load_land_cover_binary(path);
}

inline void save_land_cover(const LandCoverGrid& g, const std::string& path) {
  if (detail::ends_with(path, ".csv")) save_land_cover_csv(g, path);
  else save_land_cover_binary(g, path);
}

/// Fractions t_l of each land-cover class in a footprint; index 0 is class 1.
class ClassFractions {
public:
  ClassFractions() { t_.fill(0.0); }

  explicit ClassFractions(const std::array<double, kLandCoverClasses>& t) : t_(t) {
    double sum = 0.0;
    for (double v : t_) {
      if (!(v >= 0.0)) throw InvariantError("negative class fraction");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw InvariantError("class fractions sum to " + csv::format(sum));
  }

  /// All weight on land-cover class `cls` (1-based).
  static ClassFractions unit(int cls) {
    std::array<double, kLandCoverClasses> t{};
    t.at(static_cast<std::size_t>(cls - 1)) = 1.0;
    return ClassFractions(t);
  }

  double operator[](std::size_t l) const { return t_[l]; }
  const std::array<double, kLandCoverClasses>& values() const noexcept { return t_; }

private:
  std::array<double, kLandCoverClasses> t_;
};

/// Class fractions over the cells whose centres lie within `radius_km`
/// great-circle distance of `center`.
inline ClassFractions fov_fractions(const LandCoverGrid& map, const GridPoint& center,
                                    double radius_km = kDefaultFovRadiusKm) {
  center.validate();
  if (!(radius_km > 0.0)) throw InvariantError("field-of-view radius must be positive");
  constexpr double deg = 180.0 / std::numbers::pi;
  const double ang = radius_km / kEarthRadiusKm;  // radians
  const double dlat = ang * deg;
  const double margin = 1e-9;

  std::array<std::size_t, kLandCoverClasses> counts{};
  std::size_t total = 0;
  auto visit = [&](std::size_t r, std::size_t c) {
    if (haversine_km(center.lat, center.lon, map.cell_lat(r), map.cell_lon(c)) <= radius_km) {
      ++counts[static_cast<std::size_t>(map.cls(r, c) - 1)];
      ++total;
    }
  };
  auto index_range = [&](double lo, double hi, double origin, std::size_t n) {
    double a = std::ceil((lo - origin) / map.step() - margin);
    double b = std::floor((hi - origin) / map.step() + margin);
    long long ia = std::max<long long>(0, static_cast<long long>(a));
    long long ib = std::min<long long>(static_cast<long long>(n) - 1, static_cast<long long>(b));
    return std::pair<long long, long long>{ia, ib};
  };

  auto [r0, r1] = index_range(center.lat - dlat, center.lat + dlat, map.lat0(), map.rows());
  const double coslat = std::cos(center.lat / deg);
  const bool all_lon = std::abs(center.lat) + dlat >= 90.0 || std::sin(ang) >= coslat;
  const double dlon = all_lon ? 180.0 : std::asin(std::sin(ang) / coslat) * deg;

  for (long long r = r0; r <= r1; ++r) {
    if (all_lon) {
      for (std::size_t c = 0; c < map.cols(); ++c) visit(static_cast<std::size_t>(r), c);
      continue;
    }
    // The window may cross the dateline; the map itself is not assumed to wrap.
    for (int k = -1; k <= 1; ++k) {
      const double shift = 360.0 * k;
      auto [c0, c1] = index_range(center.lon - dlon + shift, center.lon + dlon + shift,
                                  map.lon0(), map.cols());
      for (long long c = c0; c <= c1; ++c) visit(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  if (total == 0) throw EmptyFootprintError("no land-cover cells within the field of view");
  std::array<double, kLandCoverClasses> t{};
  for (std::size_t l = 0; l < kLandCoverClasses; ++l)
    t[l] = static_cast<double>(counts[l]) / static_cast<double>(total);
  return ClassFractions(t);
}

/// Row-stochastic 17 x NP correspondence between land-cover classes and
/// reference profiles. Shipped as data/correspondence.json.
class CorrespondenceMatrix {
public:
  CorrespondenceMatrix() = default;

  CorrespondenceMatrix(std::vector<std::string> labels, std::vector<std::vector<double>> rows)
    : labels_(std::move(labels)), m_(std::move(rows)) {
    if (m_.size() != kLandCoverClasses)
      throw InvariantError("correspondence matrix needs 17 rows");
    for (std::size_t l = 0; l < m_.size(); ++l) {
      if (m_[l].size() != labels_.size())
        throw AlignmentError("correspondence row " + std::to_string(l + 1) + " has "
                             + std::to_string(m_[l].size()) + " entries");
      double sum = 0.0;
      for (double v : m_[l]) {
        if (!(v >= 0.0)) throw InvariantError("negative correspondence entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kSimplexTolerance)
        throw InvariantError("correspondence row " + std::to_string(l + 1) + " sums to "
                             + csv::format(sum));
    }
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t profiles() const noexcept { return labels_.size(); }
  double operator()(std::size_t l, std::size_t i) const { return m_[l][i]; }
  const std::vector<double>& row(std::size_t l) const { return m_[l]; }

  void check_aligned(const ProfileSet& set) const {
    if (set.labels() != labels_)
      throw AlignmentError("correspondence columns do not match the profile set labels");
  }

private:
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> m_;
};

inline CorrespondenceMatrix correspondence_from_json(const nlohmann::json& j) {
  try {
    auto labels = j.at("columns").get<std::vector<std::string>>();
    std::vector<std::vector<double>> rows(kLandCoverClasses);
    std::vector<bool> seen(kLandCoverClasses, false);
    for (const auto& r : j.at("rows")) {
      int cls = r.at("class").get<int>();
      if (cls < 1 || cls > static_cast<int>(kLandCoverClasses) || seen[cls - 1])
        throw ParseError("correspondence class " + std::to_string(cls) + " invalid or repeated");
      seen[cls - 1] = true;
      rows[cls - 1] = r.at("weights").get<std::vector<double>>();
    }
    for (std::size_t l = 0; l < kLandCoverClasses; ++l)
      if (!seen[l]) throw ParseError("correspondence class " + std::to_string(l + 1) + " missing");
    return CorrespondenceMatrix(std::move(labels), std::move(rows));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("correspondence matrix: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("correspondence matrix: ") + e.what());
  }
}

inline CorrespondenceMatrix load_correspondence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return correspondence_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

inline nlohmann::json to_json(const CorrespondenceMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t l = 0; l < kLandCoverClasses; ++l)
    rows.push_back({{"class", l + 1}, {"weights", m.row(l)}});
  return {{"version", 1}, {"columns", m.labels()}, {"rows", rows}};
}

/// a_i = sum_l t_l m_li.
inline SimplexWeights apriori_weights(const ClassFractions& t, const CorrespondenceMatrix& m) {
  std::vector<double> a(m.profiles(), 0.0);
  for (std::size_t l = 0; l < kLandCoverClasses; ++l) {
    if (t[l] == 0.0) continue;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += t[l] * m(l, i);
  }
  return SimplexWeights(std::move(a));
}

inline EmissivityProfile apriori_profile(const SimplexWeights& a, const ProfileSet& set) {
  return convex_combination(set, a, "apriori");
}

} // namespace emiprior
