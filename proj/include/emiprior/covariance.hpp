// covariance.hpp - Variance-covariance matrices and greedy super-channel reduction
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "log.hpp"
#include "profiles.hpp"

namespace emiprior {

/// Channels whose variance is below this are dropped before reduction.
inline constexpr double kZeroVariance = 1e-15;

struct ChannelSelection;

/// Symmetric positive-semidefinite matrix labelled by channel wavenumbers.
class CovarianceMatrix {
public:
  CovarianceMatrix() = default;

  CovarianceMatrix(std::vector<double> channels, Eigen::MatrixXd s)
    : channels_(std::move(channels)), s_(std::move(s)) {
    validate();
  }

  const std::vector<double>& channels() const noexcept { return channels_; }
  const Eigen::MatrixXd& matrix() const noexcept { return s_; }
  Eigen::Index size() const noexcept { return s_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return s_(i, j); }

  /// Correlation matrix; entries involving a zero-variance channel are 0
  /// off the diagonal and 1 on it.
  Eigen::MatrixXd correlation() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = std::sqrt(s_(i, i) * s_(j, j));
        r(i, j) = i == j ? 1.0 : (d > 0.0 ? s_(i, j) / d : 0.0);
      }
    return r;
  }

  /// Smallest eigenvalue; PSD means this is >= -1e-10 * trace.
  double min_eigenvalue() const {
    if (size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

private:
  struct Unchecked {};
  CovarianceMatrix(Unchecked, std::vector<double> channels, Eigen::MatrixXd s)
    : channels_(std::move(channels)), s_(std::move(s)) {}
  friend CovarianceMatrix restrict(const CovarianceMatrix&, const ChannelSelection&);

  void validate() const {
    if (s_.rows() != s_.cols()) throw InvariantError("covariance matrix is not square");
    if (static_cast<Eigen::Index>(channels_.size()) != s_.rows())
      throw AlignmentError("covariance matrix has " + std::to_string(s_.rows())
                           + " rows for " + std::to_string(channels_.size()) + " channels");
    if (!s_.allFinite()) throw InvariantError("covariance matrix has non-finite entries");
    const double scale = s_.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < s_.rows(); ++i) {
      if (s_(i, i) < 0.0) throw InvariantError("negative variance on the diagonal");
      for (Eigen::Index j = 0; j < i; ++j)
        if (std::abs(s_(i, j) - s_(j, i)) > 1e-12 * scale)
          throw InvariantError("covariance matrix is not symmetric");
    }
    if (size() > 0 && min_eigenvalue() < -1e-10 * s_.trace())
      throw InvariantError("covariance matrix is not positive semidefinite");
  }

  std::vector<double> channels_;
  Eigen::MatrixXd s_;
};

/// Population (1/N) covariance of equal-length sample vectors. `channels`
/// labels the components; empty means 0..n-1.
inline CovarianceMatrix sample_vcm(const std::vector<std::vector<double>>& samples,
                                   std::vector<double> channels = {}) {
  if (samples.size() < 2) throw InsufficientDataError("covariance needs at least 2 samples");
  const std::size_t n = samples.front().size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].size() != n) throw AlignmentError("samples have different lengths");
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = samples[k][i];
  }
  if (channels.empty())
    for (std::size_t i = 0; i < n; ++i) channels.push_back(static_cast<double>(i));
  // Shifting by the first sample first makes identical samples give exact zeros.
  const Eigen::RowVectorXd first = x.row(0);
  x.rowwise() -= first;
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return CovarianceMatrix(std::move(channels), std::move(s));
}

/// Treats the profiles as samples over the grid channels.
inline CovarianceMatrix profile_vcm(const ProfileSet& set) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : set) rows.emplace_back(p.values().begin(), p.values().end());
  if (rows.size() == 1) rows.push_back(rows.front());
  std::vector<double> ch(set.grid().values().begin(), set.grid().values().end());
  return sample_vcm(rows, std::move(ch));
}

/// Super channels picked by the greedy decorrelation, in pick order.
struct ChannelSelection {
  std::vector<std::size_t> indices;
  std::vector<double> channels;     // wavenumbers of `indices`
  double threshold = 0.9;
  std::vector<std::size_t> dropped; // zero-variance channels removed up front
};

inline constexpr double kDefaultChannelThreshold = 0.9;

/// Repeatedly picks the remaining channel with the largest variance (ties
/// to the lowest index) and discards every remaining channel l with
/// |S_jl| >= c * sqrt(S_jj S_ll), until none remain.
inline ChannelSelection reduce_channels(const CovarianceMatrix& s,
                                        double c = kDefaultChannelThreshold) {
  if (!(c > 0.0 && c < 1.0)) throw InvariantError("channel threshold must lie in (0, 1)");
  const auto& m = s.matrix();
  const Eigen::Index n = s.size();
  ChannelSelection sel;
  sel.threshold = c;
  std::vector<Eigen::Index> remaining;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m(i, i) < kZeroVariance) sel.dropped.push_back(static_cast<std::size_t>(i));
    else remaining.push_back(i);
  }
  if (!sel.dropped.empty())
    logger().warn("dropping {} zero-variance channel(s) before reduction", sel.dropped.size());

  while (!remaining.empty()) {
    Eigen::Index pick = remaining.front();
    for (Eigen::Index i : remaining)
      if (m(i, i) > m(pick, pick)) pick = i;
    sel.indices.push_back(static_cast<std::size_t>(pick));
    sel.channels.push_back(s.channels()[static_cast<std::size_t>(pick)]);
    std::erase_if(remaining, [&](Eigen::Index l) {
      return std::abs(m(pick, l)) >= c * std::sqrt(m(pick, pick) * m(l, l));
    });
  }
  return sel;
}

/// Principal submatrix on the selected channels, in selection order.
inline CovarianceMatrix restrict(const CovarianceMatrix& s, const ChannelSelection& sel) {
  const auto n = static_cast<std::size_t>(s.size());
  const auto l = static_cast<Eigen::Index>(sel.indices.size());
  for (std::size_t j : sel.indices)
    if (j >= n) throw RangeError("channel index " + std::to_string(j) + " out of range");
  Eigen::MatrixXd r(l, l);
  std::vector<double> ch;
  for (Eigen::Index a = 0; a < l; ++a) {
    const std::size_t ja = sel.indices[static_cast<std::size_t>(a)];
    ch.push_back(s.channels()[ja]);
    for (Eigen::Index b = 0; b < l; ++b)
      r(a, b) = s(static_cast<Eigen::Index>(ja),
                  static_cast<Eigen::Index>(sel.indices[static_cast<std::size_t>(b)]));
  }
  return CovarianceMatrix(CovarianceMatrix::Unchecked{}, std::move(ch), std::move(r));
}

struct SpdInverse {
  Eigen::MatrixXd inverse;
  double jitter = 0.0;  // diagonal loading that was needed, 0 if none
};

/// Inverse of a symmetric PSD matrix via Cholesky. When the factorization
/// fails or is numerically singular, retries with diagonal loading
/// starting at 1e-12 * trace / n.
inline SpdInverse inverse_spd(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  SpdInverse out;
  if (n == 0) return out;
  const double base = s.trace() > 0.0 ? 1e-12 * s.trace() / static_cast<double>(n) : 1e-300;
  Eigen::MatrixXd a = s;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      const auto d = llt.matrixLLT().diagonal().array().square();
      if (d.minCoeff() > 1e-15 * d.maxCoeff()) {
        out.inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
        out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
        if (out.jitter > 0.0)
          logger().debug("covariance inverse needed jitter {:g}", out.jitter);
        return out;
      }
    }
    out.jitter = out.jitter == 0.0 ? base : out.jitter * 10.0;
    a = s;
    a.diagonal().array() += out.jitter;
  }
  throw InvariantError("covariance matrix could not be factorized");
}

inline void save_covariance_csv(const Eigen::MatrixXd& m, const std::vector<double>& channels,
                                const std::string& path) {
  auto out = csv::open_output(path);
  out << "channel";
  for (double c : channels) out << ',' << csv::format(c);
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << csv::format(channels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << csv::format(m(i, j));
    out << '\n';
  }
}

inline void save_covariance_csv(const CovarianceMatrix& s, const std::string& path) {
  save_covariance_csv(s.matrix(), s.channels(), path);
}

inline CovarianceMatrix load_covariance_csv(const std::string& path) {
  auto t = csv::read(path);
  const auto n = static_cast<Eigen::Index>(t.header.size() - 1);
  if (t.header.front() != "channel" || static_cast<Eigen::Index>(t.rows.size()) != n)
    throw ParseError("'" + path + "' is not a square channel-labelled matrix");
  std::vector<double> ch;
  for (Eigen::Index i = 0; i < n; ++i) ch.push_back(csv::parse_double(t.header[static_cast<std::size_t>(i + 1)], 1));
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    const auto line = t.line_numbers[static_cast<std::size_t>(i)];
    if (csv::parse_double(row[0], line) != ch[static_cast<std::size_t>(i)])
      throw ParseError("row label does not match column label", line);
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = csv::parse_double(row[static_cast<std::size_t>(j + 1)], line);
  }
  try {
    return CovarianceMatrix(std::move(ch), std::move(m));
  } catch (const Error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

inline nlohmann::json to_json(const ChannelSelection& sel) {
  return {{"threshold", sel.threshold},
          {"count", sel.indices.size()},
          {"indices", sel.indices},
          {"wavenumbers", sel.channels},
          {"dropped_zero_variance", sel.dropped}};
}

inline ChannelSelection selection_from_json(const nlohmann::json& j) {
  try {
    ChannelSelection sel;
    sel.threshold = j.at("threshold").get<double>();
    sel.indices = j.at("indices").get<std::vector<std::size_t>>();
    sel.channels = j.at("wavenumbers").get<std::vector<double>>();
    sel.dropped = j.value("dropped_zero_variance", std::vector<std::size_t>{});
    if (sel.indices.size() != sel.channels.size())
      throw ParseError("channel selection indices and wavenumbers differ in length");
    return sel;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("channel selection: ") + e.what());
  }
}

} // namespace emiprior
