// bayes.hpp - Bayesian fusion of hinge-point data and a land-cover prior
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ancillary.hpp"
#include "covariance.hpp"
#include "error.hpp"
#include "landcover.hpp"
#include "profiles.hpp"
#include "qp_simplex.hpp"

namespace emiprior {

/// Weights at or below this are outside the a-priori support.
inline constexpr double kSupportThreshold = 1e-12;

/// Wavenumbers at which CAMEL provides emissivity inside the 100-1600 cm-1
/// range.
inline const std::vector<double>& camel_channels() {
  static const std::vector<double> c = {669.30, 826.45, 884.96, 925.93, 943.40,
                                        1098.90, 1162.79, 1204.82, 1315.79};
  return c;
}

/// One grid point's cost functional
///
///   J(p) = (e(n_C) - e_C)' S_C^-1 (e(n_C) - e_C) + (e(n_R) - e_R)' S_R^-1 (e(n_R) - e_R)
///
/// with e = sum_i p_i H_i, minimized over the simplex face `support`.
struct BayesProblem {
  std::shared_ptr<const ProfileSet> set;
  std::vector<double> camel_channels;  // ascending; empty for a prior-only fit
  Eigen::VectorXd camel_values;
  Eigen::MatrixXd s_c_inv;
  std::vector<double> reduced_channels;  // ascending
  Eigen::VectorXd apriori_values;
  Eigen::MatrixXd s_r_inv;
  std::vector<std::size_t> support;

  void validate() const {
    if (!set) throw InvariantError("Bayes problem has no profile set");
    auto check = [](const std::vector<double>& ch, const Eigen::VectorXd& v,
                    const Eigen::MatrixXd& w, const char* what) {
      if (static_cast<Eigen::Index>(ch.size()) != v.size() || w.rows() != v.size()
          || w.cols() != v.size())
        throw AlignmentError(std::string(what) + " channels, values and inverse covariance differ in size");
      for (std::size_t k = 1; k < ch.size(); ++k)
        if (!(ch[k] > ch[k - 1])) throw InvariantError(std::string(what) + " channels must be ascending");
      if (!w.isApprox(w.transpose(), 1e-12) && w.size() > 0 && w.norm() > 0.0)
        throw InvariantError(std::string(what) + " inverse covariance is not symmetric");
    };
    check(camel_channels, camel_values, s_c_inv, "CAMEL");
    check(reduced_channels, apriori_values, s_r_inv, "reduced");
    if (support.empty()) throw InvariantError("Bayes problem support is empty");
    for (auto i : support)
      if (i >= set->size()) throw RangeError("support index out of range");
  }
};

struct CostTerms {
  double total = 0.0;
  double camel = 0.0;
  double prior = 0.0;
};

enum FitFlag : unsigned {
  kFlagNone = 0,
  kFlagPriorOnly = 1u << 0,      // no CAMEL data: first term dropped
  kFlagPartialCamel = 1u << 1,   // some CAMEL channels missing
  kFlagFlat = 1u << 2,           // minimizer not unique
  kFlagJitter = 1u << 3,         // a covariance needed diagonal loading to invert
  kFlagSingleton = 1u << 4,      // support has one profile
};

inline std::string flags_to_string(unsigned flags) {
  static const std::pair<unsigned, const char*> names[] = {
      {kFlagPriorOnly, "prior_only"}, {kFlagPartialCamel, "partial_camel"},
      {kFlagFlat, "flat"}, {kFlagJitter, "jitter"}, {kFlagSingleton, "singleton"}};
  std::string out;
  for (auto [bit, name] : names)
    if (flags & bit) out += (out.empty() ? "" : "|") + std::string(name);
  return out.empty() ? "none" : out;
}

struct BayesFit {
  SimplexWeights weights;
  double cost = 0.0;
  double cost_camel_term = 0.0;
  double cost_prior_term = 0.0;
  double kkt_residual = 0.0;
  unsigned flags = kFlagNone;
  int iterations = 0;
};

namespace detail {

/// Profile values at `channels`, one row per channel.
inline Eigen::MatrixXd design(const ProfileSet& set, const std::vector<double>& channels) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(channels.size()), static_cast<Eigen::Index>(set.size()));
  for (std::size_t r = 0; r < channels.size(); ++r)
    for (std::size_t i = 0; i < set.size(); ++i)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = set[i].at(channels[r]);
  return a;
}

inline double quadratic_form(const Eigen::VectorXd& r, const Eigen::MatrixXd& w) {
  return r.size() == 0 ? 0.0 : r.dot(w * r);
}

} // namespace detail

inline CostTerms evaluate_cost(const BayesProblem& problem, const SimplexWeights& w) {
  if (w.size() != problem.set->size()) throw AlignmentError("weights do not match the profile set");
  const Eigen::Map<const Eigen::VectorXd> p(w.values().data(), static_cast<Eigen::Index>(w.size()));
  CostTerms c;
  if (!problem.camel_channels.empty()) {
    const Eigen::VectorXd r = detail::design(*problem.set, problem.camel_channels) * p - problem.camel_values;
    c.camel = detail::quadratic_form(r, problem.s_c_inv);
  }
  if (!problem.reduced_channels.empty()) {
    const Eigen::VectorXd r = detail::design(*problem.set, problem.reduced_channels) * p - problem.apriori_values;
    c.prior = detail::quadratic_form(r, problem.s_r_inv);
  }
  c.total = c.camel + c.prior;
  return c;
}

/// Global minimizer of J on the a-priori face of the simplex.
///
/// The sum constraint is eliminated against the first support profile b:
/// on the plane sum(p) = 1 each residual A p - y equals D p + (A_b - y)
/// with D_i = A_i - A_b, so the Hessian is built from profile differences
/// only. This keeps it well scaled even when an inverse covariance is
/// huge along directions the profiles cannot move in.
inline BayesFit solve(const BayesProblem& problem) {
  problem.validate();
  const std::size_t np = problem.set->size();
  const auto n = static_cast<Eigen::Index>(np);
  const auto b = static_cast<Eigen::Index>(problem.support.front());

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  auto add_term = [&](const std::vector<double>& channels, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& w) {
    if (channels.empty()) return;
    Eigen::MatrixXd a = detail::design(*problem.set, channels);
    const Eigen::VectorXd r0 = a.col(b) - y;
    a.colwise() -= a.col(b).eval();
    const Eigen::MatrixXd wa = w * a;
    g.noalias() += 2.0 * a.transpose() * wa;
    h.noalias() += 2.0 * wa.transpose() * r0;
  };
  add_term(problem.camel_channels, problem.camel_values, problem.s_c_inv);
  add_term(problem.reduced_channels, problem.apriori_values, problem.s_r_inv);
  g = 0.5 * (g + g.transpose()).eval();

  const auto qp_result = qp::solve(g, h, problem.support);

  BayesFit fit;
  std::vector<double> p(qp_result.x.data(), qp_result.x.data() + n);
  fit.weights = SimplexWeights(std::move(p));
  const auto terms = evaluate_cost(problem, fit.weights);
  fit.cost = terms.total;
  fit.cost_camel_term = terms.camel;
  fit.cost_prior_term = terms.prior;
  fit.kkt_residual = qp_result.kkt_residual;
  fit.iterations = qp_result.iterations;
  if (qp_result.flat) fit.flags |= kFlagFlat;
  if (problem.support.size() == 1) fit.flags |= kFlagSingleton;
  if (problem.camel_channels.empty()) fit.flags |= kFlagPriorOnly;
  return fit;
}

/// Holds everything shared by the points of one grid: the profile set,
/// the CAMEL covariance and its cached inverse, and the reduced-channel
/// covariance and its inverse. fit() is const and safe to call from
/// several threads.
class BayesFitter {
public:
  BayesFitter(std::shared_ptr<const ProfileSet> set, CovarianceMatrix s_c, const CovarianceMatrix& s_r,
              const ChannelSelection& selection)
    : set_(std::move(set)), s_c_(std::move(s_c)) {
    if (!set_) throw InvariantError("no profile set");
    if (s_r.channels() != selection.channels)
      throw AlignmentError("reduced covariance channels do not match the channel selection");
    for (std::size_t k = 1; k < s_c_.channels().size(); ++k)
      if (!(s_c_.channels()[k] > s_c_.channels()[k - 1]))
        throw InvariantError("CAMEL covariance channels must be ascending");
    for (double c : s_c_.channels())
      if (!set_->grid().contains(c)) throw RangeError("CAMEL channel outside the profile grid");

    // Reorder the reduced channels ascending, permuting S_R to match.
    std::vector<std::size_t> order(selection.channels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return selection.channels[x] < selection.channels[y]; });
    const auto l = static_cast<Eigen::Index>(order.size());
    Eigen::MatrixXd sr(l, l);
    for (Eigen::Index a = 0; a < l; ++a) {
      reduced_channels_.push_back(selection.channels[order[static_cast<std::size_t>(a)]]);
      for (Eigen::Index c = 0; c < l; ++c)
        sr(a, c) = s_r(static_cast<Eigen::Index>(order[static_cast<std::size_t>(a)]),
                       static_cast<Eigen::Index>(order[static_cast<std::size_t>(c)]));
    }
    auto inv_r = inverse_spd(sr);
    s_r_inv_ = std::move(inv_r.inverse);
    prior_jitter_ = inv_r.jitter > 0.0;
    auto inv_c = inverse_spd(s_c_.matrix());
    s_c_inv_ = std::move(inv_c.inverse);
    camel_jitter_ = inv_c.jitter > 0.0;
    reduced_design_ = detail::design(*set_, reduced_channels_);
  }

  const ProfileSet& set() const { return *set_; }
  const std::vector<double>& reduced_channels() const { return reduced_channels_; }

  /// Assembles the problem for one point. `camel` may be null or have
  /// missing channels; its channels must be a subset of the CAMEL
  /// covariance channels.
  BayesProblem problem(const HingeRecord* camel, const SimplexWeights& apriori,
                       unsigned* flags = nullptr) const {
    if (apriori.size() != set_->size()) throw AlignmentError("a-priori weights do not match the profile set");
    BayesProblem pb;
    pb.set = set_;
    pb.support = apriori.support(kSupportThreshold);
    if (pb.support.empty()) throw InvariantError("a-priori weights have empty support");
    pb.reduced_channels = reduced_channels_;
    const Eigen::Map<const Eigen::VectorXd> a(apriori.values().data(), static_cast<Eigen::Index>(apriori.size()));
    pb.apriori_values = reduced_design_ * a;
    pb.s_r_inv = s_r_inv_;
    unsigned f = prior_jitter_ ? kFlagJitter : kFlagNone;

    const std::size_t nc = s_c_.channels().size();
    if (camel && !camel->wavenumbers.empty()) {
      std::vector<Eigen::Index> idx;
      for (double w : camel->wavenumbers) {
        auto it = std::find(s_c_.channels().begin(), s_c_.channels().end(), w);
        if (it == s_c_.channels().end())
          throw AlignmentError("CAMEL channel " + csv::format(w) + " not in the CAMEL covariance");
        idx.push_back(static_cast<Eigen::Index>(it - s_c_.channels().begin()));
      }
      pb.camel_channels = camel->wavenumbers;
      pb.camel_values = Eigen::Map<const Eigen::VectorXd>(camel->emissivities.data(),
                                                          static_cast<Eigen::Index>(camel->emissivities.size()));
      if (idx.size() == nc) {
        pb.s_c_inv = s_c_inv_;
        if (camel_jitter_) f |= kFlagJitter;
      } else {
        // Marginalize: invert the covariance of the present channels only.
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd sub(m, m);
        for (Eigen::Index x = 0; x < m; ++x)
          for (Eigen::Index y = 0; y < m; ++y) sub(x, y) = s_c_(idx[static_cast<std::size_t>(x)], idx[static_cast<std::size_t>(y)]);
        auto inv = inverse_spd(sub);
        pb.s_c_inv = std::move(inv.inverse);
        if (inv.jitter > 0.0) f |= kFlagJitter;
        f |= kFlagPartialCamel;
      }
    } else {
      pb.camel_values.resize(0);
      pb.s_c_inv.resize(0, 0);
      f |= kFlagPriorOnly;
    }
    if (flags) *flags = f;
    return pb;
  }

  BayesFit fit(const HingeRecord* camel, const SimplexWeights& apriori) const {
    unsigned f = 0;
    auto pb = problem(camel, apriori, &f);
    auto result = solve(pb);
    result.flags |= f;
    return result;
  }

private:
  std::shared_ptr<const ProfileSet> set_;
  CovarianceMatrix s_c_;
  Eigen::MatrixXd s_c_inv_;
  std::vector<double> reduced_channels_;
  Eigen::MatrixXd s_r_inv_;
  Eigen::MatrixXd reduced_design_;
  bool prior_jitter_ = false;
  bool camel_jitter_ = false;
};

/// One-shot version of BayesFitter::fit.
inline BayesFit fit_grid_point(const ProfileSet& set, const HingeRecord* camel_record,
                               const SimplexWeights& apriori, const CovarianceMatrix& s_c,
                               const CovarianceMatrix& s_r, const ChannelSelection& selection) {
  BayesFitter fitter(std::make_shared<const ProfileSet>(set), s_c, s_r, selection);
  return fitter.fit(camel_record, apriori);
}

} // namespace emiprior
