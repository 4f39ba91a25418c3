// emiprior.cpp - Command-line driver for the emissivity prior pipeline
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "emiprior/pipeline.hpp"

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n' || c == '\r') {
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << "error kind=" << kind << " message=\"" << escape(message) << "\"\n";
  return kind == "usage" ? 2 : 1;
}

struct Overrides {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<double> snow_threshold, fov_radius_km, channel_threshold, coincidence_tol;
  std::optional<std::string> emissivity, column;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral emissivity priors from hinge-point data and land cover"};
  app.require_subcommand(1, 1);
  Overrides o;

  const char* names[][2] = {
      {"select", "pick one reference profile per point from ancillary constraints"},
      {"apriori", "a-priori profile weights from land-cover fractions"},
      {"reduce", "greedy super-channel selection on the profile covariance"},
      {"fit", "Bayesian profile weights per grid point"},
      {"evaluate", "compare Bayesian and spline estimates against reference data"},
      {"rte", "top-of-atmosphere radiance spectrum for a layered column"},
      {"synth", "write a seeded synthetic dataset bundle"}};
  for (auto& n : names) {
    auto* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", o.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--snow-threshold", o.snow_threshold);
    sub->add_option("--fov-radius-km", o.fov_radius_km);
    sub->add_option("--channel-threshold", o.channel_threshold);
    sub->add_option("--coincidence-tol", o.coincidence_tol);
    if (std::string(n[0]) == "rte") {
      sub->add_option("--column", o.column, "column file");
      sub->add_option("--emissivity", o.emissivity, "scalar emissivity or profile CSV");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    auto cfg = emiprior::load_config(o.config);
    cfg.out_dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
    if (o.seed) cfg.seed = *o.seed;
    if (o.workers) cfg.workers = *o.workers;
    if (o.snow_threshold) cfg.snow_threshold = *o.snow_threshold;
    if (o.fov_radius_km) cfg.fov_radius_km = *o.fov_radius_km;
    if (o.channel_threshold) cfg.channel_threshold = *o.channel_threshold;
    if (o.coincidence_tol) cfg.coincidence_tol = *o.coincidence_tol;
    // Paths given on the command line are relative to the working directory.
    auto cwd_path = [](const std::string& p) { return std::filesystem::absolute(p).string(); };
    if (o.column) cfg.column = cwd_path(*o.column);
    if (o.emissivity) {
      double v = 0.0;
      auto r = std::from_chars(o.emissivity->data(), o.emissivity->data() + o.emissivity->size(), v);
      const bool scalar = r.ec == std::errc() && r.ptr == o.emissivity->data() + o.emissivity->size();
      cfg.emissivity = scalar ? *o.emissivity : cwd_path(*o.emissivity);
    }
    cfg.validate();

    if (cmd == "select") {
      auto rows = emiprior::run_select(cfg);
      std::size_t none = 0;
      for (const auto& r : rows) none += !r.error.empty();
      std::cout << "select points=" << rows.size() << " unselected=" << none << '\n';
    } else if (cmd == "apriori") {
      auto rows = emiprior::run_apriori(cfg);
      std::size_t empty = 0;
      for (const auto& r : rows) empty += !r.weights;
      std::cout << "apriori points=" << rows.size() << " empty_footprint=" << empty << '\n';
    } else if (cmd == "reduce") {
      auto sel = emiprior::run_reduce(cfg);
      std::cout << "reduce channels=" << sel.indices.size() << " threshold=" << emiprior::csv::format(sel.threshold)
                << '\n';
    } else if (cmd == "fit") {
      auto run = emiprior::run_fit(cfg);
      std::cout << "fit points=" << run.rows.size() << " channels=" << run.selection.indices.size() << '\n';
    } else if (cmd == "evaluate") {
      auto ev = emiprior::run_evaluate(cfg);
      const auto& c = ev.comparison;
      std::cout << "evaluate coincidences=" << ev.pairs.size()
                << " bayes_ref=" << emiprior::csv::format(c.bayes_reference.mean)
                << " camel_ref=" << emiprior::csv::format(c.camel_reference.mean)
                << " camel_bayes=" << emiprior::csv::format(c.camel_bayes.mean)
                << " p=" << emiprior::csv::format(c.ttest.p_value) << '\n';
    } else if (cmd == "rte") {
      auto spec = emiprior::run_rte(cfg);
      std::cout << "rte wavenumbers=" << spec.size() << '\n';
    } else if (cmd == "synth") {
      emiprior::run_synth(cfg);
      std::cout << "synth seed=" << cfg.seed << " out=" << cfg.out_dir.string() << '\n';
    }
  } catch (const emiprior::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
