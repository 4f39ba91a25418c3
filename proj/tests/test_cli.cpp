// test_cli.cpp - End-to-end runs of the emiprior command-line tool
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <sys/wait.h>

#include "emiprior/pipeline.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = 0;
  std::string err;
};

Run cli(const std::string& args) {
  auto errfile = fs::temp_directory_path() / "emiprior_cli_stderr.txt";
  const std::string cmd = std::string(EMIPRIOR_CLI) + " " + args + " >/dev/null 2>" + errfile.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, oracle::slurp(errfile)};
}

const fs::path& bundle() {
  static const fs::path dir = [] {
    auto d = oracle::scratch_dir("cli_bundle");
    std::ofstream(d / "base.json") << R"({"seed": 5, "synth": {"scene": {"n_lat": 12, "n_lon": 15}}})";
    EXPECT_EQ(cli("synth --config " + (d / "base.json").string() + " --out " + (d / "b").string()).status, 0);
    return d / "b";
  }();
  return dir;
}

std::vector<std::string> files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

void expect_same_tree(const fs::path& a, const fs::path& b) {
  ASSERT_EQ(files(a), files(b));
  for (const auto& f : files(a)) EXPECT_EQ(oracle::slurp(a / f), oracle::slurp(b / f)) << f;
}

} // namespace

TEST(Cli, SynthIsReproducible) {
  auto d = oracle::scratch_dir("cli_synth");
  std::ofstream(d / "base.json") << R"({"synth": {"scene": {"n_lat": 8, "n_lon": 9}}})";
  const auto cfg = (d / "base.json").string();
  ASSERT_EQ(cli("synth --config " + cfg + " --seed 11 --out " + (d / "a").string()).status, 0);
  ASSERT_EQ(cli("synth --config " + cfg + " --seed 11 --out " + (d / "b").string()).status, 0);
  ASSERT_EQ(cli("synth --config " + cfg + " --seed 12 --out " + (d / "c").string()).status, 0);
  expect_same_tree(d / "a", d / "b");
  EXPECT_NE(oracle::slurp(d / "a" / "camel.csv"), oracle::slurp(d / "c" / "camel.csv"));
}

TEST(Cli, EveryCommandRunsOnTheBundle) {
  const auto cfg = (bundle() / "config.json").string();
  auto out = oracle::scratch_dir("cli_all");
  for (const char* cmd : {"select", "apriori", "reduce", "fit", "evaluate", "rte"}) {
    auto r = cli(std::string(cmd) + " --config " + cfg + " --out " + (out / cmd).string());
    EXPECT_EQ(r.status, 0) << cmd << ": " << r.err;
  }
  EXPECT_TRUE(fs::exists(out / "select" / "selection.csv"));
  EXPECT_TRUE(fs::exists(out / "select" / "rms_map.csv"));
  EXPECT_TRUE(fs::exists(out / "apriori" / "apriori.csv"));
  EXPECT_TRUE(fs::exists(out / "reduce" / "selection.json"));
  EXPECT_TRUE(fs::exists(out / "reduce" / "correlation.csv"));
  EXPECT_TRUE(fs::exists(out / "fit" / "fits.csv"));
  EXPECT_TRUE(fs::exists(out / "evaluate" / "evaluation.json"));
  EXPECT_TRUE(fs::exists(out / "rte" / "spectrum.csv"));

  auto fits = emiprior::csv::read((out / "fit" / "fits.csv").string());
  EXPECT_EQ(fits.rows.size(), 12u * 15u);
  const auto ilat = fits.column("lat"), ilon = fits.column("lon");
  for (std::size_t r = 1; r < fits.rows.size(); ++r) {
    const double a = std::stod(fits.rows[r - 1][ilat]), b = std::stod(fits.rows[r][ilat]);
    const double c = std::stod(fits.rows[r - 1][ilon]), d = std::stod(fits.rows[r][ilon]);
    EXPECT_TRUE(a < b || (a == b && c < d)) << r;
  }
}

TEST(Cli, FitIsIndependentOfWorkerCount) {
  const auto cfg = (bundle() / "config.json").string();
  auto out = oracle::scratch_dir("cli_workers");
  for (const char* w : {"1", "3", "4"}) {
    ASSERT_EQ(cli("fit --config " + cfg + " --workers " + w + " --out " + (out / w).string()).status, 0);
    ASSERT_EQ(cli("evaluate --config " + cfg + " --workers " + w + " --out " + (out / w).string()).status, 0);
  }
  expect_same_tree(out / "1", out / "3");
  expect_same_tree(out / "1", out / "4");
}

TEST(Cli, FlagsOverrideConfig) {
  const auto cfg = (bundle() / "config.json").string();
  auto out = oracle::scratch_dir("cli_flags");
  ASSERT_EQ(cli("reduce --config " + cfg + " --out " + (out / "a").string()).status, 0);
  ASSERT_EQ(cli("reduce --config " + cfg + " --channel-threshold 0.5 --out " + (out / "b").string()).status, 0);
  std::ifstream ia(out / "a" / "selection.json"), ib(out / "b" / "selection.json");
  auto ja = nlohmann::json::parse(ia), jb = nlohmann::json::parse(ib);
  EXPECT_EQ(ja["threshold"].get<double>(), 0.9);
  EXPECT_EQ(jb["threshold"].get<double>(), 0.5);
  EXPECT_LT(jb["count"].get<int>(), ja["count"].get<int>());
  ASSERT_EQ(cli("rte --config " + cfg + " --emissivity 1 --out " + (out / "c").string()).status, 0);
}

TEST(Cli, ErrorsAreSingleMachineReadableLines) {
  auto d = oracle::scratch_dir("cli_errors");
  std::ofstream(d / "broken.json") << "{ not json";
  std::ofstream(d / "missing.json") << R"({"profiles": "nowhere.csv"})";
  std::ofstream(d / "badparam.json") << R"({"profiles": "p.csv", "channel_threshold": 1.5})";
  std::ofstream(d / "p.csv") << "wavenumber,DES\n50,0.9\n55,7\n";
  std::ofstream(d / "badfile.json") << R"({"profiles": "p.csv"})";

  struct Case {
    std::string args, kind;
  };
  const std::vector<Case> cases = {
      {"fit --config " + (d / "broken.json").string(), "config"},
      {"reduce --config " + (d / "missing.json").string(), "config"},
      {"reduce --config " + (d / "badparam.json").string(), "config"},
      {"reduce --config " + (d / "badfile.json").string(), "parse"},
      {"fit --config " + (d / "nonexistent.json").string(), "usage"},
      {"frobnicate --config " + (d / "broken.json").string(), "usage"},
  };
  for (const auto& c : cases) {
    auto r = cli(c.args);
    EXPECT_NE(r.status, 0) << c.args;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    EXPECT_EQ(r.err.rfind("error kind=" + c.kind + " message=\"", 0), 0u) << r.err;
  }
  auto r = cli("reduce --config " + (d / "badfile.json").string());
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
}

TEST(Pipeline, ParallelForCoversEveryIndexOnce) {
  for (unsigned w : {1u, 2u, 7u, 64u}) {
    std::vector<int> hits(1000, 0);
    emiprior::parallel_for(hits.size(), w, [&](std::size_t i) { ++hits[i]; });
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
  }
  EXPECT_THROW(emiprior::parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw emiprior::RangeError("x");
               }),
               emiprior::RangeError);
}
