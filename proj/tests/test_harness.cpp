#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "gap_predict/harness.hpp"
#include "test_support.hpp"

using namespace gap_predict;
using namespace gap_predict::harness;

namespace {

ExperimentConfig base_config(std::vector<NamedSpec> specs) {
  ExperimentConfig c;
  c.specs = std::move(specs);
  c.T = 1.0;
  c.omega_gap = 1.0;
  c.taper = TaperFamily::Gaussian;
  c.nu_list = {0.3};
  c.d_list = {16};
  c.grid = {0.0, 4.0 * std::numbers::pi, 0.01};
  c.modes = {Mode::Eta};
  return c;
}

NamedSpec tone_spec() {
  return {"tone", SpectrumSpec::tones(1.0, {{2.0, {0.5, 0.0}}})};
}

NamedSpec unit_bump() {
  return {"bump", normalized_l1(SpectrumSpec::bumps(1.0, {{6.0, 5.0, 1.0}}))};
}

ReportRow fake_row(int d, double nu, double err) {
  ReportRow r;
  r.spec = "s";
  r.d = d;
  r.nu = nu;
  r.sup_err = err;
  r.pass = true;
  return r;
}

std::filesystem::path write_config(const std::string& name, const io::json& cfg) {
  const auto dir = testing_support::fresh_dir(name);
  io::write_text(dir / "tone.json",
                 R"({"omega_gap": 1.0, "kind": "tones", "tones": [{"omega": 2.0, "re": 0.5, "im": 0.0}]})");
  io::write_text(dir / "config.json", cfg.dump());
  return dir / "config.json";
}

io::json valid_config_json() {
  return io::json::parse(R"({"spec_files": ["tone.json"], "T": 1.0, "Omega": 1.0,
      "taper": "gaussian", "nu_list": [0.3], "d_list": [4, 8],
      "t_grid": {"t_start": 0.0, "t_end": 1.0, "dt": 0.01}, "modes": ["eta"]})");
}

}  // namespace

TEST(Config, LoadsAndResolvesPaths) {
  const auto path = write_config("cfg_ok", valid_config_json());
  const auto cfg = load_config(path);
  ASSERT_EQ(cfg.specs.size(), 1u);
  EXPECT_EQ(cfg.specs[0].name, "tone");
  EXPECT_DOUBLE_EQ(cfg.step(), 1e-3);
  EXPECT_DOUBLE_EQ(cfg.history(), 10.0);
  EXPECT_EQ(cfg.out_dir, path.parent_path() / "out");
}

TEST(Config, DefaultWindowCoversFourPeriods) {
  auto j = valid_config_json();
  j["t_grid"].erase("t_end");
  const auto cfg = load_config(write_config("cfg_window", j));
  EXPECT_NEAR(cfg.grid.end, 4.0 * std::numbers::pi, 1e-12);
}

TEST(Config, RejectsInvalidSettings) {
  auto expect_invalid = [](const std::string& name, io::json j) {
    EXPECT_THROW(load_config(write_config(name, j)), ValidationError) << name;
  };
  auto j = valid_config_json();
  j["t_grid"]["dt"] = 0.003;
  expect_invalid("cfg_odd_dt", j);
  j = valid_config_json();
  j["d_list"] = {8, 4};
  expect_invalid("cfg_descending", j);
  j = valid_config_json();
  j["eps1_target"] = 0.1;
  expect_invalid("cfg_both_nu", j);
  j = valid_config_json();
  j["spec_files"] = {"missing.json"};
  expect_invalid("cfg_missing", j);
  j = valid_config_json();
  j["Omega"] = 2.5;
  expect_invalid("cfg_gap", j);
  j = valid_config_json();
  j["history_length"] = 5.0;
  expect_invalid("cfg_history", j);
  j = valid_config_json();
  j["modes"] = {"spectral"};
  expect_invalid("cfg_mode", j);
  j = valid_config_json();
  j.erase("T");
  expect_invalid("cfg_no_T", j);
}

TEST(Sweep, ZeroSignalHasZeroError) {
  auto cfg = base_config({{"zero", SpectrumSpec::tones(1.0, {})}});
  cfg.d_list = {4, 8};
  cfg.grid = {0.0, 2.0, 0.01};
  cfg.modes = {Mode::Eta, Mode::Conv, Mode::FitEta};
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 6u);
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.sup_err, 0.0);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.error.empty());
  }
}

TEST(Sweep, ToneErrorFollowsTheFrequencyResponse) {
  auto cfg = base_config({tone_spec()});
  cfg.quadrature_step = 1e-4;
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 1u);
  const auto& row = report.rows[0];
  const auto ap = fit_approximant(1.0, 1.0, TaperSpec(TaperFamily::Gaussian, 0.3), 16);
  const std::complex<double> gap_response = std::exp(std::complex<double>(0.0, 2.0)) - eval_psi(ap.a, 2.0);
  double oracle = 0.0;
  for (std::size_t g = 0; g < cfg.grid.count(); ++g) {
    const double t = cfg.grid.time(g);
    oracle = std::max(oracle, std::abs((0.5 * gap_response * std::exp(std::complex<double>(0.0, 2.0 * t))).real()));
  }
  EXPECT_NEAR(row.sup_err, oracle, 1e-6);
  EXPECT_LE(row.sup_err, 0.5 * std::abs(gap_response) + 1e-6);
  EXPECT_LE(row.sup_err, row.bound_tones);
  EXPECT_TRUE(row.pass);
  EXPECT_FALSE(std::isnan(row.bound_tones));
}

TEST(Sweep, UnitBumpRespectsTheL1Budget) {
  auto cfg = base_config({unit_bump()});
  cfg.grid = {0.0, 4.0, 0.01};
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 1u);
  const auto& row = report.rows[0];
  EXPECT_NEAR(row.l1, 1.0, 1e-10);
  EXPECT_TRUE(std::isnan(row.bound_tones));
  EXPECT_LE(row.sup_err, row.bound_paper + row.slack.total());
  EXPECT_TRUE(row.pass);
  EXPECT_GE(row.slack.eps2_grid, 0.0);
}

TEST(Sweep, SelectsNuFromEpsilonTarget) {
  auto cfg = base_config({unit_bump()});
  cfg.nu_list.clear();
  cfg.eps1_target = 0.05;
  cfg.d_list = {8};
  cfg.grid = {0.0, 1.0, 0.01};
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_LE(report.rows[0].eps1, 0.05);
  EXPECT_NEAR(report.rows[0].nu, select_nu(cfg.specs[0].spec, cfg.taper, 0.05), 0.0);
}

TEST(Sweep, ConvolutionAndEtaModesAgree) {
  auto cfg = base_config({{"wide", SpectrumSpec::bumps(1.0, {{6.0, 5.0, 1.0}})}});
  cfg.nu_list = {1.0};
  cfg.d_list = {4};
  cfg.quadrature_step = 5e-3;
  cfg.history_length = 80.0;
  cfg.grid = {0.0, 2.0, 0.01};
  cfg.modes = {Mode::Conv, Mode::Eta};
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 2u);
  const auto& conv = report.rows[0];
  const auto& eta = report.rows[1];
  EXPECT_EQ(conv.mode, Mode::Conv);
  EXPECT_NEAR(conv.sup_err, eta.sup_err, std::max(1e-6, conv.slack.tail));
  EXPECT_TRUE(conv.pass);
  EXPECT_TRUE(eta.pass);
}

TEST(Sweep, RowFailuresAreRecordedAndTheRunContinues) {
  auto cfg = base_config({tone_spec()});
  cfg.d_list = {4, 8};
  cfg.fit_nodes = 20;  // too few for d = 8
  cfg.grid = {0.0, 1.0, 0.01};
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_TRUE(report.rows[0].error.empty());
  EXPECT_FALSE(report.rows[1].error.empty());
  EXPECT_FALSE(report.rows[1].pass);
  EXPECT_EQ(report.failing_rows(), std::vector<std::size_t>{1});
}

TEST(Sweep, RowsAreOrderedBySpecThenDegreeThenScale) {
  auto cfg = base_config({tone_spec(), unit_bump()});
  cfg.d_list = {4, 6};
  cfg.nu_list = {0.5, 0.3};
  cfg.grid = {0.0, 0.5, 0.01};
  const auto report = run_sweep(cfg);
  ASSERT_EQ(report.rows.size(), 8u);
  EXPECT_EQ(report.rows[0].spec, "tone");
  EXPECT_EQ(report.rows[1].d, 4);
  EXPECT_EQ(report.rows[1].nu, 0.3);
  EXPECT_EQ(report.rows[2].d, 6);
  EXPECT_EQ(report.rows[4].spec, "bump");
}

TEST(Report, CsvHasFixedColumnsAndIsReproducible) {
  auto cfg = base_config({tone_spec()});
  cfg.grid = {0.0, 1.0, 0.01};
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  const auto csv = report_csv(a);
  EXPECT_EQ(csv, report_csv(b));
  EXPECT_EQ(report_json(a), report_json(b));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "spec,d,nu,eps1,eps2,bound_paper,bound_tones,sup_err,slack,pass,mode");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  const auto dir = testing_support::fresh_dir("report_emit");
  emit_report(a, ReportFormat::Csv, dir / "r.csv");
  EXPECT_EQ(io::read_text(dir / "r.csv"), csv);
}

TEST(Report, JsonListsFailingRows) {
  Report r;
  r.rows = {fake_row(4, 0.3, 0.1), fake_row(8, 0.3, 0.2), fake_row(12, 0.3, 0.3)};
  r.rows[1].pass = false;
  r.rows[2].pass = false;
  r.rows[2].error = "boom \"quoted\"";
  const auto parsed = io::json::parse(report_json(r));
  EXPECT_EQ(parsed.at("failing_rows"), io::json({1, 2}));
  EXPECT_FALSE(parsed.at("all_pass").get<bool>());
  EXPECT_EQ(parsed.at("rows")[2].at("error"), "boom \"quoted\"");
  EXPECT_THROW(emit_report(Report{}, ReportFormat::Csv, "unused.csv"), ValidationError);
}

TEST(Convergence, ToneSweepIsMonotone) {
  auto cfg = base_config({tone_spec()});
  cfg.d_list = {8, 16, 24};
  const auto verdict = convergence_check(run_sweep(cfg));
  EXPECT_TRUE(verdict.pass);
  EXPECT_FALSE(verdict.nu_checked);
}

TEST(Convergence, ShuffledErrorsReportTheTransition) {
  Report r;
  r.rows = {fake_row(8, 0.3, 0.1), fake_row(16, 0.3, 0.3), fake_row(24, 0.3, 0.05)};
  const auto verdict = convergence_check(r);
  EXPECT_FALSE(verdict.pass);
  ASSERT_EQ(verdict.violations.size(), 1u);
  EXPECT_NE(verdict.violations[0].find("d 8 -> 16"), std::string::npos) << verdict.violations[0];
}

TEST(Convergence, ToleratesTenPercentWobble) {
  Report r;
  r.rows = {fake_row(8, 0.3, 0.1), fake_row(16, 0.3, 0.109), fake_row(24, 0.3, 0.05)};
  EXPECT_TRUE(convergence_check(r).pass);
}

TEST(Convergence, ChecksScaleWhenThreeValuesArePresent) {
  Report r;
  for (double nu : {0.5, 0.3, 0.1}) {
    const double base = nu == 0.1 ? 0.5 : nu;  // best error grows at the smallest nu
    for (int d : {4, 8, 12}) r.rows.push_back(fake_row(d, nu, base / d));
  }
  const auto verdict = convergence_check(r);
  EXPECT_TRUE(verdict.nu_checked);
  EXPECT_FALSE(verdict.pass);
  EXPECT_NE(verdict.violations.back().find("nu 0.29999999999999999 -> 0.10000000000000001"),
            std::string::npos)
      << verdict.violations.back();
}

TEST(Convergence, SingleDegreeIsInsufficient) {
  Report r;
  r.rows = {fake_row(8, 0.3, 0.1), fake_row(8, 0.5, 0.2)};
  EXPECT_THROW(convergence_check(r), ValidationError);
}

TEST(Pin, DoublesPrecisionSettings) {
  auto cfg = base_config({tone_spec()});
  const auto pinned = pinned_settings(cfg);
  EXPECT_DOUBLE_EQ(pinned.step(), 0.5e-3);
  EXPECT_EQ(pinned.dense_factor, 16);
  Report r;
  r.rows = {fake_row(4, 0.3, 0.1)};
  const auto j = io::json::parse(fixtures_json(r));
  EXPECT_EQ(j.at("rows").size(), 1u);
}

TEST(Pin, ToneRowMatchesPinnedFixture) {
  const auto fixtures = io::read_json(testing_support::source_dir() / "tests/fixtures/fixtures.json");
  auto cfg = base_config({tone_spec()});
  const auto row = run_sweep(cfg).rows.at(0);
  bool found = false;
  for (const auto& f : fixtures.at("rows")) {
    if (f.at("spec") != "tone" || f.at("d") != 16 || f.at("mode") != "eta") continue;
    found = true;
    EXPECT_NEAR(row.sup_err, f.at("sup_err").get<double>(), 1e-6);
    EXPECT_NEAR(row.bound_tones, f.at("bound").get<double>(), 1e-4);
    EXPECT_LE(row.sup_err, f.at("bound").get<double>());
  }
  EXPECT_TRUE(found);
}
