#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gap_predict/gap_predict.hpp"

namespace gp = gap_predict;
namespace fs = std::filesystem;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    gp::io::write_text(out, text);
  }
}

int run_approx(double T, double omega, const std::string& taper, double nu, int d, int nodes,
               const std::string& out) {
  const gp::TaperSpec spec(gp::parse_taper_family(taper), nu);
  const auto approx = gp::fit_approximant(T, omega, spec, d, nodes);
  emit(gp::io::to_json(approx).dump(2) + "\n", out);
  return 0;
}

int run_synth(const std::string& spec_path, double t0, double t1, double dt,
              const std::string& out) {
  if (!(dt > 0.0) || !(t1 >= t0)) throw gp::ValidationError("need t0 <= t1 and dt > 0");
  const auto spec = gp::io::spec_from_json(gp::io::read_json(spec_path));
  const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
  gp::UniformSamples s{t0, dt, gp::sample_grid(spec, t0, dt, count)};
  emit(gp::io::samples_csv(s), out);
  return 0;
}

std::vector<double> eta_seeds(const gp::Approximant& approx, const std::string& eta_path,
                              const std::string& spec_path, double t1) {
  if (!eta_path.empty()) {
    const auto j = gp::io::read_json(eta_path);
    auto eta = j.at("eta").get<std::vector<double>>();
    if (eta.size() != approx.a.size()) throw gp::ValidationError("eta length does not match d");
    if (std::abs(j.at("t1").get<double>() - t1) > 1e-9 * std::max(1.0, std::abs(t1))) {
      throw gp::ValidationError("eta file was fitted at a different t1");
    }
    return eta;
  }
  if (!spec_path.empty()) {
    const auto spec = gp::io::spec_from_json(gp::io::read_json(spec_path));
    std::vector<double> eta;
    for (int k = 1; k <= approx.d; ++k) eta.push_back(gp::exact_hk(spec, k, t1));
    return eta;
  }
  throw gp::ValidationError("eta mode needs --eta or --spec to seed the initial integrals");
}

int run_predict(const std::string& approx_path, const std::string& samples_path,
                const std::string& mode, double t1, double history, const std::string& eta_path,
                const std::string& spec_path, const std::string& out) {
  const auto approx = gp::io::approximant_from_json(gp::io::read_json(approx_path));
  const auto samples = gp::io::read_samples_csv(samples_path);
  const std::size_t i1 = samples.index_of(t1);
  std::string csv = "t,y_hat,diag_tail\n";
  auto row = [&csv](double t, double y, double tail) {
    csv += gp::io::format_double(t) + ',' + gp::io::format_double(y) + ',' +
           gp::io::format_double(tail) + '\n';
  };
  if (mode == "eta") {
    const auto eta = eta_seeds(approx, eta_path, spec_path, t1);
    const auto window = samples.slice(i1, samples.size() - i1);
    const auto state = gp::make_eta_state(approx.a, eta, window);
    for (std::size_t i = 0; i < window.size(); ++i) {
      row(window.time(i), gp::predict_from_eta(state, window.time(i)), 0.0);
    }
  } else if (mode == "conv") {
    const double L = history > 0.0 ? history : 10.0 * approx.T;
    const gp::PredictorConfig config(approx, L, samples.step);
    const auto intervals = static_cast<std::size_t>(std::llround(L / samples.step));
    if (i1 < intervals) throw gp::ValidationError("samples before t1 do not cover the history");
    for (std::size_t i = i1; i < samples.size(); ++i) {
      const auto r = gp::predict_convolution(config.approximant.a,
                                             samples.slice(i - intervals, intervals + 1));
      row(samples.time(i), r.value, r.tail);
    }
  } else {
    throw gp::ValidationError("mode must be conv or eta");
  }
  emit(csv, out);
  return 0;
}

int run_fit_eta(const std::string& approx_path, const std::string& samples_path, double t1,
                double theta, int dbar, const std::string& out) {
  const auto approx = gp::io::approximant_from_json(gp::io::read_json(approx_path));
  const auto samples = gp::io::read_samples_csv(samples_path);
  const std::size_t i1 = samples.index_of(t1);
  const std::size_t itheta = samples.index_of(theta);
  if (itheta <= i1) throw gp::ValidationError("theta must follow t1");
  const auto window = samples.slice(i1, itheta - i1 + 1);
  auto times = gp::default_fit_times(t1, theta, approx.T, dbar);
  std::vector<double> zeta;
  for (auto& t : times) {
    t = window.time(window.index_of(t1 + std::floor((t - t1) / window.step + 1e-9) * window.step));
    zeta.push_back(samples.values[samples.index_of(t + approx.T)]);
  }
  const auto fit = gp::fit_eta(approx.a, approx.T, theta, times, zeta, window);
  if (fit.near_singular) std::cerr << "warning: fit matrix is near singular\n";
  emit(gp::io::to_json(fit, t1).dump(2) + "\n", out);
  return 0;
}

int run_eval(const std::string& config_path, bool pin, const std::string& out) {
  gp::harness::ExperimentConfig cfg;
  try {
    cfg = gp::harness::load_config(config_path);
  } catch (const gp::ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir = out.empty() ? cfg.out_dir : fs::path(out);
  const auto report = gp::harness::run_sweep(cfg);
  gp::harness::emit_report(report, gp::harness::ReportFormat::Csv, dir / "report.csv");
  gp::harness::emit_report(report, gp::harness::ReportFormat::Json, dir / "report.json");
  if (pin) {
    const auto pinned = gp::harness::run_sweep(gp::harness::pinned_settings(cfg));
    gp::io::write_text(dir / "fixtures.json", gp::harness::fixtures_json(pinned));
  }
  const auto failing = report.failing_rows();
  std::cout << report.rows.size() - failing.size() << "/" << report.rows.size()
            << " rows pass\n";
  for (auto i : failing) {
    const auto& r = report.rows[i];
    std::cout << "FAIL row " << i << ": " << r.spec << " d=" << r.d
              << " nu=" << gp::io::format_double(r.nu) << " " << gp::harness::to_string(r.mode);
    if (!r.error.empty()) std::cout << " (" << r.error << ")";
    std::cout << "\n";
  }
  return failing.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear prediction of signals with a spectral gap"};
  app.require_subcommand(1);

  double T = 1.0;
  double omega = 1.0;
  double nu = 1.0;
  int d = 0;
  int nodes = 0;
  std::string taper = "gaussian";
  std::string out;
  auto* approx = app.add_subcommand("approx", "Fit and certify an approximant");
  approx->add_option("--T", T, "prediction horizon")->required();
  approx->add_option("--omega", omega, "gap half-width")->required();
  approx->add_option("--taper", taper, "gaussian, exponential or lorentzian");
  approx->add_option("--nu", nu, "taper scale in (0, 1]")->required();
  approx->add_option("--d", d, "number of coefficients")->required();
  approx->add_option("--nodes", nodes, "fit nodes (default max(8d, 64))");
  approx->add_option("--out", out, "output JSON (stdout if omitted)");

  std::string spec_path;
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  auto* synth = app.add_subcommand("synth", "Sample a spectrum spec on a uniform grid");
  synth->add_option("--spec", spec_path)->required();
  synth->add_option("--t0", t0)->required();
  synth->add_option("--t1", t1)->required();
  synth->add_option("--dt", dt)->required();
  synth->add_option("--out", out);

  std::string approx_path;
  std::string samples_path;
  std::string mode = "conv";
  std::string eta_path;
  double history = 0.0;
  auto* predict = app.add_subcommand("predict", "Predict x(t + T) from samples");
  predict->add_option("--approx", approx_path)->required();
  predict->add_option("--samples", samples_path)->required();
  predict->add_option("--mode", mode)->check(CLI::IsMember({"conv", "eta"}));
  predict->add_option("--t1", t1, "first prediction time")->required();
  predict->add_option("--history", history, "conv history length (default 10 T)");
  predict->add_option("--eta", eta_path, "eta JSON from fit-eta");
  predict->add_option("--spec", spec_path, "seed eta exactly from a spectrum spec");
  predict->add_option("--out", out);

  double theta = 0.0;
  int dbar = 0;
  auto* fit = app.add_subcommand("fit-eta", "Fit the initial integrals from observed futures");
  fit->add_option("--approx", approx_path)->required();
  fit->add_option("--samples", samples_path)->required();
  fit->add_option("--t1", t1)->required();
  fit->add_option("--theta", theta)->required();
  fit->add_option("--dbar", dbar)->required();
  fit->add_option("--out", out);

  std::string config_path;
  bool pin = false;
  auto* eval = app.add_subcommand("eval", "Run an experiment sweep");
  eval->add_option("--config", config_path)->required();
  eval->add_flag("--pin", pin, "also write fixtures.json at doubled precision");
  eval->add_option("--out", out, "output directory (overrides out_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*approx) return run_approx(T, omega, taper, nu, d, nodes, out);
    if (*synth) return run_synth(spec_path, t0, t1, dt, out);
    if (*predict) {
      return run_predict(approx_path, samples_path, mode, t1, history, eta_path, spec_path, out);
    }
    if (*fit) return run_fit_eta(approx_path, samples_path, t1, theta, dbar, out);
    if (*eval) return run_eval(config_path, pin, out);
  } catch (const gp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
