#ifndef GAP_PREDICT_HARNESS_HPP
#define GAP_PREDICT_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "gap_predict/approx.hpp"
#include "gap_predict/error.hpp"
#include "gap_predict/io.hpp"
#include "gap_predict/predictor.hpp"
#include "gap_predict/quadrature.hpp"
#include "gap_predict/signal.hpp"

namespace gap_predict::harness {

enum class Mode { Conv, Eta, FitEta };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Conv:
      return "conv";
    case Mode::Eta:
      return "eta";
    case Mode::FitEta:
      return "fit-eta";
  }
  return "unknown";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "conv") return Mode::Conv;
  if (s == "eta") return Mode::Eta;
  if (s == "fit-eta") return Mode::FitEta;
  throw ValidationError("unknown predictor mode '" + std::string(s) + "'");
}

struct NamedSpec {
  std::string name;
  SpectrumSpec spec;
};

struct TimeGrid {
  double start = 0.0;
  double end = 0.0;
  double dt = 0.0;

  std::size_t count() const {
    return static_cast<std::size_t>(std::floor((end - start) / dt + 1e-9)) + 1;
  }
  double time(std::size_t i) const { return start + static_cast<double>(i) * dt; }
};

struct ExperimentConfig {
  std::vector<NamedSpec> specs;
  double T = 1.0;
  double omega_gap = 1.0;
  TaperFamily taper = TaperFamily::Gaussian;
  std::vector<double> nu_list;
  std::optional<double> eps1_target;
  std::vector<int> d_list;
  TimeGrid grid;
  std::vector<Mode> modes{Mode::Eta};
  double quadrature_step = 0.0;  // 0 selects 1e-3 * T
  double history_length = 0.0;   // 0 selects 10 * T
  double eta_window = 0.0;       // 0 selects T / 2
  double fit_span = 0.0;         // 0 selects 4 * T
  int dbar_factor = 2;
  int fit_nodes = 0;
  int dense_factor = kDefaultDenseFactor;
  std::filesystem::path out_dir = "out";

  double step() const { return quadrature_step > 0.0 ? quadrature_step : 1e-3 * T; }
  double history() const { return history_length > 0.0 ? history_length : 10.0 * T; }
  double window() const { return eta_window > 0.0 ? eta_window : 0.5 * T; }
  double span() const { return fit_span > 0.0 ? fit_span : 4.0 * T; }

  bool uses(Mode m) const { return std::find(modes.begin(), modes.end(), m) != modes.end(); }

  void validate() const {
    auto fail = [](const std::string& msg) { throw ValidationError("config: " + msg); };
    if (!(T > 0.0)) fail("T must be positive");
    if (!(omega_gap > 0.0)) fail("omega_gap must be positive");
    if (specs.empty()) fail("at least one spec file is required");
    for (const auto& s : specs) {
      if (s.spec.omega_gap() < omega_gap) {
        fail("spec '" + s.name + "' has a narrower gap than the configured omega_gap");
      }
    }
    if (nu_list.empty() == !eps1_target.has_value()) {
      fail("give exactly one of nu_list and eps1_target");
    }
    for (double nu : nu_list) {
      if (!(nu > 0.0 && nu <= 1.0)) fail("nu values must lie in (0, 1]");
    }
    if (eps1_target && !(*eps1_target > 0.0)) fail("eps1_target must be positive");
    if (d_list.empty()) fail("d_list is empty");
    for (std::size_t i = 0; i < d_list.size(); ++i) {
      if (d_list[i] < 2) fail("every degree must be at least 2");
      if (i > 0 && d_list[i] <= d_list[i - 1]) fail("d_list must be strictly ascending");
    }
    if (modes.empty()) fail("no predictor modes requested");
    if (!(grid.dt > 0.0) || !(grid.end > grid.start)) fail("t_grid needs start < end and dt > 0");
    const double ratio = grid.dt / step();
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio || static_cast<long long>(rounded) % 2 != 0) {
      fail("t_grid.dt must be an even multiple of quadrature_step");
    }
    if (history() < 10.0 * T) fail("history_length must be at least 10 * T");
    if (window() < grid.dt) fail("eta_window must be at least one grid step");
    if (!(span() > 0.1 * T)) fail("fit_span must exceed T / 10");
    if (dbar_factor < 1) fail("dbar_factor must be at least 1");
    if (dense_factor < 4) fail("dense_factor must be at least 4");
  }
};

// Four periods of the slowest tone, or 4 T when that is longer or the
// spectrum is continuous.
inline double default_window(const ExperimentConfig& c) {
  double window = 4.0 * c.T;
  for (const auto& s : c.specs) {
    for (const auto& t : s.spec.tone_list()) {
      window = std::max(window, 4.0 * 2.0 * std::numbers::pi / t.omega);
    }
  }
  return window;
}

inline ExperimentConfig config_from_json(const io::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    for (const auto& p : j.at("spec_files")) {
      std::filesystem::path path = p.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      c.specs.push_back({path.stem().string(), io::spec_from_json(io::read_json(path))});
    }
    c.T = j.at("T").get<double>();
    c.omega_gap = j.at("Omega").get<double>();
    c.taper = parse_taper_family(j.value("taper", std::string("gaussian")));
    if (j.contains("nu_list")) c.nu_list = j.at("nu_list").get<std::vector<double>>();
    if (j.contains("eps1_target")) c.eps1_target = j.at("eps1_target").get<double>();
    c.d_list = j.at("d_list").get<std::vector<int>>();
    c.quadrature_step = j.value("quadrature_step", 0.0);
    const auto& g = j.at("t_grid");
    c.grid.start = g.at("t_start").get<double>();
    c.grid.dt = g.value("dt", std::min(0.01, c.T / 100.0));
    if (g.contains("t_end")) {
      c.grid.end = g.at("t_end").get<double>();
    } else {
      c.grid.end = c.grid.start + default_window(c);
    }
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
    }
    c.history_length = j.value("history_length", 0.0);
    c.eta_window = j.value("eta_window", 0.0);
    c.fit_span = j.value("fit_span", 0.0);
    c.dbar_factor = j.value("dbar_factor", 2);
    c.fit_nodes = j.value("fit_nodes", 0);
    c.dense_factor = j.value("dense_factor", kDefaultDenseFactor);
    std::filesystem::path out = j.value("out_dir", std::string("out"));
    c.out_dir = out.is_relative() ? base_dir / out : out;
  } catch (const io::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::read_json(path), path.parent_path());
}

struct Slack {
  double quadrature = 0.0;
  double integration = 0.0;
  double tail = 0.0;
  double eps2_grid = 0.0;
  double total() const { return quadrature + integration + tail + eps2_grid; }
};

struct ReportRow {
  std::string spec;
  SpectrumKind kind = SpectrumKind::Tones;
  int d = 0;
  double nu = 0.0;
  Mode mode = Mode::Eta;
  double l1 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps2_check = 0.0;  // eps2 on a grid twice as dense
  double bound_paper = 0.0;
  double bound_tones = 0.0;
  double sup_err = 0.0;
  Slack slack;
  bool pass = false;
  std::string error;

  // Point-mass spectra use the per-tone bound, densities the L1 form.
  double applicable_bound() const {
    return kind == SpectrumKind::Tones ? bound_tones : bound_paper;
  }
};

struct Report {
  std::vector<ReportRow> rows;
  TimeGrid grid;
  double quadrature_step = 0.0;
  int dense_factor = 0;

  std::vector<std::size_t> failing_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].pass) out.push_back(i);
    }
    return out;
  }
  bool all_pass() const { return failing_rows().empty(); }
};

namespace detail {

inline double tone_weight(const SpectrumSpec& spec) {
  double w = 0.0;
  for (const auto& t : spec.tone_list()) w += 2.0 * std::abs(t.c);
  return w;
}

inline double tone_bound(const SpectrumSpec& spec, const TaperSpec& taper, double eps2) {
  double b = 0.0;
  for (const auto& t : spec.tone_list()) {
    b += 2.0 * std::abs(t.c) * (std::abs(1.0 - taper(t.omega)) + eps2);
  }
  return b;
}

// sum_k |a_k| * sum_{j<=k} W^j / j!: propagation of unit errors in the eta
// seeds and samples through the eta-form over a window of length W.
inline double eta_sensitivity(std::span<const double> a, double window) {
  double s = 0.0;
  double term = 1.0;
  double partial = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    partial += term;
    term *= window / static_cast<double>(k + 1);
    s += std::abs(a[k]) * (partial + term);
  }
  return s;
}

// Samples and oracle values shared by every row of one spectrum.
class SpecContext {
 public:
  SpecContext(const ExperimentConfig& cfg, const SpectrumSpec& spec) : cfg_(cfg), spec_(spec) {
    const double h = cfg.step();
    pre_ = 0;
    if (cfg.uses(Mode::Conv)) pre_ = std::max(pre_, even_steps(cfg.history(), h));
    if (cfg.uses(Mode::FitEta)) pre_ = std::max(pre_, even_steps(cfg.T + cfg.span(), h));
    const std::size_t grid_steps = (cfg.grid.count() - 1) * grid_stride();
    const std::size_t post = even_steps(cfg.window(), h) + 2;
    samples_.t0 = cfg.grid.start - static_cast<double>(pre_) * h;
    samples_.step = h;
    samples_.values = sample_grid(spec, samples_.t0, h, pre_ + grid_steps + post + 1);
    future_.resize(cfg.grid.count());
    for (std::size_t g = 0; g < future_.size(); ++g) {
      future_[g] = future_value(spec, cfg.grid.time(g), cfg.T);
    }
  }

  static std::size_t even_steps(double length, double h) {
    return 2 * static_cast<std::size_t>(std::ceil(length / (2.0 * h) - 1e-9));
  }

  std::size_t grid_stride() const {
    return static_cast<std::size_t>(std::llround(cfg_.grid.dt / cfg_.step()));
  }
  std::size_t sample_index(std::size_t grid_index) const {
    return pre_ + grid_index * grid_stride();
  }
  const UniformSamples& samples() const { return samples_; }
  double future(std::size_t g) const { return future_[g]; }
  const SpectrumSpec& spec() const { return spec_; }

  // x(t) from the sample cache when t is a sample time, else recomputed.
  double observed(double t) const {
    const double pos = (t - samples_.t0) / samples_.step;
    const double idx = std::round(pos);
    if (std::abs(pos - idx) <= 1e-6 && idx >= 0.0 &&
        idx < static_cast<double>(samples_.size())) {
      return samples_.values[static_cast<std::size_t>(idx)];
    }
    return sample(spec_, t);
  }

  // Exact eta seeds h_k(x)(t1), k = 1 .. d, cached per window start.
  const std::vector<double>& seeds(std::size_t grid_index, int d) {
    auto& v = seed_cache_[grid_index];
    while (v.size() < static_cast<std::size_t>(d)) {
      v.push_back(exact_hk(spec_, static_cast<int>(v.size()) + 1, cfg_.grid.time(grid_index)));
    }
    return v;
  }

 private:
  const ExperimentConfig& cfg_;
  const SpectrumSpec& spec_;
  std::size_t pre_ = 0;
  UniformSamples samples_;
  std::vector<double> future_;
  std::map<std::size_t, std::vector<double>> seed_cache_;
};

struct Measurement {
  double sup_err = 0.0;
  Slack slack;
};

inline Measurement measure_eta(const ExperimentConfig& cfg, SpecContext& ctx,
                               const Approximant& approx) {
  Measurement m;
  const std::size_t n = cfg.grid.count();
  const auto per_window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.window() / cfg.grid.dt)));
  const double window_len = static_cast<double>(per_window) * cfg.grid.dt;
  for (std::size_t g0 = 0; g0 < n; g0 += per_window) {
    const std::size_t g1 = std::min(n - 1, g0 + per_window - 1);
    const std::size_t s0 = ctx.sample_index(g0);
    const std::size_t s1 = std::max(ctx.sample_index(g1), s0 + 2);
    const auto& eta_full = ctx.seeds(g0, approx.d);
    const std::vector<double> eta(eta_full.begin(), eta_full.begin() + approx.d);
    const auto fine = ctx.samples().slice(s0, s1 - s0 + 1);
    const auto state = make_eta_state(approx.a, eta, fine);
    const auto coarse_state = make_eta_state(approx.a, eta, fine.decimated(2));
    for (std::size_t g = g0; g <= g1; ++g) {
      const double t = cfg.grid.time(g);
      const double y = predict_from_eta(state, t);
      const double y2 = predict_from_eta(coarse_state, t);
      m.sup_err = std::max(m.sup_err, std::abs(ctx.future(g) - y));
      m.slack.integration = std::max(m.slack.integration, std::abs(y - y2));
    }
  }
  m.slack.quadrature =
      quadrature::kDefaultAbsTol * (1.0 + eta_sensitivity(approx.a, window_len));
  return m;
}

inline Measurement measure_conv(const ExperimentConfig& cfg, SpecContext& ctx,
                                const Approximant& approx) {
  Measurement m;
  const double h = cfg.step();
  const std::size_t intervals = SpecContext::even_steps(cfg.history(), h);
  double kernel_mass = 0.0;
  for (std::size_t j = 0; j <= intervals; ++j) {
    kernel_mass += std::abs(kernel_eval(approx.a, static_cast<double>(j) * h)) * h;
  }
  for (std::size_t g = 0; g < cfg.grid.count(); ++g) {
    const std::size_t s = ctx.sample_index(g);
    const auto window = ctx.samples().slice(s - intervals, intervals + 1);
    const auto fine = predict_convolution(approx.a, window);
    const auto coarse = predict_convolution(approx.a, window.decimated(2));
    m.sup_err = std::max(m.sup_err, std::abs(ctx.future(g) - fine.value));
    m.slack.integration = std::max(m.slack.integration, std::abs(fine.value - coarse.value));
    m.slack.tail = std::max(m.slack.tail, fine.tail);
  }
  m.slack.quadrature = quadrature::kDefaultAbsTol * (1.0 + kernel_mass);
  return m;
}

// Fit times snapped onto the 2h lattice anchored at t1 so that the coarse
// rerun sees the same times.
inline std::vector<double> snapped_fit_times(double t1, double theta, double T, int count,
                                             double h) {
  auto ts = default_fit_times(t1, theta, T, count);
  const double lattice = 2.0 * h;
  const auto max_steps = static_cast<long long>(std::floor((theta - T - t1) / lattice + 1e-9));
  long long prev = 0;
  for (auto& t : ts) {
    long long steps = std::llround((t - t1) / lattice);
    steps = std::min(steps, max_steps);
    if (steps <= prev) throw ValidationError("fit times collide on the sample grid");
    prev = steps;
    t = t1 + static_cast<double>(steps) * lattice;
  }
  return ts;
}

inline Measurement measure_fit_eta(const ExperimentConfig& cfg, SpecContext& ctx,
                                   const Approximant& approx) {
  Measurement m;
  const double h = cfg.step();
  const std::size_t back = SpecContext::even_steps(cfg.T + cfg.span(), h);
  const int dbar = cfg.dbar_factor * approx.d;
  const double window_len = static_cast<double>(back) * h;
  for (std::size_t g = 0; g < cfg.grid.count(); ++g) {
    const std::size_t s = ctx.sample_index(g);
    const auto fine = ctx.samples().slice(s - back, back + 1);
    const double theta = fine.t_end();
    const auto times = snapped_fit_times(fine.t0, theta, cfg.T, dbar, h);
    std::vector<double> zeta(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) zeta[i] = ctx.observed(times[i] + cfg.T);
    const auto coarse = fine.decimated(2);
    const auto fit = fit_eta(approx.a, cfg.T, theta, times, zeta, fine);
    const auto fit2 = fit_eta(approx.a, cfg.T, theta, times, zeta, coarse);
    const double y = predict_from_eta(make_eta_state(approx.a, fit.eta, fine), theta);
    const double y2 = predict_from_eta(make_eta_state(approx.a, fit2.eta, coarse), theta);
    m.sup_err = std::max(m.sup_err, std::abs(ctx.future(g) - y));
    m.slack.integration = std::max(m.slack.integration, std::abs(y - y2));
  }
  m.slack.quadrature =
      quadrature::kDefaultAbsTol * (1.0 + eta_sensitivity(approx.a, window_len));
  return m;
}

}  // namespace detail

/// Fit, certify and measure every (spec, d, nu, mode) combination. Rows are
/// ordered by spec, then d, then nu, then mode as listed in the config.
/// A failing combination is recorded with its error message and the sweep
/// continues.
inline Report run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  Report report;
  report.grid = cfg.grid;
  report.quadrature_step = cfg.step();
  report.dense_factor = cfg.dense_factor;

  for (const auto& named : cfg.specs) {
    const auto& spec = named.spec;
    auto error_rows = [&](const std::vector<double>& nus, const std::vector<int>& ds,
                          const std::string& what) {
      for (int d : ds) {
        for (double nu : nus) {
          for (Mode mode : cfg.modes) {
            ReportRow row;
            row.spec = named.name;
            row.kind = spec.kind();
            row.d = d;
            row.nu = nu;
            row.mode = mode;
            row.eps1 = row.eps2 = row.eps2_check = row.bound_paper = row.bound_tones =
                row.sup_err = std::nan("");
            row.error = what;
            report.rows.push_back(row);
          }
        }
      }
    };

    std::vector<double> nus = cfg.nu_list;
    std::optional<detail::SpecContext> ctx;
    double l1 = 0.0;
    try {
      if (cfg.eps1_target) nus = {select_nu(spec, cfg.taper, *cfg.eps1_target)};
      l1 = l1_budget(spec);
      ctx.emplace(cfg, spec);
    } catch (const std::exception& e) {
      error_rows(nus.empty() ? std::vector<double>{std::nan("")} : nus, cfg.d_list, e.what());
      continue;
    }

    std::vector<double> eps1_by_nu;
    for (double nu : nus) eps1_by_nu.push_back(epsilon1(spec, TaperSpec(cfg.taper, nu)));

    for (int d : cfg.d_list) {
      for (std::size_t ni = 0; ni < nus.size(); ++ni) {
        const TaperSpec taper(cfg.taper, nus[ni]);
        std::optional<Approximant> approx;
        double eps2_check = 0.0;
        try {
          approx = fit_approximant(cfg.T, cfg.omega_gap, taper, d, cfg.fit_nodes,
                                   cfg.dense_factor);
          eps2_check = sup_error(*approx, 2 * cfg.dense_factor);
        } catch (const std::exception& e) {
          error_rows({nus[ni]}, {d}, e.what());
          continue;
        }
        for (Mode mode : cfg.modes) {
          ReportRow row;
          row.spec = named.name;
          row.kind = spec.kind();
          row.d = d;
          row.nu = nus[ni];
          row.mode = mode;
          row.l1 = l1;
          row.eps1 = eps1_by_nu[ni];
          row.eps2 = approx->eps2;
          row.eps2_check = eps2_check;
          row.bound_paper = (row.eps1 + row.eps2 * l1) / (2.0 * std::numbers::pi);
          row.bound_tones = spec.kind() == SpectrumKind::Tones
                                ? detail::tone_bound(spec, taper, row.eps2)
                                : std::nan("");
          try {
            detail::Measurement meas;
            switch (mode) {
              case Mode::Eta:
                meas = detail::measure_eta(cfg, *ctx, *approx);
                break;
              case Mode::Conv:
                meas = detail::measure_conv(cfg, *ctx, *approx);
                break;
              case Mode::FitEta:
                meas = detail::measure_fit_eta(cfg, *ctx, *approx);
                break;
            }
            row.sup_err = meas.sup_err;
            row.slack = meas.slack;
            const double weight = spec.kind() == SpectrumKind::Tones
                                      ? detail::tone_weight(spec)
                                      : l1 / (2.0 * std::numbers::pi);
            row.slack.eps2_grid = std::max(0.0, eps2_check - row.eps2) * weight;
            row.pass = std::isfinite(row.sup_err) &&
                       row.sup_err <= row.applicable_bound() + row.slack.total();
          } catch (const std::exception& e) {
            row.sup_err = std::nan("");
            row.error = e.what();
            row.pass = false;
          }
          report.rows.push_back(row);
        }
      }
    }
  }
  return report;
}

inline std::string report_csv(const Report& report) {
  using io::format_double;
  std::string out = "spec,d,nu,eps1,eps2,bound_paper,bound_tones,sup_err,slack,pass,mode\n";
  for (const auto& r : report.rows) {
    out += r.spec + ',' + std::to_string(r.d) + ',' + format_double(r.nu) + ',' +
           format_double(r.eps1) + ',' + format_double(r.eps2) + ',' +
           format_double(r.bound_paper) + ',' + format_double(r.bound_tones) + ',' +
           format_double(r.sup_err) + ',' + format_double(r.slack.total()) + ',' +
           (r.pass ? "true" : "false") + ',' + std::string(to_string(r.mode)) + '\n';
  }
  return out;
}

namespace detail {

inline std::string json_number(double v) {
  return std::isfinite(v) ? io::format_double(v) : "null";
}

inline std::string json_string(const std::string& s) { return io::json(s).dump(); }

}  // namespace detail

// Written by hand so that every float carries 17 significant digits.
inline std::string report_json(const Report& report) {
  using detail::json_number;
  using detail::json_string;
  std::string out = "{\n";
  out += "  \"grid\": {\"start\": " + json_number(report.grid.start) +
         ", \"end\": " + json_number(report.grid.end) + ", \"dt\": " + json_number(report.grid.dt) +
         "},\n";
  out += "  \"quadrature_step\": " + json_number(report.quadrature_step) + ",\n";
  out += "  \"dense_factor\": " + std::to_string(report.dense_factor) + ",\n";
  out += "  \"rows\": [";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"spec\": " + json_string(r.spec) +
           ", \"kind\": " + json_string(r.kind == SpectrumKind::Tones ? "tones" : "bump") +
           ", \"mode\": " + json_string(std::string(to_string(r.mode))) +
           ", \"d\": " + std::to_string(r.d) + ", \"nu\": " + json_number(r.nu) +
           ", \"l1_budget\": " + json_number(r.l1) + ", \"eps1\": " + json_number(r.eps1) +
           ", \"eps2\": " + json_number(r.eps2) + ", \"eps2_check\": " + json_number(r.eps2_check) +
           ", \"bound_paper\": " + json_number(r.bound_paper) +
           ", \"bound_tones\": " + json_number(r.bound_tones) +
           ", \"applicable_bound\": " +
           json_string(r.kind == SpectrumKind::Tones ? "tones" : "paper") +
           ", \"sup_err\": " + json_number(r.sup_err) + ", \"slack\": {\"quadrature\": " +
           json_number(r.slack.quadrature) + ", \"integration\": " +
           json_number(r.slack.integration) + ", \"tail\": " + json_number(r.slack.tail) +
           ", \"eps2_grid\": " + json_number(r.slack.eps2_grid) +
           ", \"total\": " + json_number(r.slack.total()) + "}" +
           ", \"pass\": " + (r.pass ? "true" : "false") +
           ", \"error\": " + (r.error.empty() ? std::string("null") : json_string(r.error)) + "}";
  }
  out += "\n  ],\n  \"failing_rows\": [";
  const auto failing = report.failing_rows();
  for (std::size_t i = 0; i < failing.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(failing[i]);
  }
  out += "],\n  \"all_pass\": ";
  out += report.all_pass() ? "true" : "false";
  out += "\n}\n";
  return out;
}

enum class ReportFormat { Csv, Json };

inline void emit_report(const Report& report, ReportFormat format,
                        const std::filesystem::path& path) {
  if (report.rows.empty()) throw ValidationError("refusing to emit an empty report");
  io::write_text(path, format == ReportFormat::Csv ? report_csv(report) : report_json(report));
}

/// Regression constants from a high-precision rerun: dense factor and
/// quadrature resolution both doubled.
inline ExperimentConfig pinned_settings(ExperimentConfig cfg) {
  cfg.quadrature_step = cfg.step() / 2.0;
  cfg.dense_factor *= 2;
  return cfg;
}

inline std::string fixtures_json(const Report& pinned) {
  using detail::json_number;
  using detail::json_string;
  std::string out = "{\n  \"quadrature_step\": " + json_number(pinned.quadrature_step) +
                    ",\n  \"dense_factor\": " + std::to_string(pinned.dense_factor) +
                    ",\n  \"rows\": [";
  for (std::size_t i = 0; i < pinned.rows.size(); ++i) {
    const auto& r = pinned.rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"spec\": " + json_string(r.spec) +
           ", \"mode\": " + json_string(std::string(to_string(r.mode))) +
           ", \"d\": " + std::to_string(r.d) + ", \"nu\": " + json_number(r.nu) +
           ", \"eps2\": " + json_number(r.eps2) + ", \"sup_err\": " + json_number(r.sup_err) +
           ", \"bound\": " + json_number(r.applicable_bound()) + "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

struct Verdict {
  bool pass = true;
  bool nu_checked = false;
  std::vector<std::string> violations;
};

/// Checks that the sup error does not grow with d (10% relative tolerance)
/// and, when at least three nu values are present, that the best error over
/// d does not grow as nu decreases.
inline Verdict convergence_check(const Report& report, double rel_tol = 0.10) {
  using Key = std::tuple<std::string, std::string, double>;
  std::map<Key, std::vector<std::pair<int, double>>> by_nu;
  for (const auto& r : report.rows) {
    if (!r.error.empty() || !std::isfinite(r.sup_err)) continue;
    by_nu[{r.spec, std::string(to_string(r.mode)), r.nu}].push_back({r.d, r.sup_err});
  }
  bool covered = false;
  Verdict v;
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> best;
  for (auto& [key, series] : by_nu) {
    std::sort(series.begin(), series.end());
    if (series.size() >= 3) covered = true;
    double best_err = series.front().second;
    for (std::size_t i = 1; i < series.size(); ++i) {
      const double prev = series[i - 1].second;
      const double cur = series[i].second;
      best_err = std::min(best_err, cur);
      if (cur > prev * (1.0 + rel_tol)) {
        v.pass = false;
        v.violations.push_back(std::get<0>(key) + "/" + std::get<1>(key) +
                               " nu=" + io::format_double(std::get<2>(key)) + ": d " +
                               std::to_string(series[i - 1].first) + " -> " +
                               std::to_string(series[i].first) + " error " +
                               io::format_double(prev) + " -> " + io::format_double(cur));
      }
    }
    best[{std::get<0>(key), std::get<1>(key)}].push_back({std::get<2>(key), best_err});
  }
  if (!covered) {
    throw ValidationError("convergence check needs at least three ascending d at a fixed nu");
  }
  for (auto& [key, series] : best) {
    if (series.size() < 3) continue;
    v.nu_checked = true;
    std::sort(series.begin(), series.end(), [](auto& x, auto& y) { return x.first > y.first; });
    for (std::size_t i = 1; i < series.size(); ++i) {
      if (series[i].second > series[i - 1].second * (1.0 + rel_tol)) {
        v.pass = false;
        v.violations.push_back(key.first + "/" + key.second + ": nu " +
                               io::format_double(series[i - 1].first) + " -> " +
                               io::format_double(series[i].first) + " best error " +
                               io::format_double(series[i - 1].second) + " -> " +
                               io::format_double(series[i].second));
      }
    }
  }
  return v;
}

}  // namespace gap_predict::harness

#endif  // GAP_PREDICT_HARNESS_HPP
