#ifndef GAP_PREDICT_PREDICTOR_HPP
#define GAP_PREDICT_PREDICTOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gap_predict/approx.hpp"
#include "gap_predict/error.hpp"
#include "gap_predict/linalg.hpp"
#include "gap_predict/quadrature.hpp"

namespace gap_predict {

inline constexpr double kSpacingJitter = 1e-9;
inline constexpr double kNearSingularCond = 1e12;

/// Samples x(t0 + i * step), i = 0 .. size-1.
struct UniformSamples {
  double t0 = 0.0;
  double step = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * step; }
  double t_end() const { return time(values.empty() ? 0 : values.size() - 1); }

  // Index of the grid point at time t; throws unless t lies on the grid.
  std::size_t index_of(double t) const {
    const double pos = (t - t0) / step;
    const double idx = std::round(pos);
    if (std::abs(pos - idx) > 1e-6 || idx < 0.0 || idx >= static_cast<double>(values.size())) {
      throw ValidationError("time " + std::to_string(t) + " is not a sample of this grid");
    }
    return static_cast<std::size_t>(idx);
  }

  UniformSamples slice(std::size_t first, std::size_t count) const {
    if (first + count > values.size()) throw ValidationError("sample slice out of range");
    UniformSamples out{time(first), step, {}};
    out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                      values.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
  }

  // Every `factor`-th sample, starting with the first.
  UniformSamples decimated(std::size_t factor) const {
    UniformSamples out{t0, step * static_cast<double>(factor), {}};
    for (std::size_t i = 0; i < values.size(); i += factor) out.values.push_back(values[i]);
    return out;
  }

  /// Build from explicit (t, x) pairs, rejecting spacing jitter above 1e-9
  /// relative to the mean step.
  static UniformSamples from_points(std::span<const double> ts, std::span<const double> xs) {
    if (ts.size() != xs.size()) throw ValidationError("time and value columns differ in length");
    if (ts.size() < 2) throw ValidationError("need at least two samples");
    const double step = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    if (!(step > 0.0)) throw ValidationError("sample times must increase");
    for (std::size_t i = 1; i < ts.size(); ++i) {
      const double expected = ts.front() + static_cast<double>(i) * step;
      if (std::abs(ts[i] - expected) > kSpacingJitter * std::max(step, std::abs(expected))) {
        throw ValidationError("samples are not uniformly spaced near t = " + std::to_string(ts[i]));
      }
    }
    return UniformSamples{ts.front(), step, std::vector<double>(xs.begin(), xs.end())};
  }
};

struct PredictorConfig {
  Approximant approximant;
  double history_length = 0.0;
  double quadrature_step = 0.0;

  PredictorConfig(Approximant approx, double history, double step)
      : approximant(std::move(approx)), history_length(history), quadrature_step(step) {
    if (!(step > 0.0)) throw ValidationError("quadrature step must be positive");
    if (!(history >= 10.0 * approximant.T)) {
      throw ValidationError("history length must be at least 10 * T");
    }
  }
};

/// K(t) = sum_k a_k t^{k-1} / (k-1)!, nested as
/// a_1 + t (a_2 + t/2 (a_3 + t/3 (...))).
inline double kernel_eval(std::span<const double> a, double t) {
  if (t < 0.0) throw ValidationError("kernel argument must be nonnegative");
  double acc = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) {
    acc = a[i] + acc * (t / static_cast<double>(i + 1));
  }
  return acc;
}

struct ConvolutionResult {
  double value = 0.0;
  // |K(L) x(t - L)| * L, a crude indicator of the discarded history.
  double tail = 0.0;
};

namespace detail {

// Composite Simpson weights for n >= 3 equally spaced points; an odd
// interval count finishes with the 3/8 rule on the last three intervals.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 3) throw ValidationError("Simpson quadrature needs at least 3 samples");
  std::vector<double> w(n, 0.0);
  const std::size_t intervals = n - 1;
  const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t s = simpson_end;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

}  // namespace detail

/// Truncated kernel convolution int_{t-L}^{t} K(t - tau) x(tau) dtau over the
/// whole window, t being the last sample time.
inline ConvolutionResult predict_convolution(std::span<const double> a,
                                             const UniformSamples& window) {
  const std::size_t n = window.size();
  const auto w = detail::simpson_weights(n, window.step);
  ConvolutionResult out;
  for (std::size_t j = 0; j < n; ++j) {
    const double lag = static_cast<double>(n - 1 - j) * window.step;
    out.value += w[j] * kernel_eval(a, lag) * window.values[j];
  }
  const double length = static_cast<double>(n - 1) * window.step;
  out.tail = std::abs(kernel_eval(a, length) * window.values.front()) * length;
  return out;
}

/// Prediction at the last sample using the configured history length.
inline ConvolutionResult predict_convolution(const PredictorConfig& config,
                                             const UniformSamples& samples) {
  if (std::abs(samples.step - config.quadrature_step) >
      kSpacingJitter * config.quadrature_step) {
    throw ValidationError("sample spacing differs from the configured quadrature step");
  }
  const auto intervals =
      static_cast<std::size_t>(std::llround(config.history_length / samples.step));
  if (samples.size() < intervals + 1) {
    throw ValidationError("samples do not cover the configured history length");
  }
  const auto window = samples.slice(samples.size() - intervals - 1, intervals + 1);
  return predict_convolution(config.approximant.a, window);
}

/// Cumulative trapezoid integrals f_1 .. f_d of the samples from their first
/// time; f[k-1][i] is f_k at sample i, and f_k vanishes at the first sample.
inline std::vector<std::vector<double>> iterated_integrals(const UniformSamples& samples, int d) {
  if (samples.size() < 2) throw ValidationError("need at least two samples to integrate");
  if (d < 0) throw ValidationError("order must be nonnegative");
  const double h = samples.step;
  std::vector<std::vector<double>> f(static_cast<std::size_t>(d));
  const std::vector<double>* prev = &samples.values;
  for (auto& fk : f) {
    fk.assign(samples.size(), 0.0);
    for (std::size_t i = 1; i < fk.size(); ++i) {
      fk[i] = fk[i - 1] + 0.5 * h * ((*prev)[i - 1] + (*prev)[i]);
    }
    prev = &fk;
  }
  return f;
}

/// Reference-time representation of the predictor: eta_k = h_k(x)(t1) plus
/// running integrals f_k of the observed samples from t1.
struct EtaState {
  std::vector<double> a;
  std::vector<double> eta;
  UniformSamples samples;  // starts at t1
  std::vector<std::vector<double>> f;

  double t1() const { return samples.t0; }
};

inline EtaState make_eta_state(std::span<const double> a, std::span<const double> eta,
                               UniformSamples samples_from_t1) {
  if (eta.size() != a.size()) throw ValidationError("eta and a must have the same length");
  EtaState s;
  s.a.assign(a.begin(), a.end());
  s.eta.assign(eta.begin(), eta.end());
  s.f = iterated_integrals(samples_from_t1, static_cast<int>(a.size()));
  s.samples = std::move(samples_from_t1);
  return s;
}

namespace detail {

// tau^j / j! for j = 0 .. n-1.
inline std::vector<double> scaled_powers(double tau, std::size_t n) {
  std::vector<double> p(n, 1.0);
  for (std::size_t j = 1; j < n; ++j) p[j] = p[j - 1] * tau / static_cast<double>(j);
  return p;
}

// y = sum_k a_k (sum_{l<=k} eta_l tau^{k-l}/(k-l)! + f_k).
inline double eta_combination(std::span<const double> a, std::span<const double> eta,
                              const std::vector<std::vector<double>>& f, std::size_t index,
                              double tau) {
  const auto p = scaled_powers(tau, a.size());
  double y = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double xk = f[k][index];
    for (std::size_t l = 0; l <= k; ++l) xk += eta[l] * p[k - l];
    y += a[k] * xk;
  }
  return y;
}

}  // namespace detail

/// y_d(t) = sum_k a_k x_k(t) with the closed form
/// x_k(t) = sum_{l=1}^{k} eta_l (t - t1)^{k-l} / (k-l)! + f_k(t).
inline double predict_from_eta(const EtaState& state, double t) {
  if (t < state.t1()) throw ValidationError("prediction time precedes the reference time");
  const std::size_t idx = state.samples.index_of(t);
  return detail::eta_combination(state.a, state.eta, state.f, idx,
                                 static_cast<double>(idx) * state.samples.step);
}

/// Same prediction through the defining recursion x_k = eta_k + int x_{k-1},
/// x_0 = x, each integral by cumulative trapezoid. Used as a cross-check.
inline double predict_from_eta_recursive(const EtaState& state, double t) {
  if (t < state.t1()) throw ValidationError("prediction time precedes the reference time");
  const std::size_t idx = state.samples.index_of(t);
  const double h = state.samples.step;
  std::vector<double> prev(state.samples.values.begin(),
                           state.samples.values.begin() + static_cast<std::ptrdiff_t>(idx + 1));
  double y = 0.0;
  for (std::size_t k = 0; k < state.a.size(); ++k) {
    std::vector<double> xk(idx + 1);
    xk[0] = state.eta[k];
    for (std::size_t i = 1; i <= idx; ++i) xk[i] = xk[i - 1] + 0.5 * h * (prev[i - 1] + prev[i]);
    y += state.a[k] * xk[idx];
    prev = std::move(xk);
  }
  return y;
}

struct EtaFit {
  std::vector<double> eta;
  // y_d(t_m, eta) - zeta_m at each fit time.
  std::vector<double> residual;
  double cond = 0.0;
  long rank = 0;
  bool near_singular = false;
};

/// Fit times spread uniformly on [t1 + T/10, theta - T].
inline std::vector<double> default_fit_times(double t1, double theta, double T, int count) {
  if (count < 1) throw ValidationError("need at least one fit time");
  const double lo = t1 + 0.1 * T;
  const double hi = theta - T;
  if (!(hi > lo)) throw ValidationError("theta must exceed t1 + 1.1 T");
  std::vector<double> ts(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    ts[static_cast<std::size_t>(m)] =
        count == 1 ? hi : lo + (hi - lo) * static_cast<double>(m) / static_cast<double>(count - 1);
  }
  return ts;
}

/// Solve sum_k a_k (sum_l c-weighted eta_l + f_k(t_m)) = zeta_m for eta.
/// Square systems are solved exactly, taller ones in the least-squares
/// sense (minimum norm) after column equilibration.
inline EtaFit fit_eta(std::span<const double> a, double T, double theta,
                      std::span<const double> fit_times, std::span<const double> zeta,
                      const UniformSamples& samples_from_t1) {
  const std::size_t d = a.size();
  const std::size_t rows = fit_times.size();
  const double t1 = samples_from_t1.t0;
  if (d == 0) throw ValidationError("empty coefficient vector");
  if (zeta.size() != rows) throw ValidationError("one observation per fit time is required");
  if (rows < d) throw ValidationError("need at least d fit times");
  for (std::size_t m = 0; m < rows; ++m) {
    if (!(fit_times[m] > t1)) throw ValidationError("fit times must follow t1");
    if (m > 0 && !(fit_times[m] > fit_times[m - 1])) {
      throw ValidationError("fit times must be strictly increasing");
    }
  }
  if (fit_times.back() > theta - T + 1e-9 * std::max(1.0, std::abs(theta))) {
    throw ValidationError("fit times must not exceed theta - T (future values unobserved)");
  }

  const auto f = iterated_integrals(samples_from_t1, static_cast<int>(d));
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
  for (std::size_t m = 0; m < rows; ++m) {
    const std::size_t idx = samples_from_t1.index_of(fit_times[m]);
    const auto p = detail::scaled_powers(fit_times[m] - t1, d);
    double phi = 0.0;
    for (std::size_t k = 0; k < d; ++k) phi += a[k] * f[k][idx];
    for (std::size_t l = 0; l < d; ++l) {
      double entry = 0.0;
      for (std::size_t k = l; k < d; ++k) entry += a[k] * p[k - l];
      M(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = entry;
    }
    rhs(static_cast<Eigen::Index>(m)) = zeta[m] - phi;
  }

  const auto solved = linalg::scaled_min_norm_solve(M, rhs);
  EtaFit out;
  out.eta.assign(solved.x.data(), solved.x.data() + solved.x.size());
  const Eigen::VectorXd r = M * solved.x - rhs;
  out.residual.assign(r.data(), r.data() + r.size());
  out.cond = solved.cond;
  out.rank = solved.rank;
  out.near_singular = !(solved.cond <= kNearSingularCond);
  return out;
}

/// Leftmost zero of `fn` in [lo, hi]: the first sign change on a scan with
/// spacing `scan_step`, refined by bisection to 1e-10. Empty when the scan
/// finds no sign change.
inline std::optional<double> find_left_root(const std::function<double(double)>& fn, double lo,
                                            double hi, double scan_step) {
  if (!(hi > lo) || !(scan_step > 0.0)) throw ValidationError("invalid root search window");
  double a = lo;
  double fa = fn(a);
  if (fa == 0.0) return a;
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / scan_step));
  for (std::size_t i = 1; i <= steps; ++i) {
    const double b = std::min(hi, lo + static_cast<double>(i) * scan_step);
    const double fb = fn(b);
    if (fb == 0.0) return b;
    if ((fa < 0.0) != (fb < 0.0)) {
      double left = a;
      double right = b;
      double fleft = fa;
      while (right - left > 1e-10) {
        const double mid = 0.5 * (left + right);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fleft < 0.0) != (fm < 0.0)) {
          right = mid;
        } else {
          left = mid;
          fleft = fm;
        }
      }
      return 0.5 * (left + right);
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

/// Sampled variant: brackets on the samples, then bisects the piecewise
/// linear interpolant.
inline std::optional<double> find_left_root(const UniformSamples& window) {
  if (window.size() < 2) throw ValidationError("need at least two samples");
  auto interp = [&window](double t) {
    const double pos = std::clamp((t - window.t0) / window.step, 0.0,
                                  static_cast<double>(window.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(pos), window.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return window.values[i] + frac * (window.values[i + 1] - window.values[i]);
  };
  return find_left_root(interp, window.t0, window.t_end(), window.step);
}

/// h_k(t) = int_{R}^{t} h_{k-1}(s) ds with R a zero of h_k, the root-anchored
/// form of the iterated antiderivative.
inline double root_anchored_integral(const std::function<double(double)>& previous, double root,
                                     double t) {
  if (t == root) return 0.0;
  const double lo = std::min(root, t);
  const double hi = std::max(root, t);
  const double v = quadrature::integrate(previous, lo, hi, 1e-12).value;
  return t >= root ? v : -v;
}

}  // namespace gap_predict

#endif  // GAP_PREDICT_PREDICTOR_HPP
