#ifndef GAP_PREDICT_SIGNAL_HPP
#define GAP_PREDICT_SIGNAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "gap_predict/error.hpp"
#include "gap_predict/quadrature.hpp"
#include "gap_predict/taper.hpp"

namespace gap_predict {

enum class SpectrumKind { Tones, Bump };

// x(t) contribution Re[c exp(i omega t)]; omega is the positive
// representative, the conjugate partner at -omega is implicit.
struct Tone {
  double omega = 0.0;
  std::complex<double> c;
};

// X(i w) = amplitude * exp(-1 / (1 - s^2)), s = (|w| - center) / half_width.
struct Bump {
  double center = 0.0;
  double half_width = 0.0;
  double amplitude = 0.0;
};

inline double bump_profile(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

/// Exactly described real signal whose Fourier transform vanishes on
/// (-omega_gap, omega_gap).
class SpectrumSpec {
 public:
  static SpectrumSpec tones(double omega_gap, std::vector<Tone> tones) {
    SpectrumSpec s(SpectrumKind::Tones, omega_gap);
    for (auto& tone : tones) {
      if (tone.omega < 0.0) {
        tone.omega = -tone.omega;
        tone.c = std::conj(tone.c);
      }
      if (!(tone.omega >= omega_gap) || !std::isfinite(tone.omega)) {
        throw ValidationError("tone at |omega| = " + std::to_string(tone.omega) +
                              " lies inside the spectral gap");
      }
    }
    s.tones_ = std::move(tones);
    return s;
  }

  static SpectrumSpec bumps(double omega_gap, std::vector<Bump> bumps) {
    SpectrumSpec s(SpectrumKind::Bump, omega_gap);
    for (const auto& b : bumps) {
      if (!(b.half_width > 0.0) || !std::isfinite(b.center) || !std::isfinite(b.amplitude)) {
        throw ValidationError("bump needs a positive half width and finite parameters");
      }
      if (!(b.center - b.half_width >= omega_gap)) {
        throw ValidationError("bump support reaches below the spectral gap");
      }
    }
    s.bumps_ = std::move(bumps);
    return s;
  }

  SpectrumKind kind() const { return kind_; }
  double omega_gap() const { return omega_gap_; }
  const std::vector<Tone>& tone_list() const { return tones_; }
  const std::vector<Bump>& bump_list() const { return bumps_; }
  bool empty() const { return tones_.empty() && bumps_.empty(); }

  // Real spectral density X(i w) of a bump spectrum; zero for tones.
  double density(double omega) const {
    const double w = std::abs(omega);
    double x = 0.0;
    for (const auto& b : bumps_) x += b.amplitude * bump_profile((w - b.center) / b.half_width);
    return x;
  }

 private:
  SpectrumSpec(SpectrumKind kind, double omega_gap) : kind_(kind), omega_gap_(omega_gap) {
    if (!(omega_gap > 0.0) || !std::isfinite(omega_gap)) {
      throw ValidationError("gap half-width must be positive");
    }
  }

  SpectrumKind kind_;
  double omega_gap_;
  std::vector<Tone> tones_;
  std::vector<Bump> bumps_;
};

inline SpectrumSpec scaled(const SpectrumSpec& spec, double factor) {
  if (spec.kind() == SpectrumKind::Tones) {
    auto tones = spec.tone_list();
    for (auto& t : tones) t.c *= factor;
    return SpectrumSpec::tones(spec.omega_gap(), std::move(tones));
  }
  auto bumps = spec.bump_list();
  for (auto& b : bumps) b.amplitude *= factor;
  return SpectrumSpec::bumps(spec.omega_gap(), std::move(bumps));
}

// Union of two spectra of the same kind; the gap is the narrower of the two.
inline SpectrumSpec merged(const SpectrumSpec& x, const SpectrumSpec& y) {
  if (x.kind() != y.kind()) throw ValidationError("cannot merge spectra of different kinds");
  const double gap = std::min(x.omega_gap(), y.omega_gap());
  if (x.kind() == SpectrumKind::Tones) {
    auto tones = x.tone_list();
    tones.insert(tones.end(), y.tone_list().begin(), y.tone_list().end());
    return SpectrumSpec::tones(gap, std::move(tones));
  }
  auto bumps = x.bump_list();
  bumps.insert(bumps.end(), y.bump_list().begin(), y.bump_list().end());
  return SpectrumSpec::bumps(gap, std::move(bumps));
}

namespace detail {

// (1/pi) * sum_b amplitude_b * integral over the bump of profile * weight(w),
// computed per bump in the s variable.
template <typename Weight>
double integrate_bumps(const SpectrumSpec& spec, Weight&& weight) {
  const auto& bumps = spec.bump_list();
  if (bumps.empty()) return 0.0;
  double total = 0.0;
  for (const auto& b : bumps) {
    const double scale = b.amplitude * b.half_width / std::numbers::pi;
    if (scale == 0.0) continue;
    const double tol = quadrature::kDefaultAbsTol / (static_cast<double>(bumps.size()) * std::abs(scale));
    auto integrand = [&](double s) { return bump_profile(s) * weight(b.center + b.half_width * s); };
    total += scale * quadrature::integrate(integrand, -1.0, 1.0, tol).value;
  }
  return total;
}

// 2 * integral_{w >= gap} weight(w) |X(i w)| dw over the union of bump
// supports, with every bump edge as a breakpoint.
template <typename Weight>
double integrate_abs_density(const SpectrumSpec& spec, Weight&& weight) {
  const auto& bumps = spec.bump_list();
  if (bumps.empty()) return 0.0;
  std::vector<double> breaks;
  for (const auto& b : bumps) {
    breaks.push_back(b.center - b.half_width);
    breaks.push_back(b.center + b.half_width);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto integrand = [&](double w) { return weight(w) * std::abs(spec.density(w)); };
  return 2.0 * quadrature::integrate(integrand, std::span<const double>(breaks)).value;
}

// (-i)^k exactly.
inline std::complex<double> minus_i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, -1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, 1.0};
  }
}

// Re[(i w)^{-k} exp(i w t)] = w^{-k} cos(w t - k pi / 2).
inline double shifted_cos(int k, double omega, double t) {
  const double phase = omega * t;
  double v = 0.0;
  switch (k % 4) {
    case 0:
      v = std::cos(phase);
      break;
    case 1:
      v = std::sin(phase);
      break;
    case 2:
      v = -std::cos(phase);
      break;
    default:
      v = -std::sin(phase);
      break;
  }
  return v * std::pow(omega, -k);
}

}  // namespace detail

/// x(t), from the inverse transform x(t) = (1/2 pi) int exp(i w t) X(i w) dw.
inline double sample(const SpectrumSpec& spec, double t) {
  if (spec.kind() == SpectrumKind::Tones) {
    double x = 0.0;
    for (const auto& tone : spec.tone_list()) {
      const double phase = tone.omega * t;
      x += tone.c.real() * std::cos(phase) - tone.c.imag() * std::sin(phase);
    }
    return x;
  }
  return detail::integrate_bumps(spec, [t](double w) { return std::cos(w * t); });
}

inline std::vector<double> sample_grid(const SpectrumSpec& spec, double t0, double step,
                                       std::size_t count) {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = sample(spec, t0 + static_cast<double>(i) * step);
  return xs;
}

/// L1 norm of the spectrum; for tones the point-mass analog 2 * sum |c_j|.
inline double l1_budget(const SpectrumSpec& spec) {
  if (spec.kind() == SpectrumKind::Tones) {
    double s = 0.0;
    for (const auto& tone : spec.tone_list()) s += 2.0 * std::abs(tone.c);
    return s;
  }
  return detail::integrate_abs_density(spec, [](double) { return 1.0; });
}

/// Spectral mass removed by the taper, int (1 - r_nu(w)) |X(i w)| dw.
inline double epsilon1(const SpectrumSpec& spec, const TaperSpec& taper) {
  if (spec.kind() == SpectrumKind::Tones) {
    double s = 0.0;
    for (const auto& tone : spec.tone_list()) {
      s += 2.0 * std::abs(tone.c) * (1.0 - taper(tone.omega));
    }
    return s;
  }
  return detail::integrate_abs_density(spec, [&taper](double w) { return 1.0 - taper(w); });
}

inline SpectrumSpec normalized_l1(const SpectrumSpec& spec) {
  const double budget = l1_budget(spec);
  if (!(budget > 0.0)) throw ValidationError("cannot normalize a zero spectrum");
  return scaled(spec, 1.0 / budget);
}

inline constexpr double kSelectNuFloor = 1e-12;
inline constexpr double kSelectNuRelTol = 1e-3;

/// Largest nu (to relative tolerance 1e-3) with epsilon1 <= target.
/// epsilon1 is non-decreasing in nu, so geometric bisection between
/// 1e-12 and 1 applies.
inline double select_nu(const SpectrumSpec& spec, TaperFamily family, double eps1_target) {
  if (!(eps1_target > 0.0)) throw ValidationError("eps1 target must be positive");
  auto eps1_at = [&](double nu) { return epsilon1(spec, TaperSpec(family, nu)); };
  if (eps1_at(1.0) <= eps1_target) return 1.0;
  double lo = kSelectNuFloor;
  double hi = 1.0;
  if (eps1_at(lo) > eps1_target) {
    throw NumericalError("eps1 target not met even at nu = 1e-12");
  }
  while (hi - lo > kSelectNuRelTol * lo) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (eps1_at(mid) <= eps1_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// k-fold iterated antiderivative h_k(x)(t), transfer function (i w)^{-k},
/// evaluated in the frequency domain.
inline double exact_hk(const SpectrumSpec& spec, int k, double t) {
  if (k < 1) throw ValidationError("exact_hk needs k >= 1");
  if (spec.kind() == SpectrumKind::Tones) {
    double x = 0.0;
    const auto rot = detail::minus_i_power(k);
    for (const auto& tone : spec.tone_list()) {
      const auto z = tone.c * rot * std::polar(1.0, tone.omega * t);
      x += z.real() * std::pow(tone.omega, -k);
    }
    return x;
  }
  return detail::integrate_bumps(spec, [k, t](double w) { return detail::shifted_cos(k, w, t); });
}

inline double future_value(const SpectrumSpec& spec, double t, double T) {
  return sample(spec, t + T);
}

}  // namespace gap_predict

#endif  // GAP_PREDICT_SIGNAL_HPP
