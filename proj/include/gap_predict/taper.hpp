#ifndef GAP_PREDICT_TAPER_HPP
#define GAP_PREDICT_TAPER_HPP

#include <cmath>
#include <string>
#include <string_view>

#include "gap_predict/error.hpp"

namespace gap_predict {

enum class TaperFamily { Gaussian, Exponential, Lorentzian };

inline std::string_view to_string(TaperFamily family) {
  switch (family) {
    case TaperFamily::Gaussian:
      return "gaussian";
    case TaperFamily::Exponential:
      return "exponential";
    case TaperFamily::Lorentzian:
      return "lorentzian";
  }
  return "unknown";
}

inline TaperFamily parse_taper_family(std::string_view name) {
  if (name == "gaussian") return TaperFamily::Gaussian;
  if (name == "exponential") return TaperFamily::Exponential;
  if (name == "lorentzian") return TaperFamily::Lorentzian;
  throw ValidationError("unknown taper family '" + std::string(name) + "'");
}

/// Even, strictly decreasing damping profile r(nu * omega) with r(0) = 1.
///
/// The three families are
///   gaussian     r(w) = exp(-w^2)
///   exponential  r(w) = exp(-|w|)
///   lorentzian   r(w) = 1 / (1 + w^2)
/// and nu in (0, 1] stretches the profile so that small nu keeps r close to
/// one over a wider band.
class TaperSpec {
 public:
  TaperSpec(TaperFamily family, double nu) : family_(family), nu_(nu) {
    if (!(nu > 0.0) || nu > 1.0 || !std::isfinite(nu)) {
      throw ValidationError("taper scale nu must lie in (0, 1], got " +
                            std::to_string(nu));
    }
  }

  TaperFamily family() const { return family_; }
  double nu() const { return nu_; }

  // Profile at an already-scaled, nonnegative argument.
  double profile(double w) const {
    switch (family_) {
      case TaperFamily::Gaussian:
        return std::exp(-w * w);
      case TaperFamily::Exponential:
        return std::exp(-w);
      case TaperFamily::Lorentzian:
        return 1.0 / (1.0 + w * w);
    }
    return 0.0;
  }

  // Evaluated through |omega| so that evenness is exact.
  double operator()(double omega) const { return profile(nu_ * std::abs(omega)); }

  bool operator==(const TaperSpec&) const = default;

 private:
  TaperFamily family_;
  double nu_;
};

inline double eval_taper(const TaperSpec& spec, double omega) { return spec(omega); }

/// Frequency M >= 0 at which the taper falls to `level`.
inline double taper_inverse_level(const TaperSpec& spec, double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ValidationError("taper level must lie in (0, 1), got " + std::to_string(level));
  }
  double w = 0.0;
  switch (spec.family()) {
    case TaperFamily::Gaussian:
      w = std::sqrt(-std::log(level));
      break;
    case TaperFamily::Exponential:
      w = -std::log(level);
      break;
    case TaperFamily::Lorentzian:
      w = std::sqrt(1.0 / level - 1.0);
      break;
  }
  return w / spec.nu();
}

}  // namespace gap_predict

#endif  // GAP_PREDICT_TAPER_HPP
