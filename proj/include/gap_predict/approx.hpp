#ifndef GAP_PREDICT_APPROX_HPP
#define GAP_PREDICT_APPROX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gap_predict/error.hpp"
#include "gap_predict/linalg.hpp"
#include "gap_predict/taper.hpp"

namespace gap_predict {

// Real-coefficient polynomial in 1/z, psi(z) = sum_k a_k z^{-k}, fitted so
// that psi(i w) tracks exp(i w T) r_nu(w) on |w| >= omega_gap.
//
// Coefficient vectors are 0-based: entry k-1 holds the coefficient of the
// k-th power.
struct Approximant {
  double T = 0.0;
  double omega_gap = 0.0;
  TaperSpec taper{TaperFamily::Gaussian, 1.0};
  int d = 0;
  std::vector<double> gamma_c;  // even powers only
  std::vector<double> gamma_s;  // odd powers only
  std::vector<double> a;
  double eps2 = 0.0;
  int fit_nodes = 0;
  int dense_factor = 0;
};

struct ParityCoefficients {
  std::vector<double> cosine;  // gamma^c, zero at odd powers
  std::vector<double> sine;    // gamma^s, zero at even powers
};

inline constexpr int kDefaultDenseFactor = 8;

inline int default_fit_nodes(int d) { return std::max(8 * d, 64); }

/// Frequencies w = 1/u for the n Chebyshev-Lobatto points u of
/// [-1/omega_gap, 1/omega_gap], ordered by increasing u. The u = 0 node
/// (odd n) is dropped, so every returned |w| >= omega_gap.
inline std::vector<double> chebyshev_grid(double omega_gap, int n) {
  if (!(omega_gap > 0.0)) throw ValidationError("gap half-width must be positive");
  if (n < 2) throw ValidationError("chebyshev_grid needs at least 2 nodes");
  std::vector<double> omega;
  omega.reserve(static_cast<std::size_t>(n));
  const double denom = 2.0 * (n - 1);
  for (int j = 0; j < n; ++j) {
    const int num = 2 * j - (n - 1);
    if (num == 0) continue;
    const double s = std::sin(std::numbers::pi * num / denom);
    omega.push_back(omega_gap / s);
  }
  return omega;
}

/// Parity-constrained discrete least squares in u = 1/w: even powers of u
/// against cos(T w) r(w), odd powers against sin(T w) r(w).
inline ParityCoefficients fit_parity_ls(double T, const TaperSpec& taper, double omega_gap, int d,
                                        std::span<const double> grid) {
  if (d < 2) {
    throw ValidationError("degree must be at least 2 so that both parities have a basis function");
  }
  if (grid.size() < static_cast<std::size_t>(4 * d)) {
    throw ValidationError("fit grid needs at least 4*d nodes");
  }
  if (!(omega_gap > 0.0)) throw ValidationError("gap half-width must be positive");

  const auto rows = static_cast<Eigen::Index>(grid.size());
  const int n_even = d / 2;
  const int n_odd = (d + 1) / 2;
  Eigen::MatrixXd even(rows, n_even);
  Eigen::MatrixXd odd(rows, n_odd);
  Eigen::VectorXd cos_target(rows);
  Eigen::VectorXd sin_target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double w = grid[static_cast<std::size_t>(i)];
    if (w == 0.0 || !std::isfinite(w)) throw ValidationError("fit grid contains w = 0");
    const double u = 1.0 / w;
    const double r = taper(w);
    cos_target(i) = std::cos(T * w) * r;
    sin_target(i) = std::sin(T * w) * r;
    double p = u;
    for (int k = 1; k <= d; ++k) {
      if (k % 2 == 0) {
        even(i, k / 2 - 1) = p;
      } else {
        odd(i, k / 2) = p;
      }
      p *= u;
    }
  }

  const auto even_fit = linalg::scaled_qr_solve(even, cos_target);
  const auto odd_fit = linalg::scaled_qr_solve(odd, sin_target);

  ParityCoefficients out;
  out.cosine.assign(static_cast<std::size_t>(d), 0.0);
  out.sine.assign(static_cast<std::size_t>(d), 0.0);
  for (int k = 1; k <= d; ++k) {
    if (k % 2 == 0) {
      out.cosine[static_cast<std::size_t>(k - 1)] = even_fit.x(k / 2 - 1);
    } else {
      out.sine[static_cast<std::size_t>(k - 1)] = odd_fit.x(k / 2);
    }
  }
  return out;
}

// k = 2m:   a_k =  (-1)^m gamma^c_k
// k = 2m+1: a_k = -(-1)^m gamma^s_k
inline std::vector<double> gamma_to_a(std::span<const double> gamma_c,
                                      std::span<const double> gamma_s) {
  if (gamma_c.size() != gamma_s.size()) {
    throw ValidationError("gamma_c and gamma_s must have the same length");
  }
  std::vector<double> a(gamma_c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t k = i + 1;
    const std::size_t m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      if (gamma_s[i] != 0.0) {
        throw ValidationError("gamma_s must vanish at even index " + std::to_string(k));
      }
      a[i] = sign * gamma_c[i];
    } else {
      if (gamma_c[i] != 0.0) {
        throw ValidationError("gamma_c must vanish at odd index " + std::to_string(k));
      }
      a[i] = -sign * gamma_s[i];
    }
  }
  return a;
}

inline ParityCoefficients a_to_gamma(std::span<const double> a) {
  ParityCoefficients out;
  out.cosine.assign(a.size(), 0.0);
  out.sine.assign(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t k = i + 1;
    const std::size_t m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      out.cosine[i] = sign * a[i];
    } else {
      out.sine[i] = -sign * a[i];
    }
  }
  return out;
}

/// psi(i w) by Horner recurrence in v = 1/(i w).
inline std::complex<double> eval_psi(std::span<const double> a, double omega) {
  if (omega == 0.0) throw ValidationError("psi has a pole at w = 0");
  const std::complex<double> v(0.0, -1.0 / omega);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = a.size(); i-- > 0;) {
    acc = (acc + a[i]) * v;
  }
  return acc;
}

inline double pointwise_error(std::span<const double> a, double T, const TaperSpec& taper,
                              double omega) {
  const std::complex<double> target = std::polar(taper(omega), omega * T);
  return std::abs(target - eval_psi(a, omega));
}

inline double max_error_on_grid(std::span<const double> a, double T, const TaperSpec& taper,
                                std::span<const double> grid) {
  double worst = 0.0;
  for (double w : grid) worst = std::max(worst, pointwise_error(a, T, taper, w));
  return worst;
}

/// Grid certificate of sup_{|w| >= omega_gap} |exp(i w T) r(w) - psi(i w)|.
///
/// The dense grid has dense_factor * (fit_nodes - 1) + 1 Chebyshev-Lobatto
/// nodes in u, so the fit grid is a subset of it. Inside |u| < u_min, the
/// smallest nonzero dense node, the bound |psi| + r(1/|u|) is evaluated on
/// geometric shells u_min 2^{-j}; r is evaluated at the outer shell edge.
inline double sup_error(std::span<const double> a, double T, double omega_gap,
                        const TaperSpec& taper, int fit_nodes, int dense_factor) {
  if (dense_factor < 4) throw ValidationError("dense_factor must be at least 4");
  if (fit_nodes < 2) throw ValidationError("fit_nodes must be at least 2");
  const int n_dense = dense_factor * (fit_nodes - 1) + 1;
  const auto grid = chebyshev_grid(omega_gap, n_dense);
  double worst = max_error_on_grid(a, T, taper, grid);

  double u_min = 1.0 / omega_gap;
  for (double w : grid) u_min = std::min(u_min, 1.0 / std::abs(w));

  constexpr int kShells = 64;
  double u = u_min;
  for (int j = 0; j <= kShells; ++j) {
    const double w = 1.0 / u;
    const double psi = std::max(std::abs(eval_psi(a, w)), std::abs(eval_psi(a, -w)));
    worst = std::max(worst, psi + taper(w));
    u *= 0.5;
  }
  return worst;
}

inline double sup_error(const Approximant& approx, int dense_factor) {
  return sup_error(approx.a, approx.T, approx.omega_gap, approx.taper, approx.fit_nodes,
                   dense_factor);
}

/// Fit psi_d on a Chebyshev grid of `fit_nodes` nodes (0 selects the
/// default) and certify eps2 on the dense grid.
inline Approximant fit_approximant(double T, double omega_gap, const TaperSpec& taper, int d,
                                   int fit_nodes = 0, int dense_factor = kDefaultDenseFactor) {
  if (!(T > 0.0)) throw ValidationError("prediction horizon T must be positive");
  if (fit_nodes == 0) fit_nodes = default_fit_nodes(d);
  const auto grid = chebyshev_grid(omega_gap, fit_nodes);
  auto gamma = fit_parity_ls(T, taper, omega_gap, d, grid);

  Approximant out;
  out.T = T;
  out.omega_gap = omega_gap;
  out.taper = taper;
  out.d = d;
  out.a = gamma_to_a(gamma.cosine, gamma.sine);
  out.gamma_c = std::move(gamma.cosine);
  out.gamma_s = std::move(gamma.sine);
  out.fit_nodes = fit_nodes;
  out.dense_factor = dense_factor;
  out.eps2 = sup_error(out, dense_factor);
  return out;
}

}  // namespace gap_predict

#endif  // GAP_PREDICT_APPROX_HPP
