#ifndef GAP_PREDICT_QUADRATURE_HPP
#define GAP_PREDICT_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "gap_predict/error.hpp"

namespace gap_predict::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

inline constexpr double kDefaultAbsTol = 1e-10;
inline constexpr int kDefaultPanelBudget = 10000;

namespace detail {

// Kronrod 15-point abscissae (nonnegative half) with the embedded 7-point
// Gauss rule at the odd positions.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const {
    if (error != other.error) return error < other.error;
    return lo > other.lo;
  }
};

template <typename F>
Panel gauss_kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[static_cast<std::size_t>(j)] * sum;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * sum;
  }
  return Panel{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration over [breaks.front(), breaks.back()]
/// with the given interior breakpoints as initial panels. The panel with the
/// largest error estimate is bisected until the summed estimate is below
/// `abs_tol`. Panels are summed left to right, so the result does not depend
/// on refinement order.
template <typename F>
Result integrate(F&& f, std::span<const double> breaks, double abs_tol = kDefaultAbsTol,
                 int panel_budget = kDefaultPanelBudget) {
  Result out;
  if (breaks.size() < 2) return out;
  std::priority_queue<detail::Panel> queue;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    auto p = detail::gauss_kronrod15(f, breaks[i], breaks[i + 1]);
    total_error += p.error;
    queue.push(p);
  }
  while (!(total_error <= abs_tol) && !queue.empty()) {
    if (!std::isfinite(total_error)) {
      throw QuadratureError("integrand is not finite on the interval", total_error);
    }
    if (static_cast<int>(queue.size()) >= panel_budget) {
      throw QuadratureError("adaptive quadrature exceeded its panel budget", total_error);
    }
    const auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::gauss_kronrod15(f, worst.lo, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    // Guard the running sum against drift from repeated add/subtract.
    if (total_error <= abs_tol) {
      double exact = 0.0;
      auto copy = queue;
      while (!copy.empty()) {
        exact += copy.top().error;
        copy.pop();
      }
      total_error = exact;
    }
  }

  std::vector<detail::Panel> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const detail::Panel& x, const detail::Panel& y) { return x.lo < y.lo; });
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  out.panels = static_cast<int>(panels.size());
  return out;
}

template <typename F>
Result integrate(F&& f, double lo, double hi, double abs_tol = kDefaultAbsTol,
                 int panel_budget = kDefaultPanelBudget) {
  const std::array<double, 2> breaks{lo, hi};
  return integrate(std::forward<F>(f), std::span<const double>(breaks), abs_tol, panel_budget);
}

}  // namespace gap_predict::quadrature

#endif  // GAP_PREDICT_QUADRATURE_HPP
