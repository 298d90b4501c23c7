#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace ddforge {

struct QuadratureControl {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  std::size_t max_panels = 400000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  double abs_integral = 0.0;  // integral of |f|, the roundoff scale
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

struct GKPanel {
  double a, b, value, error, abs_value;
  bool operator<(const GKPanel& o) const { return error < o.error; }
};

// 21-point Gauss-Kronrod rule with the QUADPACK error heuristic.
template <class F>
GKPanel gauss_kronrod_21(F& f, double a, double b) {
  static constexpr double xgk[11] = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  static constexpr double wgk[11] = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  static constexpr double wg[5] = {
      0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
      0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
      0.295524224714752870173892994651338};

  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = f(centr);
  double resg = 0.0;
  double resk = wgk[10] * fc;
  double resabs = std::abs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double absc = hlgth * xgk[j];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += wgk[j] * (f1 + f2);
    resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double h = std::abs(hlgth);
  resabs *= h;
  resasc *= h;
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * hlgth, err, resabs};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod over the panels defined by `breakpoints`
// (sorted, at least two entries). The panel with the largest error estimate
// is bisected until the summed error meets max(abs_tol, rel_tol |I|), the
// error reaches the roundoff floor of the integral of |f|, or max_panels is hit.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints,
                                    const QuadratureControl& ctl = {}) {
  QuadratureResult out;
  std::priority_queue<detail::GKPanel> heap;
  double total = 0.0, error = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k + 1] > breakpoints[k])) continue;
    auto p = detail::gauss_kronrod_21(f, breakpoints[k], breakpoints[k + 1]);
    out.evaluations += 21;
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto abs_sum = [&] {
    double s = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      s += copy.top().abs_value;
      copy.pop();
    }
    return s;
  };
  double roundoff_floor = 100.0 * eps * abs_sum();
  std::size_t iterations = 0;
  while (!heap.empty()) {
    const double tol = std::max(ctl.abs_tol, ctl.rel_tol * std::abs(total));
    if (error <= tol || error <= roundoff_floor) {
      out.converged = true;
      break;
    }
    if (heap.size() >= ctl.max_panels) break;
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto left = detail::gauss_kronrod_21(f, worst.a, mid);
    auto right = detail::gauss_kronrod_21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (++iterations % 256 == 0) roundoff_floor = 100.0 * eps * abs_sum();
  }
  // Re-sum from the panels to drop the drift of the incremental updates.
  std::vector<detail::GKPanel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  out.value = 0.0;
  out.abs_error = 0.0;
  out.abs_integral = 0.0;
  double c = 0.0;  // Kahan compensation
  for (const auto& p : panels) {
    const double y = p.value - c;
    const double t = out.value + y;
    c = (t - out.value) - y;
    out.value = t;
    out.abs_error += p.error;
    out.abs_integral += p.abs_value;
  }
  if (!out.converged) {
    const double tol = std::max(ctl.abs_tol, ctl.rel_tol * std::abs(out.value));
    out.converged = out.abs_error <= tol || out.abs_error <= 100.0 * eps * out.abs_integral;
  }
  return out;
}

}  // namespace ddforge
