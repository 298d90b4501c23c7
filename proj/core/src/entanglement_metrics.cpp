#include "ddforge/entanglement_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddforge/error.hpp"

namespace ddforge {

BellMetrics bell_concurrence_fidelity(double chi) {
  require(chi >= 0.0 && !std::isnan(chi), "dephasing exponent must be >= 0");
  const double c = std::exp(-chi);
  return {c, 0.5 * (1.0 + c)};
}

void XState::validate(double tol) const {
  for (double p : {p00, p01, p10, p11}) require(p >= -tol, "X-state populations must be >= 0");
  require(std::abs(p00 + p01 + p10 + p11 - 1.0) <= tol, "X-state populations must sum to 1");
  require(std::abs(coherence) <= std::sqrt(std::max(0.0, p01 * p10)) + tol,
          "X-state coherence exceeds sqrt(p01 p10)");
}

double xstate_concurrence(const XState& x) {
  x.validate();
  return std::max(0.0, 2.0 * std::abs(x.coherence) - 2.0 * std::sqrt(std::max(0.0, x.p00 * x.p11)));
}

double concurrence_general(const Matrix4c& rho, double psd_tol) {
  const double lo = min_hermitian_eigenvalue(rho);
  if (lo < -psd_tol) {
    throw InvalidArgument("concurrence: density matrix is not PSD (min eigenvalue " + std::to_string(lo) + ")");
  }
  Matrix4c syy = Matrix4c::Zero();
  syy(0, 3) = -1.0;
  syy(3, 0) = -1.0;
  syy(1, 2) = 1.0;
  syy(2, 1) = 1.0;
  const Matrix4c h = 0.5 * (rho + rho.adjoint());
  const Matrix4c tilde = syy * h.conjugate() * syy;
  // Eigenvalues of sqrt(rho) tilde sqrt(rho) equal those of rho tilde and are
  // real and non-negative.
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix4c sqrt_rho = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix4c r = sqrt_rho * tilde * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Matrix4c> rs(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::Vector4d mu = rs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(mu.data(), mu.data() + 4, std::greater<>());
  return std::max(0.0, mu(0) - mu(1) - mu(2) - mu(3));
}

double concurrence_general(const DensityMatrix4& rho) { return concurrence_general(rho.matrix()); }

double bell_fidelity(const Matrix4c& rho) { return fidelity_with_pure(rho, states::psi_plus_vector()); }

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  require(x_.size() == y_.size() && x_.size() >= 2, "interpolation needs at least two samples");
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    require(h[k] > 0.0, "interpolation abscissae must increase strictly");
    delta[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  // Shape-preserving three-point end slopes.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  k = std::min(k, x_.size() - 2);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

std::optional<double> first_crossing(std::span<const double> times, std::span<const double> values,
                                     double threshold) {
  require(times.size() == values.size() && times.size() >= 2, "crossing search needs matching samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError("crossing search: non-finite sample");
  }
  if (values[0] < threshold) return times[0];
  std::size_t k = 1;
  while (k < values.size() && values[k] >= threshold) ++k;
  if (k == values.size()) return std::nullopt;

  const MonotoneCubic f(times, values);
  double lo = times[k - 1], hi = times[k];
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= threshold ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LifetimeReport lifetimes(std::span<const double> times, std::span<const double> concurrence,
                         std::span<const double> fidelity) {
  LifetimeReport r;
  r.tau_c = first_crossing(times, concurrence, kConcurrenceThreshold);
  r.t_0999 = first_crossing(times, fidelity, kFidelityThreshold);
  r.window_end = times.empty() ? 0.0 : times.back();
  return r;
}

LifetimeReport lifetimes(const DephasingCurve& curve) {
  std::vector<double> c(curve.chi.size()), f(curve.chi.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto m = bell_concurrence_fidelity(std::max(0.0, curve.chi[k]));
    c[k] = m.concurrence;
    f[k] = m.fidelity;
  }
  return lifetimes(curve.times, c, f);
}

LifetimeReport protocol_lifetimes(const OUNoiseParams& noise, const SequenceFamily& family,
                                  const CoherencePair& pair, const LifetimeScan& scan) {
  require(scan.points >= 2 && scan.initial_window > 0.0 && scan.max_window >= scan.initial_window,
          "invalid lifetime scan settings");
  // T_0.999 sits far below tau_C, so each threshold gets its own window.
  LifetimeReport out;
  auto scan_threshold = [&](bool concurrence) -> std::pair<std::optional<double>, double> {
    double window = scan.initial_window;
    while (true) {
      std::vector<double> t(scan.points);
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = window * static_cast<double>(k) / (scan.points - 1);
      const auto curve = chi_curve(noise, family, t, pair, ChiMethod::time_domain);
      const auto rep = lifetimes(curve);
      const auto hit = concurrence ? rep.tau_c : rep.t_0999;
      if (hit || window >= scan.max_window) return {hit, window};
      window = std::min(2.0 * window, scan.max_window);
    }
  };
  auto [tc, wc] = scan_threshold(true);
  auto [tf, wf] = scan_threshold(false);
  out.tau_c = tc;
  out.t_0999 = tf;
  out.window_end = std::max(wc, wf);
  return out;
}

}  // namespace ddforge
