#include "ddforge/lindblad_swap.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "ddforge/entanglement_metrics.hpp"
#include "ddforge/error.hpp"

namespace ddforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix4c sz(int q) {
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) m(i, i) = z_eigenvalue(i, q);
  return m;
}

using Super = Eigen::Matrix<cplx, 16, 16>;
using SuperVec = Eigen::Matrix<cplx, 16, 1>;

Super generator(const SwapModel& m) {
  Super S;
  for (int col = 0; col < 16; ++col) {
    Matrix4c e = Matrix4c::Zero();
    e(col % 4, col / 4) = 1.0;
    const Matrix4c out = m.rhs(e);
    S.col(col) = Eigen::Map<const SuperVec>(out.data());
  }
  return S;
}

// Accumulated error of n RK4 steps of size h on rho0, from the exact
// one-step propagator of the constant generator.
double rk4_error_estimate(const Super& S, const Matrix4c& rho0, double h, double n_steps) {
  const Super hs = h * S;
  const Super hs2 = hs * hs;
  const Super rk4 = Super::Identity() + hs + hs2 / 2.0 + hs2 * hs / 6.0 + hs2 * hs2 / 24.0;
  const Super exact = hs.exp();
  const SuperVec v = Eigen::Map<const SuperVec>(rho0.data());
  return n_steps * ((rk4 - exact) * v).norm();
}

std::vector<Peak> extrema(std::span<const double> t, std::span<const double> y, double sign) {
  require(t.size() == y.size(), "peak search needs matching samples");
  std::vector<Peak> out;
  for (std::size_t k = 1; k + 1 < y.size(); ++k) {
    const double a = sign * y[k - 1], b = sign * y[k], c = sign * y[k + 1];
    if (!(b > a && b >= c)) continue;
    const double h = 0.5 * (t[k + 1] - t[k - 1]);
    const double denom = a - 2.0 * b + c;
    const double shift = denom == 0.0 ? 0.0 : 0.5 * (a - c) / denom;
    out.push_back({t[k] + shift * h, sign * (b - 0.25 * (a - c) * shift)});
  }
  return out;
}

}  // namespace

void SwapModel::validate() const {
  require(std::isfinite(f1) && std::isfinite(f2) && f1 >= 0.0 && f2 >= 0.0, "qubit frequencies must be >= 0");
  require(std::isfinite(J) && J >= 0.0, "exchange coupling J must be >= 0");
  require(std::isfinite(gamma) && gamma >= 0.0, "dephasing rate gamma must be >= 0");
}

double SwapModel::detuning() const { return kTwoPi * (f2 - f1); }

double SwapModel::coupling() const { return angular_coupling ? kTwoPi * J : J; }

double SwapModel::splitting() const {
  const double d = detuning(), g = coupling();
  return std::sqrt(d * d + 4.0 * g * g);
}

Matrix4c SwapModel::hamiltonian() const {
  double w1 = kTwoPi * f1, w2 = kTwoPi * f2;
  if (frame == SwapFrame::rotating) {
    const double mean = 0.5 * (w1 + w2);
    w1 -= mean;
    w2 -= mean;
  }
  Matrix4c h = 0.5 * w1 * sz(0) + 0.5 * w2 * sz(1);
  h(basis_index(0, 1), basis_index(1, 0)) += coupling();
  h(basis_index(1, 0), basis_index(0, 1)) += coupling();
  return h;
}

Matrix4c SwapModel::rhs(const Matrix4c& rho) const {
  const cplx i(0.0, 1.0);
  const Matrix4c h = hamiltonian();
  Matrix4c out = -i * (h * rho - rho * h);
  const double rate = collapse == CollapseConvention::sqrt_gamma ? gamma : 0.5 * gamma;
  for (int q = 0; q < 2; ++q) {
    const Matrix4c z = sz(q);
    out += rate * (z * rho * z - rho);  // D[sqrt(rate) sz] with sz^2 = 1
  }
  return out;
}

SwapTrajectory evolve_swap(const SwapModel& model, const DensityMatrix4& rho0, std::span<const double> t_grid,
                           const SwapOptions& opt) {
  model.validate();
  require(!t_grid.empty() && t_grid.front() >= 0.0, "swap grid must be non-empty and start at t >= 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k) require(t_grid[k] > t_grid[k - 1], "swap grid must increase");
  require(opt.dt > 0.0 && opt.min_dt > 0.0, "swap step sizes must be > 0");

  const Super S = generator(model);
  const double span = t_grid.back();
  double h = opt.dt;
  while (span > 0.0 && rk4_error_estimate(S, rho0.matrix(), h, std::ceil(span / h)) > opt.global_error_tol) {
    h *= 0.5;
    if (h < opt.min_dt) {
      throw NumericalError("swap: RK4 step refinement fell below min_dt " + std::to_string(opt.min_dt) + " ns");
    }
  }

  SwapTrajectory out;
  out.dt_used = h;
  Matrix4c rho = rho0.matrix();
  const double trace0 = rho.trace().real();
  const Vector4c bell = states::psi_plus_vector();
  auto record = [&](double t) {
    const double drift = std::abs(rho.trace() - trace0);
    out.max_trace_drift = std::max(out.max_trace_drift, drift);
    if (drift > opt.trace_tol) {
      throw NumericalError("swap: trace drift " + std::to_string(drift) + " exceeds " + std::to_string(opt.trace_tol) +
                           " at t=" + std::to_string(t) + " ns");
    }
    const Matrix4c herm = 0.5 * (rho + rho.adjoint());
    out.times.push_back(t);
    out.concurrence.push_back(concurrence_general(herm));
    out.fidelity.push_back(fidelity_with_pure(herm, bell));
    out.purity.push_back((herm * herm).trace().real());
    out.p01.push_back(herm(1, 1).real());
    out.p00_plus_p11.push_back(herm(0, 0).real() + herm(3, 3).real());
    out.states.push_back(herm);
  };

  auto rk4 = [&](double step) {
    const Matrix4c k1 = model.rhs(rho);
    const Matrix4c k2 = model.rhs(rho + 0.5 * step * k1);
    const Matrix4c k3 = model.rhs(rho + 0.5 * step * k2);
    const Matrix4c k4 = model.rhs(rho + step * k3);
    rho += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  double t = 0.0;
  for (double target : t_grid) {
    const double gap = target - t;
    if (gap > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(gap / h - 1e-9));
      const double step = gap / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) rk4(step);
      t = target;
    }
    record(target);
  }
  return out;
}

std::vector<Peak> find_peaks(std::span<const double> t, std::span<const double> y) { return extrema(t, y, 1.0); }

std::vector<Peak> find_troughs(std::span<const double> t, std::span<const double> y) { return extrema(t, y, -1.0); }

std::optional<double> oscillation_frequency(std::span<const double> t, std::span<const double> y) {
  const auto peaks = find_peaks(t, y);
  if (peaks.size() < 2) return std::nullopt;
  const double period = (peaks.back().time - peaks.front().time) / static_cast<double>(peaks.size() - 1);
  return kTwoPi / period;
}

std::optional<double> envelope_time_constant(std::span<const double> t, std::span<const double> y) {
  const auto peaks = find_peaks(t, y);
  const auto troughs = find_troughs(t, y);
  std::vector<double> xs, ls;
  for (const auto& p : peaks) {
    // Neighbouring troughs on each side.
    const Peak* before = nullptr;
    const Peak* after = nullptr;
    for (const auto& q : troughs) {
      if (q.time < p.time) before = &q;
      if (q.time > p.time && !after) after = &q;
    }
    if (!before || !after) continue;
    const double amp = p.value - 0.5 * (before->value + after->value);
    if (amp <= 0.0) continue;
    xs.push_back(p.time);
    ls.push_back(std::log(amp));
  }
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ls[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ls[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0.0)) return std::nullopt;
  return -1.0 / slope;
}

}  // namespace ddforge
