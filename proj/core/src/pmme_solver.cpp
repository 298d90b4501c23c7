#include "ddforge/pmme_solver.hpp"

#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "ddforge/error.hpp"
#include "ddforge/log.hpp"

namespace ddforge {
namespace {

using Super = Eigen::Matrix<cplx, 16, 16>;
using SuperVec = Eigen::Matrix<cplx, 16, 1>;

SuperVec vec(const Matrix4c& m) { return Eigen::Map<const SuperVec>(m.data()); }

Matrix4c unvec(const SuperVec& v) { return Eigen::Map<const Matrix4c>(v.data()); }

Matrix4c sigma_z_diag(int q) {
  Matrix4c m = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) m(i, i) = z_eigenvalue(i, q);
  return m;
}

void track_state(PmmeTrajectory& traj, const Matrix4c& m, double trace0) {
  traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(m.trace() - trace0));
  const double lo = min_hermitian_eigenvalue(m);
  traj.min_eigenvalue = std::min(traj.min_eigenvalue, lo);
  if (lo < -kPositivityTolerance) ++traj.positivity_violations;
}

void report_positivity(const PmmeTrajectory& traj, const char* solver) {
  if (traj.positivity_violations > 0) {
    log_warning(std::string(solver) + ": " + std::to_string(traj.positivity_violations) +
                " states with eigenvalue below -1e-8 (min " + std::to_string(traj.min_eigenvalue) + ")");
  }
}

}  // namespace

DephasingLindbladian DephasingLindbladian::make(double gamma0, double rho) {
  DephasingLindbladian L;
  L.gamma0 = gamma0;
  L.R << 1.0, rho, rho, 1.0;
  L.validate();
  return L;
}

void DephasingLindbladian::validate() const {
  require(std::isfinite(gamma0) && gamma0 >= 0.0, "gamma0 must be finite and >= 0");
  require(R(0, 0) == 1.0 && R(1, 1) == 1.0, "R must have unit diagonal");
  require(std::abs(R(0, 1) - R(1, 0)) <= 1e-14, "R must be symmetric");
  require(std::abs(R(0, 1)) <= 1.0, "R must be positive semidefinite");
}

Matrix4c DephasingLindbladian::apply(const Matrix4c& rho) const {
  Matrix4c out = Matrix4c::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Matrix4c zi = sigma_z_diag(i), zj = sigma_z_diag(j);
      const Matrix4c zz = zi * zj;
      out += R(i, j) * (zi * rho * zj - 0.5 * (zz * rho + rho * zz));
    }
  }
  return 0.5 * gamma0 * out;
}

void MemoryKernel::validate() const {
  require(std::isfinite(tau_c) && tau_c > 0.0, "memory kernel tau_c must be > 0");
}

double MemoryKernel::operator()(double t) const { return t < 0.0 ? 0.0 : std::exp(-t / tau_c) / tau_c; }

Eigen::Matrix4d lindblad_eigenrates(const DephasingLindbladian& L) {
  L.validate();
  Eigen::Matrix4d rates;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const Eigen::Vector2d s(0.5 * (z_eigenvalue(a, 0) - z_eigenvalue(b, 0)),
                              0.5 * (z_eigenvalue(a, 1) - z_eigenvalue(b, 1)));
      rates(a, b) = L.gamma0 * s.dot(L.R * s);
    }
  }
  return rates;
}

double coherence_rate(const DephasingLindbladian& L, const CoherencePair& pair) {
  L.validate();
  pair.validate();
  const Eigen::Vector2d s(pair.s[0], pair.s[1]);
  return L.gamma0 * s.dot(L.R * s);
}

Super superoperator(const DephasingLindbladian& L) {
  L.validate();
  Super S;
  for (int col = 0; col < 16; ++col) {
    SuperVec e = SuperVec::Zero();
    e(col) = 1.0;
    S.col(col) = vec(L.apply(unvec(e)));
  }
  return S;
}

double pmme_scalar_solution(double mu, double tau_c, double t) {
  require(mu >= 0.0 && tau_c > 0.0, "pmme scalar solution needs mu >= 0 and tau_c > 0");
  if (t <= 0.0) return 1.0;
  const double a = mu * tau_c;
  if (std::abs(1.0 - a) > 0.5) return (std::exp(-mu * t) - a * std::exp(-t / tau_c)) / (1.0 - a);
  const double u = t / tau_c;
  const double x = (a - 1.0) * u;
  const double g = x == 0.0 ? 1.0 : -std::expm1(-x) / x;
  return std::exp(-u) * (1.0 + u * g);
}

PmmeTrajectory pmme_evolve_analytic(const DephasingLindbladian& L, const MemoryKernel& k, const DensityMatrix4& rho0,
                                    std::span<const double> times) {
  k.validate();
  const Eigen::Matrix4d rates = lindblad_eigenrates(L);
  PmmeTrajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());
  const Matrix4c& m0 = rho0.matrix();
  const double trace0 = m0.trace().real();
  for (double t : times) {
    require(t >= 0.0, "pmme times must be >= 0");
    Matrix4c m;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) m(a, b) = m0(a, b) * pmme_scalar_solution(rates(a, b), k.tau_c, t);
    track_state(traj, m, trace0);
    traj.states.push_back(m);
  }
  report_positivity(traj, "pmme analytic");
  return traj;
}

PmmeTrajectory pmme_evolve_volterra(const DephasingLindbladian& L, const MemoryKernel& k, const DensityMatrix4& rho0,
                                    double dt, double T) {
  k.validate();
  require(dt > 0.0 && T >= 0.0, "volterra needs dt > 0 and T >= 0");
  require(dt <= k.tau_c / 50.0 * (1.0 + 1e-12), "volterra step must satisfy dt <= tau_c / 50");
  const Super S = superoperator(L);
  const Super E = std::exp(-dt / k.tau_c) * Super((S * dt).exp());
  const double w = dt / (2.0 * k.tau_c);
  const Super A = Super::Identity() - 0.5 * dt * w * S;
  const Eigen::PartialPivLU<Super> lu(A);

  const auto n_steps = static_cast<std::size_t>(std::llround(T / dt));
  PmmeTrajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  SuperVec rho = vec(rho0.matrix());
  SuperVec hist = SuperVec::Zero();
  const double trace0 = rho0.matrix().trace().real();
  traj.times.push_back(0.0);
  traj.states.push_back(rho0.matrix());
  track_state(traj, rho0.matrix(), trace0);
  for (std::size_t n = 0; n < n_steps; ++n) {
    // rho_{n+1} = rho_n + dt/2 L (H_n + H_{n+1}),
    // H_{n+1} = E H_n + w (E rho_n + rho_{n+1}).
    const SuperVec eh = E * hist;
    const SuperVec er = E * rho;
    const SuperVec rhs = rho + 0.5 * dt * (S * (hist + eh + w * er));
    const SuperVec next = lu.solve(rhs);
    hist = eh + w * (er + next);
    rho = next;
    const Matrix4c m = unvec(rho);
    track_state(traj, m, trace0);
    if (traj.max_trace_drift > 1e-6) {
      throw NumericalError("volterra: trace drift " + std::to_string(traj.max_trace_drift) + " exceeds 1e-6 at t=" +
                           std::to_string((n + 1) * dt) + " us; reduce dt");
    }
    traj.times.push_back(static_cast<double>(n + 1) * dt);
    traj.states.push_back(m);
  }
  report_positivity(traj, "pmme volterra");
  return traj;
}

PmmeChi chi_pm(const PmmeTrajectory& traj, int alpha, int beta) {
  require(alpha >= 0 && alpha < 4 && beta >= 0 && beta < 4 && alpha != beta, "chi_pm needs an off-diagonal element");
  require(!traj.states.empty() && traj.states.size() == traj.times.size(), "chi_pm needs a non-empty trajectory");
  const cplx c0 = traj.states.front()(alpha, beta);
  require(std::abs(c0) > 1e-12, "chi_pm needs a nonzero initial coherence");
  PmmeChi out;
  out.curve.method = ChiMethod::pmme;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const double mag = std::abs(traj.states[n](alpha, beta));
    if (mag < 1e-12) break;
    out.curve.times.push_back(traj.times[n]);
    out.curve.chi.push_back(-std::log(mag / std::abs(c0)));
  }
  const auto& t = out.curve.times;
  const auto& x = out.curve.chi;
  out.gamma_inst.assign(t.size(), 0.0);
  if (t.size() >= 2) {
    const std::size_t m = t.size() - 1;
    out.gamma_inst[0] = (x[1] - x[0]) / (t[1] - t[0]);
    out.gamma_inst[m] = (x[m] - x[m - 1]) / (t[m] - t[m - 1]);
    for (std::size_t n = 1; n < m; ++n) out.gamma_inst[n] = (x[n + 1] - x[n - 1]) / (t[n + 1] - t[n - 1]);
  }
  return out;
}

}  // namespace ddforge
