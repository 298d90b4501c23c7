#include "ddforge/density_matrix.hpp"

#include <cmath>
#include <string>

#include "ddforge/error.hpp"

namespace ddforge {

DensityMatrix4::DensityMatrix4() : m_(Matrix4c::Zero()) { m_(0, 0) = 1.0; }

DensityMatrix4 DensityMatrix4::from_matrix(const Matrix4c& m, double tol) {
  if (!m.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
  if (hermiticity_error(m) > tol) throw InvalidArgument("density matrix is not Hermitian");
  const cplx tr = m.trace();
  if (std::abs(tr.real() - 1.0) > tol || std::abs(tr.imag()) > tol) {
    throw InvalidArgument("density matrix trace is " + std::to_string(tr.real()) + ", expected 1");
  }
  const double lo = min_hermitian_eigenvalue(m);
  if (lo < -tol) {
    throw InvalidArgument("density matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(lo) + ")");
  }
  return DensityMatrix4(m);
}

DensityMatrix4 DensityMatrix4::pure(const Vector4c& psi) {
  const double n = psi.norm();
  require(n > 0.0, "state vector must be nonzero");
  const Vector4c u = psi / n;
  return DensityMatrix4(u * u.adjoint());
}

double DensityMatrix4::min_eigenvalue() const { return min_hermitian_eigenvalue(m_); }

double DensityMatrix4::purity() const { return (m_ * m_).trace().real(); }

double min_hermitian_eigenvalue(const Matrix4c& m) {
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double hermiticity_error(const Matrix4c& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double fidelity_with_pure(const Matrix4c& rho, const Vector4c& psi) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

namespace states {

Vector4c psi_plus_vector() {
  Vector4c v = Vector4c::Zero();
  v(basis_index(0, 1)) = M_SQRT1_2;
  v(basis_index(1, 0)) = M_SQRT1_2;
  return v;
}

DensityMatrix4 psi_plus() { return DensityMatrix4::pure(psi_plus_vector()); }

DensityMatrix4 basis(int index) {
  require(index >= 0 && index < 4, "basis index must be in [0, 4)");
  Vector4c v = Vector4c::Zero();
  v(index) = 1.0;
  return DensityMatrix4::pure(v);
}

DensityMatrix4 maximally_mixed() { return DensityMatrix4::from_matrix(Matrix4c::Identity() / 4.0); }

}  // namespace states
}  // namespace ddforge
