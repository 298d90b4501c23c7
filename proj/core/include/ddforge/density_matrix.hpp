#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ddforge {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

// Computational basis index for |q1 q2>: |00>=0, |01>=1, |10>=2, |11>=3.
// Qubit 1 is the high bit. sigma_z has eigenvalue +1 on |0>.
constexpr int basis_index(int q1, int q2) { return 2 * q1 + q2; }

// sigma_z eigenvalue of qubit `q` (0 or 1) in basis state `index`.
constexpr int z_eigenvalue(int index, int q) {
  const int bit = q == 0 ? (index >> 1) & 1 : index & 1;
  return bit == 0 ? 1 : -1;
}

// Two-qubit density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix4 {
 public:
  DensityMatrix4();  // |00><00|

  // Validates the invariants up to `tol` and throws InvalidArgument on failure.
  static DensityMatrix4 from_matrix(const Matrix4c& m, double tol = 1e-9);
  static DensityMatrix4 pure(const Vector4c& psi);

  const Matrix4c& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  double min_eigenvalue() const;
  double purity() const;

 private:
  explicit DensityMatrix4(const Matrix4c& m) : m_(m) {}
  Matrix4c m_;
};

namespace states {
Vector4c psi_plus_vector();                  // (|01> + |10>)/sqrt(2)
DensityMatrix4 psi_plus();
DensityMatrix4 basis(int index);
DensityMatrix4 maximally_mixed();
}  // namespace states

// Helpers shared by the solvers.
double min_hermitian_eigenvalue(const Matrix4c& m);
double hermiticity_error(const Matrix4c& m);
double fidelity_with_pure(const Matrix4c& rho, const Vector4c& psi);

}  // namespace ddforge
