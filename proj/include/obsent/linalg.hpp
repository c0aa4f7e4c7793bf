#pragma once

// Small dense complex-matrix kernel. Everything is sized for the qubit-to-
// ququint experiments the library targets: system (x) probe dimensions up to
// 64. Nothing stops larger inputs, but tolerances and test coverage assume
// that envelope.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace obsent::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Frobenius tolerance on ||X - X^dagger|| used by every Hermiticity gate.
inline constexpr double kHermitianTol = 1e-10;

/// Which factor of a bipartite operator survives a partial trace.
enum class Keep { A, B };

struct HermitianEigen {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary

  ComplexMatrix reconstruct() const;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product, `a` index major and `b` index minor.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over one factor of a (dim_a*dim_b)-square operator.
ComplexMatrix partial_trace(const ComplexMatrix& x, std::size_t dim_a,
                            std::size_t dim_b, Keep keep);

/// Eigendecomposition of a Hermitian matrix. Each eigenvector is phase-fixed
/// so that its first non-negligible component is real and positive.
HermitianEigen herm_eigen(const ComplexMatrix& x);

/// exp(scale * h) for Hermitian h, via the spectral decomposition.
ComplexMatrix herm_expm(const ComplexMatrix& h, Complex scale);

Complex trace(const ComplexMatrix& x);
double frobenius(const ComplexMatrix& x);
double hermiticity_residual(const ComplexMatrix& x);
bool is_hermitian(const ComplexMatrix& x, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix& u, double tol);
bool all_finite(const ComplexMatrix& x);

/// Smallest eigenvalue of the Hermitian part of x.
double min_eigenvalue(const ComplexMatrix& x);

ComplexMatrix identity(std::size_t n);
ComplexMatrix diagonal(const RealVector& values);
ComplexMatrix projector(const Eigen::VectorXcd& v);

}  // namespace obsent::linalg
