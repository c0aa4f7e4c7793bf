#include "obsent/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "obsent/errors.hpp"

namespace obsent::linalg {

namespace {

void require_square(const ComplexMatrix& x, const char* what) {
  if (x.rows() != x.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << x.rows() << "x" << x.cols();
    throw ShapeError(os.str());
  }
}

void require_hermitian(const ComplexMatrix& x, const char* what) {
  require_square(x, what);
  const double residual = hermiticity_residual(x);
  if (!(residual <= kHermitianTol)) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (||X - X^dagger||_F = " << residual << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace

ComplexMatrix HermitianEigen::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matmul: inner dimensions differ (" << a.rows() << "x" << a.cols() << " * "
       << b.rows() << "x" << b.cols() << ")";
    throw ShapeError(os.str());
  }
  return a * b;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& x, std::size_t dim_a, std::size_t dim_b,
                            Keep keep) {
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  if (x.rows() != n || x.cols() != n) {
    std::ostringstream os;
    os << "partial_trace: operator is " << x.rows() << "x" << x.cols() << ", expected " << n
       << "x" << n;
    throw ShapeError(os.str());
  }
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (keep == Keep::A) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index k = 0; k < db; ++k) out(i, j) += x(i * db + k, j * db + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < db; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k) out(i, j) += x(k * db + i, k * db + j);
  return out;
}

HermitianEigen herm_eigen(const ComplexMatrix& x) {
  require_hermitian(x, "herm_eigen");
  const ComplexMatrix sym = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ValidationError("herm_eigen: solver did not converge");

  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    const double scale = col.cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > 1e-8 * scale) {
        const Complex phase = std::conj(col(r)) / std::abs(col(r));
        col *= phase;
        col(r) = Complex(col(r).real(), 0.0);
        break;
      }
    }
  }
  return out;
}

ComplexMatrix herm_expm(const ComplexMatrix& h, Complex scale) {
  const HermitianEigen eig = herm_eigen(h);
  Eigen::VectorXcd diag(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i) diag(i) = std::exp(scale * eig.eigenvalues(i));
  return eig.eigenvectors * diag.asDiagonal() * eig.eigenvectors.adjoint();
}

Complex trace(const ComplexMatrix& x) {
  require_square(x, "trace");
  return x.trace();
}

double frobenius(const ComplexMatrix& x) { return x.norm(); }

double hermiticity_residual(const ComplexMatrix& x) {
  if (x.rows() != x.cols()) return std::numeric_limits<double>::infinity();
  return (x - x.adjoint()).norm();
}

bool is_hermitian(const ComplexMatrix& x, double tol) { return hermiticity_residual(x) <= tol; }

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

bool all_finite(const ComplexMatrix& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Complex z = x.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double min_eigenvalue(const ComplexMatrix& x) {
  require_square(x, "min_eigenvalue");
  if (x.size() == 0) return 0.0;
  const ComplexMatrix sym = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

ComplexMatrix identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return ComplexMatrix::Identity(k, k);
}

ComplexMatrix diagonal(const RealVector& values) {
  return values.cast<Complex>().asDiagonal();
}

ComplexMatrix projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

}  // namespace obsent::linalg
