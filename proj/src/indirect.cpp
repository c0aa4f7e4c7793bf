#include "obsent/indirect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "obsent/errors.hpp"

namespace obsent::indirect {

using linalg::Complex;

namespace {

using Index = Eigen::Index;

/// (I (x) <a|) X (I (x) |b>) for X on system (x) probe.
ComplexMatrix probe_block(const ComplexMatrix& x, std::size_t n, std::size_t m, const Eigen::VectorXcd& bra,
                          const Eigen::VectorXcd& ket) {
  const auto ni = static_cast<Index>(n);
  const auto mi = static_cast<Index>(m);
  ComplexMatrix out = ComplexMatrix::Zero(ni, ni);
  for (Index s = 0; s < ni; ++s)
    for (Index t = 0; t < ni; ++t) {
      Complex acc = 0.0;
      for (Index a = 0; a < mi; ++a) {
        if (bra(a) == Complex(0.0)) continue;
        for (Index b = 0; b < mi; ++b) acc += std::conj(bra(a)) * x(s * mi + a, t * mi + b) * ket(b);
      }
      out(s, t) = acc;
    }
  return out;
}

/// Permutation exchanging |k,m> and |m,k> whenever both k, m < min(N, M).
ComplexMatrix embedded_swap(std::size_t n, std::size_t m) {
  const std::size_t l = std::min(n, m);
  const auto dim = static_cast<Index>(n * m);
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      const auto from = static_cast<Index>(k * m + j);
      const auto to = (k < l && j < l) ? static_cast<Index>(j * m + k) : from;
      u(to, from) = 1.0;
    }
  return u;
}

bool is_diagonal(const ComplexMatrix& x) {
  return (x - ComplexMatrix(x.diagonal().asDiagonal())).norm() <= 1e-12;
}

/// Unitary taking sigma to diagonal form. A state that is already diagonal is
/// left untouched so that its level labels are kept; otherwise eigenvalues
/// come out ascending.
ComplexMatrix probe_diagonalizer(const DensityMatrix& sigma) {
  if (is_diagonal(sigma.matrix())) return linalg::identity(sigma.dim());
  return linalg::herm_eigen(sigma.matrix()).eigenvectors.adjoint();
}

CoarseGraining computational_basis(std::size_t m) {
  return basis_cg(linalg::identity(m));
}

}  // namespace

ProbeProtocol::ProbeProtocol(std::size_t system_dim, DensityMatrix probe_state, ComplexMatrix interaction,
                             CoarseGraining probe_measurement)
    : system_dim_(system_dim),
      probe_state_(std::move(probe_state)),
      interaction_(std::move(interaction)),
      probe_measurement_(std::move(probe_measurement)) {
  const auto joint = static_cast<Index>(system_dim_ * probe_state_.dim());
  if (system_dim_ == 0) throw ShapeError("ProbeProtocol: system dimension must be positive");
  if (interaction_.rows() != joint || interaction_.cols() != joint)
    throw ShapeError("ProbeProtocol: interaction must act on system (x) probe");
  if (!linalg::is_unitary(interaction_, kUnitaryTol))
    throw ValidationError("ProbeProtocol: interaction is not unitary");
  if (probe_measurement_.dim() != probe_state_.dim())
    throw ShapeError("ProbeProtocol: probe measurement dimension differs from the probe");
}

CoarseGraining induced_cg(const ProbeProtocol& protocol) {
  const std::size_t n = protocol.system_dim();
  const std::size_t m = protocol.probe_dim();
  const auto sigma = linalg::herm_eigen(protocol.probe_state().matrix());
  const ComplexMatrix& u = protocol.interaction();

  std::vector<QuantumOperation> ops;
  for (const auto& probe_op : protocol.probe_measurement().ops()) {
    std::vector<ComplexMatrix> kraus;
    for (const auto& pk : probe_op.kraus()) {
      const ComplexMatrix lifted = linalg::tensor(linalg::identity(n), pk) * u;
      for (Index s = 0; s < sigma.eigenvalues.size(); ++s) {
        const double weight = sigma.eigenvalues(s);
        if (weight <= 1e-15) continue;
        for (std::size_t out = 0; out < m; ++out) {
          Eigen::VectorXcd bra = Eigen::VectorXcd::Zero(static_cast<Index>(m));
          bra(static_cast<Index>(out)) = 1.0;
          ComplexMatrix k = std::sqrt(weight) * probe_block(lifted, n, m, bra, sigma.eigenvectors.col(s));
          if (k.norm() > 1e-15) kraus.push_back(std::move(k));
        }
      }
    }
    if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(static_cast<Index>(n), static_cast<Index>(n)));
    ops.emplace_back(std::move(kraus), probe_op.label());
  }
  return CoarseGraining(std::move(ops));
}

ComplexMatrix apply_protocol(const ProbeProtocol& protocol, const ComplexMatrix& x, std::size_t outcome) {
  const std::size_t n = protocol.system_dim();
  const std::size_t m = protocol.probe_dim();
  if (x.rows() != static_cast<Index>(n) || x.cols() != static_cast<Index>(n))
    throw ShapeError("apply_protocol: operator does not act on the system");
  const auto& op = protocol.probe_measurement()[outcome];
  const ComplexMatrix joint = protocol.interaction() * linalg::tensor(x, protocol.probe_state().matrix()) *
                              protocol.interaction().adjoint();
  ComplexMatrix projected = ComplexMatrix::Zero(joint.rows(), joint.cols());
  for (const auto& pk : op.kraus()) {
    const ComplexMatrix lift = linalg::tensor(linalg::identity(n), pk);
    projected += lift * joint * lift.adjoint();
  }
  return linalg::partial_trace(projected, n, m, linalg::Keep::A);
}

double joint_probability(const ProbeProtocol& protocol, const DensityMatrix& rho, std::size_t outcome) {
  const std::size_t n = protocol.system_dim();
  if (rho.dim() != n) throw ShapeError("joint_probability: state does not live on the system");
  const auto& op = protocol.probe_measurement()[outcome];
  const ComplexMatrix joint = protocol.interaction() * linalg::tensor(rho.matrix(), protocol.probe_state().matrix()) *
                              protocol.interaction().adjoint();
  double p = 0.0;
  for (const auto& pk : op.kraus()) {
    const ComplexMatrix lift = linalg::tensor(linalg::identity(n), pk);
    p += (lift * joint * lift.adjoint()).trace().real();
  }
  return p;
}

ComplexMatrix swap_unitary(std::size_t n) {
  if (n == 0) throw PreconditionError("swap_unitary: n must be >= 1");
  return embedded_swap(n, n);
}

linalg::HermitianEigen descending_eigenbasis(const DensityMatrix& rho) {
  const auto eig = linalg::herm_eigen(rho.matrix());
  const auto n = eig.eigenvalues.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto lex_less = [&](Index a, Index b) {
    for (Index r = 0; r < n; ++r) {
      const Complex x = eig.eigenvectors(r, a);
      const Complex y = eig.eigenvectors(r, b);
      if (std::abs(x.real() - y.real()) > 1e-12) return x.real() > y.real();
      if (std::abs(x.imag() - y.imag()) > 1e-12) return x.imag() > y.imag();
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double la = eig.eigenvalues(a);
    const double lb = eig.eigenvalues(b);
    if (std::abs(la - lb) > 1e-12) return la > lb;
    return lex_less(a, b);
  });
  linalg::HermitianEigen out{linalg::RealVector(n), ComplexMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = eig.eigenvalues(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = eig.eigenvectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

namespace {

ProbeProtocol swap_protocol(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const std::size_t n = rho.dim();
  const std::size_t m = sigma.dim();
  const ComplexMatrix diag_rho = descending_eigenbasis(rho).eigenvectors.adjoint();
  const ComplexMatrix diag_sigma = probe_diagonalizer(sigma);
  ComplexMatrix u = embedded_swap(n, m) * linalg::tensor(diag_rho, diag_sigma);
  return ProbeProtocol(n, sigma, std::move(u), computational_basis(m));
}

}  // namespace

ProbeProtocol partial_swap_protocol(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (sigma.dim() > rho.dim()) {
    std::ostringstream os;
    os << "partial_swap_protocol: probe dimension " << sigma.dim() << " exceeds system dimension " << rho.dim();
    throw CapacityError(os.str(), static_cast<double>(sigma.dim()));
  }
  return swap_protocol(rho, sigma);
}

ClosedFormOutcomes partial_swap_closed_form(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const std::size_t n = rho.dim();
  const std::size_t m = sigma.dim();
  if (m > n) throw CapacityError("partial_swap_closed_form: probe larger than system", static_cast<double>(m));
  const auto rho_eig = descending_eigenbasis(rho).eigenvalues;
  // Probe eigenvalues in the order the protocol's diagonal basis presents them.
  const ComplexMatrix diag_sigma = probe_diagonalizer(sigma);
  const Eigen::VectorXd sigma_diag = (diag_sigma * sigma.matrix() * diag_sigma.adjoint()).diagonal().real();

  double rest = 0.0;
  for (std::size_t k = m; k < n; ++k) rest += rho_eig(static_cast<Index>(k));
  ClosedFormOutcomes out;
  for (std::size_t i = 0; i < m; ++i) {
    const double s = sigma_diag(static_cast<Index>(i));
    out.p.push_back(rho_eig(static_cast<Index>(i)) + rest * s);
    out.volume.push_back(1.0 + static_cast<double>(n - m) * s);
  }
  return out;
}

EntropyValue mixed_probe_entropy(const DensityMatrix& rho, std::size_t probe_dim) {
  const std::size_t n = rho.dim();
  if (probe_dim == 0 || probe_dim > n)
    throw PreconditionError("mixed_probe_entropy: probe dimension must be in [1, dim rho]");
  const auto rho_eig = descending_eigenbasis(rho).eigenvalues;
  const auto m = static_cast<double>(probe_dim);
  double rest = 0.0;
  for (std::size_t k = probe_dim; k < n; ++k) rest += rho_eig(static_cast<Index>(k));
  double s = std::log(static_cast<double>(n) / m);
  for (std::size_t i = 0; i < probe_dim; ++i) {
    const double q = std::max(0.0, rho_eig(static_cast<Index>(i))) + rest / m;
    if (q > kProbabilityFloor) s -= q * std::log(q);
  }
  return EntropyValue(s);
}

std::size_t numerical_rank(const DensityMatrix& rho, double tol) {
  const auto eig = linalg::herm_eigen(rho.matrix());
  std::size_t r = 0;
  for (Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > tol) ++r;
  return r;
}

ProbeProtocol optimal_probe_protocol(const DensityMatrix& rho, std::size_t probe_dim) {
  const std::size_t rank = numerical_rank(rho);
  if (probe_dim < rank + 1) {
    std::ostringstream os;
    os << "optimal_probe_protocol: probe dimension " << probe_dim << " must be at least rank + 1 = " << rank + 1;
    throw PreconditionError(os.str());
  }
  Eigen::VectorXcd level = Eigen::VectorXcd::Zero(static_cast<Index>(probe_dim));
  level(static_cast<Index>(rank)) = 1.0;
  return swap_protocol(rho, DensityMatrix::pure(level));
}

EntropyValue optimal_probe_entropy(const DensityMatrix& rho, std::size_t probe_dim) {
  return observational(CoarseGrainingVector(induced_cg(optimal_probe_protocol(rho, probe_dim))), rho);
}

}  // namespace obsent::indirect
