#pragma once

// Coarse-grainings induced on a system by coupling it to a probe, letting them
// interact through a unitary, and measuring the probe. Includes the swap and
// partial-swap constructions and their closed-form outcome statistics.

#include <cstddef>
#include <vector>

#include "obsent/coarsegrain.hpp"
#include "obsent/entropy.hpp"

namespace obsent::indirect {

inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kRankTol = 1e-10;

/// System (dim N) (x) probe (dim M); U acts on the joint space, system index major.
class ProbeProtocol {
 public:
  ProbeProtocol(std::size_t system_dim, DensityMatrix probe_state, ComplexMatrix interaction,
                CoarseGraining probe_measurement);

  std::size_t system_dim() const noexcept { return system_dim_; }
  std::size_t probe_dim() const noexcept { return probe_state_.dim(); }
  const DensityMatrix& probe_state() const noexcept { return probe_state_; }
  const ComplexMatrix& interaction() const noexcept { return interaction_; }
  const CoarseGraining& probe_measurement() const noexcept { return probe_measurement_; }

 private:
  std::size_t system_dim_;
  DensityMatrix probe_state_;
  ComplexMatrix interaction_;
  CoarseGraining probe_measurement_;
};

/// System coarse-graining with Kraus operators
/// K_{i,m,m'} = sqrt(sigma_m) <m'| (I (x) P_i) U |m>, zero operators dropped.
CoarseGraining induced_cg(const ProbeProtocol& protocol);

/// tr_probe[(I (x) P_i) U (x (x) sigma) U^dagger (I (x) P_i)], the defining
/// partial-trace expression of outcome i.
ComplexMatrix apply_protocol(const ProbeProtocol& protocol, const ComplexMatrix& x, std::size_t outcome);

/// Outcome probability computed in the joint space:
/// tr[(I (x) P_i) U (rho (x) sigma) U^dagger (I (x) P_i)].
double joint_probability(const ProbeProtocol& protocol, const DensityMatrix& rho, std::size_t outcome);

/// U |m,k> <k,m| summed over k, m < n: exchanges two n-level factors.
ComplexMatrix swap_unitary(std::size_t n);

/// Eigenvalues (descending) and matching eigenvectors (columns). Ties are
/// broken by descending lexicographic order of the phase-fixed eigenvectors,
/// so a diagonal state keeps the computational basis order.
linalg::HermitianEigen descending_eigenbasis(const DensityMatrix& rho);

/// Partial swap after diagonalizing both states; probe measured in its
/// diagonal basis. rho's eigenvalues are taken in descending order; a diagonal
/// sigma keeps its basis order, any other sigma is taken in ascending
/// eigenvalue order. Requires dim(sigma) <= dim(rho).
ProbeProtocol partial_swap_protocol(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Closed-form statistics of the partial swap:
/// p_i = rho_i + p sigma_i, V_i = 1 + (N - M) sigma_i with p the weight of the
/// eigenvalues that stay in the system.
struct ClosedFormOutcomes {
  std::vector<double> p;
  std::vector<double> volume;
};
ClosedFormOutcomes partial_swap_closed_form(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Entropy of the partial swap with a completely mixed probe of dimension M:
/// -sum_i (rho_i + p/M) ln(rho_i + p/M) + ln(N/M).
EntropyValue mixed_probe_entropy(const DensityMatrix& rho, std::size_t probe_dim);

std::size_t numerical_rank(const DensityMatrix& rho, double tol = kRankTol);

/// Swap protocol with the probe prepared in |R+1> (R = rank of rho), which
/// saturates S_C = S_vN. Probe dimensions larger than the system are allowed;
/// only the first min(N, M) levels are exchanged.
ProbeProtocol optimal_probe_protocol(const DensityMatrix& rho, std::size_t probe_dim);

EntropyValue optimal_probe_entropy(const DensityMatrix& rho, std::size_t probe_dim);

}  // namespace obsent::indirect
