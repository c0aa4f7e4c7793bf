#pragma once

// Coarse-grainings as complete sets of quantum operations (Kraus sets),
// sequences of them, the POVM elements they induce, and the outcome table
// (probability, macrostate volume) a sequence produces on a state.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "obsent/linalg.hpp"

namespace obsent {

using linalg::ComplexMatrix;

/// Outcome label of a sequence of measurements, one entry per coarse-graining.
using MultiIndex = std::vector<std::size_t>;

/// Assignment from flat fine-outcome index to flat coarse-outcome index.
using IndexMap = std::vector<std::size_t>;

inline constexpr double kStateTol = 1e-10;
inline constexpr double kCompletenessTol = 1e-9;

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, double tol = kStateTol);

  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  /// Qubit family U diag(cos^2 a, sin^2 a) U^dagger with
  /// U = diag(e^{i phi}, e^{-i phi}) * [[cos t, sin t], [-sin t, cos t]].
  static DensityMatrix qubit(double phi, double theta, double alpha);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return m_; }

 private:
  ComplexMatrix m_;
};

/// One coarse-graining element A(X) = sum_m K_m X K_m^dagger.
class QuantumOperation {
 public:
  QuantumOperation(std::vector<ComplexMatrix> kraus, std::string label);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::string label_;
  std::size_t dim_ = 0;
};

/// Complete set of quantum operations: sum_i sum_m K_im^dagger K_im = I.
class CoarseGraining {
 public:
  explicit CoarseGraining(std::vector<QuantumOperation> ops, double tol = kCompletenessTol);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ops_.size(); }
  const QuantumOperation& operator[](std::size_t i) const { return ops_.at(i); }
  const std::vector<QuantumOperation>& ops() const noexcept { return ops_; }

  /// Frobenius norm of sum K^dagger K - I.
  double completeness_residual() const;

  /// Single-outcome coarse-graining {I(.)I}.
  static CoarseGraining trivial(std::size_t dim);

 private:
  std::vector<QuantumOperation> ops_;
  std::size_t dim_ = 0;
};

/// Ordered, non-empty sequence of coarse-grainings of the same dimension.
class CoarseGrainingVector {
 public:
  explicit CoarseGrainingVector(std::vector<CoarseGraining> sequence);
  CoarseGrainingVector(CoarseGraining single);  // NOLINT: implicit on purpose

  std::size_t dim() const noexcept { return sequence_.front().dim(); }
  std::size_t length() const noexcept { return sequence_.size(); }
  const std::vector<CoarseGraining>& sequence() const noexcept { return sequence_; }

  /// Number of outcomes of each coarse-graining.
  std::vector<std::size_t> shape() const;
  /// Total number of multi-indices.
  std::size_t outcome_count() const;

  /// All multi-indices, lexicographic with the first coarse-graining slowest.
  std::vector<MultiIndex> indices() const;
  MultiIndex unflatten(std::size_t flat) const;
  std::size_t flatten(const MultiIndex& index) const;

  /// Sequence extended by one more coarse-graining.
  CoarseGrainingVector appended(const CoarseGraining& next) const;

 private:
  void check_index(const MultiIndex& index) const;
  std::vector<CoarseGraining> sequence_;
};

struct PovmElement {
  MultiIndex index;
  ComplexMatrix matrix;
};

struct OutcomeEntry {
  MultiIndex index;
  double p = 0.0;
  double volume = 0.0;
};

struct OutcomeTable {
  std::size_t dim = 0;
  std::vector<OutcomeEntry> entries;

  /// Throws ValidationError unless sum p = 1, sum V = dim (1e-9) and p, V >= -1e-12.
  void validate() const;
};

/// One projector per distinct eigenvalue of `observable`. Eigenvalues closer
/// than `degeneracy_tol` to their predecessor are merged; the default is
/// 1e-8 times the spectral range.
CoarseGraining projective_cg(const ComplexMatrix& observable,
                             std::optional<double> degeneracy_tol = std::nullopt);

/// Rank-1 projectors onto the columns of a unitary.
CoarseGraining basis_cg(const ComplexMatrix& unitary);

ComplexMatrix apply(const QuantumOperation& op, const ComplexMatrix& x);

/// Composed operation A_{i_n} ... A_{i_1}; its Kraus list holds every product
/// K_{i_n m_n} ... K_{i_1 m_1}, zero products included.
QuantumOperation compose(const CoarseGrainingVector& v, const MultiIndex& index);

/// Pi_i = sum_m K_im^dagger K_im of the composed operation.
PovmElement povm_element(const CoarseGrainingVector& v, const MultiIndex& index);

/// POVM elements of every multi-index, in enumeration order.
std::vector<PovmElement> povm(const CoarseGrainingVector& v);

/// p_i = tr A_i(rho), V_i = tr A_i(I) for every multi-index, zero entries kept.
OutcomeTable outcome_table(const CoarseGrainingVector& v, const DensityMatrix& rho);

/// True iff for every coarse outcome j, Pi_j equals the sum of the fine
/// elements mapped onto j (Frobenius tolerance `tol`).
bool is_finer(const CoarseGrainingVector& fine, const CoarseGrainingVector& coarse,
              const IndexMap& map, double tol = 1e-9);

inline constexpr std::size_t kRefinementSearchCap = 12;

/// Exhaustive search for an assignment making `fine` finer than `coarse`.
/// Capped at kRefinementSearchCap fine outcomes.
std::optional<IndexMap> find_refinement(const CoarseGrainingVector& fine,
                                        const CoarseGrainingVector& coarse, double tol = 1e-9);

}  // namespace obsent
