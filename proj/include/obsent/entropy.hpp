#pragma once

// Von Neumann entropy, observational entropy on discrete outcome tables and on
// position grids, the KL decomposition S = ln dim - D_KL(p || V/dim), and the
// equality-condition predicates of the three bound/monotonicity theorems.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "obsent/coarsegrain.hpp"

namespace obsent {

enum class LogBase { Natural, Bits };

/// Entropy stored in nats; bits are derived on demand.
class EntropyValue {
 public:
  constexpr explicit EntropyValue(double nats = 0.0) noexcept : nats_(nats) {}
  constexpr double nats() const noexcept { return nats_; }
  double bits() const noexcept;
  double in(LogBase base) const noexcept { return base == LogBase::Bits ? bits() : nats_; }

 private:
  double nats_;
};

/// Probabilities at or below this are treated as zero (0 ln 0 = 0).
inline constexpr double kProbabilityFloor = 1e-300;
/// Round-off slack below zero tolerated (and clamped) before taking logs.
inline constexpr double kNegativeClamp = 1e-12;

/// Uniform axis x_k = start + k * step, k = 0..count-1.
struct Axis {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double at(std::size_t k) const noexcept { return start + static_cast<double>(k) * step; }
  double stop() const noexcept { return at(count - 1); }
  /// Trapezoid weight of node k.
  double weight(std::size_t k) const noexcept {
    return (k == 0 || k + 1 == count) ? 0.5 * step : step;
  }
  bool operator==(const Axis&) const = default;
};

/// Samples on a product of uniform axes, row-major with the first axis slowest.
class GridFunction {
 public:
  GridFunction(std::vector<Axis> axes, std::vector<double> values);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t rank() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return values_.size(); }

  /// Iterated trapezoid integral.
  double integral() const;
  /// Value at a multi-index of grid nodes.
  double at(const std::vector<std::size_t>& node) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

EntropyValue von_neumann(const DensityMatrix& rho);

/// -sum p ln(p/V) over the entries with p above the floor.
EntropyValue observational(const OutcomeTable& table);
EntropyValue observational(const CoarseGrainingVector& v, const DensityMatrix& rho);

struct GridNormalization {
  double probability = 1e-6;  // allowed |int p - 1|
  double volume = 1e-6;       // allowed |int V - dim| / dim
};

/// Trapezoid approximation of -int p ln(p/V). Both functions must live on the
/// same grid; normalization is checked against `tol` before integrating.
EntropyValue observational_grid(const GridFunction& p, const GridFunction& volume, std::size_t dim,
                                GridNormalization tol = {}, std::size_t threads = 1);

struct KlDecomposition {
  double ln_volume = 0.0;  // ln dim
  double kl = 0.0;         // D_KL(p || V/dim)
  double entropy() const noexcept { return ln_volume - kl; }
};

KlDecomposition kl_decomposition(const OutcomeTable& table, std::size_t dim);

struct ConditionResult {
  bool holds = false;
  double residual = 0.0;
};

struct EqualityReport {
  /// S_C = S_vN: every POVM element lives in a single eigenspace of rho,
  /// residual max_i ||Pi_i rho - (p_i/V_i) Pi_i||_F.
  ConditionResult von_neumann_equality;
  /// S_C = ln dim: residual max_i |p_i - V_i/dim|.
  ConditionResult maximal_equality;
  /// Last coarse-graining redundant: max |p_{i,k} - (V_{i,k}/V_i) p_i|.
  /// Present only for sequences of length >= 2.
  std::optional<ConditionResult> append_equality;
  /// Refinement equality against a supplied coarser vector:
  /// max |p_i - (V_i/V_j) p_j| over i mapped to j.
  std::optional<ConditionResult> refinement_equality;
};

struct Refinement {
  CoarseGrainingVector coarse;
  IndexMap map;
};

EqualityReport check_equality_conditions(const CoarseGrainingVector& v, const DensityMatrix& rho,
                                         double tol,
                                         const std::optional<Refinement>& refinement = std::nullopt);

}  // namespace obsent
