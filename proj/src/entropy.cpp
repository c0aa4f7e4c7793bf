#include "obsent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "obsent/errors.hpp"
#include "obsent/parallel.hpp"

namespace obsent {

namespace {

double clamp_small_negative(double x) { return (x < 0.0 && x >= -kNegativeClamp) ? 0.0 : x; }

/// -p ln(p/V), zero when p is at or below the floor.
double entropy_term(double p, double volume) {
  p = clamp_small_negative(p);
  volume = clamp_small_negative(volume);
  if (p <= kProbabilityFloor) return 0.0;
  if (volume <= 0.0) throw ValidationError("observational entropy: positive probability on a zero volume");
  return -p * std::log(p / volume);
}

}  // namespace

double EntropyValue::bits() const noexcept { return nats_ / std::numbers::ln2; }

GridFunction::GridFunction(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  std::size_t n = axes_.empty() ? 0 : 1;
  for (const auto& a : axes_) {
    if (!(a.step > 0.0)) throw ValidationError("GridFunction: grid step must be > 0");
    if (a.count == 0) throw ValidationError("GridFunction: empty axis");
    n *= a.count;
  }
  if (n != values_.size()) throw ShapeError("GridFunction: value count does not match the grid");
  for (const double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("GridFunction: non-finite value");
    if (v < -kNegativeClamp) throw ValidationError("GridFunction: negative value");
  }
}

double GridFunction::at(const std::vector<std::size_t>& node) const {
  if (node.size() != axes_.size()) throw IndexError("GridFunction::at: wrong node rank");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < node.size(); ++k) {
    if (node[k] >= axes_[k].count) throw IndexError("GridFunction::at: node out of range");
    flat = flat * axes_[k].count + node[k];
  }
  return values_[flat];
}

double GridFunction::integral() const {
  // Weights of the trailing axes, flattened, so the sum is a single pass.
  const std::size_t outer = axes_.front().count;
  const std::size_t inner = values_.size() / outer;
  std::vector<double> inner_w(inner, 1.0);
  std::size_t stride = inner;
  for (std::size_t k = 1; k < axes_.size(); ++k) {
    stride /= axes_[k].count;
    for (std::size_t f = 0; f < inner; ++f) inner_w[f] *= axes_[k].weight((f / stride) % axes_[k].count);
  }
  double total = 0.0;
  for (std::size_t o = 0; o < outer; ++o) {
    double partial = 0.0;
    for (std::size_t f = 0; f < inner; ++f) partial += inner_w[f] * values_[o * inner + f];
    total += axes_.front().weight(o) * partial;
  }
  return total;
}

EntropyValue von_neumann(const DensityMatrix& rho) {
  const auto eig = linalg::herm_eigen(rho.matrix());
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double lambda = clamp_small_negative(eig.eigenvalues(i));
    if (lambda > kProbabilityFloor) s -= lambda * std::log(lambda);
  }
  return EntropyValue(std::max(0.0, s));
}

EntropyValue observational(const OutcomeTable& table) {
  double s = 0.0;
  for (const auto& e : table.entries) s += entropy_term(e.p, e.volume);
  return EntropyValue(s);
}

EntropyValue observational(const CoarseGrainingVector& v, const DensityMatrix& rho) {
  return observational(outcome_table(v, rho));
}

EntropyValue observational_grid(const GridFunction& p, const GridFunction& volume, std::size_t dim,
                                GridNormalization tol, std::size_t threads) {
  if (p.axes() != volume.axes()) throw ShapeError("observational_grid: p and V live on different grids");
  const double norm_p = p.integral();
  const double norm_v = volume.integral();
  const auto d = static_cast<double>(dim);
  if (std::abs(norm_p - 1.0) > tol.probability) {
    std::ostringstream os;
    os << "observational_grid: int p = " << norm_p << " (tolerance " << tol.probability
       << "); widen the grid buffer";
    throw ValidationError(os.str());
  }
  if (std::abs(norm_v - d) > tol.volume * d) {
    std::ostringstream os;
    os << "observational_grid: int V = " << norm_v << ", expected " << dim << "; widen the grid buffer";
    throw ValidationError(os.str());
  }

  const auto& axes = p.axes();
  const std::size_t outer = axes.front().count;
  const std::size_t inner = p.size() / outer;
  std::vector<double> inner_w(inner, 1.0);
  std::size_t stride = inner;
  for (std::size_t k = 1; k < axes.size(); ++k) {
    stride /= axes[k].count;
    for (std::size_t f = 0; f < inner; ++f) inner_w[f] *= axes[k].weight((f / stride) % axes[k].count);
  }
  const auto& pv = p.values();
  const auto& vv = volume.values();
  const auto partial = parallel_map<double>(outer, threads, [&](std::size_t o) {
    double acc = 0.0;
    for (std::size_t f = 0; f < inner; ++f) acc += inner_w[f] * entropy_term(pv[o * inner + f], vv[o * inner + f]);
    return axes.front().weight(o) * acc;
  });
  double s = 0.0;
  for (const double x : partial) s += x;
  return EntropyValue(s);
}

KlDecomposition kl_decomposition(const OutcomeTable& table, std::size_t dim) {
  table.validate();
  if (dim != table.dim) throw ShapeError("kl_decomposition: dimension disagrees with the table");
  const auto d = static_cast<double>(dim);
  double kl = 0.0;
  for (const auto& e : table.entries) {
    const double p = clamp_small_negative(e.p);
    if (p <= kProbabilityFloor) continue;
    kl += p * std::log(p * d / clamp_small_negative(e.volume));
  }
  return {std::log(d), kl};
}

EqualityReport check_equality_conditions(const CoarseGrainingVector& v, const DensityMatrix& rho,
                                         double tol, const std::optional<Refinement>& refinement) {
  const OutcomeTable table = outcome_table(v, rho);
  const auto elements = povm(v);
  const auto d = static_cast<double>(v.dim());
  EqualityReport report;

  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = table.entries[i];
    if (e.volume > kNegativeClamp) {
      const double eigenvalue = e.p / e.volume;
      lower = std::max(lower, (elements[i].matrix * rho.matrix() - eigenvalue * elements[i].matrix).norm());
    }
    upper = std::max(upper, std::abs(e.p - e.volume / d));
  }
  report.von_neumann_equality = {lower <= tol, lower};
  report.maximal_equality = {upper <= tol, upper};

  if (v.length() >= 2) {
    const auto& seq = v.sequence();
    const CoarseGrainingVector prefix(std::vector<CoarseGraining>(seq.begin(), seq.end() - 1));
    const OutcomeTable head = outcome_table(prefix, rho);
    const std::size_t last = seq.back().size();
    double residual = 0.0;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      const auto& parent = head.entries[i / last];
      const auto& e = table.entries[i];
      const double expected = parent.volume > kNegativeClamp ? e.volume / parent.volume * parent.p : 0.0;
      residual = std::max(residual, std::abs(e.p - expected));
    }
    report.append_equality = ConditionResult{residual <= tol, residual};
  }

  if (refinement) {
    if (!is_finer(v, refinement->coarse, refinement->map, std::max(tol, 1e-9)))
      throw ValidationError("check_equality_conditions: supplied map is not a refinement");
    const OutcomeTable coarse = outcome_table(refinement->coarse, rho);
    double residual = 0.0;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      const auto& parent = coarse.entries[refinement->map[i]];
      const auto& e = table.entries[i];
      const double expected = parent.volume > kNegativeClamp ? e.volume / parent.volume * parent.p : 0.0;
      residual = std::max(residual, std::abs(e.p - expected));
    }
    report.refinement_equality = ConditionResult{residual <= tol, residual};
  }
  return report;
}

}  // namespace obsent
