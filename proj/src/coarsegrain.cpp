#include "obsent/coarsegrain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "obsent/errors.hpp"

namespace obsent {

using linalg::Complex;

DensityMatrix::DensityMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw ShapeError("DensityMatrix: matrix must be square and non-empty");
  if (!linalg::all_finite(m_)) throw ValidationError("DensityMatrix: non-finite entry");
  const double herm = linalg::hermiticity_residual(m_);
  if (herm > tol) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (residual " << herm << ")";
    throw ValidationError(os.str());
  }
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1";
    throw ValidationError(os.str());
  }
  const double lowest = linalg::min_eigenvalue(m_);
  if (lowest < -tol) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << lowest;
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(linalg::identity(dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd unit = psi / psi.norm();
  return DensityMatrix(linalg::projector(unit));
}

DensityMatrix DensityMatrix::qubit(double phi, double theta, double alpha) {
  ComplexMatrix phase = ComplexMatrix::Zero(2, 2);
  phase(0, 0) = std::polar(1.0, phi);
  phase(1, 1) = std::polar(1.0, -phi);
  ComplexMatrix rot(2, 2);
  rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  const ComplexMatrix u = phase * rot;
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = std::cos(alpha) * std::cos(alpha);
  d(1, 1) = std::sin(alpha) * std::sin(alpha);
  ComplexMatrix rho = u * d * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

QuantumOperation::QuantumOperation(std::vector<ComplexMatrix> kraus, std::string label)
    : kraus_(std::move(kraus)), label_(std::move(label)) {
  if (kraus_.empty()) throw ValidationError("QuantumOperation '" + label_ + "': empty Kraus list");
  dim_ = static_cast<std::size_t>(kraus_.front().rows());
  for (const auto& k : kraus_) {
    if (k.rows() != k.cols() || static_cast<std::size_t>(k.rows()) != dim_)
      throw ShapeError("QuantumOperation '" + label_ +
                       "': Kraus operators must be square and of equal dimension");
  }
}

CoarseGraining::CoarseGraining(std::vector<QuantumOperation> ops, double tol)
    : ops_(std::move(ops)) {
  if (ops_.empty()) throw ValidationError("CoarseGraining: no operations");
  dim_ = ops_.front().dim();
  for (const auto& op : ops_)
    if (op.dim() != dim_) throw ShapeError("CoarseGraining: operations of different dimension");
  const double residual = completeness_residual();
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "CoarseGraining: completeness violated (||sum K^dagger K - I||_F = " << residual << ")";
    throw ValidationError(os.str());
  }
}

double CoarseGraining::completeness_residual() const {
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_),
                                          static_cast<Eigen::Index>(dim_));
  for (const auto& op : ops_)
    for (const auto& k : op.kraus()) sum.noalias() += k.adjoint() * k;
  return (sum - linalg::identity(dim_)).norm();
}

CoarseGraining CoarseGraining::trivial(std::size_t dim) {
  return CoarseGraining({QuantumOperation({linalg::identity(dim)}, "I")});
}

CoarseGrainingVector::CoarseGrainingVector(std::vector<CoarseGraining> sequence)
    : sequence_(std::move(sequence)) {
  if (sequence_.empty()) throw ValidationError("CoarseGrainingVector: empty sequence");
  for (const auto& cg : sequence_)
    if (cg.dim() != sequence_.front().dim())
      throw ShapeError("CoarseGrainingVector: coarse-grainings of different dimension");
}

CoarseGrainingVector::CoarseGrainingVector(CoarseGraining single)
    : CoarseGrainingVector(std::vector<CoarseGraining>{std::move(single)}) {}

std::vector<std::size_t> CoarseGrainingVector::shape() const {
  std::vector<std::size_t> out;
  out.reserve(sequence_.size());
  for (const auto& cg : sequence_) out.push_back(cg.size());
  return out;
}

std::size_t CoarseGrainingVector::outcome_count() const {
  std::size_t n = 1;
  for (const auto& cg : sequence_) n *= cg.size();
  return n;
}

MultiIndex CoarseGrainingVector::unflatten(std::size_t flat) const {
  if (flat >= outcome_count()) throw IndexError("flat outcome index out of range");
  MultiIndex idx(sequence_.size());
  for (std::size_t k = sequence_.size(); k-- > 0;) {
    idx[k] = flat % sequence_[k].size();
    flat /= sequence_[k].size();
  }
  return idx;
}

std::size_t CoarseGrainingVector::flatten(const MultiIndex& index) const {
  check_index(index);
  std::size_t flat = 0;
  for (std::size_t k = 0; k < sequence_.size(); ++k) flat = flat * sequence_[k].size() + index[k];
  return flat;
}

std::vector<MultiIndex> CoarseGrainingVector::indices() const {
  std::vector<MultiIndex> out;
  const std::size_t n = outcome_count();
  out.reserve(n);
  for (std::size_t f = 0; f < n; ++f) out.push_back(unflatten(f));
  return out;
}

CoarseGrainingVector CoarseGrainingVector::appended(const CoarseGraining& next) const {
  auto seq = sequence_;
  seq.push_back(next);
  return CoarseGrainingVector(std::move(seq));
}

void CoarseGrainingVector::check_index(const MultiIndex& index) const {
  if (index.size() != sequence_.size()) {
    std::ostringstream os;
    os << "multi-index has length " << index.size() << ", sequence has " << sequence_.size();
    throw IndexError(os.str());
  }
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= sequence_[k].size()) {
      std::ostringstream os;
      os << "outcome " << index[k] << " out of range for coarse-graining " << k << " ("
         << sequence_[k].size() << " outcomes)";
      throw IndexError(os.str());
    }
  }
}

CoarseGraining projective_cg(const ComplexMatrix& observable, std::optional<double> degeneracy_tol) {
  const linalg::HermitianEigen eig = linalg::herm_eigen(observable);
  const auto n = eig.eigenvalues.size();
  const double range = eig.eigenvalues(n - 1) - eig.eigenvalues(0);
  const double tol = degeneracy_tol.value_or(1e-8 * range);

  std::vector<QuantumOperation> ops;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && eig.eigenvalues(end) - eig.eigenvalues(end - 1) <= tol) ++end;
    const auto cols = eig.eigenvectors.middleCols(start, end - start);
    ComplexMatrix proj = cols * cols.adjoint();
    std::ostringstream label;
    label << eig.eigenvalues.segment(start, end - start).mean();
    ops.emplace_back(std::vector<ComplexMatrix>{std::move(proj)}, label.str());
    start = end;
  }
  return CoarseGraining(std::move(ops));
}

CoarseGraining basis_cg(const ComplexMatrix& unitary) {
  if (!linalg::is_unitary(unitary, 1e-9)) throw ValidationError("basis_cg: matrix is not unitary");
  std::vector<QuantumOperation> ops;
  for (Eigen::Index c = 0; c < unitary.cols(); ++c)
    ops.emplace_back(std::vector<ComplexMatrix>{linalg::projector(unitary.col(c))},
                     std::to_string(c));
  return CoarseGraining(std::move(ops));
}

ComplexMatrix apply(const QuantumOperation& op, const ComplexMatrix& x) {
  if (x.rows() != x.cols() || static_cast<std::size_t>(x.rows()) != op.dim())
    throw ShapeError("apply: operator dimension does not match the operation");
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& k : op.kraus()) out.noalias() += k * x * k.adjoint();
  return out;
}

QuantumOperation compose(const CoarseGrainingVector& v, const MultiIndex& index) {
  v.flatten(index);  // validates
  std::vector<ComplexMatrix> products = v.sequence()[0][index[0]].kraus();
  std::string label = v.sequence()[0][index[0]].label();
  for (std::size_t k = 1; k < index.size(); ++k) {
    const auto& op = v.sequence()[k][index[k]];
    std::vector<ComplexMatrix> next;
    next.reserve(products.size() * op.kraus().size());
    // m_k is the slow index of the new list, matching K_{i_k m_k} * (previous product).
    for (const auto& outer : op.kraus())
      for (const auto& inner : products) next.push_back(outer * inner);
    products = std::move(next);
    label += "," + op.label();
  }
  return QuantumOperation(std::move(products), std::move(label));
}

PovmElement povm_element(const CoarseGrainingVector& v, const MultiIndex& index) {
  v.flatten(index);
  // Pi = A^dagger_{i_1}( ... A^dagger_{i_n}(I) ), with A^dagger(X) = sum K^dagger X K.
  ComplexMatrix acc = linalg::identity(v.dim());
  for (std::size_t k = index.size(); k-- > 0;) {
    const auto& op = v.sequence()[k][index[k]];
    ComplexMatrix next = ComplexMatrix::Zero(acc.rows(), acc.cols());
    for (const auto& kr : op.kraus()) next.noalias() += kr.adjoint() * acc * kr;
    acc = std::move(next);
  }
  acc = 0.5 * (acc + acc.adjoint());
  return PovmElement{index, std::move(acc)};
}

std::vector<PovmElement> povm(const CoarseGrainingVector& v) {
  std::vector<PovmElement> out;
  out.reserve(v.outcome_count());
  for (const auto& idx : v.indices()) out.push_back(povm_element(v, idx));
  return out;
}

OutcomeTable outcome_table(const CoarseGrainingVector& v, const DensityMatrix& rho) {
  if (rho.dim() != v.dim()) throw ShapeError("outcome_table: state and coarse-graining dimensions differ");
  OutcomeTable table;
  table.dim = v.dim();
  table.entries.reserve(v.outcome_count());

  // Depth-first over the multi-index tree so that prefixes A_{i_k}...A_{i_1}(X)
  // are shared; leaves come out in lexicographic order.
  const auto& seq = v.sequence();
  MultiIndex idx(seq.size());
  std::function<void(std::size_t, const ComplexMatrix&, const ComplexMatrix&)> walk =
      [&](std::size_t level, const ComplexMatrix& state, const ComplexMatrix& unit) {
        if (level == seq.size()) {
          table.entries.push_back({idx, state.trace().real(), unit.trace().real()});
          return;
        }
        for (std::size_t i = 0; i < seq[level].size(); ++i) {
          idx[level] = i;
          walk(level + 1, apply(seq[level][i], state), apply(seq[level][i], unit));
        }
      };
  walk(0, rho.matrix(), linalg::identity(v.dim()));
  return table;
}

void OutcomeTable::validate() const {
  double sp = 0.0;
  double sv = 0.0;
  for (const auto& e : entries) {
    if (e.p < -1e-12 || e.volume < -1e-12) throw ValidationError("OutcomeTable: negative entry");
    sp += e.p;
    sv += e.volume;
  }
  if (std::abs(sp - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "OutcomeTable: probabilities sum to " << sp;
    throw ValidationError(os.str());
  }
  if (std::abs(sv - static_cast<double>(dim)) > 1e-9) {
    std::ostringstream os;
    os << "OutcomeTable: volumes sum to " << sv << ", expected " << dim;
    throw ValidationError(os.str());
  }
}

namespace {

std::vector<ComplexMatrix> povm_matrices(const CoarseGrainingVector& v) {
  std::vector<ComplexMatrix> out;
  for (auto& e : povm(v)) out.push_back(std::move(e.matrix));
  return out;
}

}  // namespace

bool is_finer(const CoarseGrainingVector& fine, const CoarseGrainingVector& coarse,
              const IndexMap& map, double tol) {
  if (fine.dim() != coarse.dim()) throw ShapeError("is_finer: dimensions differ");
  if (map.size() != fine.outcome_count())
    throw ValidationError("is_finer: map must assign every fine outcome");
  const std::size_t nc = coarse.outcome_count();
  for (const auto j : map)
    if (j >= nc) throw ValidationError("is_finer: map target out of range");

  const auto fine_povm = povm_matrices(fine);
  const auto coarse_povm = povm_matrices(coarse);
  std::vector<ComplexMatrix> sums(nc, ComplexMatrix::Zero(static_cast<Eigen::Index>(fine.dim()),
                                                          static_cast<Eigen::Index>(fine.dim())));
  for (std::size_t i = 0; i < map.size(); ++i) sums[map[i]] += fine_povm[i];
  for (std::size_t j = 0; j < nc; ++j)
    if ((sums[j] - coarse_povm[j]).norm() > tol) return false;
  return true;
}

std::optional<IndexMap> find_refinement(const CoarseGrainingVector& fine,
                                        const CoarseGrainingVector& coarse, double tol) {
  if (fine.dim() != coarse.dim()) throw ShapeError("find_refinement: dimensions differ");
  const std::size_t nf = fine.outcome_count();
  if (nf > kRefinementSearchCap) {
    const double cost = std::pow(static_cast<double>(coarse.outcome_count()), static_cast<double>(nf));
    throw CapacityError("find_refinement: " + std::to_string(nf) + " fine outcomes exceed the cap of " +
                            std::to_string(kRefinementSearchCap),
                        cost);
  }
  const auto fine_povm = povm_matrices(fine);
  const auto coarse_povm = povm_matrices(coarse);
  const std::size_t nc = coarse_povm.size();

  // Remaining budget per coarse element; a fine element can only go where the
  // budget minus the element stays positive semidefinite.
  std::vector<ComplexMatrix> remaining = coarse_povm;
  IndexMap map(nf, 0);
  const double psd_slack = std::max(1e-7, 10 * tol);

  std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
    if (i == nf) {
      for (const auto& r : remaining)
        if (r.norm() > tol) return false;
      return true;
    }
    if (fine_povm[i].norm() <= tol) {
      map[i] = 0;
      return assign(i + 1);
    }
    for (std::size_t j = 0; j < nc; ++j) {
      const ComplexMatrix left = remaining[j] - fine_povm[i];
      if (linalg::min_eigenvalue(left) < -psd_slack) continue;
      ComplexMatrix saved = remaining[j];
      remaining[j] = left;
      map[i] = j;
      if (assign(i + 1)) return true;
      remaining[j] = std::move(saved);
    }
    return false;
  };

  if (!assign(0)) return std::nullopt;
  if (!is_finer(fine, coarse, map, tol)) return std::nullopt;
  return map;
}

}  // namespace obsent
