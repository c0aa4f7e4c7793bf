#include "obsent/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "obsent/entropy.hpp"
#include "obsent/errors.hpp"

namespace obsent::tomography {

namespace {

constexpr double kNormalizationTol = 1e-8;
constexpr double kIdempotencyTol = 1e-7;
constexpr double kReproductionTol = 1e-7;

std::string index_string(const MultiIndex& index) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < index.size(); ++k) os << (k ? "," : "") << index[k];
  os << ')';
  return os.str();
}

void validate(const InferenceInput& in) {
  if (in.povm.empty()) throw ValidationError("infer_state: empty POVM");
  if (in.povm.size() != in.probabilities.size())
    throw ShapeError("infer_state: povm and probabilities differ in length");
  if (!(in.tol_overlap > 0.0) || !(in.tol_entropy > 0.0))
    throw ValidationError("infer_state: tolerances must be > 0");
  const Eigen::Index d = in.povm.front().matrix.rows();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& e : in.povm) {
    if (e.matrix.rows() != d || e.matrix.cols() != d) throw ShapeError("infer_state: POVM elements differ in shape");
    if (!linalg::is_hermitian(e.matrix, 1e-9)) throw ValidationError("infer_state: POVM element is not Hermitian");
    total += e.matrix;
  }
  if ((total - linalg::identity(static_cast<std::size_t>(d))).norm() > kNormalizationTol)
    throw ValidationError("infer_state: POVM elements do not sum to the identity");
  double sum = 0.0;
  for (double p : in.probabilities) {
    if (!(p >= -kNormalizationTol && p <= 1.0 + kNormalizationTol))
      throw ValidationError("infer_state: probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTol) throw ValidationError("infer_state: probabilities do not sum to 1");
}

void check_entropy(const InferenceInput& in) {
  OutcomeTable table;
  table.dim = static_cast<std::size_t>(in.povm.front().matrix.rows());
  for (std::size_t i = 0; i < in.povm.size(); ++i)
    table.entries.push_back({in.povm[i].index, std::max(0.0, in.probabilities[i]),
                             linalg::trace(in.povm[i].matrix).real()});
  const double s = observational(table).nats();
  if (std::abs(s - *in.known_von_neumann) > in.tol_entropy) {
    std::ostringstream os;
    os << "saturation violated: observational entropy " << s << " differs from the von Neumann entropy "
       << *in.known_von_neumann;
    throw SaturationError(os.str());
  }
}

}  // namespace

InferenceResult infer_state(const InferenceInput& input) {
  validate(input);
  if (input.known_von_neumann) check_entropy(input);

  const std::size_t n = input.povm.size();
  const Eigen::Index d = input.povm.front().matrix.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return input.povm[a].index < input.povm[b].index; });
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = input.povm[i].matrix.norm();

  std::vector<bool> used(n, false);
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  std::vector<Eigenspace> spaces;
  for (std::size_t start : order) {
    if (used[start]) continue;
    used[start] = true;
    if (norms[start] == 0.0) continue;
    ComplexMatrix p = input.povm[start].matrix;
    double mass = input.probabilities[start];
    std::vector<std::size_t> members{start};
    for (bool grew = true; grew;) {
      grew = false;
      const double p_norm = p.norm();
      for (std::size_t i : order) {
        if (used[i] || norms[i] == 0.0) continue;
        if ((input.povm[i].matrix * p).norm() > input.tol_overlap * norms[i] * p_norm) {
          used[i] = true;
          members.push_back(i);
          p += input.povm[i].matrix;
          mass += input.probabilities[i];
          grew = true;
        }
      }
    }
    const double residual = (p * p - p).norm();
    if (residual >= kIdempotencyTol) {
      std::ostringstream os;
      os << "saturation violated: grouped POVM elements starting at " << index_string(input.povm[start].index)
         << " do not form a projector (residual " << residual << ")";
      throw SaturationError(os.str());
    }
    const double rank = linalg::trace(p).real();
    Eigenspace space;
    space.projector = p;
    space.eigenvalue = std::max(0.0, mass) / rank;
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return input.povm[a].index < input.povm[b].index; });
    for (std::size_t i : members) space.index_set.push_back(input.povm[i].index);
    rho += space.eigenvalue * p;
    spaces.push_back(std::move(space));
  }
  rho = 0.5 * (rho + rho.adjoint());

  for (std::size_t i = 0; i < n; ++i) {
    const double predicted = (input.povm[i].matrix * rho).trace().real();
    if (std::abs(predicted - input.probabilities[i]) > kReproductionTol) {
      std::ostringstream os;
      os << "inconsistent probabilities: outcome " << index_string(input.povm[i].index) << " has p = "
         << input.probabilities[i] << " but the reconstructed state gives " << predicted;
      throw InconsistencyError(os.str());
    }
  }
  return InferenceResult{DensityMatrix(rho, kNormalizationTol), std::move(spaces)};
}

bool check_saturation(const CoarseGrainingVector& v, const DensityMatrix& rho, double tol) {
  return std::abs(observational(v, rho).nats() - von_neumann(rho).nats()) < tol;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("trace_distance: shape mismatch");
  const ComplexMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace obsent::tomography
