#pragma once

// State inference from outcome probabilities of a coarse-graining that
// saturates the lower entropy bound. POVM elements that overlap are grouped
// into eigenspaces of the state; each eigenvalue is the summed probability
// of its group divided by the eigenspace dimension.

#include <optional>
#include <vector>

#include "obsent/coarsegrain.hpp"

namespace obsent::tomography {

struct InferenceInput {
  std::vector<PovmElement> povm;
  std::vector<double> probabilities;
  double tol_overlap = 1e-8;
  double tol_entropy = 1e-8;
  /// Von Neumann entropy of the unknown state, when known. Inference is exact
  /// only if the observational entropy equals it.
  std::optional<double> known_von_neumann;
};

struct Eigenspace {
  ComplexMatrix projector;
  double eigenvalue = 0.0;
  std::vector<MultiIndex> index_set;
};

struct InferenceResult {
  DensityMatrix rho;
  std::vector<Eigenspace> eigenspaces;
};

/// Throws SaturationError if a grouped projector is not idempotent (or the
/// entropies disagree when known_von_neumann is given), InconsistencyError if
/// the reconstructed state does not reproduce the probabilities.
InferenceResult infer_state(const InferenceInput& input);

/// |S_C - S_vN| < tol.
bool check_saturation(const CoarseGrainingVector& v, const DensityMatrix& rho, double tol);

/// Half the trace norm of a - b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace obsent::tomography
