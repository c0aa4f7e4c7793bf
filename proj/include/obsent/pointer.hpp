#pragma once

// Von Neumann pointer measurement schemes. A Gaussian pointer of width omega is
// translated by exp(-i kappa M (x) p); reading its position yields outcome
// densities p(x) and macrostate volumes V(x) on a uniform grid.
//
// All schemes work in the eigenbasis of M. Grids extend `buffer` standard
// deviations beyond the outermost Gaussian peak.

#include <cstddef>
#include <string_view>
#include <vector>

#include "obsent/coarsegrain.hpp"
#include "obsent/entropy.hpp"
#include "obsent/parallel.hpp"

namespace obsent::pointer {

struct PointerConfig {
  double omega = 1.0;   // pointer position standard deviation
  double kappa = 1.0;   // coupling strength x interaction time
  double dx = 0.1;      // grid step
  double buffer = 4.0;  // grid margin, in units of omega

  void validate() const;
};

struct SchemeConfig {
  ComplexMatrix M;   // measured observable
  ComplexMatrix H;   // free system Hamiltonian
  double dt = 1.0;   // free evolution between interactions
  std::size_t N = 1; // measurements (rm) or contacts (rc)
  PointerConfig pointer;

  void validate() const;
};

/// Continuum limit of repeated contacts at fixed total time T and ratio
/// R = kappa / dt: one interaction exp(-i (H (x) I + R M (x) p) T). The
/// momentum-space evaluation needs dx <= pi omega / 6.
struct LimitConfig {
  ComplexMatrix M;
  ComplexMatrix H;
  double T = 10.0;
  double R = 1.0;
  PointerConfig pointer;

  void validate() const;
};

/// T = N dt, R = kappa / dt.
LimitConfig limit_config(const SchemeConfig& cfg);

enum class Scheme { Projective, Single, RepeatedMeasurements, RepeatedContacts, Limit };

std::string_view to_string(Scheme s) noexcept;
Scheme scheme_from_string(std::string_view name);

/// Default work budget in the units of cost_estimate().
inline constexpr double kDefaultCapacity = 1e14;
/// Largest grid (total nodes) materialized into GridFunctions.
inline constexpr std::size_t kDefaultMaxGridPoints = 20'000'000;

struct Execution {
  std::size_t threads = default_threads();
  double capacity = kDefaultCapacity;
  std::size_t max_grid_points = kDefaultMaxGridPoints;
};

/// Leading-order operation count of a scheme:
///   rm: N^2 (d (kappa dmu + 2 buffer omega) / dx)^N
///   rc: (kappa N dmu + 2 buffer omega) / dx * N^2 * d^N
/// and grid size times d^3 for the single-interaction schemes.
double cost_estimate(const SchemeConfig& cfg, Scheme scheme);

/// Per-axis grid. rc spans N accumulated shifts; sm/rm axes span one.
Axis make_grid(const SchemeConfig& cfg, Scheme scheme);
Axis make_grid(const LimitConfig& cfg);

struct GridPair {
  GridFunction p;
  GridFunction volume;
};

struct GridEntropy {
  EntropyValue entropy;
  double norm_p = 0.0;  // trapezoid integral of p
  double norm_v = 0.0;  // trapezoid integral of V
};

/// Mass the +-buffer cutoff may legitimately drop from p (and from V/dim):
/// the Gaussian tails, the trapezoid endpoint error at the cut, plus 1e-6.
double normalization_allowance(const PointerConfig& pointer, std::size_t axes);

GridPair single_measurement(const SchemeConfig& cfg, const DensityMatrix& rho);

/// Materialized N-dimensional p(x_1..x_N), V(x_1..x_N). Throws CapacityError
/// when the grid exceeds exec.max_grid_points.
GridPair repeated_measurements(const SchemeConfig& cfg, const DensityMatrix& rho, const Execution& exec = {});

/// Entropy of repeated measurements without materializing the grid.
GridEntropy repeated_measurements_entropy(const SchemeConfig& cfg, const DensityMatrix& rho,
                                          const Execution& exec = {});

GridPair repeated_contacts(const SchemeConfig& cfg, const DensityMatrix& rho, const Execution& exec = {});

GridPair limit_scheme(const LimitConfig& cfg, const DensityMatrix& rho, const Execution& exec = {});

EntropyValue grid_entropy(const GridPair& grids, std::size_t dim, const PointerConfig& pointer,
                          std::size_t threads = 1);

/// Observational entropy of any scheme. Limit uses limit_config(cfg).
EntropyValue scheme_entropy(const SchemeConfig& cfg, const DensityMatrix& rho, Scheme scheme,
                            const Execution& exec = {});
EntropyValue scheme_entropy(const LimitConfig& cfg, const DensityMatrix& rho, const Execution& exec = {});

/// Presets: M49 = diag(0, 2), H50 = diag(0, 2), H51 = [[0, 1+i], [1-i, 2]].
ComplexMatrix preset_m49();
ComplexMatrix preset_h50();
ComplexMatrix preset_h51();

}  // namespace obsent::pointer
