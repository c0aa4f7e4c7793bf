#pragma once

// Batch experiment runner behind the `obsent` command line tool. A JSON
// document describes one experiment; see README.md for the schema.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "obsent/entropy.hpp"
#include "obsent/pointer.hpp"
#include "obsent/tomography.hpp"

namespace obsent::cli {

using json = nlohmann::json;

enum class Task { Scheme, Infer, SweepOmega, SweepN };

struct OmegaRange {
  double min = 0.05;
  double max = 100.0;
  std::size_t count = 40;
  /// Log-spaced, both ends included.
  std::vector<double> values() const;
};

struct ExperimentConfig {
  Task task = Task::Scheme;
  pointer::Scheme scheme = pointer::Scheme::Single;
  /// Schemes evaluated by sweeps; sweep_n defaults to rm and rc, sweep_omega to sm.
  std::vector<pointer::Scheme> sweep_schemes{pointer::Scheme::RepeatedMeasurements,
                                             pointer::Scheme::RepeatedContacts};
  double phi = 0.0;
  double theta = 0.0;
  double alpha = 0.0;
  /// Replaces the (phi, theta, alpha) qubit when given.
  std::optional<ComplexMatrix> state_matrix;
  ComplexMatrix M;
  ComplexMatrix H;
  pointer::PointerConfig pointer;
  std::size_t N = 1;
  std::size_t n_min = 1;
  std::size_t n_max = 1;
  double dt = 1.0;
  /// Fixed total time: limit scheme, and sweep_n with dt = T/N, kappa = R T/N.
  std::optional<double> T;
  double R = 1.0;
  OmegaRange omega_range;
  LogBase log_base = LogBase::Bits;
  std::filesystem::path output = "out";
  std::size_t threads = default_threads();
  double capacity = pointer::kDefaultCapacity;
  std::string povm_file;
  std::string probabilities_file;

  DensityMatrix state() const;
  /// Pointer-scheme parameters for N interactions.
  pointer::SchemeConfig scheme_config(std::size_t n) const;
  pointer::LimitConfig limit_config() const;
  pointer::Execution execution() const;
};

/// Every problem found in a config document, each prefixed by its field path.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const json& doc);

/// Throws ValidationError listing all violations.
ExperimentConfig parse_config(const json& doc);

/// "pi/16", "-3*pi/4", "0.25" or a JSON number.
double parse_angle(const json& value);
/// Preset name (M49, H50, H51) or matrix literal.
ComplexMatrix parse_operator(const json& value);

struct SummaryRow {
  pointer::Scheme scheme;
  std::optional<std::size_t> N;
  std::optional<double> omega;
  EntropyValue entropy;
  EntropyValue von_neumann;
  EntropyValue projective;
};

struct RunResult {
  std::vector<SummaryRow> rows;
  std::vector<std::filesystem::path> files;
};

/// Executes a scheme or sweep and writes summary.csv (and distributions) into
/// cfg.output.
RunResult run(const ExperimentConfig& cfg);

/// Reads a POVM document and a probability document and reconstructs the state.
tomography::InferenceResult infer_files(const std::string& povm_path, const std::string& probabilities_path);

json povm_to_json(const std::vector<PovmElement>& povm);
std::vector<PovmElement> povm_from_json(const json& doc);

std::string summary_header();
std::string format_row(const SummaryRow& row);
/// %.12g
std::string format_number(double x);

}  // namespace obsent::cli
