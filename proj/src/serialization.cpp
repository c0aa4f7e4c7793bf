#include "obsent/serialization.hpp"

#include <fstream>

#include "obsent/errors.hpp"

namespace obsent::io {

namespace {

linalg::Complex entry_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw ValidationError("matrix entry must be a number or a [re, im] pair");
}

std::size_t expect_dim(const json& j, const char* what) {
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
    throw ValidationError(std::string(what) + ": 'dim' must be a positive integer");
  return j["dim"].get<std::size_t>();
}

}  // namespace

json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ValidationError("matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ShapeError("matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json to_json(const DensityMatrix& rho) {
  return json{{"dim", rho.dim()}, {"matrix", to_json(rho.matrix())}};
}

DensityMatrix density_from_json(const json& j) {
  const std::size_t dim = expect_dim(j, "DensityMatrix");
  ComplexMatrix m = matrix_from_json(j.at("matrix"));
  if (static_cast<std::size_t>(m.rows()) != dim) throw ShapeError("DensityMatrix: 'dim' disagrees with matrix");
  return DensityMatrix(std::move(m));
}

json to_json(const CoarseGraining& cg) {
  json ops = json::array();
  for (const auto& op : cg.ops()) {
    json kraus = json::array();
    for (const auto& k : op.kraus()) kraus.push_back(to_json(k));
    ops.push_back({{"label", op.label()}, {"kraus", std::move(kraus)}});
  }
  return json{{"dim", cg.dim()}, {"ops", std::move(ops)}};
}

CoarseGraining coarse_graining_from_json(const json& j) {
  const std::size_t dim = expect_dim(j, "CoarseGraining");
  if (!j.contains("ops") || !j["ops"].is_array()) throw ValidationError("CoarseGraining: missing array 'ops'");
  std::vector<QuantumOperation> ops;
  std::size_t n = 0;
  for (const auto& op : j["ops"]) {
    std::string label = op.contains("label") ? op["label"].get<std::string>() : std::to_string(n);
    std::vector<ComplexMatrix> kraus;
    for (const auto& k : op.at("kraus")) kraus.push_back(matrix_from_json(k));
    ops.emplace_back(std::move(kraus), std::move(label));
    if (ops.back().dim() != dim) throw ShapeError("CoarseGraining: 'dim' disagrees with Kraus operators");
    ++n;
  }
  return CoarseGraining(std::move(ops));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

}  // namespace obsent::io
