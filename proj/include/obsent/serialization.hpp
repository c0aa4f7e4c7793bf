#pragma once

// JSON documents for matrices, states and coarse-grainings.
//
//   matrix:          [[[re, im], [re, im], ...], ...]   (row-major; a bare
//                    number is accepted as a real entry on input)
//   DensityMatrix:   {"dim": d, "matrix": <matrix>}
//   CoarseGraining:  {"dim": d, "ops": [{"label": "...", "kraus": [<matrix>, ...]}, ...]}

#include <json.hpp>

#include "obsent/coarsegrain.hpp"

namespace obsent::io {

using json = nlohmann::json;

json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

json to_json(const CoarseGraining& cg);
CoarseGraining coarse_graining_from_json(const json& j);

json read_json_file(const std::string& path);

}  // namespace obsent::io
