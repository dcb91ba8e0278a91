#pragma once

#include <string>

#include <json.hpp>

#include "coneflow/field.hpp"
#include "coneflow/riccati.hpp"

namespace coneflow {

// Cone block: {"dimension": d, "kind": "orthant"|"polyhedral",
//              "dual_generators": [[...],...], "norm": "euclidean"|"max"|"sum"}
OrderCone parse_cone(const nlohmann::json& j);

// Affine parameter schema: {"d": int, "coordinates": [{"alpha","beta","c",
//   "jumps": {"atoms": [{"xi","mass"}], "density": {...}}}]}
AffineParams parse_affine_params(const nlohmann::json& j, Norm norm = Norm::Euclidean);

// Built-in field registry: "scalar-riccati" (f = x^2), "linear" (matrix from
// config), "sin" (negative control), "affine" (parameter block), "constant".
VectorField make_field(const std::string& name, const nlohmann::json& config,
                       const OrderCone& cone);

}  // namespace coneflow
