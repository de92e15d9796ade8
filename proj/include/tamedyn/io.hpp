#pragma once

#include <string>

#include "json.hpp"
#include "tamedyn/core.hpp"

namespace tamedyn {

using Json = nlohmann::ordered_json;

Json field_to_json(const FieldRef& F);
FieldRef field_from_json(const Json& j);

// p-adic: "a/b"; series: [["exp", "coeff"], ...]
Json scalar_to_json(const Scalar& x);
Scalar scalar_from_json(const FieldRef& F, const Json& j);

Json val_to_json(const Val& v);
Val val_from_json(const Json& j);

Json point_to_json(const BerkPoint& x);
BerkPoint point_from_json(const FieldRef& F, const Json& j);

// {"backend", "coefficients", "marks"}; input also accepts {"backend", "marks", "b", "degree"?}
Json polynomial_to_json(const MarkedPolynomial& f);
MarkedPolynomial polynomial_from_json(const Json& j);
// unmarked input: {"backend", "coefficients"}; marked inputs are accepted too
Poly raw_polynomial_from_json(const Json& j);

Json core_to_json(const CoreTree& tree);
CoreTree core_from_json(const Json& j);
std::string core_to_dot(const CoreTree& tree);

Json read_json_file(const std::string& path);

}  // namespace tamedyn
