#pragma once

// JSON forms of the library types. Output has sorted keys and every double
// printed with 17 significant digits, so a fixed input gives fixed bytes.

#include <string>

#include <json.hpp>

#include "qtheta/bimodule.hpp"
#include "qtheta/rings.hpp"

namespace qtheta {

using Json = nlohmann::json;

std::string dump_stable(const Json& j, int indent = 2);

Json to_json(const QuadraticNumber& x);
QuadraticIrrational quadratic_from_json(const Json& j);

Json to_json(cplx z);
cplx complex_from_json(const Json& j);

Json to_json(const BigInt& x);  // integer when it fits in 64 bits, else a decimal string
Json to_json(const IntMatrix2& g);
IntMatrix2 matrix_from_json(const Json& j);

Json to_json(const TorusElement& x);
TorusElement torus_from_json(const Json& j);

Json to_json(const HolomorphicVector& v);
HolomorphicVector holomorphic_from_json(const Json& j);

Json to_json(const ResidualReport& r);
Json to_json(const RankReport& r);

}  // namespace qtheta
