#pragma once

#include <json.hpp>

#include "mancert/interval.hpp"

namespace mc {

// Intervals serialize as [lo, hi]; doubles use the shortest decimal that
// round-trips, so parse(dump(x)) == x bit for bit.
void to_json(nlohmann::json& j, const Interval& x);
void from_json(const nlohmann::json& j, Interval& x);
void to_json(nlohmann::json& j, const IVector& v);
void from_json(const nlohmann::json& j, IVector& v);
void to_json(nlohmann::json& j, const IMatrix& m);
void from_json(const nlohmann::json& j, IMatrix& m);

}  // namespace mc
