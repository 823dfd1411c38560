#pragma once

#include <string>

#include "json.hpp"

#include "stagpoint/initial_data.hpp"

namespace stagpoint {

/// Accepted shapes (bc is "dirichlet" or "periodic"):
///   {"form": "polynomial", "coefficients": [...], "bc": ...}
///   {"form": "trig", "constant": c, "sine": [...], "cosine": [...], "bc": ...}
///   {"form": "power", "anchor": a, "peak": M0, "c1": c, "q": q, "background": [...], "bc": ...}
///   {"preset": "example1"}
/// Throws InvalidInput on malformed input.
InitialDatum datum_from_json(const nlohmann::json& j);
nlohmann::json datum_to_json(const InitialDatum& datum);

InitialDatum load_datum(const std::string& path);

}  // namespace stagpoint
