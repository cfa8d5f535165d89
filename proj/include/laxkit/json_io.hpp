#pragma once

// JSON forms of the core values. FinSet is an array of atom strings, FinFun
// is {"dom","cod","map"}, Rel is {"dom","cod","pairs"}. Serialization is
// deterministic: nlohmann orders object keys, pairs are emitted in scan order.

#include <string>

#include <json.hpp>

#include "laxkit/finrel.hpp"

namespace laxkit {

nlohmann::json finset_to_json(const FinSet& s);
FinSet finset_from_json(const nlohmann::json& j);

nlohmann::json finfun_to_json(const FinFun& f);
FinFun finfun_from_json(const nlohmann::json& j);

nlohmann::json rel_to_json(const Rel& r);
Rel rel_from_json(const nlohmann::json& j);

nlohmann::json relseq_to_json(const std::vector<Rel>& seq);
std::vector<Rel> relseq_from_json(const nlohmann::json& j);

// FNV-1a over the compact dump; stable across runs and platforms.
std::string json_digest(const nlohmann::json& j);

}  // namespace laxkit
