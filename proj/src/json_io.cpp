#include "laxkit/json_io.hpp"

namespace laxkit {

nlohmann::json finset_to_json(const FinSet& s) { return s.atoms(); }

FinSet finset_from_json(const nlohmann::json& j) {
  return FinSet(j.get<std::vector<std::string>>());
}

nlohmann::json finfun_to_json(const FinFun& f) {
  nlohmann::json map = nlohmann::json::object();
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    map[f.dom().at(i)] = f.cod().at(f(i));
  return {{"dom", finset_to_json(f.dom())},
          {"cod", finset_to_json(f.cod())},
          {"map", map}};
}

FinFun finfun_from_json(const nlohmann::json& j) {
  FinSet dom = finset_from_json(j.at("dom"));
  FinSet cod = finset_from_json(j.at("cod"));
  std::vector<std::pair<std::string, std::string>> entries;
  for (auto it = j.at("map").begin(); it != j.at("map").end(); ++it)
    entries.emplace_back(it.key(), it.value().get<std::string>());
  return FinFun::from_labels(dom, cod, entries);
}

nlohmann::json rel_to_json(const Rel& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : r.pair_labels()) pairs.push_back({a, b});
  return {{"dom", finset_to_json(r.dom())},
          {"cod", finset_to_json(r.cod())},
          {"pairs", pairs}};
}

Rel rel_from_json(const nlohmann::json& j) {
  FinSet dom = finset_from_json(j.at("dom"));
  FinSet cod = finset_from_json(j.at("cod"));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : j.at("pairs"))
    pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  return Rel::from_pairs(dom, cod, pairs);
}

nlohmann::json relseq_to_json(const std::vector<Rel>& seq) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : seq) out.push_back(rel_to_json(r));
  return out;
}

std::vector<Rel> relseq_from_json(const nlohmann::json& j) {
  std::vector<Rel> out;
  for (const auto& r : j) out.push_back(rel_from_json(r));
  return out;
}

std::string json_digest(const nlohmann::json& j) {
  std::string dump = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace laxkit
