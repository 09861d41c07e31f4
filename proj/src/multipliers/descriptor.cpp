#include "sketchlab/descriptor.hpp"

#include "sketchlab/linalg.hpp"
#include "sketchlab/rng.hpp"

namespace sketchlab {

bool Descriptor::operator==(const Descriptor& o) const {
  return family == o.family && params == o.params && seed == o.seed && children == o.children;
}

nlohmann::json to_json(const Descriptor& d) {
  nlohmann::json j;
  j["family"] = d.family;
  j["params"] = d.params;
  j["seed"] = d.seed;
  nlohmann::json kids = nlohmann::json::array();
  for (const auto& c : d.children) kids.push_back(to_json(c));
  j["children"] = kids;
  return j;
}

Descriptor descriptor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw InvalidArgument("descriptor: expected an object with a string 'family'");
  Descriptor d;
  d.family = j["family"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw InvalidArgument("descriptor: 'params' must be an object");
    d.params = j["params"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw InvalidArgument("descriptor: 'seed' must be an unsigned integer");
    d.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw InvalidArgument("descriptor: 'children' must be an array");
    for (const auto& c : j["children"]) d.children.push_back(descriptor_from_json(c));
  }
  return d;
}

void reseed(Descriptor& d, std::uint64_t seed) {
  d.seed = seed;
  for (std::size_t i = 0; i < d.children.size(); ++i)
    reseed(d.children[i], derive_seed(seed, i + 1));
}

}  // namespace sketchlab
