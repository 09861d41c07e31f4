#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sketchlab {

/// Construction record of a multiplier: family tag, parameters, seed and
/// child descriptors. Rebuilding from a descriptor is bit-identical.
struct Descriptor {
  std::string family;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<Descriptor> children;

  bool operator==(const Descriptor& o) const;
};

nlohmann::json to_json(const Descriptor& d);
Descriptor descriptor_from_json(const nlohmann::json& j);

/// Assigns `seed` to the root and derived seeds to every descendant.
void reseed(Descriptor& d, std::uint64_t seed);

}  // namespace sketchlab
