#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "cadnn/sim.hpp"

namespace cadnn {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the experiment JSON document (keys: plant, gains, dnn, sim, init)
/// and validates the resulting config. Throws ConfigError on malformed or
/// invalid input.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& json_text);

/// Canonical JSON echo of a config (keys sorted); identical configs hash
/// identically regardless of the formatting of the source file.
std::string config_to_json(const SimConfig& cfg);
std::uint64_t config_hash(const SimConfig& cfg);

}  // namespace cadnn
