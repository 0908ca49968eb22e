#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pisac/matrix.hpp"
#include "pisac/tape.hpp"

namespace pisac {

/// Ordered name -> matrix snapshot of a parameter set.
using CheckpointMap = std::vector<std::pair<std::string, Matrix>>;

CheckpointMap to_checkpoint(const ParamStore& params);

/// Overwrites param values from the map; names and shapes must match the
/// store exactly (throws std::runtime_error otherwise).
void from_checkpoint(ParamStore& params, const CheckpointMap& map);

/// Binary format, little-endian, trailing FNV-1a checksum. Reading verifies
/// magic, version and checksum and throws std::runtime_error with a message
/// naming the failure ("version", "integrity", ...).
void write_checkpoint(const CheckpointMap& map, const std::string& path);
CheckpointMap read_checkpoint(const std::string& path);

}  // namespace pisac
