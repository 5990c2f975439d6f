#pragma once

#include <string>

#include "haps/ppo.hpp"

namespace haps {

// Text checkpoint: a magic/version line, the schema hash and policy
// fingerprint, the network layout, then one `tensor <name> <rows> <cols>`
// header per weight/bias followed by its column-major values as hex floats
// (exact round trip).
struct CheckpointMeta {
  std::string schema;
  std::string fingerprint;
};

void save_checkpoint(const std::string& path, const PolicyParams& params,
                     const CheckpointMeta& meta);

// `expected` holds a freshly built network of the shape the caller needs;
// its weights are overwritten. Throws ConfigError on any hash or shape
// mismatch.
PolicyParams load_checkpoint(const std::string& path, PolicyParams expected,
                             const CheckpointMeta& meta);

}  // namespace haps
