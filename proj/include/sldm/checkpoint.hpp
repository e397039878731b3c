#ifndef SLDM_CHECKPOINT_HPP
#define SLDM_CHECKPOINT_HPP

#include <string>
#include <vector>

#include "sldm/param_store.hpp"

namespace sldm {

// Single-file model container: magic "SLDM1", a component tag, a JSON config
// snapshot, the seed, named f64 tensors (little-endian) and the set of names
// that were trainable when saved. Round-trips byte-identically.
struct Checkpoint {
    std::string component;    // "codec", "ldm1", "ldm2", ...
    std::string config_json;  // verbatim snapshot
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Tensor>> tensors;  // sorted by name
    std::vector<std::string> trainable;                   // sorted
};

Checkpoint checkpoint_from_store(const ParamStore& ps, const std::string& component,
                                 const std::string& config_json, std::uint64_t seed);
ParamStore store_from_checkpoint(const Checkpoint& ck);

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);  // throws InvalidCheckpoint / MissingCheckpoint

}  // namespace sldm

#endif
