// SPDX-License-Identifier: Apache-2.0
//
// Versioned binary checkpoints: config hash, network shapes, flat
// little-endian float64 parameters, optimizer state, and generator state.
// Byte layout is documented in docs/checkpoint_format.md.

#ifndef ISACSPIKE_CHECKPOINT_HPP_
#define ISACSPIKE_CHECKPOINT_HPP_

#include <string>

#include "isacspike/rl.hpp"

namespace isacspike {

inline constexpr std::uint32_t kCheckpointMagic = 0x4b505349u;  // "ISPK"
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Trainer& trainer);

// Restores a trainer built from the same config; throws on magic/version or
// config-hash mismatch.
Trainer load_checkpoint(const std::string& path, const ScenarioConfig& cfg, int obs_dim = -1,
                        int act_dim = -1);

}  // namespace isacspike

#endif  // ISACSPIKE_CHECKPOINT_HPP_
