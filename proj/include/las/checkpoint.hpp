#pragma once

#include <string>

#include "las/ddpg.hpp"

namespace las {

// Binary snapshot of an agent: magic + version + JSON architecture header,
// then little-endian 64-bit arrays (both live nets, both targets, both Adam
// states, the noise scale) in a fixed order. Round-trips are bit-exact.
void save_checkpoint(const DdpgAgent& agent, const std::string& path);

// Restores a snapshot into `agent`. Throws std::runtime_error on a corrupt
// header or an architecture that does not match the agent; the agent is
// untouched on failure.
void load_checkpoint(DdpgAgent& agent, const std::string& path);

}  // namespace las
