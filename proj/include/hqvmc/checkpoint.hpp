#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hqvmc/hybrid.hpp"
#include "hqvmc/optimizers.hpp"

namespace hqvmc {

inline constexpr int kCheckpointVersion = 1;

/// Text checkpoint. Doubles are written as hex floats so a save/load round
/// trip is bit-exact.
struct Checkpoint {
  int version = kCheckpointVersion;
  std::int64_t iteration = 0;
  std::uint64_t layout_checksum = 0;
  std::string config_text;
  std::array<BlockRange, kNumBlocks> blocks{};
  std::vector<double> params;
  Method optimizer = Method::sr;
  AdamState adam;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Copies the listed blocks from a checkpoint into `w`. Each copied block must
/// have the same size in both layouts.
void restore_blocks(const Checkpoint& ckpt, const HybridWavefunction& wf, std::vector<double>& w, BlockSet blocks);

}  // namespace hqvmc
