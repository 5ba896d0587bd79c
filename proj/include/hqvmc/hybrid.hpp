#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hqvmc/phase_net.hpp"
#include "hqvmc/statevector.hpp"
#include "hqvmc/transformer.hpp"

namespace hqvmc {

/// Parameter blocks in flat-vector order: [lambda1 | lambda2 | theta1 c1 | theta2 c2].
enum class Block : int { transformer = 0, phase_net = 1, amp_circuit = 2, phase_circuit = 3 };
inline constexpr int kNumBlocks = 4;

std::string to_string(Block b);
Block parse_block(const std::string& name);

/// Bit set over Block.
class BlockSet {
 public:
  constexpr BlockSet() = default;
  constexpr explicit BlockSet(unsigned bits) : bits_(bits & 0xfu) {}
  static constexpr BlockSet all() { return BlockSet(0xfu); }
  static constexpr BlockSet nqs() { return BlockSet(0x3u); }
  static constexpr BlockSet circuits() { return BlockSet(0xcu); }
  static BlockSet of(std::initializer_list<Block> blocks) {
    BlockSet s;
    for (Block b : blocks) s = s.with(b);
    return s;
  }
  /// Comma-separated block names, or one of "all", "nqs", "circuits".
  static BlockSet parse(const std::string& text);
  std::string str() const;

  constexpr bool contains(Block b) const { return (bits_ >> static_cast<int>(b)) & 1u; }
  constexpr BlockSet with(Block b) const { return BlockSet(bits_ | (1u << static_cast<int>(b))); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr unsigned bits() const { return bits_; }
  bool operator==(const BlockSet&) const = default;

 private:
  unsigned bits_ = 0;
};

struct HybridConfig {
  TransformerConfig transformer;
  std::vector<int> phase_hidden{16, 8};
  /// When false the wavefunction is the bare network (circuit blocks are empty).
  bool use_circuits = true;
  CircuitSpec amp_circuit;
  CircuitSpec phase_circuit;
  /// One theta storage (in the amplitude block) drives both circuits.
  bool share_theta = false;
  /// Amplitude factor exp(a * tanh f) instead of exp(f).
  bool tanh_mode = false;
  double rescale_a = 1.0;
  SymmetryMask mask;

  void validate() const;
};

struct BlockRange {
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// log <s|Psi> = log_modulus + i arg.
struct LogPsi {
  double log_modulus = 0.0;
  double arg = 0.0;
  double log_p = 0.0;      // Transformer log-probability
  double amplitude = 0.0;  // A(s), so |<s|phi>|^2 = exp(2A)
};

class HybridWavefunction {
 public:
  explicit HybridWavefunction(HybridConfig cfg);

  const HybridConfig& config() const { return cfg_; }
  const Transformer& transformer() const { return transformer_; }
  const PhaseNet& phase_net() const { return phase_net_; }
  std::size_t num_params() const { return total_; }
  BlockRange block(Block b) const { return blocks_[static_cast<std::size_t>(b)]; }
  /// Flat indices covered by `active`, in layout order.
  std::vector<std::size_t> active_indices(BlockSet active) const;
  std::size_t active_size(BlockSet active) const;
  /// Fingerprint of the flat layout, stored in checkpoints.
  std::uint64_t layout_checksum() const;

  std::vector<double> init_params(Rng& rng, double circuit_scale = 0.01) const;

  /// Sub-views of the flat vector.
  CircuitView amp_view(std::span<const double> w) const;
  CircuitView phase_view(std::span<const double> w) const;

  /// Throws InvalidConfiguration for configurations outside the model support.
  LogPsi log_psi(std::span<const double> w, const Configuration& s, Measurement mode) const;

  /// Log-derivatives O_i = d log <s|Psi> / d W_i for the parameters in `active`
  /// (layout order), written to `o`. Returns the matching log_psi from the same measurements.
  LogPsi o_vector(std::span<const double> w, const Configuration& s, Measurement mode, BlockSet active,
                  std::span<cplx> o) const;

 private:
  struct CircuitEval {
    double f_amp = 0.0;
    double f_phase = 0.0;
    std::vector<double> z_amp;
    std::vector<double> z_phase;
  };
  CircuitEval eval_circuits(std::span<const double> w, const Configuration& s, Measurement mode) const;
  double amplitude_of(double f_amp) const;
  double amplitude_slope(double f_amp) const;

  HybridConfig cfg_;
  Transformer transformer_;
  PhaseNet phase_net_;
  std::array<BlockRange, kNumBlocks> blocks_{};
  std::size_t theta1_size_ = 0;
  std::size_t theta2_size_ = 0;
  std::size_t total_ = 0;
};

}  // namespace hqvmc
