#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hqvmc/param_layout.hpp"
#include "hqvmc/pauli.hpp"
#include "hqvmc/statevector.hpp"

namespace hqvmc {

/// Raised when a configuration lies outside the support of the (masked) model.
class InvalidConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TransformerConfig {
  int n_qubits = 1;
  int embed_dim = 4;
  int n_heads = 1;
  int n_blocks = 1;

  void validate() const;
};

/// 12 T d^2 + (10 T + N_q + 7) d + 2.
std::size_t param_count(const TransformerConfig& cfg);

/// Particle-number mask. Even qubit indices hold spin-up orbitals, odd ones
/// spin-down, so the register has 2 * n_spatial_orbitals qubits.
struct SymmetryMask {
  bool enabled = false;
  int n_spatial_orbitals = 0;
  int n_up = 0;
  int n_down = 0;

  static SymmetryMask none() { return {}; }
  static SymmetryMask electrons(int n_orbitals, int up, int down) { return {true, n_orbitals, up, down}; }

  void validate(int n_qubits) const;
  /// Which values of bit `position` remain reachable given bits 0..position-1 of `history`.
  std::array<bool, 2> allowed(const Configuration& history, int position) const;
  /// True iff s carries exactly n_up up and n_down down electrons (or the mask is off).
  bool admits(const Configuration& s) const;
};

/// Applies the mask to a raw next-bit distribution and renormalizes.
/// Throws std::logic_error when both outcomes are masked out.
std::array<double, 2> masked_conditionals(std::array<double, 2> raw, const Configuration& history, int position,
                                          const SymmetryMask& mask);

struct Inference {
  /// p(s_i | s_0..s_{i-1}) of the realized bits.
  std::vector<double> conditionals;
  /// Full (masked, renormalized) next-bit distributions.
  std::vector<std::array<double, 2>> distributions;
  double log_p = 0.0;
};

struct SampledConfig {
  Configuration s;
  std::int64_t count = 0;
  double log_p = 0.0;  // sum of the per-step log-probabilities drawn along the way
};

/// Decoder-only autoregressive Transformer over a flat parameter vector.
/// The input sequence for s is [0, s_0, ..., s_{n-2}]; position i predicts s_i.
class Transformer {
 public:
  explicit Transformer(TransformerConfig cfg);

  const TransformerConfig& config() const { return cfg_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t num_params() const { return layout_.total(); }

  /// Normal(0, 0.02) weights and embeddings, zero biases, unit layer-norm gains.
  std::vector<double> init_params(Rng& rng) const;

  /// Raw (unmasked) next-bit distributions at every position, from one causal pass.
  std::vector<std::array<double, 2>> raw_distributions(std::span<const double> w, const Configuration& s) const;

  /// Throws InvalidConfiguration when s has zero probability.
  Inference infer(std::span<const double> w, const Configuration& s, const SymmetryMask& mask) const;
  double log_prob(std::span<const double> w, const Configuration& s, const SymmetryMask& mask) const;
  /// Returns log p(s) and adds d log p / d w into `grad`.
  double log_prob_grad(std::span<const double> w, const Configuration& s, const SymmetryMask& mask,
                       std::span<double> grad) const;

  /// Ancestral sampling of `batch` configurations, grouped into distinct
  /// configurations with multiplicities. Equivalent in law to drawing each
  /// sample independently: the multiplicity of each subtree is split binomially.
  std::vector<SampledConfig> sample_counts(std::span<const double> w, std::int64_t batch, const SymmetryMask& mask,
                                           Rng& rng) const;
  /// Expanded and shuffled form of sample_counts.
  std::vector<Configuration> sample(std::span<const double> w, std::int64_t batch, const SymmetryMask& mask,
                                    Rng& rng) const;

 private:
  TransformerConfig cfg_;
  ParamLayout layout_;
};

}  // namespace hqvmc
