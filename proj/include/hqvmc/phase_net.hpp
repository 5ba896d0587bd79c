#pragma once

#include <span>
#include <vector>

#include "hqvmc/param_layout.hpp"
#include "hqvmc/pauli.hpp"
#include "hqvmc/statevector.hpp"

namespace hqvmc {

/// Feedforward phase gamma(s) = W_out . relu(... relu(W_1 s + b_1) ...), with
/// bits fed as 0/1 reals and no bias on the output map.
class PhaseNet {
 public:
  PhaseNet(int n_inputs, std::vector<int> hidden);

  int n_inputs() const { return n_inputs_; }
  const std::vector<int>& hidden() const { return hidden_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t num_params() const { return layout_.total(); }

  static std::size_t count(int n_inputs, const std::vector<int>& hidden);

  std::vector<double> init_params(Rng& rng) const;
  double phase(std::span<const double> w, const Configuration& s) const;
  /// Returns gamma(s) and adds d gamma / d w into `grad`.
  double phase_grad(std::span<const double> w, const Configuration& s, std::span<double> grad) const;

 private:
  int n_inputs_;
  std::vector<int> hidden_;
  ParamLayout layout_;
};

}  // namespace hqvmc
