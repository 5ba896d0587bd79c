#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqvmc/hybrid.hpp"
#include "hqvmc/optimizers.hpp"

namespace hqvmc {

/// Everything a training run needs. Defaults are the molecular-run hyperparameters.
struct RunConfig {
  std::string hamiltonian = "afh:4";  // builder spec ("afh:N[:J][:pbc|obc]") or file path

  int embed_dim = 3;
  int n_heads = 1;
  int n_blocks = 1;
  std::vector<int> phase_hidden{16, 8};

  bool use_circuits = true;
  int n_layers = 4;
  Entanglement entanglement = Entanglement::full;
  bool share_theta = false;
  bool tanh_mode = false;
  double rescale_a = 1.0;
  double init_scale = 0.01;

  bool mask = false;
  int n_up = 0;
  int n_down = 0;

  std::int64_t batch_size = 10000;
  std::int64_t shots = 10000;  // 0 = exact expectations

  Method optimizer = Method::adam;
  double lr = 5e-3;
  double lr_min = 5e-4;
  bool cosine = true;
  double sr_eps = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.95;

  std::int64_t iterations = 3000;
  std::string plan;  // empty = all blocks for every iteration
  std::uint64_t seed = 1;

  std::string out_dir;            // empty = no files written
  std::int64_t checkpoint_every = 0;  // 0 = final checkpoint only
  std::string init_checkpoint;    // network blocks are loaded from here when set
  int workers = 1;

  void validate() const;
  BlockPlan block_plan() const;
  Schedule schedule() const { return {lr, cosine ? lr_min : lr, iterations}; }
  HybridConfig hybrid(int n_qubits) const;

  /// key = value lines; `#` starts a comment. Unknown keys are errors.
  static RunConfig parse(const std::string& text);
  static RunConfig parse(const std::string& text, RunConfig base);
  static RunConfig load(const std::string& path);
  void set(const std::string& key, const std::string& value);
  /// Canonical key = value form; parse(to_text()) reproduces the config.
  std::string to_text() const;
};

const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);

}  // namespace hqvmc
