#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hqvmc/estimators.hpp"
#include "hqvmc/hybrid.hpp"
#include "hqvmc/run_config.hpp"

namespace hqvmc {

inline constexpr int kLogVersion = 1;
inline constexpr int kSummaryVersion = 1;

struct IterationRecord {
  std::int64_t iteration = 0;
  double energy = 0.0;
  double energy_imag = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double rel_error = 0.0;  // NaN when no exact reference is available
  double max_weight = 0.0;
  double grad_inf = 0.0;
  double lr = 0.0;
  std::int64_t active_params = 0;
  std::int64_t unique_configs = 0;
  double wall_ms = 0.0;
};

/// Fixed CSV header of log.csv (wall-clock time goes to timing.csv so logs are reproducible).
std::string log_csv_header();
std::string log_csv_row(const IterationRecord& r);

struct RunResult {
  std::vector<IterationRecord> records;
  EstimatorOutput last;
  double final_energy = 0.0;     // mean over the last min(100, max(1, N/10)) iterations
  double final_std_error = 0.0;  // standard error of that tail mean
  std::optional<double> exact_energy;
  std::optional<double> variational_energy;  // <Psi|H|Psi>/<Psi|Psi> by enumeration, exact circuits
  std::optional<double> rel_error;
  std::vector<double> params;
  int n_qubits = 0;
};

/// Derives an independent 64-bit stream seed from the master seed and tags.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t a = 0, std::uint64_t b = 0);

/// Enumerated Rayleigh quotient of the wavefunction (exact circuit expectations).
double enumerated_energy(const HybridWavefunction& wf, std::span<const double> w, const Hamiltonian& h);

using ProgressFn = std::function<void(const IterationRecord&)>;

/// Runs the training loop. Writes log.csv, timing.csv, summary.json and
/// checkpoints into cfg.out_dir when it is non-empty.
RunResult run(const RunConfig& cfg, const ProgressFn& progress = nullptr);
/// Same with an already constructed Hamiltonian (cfg.hamiltonian is only echoed).
RunResult run(const RunConfig& cfg, const Hamiltonian& h, const ProgressFn& progress = nullptr);

}  // namespace hqvmc
