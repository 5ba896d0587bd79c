#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hqvmc/hybrid.hpp"
#include "hqvmc/pauli.hpp"

namespace hqvmc {

/// Returns log <s|Psi>, or nullopt when s lies outside the wavefunction's support
/// (such s' contribute zero to local energies).
using LogPsiFn = std::function<std::optional<LogPsi>(const Configuration&)>;

/// E_loc(s) = sum_{s'} <s|H|s'> exp(log Psi(s') - log Psi(s)).
cplx local_energy(const Configuration& s, const Hamiltonian& h, const LogPsiFn& log_psi);
/// Same, with log Psi(s) already known.
cplx local_energy(const Configuration& s, const LogPsi& at_s, const Hamiltonian& h, const LogPsiFn& log_psi);

/// omega_b = amp_sq_b / mean(amp_sq). `counts` (optional) gives multiplicities.
std::vector<double> importance_weights(std::span<const double> amp_sq, std::span<const std::int64_t> counts = {});

/// Distinct sampled configurations with multiplicities. Batch means are taken
/// over the expanded batch of size total().
struct SampleBatch {
  std::vector<Configuration> configs;
  std::vector<std::int64_t> counts;
  std::vector<double> log_p;
  std::vector<double> amp_sq;
  std::vector<double> weights;
  std::vector<cplx> e_loc;
  Eigen::MatrixXcd o_rows;  // one row per distinct configuration

  std::int64_t total() const;
  /// Builds a batch in which every configuration has multiplicity one.
  static SampleBatch expanded(std::vector<Configuration> configs, std::vector<double> amp_sq,
                              std::vector<cplx> e_loc, Eigen::MatrixXcd o_rows);
};

struct EstimatorOutput {
  double energy = 0.0;
  double energy_imag = 0.0;  // mean Im(omega E_loc), a Hermiticity diagnostic
  double variance = 0.0;
  double std_error = 0.0;
  double max_weight = 0.0;
  std::int64_t batch_size = 0;
  Eigen::VectorXd grad;
  /// Real factor A (2K x P) with S = A^T A.
  Eigen::MatrixXd fisher_factor;

  Eigen::MatrixXd fisher() const { return fisher_factor.transpose() * fisher_factor; }
};

/// Energy, gradient F, Fisher S and variance from a weighted batch. Fills
/// batch.weights from batch.amp_sq when it is empty.
EstimatorOutput estimate(SampleBatch& batch);

}  // namespace hqvmc
