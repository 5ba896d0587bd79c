#pragma once

#include <Eigen/Dense>

#include "hqvmc/pauli.hpp"

namespace hqvmc {

using DenseOperator = Eigen::MatrixXcd;

inline constexpr int kMaxDenseQubits = 12;
/// Full decompositions are used up to this dimension; power iteration above.
inline constexpr Eigen::Index kMaxFullEigenDim = 1024;

/// Sum of coefficient-weighted Kronecker products of 2x2 Pauli matrices.
DenseOperator to_dense(const Hamiltonian& h);

enum class EigenMethod { automatic, full, power };

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXcd vector;
};

/// Lowest eigenpair of a Hermitian matrix. Rejects non-Hermitian input.
GroundState ground_state(const DenseOperator& d, EigenMethod method = EigenMethod::automatic);

/// ||D v - E v||.
double residual(const DenseOperator& d, double energy, const Eigen::VectorXcd& v);

/// Convenience: ground energy of H (N_q <= 12).
double exact_ground_energy(const Hamiltonian& h);

}  // namespace hqvmc
