#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hqvmc/pauli.hpp"

namespace hqvmc {

using Rng = std::mt19937_64;

/// Dense simulation is capped at this register size.
inline constexpr int kMaxSimQubits = 20;

enum class Entanglement { linear, full };

std::string to_string(Entanglement e);
Entanglement parse_entanglement(const std::string& name);

/// Hardware-efficient ansatz
///   U = prod_layers [ CNOTs * prod_q RZ(theta^Z) RX(theta^X) ] * H^{(x) n}.
/// Linear layers apply CNOT(0->1), CNOT(1->2), ...; full layers apply CNOT(m->n)
/// for every m < n in lexicographic order.
struct CircuitSpec {
  int n_qubits = 1;
  int n_layers = 0;
  Entanglement entanglement = Entanglement::linear;

  /// theta is laid out as [layer][qubit][axis] with axis 0 = X, 1 = Z.
  std::size_t theta_size() const { return static_cast<std::size_t>(n_layers) * n_qubits * 2; }
  std::size_t theta_index(int layer, int qubit, int axis) const {
    return (static_cast<std::size_t>(layer) * n_qubits + qubit) * 2 + axis;
  }
  std::vector<std::pair<int, int>> cnot_pairs() const;
  void validate() const;
};

/// Owned circuit parameters (rotation angles in radians and the Z-weights c).
struct CircuitParams {
  std::vector<double> theta;
  std::vector<double> coeffs;

  static CircuitParams zeros(const CircuitSpec& spec);
  /// Both theta and c uniform in [-scale, scale].
  static CircuitParams small_random(const CircuitSpec& spec, Rng& rng, double scale = 0.01);
};

/// Non-owning view of circuit parameters, used for slices of a flat parameter vector.
struct CircuitView {
  std::span<const double> theta;
  std::span<const double> coeffs;

  CircuitView() = default;
  CircuitView(std::span<const double> t, std::span<const double> c) : theta(t), coeffs(c) {}
  CircuitView(const CircuitParams& p) : theta(p.theta), coeffs(p.coeffs) {}  // NOLINT
};

struct StateVec {
  std::vector<cplx> amplitudes;

  int n_qubits() const;
  double norm_squared() const;
};

/// Exact <Z_q> (0 -> +1) or an M-shot estimate.
struct Measurement {
  std::int64_t shots = 0;
  Rng* rng = nullptr;

  static Measurement exact() { return {}; }
  static Measurement sampled(std::int64_t m, Rng& r);
  bool is_exact() const { return shots == 0; }
};

StateVec simulate(const CircuitSpec& spec, std::span<const double> theta, const Configuration& s);

std::vector<double> z_expectations(const StateVec& v);

struct ShotRecord {
  std::vector<Configuration> bitstrings;
  std::vector<double> z_means;
};

/// Draws M i.i.d. bitstrings from |v_b|^2; all qubit means come from the same shots.
ShotRecord sample_shots(const StateVec& v, std::int64_t m, Rng& rng);

/// Distributionally identical to sample_shots(...).z_means, drawn through
/// multinomial outcome counts instead of individual bitstrings.
std::vector<double> shot_z_means(const StateVec& v, std::int64_t m, Rng& rng);

std::vector<double> measure_z(const StateVec& v, Measurement mode);

struct FValue {
  double value = 0.0;
  std::vector<double> z;  // <Z_q>, equal to df/dc_q
};

/// f[s; U] = sum_q c_q <s|U^+ Z_q U|s>.
FValue f_value(const CircuitSpec& spec, CircuitView params, const Configuration& s, Measurement mode);

/// Parameter-shift Jacobian d<Z_q>/d theta_k, flattened as [k][q].
/// Every shifted circuit is measured independently (fresh shots in sampled mode).
std::vector<double> param_shift_z_jacobian(const CircuitSpec& spec, std::span<const double> theta,
                                           const Configuration& s, Measurement mode);

/// df/dtheta_k = (f[theta_k + pi/2] - f[theta_k - pi/2]) / 2, shaped like theta.
std::vector<double> param_shift_grad(const CircuitSpec& spec, CircuitView params, const Configuration& s,
                                     Measurement mode);

}  // namespace hqvmc
