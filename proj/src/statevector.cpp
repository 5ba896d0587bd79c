#include "hqvmc/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hqvmc {

std::string to_string(Entanglement e) { return e == Entanglement::linear ? "linear" : "full"; }

Entanglement parse_entanglement(const std::string& name) {
  if (name == "linear") return Entanglement::linear;
  if (name == "full") return Entanglement::full;
  throw std::invalid_argument("unknown entanglement strategy '" + name + "'");
}

std::vector<std::pair<int, int>> CircuitSpec::cnot_pairs() const {
  std::vector<std::pair<int, int>> out;
  if (entanglement == Entanglement::linear) {
    for (int q = 0; q + 1 < n_qubits; ++q) out.emplace_back(q, q + 1);
  } else {
    for (int m = 0; m < n_qubits; ++m) {
      for (int n = m + 1; n < n_qubits; ++n) out.emplace_back(m, n);
    }
  }
  return out;
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxSimQubits) {
    throw std::invalid_argument("circuit qubit count must be in [1, " + std::to_string(kMaxSimQubits) + "]");
  }
  if (n_layers < 0) throw std::invalid_argument("circuit layer count must be non-negative");
}

CircuitParams CircuitParams::zeros(const CircuitSpec& spec) {
  return {std::vector<double>(spec.theta_size(), 0.0), std::vector<double>(static_cast<std::size_t>(spec.n_qubits), 0.0)};
}

CircuitParams CircuitParams::small_random(const CircuitSpec& spec, Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CircuitParams p = zeros(spec);
  for (auto& t : p.theta) t = u(rng);
  for (auto& c : p.coeffs) c = u(rng);
  return p;
}

int StateVec::n_qubits() const { return std::countr_zero(amplitudes.size()); }

double StateVec::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return acc;
}

Measurement Measurement::sampled(std::int64_t m, Rng& r) {
  if (m < 1) throw std::invalid_argument("shot count must be at least 1");
  return {m, &r};
}

namespace {

using Amps = std::vector<cplx>;

void apply_rx(Amps& a, int q, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & bit) continue;
    const cplx x = a[i];
    const cplx y = a[i | bit];
    // [[c, -is], [-is, c]]
    a[i] = cplx(c * x.real() + s * y.imag(), c * x.imag() - s * y.real());
    a[i | bit] = cplx(c * y.real() + s * x.imag(), c * y.imag() - s * x.real());
  }
}

void apply_rz(Amps& a, int q, double angle) {
  const cplx lo = std::polar(1.0, -0.5 * angle);
  const cplx hi = std::conj(lo);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= (i & bit) ? hi : lo;
}

void apply_pauli_x(Amps& a, int q) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(i & bit)) std::swap(a[i], a[i | bit]);
  }
}

void apply_pauli_z(Amps& a, int q) {
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & bit) a[i] = -a[i];
  }
}

void apply_cnot(Amps& a, int control, int target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(a[i], a[i | tbit]);
  }
}

// H^{(x)n}|s> has amplitude 2^{-n/2} (-1)^{|s & b|} on every b.
Amps hadamard_wall(const Configuration& s) {
  const std::size_t dim = std::size_t{1} << s.n;
  const double amp = std::pow(2.0, -0.5 * s.n);
  Amps a(dim);
  for (std::size_t b = 0; b < dim; ++b) a[b] = (std::popcount(s.bits & b) & 1) ? -amp : amp;
  return a;
}

// One gate of the ansatz after the Hadamard wall.
struct Gate {
  enum Kind { rx, rz, cnot } kind;
  int a;
  int b;              // CNOT target
  std::ptrdiff_t param;  // index into theta, -1 for CNOT
};

std::vector<Gate> gate_sequence(const CircuitSpec& spec) {
  std::vector<Gate> gates;
  const auto pairs = spec.cnot_pairs();
  for (int l = 0; l < spec.n_layers; ++l) {
    for (int q = 0; q < spec.n_qubits; ++q) {
      gates.push_back({Gate::rx, q, -1, static_cast<std::ptrdiff_t>(spec.theta_index(l, q, 0))});
      gates.push_back({Gate::rz, q, -1, static_cast<std::ptrdiff_t>(spec.theta_index(l, q, 1))});
    }
    for (auto [c, t] : pairs) gates.push_back({Gate::cnot, c, t, -1});
  }
  return gates;
}

void apply_gate(Amps& a, const Gate& g, double angle) {
  switch (g.kind) {
    case Gate::rx: apply_rx(a, g.a, angle); break;
    case Gate::rz: apply_rz(a, g.a, angle); break;
    case Gate::cnot: apply_cnot(a, g.a, g.b); break;
  }
}

void check_inputs(const CircuitSpec& spec, std::span<const double> theta, const Configuration& s) {
  spec.validate();
  if (theta.size() != spec.theta_size()) throw std::invalid_argument("theta size does not match circuit spec");
  if (s.n != spec.n_qubits) throw std::invalid_argument("configuration length differs from circuit width");
}

std::vector<double> z_from_probabilities(const Amps& a, int n) {
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  for (std::size_t b = 0; b < a.size(); ++b) {
    const double p = std::norm(a[b]);
    for (int q = 0; q < n; ++q) z[static_cast<std::size_t>(q)] += ((b >> q) & 1u) ? -p : p;
  }
  return z;
}

std::vector<double> sampled_z(const Amps& a, int n, std::int64_t m, Rng& rng);

std::vector<double> measure_amps(const Amps& a, int n, Measurement mode) {
  if (mode.is_exact()) return z_from_probabilities(a, n);
  return sampled_z(a, n, mode.shots, *mode.rng);
}

}  // namespace

StateVec simulate(const CircuitSpec& spec, std::span<const double> theta, const Configuration& s) {
  check_inputs(spec, theta, s);
  Amps a = hadamard_wall(s);
  for (const auto& g : gate_sequence(spec)) apply_gate(a, g, g.param >= 0 ? theta[static_cast<std::size_t>(g.param)] : 0.0);
  return StateVec{std::move(a)};
}

std::vector<double> z_expectations(const StateVec& v) { return z_from_probabilities(v.amplitudes, v.n_qubits()); }

ShotRecord sample_shots(const StateVec& v, std::int64_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("shot count must be at least 1");
  const int n = v.n_qubits();
  std::vector<double> cdf(v.amplitudes.size());
  double acc = 0.0;
  for (std::size_t b = 0; b < cdf.size(); ++b) {
    acc += std::norm(v.amplitudes[b]);
    cdf[b] = acc;
  }
  std::uniform_real_distribution<double> u(0.0, acc);
  ShotRecord rec;
  rec.bitstrings.reserve(static_cast<std::size_t>(m));
  std::vector<std::int64_t> ones(static_cast<std::size_t>(n), 0);
  for (std::int64_t k = 0; k < m; ++k) {
    const double r = u(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    rec.bitstrings.push_back(Configuration{b, n});
    for (int q = 0; q < n; ++q) ones[static_cast<std::size_t>(q)] += (b >> q) & 1u;
  }
  rec.z_means.resize(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    rec.z_means[static_cast<std::size_t>(q)] = 1.0 - 2.0 * static_cast<double>(ones[static_cast<std::size_t>(q)]) / static_cast<double>(m);
  }
  return rec;
}

namespace {

// Vose alias table over the outcome probabilities; each shot costs one 64-bit draw
// (low n bits pick the column, the top 53 bits decide between column and alias).
void alias_counts(const std::vector<cplx>& amps, std::int64_t m, Rng& rng, std::vector<std::int64_t>& counts) {
  const std::size_t dim = amps.size();
  thread_local std::vector<double> prob;
  thread_local std::vector<std::uint32_t> alias, small, large;
  prob.resize(dim);
  alias.resize(dim);
  small.clear();
  large.clear();
  double total = 0.0;
  for (const auto& a : amps) total += std::norm(a);
  const double scale = static_cast<double>(dim) / total;
  for (std::size_t b = 0; b < dim; ++b) {
    prob[b] = std::norm(amps[b]) * scale;
    alias[b] = static_cast<std::uint32_t>(b);
    (prob[b] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(b));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t l = small.back();
    small.pop_back();
    const std::uint32_t g = large.back();
    alias[l] = g;
    prob[g] -= 1.0 - prob[l];
    if (prob[g] < 1.0) {
      large.pop_back();
      small.push_back(g);
    }
  }
  for (auto b : small) prob[b] = 1.0;
  for (auto b : large) prob[b] = 1.0;
  const std::uint64_t mask = dim - 1;
  constexpr double kUnit = 0x1.0p-53;
  for (std::int64_t k = 0; k < m; ++k) {
    const std::uint64_t r = rng();
    const std::uint64_t col = r & mask;
    const double u = static_cast<double>(r >> 11) * kUnit;
    ++counts[u < prob[col] ? col : alias[col]];
  }
}

void binomial_counts(const std::vector<cplx>& amps, std::int64_t m, Rng& rng, std::vector<std::int64_t>& counts) {
  double remaining_mass = 0.0;
  for (const auto& a : amps) remaining_mass += std::norm(a);
  std::int64_t remaining = m;
  for (std::size_t b = 0; b < amps.size() && remaining > 0; ++b) {
    const double p = std::norm(amps[b]);
    std::int64_t count = remaining;
    if (b + 1 < amps.size()) {
      const double ratio = remaining_mass > 0.0 ? std::clamp(p / remaining_mass, 0.0, 1.0) : 1.0;
      if (ratio < 1.0) {
        std::binomial_distribution<std::int64_t> binom(remaining, ratio);
        count = binom(rng);
      }
    }
    remaining -= count;
    remaining_mass -= p;
    counts[b] += count;
  }
}

std::vector<double> sampled_z(const Amps& amps, int n, std::int64_t m, Rng& rng) {
  const std::size_t dim = amps.size();
  thread_local std::vector<std::int64_t> counts;
  counts.assign(dim, 0);
  // Per-shot alias draws are cheaper until M clearly exceeds the outcome count.
  if (static_cast<std::uint64_t>(m) <= 16 * static_cast<std::uint64_t>(dim) && n <= 32) {
    alias_counts(amps, m, rng, counts);
  } else {
    binomial_counts(amps, m, rng, counts);
  }
  std::vector<std::int64_t> ones(static_cast<std::size_t>(n), 0);
  for (std::size_t b = 0; b < dim; ++b) {
    const std::int64_t c = counts[b];
    if (c == 0) continue;
    for (int q = 0; q < n; ++q) {
      if ((b >> q) & 1u) ones[static_cast<std::size_t>(q)] += c;
    }
  }
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    z[static_cast<std::size_t>(q)] = 1.0 - 2.0 * static_cast<double>(ones[static_cast<std::size_t>(q)]) / static_cast<double>(m);
  }
  return z;
}

}  // namespace

std::vector<double> shot_z_means(const StateVec& v, std::int64_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("shot count must be at least 1");
  return sampled_z(v.amplitudes, v.n_qubits(), m, rng);
}

std::vector<double> measure_z(const StateVec& v, Measurement mode) { return measure_amps(v.amplitudes, v.n_qubits(), mode); }

FValue f_value(const CircuitSpec& spec, CircuitView params, const Configuration& s, Measurement mode) {
  check_inputs(spec, params.theta, s);
  if (params.coeffs.size() != static_cast<std::size_t>(spec.n_qubits)) {
    throw std::invalid_argument("coefficient count does not match circuit width");
  }
  FValue out;
  if (spec.n_layers == 0) {
    // Hadamard wall only: every <Z_q> vanishes identically.
    out.z.assign(static_cast<std::size_t>(spec.n_qubits), 0.0);
    if (!mode.is_exact()) out.z = measure_z(simulate(spec, params.theta, s), mode);
  } else {
    out.z = measure_z(simulate(spec, params.theta, s), mode);
  }
  for (std::size_t q = 0; q < out.z.size(); ++q) out.value += params.coeffs[q] * out.z[q];
  return out;
}

std::vector<double> param_shift_z_jacobian(const CircuitSpec& spec, std::span<const double> theta,
                                           const Configuration& s, Measurement mode) {
  check_inputs(spec, theta, s);
  const auto gates = gate_sequence(spec);
  const int n = spec.n_qubits;
  const std::size_t n_theta = spec.theta_size();
  std::vector<double> jac(n_theta * static_cast<std::size_t>(n), 0.0);
  if (n_theta == 0) return jac;

  // Forward sweep keeps the state in front of every parametric gate, so each
  // shifted circuit only replays the suffix.
  // Large registers replay from the start instead of caching every prefix.
  const std::size_t dim = std::size_t{1} << n;
  const bool cache_prefix = n_theta * dim <= (std::size_t{1} << 22);
  const Amps initial = hadamard_wall(s);
  std::vector<Amps> prefix(cache_prefix ? n_theta : 0);
  if (cache_prefix) {
    Amps state = initial;
    for (const auto& gate : gates) {
      if (gate.param >= 0) prefix[static_cast<std::size_t>(gate.param)] = state;
      apply_gate(state, gate, gate.param >= 0 ? theta[static_cast<std::size_t>(gate.param)] : 0.0);
    }
  }

  std::vector<std::size_t> position(n_theta);
  for (std::size_t g = 0; g < gates.size(); ++g) {
    if (gates[g].param >= 0) position[static_cast<std::size_t>(gates[g].param)] = g;
  }

  Amps final_state = initial;
  for (const auto& gate : gates) apply_gate(final_state, gate, gate.param >= 0 ? theta[static_cast<std::size_t>(gate.param)] : 0.0);

  // R(theta +- pi/2) = R(theta) (I -+ iP) / sqrt2, so both shifted states are
  // (phi -+ i chi) / sqrt2 with chi = U_suffix P R(theta) |prefix>.
  Amps chi(dim), shifted(dim);
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t k = 0; k < n_theta; ++k) {
    const std::size_t pos = position[k];
    if (cache_prefix) {
      chi = prefix[k];
    } else {
      chi = initial;
      for (std::size_t g = 0; g < pos; ++g) apply_gate(chi, gates[g], gates[g].param >= 0 ? theta[static_cast<std::size_t>(gates[g].param)] : 0.0);
    }
    const auto& shifted_gate = gates[pos];
    apply_gate(chi, shifted_gate, theta[k]);
    if (shifted_gate.kind == Gate::rx) {
      apply_pauli_x(chi, shifted_gate.a);
    } else {
      apply_pauli_z(chi, shifted_gate.a);
    }
    for (std::size_t g = pos + 1; g < gates.size(); ++g) {
      apply_gate(chi, gates[g], gates[g].param >= 0 ? theta[static_cast<std::size_t>(gates[g].param)] : 0.0);
    }
    std::vector<double> z_plus, z_minus;
    for (int sign : {+1, -1}) {
      const cplx c(0.0, -sign * r);
      for (std::size_t b = 0; b < dim; ++b) shifted[b] = r * final_state[b] + c * chi[b];
      (sign > 0 ? z_plus : z_minus) = measure_amps(shifted, n, mode);
    }
    for (int q = 0; q < n; ++q) {
      jac[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(q)] =
          0.5 * (z_plus[static_cast<std::size_t>(q)] - z_minus[static_cast<std::size_t>(q)]);
    }
  }
  return jac;
}

std::vector<double> param_shift_grad(const CircuitSpec& spec, CircuitView params, const Configuration& s,
                                     Measurement mode) {
  if (params.coeffs.size() != static_cast<std::size_t>(spec.n_qubits)) {
    throw std::invalid_argument("coefficient count does not match circuit width");
  }
  const auto jac = param_shift_z_jacobian(spec, params.theta, s, mode);
  const std::size_t n = static_cast<std::size_t>(spec.n_qubits);
  std::vector<double> grad(spec.theta_size(), 0.0);
  for (std::size_t k = 0; k < grad.size(); ++k) {
    for (std::size_t q = 0; q < n; ++q) grad[k] += params.coeffs[q] * jac[k * n + q];
  }
  return grad;
}

}  // namespace hqvmc
