#include "hqvmc/hybrid.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hqvmc {

namespace {

constexpr std::array<const char*, kNumBlocks> kBlockNames = {"transformer", "phase_net", "amp_circuit",
                                                             "phase_circuit"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(Block b) { return kBlockNames[static_cast<std::size_t>(b)]; }

Block parse_block(const std::string& name) {
  for (int i = 0; i < kNumBlocks; ++i)
    if (name == kBlockNames[static_cast<std::size_t>(i)]) return static_cast<Block>(i);
  throw std::invalid_argument("unknown parameter block '" + name + "'");
}

BlockSet BlockSet::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "all") return all();
  if (t == "nqs") return nqs();
  if (t == "circuits") return circuits();
  BlockSet out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out = out.with(parse_block(trim(item)));
  if (out.empty()) throw std::invalid_argument("empty parameter block set");
  return out;
}

std::string BlockSet::str() const {
  if (*this == all()) return "all";
  std::string out;
  for (int i = 0; i < kNumBlocks; ++i) {
    if (!contains(static_cast<Block>(i))) continue;
    if (!out.empty()) out += ",";
    out += kBlockNames[static_cast<std::size_t>(i)];
  }
  return out;
}

void HybridConfig::validate() const {
  transformer.validate();
  mask.validate(transformer.n_qubits);
  if (!use_circuits) return;
  amp_circuit.validate();
  phase_circuit.validate();
  if (amp_circuit.n_qubits != transformer.n_qubits || phase_circuit.n_qubits != transformer.n_qubits) {
    throw std::invalid_argument("circuit and transformer qubit counts differ");
  }
  if (share_theta && (amp_circuit.n_layers != phase_circuit.n_layers ||
                      amp_circuit.entanglement != phase_circuit.entanglement)) {
    throw std::invalid_argument("share_theta requires identical amplitude and phase circuits");
  }
  if (tanh_mode && !(rescale_a > 0.0)) throw std::invalid_argument("tanh rescale a must be positive");
}

HybridWavefunction::HybridWavefunction(HybridConfig cfg)
    : cfg_(std::move(cfg)),
      transformer_((cfg_.validate(), cfg_.transformer)),
      phase_net_(cfg_.transformer.n_qubits, cfg_.phase_hidden) {
  const std::size_t n = static_cast<std::size_t>(cfg_.transformer.n_qubits);
  if (cfg_.use_circuits) {
    theta1_size_ = cfg_.amp_circuit.theta_size();
    theta2_size_ = cfg_.share_theta ? 0 : cfg_.phase_circuit.theta_size();
  }
  const std::array<std::size_t, kNumBlocks> sizes = {
      transformer_.num_params(), phase_net_.num_params(), cfg_.use_circuits ? theta1_size_ + n : 0,
      cfg_.use_circuits ? theta2_size_ + n : 0};
  std::size_t off = 0;
  for (int b = 0; b < kNumBlocks; ++b) {
    blocks_[static_cast<std::size_t>(b)] = {off, sizes[static_cast<std::size_t>(b)]};
    off += sizes[static_cast<std::size_t>(b)];
  }
  total_ = off;
}

std::vector<std::size_t> HybridWavefunction::active_indices(BlockSet active) const {
  std::vector<std::size_t> idx;
  for (int b = 0; b < kNumBlocks; ++b) {
    if (!active.contains(static_cast<Block>(b))) continue;
    const BlockRange r = blocks_[static_cast<std::size_t>(b)];
    for (std::size_t i = 0; i < r.size; ++i) idx.push_back(r.offset + i);
  }
  return idx;
}

std::size_t HybridWavefunction::active_size(BlockSet active) const {
  std::size_t n = 0;
  for (int b = 0; b < kNumBlocks; ++b)
    if (active.contains(static_cast<Block>(b))) n += blocks_[static_cast<std::size_t>(b)].size;
  return n;
}

std::uint64_t HybridWavefunction::layout_checksum() const {
  std::uint64_t h = transformer_.layout().checksum() ^ (phase_net_.layout().checksum() * 0x9E3779B97F4A7C15ull);
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  };
  for (const auto& r : blocks_) {
    mix(r.offset);
    mix(r.size);
  }
  mix(cfg_.use_circuits);
  mix(cfg_.share_theta);
  mix(static_cast<std::uint64_t>(cfg_.amp_circuit.entanglement));
  mix(static_cast<std::uint64_t>(cfg_.phase_circuit.entanglement));
  return h;
}

std::vector<double> HybridWavefunction::init_params(Rng& rng, double circuit_scale) const {
  std::vector<double> w(total_, 0.0);
  const auto lam1 = transformer_.init_params(rng);
  const auto lam2 = phase_net_.init_params(rng);
  std::copy(lam1.begin(), lam1.end(), w.begin() + static_cast<std::ptrdiff_t>(block(Block::transformer).offset));
  std::copy(lam2.begin(), lam2.end(), w.begin() + static_cast<std::ptrdiff_t>(block(Block::phase_net).offset));
  std::uniform_real_distribution<double> u(-circuit_scale, circuit_scale);
  for (Block b : {Block::amp_circuit, Block::phase_circuit}) {
    const BlockRange r = block(b);
    for (std::size_t i = 0; i < r.size; ++i) w[r.offset + i] = u(rng);
  }
  return w;
}

CircuitView HybridWavefunction::amp_view(std::span<const double> w) const {
  const BlockRange r = block(Block::amp_circuit);
  return {w.subspan(r.offset, theta1_size_), w.subspan(r.offset + theta1_size_, r.size - theta1_size_)};
}

CircuitView HybridWavefunction::phase_view(std::span<const double> w) const {
  const BlockRange r = block(Block::phase_circuit);
  const auto theta = cfg_.share_theta ? amp_view(w).theta : w.subspan(r.offset, theta2_size_);
  return {theta, w.subspan(r.offset + theta2_size_, r.size - theta2_size_)};
}

double HybridWavefunction::amplitude_of(double f_amp) const {
  return cfg_.tanh_mode ? cfg_.rescale_a * std::tanh(f_amp) : f_amp;
}

double HybridWavefunction::amplitude_slope(double f_amp) const {
  if (!cfg_.tanh_mode) return 1.0;
  const double t = std::tanh(f_amp);
  return cfg_.rescale_a * (1.0 - t * t);
}

HybridWavefunction::CircuitEval HybridWavefunction::eval_circuits(std::span<const double> w, const Configuration& s,
                                                                  Measurement mode) const {
  CircuitEval ev;
  if (!cfg_.use_circuits) return ev;
  const CircuitView amp = amp_view(w);
  const CircuitView ph = phase_view(w);
  auto dot = [](std::span<const double> c, const std::vector<double>& z) {
    double acc = 0.0;
    for (std::size_t q = 0; q < c.size(); ++q) acc += c[q] * z[q];
    return acc;
  };
  ev.z_amp = measure_z(simulate(cfg_.amp_circuit, amp.theta, s), mode);
  ev.z_phase = cfg_.share_theta ? ev.z_amp : measure_z(simulate(cfg_.phase_circuit, ph.theta, s), mode);
  ev.f_amp = dot(amp.coeffs, ev.z_amp);
  ev.f_phase = dot(ph.coeffs, ev.z_phase);
  return ev;
}

LogPsi HybridWavefunction::log_psi(std::span<const double> w, const Configuration& s, Measurement mode) const {
  if (w.size() != total_) throw std::invalid_argument("hybrid: parameter vector has the wrong length");
  const BlockRange t = block(Block::transformer);
  const BlockRange g = block(Block::phase_net);
  LogPsi out;
  out.log_p = transformer_.log_prob(w.subspan(t.offset, t.size), s, cfg_.mask);
  const CircuitEval ev = eval_circuits(w, s, mode);
  out.amplitude = amplitude_of(ev.f_amp);
  out.log_modulus = 0.5 * out.log_p + out.amplitude;
  out.arg = phase_net_.phase(w.subspan(g.offset, g.size), s) + ev.f_phase;
  return out;
}

LogPsi HybridWavefunction::o_vector(std::span<const double> w, const Configuration& s, Measurement mode,
                                    BlockSet active, std::span<cplx> o) const {
  if (w.size() != total_) throw std::invalid_argument("hybrid: parameter vector has the wrong length");
  if (o.size() != active_size(active)) throw std::invalid_argument("hybrid: O buffer has the wrong length");
  const BlockRange t = block(Block::transformer);
  const BlockRange g = block(Block::phase_net);
  const cplx i_unit(0.0, 1.0);
  LogPsi out;
  std::size_t pos = 0;

  if (active.contains(Block::transformer)) {
    std::vector<double> grad(t.size, 0.0);
    out.log_p = transformer_.log_prob_grad(w.subspan(t.offset, t.size), s, cfg_.mask, grad);
    for (double v : grad) o[pos++] = cplx(0.5 * v, 0.0);
  } else {
    out.log_p = transformer_.log_prob(w.subspan(t.offset, t.size), s, cfg_.mask);
  }

  double gamma = 0.0;
  if (active.contains(Block::phase_net)) {
    std::vector<double> grad(g.size, 0.0);
    gamma = phase_net_.phase_grad(w.subspan(g.offset, g.size), s, grad);
    for (double v : grad) o[pos++] = cplx(0.0, v);
  } else {
    gamma = phase_net_.phase(w.subspan(g.offset, g.size), s);
  }

  const CircuitEval ev = eval_circuits(w, s, mode);
  out.amplitude = amplitude_of(ev.f_amp);
  out.log_modulus = 0.5 * out.log_p + out.amplitude;
  out.arg = gamma + ev.f_phase;
  if (!cfg_.use_circuits) return out;

  const std::size_t n = static_cast<std::size_t>(cfg_.transformer.n_qubits);
  const CircuitView amp = amp_view(w);
  const CircuitView ph = phase_view(w);
  const double slope = amplitude_slope(ev.f_amp);
  auto contract = [n](const std::vector<double>& jac, std::size_t k, std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) acc += jac[k * n + q] * c[q];
    return acc;
  };

  if (active.contains(Block::amp_circuit)) {
    const auto jac = param_shift_z_jacobian(cfg_.amp_circuit, amp.theta, s, mode);
    for (std::size_t k = 0; k < theta1_size_; ++k) {
      cplx v(slope * contract(jac, k, amp.coeffs), 0.0);
      if (cfg_.share_theta) v += i_unit * contract(jac, k, ph.coeffs);
      o[pos++] = v;
    }
    for (std::size_t q = 0; q < n; ++q) o[pos++] = cplx(slope * ev.z_amp[q], 0.0);
  }
  if (active.contains(Block::phase_circuit)) {
    if (!cfg_.share_theta) {
      const auto jac = param_shift_z_jacobian(cfg_.phase_circuit, ph.theta, s, mode);
      for (std::size_t k = 0; k < theta2_size_; ++k) o[pos++] = i_unit * contract(jac, k, ph.coeffs);
    }
    for (std::size_t q = 0; q < n; ++q) o[pos++] = i_unit * ev.z_phase[q];
  }
  return out;
}

}  // namespace hqvmc
