#include "hqvmc/phase_net.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "hqvmc/autodiff.hpp"

namespace hqvmc {

PhaseNet::PhaseNet(int n_inputs, std::vector<int> hidden) : n_inputs_(n_inputs), hidden_(std::move(hidden)) {
  if (n_inputs_ < 1) throw std::invalid_argument("phase net: input size must be positive");
  int in = n_inputs_;
  for (std::size_t k = 0; k < hidden_.size(); ++k) {
    if (hidden_[k] < 1) throw std::invalid_argument("phase net: hidden widths must be positive");
    layout_.add("fc" + std::to_string(k) + ".weight", {in, hidden_[k]});
    layout_.add("fc" + std::to_string(k) + ".bias", {hidden_[k]});
    in = hidden_[k];
  }
  layout_.add("out.weight", {in, 1});
}

std::size_t PhaseNet::count(int n_inputs, const std::vector<int>& hidden) {
  std::size_t total = 0;
  std::size_t in = static_cast<std::size_t>(n_inputs);
  for (int w : hidden) {
    total += static_cast<std::size_t>(w) * in + static_cast<std::size_t>(w);
    in = static_cast<std::size_t>(w);
  }
  return total + in;
}

std::vector<double> PhaseNet::init_params(Rng& rng) const {
  std::vector<double> w(layout_.total(), 0.0);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (const auto& slot : layout_.slots()) {
    if (slot.name.size() >= 4 && slot.name.compare(slot.name.size() - 4, 4, "bias") == 0) continue;
    for (std::size_t i = 0; i < slot.size; ++i) w[slot.offset + i] = normal(rng);
  }
  return w;
}

namespace {

ad::Var phase_graph(const PhaseNet& net, ad::Tape& tape, std::span<const double> w, const Configuration& s,
                    bool track) {
  if (w.size() != net.num_params()) throw std::invalid_argument("phase net: parameter vector has the wrong length");
  if (s.n != net.n_inputs()) throw std::invalid_argument("phase net: configuration length differs from input size");
  auto leaf = [&](std::size_t index) {
    const ParamSlot& slot = net.layout()[index];
    const auto values = w.subspan(slot.offset, slot.size);
    ad::Tensor t(slot.shape, std::vector<double>(values.begin(), values.end()));
    return track ? tape.parameter(std::move(t), slot.offset) : tape.constant(std::move(t));
  };
  ad::Tensor input({1, s.n});
  for (int q = 0; q < s.n; ++q) input[static_cast<std::size_t>(q)] = s.bit(q);
  ad::Var x = tape.constant(std::move(input));
  std::size_t slot = 0;
  for (std::size_t k = 0; k < net.hidden().size(); ++k) {
    ad::Var weight = leaf(slot++);
    ad::Var bias = leaf(slot++);
    x = ad::relu(ad::add_bias(ad::matmul(x, weight), bias));
  }
  return ad::sum(ad::matmul(x, leaf(slot)));
}

}  // namespace

double PhaseNet::phase(std::span<const double> w, const Configuration& s) const {
  ad::Tape tape;
  return phase_graph(*this, tape, w, s, false).value()[0];
}

double PhaseNet::phase_grad(std::span<const double> w, const Configuration& s, std::span<double> grad) const {
  if (grad.size() != layout_.total()) throw std::invalid_argument("phase net: gradient buffer has the wrong length");
  ad::Tape tape;
  ad::Var g = phase_graph(*this, tape, w, s, true);
  tape.backward(g);
  tape.accumulate_parameter_grads(grad);
  return g.value()[0];
}

}  // namespace hqvmc
