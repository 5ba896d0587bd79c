#include "hqvmc/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hqvmc/autodiff.hpp"

namespace hqvmc {

void TransformerConfig::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxPauliQubits) throw std::invalid_argument("transformer: bad qubit count");
  if (embed_dim < 1) throw std::invalid_argument("transformer: embedding dimension must be positive");
  if (n_heads < 1 || embed_dim % n_heads != 0) {
    throw std::invalid_argument("transformer: head count must divide the embedding dimension");
  }
  if (n_blocks < 0) throw std::invalid_argument("transformer: block count must be non-negative");
}

std::size_t param_count(const TransformerConfig& cfg) {
  cfg.validate();
  const std::size_t d = static_cast<std::size_t>(cfg.embed_dim);
  const std::size_t t = static_cast<std::size_t>(cfg.n_blocks);
  const std::size_t n = static_cast<std::size_t>(cfg.n_qubits);
  return 12 * t * d * d + (10 * t + n + 7) * d + 2;
}

// ---------------------------------------------------------------------------

void SymmetryMask::validate(int n_qubits) const {
  if (!enabled) return;
  if (n_spatial_orbitals < 1) throw std::invalid_argument("symmetry mask: need at least one spatial orbital");
  if (n_up < 0 || n_down < 0 || n_up > n_spatial_orbitals || n_down > n_spatial_orbitals) {
    throw std::invalid_argument("symmetry mask: electron counts must lie in [0, N_O]");
  }
  if (2 * n_spatial_orbitals != n_qubits) {
    throw std::invalid_argument("symmetry mask: qubit count must equal twice the spatial orbital count");
  }
}

std::array<bool, 2> SymmetryMask::allowed(const Configuration& history, int position) const {
  if (!enabled) return {true, true};
  const int parity = position & 1;
  int occupied = 0, vacant = 0;
  for (int k = parity; k < position; k += 2) {
    if (history.bit(k)) ++occupied;
    else ++vacant;
  }
  const int target = parity == 0 ? n_up : n_down;
  return {(n_spatial_orbitals - target) - vacant > 0, target - occupied > 0};
}

bool SymmetryMask::admits(const Configuration& s) const {
  if (!enabled) return true;
  int up = 0, down = 0;
  for (int q = 0; q < s.n; ++q) {
    if (!s.bit(q)) continue;
    if (q & 1) ++down;
    else ++up;
  }
  return up == n_up && down == n_down && s.n == 2 * n_spatial_orbitals;
}

std::array<double, 2> masked_conditionals(std::array<double, 2> raw, const Configuration& history, int position,
                                          const SymmetryMask& mask) {
  if (!mask.enabled) return raw;
  const auto ok = mask.allowed(history, position);
  const double a0 = ok[0] ? raw[0] : 0.0;
  const double a1 = ok[1] ? raw[1] : 0.0;
  const double total = a0 + a1;
  if (!(total > 0.0)) throw std::logic_error("symmetry mask left no admissible value at position " + std::to_string(position));
  return {a0 / total, a1 / total};
}

// ---------------------------------------------------------------------------

Transformer::Transformer(TransformerConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int d = cfg_.embed_dim;
  layout_.add("qubit_embedding", {2, d});
  layout_.add("position_embedding", {cfg_.n_qubits + 1, d});
  for (int b = 0; b < cfg_.n_blocks; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    layout_.add(p + "ln1.scale", {d});
    layout_.add(p + "ln1.offset", {d});
    layout_.add(p + "attn.query", {d, d});
    layout_.add(p + "attn.key", {d, d});
    layout_.add(p + "attn.value", {d, d});
    layout_.add(p + "attn.out.weight", {d, d});
    layout_.add(p + "attn.out.bias", {d});
    layout_.add(p + "ln2.scale", {d});
    layout_.add(p + "ln2.offset", {d});
    layout_.add(p + "ffn.fc1.weight", {d, 4 * d});
    layout_.add(p + "ffn.fc1.bias", {4 * d});
    layout_.add(p + "ffn.fc2.weight", {4 * d, d});
    layout_.add(p + "ffn.fc2.bias", {d});
  }
  layout_.add("final_ln.scale", {d});
  layout_.add("final_ln.offset", {d});
  layout_.add("head.weight", {d, 2});
  layout_.add("head.bias", {2});
  if (layout_.total() != param_count(cfg_)) {
    throw std::logic_error("transformer parameter store disagrees with the closed-form count");
  }
}

std::vector<double> Transformer::init_params(Rng& rng) const {
  std::vector<double> w(layout_.total(), 0.0);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (const auto& slot : layout_.slots()) {
    const auto ends_with = [&slot](const char* suffix) {
      const std::string s(suffix);
      return slot.name.size() >= s.size() && slot.name.compare(slot.name.size() - s.size(), s.size(), s) == 0;
    };
    double* p = w.data() + slot.offset;
    if (ends_with("scale")) {
      std::fill(p, p + slot.size, 1.0);
    } else if (ends_with("bias") || ends_with("offset")) {
      std::fill(p, p + slot.size, 0.0);
    } else {
      for (std::size_t i = 0; i < slot.size; ++i) p[i] = normal(rng);
    }
  }
  return w;
}

namespace {

/// Causal forward pass producing next-bit probabilities of shape [n, 2].
/// Every op is row-local apart from attention, whose row i only sees columns
/// j <= i, so row i is bitwise independent of tokens beyond position i.
ad::Var forward_probs(const Transformer& model, ad::Tape& tape, std::span<const double> w,
                      const std::vector<int>& tokens, bool track) {
  const auto& cfg = model.config();
  const auto& layout = model.layout();
  if (w.size() != layout.total()) throw std::invalid_argument("transformer: parameter vector has the wrong length");
  std::size_t next = 0;
  auto leaf = [&]() {
    const ParamSlot& slot = layout[next++];
    const auto values = w.subspan(slot.offset, slot.size);
    ad::Tensor t(slot.shape, std::vector<double>(values.begin(), values.end()));
    return track ? tape.parameter(std::move(t), slot.offset) : tape.constant(std::move(t));
  };

  const int len = static_cast<int>(tokens.size());
  const int d = cfg.embed_dim;
  const int dh = d / cfg.n_heads;
  std::vector<int> positions(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) positions[static_cast<std::size_t>(i)] = i;
  std::vector<unsigned char> causal(static_cast<std::size_t>(len) * static_cast<std::size_t>(len), 0);
  for (int i = 0; i < len; ++i)
    for (int j = i + 1; j < len; ++j) causal[static_cast<std::size_t>(i * len + j)] = 1;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  const double neg_inf = -std::numeric_limits<double>::infinity();

  ad::Var qubit_emb = leaf();
  ad::Var pos_emb = leaf();
  ad::Var x = ad::add(ad::embedding(qubit_emb, tokens), ad::embedding(pos_emb, positions));

  for (int b = 0; b < cfg.n_blocks; ++b) {
    ad::Var g1 = leaf(), o1 = leaf();
    ad::Var wq = leaf(), wk = leaf(), wv = leaf(), wo = leaf(), bo = leaf();
    ad::Var g2 = leaf(), o2 = leaf();
    ad::Var w1 = leaf(), c1 = leaf(), w2 = leaf(), c2 = leaf();

    ad::Var h = ad::layer_norm(x, g1, o1);
    ad::Var q = ad::matmul(h, wq), k = ad::matmul(h, wk), v = ad::matmul(h, wv);
    std::vector<ad::Var> heads;
    heads.reserve(static_cast<std::size_t>(cfg.n_heads));
    for (int j = 0; j < cfg.n_heads; ++j) {
      ad::Var qh = ad::slice_cols(q, j * dh, (j + 1) * dh);
      ad::Var kh = ad::slice_cols(k, j * dh, (j + 1) * dh);
      ad::Var vh = ad::slice_cols(v, j * dh, (j + 1) * dh);
      ad::Var scores = ad::scale(ad::matmul(qh, ad::transpose(kh)), inv_sqrt);
      ad::Var att = ad::softmax(ad::masked_fill(scores, causal, neg_inf));
      heads.push_back(ad::matmul(att, vh));
    }
    ad::Var merged = heads.size() == 1 ? heads[0] : ad::concat_cols(heads);
    x = ad::add(x, ad::add_bias(ad::matmul(merged, wo), bo));

    ad::Var h2 = ad::layer_norm(x, g2, o2);
    ad::Var f = ad::relu(ad::add_bias(ad::matmul(h2, w1), c1));
    x = ad::add(x, ad::add_bias(ad::matmul(f, w2), c2));
  }
  ad::Var gf = leaf(), of = leaf();
  ad::Var wh = leaf(), bh = leaf();
  x = ad::layer_norm(x, gf, of);
  return ad::softmax(ad::add_bias(ad::matmul(x, wh), bh));
}

std::vector<int> tokens_for(const Configuration& s, int n) {
  std::vector<int> tokens(static_cast<std::size_t>(n), 0);
  for (int i = 1; i < n; ++i) tokens[static_cast<std::size_t>(i)] = s.bit(i - 1);
  return tokens;
}

void check_config(const TransformerConfig& cfg, const Configuration& s) {
  if (s.n != cfg.n_qubits) throw std::invalid_argument("configuration length differs from the transformer size");
}

struct LogProbGraph {
  ad::Var log_p;
  ad::Var probs;
};

/// log p(s) as a graph. The masked path multiplies by the 0/1 mask, then divides by
/// the masked row sum; the sampler mirrors these exact floating-point steps.
LogProbGraph log_prob_graph(const Transformer& model, ad::Tape& tape, std::span<const double> w,
                            const Configuration& s, const SymmetryMask& mask, bool track) {
  const int n = model.config().n_qubits;
  ad::Var probs = forward_probs(model, tape, w, tokens_for(s, n), track);
  std::vector<int> realized(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) realized[static_cast<std::size_t>(i)] = s.bit(i);
  if (!mask.enabled) return {ad::sum(ad::log(ad::pick(probs, realized))), probs};

  ad::Tensor m({n, 2}, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto ok = mask.allowed(s, i);
    m.at(i, 0) = ok[0] ? 1.0 : 0.0;
    m.at(i, 1) = ok[1] ? 1.0 : 0.0;
  }
  ad::Var masked = ad::mul(probs, tape.constant(std::move(m)));
  ad::Var steps = ad::sub(ad::log(ad::pick(masked, realized)), ad::log(ad::sum_last(masked)));
  return {ad::sum(steps), probs};
}

void require_finite(double log_p, const Configuration& s) {
  if (!std::isfinite(log_p)) throw InvalidConfiguration("configuration " + s.str() + " has zero probability");
}

}  // namespace

std::vector<std::array<double, 2>> Transformer::raw_distributions(std::span<const double> w,
                                                                  const Configuration& s) const {
  check_config(cfg_, s);
  ad::Tape tape;
  ad::Var probs = forward_probs(*this, tape, w, tokens_for(s, cfg_.n_qubits), false);
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(cfg_.n_qubits));
  for (int i = 0; i < cfg_.n_qubits; ++i) out[static_cast<std::size_t>(i)] = {probs.value().at(i, 0), probs.value().at(i, 1)};
  return out;
}

Inference Transformer::infer(std::span<const double> w, const Configuration& s, const SymmetryMask& mask) const {
  check_config(cfg_, s);
  mask.validate(cfg_.n_qubits);
  if (!mask.admits(s)) throw InvalidConfiguration("configuration " + s.str() + " violates the particle-number mask");
  ad::Tape tape;
  const LogProbGraph g = log_prob_graph(*this, tape, w, s, mask, false);
  Inference out;
  out.log_p = g.log_p.value()[0];
  require_finite(out.log_p, s);
  const int n = cfg_.n_qubits;
  out.distributions.resize(static_cast<std::size_t>(n));
  out.conditionals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::array<double, 2> raw = {g.probs.value().at(i, 0), g.probs.value().at(i, 1)};
    const auto dist = masked_conditionals(raw, s, i, mask);
    out.distributions[static_cast<std::size_t>(i)] = dist;
    out.conditionals[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(s.bit(i))];
  }
  return out;
}

double Transformer::log_prob(std::span<const double> w, const Configuration& s, const SymmetryMask& mask) const {
  check_config(cfg_, s);
  if (!mask.admits(s)) throw InvalidConfiguration("configuration " + s.str() + " violates the particle-number mask");
  ad::Tape tape;
  const double lp = log_prob_graph(*this, tape, w, s, mask, false).log_p.value()[0];
  require_finite(lp, s);
  return lp;
}

double Transformer::log_prob_grad(std::span<const double> w, const Configuration& s, const SymmetryMask& mask,
                                  std::span<double> grad) const {
  check_config(cfg_, s);
  if (grad.size() != layout_.total()) throw std::invalid_argument("transformer: gradient buffer has the wrong length");
  if (!mask.admits(s)) throw InvalidConfiguration("configuration " + s.str() + " violates the particle-number mask");
  ad::Tape tape;
  const ad::Var lp = log_prob_graph(*this, tape, w, s, mask, true).log_p;
  require_finite(lp.value()[0], s);
  tape.backward(lp);
  tape.accumulate_parameter_grads(grad);
  return lp.value()[0];
}

std::vector<SampledConfig> Transformer::sample_counts(std::span<const double> w, std::int64_t batch,
                                                      const SymmetryMask& mask, Rng& rng) const {
  if (batch < 1) throw std::invalid_argument("sample: batch size must be at least 1");
  mask.validate(cfg_.n_qubits);
  const int n = cfg_.n_qubits;
  std::vector<SampledConfig> out;

  struct Node {
    Configuration prefix;
    int depth;
    std::int64_t count;
    double log_p;
  };
  // Depth-first with the 0-branch explored first, so output order is deterministic.
  std::vector<Node> stack{{Configuration{0, n}, 0, batch, 0.0}};
  while (!stack.empty()) {
    Node node = stack.back();
    stack.pop_back();
    if (node.depth == n) {
      out.push_back({node.prefix, node.count, node.log_p});
      continue;
    }
    const int i = node.depth;
    ad::Tape tape;
    ad::Var probs = forward_probs(*this, tape, w, tokens_for(node.prefix, n), false);
    const double p0 = probs.value().at(i, 0), p1 = probs.value().at(i, 1);

    std::array<double, 2> step_log{};
    double q1 = 0.0;
    if (mask.enabled) {
      const auto ok = mask.allowed(node.prefix, i);
      const double a0 = p0 * (ok[0] ? 1.0 : 0.0);
      const double a1 = p1 * (ok[1] ? 1.0 : 0.0);
      double denom = 0.0;
      denom += a0;
      denom += a1;
      if (!(denom > 0.0)) {
        throw std::logic_error("symmetry mask left no admissible value at position " + std::to_string(i));
      }
      step_log = {std::log(a0) - std::log(denom), std::log(a1) - std::log(denom)};
      q1 = a1 / denom;
    } else {
      step_log = {std::log(p0), std::log(p1)};
      q1 = p1 / (p0 + p1);
    }
    std::binomial_distribution<std::int64_t> split(node.count, std::clamp(q1, 0.0, 1.0));
    const std::int64_t ones = split(rng);
    const std::int64_t zeros = node.count - ones;
    if (ones > 0) {
      Configuration child = node.prefix;
      child.set(i, 1);
      stack.push_back({child, i + 1, ones, node.log_p + step_log[1]});
    }
    if (zeros > 0) stack.push_back({node.prefix, i + 1, zeros, node.log_p + step_log[0]});
  }
  return out;
}

std::vector<Configuration> Transformer::sample(std::span<const double> w, std::int64_t batch,
                                               const SymmetryMask& mask, Rng& rng) const {
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (const auto& g : sample_counts(w, batch, mask, rng))
    for (std::int64_t k = 0; k < g.count; ++k) out.push_back(g.s);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace hqvmc
