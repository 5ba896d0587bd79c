#include "hqvmc/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hqvmc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw std::invalid_argument(key + ": expected a boolean, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    // Accept integral values written in exponent form, e.g. 1e4.
    std::size_t fused = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &fused);
    } catch (const std::exception&) {
      fused = 0;
    }
    if (fused == 0 || fused != v.size() || d != static_cast<double>(static_cast<long long>(d))) {
      throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
    }
    out = static_cast<long long>(d);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
  return out;
}

std::vector<int> parse_widths(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (v == "none" || v.empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(key, trim(item))));
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  static const std::map<std::string, std::function<void(RunConfig&, const std::string&, const std::string&)>> setters = {
      {"hamiltonian", [](RunConfig& c, const std::string&, const std::string& x) { c.hamiltonian = x; }},
      {"embed_dim", [](RunConfig& c, const std::string& k, const std::string& x) { c.embed_dim = static_cast<int>(parse_int(k, x)); }},
      {"heads", [](RunConfig& c, const std::string& k, const std::string& x) { c.n_heads = static_cast<int>(parse_int(k, x)); }},
      {"blocks", [](RunConfig& c, const std::string& k, const std::string& x) { c.n_blocks = static_cast<int>(parse_int(k, x)); }},
      {"phase_hidden", [](RunConfig& c, const std::string& k, const std::string& x) { c.phase_hidden = parse_widths(k, x); }},
      {"circuits", [](RunConfig& c, const std::string& k, const std::string& x) { c.use_circuits = parse_bool(k, x); }},
      {"layers", [](RunConfig& c, const std::string& k, const std::string& x) { c.n_layers = static_cast<int>(parse_int(k, x)); }},
      {"entanglement", [](RunConfig& c, const std::string&, const std::string& x) { c.entanglement = parse_entanglement(x); }},
      {"share_theta", [](RunConfig& c, const std::string& k, const std::string& x) { c.share_theta = parse_bool(k, x); }},
      {"tanh", [](RunConfig& c, const std::string& k, const std::string& x) { c.tanh_mode = parse_bool(k, x); }},
      {"rescale_a", [](RunConfig& c, const std::string& k, const std::string& x) { c.rescale_a = parse_double(k, x); }},
      {"init_scale", [](RunConfig& c, const std::string& k, const std::string& x) { c.init_scale = parse_double(k, x); }},
      {"mask", [](RunConfig& c, const std::string& k, const std::string& x) { c.mask = parse_bool(k, x); }},
      {"n_up", [](RunConfig& c, const std::string& k, const std::string& x) { c.n_up = static_cast<int>(parse_int(k, x)); }},
      {"n_down", [](RunConfig& c, const std::string& k, const std::string& x) { c.n_down = static_cast<int>(parse_int(k, x)); }},
      {"batch", [](RunConfig& c, const std::string& k, const std::string& x) { c.batch_size = parse_int(k, x); }},
      {"shots", [](RunConfig& c, const std::string& k, const std::string& x) { c.shots = x == "exact" ? 0 : parse_int(k, x); }},
      {"optimizer", [](RunConfig& c, const std::string&, const std::string& x) { c.optimizer = parse_method(x); }},
      {"lr", [](RunConfig& c, const std::string& k, const std::string& x) { c.lr = parse_double(k, x); }},
      {"lr_min", [](RunConfig& c, const std::string& k, const std::string& x) { c.lr_min = parse_double(k, x); }},
      {"cosine", [](RunConfig& c, const std::string& k, const std::string& x) { c.cosine = parse_bool(k, x); }},
      {"sr_eps", [](RunConfig& c, const std::string& k, const std::string& x) { c.sr_eps = parse_double(k, x); }},
      {"beta1", [](RunConfig& c, const std::string& k, const std::string& x) { c.beta1 = parse_double(k, x); }},
      {"beta2", [](RunConfig& c, const std::string& k, const std::string& x) { c.beta2 = parse_double(k, x); }},
      {"iterations", [](RunConfig& c, const std::string& k, const std::string& x) { c.iterations = parse_int(k, x); }},
      {"plan", [](RunConfig& c, const std::string&, const std::string& x) { c.plan = x; }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& x) { c.seed = static_cast<std::uint64_t>(parse_int(k, x)); }},
      {"out", [](RunConfig& c, const std::string&, const std::string& x) { c.out_dir = x; }},
      {"checkpoint_every", [](RunConfig& c, const std::string& k, const std::string& x) { c.checkpoint_every = parse_int(k, x); }},
      {"init_checkpoint", [](RunConfig& c, const std::string&, const std::string& x) { c.init_checkpoint = x; }},
      {"workers", [](RunConfig& c, const std::string& k, const std::string& x) { c.workers = static_cast<int>(parse_int(k, x)); }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->second(*this, key, v);
}

RunConfig RunConfig::parse(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig RunConfig::parse(const std::string& text) { return parse(text, RunConfig{}); }

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  std::string widths;
  for (std::size_t i = 0; i < phase_hidden.size(); ++i) widths += (i ? "," : "") + std::to_string(phase_hidden[i]);
  os << "hamiltonian = " << hamiltonian << "\n"
     << "embed_dim = " << embed_dim << "\n"
     << "heads = " << n_heads << "\n"
     << "blocks = " << n_blocks << "\n"
     << "phase_hidden = " << (widths.empty() ? "none" : widths) << "\n"
     << "circuits = " << bool_text(use_circuits) << "\n"
     << "layers = " << n_layers << "\n"
     << "entanglement = " << to_string(entanglement) << "\n"
     << "share_theta = " << bool_text(share_theta) << "\n"
     << "tanh = " << bool_text(tanh_mode) << "\n"
     << "rescale_a = " << fmt(rescale_a) << "\n"
     << "init_scale = " << fmt(init_scale) << "\n"
     << "mask = " << bool_text(mask) << "\n"
     << "n_up = " << n_up << "\n"
     << "n_down = " << n_down << "\n"
     << "batch = " << batch_size << "\n"
     << "shots = " << (shots == 0 ? std::string("exact") : std::to_string(shots)) << "\n"
     << "optimizer = " << to_string(optimizer) << "\n"
     << "lr = " << fmt(lr) << "\n"
     << "lr_min = " << fmt(lr_min) << "\n"
     << "cosine = " << bool_text(cosine) << "\n"
     << "sr_eps = " << fmt(sr_eps) << "\n"
     << "beta1 = " << fmt(beta1) << "\n"
     << "beta2 = " << fmt(beta2) << "\n"
     << "iterations = " << iterations << "\n"
     << "plan = " << plan << "\n"
     << "seed = " << seed << "\n"
     << "out = " << out_dir << "\n"
     << "checkpoint_every = " << checkpoint_every << "\n"
     << "init_checkpoint = " << init_checkpoint << "\n"
     << "workers = " << workers << "\n";
  return os.str();
}

void RunConfig::validate() const {
  if (hamiltonian.empty()) throw std::invalid_argument("no Hamiltonian given");
  if (batch_size < 2) throw std::invalid_argument("batch size must be at least 2");
  if (shots < 0) throw std::invalid_argument("shot count must be non-negative (0 = exact)");
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cosine && (!(lr_min >= 0.0) || lr_min > lr)) throw std::invalid_argument("lr_min must lie in [0, lr]");
  if (!(sr_eps >= 0.0)) throw std::invalid_argument("sr_eps must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam decay rates must lie in [0, 1)");
  }
  if (n_layers < 0) throw std::invalid_argument("layer count must be non-negative");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be non-negative");
  if (tanh_mode && !(rescale_a > 0.0)) throw std::invalid_argument("rescale_a must be positive");
  if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be non-negative");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  const BlockPlan p = block_plan();
  if (p.total_iterations() != iterations) {
    throw std::invalid_argument("block plan spans " + std::to_string(p.total_iterations()) +
                                " iterations but the run has " + std::to_string(iterations));
  }
}

BlockPlan RunConfig::block_plan() const {
  if (plan.empty()) return BlockPlan::joint(iterations);
  return BlockPlan::parse(plan);
}

HybridConfig RunConfig::hybrid(int n_qubits) const {
  HybridConfig h;
  h.transformer = {n_qubits, embed_dim, n_heads, n_blocks};
  h.phase_hidden = phase_hidden;
  h.use_circuits = use_circuits;
  h.amp_circuit = {n_qubits, n_layers, entanglement};
  h.phase_circuit = {n_qubits, n_layers, entanglement};
  h.share_theta = share_theta;
  h.tanh_mode = tanh_mode;
  h.rescale_a = rescale_a;
  if (mask) h.mask = SymmetryMask::electrons(n_qubits / 2, n_up, n_down);
  h.validate();
  return h;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2-grid", "fig3-scaling", "fig4-sequential",
                                                 "fig5-lih", "fig6-afh7", "nqs-baseline"};
  return names;
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "fig2-grid" || name == "fig3-scaling") {
    c.hamiltonian = name == "fig2-grid" ? "afh:4" : "afh:8";
    c.embed_dim = 8;
    c.n_heads = 4;
    c.n_blocks = 2;
    c.phase_hidden = {16};
    c.n_layers = 2;
    c.entanglement = name == "fig2-grid" ? Entanglement::full : Entanglement::linear;
    c.batch_size = 1000;
    c.shots = 1000;
    c.optimizer = Method::sr;
    c.lr = 0.02;
    c.cosine = false;
    c.iterations = 400;
    return c;
  }
  if (name == "fig4-sequential") {
    c.hamiltonian = "afh:6";
    c.embed_dim = 4;
    c.n_heads = 2;
    c.n_blocks = 1;
    c.phase_hidden = {16};
    c.n_layers = 4;
    c.entanglement = Entanglement::full;
    c.batch_size = 10000;
    c.shots = 0;
    c.optimizer = Method::adam;
    c.lr = 0.01;
    c.cosine = false;
    c.iterations = 600;
    c.plan = "nqs:300;circuits:300";
    return c;
  }
  if (name == "fig5-lih") {
    c.hamiltonian.clear();  // must be supplied
    c.share_theta = true;
    c.mask = true;
    c.n_up = 1;
    c.n_down = 1;
    return c;
  }
  if (name == "fig6-afh7" || name == "nqs-baseline") {
    c.hamiltonian = "afh:7";
    c.embed_dim = 4;
    c.n_heads = 2;
    c.n_blocks = 1;
    c.phase_hidden = {16, 8};
    c.share_theta = true;
    if (name == "nqs-baseline") {
      c.use_circuits = false;
      c.beta2 = 0.99;
    }
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace hqvmc
