#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqvmc/driver.hpp"
#include "hqvmc/exact.hpp"
#include "hqvmc/hamiltonian_io.hpp"
#include "hqvmc/phase_net.hpp"
#include "hqvmc/transformer.hpp"

namespace {

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> out;
  if (text.empty() || text == "none") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(std::stoi(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-neural variational Monte Carlo"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "train a wavefunction");
  std::string config_path, preset_name, out_dir, hamiltonian;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  int every = 10;
  bool quiet = false;
  auto* config_opt = run_cmd->add_option("--config", config_path, "key = value config file");
  auto* preset_opt = run_cmd->add_option("--preset", preset_name, "named experiment preset");
  config_opt->excludes(preset_opt);
  auto* seed_opt = run_cmd->add_option("--seed", seed, "master seed");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--hamiltonian", hamiltonian, "afh:N[:J][:pbc|obc] or a Hamiltonian file");
  run_cmd->add_option("--set", overrides, "extra key=value overrides");
  run_cmd->add_option("--every", every, "progress line interval")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet", quiet, "no progress output");

  auto* exact_cmd = app.add_subcommand("exact", "print the exact ground energy");
  std::string exact_source, method = "auto";
  exact_cmd->add_option("--hamiltonian", exact_source, "afh:N[:J][:pbc|obc] or a Hamiltonian file")->required();
  exact_cmd->add_option("--method", method, "auto, full or power")->check(CLI::IsMember({"auto", "full", "power"}));

  auto* count_cmd = app.add_subcommand("param-count", "print the Transformer parameter count");
  count_cmd->set_help_flag("--help", "print this help message and exit");
  int d = 0, h = 1, t = 0, nq = 0;
  std::string hidden;
  count_cmd->add_option("--d", d, "embedding dimension")->required();
  count_cmd->add_option("--h", h, "attention heads");
  count_cmd->add_option("--T", t, "Transformer blocks")->required();
  count_cmd->add_option("--nq", nq, "qubits")->required();
  count_cmd->add_option("--hidden", hidden, "phase-net hidden widths, e.g. 16,8");

  auto* convert_cmd = app.add_subcommand("convert", "write a Hamiltonian in the Pauli text format");
  std::string convert_in, convert_out;
  convert_cmd->add_option("--hamiltonian", convert_in, "afh:N[:J][:pbc|obc] or a Hamiltonian file")->required();
  convert_cmd->add_option("--output", convert_out, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (config_path.empty() && preset_name.empty()) throw std::invalid_argument("run needs --config or --preset");
      hqvmc::RunConfig cfg = config_path.empty() ? hqvmc::preset(preset_name) : hqvmc::RunConfig::load(config_path);
      if (*seed_opt) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!hamiltonian.empty()) cfg.hamiltonian = hamiltonian;
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (cfg.hamiltonian.empty()) {
        throw std::invalid_argument("this preset needs --hamiltonian <file> (a 6-qubit Pauli or fermionic file)");
      }
      const auto progress = [&](const hqvmc::IterationRecord& r) {
        if (quiet || (r.iteration % every != 0 && r.iteration + 1 != cfg.iterations)) return;
        std::fprintf(stderr, "iter %6lld  E = %.10f  std_err = %.3e  rel_err = %.3e  max_w = %.3f  lr = %.2e\n",
                     static_cast<long long>(r.iteration), r.energy, r.std_error, r.rel_error, r.max_weight, r.lr);
      };
      const auto result = hqvmc::run(cfg, progress);
      std::printf("final_energy %.12f\nfinal_std_error %.3e\n", result.final_energy, result.final_std_error);
      if (result.exact_energy) std::printf("exact_energy %.12f\n", *result.exact_energy);
      if (result.rel_error) std::printf("relative_error %.6e\n", *result.rel_error);
      if (result.variational_energy) std::printf("variational_energy %.12f\n", *result.variational_energy);
    } else if (*exact_cmd) {
      const auto ham = hqvmc::resolve_hamiltonian(exact_source);
      const auto dense = hqvmc::to_dense(ham);
      const auto m = method == "full"    ? hqvmc::EigenMethod::full
                     : method == "power" ? hqvmc::EigenMethod::power
                                         : hqvmc::EigenMethod::automatic;
      const auto gs = hqvmc::ground_state(dense, m);
      std::printf("%.12f\n", gs.energy);
      std::fprintf(stderr, "residual %.3e\n", hqvmc::residual(dense, gs.energy, gs.vector));
    } else if (*convert_cmd) {
      const auto ham = hqvmc::resolve_hamiltonian(convert_in);
      if (convert_out.empty()) {
        hqvmc::write_pauli_hamiltonian(std::cout, ham);
      } else {
        std::ofstream os(convert_out);
        if (!os) throw std::runtime_error("cannot write " + convert_out);
        hqvmc::write_pauli_hamiltonian(os, ham);
      }
    } else if (*count_cmd) {
      std::printf("%zu\n", hqvmc::param_count({nq, d, h, t}));
      if (!hidden.empty()) std::printf("phase_net %zu\n", hqvmc::PhaseNet::count(nq, parse_widths(hidden)));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
