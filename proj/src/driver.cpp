#include "hqvmc/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "hqvmc/checkpoint.hpp"
#include "hqvmc/exact.hpp"
#include "hqvmc/hamiltonian_io.hpp"

namespace hqvmc {

namespace {

enum Purpose : std::uint64_t { kInit = 1, kSample = 2, kShots = 3, kNeighbor = 4 };

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  std::istringstream in(cfg.to_text());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      const auto bare = line.find(" =");
      if (bare != std::string::npos) j[line.substr(0, bare)] = "";
      continue;
    }
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

Checkpoint make_checkpoint(const RunConfig& cfg, const HybridWavefunction& wf, const std::vector<double>& w,
                           const AdamState& adam, std::int64_t iteration) {
  Checkpoint c;
  c.iteration = iteration;
  c.layout_checksum = wf.layout_checksum();
  c.config_text = cfg.to_text();
  for (int b = 0; b < kNumBlocks; ++b) c.blocks[static_cast<std::size_t>(b)] = wf.block(static_cast<Block>(b));
  c.params = w;
  c.optimizer = cfg.optimizer;
  c.adam = adam;
  return c;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix(master);
  h = splitmix(h ^ purpose);
  h = splitmix(h ^ a);
  return splitmix(h ^ b);
}

std::string log_csv_header() {
  return "iteration,energy,energy_imag,variance,std_error,rel_error,max_weight,grad_inf,lr,active_params,"
         "unique_configs";
}

std::string log_csv_row(const IterationRecord& r) {
  std::ostringstream os;
  os << r.iteration << "," << num(r.energy) << "," << num(r.energy_imag) << "," << num(r.variance) << ","
     << num(r.std_error) << "," << num(r.rel_error) << "," << num(r.max_weight) << "," << num(r.grad_inf) << ","
     << num(r.lr) << "," << r.active_params << "," << r.unique_configs;
  return os.str();
}

double enumerated_energy(const HybridWavefunction& wf, std::span<const double> w, const Hamiltonian& h) {
  const int n = h.n_qubits();
  if (n > kMaxDenseQubits) throw std::invalid_argument("enumeration is capped at 12 qubits");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::optional<LogPsi>> table(dim);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < dim; ++b) {
    const Configuration s{b, n};
    if (!wf.config().mask.admits(s)) continue;
    try {
      table[b] = wf.log_psi(w, s, Measurement::exact());
      max_log = std::max(max_log, table[b]->log_modulus);
    } catch (const InvalidConfiguration&) {
    }
  }
  const LogPsiFn lookup = [&table](const Configuration& s) { return table[s.bits]; };
  double num_sum = 0.0, den = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    if (!table[b]) continue;
    const double weight = std::exp(2.0 * (table[b]->log_modulus - max_log));
    const Configuration s{b, n};
    num_sum += weight * local_energy(s, *table[b], h, lookup).real();
    den += weight;
  }
  return num_sum / den;
}

RunResult run(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  return run(cfg, resolve_hamiltonian(cfg.hamiltonian), progress);
}

RunResult run(const RunConfig& cfg, const Hamiltonian& h, const ProgressFn& progress) {
  cfg.validate();
  const int n = h.n_qubits();
  if (n > kMaxSimQubits) throw std::invalid_argument("system exceeds the simulator qubit cap");
  const HybridWavefunction wf(cfg.hybrid(n));
  const BlockPlan plan = cfg.block_plan();
  const Schedule schedule = cfg.schedule();

  Rng init_rng(derive_seed(cfg.seed, kInit));
  std::vector<double> w = wf.init_params(init_rng, cfg.init_scale);
  if (!cfg.init_checkpoint.empty()) {
    restore_blocks(load_checkpoint(cfg.init_checkpoint), wf, w, BlockSet::nqs());
  }
  AdamState adam = AdamState::create(w.size(), cfg.beta1, cfg.beta2);

  RunResult result;
  result.n_qubits = n;
  if (n <= kMaxDenseQubits) result.exact_energy = exact_ground_energy(h);

  const bool write = !cfg.out_dir.empty();
  std::ofstream log_file, timing_file;
  if (write) {
    std::filesystem::create_directories(cfg.out_dir);
    log_file.open(std::filesystem::path(cfg.out_dir) / "log.csv");
    timing_file.open(std::filesystem::path(cfg.out_dir) / "timing.csv");
    if (!log_file || !timing_file) throw std::runtime_error("cannot write logs into " + cfg.out_dir);
    log_file << "# hqvmc log v" << kLogVersion << "\n" << log_csv_header() << "\n";
    timing_file << "iteration,wall_ms\n";
  }
  auto checkpoint_path = [&cfg](std::int64_t it) {
    return (std::filesystem::path(cfg.out_dir) / ("checkpoint-" + std::to_string(it))).string();
  };

  std::map<unsigned, std::vector<std::size_t>> active_cache;
  const SymmetryMask& mask = wf.config().mask;

  for (std::int64_t it = 0; it < cfg.iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const BlockSet active = plan.active(it);
      auto& active_idx = active_cache[active.bits()];
      if (active_idx.empty()) active_idx = wf.active_indices(active);
      if (active_idx.empty()) throw std::runtime_error("active parameter blocks are empty for this wavefunction");
      const double lr = cosine_lr(schedule, it);

      const BlockRange tr = wf.block(Block::transformer);
      Rng sample_rng(derive_seed(cfg.seed, kSample, static_cast<std::uint64_t>(it)));
      const auto groups = wf.transformer().sample_counts(std::span<const double>(w).subspan(tr.offset, tr.size),
                                                         cfg.batch_size, mask, sample_rng);
      const std::size_t k = groups.size();
      const Eigen::Index p = static_cast<Eigen::Index>(active_idx.size());

      auto mode_for = [&cfg](Rng& r) { return cfg.shots > 0 ? Measurement::sampled(cfg.shots, r) : Measurement::exact(); };

      SampleBatch batch;
      batch.configs.resize(k);
      batch.counts.resize(k);
      batch.log_p.resize(k);
      batch.amp_sq.resize(k);
      batch.e_loc.resize(k);
      batch.o_rows.resize(static_cast<Eigen::Index>(k), p);
      std::vector<LogPsi> psi(k);
      std::vector<std::vector<cplx>> rows(k, std::vector<cplx>(active_idx.size()));
      parallel_for(k, cfg.workers, [&](std::size_t u) {
        Rng r(derive_seed(cfg.seed, kShots, static_cast<std::uint64_t>(it), groups[u].s.bits));
        psi[u] = wf.o_vector(w, groups[u].s, mode_for(r), active, rows[u]);
      });

      std::unordered_map<Configuration, std::optional<LogPsi>, ConfigurationHash> cache;
      for (std::size_t u = 0; u < k; ++u) cache.emplace(groups[u].s, psi[u]);
      std::vector<Configuration> pending;
      std::vector<std::vector<Hamiltonian::ConnectedElement>> links(k);
      for (std::size_t u = 0; u < k; ++u) {
        links[u] = h.connected(groups[u].s);
        for (const auto& e : links[u]) {
          if (cache.count(e.state)) continue;
          if (!mask.admits(e.state)) {
            cache.emplace(e.state, std::nullopt);
            continue;
          }
          cache.emplace(e.state, std::nullopt);
          pending.push_back(e.state);
        }
      }
      std::vector<std::optional<LogPsi>> pending_psi(pending.size());
      parallel_for(pending.size(), cfg.workers, [&](std::size_t i) {
        Rng r(derive_seed(cfg.seed, kNeighbor, static_cast<std::uint64_t>(it), pending[i].bits));
        try {
          pending_psi[i] = wf.log_psi(w, pending[i], mode_for(r));
        } catch (const InvalidConfiguration&) {
          pending_psi[i] = std::nullopt;
        }
      });
      for (std::size_t i = 0; i < pending.size(); ++i) cache[pending[i]] = pending_psi[i];
      const LogPsiFn lookup = [&cache](const Configuration& s) -> std::optional<LogPsi> {
        const auto f = cache.find(s);
        return f == cache.end() ? std::nullopt : f->second;
      };

      for (std::size_t u = 0; u < k; ++u) {
        batch.configs[u] = groups[u].s;
        batch.counts[u] = groups[u].count;
        batch.log_p[u] = psi[u].log_p;
        batch.amp_sq[u] = std::exp(2.0 * psi[u].amplitude);
        batch.e_loc[u] = local_energy(groups[u].s, psi[u], h, lookup);
        for (Eigen::Index j = 0; j < p; ++j) batch.o_rows(static_cast<Eigen::Index>(u), j) = rows[u][static_cast<std::size_t>(j)];
      }
      EstimatorOutput est = estimate(batch);

      IterationRecord rec;
      rec.iteration = it;
      rec.energy = est.energy;
      rec.energy_imag = est.energy_imag;
      rec.variance = est.variance;
      rec.std_error = est.std_error;
      rec.rel_error = result.exact_energy && *result.exact_energy != 0.0
                          ? std::abs((est.energy - *result.exact_energy) / *result.exact_energy)
                          : std::numeric_limits<double>::quiet_NaN();
      rec.max_weight = est.max_weight;
      rec.grad_inf = est.grad.size() ? est.grad.cwiseAbs().maxCoeff() : 0.0;
      rec.lr = lr;
      rec.active_params = p;
      rec.unique_configs = static_cast<std::int64_t>(k);
      if (!std::isfinite(rec.energy) || !std::isfinite(rec.variance) || !std::isfinite(rec.grad_inf)) {
        throw std::runtime_error("non-finite estimator output");
      }

      if (cfg.optimizer == Method::sr) {
        sr_step(w, active_idx, est.fisher_factor, est.grad, lr, cfg.sr_eps);
      } else {
        adam_step(w, active_idx, est.grad, adam, lr);
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

      result.records.push_back(rec);
      result.last = std::move(est);
      if (write) {
        log_file << log_csv_row(rec) << "\n" << std::flush;
        timing_file << it << "," << num(rec.wall_ms) << "\n";
      }
      if (progress) progress(rec);
      if (write && cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0 && it + 1 < cfg.iterations) {
        save_checkpoint(checkpoint_path(it + 1), make_checkpoint(cfg, wf, w, adam, it + 1));
      }
    } catch (const std::exception& e) {
      std::string where;
      if (write) {
        const std::string path = checkpoint_path(it);
        try {
          save_checkpoint(path, make_checkpoint(cfg, wf, w, adam, it));
          where = " (state saved to " + path + ")";
        } catch (const std::exception&) {
        }
      }
      throw std::runtime_error("iteration " + std::to_string(it) + ": " + e.what() + where);
    }
  }

  const std::size_t total = result.records.size();
  const std::size_t tail = std::min<std::size_t>(100, std::max<std::size_t>(1, total / 10));
  double mean = 0.0;
  for (std::size_t i = total - tail; i < total; ++i) mean += result.records[i].energy;
  mean /= static_cast<double>(tail);
  double ss = 0.0;
  for (std::size_t i = total - tail; i < total; ++i) ss += (result.records[i].energy - mean) * (result.records[i].energy - mean);
  const double tail_sd = tail > 1 ? std::sqrt(ss / static_cast<double>(tail - 1)) : 0.0;
  result.final_energy = mean;
  result.final_std_error = tail_sd / std::sqrt(static_cast<double>(tail));
  if (result.exact_energy) {
    result.rel_error = std::abs((mean - *result.exact_energy) / *result.exact_energy);
    result.variational_energy = enumerated_energy(wf, w, h);
  }
  result.params = w;

  if (write) {
    save_checkpoint(checkpoint_path(cfg.iterations), make_checkpoint(cfg, wf, w, adam, cfg.iterations));
    nlohmann::json j;
    j["schema_version"] = kSummaryVersion;
    j["final_energy"] = result.final_energy;
    j["final_std_error"] = result.final_std_error;
    j["tail_iterations"] = tail;
    j["tail_std"] = tail_sd;
    j["exact_energy"] = result.exact_energy ? nlohmann::json(*result.exact_energy) : nlohmann::json(nullptr);
    j["relative_error"] = result.rel_error ? nlohmann::json(*result.rel_error) : nlohmann::json(nullptr);
    j["variational_energy"] =
        result.variational_energy ? nlohmann::json(*result.variational_energy) : nlohmann::json(nullptr);
    j["iterations"] = cfg.iterations;
    j["seed"] = cfg.seed;
    j["optimizer"] = to_string(cfg.optimizer);
    j["n_qubits"] = n;
    j["n_params"] = wf.num_params();
    j["layout_checksum"] = wf.layout_checksum();
    j["config"] = config_json(cfg);
    std::ofstream os(std::filesystem::path(cfg.out_dir) / "summary.json");
    os << j.dump(2) << "\n";
  }
  return result;
}

}  // namespace hqvmc
