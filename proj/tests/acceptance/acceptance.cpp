// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion 6   a single criterion (repeatable)

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqvmc/checkpoint.hpp"
#include "hqvmc/driver.hpp"
#include "hqvmc/estimators.hpp"
#include "hqvmc/exact.hpp"
#include "hqvmc/hamiltonian_io.hpp"
#include "oracles.hpp"

using namespace hqvmc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

fs::path g_work;

void note(const char* fmt, auto... args) {
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
  std::fflush(stderr);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + sci(v[i]);
  return out + "]";
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// Richardson-extrapolated central difference.
double derivative(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x,
                  std::size_t i, double h = 1e-5) {
  const double d1 = oracle::central_diff(f, x, i, h);
  const double d2 = oracle::central_diff(f, x, i, h / 2);
  return (4 * d2 - d1) / 3;
}

std::vector<Hamiltonian> small_hamiltonians() {
  std::vector<Hamiltonian> hs;
  for (int n = 2; n <= 6; ++n) {
    hs.push_back(build_afh_chain(n, 1.0, true));
    hs.push_back(build_afh_chain(n, 0.75, false));
  }
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 6; ++n) {
    std::vector<PauliTerm> terms;
    for (int k = 0; k < 20; ++k) {
      std::string s;
      for (int q = 0; q < n; ++q) s += "IXYZ"[rng() % 4];
      terms.push_back({cplx(g(rng), 0), PauliString::parse(s)});
    }
    hs.emplace_back(n, terms);
  }
  hs.push_back(load_hamiltonian_file(std::string(HQVMC_TEST_DATA) + "/chem6.pauli"));
  return hs;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto d2 = to_dense(build_afh_chain(2, 1.0, false));
  const auto g2 = ground_state(d2);
  const auto d4 = to_dense(build_afh_chain(4, 1.0, true));
  const auto g4 = ground_state(d4);
  const double r2 = residual(d2, g2.energy, g2.vector), r4 = residual(d4, g4.energy, g4.vector);
  o.require(std::abs(g2.energy + 3.0) <= 1e-8 && r2 <= 1e-8, "two-site open chain");
  o.require(std::abs(g4.energy + 8.0) <= 1e-8 && r4 <= 1e-8, "four-site ring");
  double worst = 0.0;
  int count = 0;
  for (const auto& h : small_hamiltonians()) {
    const auto ref = oracle::dense(h);
    oracle::Mat rows = oracle::Mat::Zero(ref.rows(), ref.cols());
    for (const auto& s : oracle::all_configs(h.n_qubits()))
      for (const auto& e : h.connected(s)) rows(static_cast<Eigen::Index>(s.bits), static_cast<Eigen::Index>(e.state.bits)) += e.element;
    worst = std::max(worst, (rows - ref).cwiseAbs().maxCoeff());
    ++count;
  }
  o.require(worst <= 1e-10, "connected rows");
  o.detail << "E(2,open)=" << g2.energy << " res " << sci(r2) << "; E(4,ring)=" << g4.energy << " res " << sci(r4)
           << "; connected-vs-dense max diff " << sci(worst) << " over " << count << " Hamiltonians";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const std::size_t a = param_count({6, 3, 1, 1}), b = param_count({6, 8, 2, 2}), c = param_count({7, 4, 2, 1});
  const std::size_t p6 = PhaseNet::count(6, {16, 8}), p7 = PhaseNet::count(7, {16, 8});
  o.require(a == 179 && b == 1802 && c == 290, "transformer counts");
  o.require(p6 == 256 && p7 == 272, "phase-net counts");
  o.require(Transformer({6, 3, 1, 1}).num_params() == 179 && PhaseNet(7, {16, 8}).num_params() == 272,
            "instantiated layouts");
  o.detail << "transformer " << a << "/" << b << "/" << c << ", phase net " << p6 << "/" << p7;
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst_o = 0.0, worst_ps = 0.0;
  std::size_t checked = 0;
  for (int inst = 0; inst < 20; ++inst) {
    HybridConfig cfg;
    cfg.transformer = {4, 4, 2, 1};
    cfg.phase_hidden = {16};
    const auto ent = inst % 2 ? Entanglement::full : Entanglement::linear;
    cfg.amp_circuit = {4, 2, ent};
    cfg.phase_circuit = {4, 2, ent};
    cfg.share_theta = inst % 4 >= 2;
    cfg.tanh_mode = inst % 8 >= 4;
    const HybridWavefunction wf(cfg);
    Rng rng(1000 + static_cast<std::uint64_t>(inst));
    auto w = wf.init_params(rng, 1.0);
    std::normal_distribution<double> g(0.0, 0.3);
    for (std::size_t i = 0; i < wf.block(Block::amp_circuit).offset; ++i) w[i] += g(rng);
    const Configuration s{rng() & 15u, 4};

    std::vector<cplx> ov(wf.num_params());
    wf.o_vector(w, s, Measurement::exact(), BlockSet::all(), ov);
    const auto re = [&](const std::vector<double>& x) { return oracle::log_psi(wf, x, s).real(); };
    const auto im = [&](const std::vector<double>& x) { return oracle::log_psi(wf, x, s).imag(); };
    for (std::size_t i = 0; i < w.size(); ++i) {
      worst_o = std::max(worst_o, oracle::rel_err(ov[i].real(), derivative(re, w, i), 1e-3));
      worst_o = std::max(worst_o, oracle::rel_err(ov[i].imag(), derivative(im, w, i), 1e-3));
      ++checked;
    }

    // parameter shift against differences of f through the gate-matrix oracle
    const auto a = wf.block(Block::amp_circuit);
    const std::size_t nt = cfg.amp_circuit.theta_size();
    std::vector<double> theta(w.begin() + static_cast<std::ptrdiff_t>(a.offset),
                              w.begin() + static_cast<std::ptrdiff_t>(a.offset + nt));
    const std::vector<double> c(w.begin() + static_cast<std::ptrdiff_t>(a.offset + nt),
                                w.begin() + static_cast<std::ptrdiff_t>(a.offset + a.size));
    const auto ps = param_shift_grad(cfg.amp_circuit, CircuitParams{theta, c}, s, Measurement::exact());
    const auto f = [&](const std::vector<double>& t) { return oracle::circuit_f(cfg.amp_circuit, t, c, s.bits); };
    for (std::size_t k = 0; k < nt; ++k) worst_ps = std::max(worst_ps, std::abs(ps[k] - derivative(f, theta, k)));
  }
  o.require(worst_o <= 1e-6, "log-derivative relative error");
  o.require(worst_ps <= 1e-8, "parameter-shift error");
  o.detail << "20 instances, " << checked << " O_i entries, max rel err (floor 1e-3) " << sci(worst_o)
           << "; parameter-shift max abs err " << sci(worst_ps);
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst_norm = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const Transformer t({n, 4, 2, 2});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      auto w = t.init_params(rng);
      std::normal_distribution<double> g(0.0, 0.5);
      for (auto& x : w) x += g(rng);
      std::vector<SymmetryMask> masks{SymmetryMask::none()};
      if (n == 4)
        for (int up = 0; up <= 2; ++up)
          for (int dn = 0; dn <= 2; ++dn) masks.push_back(SymmetryMask::electrons(2, up, dn));
      for (const auto& m : masks) {
        double total = 0.0;
        for (const auto& s : oracle::all_configs(n))
          if (m.admits(s)) total += std::exp(t.log_prob(w, s, m));
        worst_norm = std::max(worst_norm, std::abs(total - 1.0));
      }
    }
  }
  o.require(worst_norm <= 1e-10, "normalization");

  auto binom = [](int a, int b) {
    long long r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  int support_checks = 0;
  std::size_t drawn = 0, violations = 0;
  for (int orbitals : {2, 3}) {
    const int n = 2 * orbitals;
    const Transformer t({n, 4, 2, 1});
    Rng rng(7);
    auto w = t.init_params(rng);
    std::normal_distribution<double> g(0.0, 0.5);
    for (auto& x : w) x += g(rng);
    for (int up = 0; up <= orbitals; ++up)
      for (int dn = 0; dn <= orbitals; ++dn) {
        const auto mask = SymmetryMask::electrons(orbitals, up, dn);
        long long support = 0;
        for (const auto& s : oracle::all_configs(n)) {
          try {
            if (t.log_prob(w, s, mask) > -std::numeric_limits<double>::infinity()) ++support;
          } catch (const InvalidConfiguration&) {
          }
        }
        o.require(support == binom(orbitals, up) * binom(orbitals, dn), "support size");
        ++support_checks;
      }
    const auto mask = SymmetryMask::electrons(orbitals, 1, 1);
    for (const auto& s : t.sample(w, 100000, mask, rng)) {
      ++drawn;
      violations += mask.admits(s) ? 0 : 1;
    }
  }
  o.require(violations == 0, "masked samples");
  o.detail << "max |sum p - 1| " << sci(worst_norm) << "; " << support_checks << " support sizes; " << violations
           << " violations in " << drawn << " masked samples";
  return o;
}

EstimatorOutput mc_estimate(const HybridWavefunction& wf, std::span<const double> w, const Hamiltonian& h,
                            std::int64_t batch, Rng& rng) {
  const auto tr = wf.block(Block::transformer);
  const auto groups = wf.transformer().sample_counts(w.subspan(tr.offset, tr.size), batch, wf.config().mask, rng);
  std::map<std::uint64_t, std::optional<LogPsi>> cache;
  const LogPsiFn fn = [&](const Configuration& s) -> std::optional<LogPsi> {
    if (const auto it = cache.find(s.bits); it != cache.end()) return it->second;
    std::optional<LogPsi> v;
    try {
      v = wf.log_psi(w, s, Measurement::exact());
    } catch (const InvalidConfiguration&) {
    }
    return cache[s.bits] = v;
  };
  SampleBatch b;
  for (const auto& g : groups) {
    const auto lp = *fn(g.s);
    b.configs.push_back(g.s);
    b.counts.push_back(g.count);
    b.log_p.push_back(lp.log_p);
    b.amp_sq.push_back(std::exp(2 * lp.amplitude));
    b.e_loc.push_back(local_energy(g.s, lp, h, fn));
  }
  b.o_rows.resize(static_cast<Eigen::Index>(groups.size()), 0);
  return estimate(b);
}

Outcome criterion5() {
  Outcome o;
  const auto h = build_afh_chain(4);
  RunConfig rc = preset("fig2-grid");
  const HybridWavefunction wf(rc.hybrid(4));
  Rng rng(2024);
  auto w = wf.init_params(rng, 0.3);
  std::normal_distribution<double> g(0.0, 0.2);
  for (std::size_t i = 0; i < wf.block(Block::amp_circuit).offset; ++i) w[i] += g(rng);

  const double rayleigh = oracle::rayleigh(oracle::enumerate_psi(wf, w), oracle::dense(h));
  const double enumerated = enumerated_energy(wf, w, h);
  o.require(std::abs(enumerated - rayleigh) <= 1e-8, "enumeration vs Rayleigh quotient");

  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng r(seed);
    const auto est = mc_estimate(wf, w, h, 1000, r);
    inside += std::abs(est.energy - rayleigh) <= 3 * est.std_error ? 1 : 0;
  }
  o.require(inside >= 95, "Monte Carlo coverage");

  // eigenstate fixture: Born samples of the exact ground state with arbitrary log-derivatives
  const auto gs = ground_state(to_dense(h));
  oracle::Vec psi = gs.vector * std::polar(1.0, 0.4);
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    if (std::abs(psi(i)) < 1e-12) psi(i) = 0;
  const LogPsiFn fn = [&](const Configuration& s) -> std::optional<LogPsi> {
    const cplx a = psi(static_cast<Eigen::Index>(s.bits));
    if (a == cplx(0)) return std::nullopt;
    LogPsi l;
    l.log_modulus = std::log(std::abs(a));
    l.arg = std::arg(a);
    return l;
  };
  std::vector<double> born(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index i = 0; i < psi.size(); ++i) born[static_cast<std::size_t>(i)] = std::norm(psi(i));
  std::discrete_distribution<int> draw(born.begin(), born.end());
  Rng r(5);
  std::vector<Configuration> cfgs;
  std::vector<double> amp;
  std::vector<cplx> el;
  const int b = 1000;
  Eigen::MatrixXcd rows(b, static_cast<Eigen::Index>(wf.num_params()));
  for (int k = 0; k < b; ++k) {
    const Configuration s{static_cast<std::uint64_t>(draw(r)), 4};
    cfgs.push_back(s);
    amp.push_back(1.0);
    el.push_back(local_energy(s, h, fn));
    std::vector<cplx> row(wf.num_params());
    wf.o_vector(w, s, Measurement::exact(), BlockSet::all(), row);
    rows.row(k) = Eigen::Map<Eigen::RowVectorXcd>(row.data(), rows.cols());
  }
  auto batch = SampleBatch::expanded(cfgs, amp, el, rows);
  const auto eig = estimate(batch);
  const double finf = eig.grad.cwiseAbs().maxCoeff();
  o.require(eig.variance <= 1e-10, "eigenstate variance");
  o.require(finf <= 1e-8, "eigenstate gradient");
  o.detail << "enumerated " << enumerated << " vs Rayleigh " << rayleigh << " (diff " << sci(std::abs(enumerated - rayleigh))
           << "); " << inside << "/100 seeds within 3 std errors; eigenstate variance " << sci(eig.variance)
           << ", |F|_inf " << sci(finf);
  return o;
}

// Mean of the per-iteration estimator standard errors over the run's tail window.
double tail_std_error(const RunResult& r) {
  const std::size_t n = r.records.size();
  const std::size_t tail = std::min<std::size_t>(100, std::max<std::size_t>(1, n / 10));
  double s = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) s += r.records[i].std_error;
  return s / static_cast<double>(tail);
}

Outcome criterion6() {
  Outcome o;
  std::vector<double> med_err, med_se;
  for (std::int64_t bm : {100, 1000, 10000}) {
    std::vector<double> err, se;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      RunConfig c = preset("fig2-grid");
      c.batch_size = bm;
      c.shots = bm;
      c.seed = seed;
      const auto r = run(c);
      err.push_back(std::abs(r.final_energy - (-8.0)));
      se.push_back(tail_std_error(r));
      note("  fig2 B=M=%lld seed %llu: |dE| %.3e, std err %.3e", static_cast<long long>(bm),
           static_cast<unsigned long long>(seed), err.back(), se.back());
    }
    med_err.push_back(median(err));
    med_se.push_back(median(se));
  }
  o.require(strictly_decreasing(med_err), "median energy error decreasing");
  o.require(strictly_decreasing(med_se), "median std error decreasing");
  o.require(med_err.back() <= 1e-2, "median error at B=M=1e4");
  o.detail << "B=M in {1e2,1e3,1e4}: median |E-E_g| " << list(med_err) << ", median std err " << list(med_se);
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::vector<double> meds;
  for (int n = 2; n <= 8; ++n) {
    std::vector<double> rel;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      RunConfig c = preset("fig3-scaling");
      c.hamiltonian = "afh:" + std::to_string(n);
      c.seed = seed;
      const auto r = run(c);
      rel.push_back(*r.rel_error);
      note("  fig3 N=%d seed %llu: rel err %.3e", n, static_cast<unsigned long long>(seed), rel.back());
    }
    meds.push_back(median(rel));
    o.require(meds.back() <= 1e-3, "N=" + std::to_string(n));
  }
  o.detail << "median relative error for N=2..8: " << list(meds);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const int seeds = 5;
  std::vector<double> ratio0;
  std::vector<std::vector<double>> err(5);
  for (int seed = 1; seed <= seeds; ++seed) {
    const fs::path dir = g_work / ("fig4-seed" + std::to_string(seed));
    fs::remove_all(dir);
    RunConfig pre = preset("fig4-sequential");
    pre.seed = static_cast<std::uint64_t>(seed);
    pre.use_circuits = false;
    pre.iterations = 300;
    pre.plan = "nqs:300";
    pre.out_dir = dir.string();
    const auto pr = run(pre);
    const double e_g = *pr.exact_energy;
    const double base = std::abs((*pr.variational_energy - e_g) / e_g);
    note("  fig4 seed %d: pre-trained relative error %.3e", seed, base);
    for (int layers = 0; layers <= 4; ++layers) {
      RunConfig c = preset("fig4-sequential");
      c.seed = static_cast<std::uint64_t>(seed);
      c.n_layers = layers;
      c.iterations = 300;
      c.plan = "circuits:300";
      c.init_checkpoint = (dir / "checkpoint-300").string();
      const auto r = run(c);
      const double e = std::abs((*r.variational_energy - e_g) / e_g);
      err[static_cast<std::size_t>(layers)].push_back(e);
      if (layers == 0) ratio0.push_back(base / e);
      note("  fig4 seed %d N_l=%d: relative error %.3e", seed, layers, e);
    }
  }
  std::vector<double> med;
  for (const auto& e : err) med.push_back(median(e));
  const double r0 = median(ratio0);
  o.require(r0 < 2.0, "N_l=0 improvement below 2x");
  o.require(med[4] <= 5e-4, "N_l=4 relative error");
  o.require(strictly_decreasing({med.begin() + 1, med.end()}), "monotone in N_l=1..4");
  o.detail << seeds << " seeds; N_l=0 median improvement factor " << r0 << "; median relative error N_l=0..4 "
           << list(med);
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::vector<double> hyb, nqs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig n = preset("nqs-baseline");
    n.seed = seed;
    nqs.push_back(*run(n).rel_error);
    note("  fig6 seed %llu: NQS-only relative error %.3e", static_cast<unsigned long long>(seed), nqs.back());
    RunConfig h = preset("fig6-afh7");
    h.seed = seed;
    hyb.push_back(*run(h).rel_error);
    note("  fig6 seed %llu: hybrid relative error %.3e", static_cast<unsigned long long>(seed), hyb.back());
  }
  const double mh = median(hyb), mn = median(nqs);
  o.require(mh <= 3e-3, "hybrid median");
  o.require(mn >= 1e-2, "NQS-only median");
  o.detail << "median relative error: hybrid " << sci(mh) << " " << list(hyb) << ", NQS-only " << sci(mn) << " "
           << list(nqs);
  return o;
}

Outcome criterion10() {
  Outcome o;
  const auto path = std::string(HQVMC_TEST_DATA) + "/chem6.pauli";
  const auto h = load_hamiltonian_file(path);
  const double e_g = exact_ground_energy(h);
  std::vector<double> errs;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RunConfig c = preset("fig5-lih");
    c.hamiltonian = path;
    c.seed = seed;
    const auto r = run(c, h);
    errs.push_back(std::abs(r.final_energy - e_g));
    note("  chemistry seed %llu: |E - E_g| = %.3e", static_cast<unsigned long long>(seed), errs.back());
  }
  const double best = *std::min_element(errs.begin(), errs.end());
  o.require(best <= 2e-3, "best-of-3 absolute error");

  // two spatial orbitals: number and hopping terms
  FermionicOperatorList ops;
  for (int s = 0; s < 2; ++s) {
    ops.one_body.push_back({s, s, -0.9});
    ops.one_body.push_back({2 + s, 2 + s, 0.35});
    ops.one_body.push_back({s, 2 + s, -0.2});
    ops.one_body.push_back({2 + s, s, -0.2});
  }
  const auto jw = oracle::sorted_eigenvalues(to_dense(jordan_wigner(ops, 4)));
  const auto fock = oracle::sorted_eigenvalues(oracle::fock_hamiltonian(ops, 4));
  double spec_diff = 0.0;
  for (std::size_t k = 0; k < jw.size(); ++k) spec_diff = std::max(spec_diff, std::abs(jw[k] - fock[k]));
  o.require(spec_diff <= 1e-12, "Jordan-Wigner toy spectrum");
  o.detail << "E_g " << e_g << ", per-seed |E - E_g| " << list(errs) << "; toy spectrum max diff " << sci(spec_diff);
  return o;
}

Outcome criterion11() {
  Outcome o;
  double worst_ratio = 0.0;
  std::size_t logged = 0;
  for (double a : {0.25, 1.0}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RunConfig c = preset("fig2-grid");
      c.tanh_mode = true;
      c.rescale_a = a;
      c.init_scale = 1.0;  // large circuit parameters so the bound is actually exercised
      c.iterations = 100;
      c.seed = seed;
      const auto r = run(c);
      for (const auto& rec : r.records) {
        worst_ratio = std::max(worst_ratio, rec.max_weight / std::exp(4 * a));
        ++logged;
      }
    }
  }
  o.require(worst_ratio <= 1.0, "tanh weight bound");

  double worst_dev = 0.0, worst_logged = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RunConfig c = preset("fig6-afh7");
    c.seed = seed;
    const HybridWavefunction wf(c.hybrid(7));
    Rng rng(seed);
    const auto w = wf.init_params(rng, c.init_scale);
    const auto tr = wf.block(Block::transformer);
    const auto groups =
        wf.transformer().sample_counts(std::span<const double>(w).subspan(tr.offset, tr.size), c.batch_size, wf.config().mask, rng);
    std::vector<double> amp;
    std::vector<std::int64_t> counts;
    for (const auto& g : groups) {
      amp.push_back(std::exp(2 * wf.log_psi(w, g.s, Measurement::sampled(c.shots, rng)).amplitude));
      counts.push_back(g.count);
    }
    for (double x : importance_weights(amp, counts)) worst_dev = std::max(worst_dev, std::abs(x - 1.0));
    c.iterations = 1;
    worst_logged = std::max(worst_logged, run(c).records[0].max_weight - 1.0);
  }
  o.require(worst_dev <= 0.1 && worst_logged <= 0.1, "small-init weights");
  o.detail << logged << " tanh iterations, max omega / e^{4a} = " << worst_ratio << "; small init max |omega - 1| "
           << sci(worst_dev) << " (driver iteration 0: max omega - 1 = " << sci(worst_logged) << ")";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> which;
  std::string work = (fs::temp_directory_path() / "hqvmc-acceptance").string();
  app.add_option("--criterion", which, "criterion number (1-11); repeatable")->check(CLI::Range(1, 11));
  app.add_option("--work-dir", work, "scratch directory for checkpoints");
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) {
    which.resize(11);
    std::iota(which.begin(), which.end(), 1);
  }
  g_work = work;
  fs::create_directories(g_work);

  const std::map<int, std::function<Outcome()>> table = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},   {5, criterion5},   {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11},
  };
  int failures = 0;
  for (int n : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = table.at(n)();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", n, out.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
