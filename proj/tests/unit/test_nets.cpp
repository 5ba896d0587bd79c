#include <doctest.h>

#include <map>
#include <random>

#include "hqvmc/phase_net.hpp"
#include "hqvmc/transformer.hpp"
#include "oracles.hpp"

using namespace hqvmc;

namespace {

long long binom(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Larger-than-default weights so the conditionals are far from uniform.
std::vector<double> spread_params(const Transformer& t, std::uint64_t seed, double sd = 0.6) {
  Rng rng(seed);
  auto w = t.init_params(rng);
  std::normal_distribution<double> g(0.0, sd);
  for (auto& x : w) x += g(rng);
  return w;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(param_count({6, 3, 1, 1}) == 179);
  CHECK(param_count({6, 8, 2, 2}) == 1802);
  CHECK(param_count({7, 4, 2, 1}) == 290);
  CHECK(PhaseNet::count(6, {16, 8}) == 256);
  CHECK(PhaseNet::count(7, {16, 8}) == 272);
  CHECK(PhaseNet::count(4, {}) == 4);
  for (int n : {2, 5, 8})
    for (int d : {2, 4, 8})
      for (int t : {1, 2, 3}) {
        const TransformerConfig cfg{n, d, d % 2 ? 1 : 2, t};
        const std::size_t formula = 12 * t * d * d + (10 * t + n + 7) * d + 2;
        CHECK(param_count(cfg) == formula);
        CHECK(Transformer(cfg).num_params() == formula);
      }
  CHECK(PhaseNet(6, {16, 8}).num_params() == 256);
  CHECK_THROWS(TransformerConfig{4, 6, 4, 1}.validate());
  CHECK_THROWS(TransformerConfig{0, 4, 1, 1}.validate());
}

TEST_CASE("autoregressive probabilities are normalized") {
  for (int n = 1; n <= 4; ++n) {
    const Transformer t({n, 4, 2, 2});
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto w = spread_params(t, seed);
      double total = 0.0;
      for (const auto& s : oracle::all_configs(n)) total += std::exp(t.log_prob(w, s, SymmetryMask::none()));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("masked model: normalization and support size") {
  for (int orbitals : {2, 3}) {
    const int n = 2 * orbitals;
    const Transformer t({n, 4, 1, 1});
    const auto w = spread_params(t, 7);
    for (int up = 0; up <= orbitals; ++up) {
      for (int down = 0; down <= orbitals; ++down) {
        const auto mask = SymmetryMask::electrons(orbitals, up, down);
        double total = 0.0;
        long long support = 0;
        for (const auto& s : oracle::all_configs(n)) {
          int nu = 0, nd = 0;
          for (int q = 0; q < n; ++q) (q % 2 ? nd : nu) += s.bit(q);
          const bool ok = nu == up && nd == down;
          CHECK(mask.admits(s) == ok);
          if (!ok) {
            CHECK_THROWS_AS(t.log_prob(w, s, mask), InvalidConfiguration);
            continue;
          }
          const double p = std::exp(t.log_prob(w, s, mask));
          CHECK(p > 0.0);
          total += p;
          ++support;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(support == binom(orbitals, up) * binom(orbitals, down));
      }
    }
  }
}

TEST_CASE("mask helpers") {
  const auto mask = SymmetryMask::electrons(2, 1, 1);
  CHECK_NOTHROW(mask.validate(4));
  CHECK_THROWS(mask.validate(5));
  CHECK_THROWS(SymmetryMask::electrons(2, 3, 0).validate(4));
  auto history = Configuration::parse("1000");
  // up orbital filled at position 0, so position 2 (up) must stay empty
  CHECK(mask.allowed(history, 2) == std::array<bool, 2>{true, false});
  // position 3 (down) must be filled when position 1 was left empty
  CHECK(mask.allowed(history, 3) == std::array<bool, 2>{false, true});
  const auto c = masked_conditionals({0.3, 0.7}, history, 2, mask);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
  CHECK_THROWS_AS(masked_conditionals({0.0, 1.0}, history, 2, mask), std::logic_error);
  CHECK(SymmetryMask::none().admits(Configuration::parse("111")));
}

TEST_CASE("causality: position i ignores bits at and after i") {
  const Transformer t({5, 4, 2, 2});
  const auto w = spread_params(t, 11);
  const auto a = t.raw_distributions(w, Configuration::parse("10110"));
  const auto b = t.raw_distributions(w, Configuration::parse("10001"));
  // the inputs agree on bits 0 and 1, so positions 0..2 see the same prefix
  for (int i = 0; i <= 2; ++i) {
    CHECK(a[i][0] == doctest::Approx(b[i][0]).epsilon(1e-14));
  }
  CHECK(std::abs(a[3][0] - b[3][0]) > 1e-6);
  for (const auto& d : a) CHECK(d[0] + d[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inference record agrees with log_prob") {
  const Transformer t({4, 4, 2, 1});
  const auto w = spread_params(t, 13);
  const auto s = Configuration::parse("0110");
  const auto inf = t.infer(w, s, SymmetryMask::none());
  double lp = 0.0;
  for (int i = 0; i < 4; ++i) {
    CHECK(inf.conditionals[i] == doctest::Approx(inf.distributions[i][s.bit(i)]));
    lp += std::log(inf.conditionals[i]);
  }
  CHECK(lp == doctest::Approx(inf.log_p).epsilon(1e-13));
  CHECK(inf.log_p == doctest::Approx(t.log_prob(w, s, SymmetryMask::none())).epsilon(1e-13));
}

TEST_CASE("log-probability gradients match finite differences") {
  for (bool masked : {false, true}) {
    const Transformer t({4, 4, 2, 2});
    const auto mask = masked ? SymmetryMask::electrons(2, 1, 1) : SymmetryMask::none();
    auto w = spread_params(t, masked ? 17 : 19, 0.3);
    const auto s = Configuration::parse("1001");
    std::vector<double> grad(w.size(), 0.0);
    const double lp = t.log_prob_grad(w, s, mask, grad);
    CHECK(lp == doctest::Approx(t.log_prob(w, s, mask)).epsilon(1e-13));
    const auto f = [&](const std::vector<double>& x) { return t.log_prob(x, s, mask); };
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      worst = std::max(worst, std::abs(oracle::central_diff(f, w, i, 1e-6) - grad[i]));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("sampling follows the model distribution") {
  const Transformer t({3, 4, 2, 1});
  const auto w = spread_params(t, 23);
  Rng rng(3);
  const std::int64_t batch = 200000;
  const auto grouped = t.sample_counts(w, batch, SymmetryMask::none(), rng);
  std::int64_t total = 0;
  double chi2 = 0.0;
  std::map<std::uint64_t, std::int64_t> seen;
  for (const auto& g : grouped) {
    total += g.count;
    CHECK(seen.count(g.s.bits) == 0);
    seen[g.s.bits] = g.count;
    CHECK(g.log_p == doctest::Approx(t.log_prob(w, g.s, SymmetryMask::none())).epsilon(1e-12));
  }
  CHECK(total == batch);
  for (const auto& s : oracle::all_configs(3)) {
    const double e = std::exp(t.log_prob(w, s, SymmetryMask::none())) * batch;
    chi2 += std::pow(static_cast<double>(seen[s.bits]) - e, 2) / e;
  }
  CHECK(chi2 < 30.0);

  const auto flat = t.sample(w, 1000, SymmetryMask::none(), rng);
  CHECK(flat.size() == 1000);
}

TEST_CASE("masked samples always satisfy the particle numbers") {
  const Transformer t({6, 4, 2, 1});
  const auto w = spread_params(t, 29);
  const auto mask = SymmetryMask::electrons(3, 1, 1);
  Rng rng(8);
  const auto samples = t.sample(w, 100000, mask, rng);
  REQUIRE(samples.size() == 100000);
  std::size_t bad = 0;
  for (const auto& s : samples) bad += mask.admits(s) ? 0 : 1;
  CHECK(bad == 0);
}

TEST_CASE("phase network") {
  SUBCASE("no hidden layer is linear in the bits") {
    const PhaseNet net(4, {});
    Rng rng(1);
    const auto w = net.init_params(rng);
    CHECK(net.phase(w, Configuration::parse("0000")) == 0.0);
    const double a = net.phase(w, Configuration::parse("1100"));
    const double b = net.phase(w, Configuration::parse("0011"));
    CHECK(net.phase(w, Configuration::parse("1111")) == doctest::Approx(a + b).epsilon(1e-14));
  }
  SUBCASE("gradients match finite differences") {
    const PhaseNet net(6, {16, 8});
    Rng rng(2);
    const auto w = net.init_params(rng);
    for (const char* text : {"101100", "011011", "000001"}) {
      const auto s = Configuration::parse(text);
      std::vector<double> grad(w.size(), 0.0);
      CHECK(net.phase_grad(w, s, grad) == doctest::Approx(net.phase(w, s)).epsilon(1e-14));
      const auto f = [&](const std::vector<double>& x) { return net.phase(x, s); };
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(oracle::central_diff(f, w, i, 1e-6) - grad[i]) < 1e-8);
    }
  }
  SUBCASE("gradients accumulate into the buffer") {
    const PhaseNet net(3, {4});
    Rng rng(3);
    const auto w = net.init_params(rng);
    std::vector<double> once(w.size(), 0.0), twice(w.size(), 0.0);
    const auto s = Configuration::parse("110");
    net.phase_grad(w, s, once);
    net.phase_grad(w, s, twice);
    net.phase_grad(w, s, twice);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(twice[i] == doctest::Approx(2 * once[i]));
  }
}
