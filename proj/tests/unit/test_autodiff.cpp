#include <doctest.h>

#include <random>
#include <stdexcept>

#include "hqvmc/autodiff.hpp"

using namespace hqvmc::ad;

namespace {

Tensor random_tensor(std::vector<int> shape, std::mt19937_64& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> g(0.0, scale);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g(rng);
  return t;
}

using Builder = std::function<Var(Tape&, std::vector<Var>&)>;

// Contracts the op output with fixed random weights and compares reverse-mode
// gradients of every input against central differences.
double max_grad_error(const Builder& op, std::vector<Tensor> inputs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor weights;
  auto evaluate = [&](const std::vector<Tensor>& xs, std::vector<Tensor>* grads) {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& x : xs) vars.push_back(tape.variable(x));
    const Var out = op(tape, vars);
    if (weights.size() != out.value().size()) weights = random_tensor(out.value().shape(), rng);
    const Var loss = sum(mul(out, tape.constant(weights)));
    if (grads) {
      tape.backward(loss);
      for (const auto& v : vars) grads->push_back(v.grad());
    }
    return loss.value()[0];
  };
  std::vector<Tensor> grads;
  evaluate(inputs, &grads);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double x0 = inputs[k][i];
      inputs[k][i] = x0 + h;
      const double up = evaluate(inputs, nullptr);
      inputs[k][i] = x0 - h;
      const double down = evaluate(inputs, nullptr);
      inputs[k][i] = x0;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - grads[k][i]) / std::max(1.0, std::abs(fd)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("tensor basics") {
  Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.at(1, 2) == 1.5);
  CHECK(t.shape_str() == "[2,3]");
  CHECK(Tensor::scalar(2.0).rank() == 0);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("forward values") {
  Tape tape;
  const Var a = tape.constant(Tensor({2, 2}, {1, 2, 3, 4}));
  const Var b = tape.constant(Tensor({2, 2}, {5, 6, 7, 8}));
  const auto m = matmul(a, b).value();
  CHECK(m[0] == 19);
  CHECK(m[1] == 22);
  CHECK(m[2] == 43);
  CHECK(m[3] == 50);
  const auto s = softmax(tape.constant(Tensor({1, 3}, {1000, 1000, 1000}))).value();
  for (int i = 0; i < 3; ++i) CHECK(s[static_cast<std::size_t>(i)] == doctest::Approx(1.0 / 3));
  const auto r = relu(tape.constant(Tensor({3}, {-1, 0, 2}))).value();
  CHECK(r[0] == 0);
  CHECK(r[2] == 2);
  const auto ln = layer_norm(tape.constant(Tensor({1, 4}, {1, 2, 3, 4})), tape.constant(Tensor({4}, 1.0)),
                             tape.constant(Tensor({4}, 0.0)), 0.0)
                      .value();
  double mean = 0, var = 0;
  for (int i = 0; i < 4; ++i) mean += ln[static_cast<std::size_t>(i)] / 4;
  for (int i = 0; i < 4; ++i) var += std::pow(ln[static_cast<std::size_t>(i)] - mean, 2) / 4;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<int> idx{2, 0};
  const auto e = embedding(tape.constant(Tensor({3, 2}, {0, 1, 10, 11, 20, 21})), idx).value();
  CHECK(e.shape() == std::vector<int>{2, 2});
  CHECK(e[0] == 20);
  CHECK(e[3] == 1);
  const std::vector<unsigned char> mask{0, 1, 0};
  const auto mf = masked_fill(tape.constant(Tensor({3}, {1, 2, 3})), mask, -5).value();
  CHECK(mf[1] == -5);
  CHECK(mf[2] == 3);
}

TEST_CASE("shape errors") {
  Tape tape;
  const Var a = tape.constant(Tensor({2, 3}));
  const Var b = tape.constant(Tensor({2, 3}));
  CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(add(a, tape.constant(Tensor({3, 2}))), std::invalid_argument);
  CHECK_THROWS_AS(add_bias(a, tape.constant(Tensor({2}))), std::invalid_argument);
  CHECK_THROWS_AS(slice_cols(a, 2, 4), std::invalid_argument);
  CHECK_THROWS(tape.backward(a));
}

TEST_CASE("gradients of every op match central differences") {
  std::mt19937_64 rng(1);
  const double tol = 1e-7;
  SUBCASE("matmul") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return matmul(v[0], v[1]); },
                         {random_tensor({3, 4}, rng), random_tensor({4, 2}, rng)}, 1) < tol);
  }
  SUBCASE("transpose") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return transpose(v[0]); }, {random_tensor({3, 2}, rng)}, 2) < tol);
  }
  SUBCASE("add, sub, mul, scale") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return scale(mul(add(v[0], v[1]), sub(v[0], v[1])), -1.7); },
                         {random_tensor({2, 3}, rng), random_tensor({2, 3}, rng)}, 3) < tol);
  }
  SUBCASE("add_bias") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return add_bias(v[0], v[1]); },
                         {random_tensor({4, 3}, rng), random_tensor({3}, rng)}, 4) < tol);
  }
  SUBCASE("relu away from the kink") {
    auto x = random_tensor({10}, rng);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += x[i] > 0 ? 0.1 : -0.1;
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return relu(v[0]); }, {x}, 5) < tol);
  }
  SUBCASE("log") {
    auto x = random_tensor({6}, rng);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 + std::abs(x[i]);
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return log(v[0]); }, {x}, 6) < tol);
  }
  SUBCASE("softmax") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return softmax(v[0]); }, {random_tensor({3, 5}, rng, 3.0)}, 7) < tol);
  }
  SUBCASE("layer_norm") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return layer_norm(v[0], v[1], v[2]); },
                         {random_tensor({3, 4}, rng), random_tensor({4}, rng), random_tensor({4}, rng)}, 8) < 1e-6);
  }
  SUBCASE("embedding with repeated indices") {
    CHECK(max_grad_error(
              [](Tape&, std::vector<Var>& v) {
                static const std::vector<int> idx{1, 0, 1, 2};
                return embedding(v[0], idx);
              },
              {random_tensor({3, 2}, rng)}, 9) < tol);
  }
  SUBCASE("masked_fill") {
    CHECK(max_grad_error(
              [](Tape&, std::vector<Var>& v) {
                static const std::vector<unsigned char> m{1, 0, 0, 1, 0, 1};
                return masked_fill(v[0], m, -3.0);
              },
              {random_tensor({2, 3}, rng)}, 10) < tol);
  }
  SUBCASE("concat and slice") {
    CHECK(max_grad_error(
              [](Tape&, std::vector<Var>& v) {
                const std::vector<Var> parts{v[0], slice_cols(v[1], 1, 3), v[0]};
                return concat_cols(parts);
              },
              {random_tensor({2, 2}, rng), random_tensor({2, 4}, rng)}, 11) < tol);
  }
  SUBCASE("sum_last and pick") {
    CHECK(max_grad_error([](Tape&, std::vector<Var>& v) { return sum_last(v[0]); }, {random_tensor({3, 4}, rng)}, 12) < tol);
    CHECK(max_grad_error(
              [](Tape&, std::vector<Var>& v) {
                static const std::vector<int> idx{3, 0, 3};
                return pick(v[0], idx);
              },
              {random_tensor({3, 4}, rng)}, 13) < tol);
  }
  SUBCASE("a small attention-like composite") {
    CHECK(max_grad_error(
              [](Tape& t, std::vector<Var>& v) {
                const Var q = matmul(v[0], v[1]);
                const Var k = matmul(v[0], v[2]);
                std::vector<unsigned char> causal(9, 0);
                for (int r = 0; r < 3; ++r)
                  for (int c = r + 1; c < 3; ++c) causal[static_cast<std::size_t>(r * 3 + c)] = 1;
                const Var a = softmax(masked_fill(scale(matmul(q, transpose(k)), 0.5), causal, -1e30));
                (void)t;
                return log(add_bias(relu(matmul(a, v[0])), v[3]));
              },
              {random_tensor({3, 2}, rng), random_tensor({2, 2}, rng), random_tensor({2, 2}, rng), Tensor({2}, 5.0)}, 14) < 1e-6);
  }
}

TEST_CASE("parameter gradients land at their offsets and accumulate") {
  Tape tape;
  const std::vector<double> w{1.0, 2.0, 3.0};
  const Var p = tape.parameter({3}, w, 2);
  const Var c = tape.constant(Tensor({3}, {4.0, 5.0, 6.0}));
  const Var loss = sum(add(mul(p, c), mul(p, p)));  // d/dp = c + 2p
  tape.backward(loss);
  std::vector<double> flat(6, 1.0);
  tape.accumulate_parameter_grads(flat);
  CHECK(flat == std::vector<double>{1, 1, 1 + 6, 1 + 9, 1 + 12, 1});
  CHECK(tape.requires_grad(p.id()));
  CHECK_FALSE(tape.requires_grad(c.id()));
}

TEST_CASE("a node used twice receives both contributions") {
  Tape tape;
  const Var x = tape.variable(Tensor::scalar(3.0));
  const Var y = mul(x, x);
  tape.backward(add(y, x));
  CHECK(x.grad()[0] == doctest::Approx(7.0));
}
