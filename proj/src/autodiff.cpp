#include "hqvmc/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hqvmc::ad {

namespace {

std::size_t product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + a.shape_str() + " and " + b.shape_str());
}

void require_rank2(const std::string& op, const Tensor& t) {
  if (t.rank() != 2) throw std::invalid_argument(op + ": expected a rank-2 tensor, got " + t.shape_str());
}

}  // namespace

Tensor::Tensor(std::vector<int> shape, double fill) : shape_(std::move(shape)), values_(product(shape_), fill) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != product(shape_)) throw std::invalid_argument("tensor value count does not match shape");
}

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::parameter(Tensor value, std::size_t offset) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  n.param_offset = static_cast<std::ptrdiff_t>(offset);
  return push(std::move(n));
}

Var Tape::parameter(std::vector<int> shape, std::span<const double> values, std::size_t offset) {
  return parameter(Tensor(std::move(shape), std::vector<double>(values.begin(), values.end())), offset);
}

Var Tape::record(Tensor value, std::vector<int> parents, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = std::any_of(parents.begin(), parents.end(), [this](int p) { return requires_grad(p); });
  if (n.requires_grad) {
    n.parents = std::move(parents);
    n.backward = std::move(backward);
  }
  return push(std::move(n));
}

const Tensor& Tape::grad(int id) const {
  const auto& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.has_grad) throw std::logic_error("gradient requested for a node the backward pass did not reach");
  return n.grad;
}

Tensor& Tape::grad_ref(int id) {
  auto& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.has_grad) {
    n.grad = Tensor(n.value.shape(), 0.0);
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var root) {
  if (root.tape_ != this) throw std::invalid_argument("backward root belongs to another tape");
  if (value(root.id()).size() != 1) {
    throw std::invalid_argument("backward requires a scalar root, got " + value(root.id()).shape_str());
  }
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  grad_ref(root.id())[0] = 1.0;
  for (int id = root.id(); id >= 0; --id) {
    auto& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad || !n.requires_grad || !n.backward) continue;
    n.backward(*this, id);
  }
}

void Tape::accumulate_parameter_grads(std::span<double> out) const {
  for (const auto& n : nodes_) {
    if (n.param_offset < 0 || !n.has_grad) continue;
    const auto off = static_cast<std::size_t>(n.param_offset);
    if (off + n.grad.size() > out.size()) throw std::out_of_range("parameter gradient exceeds output buffer");
    for (std::size_t i = 0; i < n.grad.size(); ++i) out[off + i] += n.grad[i];
  }
}

// ---------------------------------------------------------------------------

Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank2("matmul", A);
  require_rank2("matmul", B);
  const int m = A.shape()[0], k = A.shape()[1], n = B.shape()[1];
  if (B.shape()[0] != k) shape_error("matmul", A, B);
  Tensor out({m, n}, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += A.at(i, p) * B.at(p, j);
      out.at(i, j) = acc;
    }
  }
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {ia, ib}, [ia, ib, m, k, n](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    if (t.requires_grad(ia)) {
      const Tensor& Bv = t.value(ib);
      Tensor& ga = t.grad_ref(ia);
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j) acc += g.at(i, j) * Bv.at(p, j);
          ga.at(i, p) += acc;
        }
    }
    if (t.requires_grad(ib)) {
      const Tensor& Av = t.value(ia);
      Tensor& gb = t.grad_ref(ib);
      for (int p = 0; p < k; ++p)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int i = 0; i < m; ++i) acc += Av.at(i, p) * g.at(i, j);
          gb.at(p, j) += acc;
        }
    }
  });
}

Var transpose(Var a) {
  const Tensor& A = a.value();
  require_rank2("transpose", A);
  const int m = A.shape()[0], n = A.shape()[1];
  Tensor out({n, m});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.at(j, i) = A.at(i, j);
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia, m, n](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) ga.at(i, j) += g.at(j, i);
  });
}

namespace {

template <class F, class GA, class GB>
Var binary_same_shape(const char* name, Var a, Var b, F f, GA ga_rule, GB gb_rule) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) shape_error(name, A, B);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(A[i], B[i]);
  const int ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {ia, ib}, [ia, ib, ga_rule, gb_rule](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& Av = t.value(ia);
    const Tensor& Bv = t.value(ib);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_ref(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += ga_rule(g[i], Av[i], Bv[i]);
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_ref(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += gb_rule(g[i], Av[i], Bv[i]);
    }
  });
}

}  // namespace

Var add(Var a, Var b) {
  return binary_same_shape(
      "add", a, b, [](double x, double y) { return x + y; }, [](double g, double, double) { return g; },
      [](double g, double, double) { return g; });
}

Var sub(Var a, Var b) {
  return binary_same_shape(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double g, double, double) { return g; },
      [](double g, double, double) { return -g; });
}

Var mul(Var a, Var b) {
  return binary_same_shape(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double g, double, double y) { return g * y; },
      [](double g, double x, double) { return g * x; });
}

Var add_bias(Var a, Var bias) {
  const Tensor& A = a.value();
  const Tensor& b = bias.value();
  if (b.rank() != 1 || b.size() != static_cast<std::size_t>(A.cols())) shape_error("add_bias", A, b);
  Tensor out = A;
  const int rows = A.rows(), cols = A.cols();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) += b[static_cast<std::size_t>(c)];
  const int ia = a.id(), ib = bias.id();
  return a.tape().record(std::move(out), {ia, ib}, [ia, ib, rows, cols](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_ref(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_ref(ib);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) gb[static_cast<std::size_t>(c)] += g.at(r, c);
    }
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia, factor](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    Tensor& ga = t.grad_ref(ia);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x[i] > 0.0) ga[i] += g[i];
  });
}

Var log(Var a) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(out[i]);
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    Tensor& ga = t.grad_ref(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / x[i];
  });
}

Var softmax(Var a) {
  Tensor out = a.value();
  const int rows = out.rows(), cols = out.cols();
  for (int r = 0; r < rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cols; ++c) mx = std::max(mx, out.at(r, c));
    double total = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double e = std::exp(out.at(r, c) - mx);
      out.at(r, c) = e;
      total += e;
    }
    for (int c = 0; c < cols; ++c) out.at(r, c) /= total;
  }
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia, rows, cols](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_ref(ia);
    for (int r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < cols; ++c) dot += g.at(r, c) * y.at(r, c);
      for (int c = 0; c < cols; ++c) ga.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
    }
  });
}

Var layer_norm(Var x, Var gain, Var offset, double eps) {
  const Tensor& X = x.value();
  const Tensor& G = gain.value();
  const Tensor& B = offset.value();
  const int rows = X.rows(), cols = X.cols();
  if (G.size() != static_cast<std::size_t>(cols) || B.size() != static_cast<std::size_t>(cols)) {
    shape_error("layer_norm", X, G);
  }
  Tensor out(X.shape());
  Tensor xhat(X.shape());
  std::vector<double> inv_std(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) mean += X.at(r, c);
    mean /= cols;
    double var = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double d = X.at(r, c) - mean;
      var += d * d;
    }
    var /= cols;
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(r)] = is;
    for (int c = 0; c < cols; ++c) {
      xhat.at(r, c) = (X.at(r, c) - mean) * is;
      out.at(r, c) = xhat.at(r, c) * G[static_cast<std::size_t>(c)] + B[static_cast<std::size_t>(c)];
    }
  }
  const int ix = x.id(), ig = gain.id(), ib = offset.id();
  return x.tape().record(
      std::move(out), {ix, ig, ib},
      [ix, ig, ib, rows, cols, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, int self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(ix)) {
          const Tensor& Gv = t.value(ig);
          Tensor& gx = t.grad_ref(ix);
          std::vector<double> dxhat(static_cast<std::size_t>(cols));
          for (int r = 0; r < rows; ++r) {
            double s1 = 0.0, s2 = 0.0;
            for (int c = 0; c < cols; ++c) {
              const double d = g.at(r, c) * Gv[static_cast<std::size_t>(c)];
              dxhat[static_cast<std::size_t>(c)] = d;
              s1 += d;
              s2 += d * xhat.at(r, c);
            }
            const double is = inv_std[static_cast<std::size_t>(r)];
            for (int c = 0; c < cols; ++c) {
              gx.at(r, c) += is / cols * (cols * dxhat[static_cast<std::size_t>(c)] - s1 - xhat.at(r, c) * s2);
            }
          }
        }
        if (t.requires_grad(ig)) {
          Tensor& gg = t.grad_ref(ig);
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) gg[static_cast<std::size_t>(c)] += g.at(r, c) * xhat.at(r, c);
        }
        if (t.requires_grad(ib)) {
          Tensor& gb = t.grad_ref(ib);
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) gb[static_cast<std::size_t>(c)] += g.at(r, c);
        }
      });
}

Var embedding(Var table, std::span<const int> indices) {
  const Tensor& T = table.value();
  require_rank2("embedding", T);
  const int vocab = T.shape()[0], d = T.shape()[1];
  const int len = static_cast<int>(indices.size());
  Tensor out({len, d});
  for (int r = 0; r < len; ++r) {
    const int idx = indices[static_cast<std::size_t>(r)];
    if (idx < 0 || idx >= vocab) throw std::out_of_range("embedding index out of range");
    for (int c = 0; c < d; ++c) out.at(r, c) = T.at(idx, c);
  }
  const int it = table.id();
  std::vector<int> idx(indices.begin(), indices.end());
  return table.tape().record(std::move(out), {it}, [it, d, idx = std::move(idx)](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& gt = t.grad_ref(it);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (int c = 0; c < d; ++c) gt.at(idx[r], c) += g.at(static_cast<int>(r), c);
  });
}

Var masked_fill(Var a, std::span<const unsigned char> mask, double value) {
  const Tensor& A = a.value();
  if (mask.size() != A.size()) throw std::invalid_argument("masked_fill: mask size differs from tensor size");
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i]) out[i] = value;
  const int ia = a.id();
  std::vector<unsigned char> m(mask.begin(), mask.end());
  return a.tape().record(std::move(out), {ia}, [ia, m = std::move(m)](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!m[i]) ga[i] += g[i];
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const int m = parts[0].value().rows();
  int total = 0;
  for (const auto& p : parts) {
    require_rank2("concat_cols", p.value());
    if (p.value().rows() != m) shape_error("concat_cols", parts[0].value(), p.value());
    total += p.value().cols();
  }
  Tensor out({m, total});
  std::vector<int> ids, widths;
  int off = 0;
  for (const auto& p : parts) {
    const Tensor& P = p.value();
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < P.cols(); ++c) out.at(r, off + c) = P.at(r, c);
    off += P.cols();
    ids.push_back(p.id());
    widths.push_back(P.cols());
  }
  std::vector<int> parents = ids;
  return parts[0].tape().record(std::move(out), std::move(parents), [ids, widths, m](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    int col = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) {
        Tensor& gp = t.grad_ref(ids[k]);
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < widths[k]; ++c) gp.at(r, c) += g.at(r, col + c);
      }
      col += widths[k];
    }
  });
}

Var slice_cols(Var a, int begin, int end) {
  const Tensor& A = a.value();
  require_rank2("slice_cols", A);
  if (begin < 0 || end > A.cols() || begin >= end) throw std::invalid_argument("slice_cols: bad column range");
  const int m = A.rows(), w = end - begin;
  Tensor out({m, w});
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < w; ++c) out.at(r, c) = A.at(r, begin + c);
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia, m, w, begin](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < w; ++c) ga.at(r, begin + c) += g.at(r, c);
  });
}

Var sum(Var a) {
  double acc = 0.0;
  for (double v : a.value().values()) acc += v;
  const int ia = a.id();
  return a.tape().record(Tensor::scalar(acc), {ia}, [ia](Tape& t, int self) {
    const double g = t.grad(self)[0];
    Tensor& ga = t.grad_ref(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var sum_last(Var a) {
  const Tensor& A = a.value();
  std::vector<int> shape = A.shape();
  if (!shape.empty()) shape.pop_back();
  const int rows = A.rows(), cols = A.cols();
  Tensor out(shape);
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += A.at(r, c);
    out[static_cast<std::size_t>(r)] = acc;
  }
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia, rows, cols](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) ga.at(r, c) += g[static_cast<std::size_t>(r)];
  });
}

Var pick(Var a, std::span<const int> index) {
  const Tensor& A = a.value();
  require_rank2("pick", A);
  const int m = A.rows();
  if (index.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("pick: one index per row required");
  Tensor out({m});
  std::vector<int> idx(index.begin(), index.end());
  for (int r = 0; r < m; ++r) {
    if (idx[static_cast<std::size_t>(r)] < 0 || idx[static_cast<std::size_t>(r)] >= A.cols()) {
      throw std::out_of_range("pick: column index out of range");
    }
    out[static_cast<std::size_t>(r)] = A.at(r, idx[static_cast<std::size_t>(r)]);
  }
  const int ia = a.id();
  return a.tape().record(std::move(out), {ia}, [ia, idx = std::move(idx)](Tape& t, int self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(ia);
    for (std::size_t r = 0; r < idx.size(); ++r) ga.at(static_cast<int>(r), idx[r]) += g[r];
  });
}

}  // namespace hqvmc::ad
