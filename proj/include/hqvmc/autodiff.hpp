#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hqvmc::ad {

/// Dense row-major tensor of doubles. Rank 0 is a scalar.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, double fill = 0.0);
  Tensor(std::vector<int> shape, std::vector<double> values);
  static Tensor scalar(double v) { return Tensor({}, std::vector<double>{v}); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return values_.size(); }
  /// Extent of the last dimension (1 for scalars).
  int cols() const { return shape_.empty() ? 1 : shape_.back(); }
  /// Number of last-dimension rows.
  int rows() const { return static_cast<int>(values_.size() / static_cast<std::size_t>(cols())); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(int r, int c) { return values_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) + static_cast<std::size_t>(c)]; }
  double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) + static_cast<std::size_t>(c)]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::string shape_str() const;

 private:
  std::vector<int> shape_;
  std::vector<double> values_;
};

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  const Tensor& grad() const;
  Tape& tape() const { return *tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* t, int id) : tape_(t), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Dynamic reverse-mode tape. Nodes are appended in evaluation order, so the
/// reverse of creation order is a valid reverse topological order.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf whose gradient is not tracked.
  Var constant(Tensor value);
  /// Leaf whose gradient is tracked but not registered.
  Var variable(Tensor value);
  /// Registered parameter leaf; its gradient lands at `offset` of the flat buffer
  /// passed to accumulate_parameter_grads.
  Var parameter(Tensor value, std::size_t offset);
  /// Convenience: copies `values` into a parameter leaf of the given shape.
  Var parameter(std::vector<int> shape, std::span<const double> values, std::size_t offset);

  /// Records an op result. `backward` is dropped when no parent requires grad.
  Var record(Tensor value, std::vector<int> parents, BackwardFn backward);

  /// Reverse sweep from a scalar root. Throws for non-scalar roots.
  void backward(Var root);
  /// Adds parameter gradients into `out` at their registered offsets.
  void accumulate_parameter_grads(std::span<double> out) const;

  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Tensor& grad(int id) const;
  /// Gradient buffer of node `id`, allocated on first use.
  Tensor& grad_ref(int id);
  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
  int parent(int id, std::size_t k) const { return nodes_[static_cast<std::size_t>(id)].parents[k]; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool has_grad = false;
    std::ptrdiff_t param_offset = -1;
  };
  Var push(Node node);
  std::vector<Node> nodes_;
};

// Forward ops. Shapes follow the usual conventions; "last-dim" ops treat the
// tensor as rows of its last dimension. Mismatched shapes throw std::invalid_argument.
Var matmul(Var a, Var b);                    // [m,k] x [k,n]
Var transpose(Var a);                        // [m,n] -> [n,m]
Var add(Var a, Var b);                       // same shape
Var sub(Var a, Var b);                       // same shape
Var mul(Var a, Var b);                       // elementwise, same shape
Var add_bias(Var a, Var bias);               // [..., n] + [n]
Var scale(Var a, double factor);
Var relu(Var a);
Var log(Var a);
Var softmax(Var a);                          // last dim, max-subtracted
Var layer_norm(Var x, Var gain, Var offset, double eps = 1e-5);  // last dim
Var embedding(Var table, std::span<const int> indices);          // [V,d] -> [len,d]
Var masked_fill(Var a, std::span<const unsigned char> mask, double value);
Var concat_cols(std::span<const Var> parts);  // [m,n_i] -> [m, sum n_i]
Var slice_cols(Var a, int begin, int end);    // [m,n] -> [m,end-begin]
Var sum(Var a);                               // -> scalar
Var sum_last(Var a);                          // [..., n] -> [...]
Var pick(Var a, std::span<const int> index);  // [m,n] -> [m], a[r, index[r]]

}  // namespace hqvmc::ad
