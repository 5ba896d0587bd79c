#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hqvmc/hybrid.hpp"

namespace hqvmc {

enum class Method { sr, adam };
std::string to_string(Method m);
Method parse_method(const std::string& name);

struct SrSolveInfo {
  bool fell_back = false;  // Cholesky failed, least-squares used
  bool low_rank = false;   // solved in the sample space
  double residual = 0.0;   // ||(S + eps I) x - F|| / ||F||
};

/// x = (S + eps I)^{-1} F with S = A^T A. Uses the P x P system, or the
/// equivalent (2K x 2K) form when A has far fewer rows than columns.
Eigen::VectorXd sr_direction(const Eigen::MatrixXd& factor, const Eigen::VectorXd& grad, double eps,
                             SrSolveInfo* info = nullptr);
/// Same with an explicit dense S.
Eigen::VectorXd sr_direction_dense(const Eigen::MatrixXd& s, const Eigen::VectorXd& grad, double eps,
                                   SrSolveInfo* info = nullptr);

/// W <- W - eta x on the listed indices. Throws on non-finite inputs.
void sr_step(std::span<double> params, std::span<const std::size_t> active, const Eigen::MatrixXd& factor,
             const Eigen::VectorXd& grad, double eta, double eps, SrSolveInfo* info = nullptr);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<double> m;  // indexed like the full parameter vector
  std::vector<double> v;

  static AdamState create(std::size_t n_params, double beta1, double beta2);
};

/// Bias-corrected Adam on the listed indices; moments of inactive entries are untouched.
void adam_step(std::span<double> params, std::span<const std::size_t> active, const Eigen::VectorXd& grad,
               AdamState& state, double eta);

struct Schedule {
  double eta_init = 5e-3;
  double eta_min = 5e-4;
  std::int64_t n_iters = 1;
};

/// eta_min + (eta_init - eta_min)(1 + cos(pi t / N)) / 2.
double cosine_lr(const Schedule& schedule, std::int64_t t);

struct BlockPhase {
  BlockSet blocks;
  std::int64_t iterations = 0;
};

/// Active block set per iteration from contiguous phases.
class BlockPlan {
 public:
  BlockPlan() = default;
  explicit BlockPlan(std::vector<BlockPhase> phases);
  static BlockPlan joint(std::int64_t iterations) { return BlockPlan({{BlockSet::all(), iterations}}); }
  /// "blocks:iters;blocks:iters", e.g. "nqs:500;circuits:500".
  static BlockPlan parse(const std::string& text);
  std::string str() const;

  const std::vector<BlockPhase>& phases() const { return phases_; }
  std::int64_t total_iterations() const;
  BlockSet active(std::int64_t iteration) const;

 private:
  std::vector<BlockPhase> phases_;
};

std::vector<BlockSet> schedule_blocks(const BlockPlan& plan);

}  // namespace hqvmc
