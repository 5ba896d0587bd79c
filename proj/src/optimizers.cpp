#include "hqvmc/optimizers.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hqvmc {

std::string to_string(Method m) { return m == Method::sr ? "sr" : "adam"; }

Method parse_method(const std::string& name) {
  if (name == "sr") return Method::sr;
  if (name == "adam") return Method::adam;
  throw std::invalid_argument("unknown optimizer '" + name + "' (expected sr or adam)");
}

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw std::runtime_error(std::string("non-finite entries in ") + what);
}

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, bool* fell_back) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd x = llt.solve(rhs);
    if (x.allFinite()) return x;
  }
  if (fell_back) *fell_back = true;
  return m.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

Eigen::VectorXd sr_direction_dense(const Eigen::MatrixXd& s, const Eigen::VectorXd& grad, double eps,
                                   SrSolveInfo* info) {
  if (s.rows() != s.cols() || s.rows() != grad.size()) throw std::invalid_argument("SR: dimension mismatch");
  require_finite(s, "Fisher matrix");
  require_finite(grad, "gradient");
  SrSolveInfo local;
  Eigen::MatrixXd reg = s;
  reg.diagonal().array() += eps;
  Eigen::VectorXd x = spd_solve(reg, grad, &local.fell_back);
  const double gn = grad.norm();
  local.residual = gn > 0.0 ? (reg * x - grad).norm() / gn : (reg * x).norm();
  if (info) *info = local;
  return x;
}

Eigen::VectorXd sr_direction(const Eigen::MatrixXd& factor, const Eigen::VectorXd& grad, double eps,
                             SrSolveInfo* info) {
  if (factor.cols() != grad.size()) throw std::invalid_argument("SR: dimension mismatch");
  require_finite(factor, "Fisher factor");
  require_finite(grad, "gradient");
  const Eigen::Index p = factor.cols();
  const Eigen::Index r = factor.rows();
  if (!(eps > 0.0) || 2 * r >= p) {
    const Eigen::MatrixXd s = factor.transpose() * factor;
    return sr_direction_dense(s, grad, eps, info);
  }
  // (A^T A + eps I)^{-1} F = (F - A^T (A A^T + eps I)^{-1} A F) / eps.
  SrSolveInfo local;
  local.low_rank = true;
  Eigen::MatrixXd small = factor * factor.transpose();
  small.diagonal().array() += eps;
  const Eigen::VectorXd af = factor * grad;
  const Eigen::VectorXd y = spd_solve(small, af, &local.fell_back);
  Eigen::VectorXd x = (grad - factor.transpose() * y) / eps;
  const Eigen::VectorXd applied = factor.transpose() * (factor * x) + eps * x;
  const double gn = grad.norm();
  local.residual = gn > 0.0 ? (applied - grad).norm() / gn : applied.norm();
  if (info) *info = local;
  return x;
}

void sr_step(std::span<double> params, std::span<const std::size_t> active, const Eigen::MatrixXd& factor,
             const Eigen::VectorXd& grad, double eta, double eps, SrSolveInfo* info) {
  if (static_cast<std::size_t>(grad.size()) != active.size()) {
    throw std::invalid_argument("SR: gradient length differs from the active parameter count");
  }
  const Eigen::VectorXd x = sr_direction(factor, grad, eps, info);
  for (std::size_t i = 0; i < active.size(); ++i) params[active[i]] -= eta * x[static_cast<Eigen::Index>(i)];
}

AdamState AdamState::create(std::size_t n_params, double beta1, double beta2) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam decay rates must lie in [0, 1)");
  }
  AdamState s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.m.assign(n_params, 0.0);
  s.v.assign(n_params, 0.0);
  return s;
}

void adam_step(std::span<double> params, std::span<const std::size_t> active, const Eigen::VectorXd& grad,
               AdamState& state, double eta) {
  if (static_cast<std::size_t>(grad.size()) != active.size()) {
    throw std::invalid_argument("Adam: gradient length differs from the active parameter count");
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("Adam: moment buffers do not match the parameter vector");
  }
  require_finite(grad, "gradient");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < active.size(); ++i) {
    const std::size_t j = active[i];
    const double g = grad[static_cast<Eigen::Index>(i)];
    state.m[j] = state.beta1 * state.m[j] + (1.0 - state.beta1) * g;
    state.v[j] = state.beta2 * state.v[j] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[j] / c1;
    const double vhat = state.v[j] / c2;
    params[j] -= eta * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

double cosine_lr(const Schedule& schedule, std::int64_t t) {
  if (schedule.n_iters < 1) throw std::invalid_argument("cosine schedule needs at least one iteration");
  if (t < 0 || t > schedule.n_iters) throw std::out_of_range("cosine schedule step out of range");
  if (schedule.eta_min > schedule.eta_init) throw std::invalid_argument("eta_min exceeds eta_init");
  const double phase = std::numbers::pi * static_cast<double>(t) / static_cast<double>(schedule.n_iters);
  return schedule.eta_min + 0.5 * (schedule.eta_init - schedule.eta_min) * (1.0 + std::cos(phase));
}

BlockPlan::BlockPlan(std::vector<BlockPhase> phases) : phases_(std::move(phases)) {
  if (phases_.empty()) throw std::invalid_argument("block plan has no phases");
  for (const auto& p : phases_) {
    if (p.blocks.empty()) throw std::invalid_argument("block plan phase has an empty active set");
    if (p.iterations < 1) throw std::invalid_argument("block plan phase must span at least one iteration");
  }
}

BlockPlan BlockPlan::parse(const std::string& text) {
  std::vector<BlockPhase> phases;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("block plan entry '" + item + "' lacks ':iterations'");
    std::size_t used = 0;
    const std::string count = item.substr(colon + 1);
    const long long iters = std::stoll(count, &used);
    if (count.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("bad iteration count in block plan entry '" + item + "'");
    }
    phases.push_back({BlockSet::parse(item.substr(0, colon)), iters});
  }
  return BlockPlan(std::move(phases));
}

std::string BlockPlan::str() const {
  std::string out;
  for (const auto& p : phases_) {
    if (!out.empty()) out += ";";
    out += p.blocks.str() + ":" + std::to_string(p.iterations);
  }
  return out;
}

std::int64_t BlockPlan::total_iterations() const {
  std::int64_t n = 0;
  for (const auto& p : phases_) n += p.iterations;
  return n;
}

BlockSet BlockPlan::active(std::int64_t iteration) const {
  if (iteration < 0) throw std::out_of_range("negative iteration");
  std::int64_t end = 0;
  for (const auto& p : phases_) {
    end += p.iterations;
    if (iteration < end) return p.blocks;
  }
  throw std::out_of_range("iteration beyond the block plan");
}

std::vector<BlockSet> schedule_blocks(const BlockPlan& plan) {
  std::vector<BlockSet> out;
  out.reserve(static_cast<std::size_t>(plan.total_iterations()));
  for (const auto& p : plan.phases())
    for (std::int64_t i = 0; i < p.iterations; ++i) out.push_back(p.blocks);
  return out;
}

}  // namespace hqvmc
