#include "hqvmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqvmc {

cplx local_energy(const Configuration& s, const LogPsi& at_s, const Hamiltonian& h, const LogPsiFn& log_psi) {
  cplx total(0.0, 0.0);
  for (const auto& [target, element] : h.connected(s)) {
    if (target == s) {
      total += element;
      continue;
    }
    const auto other = log_psi(target);
    if (!other) continue;
    const cplx log_ratio(other->log_modulus - at_s.log_modulus, other->arg - at_s.arg);
    total += element * std::exp(log_ratio);
  }
  return total;
}

cplx local_energy(const Configuration& s, const Hamiltonian& h, const LogPsiFn& log_psi) {
  const auto at_s = log_psi(s);
  if (!at_s) throw InvalidConfiguration("local energy requested for configuration " + s.str() + " outside the support");
  return local_energy(s, *at_s, h, log_psi);
}

std::vector<double> importance_weights(std::span<const double> amp_sq, std::span<const std::int64_t> counts) {
  if (amp_sq.empty()) throw std::invalid_argument("importance weights of an empty batch");
  if (!counts.empty() && counts.size() != amp_sq.size()) {
    throw std::invalid_argument("importance weights: counts and amplitudes differ in length");
  }
  double total = 0.0;
  std::int64_t n = 0;
  for (std::size_t b = 0; b < amp_sq.size(); ++b) {
    if (!(amp_sq[b] > 0.0) || !std::isfinite(amp_sq[b])) {
      throw std::invalid_argument("importance weights require positive finite |<s|phi>|^2");
    }
    const std::int64_t c = counts.empty() ? 1 : counts[b];
    total += static_cast<double>(c) * amp_sq[b];
    n += c;
  }
  const double mean = total / static_cast<double>(n);
  std::vector<double> w(amp_sq.size());
  for (std::size_t b = 0; b < amp_sq.size(); ++b) w[b] = amp_sq[b] / mean;
  return w;
}

std::int64_t SampleBatch::total() const {
  std::int64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

SampleBatch SampleBatch::expanded(std::vector<Configuration> configs, std::vector<double> amp_sq,
                                  std::vector<cplx> e_loc, Eigen::MatrixXcd o_rows) {
  SampleBatch b;
  b.counts.assign(configs.size(), 1);
  b.log_p.assign(configs.size(), 0.0);
  b.configs = std::move(configs);
  b.amp_sq = std::move(amp_sq);
  b.e_loc = std::move(e_loc);
  b.o_rows = std::move(o_rows);
  return b;
}

EstimatorOutput estimate(SampleBatch& batch) {
  const std::size_t k = batch.configs.size();
  if (batch.counts.size() != k || batch.amp_sq.size() != k || batch.e_loc.size() != k ||
      static_cast<std::size_t>(batch.o_rows.rows()) != k) {
    throw std::invalid_argument("estimate: batch fields have inconsistent lengths");
  }
  const std::int64_t n = batch.total();
  if (n < 2) throw std::invalid_argument("estimate: batch size must be at least 2");
  if (batch.weights.empty()) batch.weights = importance_weights(batch.amp_sq, batch.counts);

  const double inv_b = 1.0 / static_cast<double>(n);
  const auto p = batch.o_rows.cols();
  EstimatorOutput out;
  out.batch_size = n;

  // Per-configuration sampling mass n_u / B and weighted quantities.
  std::vector<double> mass(k);
  cplx mean_we(0.0, 0.0);
  Eigen::VectorXcd mean_wo = Eigen::VectorXcd::Zero(p);
  Eigen::VectorXcd mean_weo = Eigen::VectorXcd::Zero(p);
  for (std::size_t u = 0; u < k; ++u) {
    mass[u] = static_cast<double>(batch.counts[u]) * inv_b;
    const double w = batch.weights[u];
    const cplx we = w * batch.e_loc[u];
    mean_we += mass[u] * we;
    const auto row = batch.o_rows.row(static_cast<Eigen::Index>(u));
    mean_wo += (mass[u] * w) * row.transpose();
    mean_weo += (mass[u] * we) * row.conjugate().transpose();
    out.max_weight = std::max(out.max_weight, w);
  }
  out.energy = mean_we.real();
  out.energy_imag = mean_we.imag();

  double ss = 0.0;
  for (std::size_t u = 0; u < k; ++u) {
    const double d = batch.weights[u] * batch.e_loc[u].real() - out.energy;
    ss += static_cast<double>(batch.counts[u]) * d * d;
  }
  out.variance = ss / static_cast<double>(n - 1);
  out.std_error = std::sqrt(out.variance * inv_b);

  // F_i = 2 Re[ <w E O_i*> - <w E><w O_i*> ].
  out.grad = 2.0 * (mean_weo - mean_we * mean_wo.conjugate()).real();

  // S_ij = Re[<w O_i* O_j> - <w O_i*><w O_j>], written as the Gram matrix of
  // centred rows r_u = sqrt(mass_u w_u) (O_u - <w O>); equal to the plain form
  // because the weights average to one.
  out.fisher_factor.resize(static_cast<Eigen::Index>(2 * k), p);
  for (std::size_t u = 0; u < k; ++u) {
    const double scale = std::sqrt(mass[u] * batch.weights[u]);
    const Eigen::RowVectorXcd r =
        scale * (batch.o_rows.row(static_cast<Eigen::Index>(u)) - mean_wo.transpose());
    out.fisher_factor.row(static_cast<Eigen::Index>(2 * u)) = r.real();
    out.fisher_factor.row(static_cast<Eigen::Index>(2 * u + 1)) = r.imag();
  }
  return out;
}

}  // namespace hqvmc
