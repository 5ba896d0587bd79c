#include "hqvmc/exact.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hqvmc {

namespace {

using Mat2 = std::array<std::array<cplx, 2>, 2>;

Mat2 pauli_matrix(char op) {
  const cplx o(0, 0), l(1, 0), i(0, 1);
  switch (op) {
    case 'I': return {{{l, o}, {o, l}}};
    case 'X': return {{{o, l}, {l, o}}};
    case 'Y': return {{{o, -i}, {i, o}}};
    case 'Z': return {{{l, o}, {o, -l}}};
  }
  throw std::invalid_argument("bad Pauli letter");
}

}  // namespace

DenseOperator to_dense(const Hamiltonian& h) {
  const int n = h.n_qubits();
  if (n > kMaxDenseQubits) throw std::invalid_argument("dense assembly is capped at 12 qubits");
  const Eigen::Index dim = Eigen::Index{1} << n;
  DenseOperator d = DenseOperator::Zero(dim, dim);
  for (const auto& term : h.terms()) {
    std::vector<Mat2> factors;
    for (int q = 0; q < n; ++q) factors.push_back(pauli_matrix(term.string.letter(q)));
    // Entry (r, c) of the Kronecker product is prod_q sigma_q[r_q][c_q]; each row
    // has a single nonzero column, found by taking the nonzero entry per factor.
    for (Eigen::Index r = 0; r < dim; ++r) {
      cplx value = term.coeff;
      Eigen::Index c = 0;
      for (int q = 0; q < n; ++q) {
        const int rq = static_cast<int>((r >> q) & 1);
        const int cq = std::abs(factors[static_cast<std::size_t>(q)][rq][0]) > 0.0 ? 0 : 1;
        value *= factors[static_cast<std::size_t>(q)][rq][cq];
        c |= Eigen::Index{cq} << q;
      }
      d(r, c) += value;
    }
  }
  return d;
}

GroundState ground_state(const DenseOperator& d, EigenMethod method) {
  if (d.rows() != d.cols() || d.rows() == 0) throw std::invalid_argument("ground_state: matrix must be square");
  if ((d - d.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("ground_state: matrix is not Hermitian");
  }
  const Eigen::Index dim = d.rows();
  if (method == EigenMethod::automatic) method = dim <= kMaxFullEigenDim ? EigenMethod::full : EigenMethod::power;

  if (method == EigenMethod::full) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(d);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");
    return {solver.eigenvalues()[0], solver.eigenvectors().col(0)};
  }

  // Power iteration on (sigma I - D) with sigma a Gershgorin bound, so the
  // dominant eigenvector is the ground state.
  double sigma = 0.0;
  for (Eigen::Index r = 0; r < dim; ++r) sigma = std::max(sigma, d.row(r).cwiseAbs().sum());
  std::mt19937_64 rng(0x5eedu);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = cplx(normal(rng), normal(rng));
  v.normalize();
  double energy = 0.0;
  for (int it = 0; it < 2000000; ++it) {
    Eigen::VectorXcd hv = d * v;
    energy = v.dot(hv).real();
    if ((hv - energy * v).norm() <= 1e-11) break;
    v = sigma * v - hv;
    v.normalize();
  }
  return {energy, v};
}

double residual(const DenseOperator& d, double energy, const Eigen::VectorXcd& v) {
  return (d * v - energy * v).norm();
}

double exact_ground_energy(const Hamiltonian& h) { return ground_state(to_dense(h)).energy; }

}  // namespace hqvmc
