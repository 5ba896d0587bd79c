#include "hqvmc/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hqvmc {

namespace {

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_qubit_count(int n) {
  if (n < 0 || n > kMaxPauliQubits) {
    throw std::invalid_argument("qubit count out of range: " + std::to_string(n));
  }
}

std::uint64_t low_mask(int n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

}  // namespace

int Configuration::popcount() const { return std::popcount(bits); }

std::string Configuration::str() const {
  std::string out(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q) {
    if (bit(q)) out[static_cast<std::size_t>(q)] = '1';
  }
  return out;
}

Configuration Configuration::parse(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxPauliQubits)) {
    throw std::invalid_argument("configuration too long");
  }
  Configuration c;
  c.n = static_cast<int>(text.size());
  for (int q = 0; q < c.n; ++q) {
    const char ch = text[static_cast<std::size_t>(q)];
    if (ch != '0' && ch != '1') throw std::invalid_argument("configuration must contain only 0/1");
    c.set(q, ch == '1');
  }
  return c;
}

PauliString::PauliString(int n_qubits) : n_(n_qubits) { check_qubit_count(n_qubits); }

PauliString::PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_(n_qubits), x_(x_mask), z_(z_mask) {
  check_qubit_count(n_qubits);
  if ((x_ | z_) & ~low_mask(n_)) throw std::invalid_argument("Pauli mask exceeds qubit count");
}

PauliString PauliString::parse(std::string_view letters) {
  PauliString p(static_cast<int>(letters.size()));
  for (int q = 0; q < p.n_; ++q) p.set_letter(q, letters[static_cast<std::size_t>(q)]);
  return p;
}

PauliString PauliString::single(int n_qubits, int qubit, char op) {
  PauliString p(n_qubits);
  p.set_letter(qubit, op);
  return p;
}

char PauliString::letter(int qubit) const {
  const bool x = (x_ >> qubit) & 1u;
  const bool z = (z_ >> qubit) & 1u;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

void PauliString::set_letter(int qubit, char op) {
  if (qubit < 0 || qubit >= n_) throw std::out_of_range("Pauli qubit index out of range");
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  switch (op) {
    case 'I': break;
    case 'X': x_ |= bit; break;
    case 'Y': x_ |= bit; z_ |= bit; break;
    case 'Z': z_ |= bit; break;
    default: throw std::invalid_argument(std::string("invalid Pauli letter '") + op + "'");
  }
}

int PauliString::y_count() const { return std::popcount(x_ & z_); }

std::string PauliString::str() const {
  std::string out(static_cast<std::size_t>(n_), 'I');
  for (int q = 0; q < n_; ++q) out[static_cast<std::size_t>(q)] = letter(q);
  return out;
}

BasisImage apply_to_basis(const PauliString& p, const Configuration& s) {
  if (p.size() != s.n) throw std::invalid_argument("Pauli string and configuration lengths differ");
  // Y = iXZ, so P|s> = i^{#Y} (-1)^{|s & z|} |s ^ x>.
  const int sign_flips = std::popcount(s.bits & p.z_mask());
  cplx phase = i_power(p.y_count());
  if (sign_flips & 1) phase = -phase;
  return {Configuration{s.bits ^ p.x_mask(), s.n}, phase};
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Pauli strings of different length");
  const PauliString r(a.size(), a.x_mask() ^ b.x_mask(), a.z_mask() ^ b.z_mask());
  const int commute_sign = std::popcount(a.z_mask() & b.x_mask());
  cplx phase = i_power(a.y_count() + b.y_count() - r.y_count());
  if (commute_sign & 1) phase = -phase;
  return {phase, r};
}

void PauliSum::add(cplx coeff, const PauliString& p) {
  if (p.size() != n_) throw std::invalid_argument("Pauli term length differs from operator size");
  terms_.push_back({coeff, p});
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_ != n_) throw std::invalid_argument("adding Pauli sums of different size");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum PauliSum::operator*(const PauliSum& other) const {
  if (other.n_ != n_) throw std::invalid_argument("multiplying Pauli sums of different size");
  PauliSum out(n_);
  out.terms_.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      auto [phase, p] = multiply(a.string, b.string);
      out.terms_.push_back({a.coeff * b.coeff * phase, p});
    }
  }
  out.simplify();
  return out;
}

PauliSum PauliSum::scaled(cplx factor) const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coeff *= factor;
  return out;
}

void PauliSum::simplify(double tol) {
  std::map<PauliString, cplx> merged;
  for (const auto& t : terms_) merged[t.string] += t.coeff;
  terms_.clear();
  for (const auto& [p, c] : merged) {
    if (std::abs(c) >= tol) terms_.push_back({c, p});
  }
}

Hamiltonian::Hamiltonian(int n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
  check_qubit_count(n_qubits);
  PauliSum sum(n_qubits);
  for (const auto& t : terms) sum.add(t.coeff, t.string);
  sum.simplify();
  for (const auto& t : sum.terms()) {
    if (std::abs(t.coeff.imag()) > 1e-10) {
      throw std::invalid_argument("Hamiltonian is not Hermitian: term " + t.string.str() +
                                  " has a complex coefficient");
    }
    terms_.push_back({cplx(t.coeff.real(), 0.0), t.string});
  }

  std::map<std::uint64_t, std::vector<Diag>> by_flip;
  for (const auto& t : terms_) {
    by_flip[t.string.x_mask()].push_back({t.string.z_mask(), t.coeff * i_power(t.string.y_count())});
  }
  groups_.reserve(by_flip.size());
  for (auto& [x, members] : by_flip) groups_.push_back({x, std::move(members)});
}

Hamiltonian Hamiltonian::from_sum(const PauliSum& sum) { return Hamiltonian(sum.n_qubits(), sum.terms()); }

std::vector<Hamiltonian::ConnectedElement> Hamiltonian::connected(const Configuration& s) const {
  if (s.n != n_) throw std::invalid_argument("configuration length differs from Hamiltonian size");
  std::vector<ConnectedElement> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) {
    // <s|P|s'> is nonzero only for s' = s ^ x, with value i^{#Y} (-1)^{|s' & z|}.
    const std::uint64_t target = s.bits ^ g.x;
    cplx m{0.0, 0.0};
    for (const auto& d : g.members) {
      m += (std::popcount(target & d.z) & 1) ? -d.weight : d.weight;
    }
    if (std::abs(m) >= kMergeTolerance) out.push_back({Configuration{target, n_}, m});
  }
  return out;
}

Hamiltonian build_afh_chain(int n, double coupling, bool periodic) {
  if (n < 2) throw std::invalid_argument("AFH chain needs at least 2 sites");
  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i + 1 < n; ++i) bonds.emplace_back(i, i + 1);
  if (periodic && n > 2) bonds.emplace_back(n - 1, 0);

  std::vector<PauliTerm> terms;
  for (auto [i, j] : bonds) {
    for (char op : {'X', 'Y', 'Z'}) {
      PauliString p(n);
      p.set_letter(i, op);
      p.set_letter(j, op);
      terms.push_back({cplx(coupling, 0.0), p});
    }
  }
  return Hamiltonian(n, std::move(terms));
}

namespace {

PauliSum jw_ladder(int j, int n_orbitals, double y_sign) {
  if (j < 0 || j >= n_orbitals) throw std::out_of_range("spin-orbital index out of range");
  PauliString x(n_orbitals), y(n_orbitals);
  for (int k = 0; k < j; ++k) {
    x.set_letter(k, 'Z');
    y.set_letter(k, 'Z');
  }
  x.set_letter(j, 'X');
  y.set_letter(j, 'Y');
  PauliSum out(n_orbitals);
  out.add({0.5, 0.0}, x);
  out.add({0.0, 0.5 * y_sign}, y);
  return out;
}

}  // namespace

PauliSum jw_annihilation(int j, int n_orbitals) { return jw_ladder(j, n_orbitals, +1.0); }
PauliSum jw_creation(int j, int n_orbitals) { return jw_ladder(j, n_orbitals, -1.0); }

Hamiltonian jordan_wigner(const FermionicOperatorList& ops, int n_orbitals) {
  check_qubit_count(n_orbitals);
  auto in_range = [n_orbitals](int idx) { return idx >= 0 && idx < n_orbitals; };

  std::map<std::pair<int, int>, double> one_body;
  for (const auto& t : ops.one_body) {
    if (!in_range(t.i) || !in_range(t.j)) throw std::out_of_range("one-body index out of range");
    one_body[{t.i, t.j}] += t.value;
  }
  for (const auto& [ij, v] : one_body) {
    auto it = one_body.find({ij.second, ij.first});
    const double mirror = it == one_body.end() ? 0.0 : it->second;
    if (std::abs(v - mirror) > 1e-10) {
      throw std::invalid_argument("one-body integrals are not self-adjoint at (" + std::to_string(ij.first) +
                                  "," + std::to_string(ij.second) + ")");
    }
  }

  PauliSum total(n_orbitals);
  for (const auto& t : ops.one_body) {
    total += (jw_creation(t.i, n_orbitals) * jw_annihilation(t.j, n_orbitals)).scaled(t.value);
  }
  for (const auto& t : ops.two_body) {
    if (!in_range(t.i) || !in_range(t.j) || !in_range(t.k) || !in_range(t.l)) {
      throw std::out_of_range("two-body index out of range");
    }
    const PauliSum product = jw_creation(t.i, n_orbitals) * jw_creation(t.j, n_orbitals) *
                             jw_annihilation(t.k, n_orbitals) * jw_annihilation(t.l, n_orbitals);
    total += product.scaled(0.5 * t.value);
  }
  total.simplify();
  return Hamiltonian::from_sum(total);
}

}  // namespace hqvmc
