#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hqvmc {

using cplx = std::complex<double>;

/// Largest register addressable by the bitmask representation.
inline constexpr int kMaxPauliQubits = 64;

/// Basis state s = (s_0, ..., s_{n-1}). Qubit q is stored in bit q, so qubit 0
/// is the leftmost character of the textual form and the lowest statevector
/// stride.
struct Configuration {
  std::uint64_t bits = 0;
  int n = 0;

  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration&) const = default;

  int bit(int q) const { return static_cast<int>((bits >> q) & 1u); }
  void set(int q, int value) {
    bits = value ? (bits | (std::uint64_t{1} << q)) : (bits & ~(std::uint64_t{1} << q));
  }
  int popcount() const;
  std::string str() const;
  static Configuration parse(std::string_view text);
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.bits * 0x9E3779B97F4A7C15ull + static_cast<unsigned>(c.n));
  }
};

/// Tensor product of single-qubit Paulis stored as X/Z bitmasks.
/// A qubit with both bits set carries Y.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  static PauliString parse(std::string_view letters);
  static PauliString identity(int n_qubits) { return PauliString(n_qubits); }
  /// Single letter `op` in {'I','X','Y','Z'} on `qubit`.
  static PauliString single(int n_qubits, int qubit, char op);

  int size() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  char letter(int qubit) const;
  void set_letter(int qubit, char op);
  int y_count() const;
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  std::string str() const;

  bool operator==(const PauliString&) const = default;
  auto operator<=>(const PauliString&) const = default;

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// P|s> = phase * |s'>.
struct BasisImage {
  Configuration state;
  cplx phase;
};

BasisImage apply_to_basis(const PauliString& p, const Configuration& s);

/// Product of two Pauli strings, returned as (phase, string) with phase in {±1, ±i}.
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

struct PauliTerm {
  cplx coeff;
  PauliString string;
};

/// Coefficients whose magnitude falls below this after merging are dropped.
inline constexpr double kMergeTolerance = 1e-12;

/// General (not necessarily Hermitian) weighted sum of Pauli strings.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits = 0) : n_(n_qubits) {}

  int n_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  void add(cplx coeff, const PauliString& p);
  PauliSum& operator+=(const PauliSum& other);
  PauliSum operator*(const PauliSum& other) const;
  PauliSum scaled(cplx factor) const;
  /// Merges duplicate strings, drops |c| < tol, sorts by string.
  void simplify(double tol = kMergeTolerance);

 private:
  int n_;
  std::vector<PauliTerm> terms_;
};

/// Hermitian qubit operator with merged, real-coefficient terms plus the
/// X-mask grouping used by `connected`.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  /// Merges duplicates and rejects coefficients with an imaginary part above 1e-10.
  Hamiltonian(int n_qubits, std::vector<PauliTerm> terms);
  static Hamiltonian from_sum(const PauliSum& sum);

  int n_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t group_count() const { return groups_.size(); }

  struct ConnectedElement {
    Configuration state;
    cplx element;  // <s|H|s'>
  };
  /// Row s of H: one entry per distinct flip pattern, entries with |m| < 1e-12 omitted.
  std::vector<ConnectedElement> connected(const Configuration& s) const;

 private:
  struct Diag {
    std::uint64_t z;
    cplx weight;  // coefficient times i^{#Y}
  };
  struct Group {
    std::uint64_t x;
    std::vector<Diag> members;
  };
  int n_ = 0;
  std::vector<PauliTerm> terms_;
  std::vector<Group> groups_;
};

inline std::vector<Hamiltonian::ConnectedElement> connected(const Configuration& s, const Hamiltonian& h) {
  return h.connected(s);
}

/// Heisenberg exchange J * (XX + YY + ZZ) on nearest-neighbour bonds.
/// The periodic bond (n-1, 0) is added only for n > 2.
Hamiltonian build_afh_chain(int n, double coupling = 1.0, bool periodic = true);

struct FermionicOperatorList {
  struct OneBody {
    int i, j;
    double value;
  };
  struct TwoBody {
    int i, j, k, l;
    double value;
  };
  std::vector<OneBody> one_body;
  std::vector<TwoBody> two_body;
};

/// H = sum h_ij c_i^+ c_j + 1/2 sum h_ijkl c_i^+ c_j^+ c_k c_l mapped with
/// c_j = 1/2 (X_j + iY_j) Z_0 ... Z_{j-1}. Spin-orbital 2p is orbital p spin-up
/// and 2p+1 is orbital p spin-down.
Hamiltonian jordan_wigner(const FermionicOperatorList& ops, int n_orbitals);

/// Ladder operators as Pauli sums; exposed for algebra tests.
PauliSum jw_annihilation(int j, int n_orbitals);
PauliSum jw_creation(int j, int n_orbitals);

}  // namespace hqvmc
