#pragma once

#include <iosfwd>
#include <string>

#include "hqvmc/pauli.hpp"

namespace hqvmc {

/// Pauli text format:
///   nqubits <N>
///   <coefficient> <string>      e.g. "-0.5 XZIY"
/// Blank lines and anything after '#' are ignored.
Hamiltonian read_pauli_hamiltonian(std::istream& in);
void write_pauli_hamiltonian(std::ostream& out, const Hamiltonian& h);

/// Fermionic text format:
///   norbitals <N>               (spin-orbitals)
///   1b i j value
///   2b i j k l value            (h_ijkl; the 1/2 prefactor is applied by jordan_wigner)
struct FermionicFile {
  int n_orbitals = 0;
  FermionicOperatorList ops;
};
FermionicFile read_fermionic_terms(std::istream& in);

/// Loads a Hamiltonian from a file in either format (detected from the header line).
Hamiltonian load_hamiltonian_file(const std::string& path);

/// Resolves a Hamiltonian source: "afh:<n>[:<J>][:pbc|:obc]" or a file path.
Hamiltonian resolve_hamiltonian(const std::string& source);

}  // namespace hqvmc
