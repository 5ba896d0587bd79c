#include "hqvmc/hamiltonian_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hqvmc {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s, int line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

// Reads the first non-empty line; returns its tokens.
std::vector<std::string> read_header(std::istream& in, int& line_no) {
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto toks = tokens_of(strip_comment(line));
    if (!toks.empty()) return toks;
  }
  throw std::runtime_error("empty Hamiltonian file");
}

}  // namespace

Hamiltonian read_pauli_hamiltonian(std::istream& in) {
  int line_no = 0;
  auto header = read_header(in, line_no);
  if (header.size() != 2 || header[0] != "nqubits") {
    throw std::runtime_error("expected header 'nqubits <N>'");
  }
  const int n = to_int(header[1], line_no);
  if (n < 1 || n > kMaxPauliQubits) throw std::runtime_error("nqubits out of range");

  std::vector<PauliTerm> terms;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto toks = tokens_of(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() != 2) throw std::runtime_error("line " + std::to_string(line_no) + ": expected '<coeff> <string>'");
    if (static_cast<int>(toks[1].size()) != n) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": Pauli string length differs from nqubits");
    }
    terms.push_back({cplx(to_double(toks[0], line_no), 0.0), PauliString::parse(toks[1])});
  }
  return Hamiltonian(n, std::move(terms));
}

void write_pauli_hamiltonian(std::ostream& out, const Hamiltonian& h) {
  out << "nqubits " << h.n_qubits() << '\n';
  const auto old = out.precision(17);
  for (const auto& t : h.terms()) out << t.coeff.real() << ' ' << t.string.str() << '\n';
  out.precision(old);
}

FermionicFile read_fermionic_terms(std::istream& in) {
  int line_no = 0;
  auto header = read_header(in, line_no);
  if (header.size() != 2 || header[0] != "norbitals") {
    throw std::runtime_error("expected header 'norbitals <N>'");
  }
  FermionicFile f;
  f.n_orbitals = to_int(header[1], line_no);
  if (f.n_orbitals < 1 || f.n_orbitals > kMaxPauliQubits) throw std::runtime_error("norbitals out of range");
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto toks = tokens_of(strip_comment(line));
    if (toks.empty()) continue;
    if (toks[0] == "1b" && toks.size() == 4) {
      f.ops.one_body.push_back({to_int(toks[1], line_no), to_int(toks[2], line_no), to_double(toks[3], line_no)});
    } else if (toks[0] == "2b" && toks.size() == 6) {
      f.ops.two_body.push_back({to_int(toks[1], line_no), to_int(toks[2], line_no), to_int(toks[3], line_no),
                                to_int(toks[4], line_no), to_double(toks[5], line_no)});
    } else {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected '1b i j v' or '2b i j k l v'");
    }
  }
  return f;
}

Hamiltonian load_hamiltonian_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Hamiltonian file " + path);
  std::string first;
  std::streampos start = in.tellg();
  for (std::string line; std::getline(in, line);) {
    auto toks = tokens_of(strip_comment(line));
    if (!toks.empty()) {
      first = toks[0];
      break;
    }
  }
  in.clear();
  in.seekg(start);
  if (first == "nqubits") return read_pauli_hamiltonian(in);
  if (first == "norbitals") {
    const auto f = read_fermionic_terms(in);
    return jordan_wigner(f.ops, f.n_orbitals);
  }
  throw std::runtime_error(path + ": unrecognised Hamiltonian header '" + first + "'");
}

Hamiltonian resolve_hamiltonian(const std::string& source) {
  if (source.rfind("afh:", 0) != 0) return load_hamiltonian_file(source);
  std::vector<std::string> parts;
  std::stringstream ss(source.substr(4));
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw std::invalid_argument("afh source needs a site count, e.g. afh:4");
  const int n = to_int(parts[0], 0);
  double j = 1.0;
  bool periodic = true;
  for (std::size_t k = 1; k < parts.size(); ++k) {
    if (parts[k] == "pbc") {
      periodic = true;
    } else if (parts[k] == "obc") {
      periodic = false;
    } else {
      j = to_double(parts[k], 0);
    }
  }
  return build_afh_chain(n, j, periodic);
}

}  // namespace hqvmc
