"""Writes a small 3-orbital, 2-electron model Hamiltonian in the fermionic text format.

The integrals are synthetic but shaped like a minimal-basis active space:
a symmetric one-body matrix and a Coulomb tensor (pq|rs) = sum_L B^L_pq B^L_rs,
which has the full 8-fold permutation symmetry and is positive semidefinite.
The script checks by brute force that the global ground state sits in the
N_up = N_down = 1 sector and prints the sector energies.
"""

import argparse
import itertools

import numpy as np

H1 = np.array([
    [-1.10, 0.060, 0.035],
    [0.060, -0.12, 0.025],
    [0.035, 0.025, 0.08],
])

B = np.array([
    [[0.62, 0.05, 0.02], [0.05, 0.40, 0.03], [0.02, 0.03, 0.36]],
    [[0.10, 0.18, 0.00], [0.18, -0.06, 0.04], [0.00, 0.04, 0.05]],
    [[0.04, 0.00, 0.15], [0.00, 0.05, 0.06], [0.15, 0.06, -0.03]],
])


def spin_orbital_integrals():
    eri = np.einsum("lpq,lrs->pqrs", B, B)  # chemists' (pq|rs)
    n = H1.shape[0]
    one, two = [], []
    for p, q in itertools.product(range(n), repeat=2):
        for s in range(2):
            if abs(H1[p, q]) > 0:
                one.append((2 * p + s, 2 * q + s, H1[p, q]))
    # 1/2 sum h_ijkl c_i^+ c_j^+ c_k c_l with h_ijkl = (il|jk) for matching spins
    for p, q, r, t in itertools.product(range(n), repeat=4):
        v = eri[p, t, q, r]
        if abs(v) < 1e-14:
            continue
        for s1 in range(2):
            for s2 in range(2):
                i, j, k, l = 2 * p + s1, 2 * q + s2, 2 * r + s2, 2 * t + s1
                if i == j or k == l:
                    continue
                two.append((i, j, k, l, v))
    return 2 * n, one, two


def fock_matrix(n_modes, one, two):
    dim = 1 << n_modes

    def annihilate(state, j):
        if not (state >> j) & 1:
            return None, 0
        sign = -1 if bin(state & ((1 << j) - 1)).count("1") % 2 else 1
        return state ^ (1 << j), sign

    def create(state, j):
        if (state >> j) & 1:
            return None, 0
        sign = -1 if bin(state & ((1 << j) - 1)).count("1") % 2 else 1
        return state | (1 << j), sign

    def apply(ops, state):
        sign = 1
        for kind, j in reversed(ops):
            state, sg = (create if kind == "+" else annihilate)(state, j)
            if state is None:
                return None, 0
            sign *= sg
        return state, sign

    h = np.zeros((dim, dim))
    for b in range(dim):
        for i, j, v in one:
            out, sg = apply([("+", i), ("-", j)], b)
            if out is not None:
                h[out, b] += v * sg
        for i, j, k, l, v in two:
            out, sg = apply([("+", i), ("+", j), ("-", k), ("-", l)], b)
            if out is not None:
                h[out, b] += 0.5 * v * sg
    return h


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("output")
    args = ap.parse_args()
    n_modes, one, two = spin_orbital_integrals()
    h = fock_matrix(n_modes, one, two)
    assert np.allclose(h, h.T)
    evals, evecs = np.linalg.eigh(h)
    ground = evecs[:, 0]
    sectors = {}
    for b in range(1 << n_modes):
        up = sum((b >> (2 * p)) & 1 for p in range(n_modes // 2))
        dn = sum((b >> (2 * p + 1)) & 1 for p in range(n_modes // 2))
        sectors.setdefault((up, dn), []).append(b)
    for key, idx in sorted(sectors.items()):
        e = np.linalg.eigvalsh(h[np.ix_(idx, idx)])[0]
        print(f"sector up={key[0]} down={key[1]}: {e:.10f}")
    weight = sum(ground[b] ** 2 for b in sectors[(1, 1)])
    print(f"global ground {evals[0]:.10f}, weight in (1,1) sector {weight:.12f}")
    assert weight > 1 - 1e-12, "ground state is not in the N_up = N_down = 1 sector"
    with open(args.output, "w") as f:
        f.write("# 3 spatial orbitals, 2 electrons; synthetic minimal-basis-like integrals\n")
        f.write("# spin-orbital 2p = orbital p up, 2p+1 = orbital p down\n")
        f.write(f"norbitals {n_modes}\n")
        for i, j, v in one:
            f.write(f"1b {i} {j} {v:.12g}\n")
        for i, j, k, l, v in two:
            f.write(f"2b {i} {j} {k} {l} {v:.12g}\n")


if __name__ == "__main__":
    main()
