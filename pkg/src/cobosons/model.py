"""Extended Hubbard Hamiltonian, its hard-core pair reduction, and the
relative-coordinate chains, all as Hermitian sparse operators."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .fock import (
    BasisMismatchError,
    FullBasis,
    PairBasis,
    StateVector,
    fermion_a_annihilate,
    fermion_a_create,
    fermion_b_annihilate,
    fermion_b_create,
    full_basis,
    pair_basis,
    popcount,
)

HERMITICITY_TOL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """Energies J, U, gamma and lattice content; boundary is periodic."""

    j: float
    u: float
    gamma: float
    d: int
    n: Optional[int] = None
    n_a: Optional[int] = None
    n_b: Optional[int] = None

    def __post_init__(self):
        for name in ("j", "u", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.d < 2:
            raise ValueError(f"need d >= 2, got {self.d}")

    @property
    def jbar(self) -> float:
        if self.u == 0:
            raise ValueError("jbar undefined for U = 0")
        return 2.0 * self.j**2 / self.u

    @property
    def gammabar(self) -> float:
        return 2.0 * (self.gamma - self.jbar)

    def pair_count(self) -> int:
        if self.n is not None:
            return self.n
        if self.n_a is not None and self.n_a == self.n_b:
            return self.n_a
        raise ValueError("pair count undefined without N (or N_A == N_B)")


@dataclass(frozen=True)
class ChainBasis:
    """Relative-coordinate chain sites, in order."""

    kind: str
    sites: tuple

    @property
    def size(self) -> int:
        return len(self.sites)


class SparseOperator:
    """Hermitian operator stored as sorted (row, col, value) triplets."""

    def __init__(self, basis, rows, cols, vals, hermitian=True):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=complex)
        n = basis.size
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        if hermitian:
            dev = abs(mat - mat.getH())
            if dev.nnz and dev.max() >= HERMITICITY_TOL:
                raise ValueError(f"operator not Hermitian (max dev {dev.max():g})")
        self.basis = basis
        self.hermitian = hermitian
        self._csr = mat
        coo = mat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        self.rows = coo.row[order]
        self.cols = coo.col[order]
        self.vals = coo.data[order]

    @property
    def dim(self) -> int:
        return self.basis.size

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def to_csr(self) -> sp.csr_matrix:
        return self._csr

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self._csr @ vec

    def matvec(self, psi: StateVector) -> StateVector:
        if psi.basis is not self.basis and psi.basis != self.basis:
            raise BasisMismatchError("operator and state live in different bases")
        return StateVector(psi.basis, self._csr @ psi.amplitudes)

    def expectation(self, psi: StateVector) -> complex:
        if psi.basis is not self.basis and psi.basis != self.basis:
            raise BasisMismatchError("operator and state live in different bases")
        return complex(np.vdot(psi.amplitudes, self._csr @ psi.amplitudes))


# ------------------------------------------------------------- full Hubbard

def _full_entries(params: ModelParams, basis: FullBasis):
    d = params.d
    rows, cols, vals = [], [], []
    hops = [
        (fermion_a_create, fermion_a_annihilate),
        (fermion_b_create, fermion_b_annihilate),
    ]
    for col, cfg in enumerate(basis.states):
        ma, mb = cfg
        # point interaction: doubly occupied sites
        diag = -params.u * popcount(ma & mb)
        # nearest-neighbour attraction, both orientations (A at k with B at
        # k+1, and B at k with A at k+1, periodic) so that projecting onto
        # the pair subspace gives -2*gamma per occupied bond
        full = (1 << d) - 1
        mb_shift = ((mb >> 1) | (mb << (d - 1))) & full
        ma_shift = ((ma >> 1) | (ma << (d - 1))) & full
        diag += -params.gamma * (popcount(ma & mb_shift) + popcount(mb & ma_shift))
        if diag:
            rows.append(col)
            cols.append(col)
            vals.append(diag)
        if params.j == 0:
            continue
        for create, annihilate in hops:
            for i in range(d):
                ip = (i + 1) % d
                # c_i^dag c_{i+1} and c_{i+1}^dag c_i
                for src, dst in ((ip, i), (i, ip)):
                    res = annihilate(cfg, src)
                    if res is None:
                        continue
                    mid, s1 = res
                    res = create(mid, dst)
                    if res is None:
                        continue
                    new, s2 = res
                    rows.append(basis.index[new])
                    cols.append(col)
                    vals.append(-params.j * s1 * s2)
    return rows, cols, vals


def build_full_hamiltonian(params: ModelParams, basis: Optional[FullBasis] = None):
    """H = J*H0 + U*Hp + gamma*Hnn on the two-species basis."""
    if basis is None:
        if params.n_a is None or params.n_b is None:
            n = params.pair_count()
            basis = full_basis(params.d, n, n)
        else:
            basis = full_basis(params.d, params.n_a, params.n_b)
    return SparseOperator(basis, *_full_entries(params, basis))


# -------------------------------------------------------- effective pair model

def build_effective_hamiltonian(params: ModelParams, basis: Optional[PairBasis] = None):
    """Strong-coupling pair model: hopping -2J^2/U and nearest-neighbour
    attraction -(2*gamma - 4J^2/U); the N-dependent constant is dropped."""
    if params.u == 0:
        raise ValueError("effective model undefined for U = 0")
    if basis is None:
        basis = pair_basis(params.d, params.pair_count())
    # 2*gamma - 4J^2/U == gammabar, so the pair model closes over the bars
    return build_effective_from_bars(params.d, basis.n, params.jbar, params.gammabar, basis)


def build_effective_from_bars(d, n, jbar, gammabar, basis: Optional[PairBasis] = None):
    """Pair model directly from the renormalized couplings Jbar, gammabar."""
    if basis is None:
        basis = pair_basis(d, n)
    vnn = gammabar
    full = (1 << d) - 1
    rows, cols, vals = [], [], []
    for col, mask in enumerate(basis.states):
        mask_shift = ((mask >> 1) | (mask << (d - 1))) & full
        bonds = popcount(mask & mask_shift)
        if bonds and vnn:
            rows.append(col)
            cols.append(col)
            vals.append(-vnn * bonds)
        if jbar == 0:
            continue
        for k in range(d):
            kp = (k + 1) % d
            for src, dst in ((kp, k), (k, kp)):
                if (mask >> src) & 1 and not (mask >> dst) & 1:
                    new = (mask & ~(1 << src)) | (1 << dst)
                    rows.append(basis.index[new])
                    cols.append(col)
                    vals.append(-jbar)
    return SparseOperator(basis, rows, cols, vals)


# ------------------------------------------------------------ relative chains

def build_relative_chain(kind: str, params: ModelParams, r: int = 0, cutoff: int = 200):
    """Relative-coordinate chain after separating the centre-of-mass label r.

    two_fermion: sites s in [-S, S], hopping -J(1 + e^{+-i 2 pi r / d}),
    on-site -U at s = 0.  two_pair: sites s in [1, S], hopping with
    Jbar = 2J^2/U in place of J, on-site -gammabar at s = 1.  Open ends
    emulate the infinite line; convergence is checked in the cutoff.
    """
    if cutoff < 3:
        raise ValueError(f"cutoff must be >= 3, got {cutoff}")
    phase = cmath.exp(2j * cmath.pi * r / params.d)
    if kind == "two_fermion":
        sites = tuple(range(-cutoff, cutoff + 1))
        hop = -params.j * (1 + phase)
        diag = {0: -params.u}
    elif kind == "two_pair":
        sites = tuple(range(1, cutoff + 1))
        hop = -params.jbar * (1 + phase)
        diag = {1: -params.gammabar}
    else:
        raise ValueError(f"unknown chain kind {kind!r}")
    basis = ChainBasis(kind, sites)
    pos = {s: i for i, s in enumerate(sites)}
    rows, cols, vals = [], [], []
    for s, i in pos.items():
        if s in diag:
            rows.append(i)
            cols.append(i)
            vals.append(diag[s])
        if s + 1 in pos:
            j = pos[s + 1]
            rows += [j, i]
            cols += [i, j]
            vals += [hop, hop.conjugate()]
    return SparseOperator(basis, rows, cols, vals)


# ------------------------------------------------------------ matrix-free path

def matvec_effective_free(params: ModelParams, psi: StateVector) -> StateVector:
    """Matrix-free application of the effective Hamiltonian, regenerating
    entries from the bitmask rules; must agree with the stored operator."""
    basis = psi.basis
    d = params.d
    jbar = params.jbar
    vnn = 2.0 * params.gamma - 4.0 * params.j**2 / params.u
    full = (1 << d) - 1
    out = np.zeros(basis.size, dtype=complex)
    amp = psi.amplitudes
    for i, mask in enumerate(basis.states):
        a = amp[i]
        if a == 0:
            continue
        mask_shift = ((mask >> 1) | (mask << (d - 1))) & full
        out[i] += -vnn * popcount(mask & mask_shift) * a
        for k in range(d):
            kp = (k + 1) % d
            for src, dst in ((kp, k), (k, kp)):
                if (mask >> src) & 1 and not (mask >> dst) & 1:
                    new = (mask & ~(1 << src)) | (1 << dst)
                    out[basis.index[new]] += -jbar * a
    return StateVector(basis, out)
