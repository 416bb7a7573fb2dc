"""Reduced density matrices of a block of l spins in the VBS_q(S) chain.

Matrices act on pairs (a, b) of boundary auxiliary labels, a, b in -S/2..S/2,
flattened row-major like the transfer matrix.  The charge M = a - b is
conserved, so every matrix splits into sectors M = -S..S of size S+1-|M|.

Three constructions are provided:

* ``q_form``: sum_j (lambda_j/lambda_0)^l sum_m Q_jm (x) Q_jm, which is only
  similar to a Hermitian matrix when q < 1,
* the Hermitian ``matrix`` obtained from it with the diagonal metric
  q^((a+b)/4),
* for finite chains, sqrt(W) B sqrt(W) with W, B the environment and block
  transfer-matrix powers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import NegativeEigenvalueError
from .mps import transfer_spectrum
from .qalgebra import as_context, f_element, q_number, qcg

__all__ = [
    "QBlockMatrix",
    "ReducedDensityMatrix",
    "Level",
    "BlockSpectrum",
    "q_block",
    "rdm_double_scaling",
    "rdm_finite_block",
    "rdm_finite_chain",
    "sector_vbasis",
    "spectrum_of",
    "group_levels",
    "NEGATIVE_TOL",
]

NEGATIVE_TOL = 1e-10
HERMITIAN_TOL = 1e-12


def _aux(S):
    return np.arange(-S, S + 1, 2)


def _sector_labels(S: int) -> np.ndarray:
    """Charge M = a - b of every flattened pair slot."""
    a = _aux(S)
    return (np.subtract.outer(a, a) // 2).ravel()


@dataclass(frozen=True)
class QBlockMatrix:
    """(Q_jm)_ac = (-1)^(a+S/2) q^(-a/2) / sqrt([S+1]) <S/2 -a; S/2 c | j m>_q."""

    S: int
    two_j: int
    two_m: int
    matrix: np.ndarray


def q_block(S: int, two_j: int, two_m: int, ctx) -> QBlockMatrix:
    if not (0 <= two_j <= 2 * S and two_j % 2 == 0 and abs(two_m) <= two_j and two_m % 2 == 0):
        raise ValueError("need integer 0 <= j <= S and |m| <= j")
    ctx = as_context(ctx)
    table = qcg(S, S, ctx)
    norm = 1.0 / math.sqrt(q_number(S + 1, ctx))
    D = S + 1
    out = np.zeros((D, D))
    for ia, two_a in enumerate(_aux(S)):
        two_c = two_a + two_m
        if abs(two_c) > S:
            continue
        sign = -1.0 if ((two_a + S) // 2) % 2 else 1.0
        out[ia, (two_c + S) // 2] = sign * ctx.q ** (-two_a / 4) * norm * table(-two_a, two_c, two_j, two_m)
    return QBlockMatrix(S, two_j, two_m, out)


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Block reduced density matrix; ``l`` is ``math.inf`` in the double scaling limit
    and ``L`` is ``None`` for an infinite environment."""

    S: int
    l: float
    q: float
    matrix: np.ndarray
    L: Optional[int] = None
    q_form: Optional[np.ndarray] = None

    @property
    def sector_labels(self) -> np.ndarray:
        return _sector_labels(self.S)

    def sector(self, M: int) -> np.ndarray:
        idx = np.flatnonzero(self.sector_labels == M)
        return self.matrix[np.ix_(idx, idx)]

    @property
    def sectors(self) -> dict:
        return {M: self.sector(M) for M in range(-self.S, self.S + 1)}


def rdm_double_scaling(S: int, ctx) -> ReducedDensityMatrix:
    """rho_inf = Q_00 (x) Q_00 = diag(q^-(a+b)) / [S+1]^2."""
    if S < 1:
        raise ValueError("S must be a positive integer")
    ctx = as_context(ctx)
    a = _aux(S) / 2.0
    diag = (ctx.q ** -np.add.outer(a, a)).ravel() / q_number(S + 1, ctx) ** 2
    mat = np.diag(diag)
    return ReducedDensityMatrix(S, math.inf, ctx.q, mat, q_form=mat.copy())


def _metric(S: int, q: float) -> np.ndarray:
    a = _aux(S) / 2.0
    return (q ** (np.add.outer(a, a) / 4.0)).ravel()


def rdm_finite_block(S: int, l, ctx) -> ReducedDensityMatrix:
    """rho_l = sum_j (lambda_j/lambda_0)^l sum_m Q_jm (x) Q_jm for an infinite chain."""
    ctx = as_context(ctx)
    if l == math.inf:
        return rdm_double_scaling(S, ctx)
    if int(l) != l or l < 1:
        raise ValueError("block length must be a positive integer or math.inf")
    l = int(l)
    spec = transfer_spectrum(S, ctx)
    D = S + 1
    qsum = np.zeros((D * D, D * D))
    for two_j, _, _ in spec.lambdas:
        weight = spec.ratio(two_j) ** l
        for two_m in range(-two_j, two_j + 1, 2):
            Qm = q_block(S, two_j, two_m, ctx).matrix
            qsum += weight * np.kron(Qm, Qm)
    # similarity to a symmetric matrix: rho -> diag(d) rho diag(d)^-1
    d = _metric(S, ctx.q)
    sym = d[:, None] * qsum / d[None, :]
    asym = np.abs(sym - sym.T).max()
    if asym > HERMITIAN_TOL * max(1.0, np.abs(sym).max()):
        raise ArithmeticError(f"metric symmetrization failed ({asym:.2e})")
    sym = 0.5 * (sym + sym.T)
    return ReducedDensityMatrix(S, l, ctx.q, sym, q_form=qsum)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    mat = 0.5 * (mat + mat.conj().T)
    w, U = np.linalg.eigh(mat)
    return (U * np.sqrt(np.clip(w, 0.0, None))) @ U.conj().T


def rdm_finite_chain(S: int, l: int, L: int, ctx) -> ReducedDensityMatrix:
    """Exact block reduced density matrix inside a periodic chain of L sites.

    Built as sqrt(W) B sqrt(W) / tr(W B), where B collects the block transfer
    matrix G^l and W the environment G^(L-l), each regrouped into a positive
    matrix on the pair of boundary bonds.  Both powers come from the full
    spectral decomposition of G.
    """
    if not (1 <= l < L):
        raise ValueError("need 1 <= l < L")
    ctx = as_context(ctx)
    spec = transfer_spectrum(S, ctx)
    D = S + 1
    lam0 = spec.lambdas[0][1]
    env = (spec.power(L - l) / lam0 ** (L - l)).reshape(D, D, D, D)
    blk = (spec.power(l) / lam0**l).reshape(D, D, D, D)
    # G^n[x, x', y, y']: W[(a,b),(c,d)] = G^(L-l)[d,b,c,a]; B[(c,d),(a,b)] = G^l[c,a,d,b]
    W = np.einsum("dbca->abcd", env).reshape(D * D, D * D)
    B = np.einsum("cadb->cdab", blk).reshape(D * D, D * D)
    # odd S flips the sign of G; each factor is positive up to that sign
    W = W / np.trace(W)
    B = B / np.trace(B)
    root = _psd_sqrt(W)
    rho = root @ (0.5 * (B + B.conj().T)) @ root
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    if np.abs(rho.imag).max() < 1e-14:
        rho = rho.real
    return ReducedDensityMatrix(S, l, ctx.q, rho, L=L)


def sector_vbasis(S: int, l: int, M: int, ctx, symmetrize: bool = False) -> np.ndarray:
    """Sector-M block of rho_l in the (v_JM, vbar_JM) basis, J = |M|..S.

    The raw matrix is C Gram F C^-1 with a positive Gram matrix; with
    ``symmetrize`` it is returned as sqrt(Gram) F sqrt(Gram), which has the same
    spectrum.  At q = 1 the Gram matrix is the identity and the block is diagonal.
    """
    ctx = as_context(ctx)
    if abs(M) > S:
        raise ValueError("|M| must not exceed S")
    spec = transfer_spectrum(S, ctx)
    table = qcg(S, S, ctx)
    Js = list(range(abs(M), S + 1))
    n = len(Js)
    factor = np.empty(n)
    for k, J in enumerate(Js):
        corr = sum(
            q_number(2 * j + 1, ctx) * spec.ratio(2 * j) ** l * f_element(2 * j, 2 * J, S, S, S, S, ctx)
            for j in range(1, S + 1)
        )
        factor[k] = (1.0 + corr) / q_number(S + 1, ctx) ** 2
    gram = np.zeros((n, n))
    for two_a in _aux(S):
        two_b = two_a - 2 * M
        if abs(two_b) > S:
            continue
        col = np.array([table(two_a, -two_b, 2 * J, 2 * M) for J in Js])
        gram += ctx.q ** (-(two_a + two_b) / 2) * np.outer(col, col)
    if symmetrize:
        root = _psd_sqrt(gram)
        return root @ np.diag(factor) @ root
    c = np.array([(-1.0) ** J * math.sqrt(q_number(2 * J + 1, ctx)) for J in Js])
    return c[:, None] * gram * (factor / c)[None, :]


@dataclass(frozen=True)
class Level:
    """One (possibly degenerate) eigenvalue of a block density matrix.

    ``sectors`` lists the charge M of each copy and ``members`` the ungrouped
    values behind the mean ``p``; ``J`` is set for isotropic multiplets.
    """

    p: float
    degeneracy: int
    sectors: tuple = ()
    J: Optional[int] = None
    members: tuple = ()

    def raw(self) -> tuple:
        return self.members if self.members else (self.p,) * self.degeneracy

    @property
    def epsilon(self) -> float:
        return -math.log(self.p) if self.p > 0 else math.inf


@dataclass(frozen=True)
class BlockSpectrum:
    levels: tuple
    eps_zero: float = 1e-12

    def values(self) -> np.ndarray:
        """All eigenvalues with multiplicity, descending (ungrouped values)."""
        out = [p for lv in self.levels for p in lv.raw()]
        return np.array(sorted(out, reverse=True))

    @property
    def total(self) -> float:
        return float(sum(lv.p * lv.degeneracy for lv in self.levels))

    @property
    def degeneracies(self) -> tuple:
        return tuple(lv.degeneracy for lv in self.levels)

    def nonzero(self) -> "BlockSpectrum":
        return BlockSpectrum(tuple(lv for lv in self.levels if lv.p > self.eps_zero), self.eps_zero)

    def energies(self, shifted: bool = False) -> np.ndarray:
        """Entanglement energies -ln p of the nonzero levels (one per level)."""
        eps = np.array([lv.epsilon for lv in self.levels if lv.p > self.eps_zero])
        if shifted and len(eps):
            eps = eps - eps.min()
        return eps

    # entropies keep every positive eigenvalue: for alpha < 1 tiny p still count
    def von_neumann(self) -> float:
        p = self.values()
        p = p[p > 0]
        return float(-np.sum(p * np.log(p)))

    def renyi(self, alpha: float) -> float:
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        if alpha == 1:
            return self.von_neumann()
        p = self.values()
        p = p[p > 0]
        return float(np.log(np.sum(p**alpha)) / (1.0 - alpha))

    def by_sector(self, eps_degeneracy: float = 1e-9) -> Iterator[tuple]:
        """(M, p, count) triples grouping equal eigenvalues inside each sector."""
        for M in sorted({m for lv in self.levels for m in lv.sectors}):
            vals = [lv.p for lv in self.levels for m in lv.sectors if m == M]
            for lv in group_levels([(v, M) for v in vals], eps_degeneracy):
                yield M, lv.p, lv.degeneracy


def group_levels(pairs, eps_degeneracy: float) -> list:
    """Merge (p, sector) pairs whose values agree within ``eps_degeneracy``.

    The tolerance is relative to the values compared, with a floor at the
    round-off level of the largest value so numerical zeros stay together.
    """
    pairs = sorted(pairs, key=lambda t: (-t[0], t[1]))
    if not pairs:
        return []
    floor = 64 * np.finfo(float).eps * abs(pairs[0][0])
    levels = []
    chunk = []
    for p, M in pairs:
        ref = max(abs(chunk[0][0]), abs(p)) if chunk else 0.0
        if chunk and abs(chunk[0][0] - p) > max(eps_degeneracy * ref, floor):
            levels.append(_close(chunk))
            chunk = []
        chunk.append((p, M))
    if chunk:
        levels.append(_close(chunk))
    return levels


def _close(chunk) -> Level:
    vals = tuple(float(p) for p, _ in chunk)
    return Level(float(np.mean(vals)), len(chunk), tuple(M for _, M in chunk), members=vals)


def spectrum_of(rdm: ReducedDensityMatrix, ctx=None) -> BlockSpectrum:
    """Sector-wise Hermitian diagonalization with degeneracy grouping."""
    ctx = as_context(rdm.q if ctx is None else ctx)
    pairs = []
    for M, block in rdm.sectors.items():
        off = block - np.diag(np.diag(block))
        if not off.any():
            w = np.diag(block).real
        else:
            w = np.linalg.eigvalsh(0.5 * (block + block.conj().T))
            # eigenvalues inside the backward-error band are exact zeros
            noise = 32 * len(w) * np.finfo(float).eps * np.abs(w).max()
            w = np.where(np.abs(w) <= noise, 0.0, w)
        if w.min() < -NEGATIVE_TOL:
            raise NegativeEigenvalueError(f"eigenvalue {w.min():.3e} in sector M={M}")
        pairs.extend((max(float(p), 0.0), M) for p in w)
    return BlockSpectrum(tuple(group_levels(pairs, ctx.eps_degeneracy)), ctx.eps_zero)
