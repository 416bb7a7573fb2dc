"""Brute-force ground truth on small periodic chains.

Everything here works with dense state vectors of length (2S+1)^L and makes no
use of the transfer-matrix algebra: the VBS state is contracted site by site,
the Hamiltonian projectors come straight from the two-site coupled basis, and
block spectra come from a partial trace diagonalized by a Jacobi sweep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitianError, SizeLimitError
from .mps import g_matrix
from .qalgebra import as_context, qcg

__all__ = [
    "StateVector",
    "ProjectorSet",
    "build_vbs_state",
    "multiplet_projectors",
    "two_site_overlap",
    "hamiltonian_annihilation_check",
    "partial_trace",
    "hermitian_eigs",
    "oracle_spectrum",
    "crosscheck_rdm",
    "MAX_STATE_DIM",
    "MAX_BLOCK_DIM",
]

MAX_STATE_DIM = 10**6
MAX_BLOCK_DIM = 4096


@dataclass(frozen=True)
class StateVector:
    S: int
    L: int
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.S, self.L, self.amplitudes / self.norm)


def build_vbs_state(S: int, L: int, ctx) -> StateVector:
    """Amplitudes tr(g^{m_1} ... g^{m_L}) of the periodic VBS_q(S) chain.

    Site 1 is the most significant digit of the flat index.
    """
    d = 2 * S + 1
    if L < 1 or d**L > MAX_STATE_DIM:
        raise SizeLimitError(f"(2S+1)^L = {d}^{L} exceeds {MAX_STATE_DIM}")
    A = g_matrix(S, ctx).tensor  # (d, D, D)
    acc = A
    for _ in range(L - 1):
        n = acc.shape[0]
        acc = np.einsum("sab,mbc->smac", acc, A).reshape(n * d, *A.shape[1:])
    amps = np.trace(acc, axis1=1, axis2=2)
    return StateVector(S, L, amps)


@dataclass(frozen=True)
class ProjectorSet:
    """Two-site projectors onto the q-deformed s-multiplets, s = 0..2S."""

    S: int
    projectors: dict

    def hamiltonian_terms(self) -> dict:
        return {s: P for s, P in self.projectors.items() if s > self.S}

    def bond_hamiltonian(self) -> np.ndarray:
        return sum(self.hamiltonian_terms().values())


def multiplet_projectors(S: int, ctx) -> ProjectorSet:
    """Pi_s = sum_m |s,m> <s,m|~ with the dual (left) vectors of the coupled basis.

    Columns of R are the coupled states |s,m> in the product basis; the rows of
    R^-1 are their duals, so Pi_s^2 = Pi_s regardless of the metric.
    """
    table = qcg(2 * S, 2 * S, ctx)
    R = table.matrix().T
    Rinv = np.linalg.inv(R)
    projectors = {}
    start = 0
    for two_s in sorted(table.vectors, reverse=True):
        stop = start + two_s + 1
        projectors[two_s // 2] = R[:, start:stop] @ Rinv[start:stop, :]
        start = stop
    return ProjectorSet(S, projectors)


def two_site_overlap(S: int, ctx) -> np.ndarray:
    """(g g)_ac as vectors on the two-site space, shape (S+1, S+1, (2S+1)^2)."""
    g = g_matrix(S, ctx).entries
    D, d = S + 1, 2 * S + 1
    return np.einsum("abm,bcn->acmn", g, g).reshape(D, D, d * d)


def _apply_bond(psi: np.ndarray, op: np.ndarray, i: int, L: int, d: int) -> np.ndarray:
    """Apply a two-site operator on sites (i, i+1 mod L), zero-based."""
    t = psi.reshape((d,) * L)
    j = (i + 1) % L
    t = np.moveaxis(t, (i, j), (0, 1))
    shape = t.shape
    out = (op @ t.reshape(d * d, -1)).reshape(shape)
    return out


def hamiltonian_annihilation_check(S: int, L: int, ctx) -> float:
    """max over bonds and s in S+1..2S of ||Pi_s(i,i+1) psi|| / ||psi||."""
    ctx = as_context(ctx)
    state = build_vbs_state(S, L, ctx)
    psi = state.amplitudes
    norm = state.norm
    d = 2 * S + 1
    terms = multiplet_projectors(S, ctx).hamiltonian_terms()
    worst = 0.0
    if L < 2:
        raise ValueError("need at least two sites")
    for i in range(L):
        for P in terms.values():
            worst = max(worst, float(np.linalg.norm(_apply_bond(psi, P, i, L, d))) / norm)
    return worst


def partial_trace(state: StateVector, l: int) -> np.ndarray:
    """Reduced density matrix of the first ``l`` sites, normalized to unit trace."""
    d = 2 * state.S + 1
    if not (1 <= l <= state.L):
        raise ValueError("need 1 <= l <= L")
    if d**l > MAX_BLOCK_DIM:
        raise SizeLimitError(f"block dimension {d}^{l} exceeds {MAX_BLOCK_DIM}")
    psi = state.amplitudes.reshape(d**l, -1)
    rho = psi @ psi.conj().T
    return rho / np.trace(rho).real


def _round_robin(n: int):
    """Rounds of disjoint index pairs covering all n(n-1)/2 pairs once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        rounds.append([(min(p), max(p)) for p in pairs if max(p) < n])
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def hermitian_eigs(matrix, tol: float = 1e-10, max_sweeps: int = 60):
    """Eigenvalues (ascending) and orthonormal eigenvectors by cyclic Jacobi.

    Each sweep visits every off-diagonal pair once in a fixed round-robin order;
    the pairs of one round are disjoint and are rotated together.
    """
    A = np.array(matrix, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotHermitianError("matrix must be square")
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.conj().T).max() > tol * scale:
        raise NotHermitianError("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    rounds = [(np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(n) if r]
    frob = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-15 * max(frob, 1e-300):
            break
        for P, Q in rounds:
            app = A[P, P].real
            aqq = A[Q, Q].real
            apq = A[P, Q]
            mag = np.abs(apq)
            active = mag > 1e-300
            safe = np.where(active, mag, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta == 0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t**2)
            s = t * c
            phase = np.where(active, apq / safe, 1.0)
            # U = [[phase c, phase s], [-s, c]] on each (p, q) plane
            upp, upq, uqp, uqq = phase * c, phase * s, -s + 0j, c + 0j
            colP, colQ = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = colP * upp + colQ * uqp
            A[:, Q] = colP * upq + colQ * uqq
            rowP, rowQ = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = np.conj(upp)[:, None] * rowP + np.conj(uqp)[:, None] * rowQ
            A[Q, :] = np.conj(upq)[:, None] * rowP + np.conj(uqq)[:, None] * rowQ
            vP, vQ = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = vP * upp + vQ * uqp
            V[:, Q] = vP * upq + vQ * uqq
    w = np.diag(A).real
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def oracle_spectrum(state: StateVector, l: int) -> np.ndarray:
    """Eigenvalues (descending) of the reduced density matrix of the first l sites.

    Uses whichever of the block or its complement is smaller; the two share
    their nonzero spectrum.
    """
    d = 2 * state.S + 1
    if d**l <= d ** (state.L - l):
        rho = partial_trace(state, l)
    else:
        psi = state.amplitudes.reshape(d**l, -1)
        if psi.shape[1] > MAX_BLOCK_DIM:
            raise SizeLimitError("both sides of the cut are too large")
        rho = psi.T @ psi.conj()
        rho = rho / np.trace(rho).real
    w, _ = hermitian_eigs(rho)
    return w[::-1]


def crosscheck_rdm(S: int, l: int, L: int, ctx) -> float:
    """max |p_oracle - p_transfer| over the (S+1)^2 leading eigenvalues."""
    from .rdm import rdm_finite_chain, spectrum_of

    ctx = as_context(ctx)
    oracle = oracle_spectrum(build_vbs_state(S, L, ctx), l)
    exact = spectrum_of(rdm_finite_chain(S, l, L, ctx), ctx).values()
    k = (S + 1) ** 2
    top = np.zeros(k)
    top[: min(k, len(oracle))] = oracle[:k]
    return float(np.abs(top - exact).max())
