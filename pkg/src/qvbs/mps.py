"""Matrix product representation of the spin-S VBS_q state and its transfer matrix.

Auxiliary (virtual) indices a, b run over -S/2..S/2 and are stored at position
``a + S/2``; physical m runs over -S..S at position ``m + S``.  Pairs of
auxiliary indices (a, a') are flattened row-major into ``(S+1)**2`` slots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import AnalyticMismatchError
from .qalgebra import as_context, f_element, q6j, q_number, qcg, sign_phase

__all__ = [
    "GMatrix",
    "TransferMatrix",
    "TransferSpectrum",
    "g_matrix",
    "transfer_matrix",
    "transfer_spectrum",
    "correlation_length",
    "eigenvalue_from_f",
]

RESIDUAL_TOL = 1e-10


def _aux(S: int) -> np.ndarray:
    """Doubled auxiliary labels 2a for a = -S/2..S/2."""
    return np.arange(-S, S + 1, 2)


@dataclass(frozen=True)
class GMatrix:
    """Site tensor: ``entries[a, b]`` is the physical vector (g)_ab over |S, m>."""

    S: int
    entries: np.ndarray

    @property
    def tensor(self) -> np.ndarray:
        """Same data with the physical index first, shape (2S+1, S+1, S+1)."""
        return np.moveaxis(self.entries, 2, 0)


def g_matrix(S: int, ctx) -> GMatrix:
    """(g)_ab = sum_m <S/2 a; S/2 -b | S m>_q (-1)^b q^(-b/2) |S, m>."""
    if S < 1:
        raise ValueError("S must be a positive integer")
    ctx = as_context(ctx)
    table = qcg(S, S, ctx)
    D = S + 1
    entries = np.zeros((D, D, 2 * S + 1), dtype=complex)
    for ia, two_a in enumerate(_aux(S)):
        for ib, two_b in enumerate(_aux(S)):
            two_m = two_a - two_b
            coef = table(two_a, -two_b, 2 * S, two_m)
            entries[ia, ib, (2 * S + two_m) // 2] = coef * sign_phase(two_b) * ctx.q ** (-two_b / 4)
    return GMatrix(S, entries)


@dataclass(frozen=True)
class TransferMatrix:
    """G_{aa';bb'} = sum_m gbar_ab(m) g_a'b'(m), shape ((S+1)^2, (S+1)^2)."""

    S: int
    matrix: np.ndarray


def transfer_matrix(S: int, ctx) -> TransferMatrix:
    """Transfer matrix assembled from g and its dual.

    The dual carries the same (-1)^b factor as g (no complex conjugation), so
    for odd S this differs from sum_m conj(g) (x) g by the global sign (-1)^S.
    All normalized quantities are insensitive to it.
    """
    g = g_matrix(S, ctx).entries
    D = S + 1
    G = np.einsum("abm,cdm->acbd", g, g).reshape(D * D, D * D)
    return TransferMatrix(S, G)


@dataclass(frozen=True)
class TransferSpectrum:
    """Analytic eigensystem of G.

    ``lambdas`` holds (two_j, lambda_j, 2j+1) with j ascending.  ``eigvecs[two_j]``
    is a (2j+1, (S+1)^2) array of the orthonormal vectors
    (e_jm)_{aa'} = <S/2 -a; S/2 a' | j m>_q, eigenvectors of the similarity
    transformed matrix diag(T) G diag(T)^-1 with T_{aa'} = (-1)^(a+S/2) q^(-a/2).
    """

    S: int
    q: float
    lambdas: tuple
    eigvecs: dict
    similarity: np.ndarray
    residual: float

    def ratio(self, two_j: int) -> float:
        lam = dict((tj, lam) for tj, lam, _ in self.lambdas)
        return lam[two_j] / lam[0]

    def projector(self, two_j: int) -> np.ndarray:
        """Spectral projector P_j in the original basis of G."""
        e = self.eigvecs[two_j]
        t = self.similarity
        return (1.0 / t)[:, None] * (e.T @ e) * t[None, :]

    def power(self, n: int) -> np.ndarray:
        """G^n = sum_j lambda_j^n P_j."""
        return sum(lam**n * self.projector(tj) for tj, lam, _ in self.lambdas)

    @cached_property
    def symmetric_matrix(self) -> np.ndarray:
        """diag(T) G diag(T)^-1, real symmetric."""
        return sum(lam * self.eigvecs[tj].T @ self.eigvecs[tj] for tj, lam, _ in self.lambdas)


def _lambda(S: int, two_j: int, ctx) -> float:
    sign = -1.0 if (two_j // 2 + S) % 2 else 1.0
    return sign * q_number(2 * S + 1, ctx) * q6j(2 * S, two_j, S, S, S, S, ctx)


def eigenvalue_from_f(S: int, j: int, ctx) -> float:
    """lambda_j written through the F-matrix: (-1)^S [2S+1]/[S+1] F[S j S/2 S/2; S/2 S/2]."""
    ctx = as_context(ctx)
    sign = -1.0 if S % 2 else 1.0
    ratio = q_number(2 * S + 1, ctx) / q_number(S + 1, ctx)
    return sign * ratio * f_element(2 * S, 2 * j, S, S, S, S, ctx)


def transfer_spectrum(S: int, ctx) -> TransferSpectrum:
    """Eigenvalues lambda_j = (-1)^(j+S) [2S+1] {S j S/2; S/2 S/2 S/2}_q and the
    q-CG eigenvectors, checked against the explicit transfer matrix."""
    ctx = as_context(ctx)
    D = S + 1
    table = qcg(S, S, ctx)
    aux = _aux(S)
    t_row = np.array([(-1.0) ** ((two_a + S) // 2) * ctx.q ** (-two_a / 4) for two_a in aux])
    similarity = np.repeat(t_row, D)
    lambdas = []
    eigvecs = {}
    for j in range(S + 1):
        two_j = 2 * j
        vecs = np.array(
            [
                [table(-two_a, two_b, two_j, two_m) for two_a in aux for two_b in aux]
                for two_m in range(-two_j, two_j + 1, 2)
            ]
        )
        eigvecs[two_j] = vecs
        lambdas.append((two_j, _lambda(S, two_j, ctx), two_j + 1))

    G = transfer_matrix(S, ctx).matrix
    G_sym = similarity[:, None] * G / similarity[None, :]
    scale = max(1.0, np.abs(G_sym).max())
    residual = 0.0
    for two_j, lam, _ in lambdas:
        r = G_sym @ eigvecs[two_j].T - lam * eigvecs[two_j].T
        residual = max(residual, float(np.abs(r).max()) / scale)
    if residual > RESIDUAL_TOL:
        raise AnalyticMismatchError(
            f"transfer eigenpairs off by {residual:.3e} for S={S}, q={ctx.q}"
        )
    return TransferSpectrum(S, ctx.q, tuple(lambdas), eigvecs, similarity, residual)


def correlation_length(S: int, ctx) -> float:
    """xi = 1 / ln([S+2]/[S]); reduces to 1/ln((S+2)/S) at q = 1."""
    if S < 1:
        raise ValueError("S must be a positive integer")
    ctx = as_context(ctx)
    return 1.0 / math.log(q_number(S + 2, ctx) / q_number(S, ctx))
