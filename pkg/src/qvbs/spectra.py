"""Closed-form entanglement spectra and entropies.

Entropies of the infinite block are evaluated through t = -ln(q)/2 > 0, where
q^(n/2) - q^(-n/2) = -2 sinh(n t).  The terms linear in t cancel exactly, so
only ln(1 - e^(-2nt)) pieces are summed; this keeps large S and tiny q exact.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidityWarning
from .mps import transfer_spectrum
from .qalgebra import DeformationContext, as_context, f_element, q_number
from .rdm import BlockSpectrum, Level, group_levels

__all__ = [
    "EffectiveModel",
    "renyi_dsl",
    "vn_dsl",
    "entropy_large_S",
    "isotropic_eigs",
    "isotropic_p",
    "perturbative_eigs",
    "perturbative_p",
    "cg_spin_one_zero",
    "effective_model_dsl",
    "effective_model_iso",
    "renyi_finite_correction",
    "ISO_VALIDITY_THRESHOLD",
]

# implementation choice, not derived: 3 (S/(S+2))^l must stay below this
ISO_VALIDITY_THRESHOLD = 0.1


def _log1mexp(x: float) -> float:
    """ln(1 - e^(-x)) for x > 0, accurate at both ends."""
    if x < math.log(2.0):
        return math.log(-math.expm1(-x))
    return math.log1p(-math.exp(-x))


def _inv_expm1(x: float) -> float:
    """1/(e^x - 1) for x > 0 without overflow."""
    return math.exp(-x) / -math.expm1(-x)


def _half_log_inv_q(ctx: DeformationContext) -> float:
    return -0.5 * math.log(ctx.q)


def renyi_dsl(S: int, alpha: float, ctx) -> float:
    """Renyi entropy of the infinite block,

    S_R = 2/(1-alpha) ln{ (q^(a(S+1)/2) - q^(-a(S+1)/2)) / (q^(a/2) - q^(-a/2)) / [S+1]^a }.
    """
    if alpha <= 0 or alpha == 1:
        raise ValueError("alpha must be positive and different from 1")
    ctx = as_context(ctx)
    if ctx.isotropic:
        return 2.0 * math.log(S + 1)
    t = _half_log_inv_q(ctx)
    log_sum = _log1mexp(2 * alpha * (S + 1) * t) - _log1mexp(2 * alpha * t)
    log_norm = _log1mexp(2 * (S + 1) * t) - _log1mexp(2 * t)
    return 2.0 / (1.0 - alpha) * (log_sum - alpha * log_norm)


def vn_dsl(S: int, ctx) -> float:
    """von Neumann entropy of the infinite block.

    2 ln[S+1] + {coth-like bracket} ln q, written as
    2 ln[S+1] + 2t (coth t - (S+1) coth((S+1) t)), with coth x = 1 + 2/(e^(2x) - 1).
    """
    ctx = as_context(ctx)
    if ctx.isotropic:
        return 2.0 * math.log(S + 1)
    t = _half_log_inv_q(ctx)
    log_norm = _log1mexp(2 * (S + 1) * t) - _log1mexp(2 * t)
    bracket = _inv_expm1(2 * t) - (S + 1) * _inv_expm1(2 * (S + 1) * t)
    return 2.0 * log_norm + 4.0 * t * bracket


def entropy_large_S(ctx, alpha: Optional[float] = None) -> float:
    """S -> infinity limit of the infinite-block entropies (von Neumann when
    ``alpha`` is None or 1).  Returns inf, with a warning, at q = 1."""
    ctx = as_context(ctx)
    if ctx.isotropic:
        warnings.warn("the large-S entropy diverges at q = 1", ValidityWarning, stacklevel=2)
        return math.inf
    q = ctx.q
    gap = q**-0.5 - q**0.5
    if alpha is None or alpha == 1:
        return 2.0 * math.log(1.0 / gap) + (q**0.5 + q**-0.5) / (q**0.5 - q**-0.5) * math.log(q)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 2.0 / (1.0 - alpha) * (alpha * math.log(gap) - math.log(q ** (-alpha / 2) - q ** (alpha / 2)))


def isotropic_p(S: int, l: int, J: int) -> float:
    """Exact eigenvalue p_JM of the isotropic l-site block (any M, degeneracy 2J+1)."""
    if l < 1:
        raise ValueError("l must be >= 1")
    ctx = DeformationContext(1.0)
    spec = transfer_spectrum(S, ctx)
    corr = sum(
        (2 * j + 1) * spec.ratio(2 * j) ** l * f_element(2 * j, 2 * J, S, S, S, S, ctx)
        for j in range(1, S + 1)
    )
    return (1.0 + corr) / (S + 1) ** 2


def isotropic_eigs(S: int, l: int) -> BlockSpectrum:
    """Multiplets p_JM, J = 0..S, of the isotropic block, sorted descending."""
    levels = [Level(isotropic_p(S, l, J), 2 * J + 1, J=J) for J in range(S + 1)]
    levels.sort(key=lambda lv: (-lv.p, lv.J))
    return BlockSpectrum(tuple(levels))


def cg_spin_one_zero(S: int, two_mu: int, ctx) -> float:
    """Closed form of <S/2 mu; 1 0 | S/2 mu>_q."""
    ctx = as_context(ctx)
    mu = two_mu / 2.0
    h = 0.5 * (1.0 + S / 2.0)
    pre = ctx.q ** (-mu / 2) / math.sqrt(q_number(S, ctx) * q_number(S + 2, ctx))
    return pre * (ctx.q**h * q_number(S / 2.0 + mu, ctx) - ctx.q**-h * q_number(S / 2.0 - mu, ctx))


def perturbative_p(S: int, l: int, ctx) -> dict:
    """First-order eigenvalues p_{mu nu}, keyed by doubled (mu, nu)."""
    ctx = as_context(ctx)
    ratio = transfer_spectrum(S, ctx).ratio(2) ** l
    q3 = q_number(3, ctx)
    norm = q_number(S + 1, ctx) ** 2
    cg = {two_mu: cg_spin_one_zero(S, two_mu, ctx) for two_mu in range(-S, S + 1, 2)}
    return {
        (two_mu, two_nu): ctx.q ** (-(two_mu + two_nu) / 2) / norm * (1.0 + q3 * ratio * (cg[two_mu] * cg[two_nu]))
        for two_mu in cg
        for two_nu in cg
    }


def perturbative_eigs(S: int, l: int, ctx) -> BlockSpectrum:
    """First-order spectrum; the level (mu, nu) sits in sector M = mu - nu."""
    ctx = as_context(ctx)
    table = perturbative_p(S, l, ctx)
    pairs = [(p, (two_mu - two_nu) // 2) for (two_mu, two_nu), p in table.items()]
    return BlockSpectrum(tuple(group_levels(pairs, ctx.eps_degeneracy)), ctx.eps_zero)


@dataclass(frozen=True)
class EffectiveModel:
    """Effective entanglement Hamiltonian parameters.

    ``paramagnet_dsl``: -beta H = beta_h (S1^z + S2^z), two spin-S/2 in a field.
    ``heisenberg_finite_iso``: beta H = gamma (-1)^l S1 . S_l.
    """

    kind: str
    S: int
    beta_h: Optional[float] = None
    gamma: Optional[float] = None
    sign: Optional[int] = None

    @property
    def T_eff(self) -> float:
        if self.gamma is None:
            raise AttributeError("only the Heisenberg model defines T_eff = 1/gamma")
        return 1.0 / self.gamma

    def single_site_levels(self) -> np.ndarray:
        """Levels of -beta H^(i) for one boundary spin, descending."""
        if self.kind != "paramagnet_dsl":
            raise ValueError("single-site levels exist only for the paramagnet")
        s = np.arange(self.S, -self.S - 1, -2) / 2.0
        return self.beta_h * s

    def weights(self) -> np.ndarray:
        """Normalized Boltzmann weights.

        Paramagnet: (S+1)^2 weights over (s1, s2), s_i = -S/2..S/2 ascending,
        flattened like the density-matrix slots.  Heisenberg: one weight per
        coupled spin J = 0..S (each (2J+1)-fold degenerate).
        """
        if self.kind == "paramagnet_dsl":
            s = np.arange(-self.S, self.S + 1, 2) / 2.0
            w = np.exp(self.beta_h * np.add.outer(s, s)).ravel()
            return w / w.sum()
        J = np.arange(self.S + 1)
        half = self.S / 2.0
        dot = 0.5 * (J * (J + 1) - 2 * half * (half + 1))
        w = np.exp(-self.gamma * self.sign * dot)
        return w / np.sum((2 * J + 1) * w)


def effective_model_dsl(ctx, S: int = 1) -> EffectiveModel:
    """Paramagnet with beta h = |ln q| reproducing rho_inf."""
    ctx = as_context(ctx)
    return EffectiveModel("paramagnet_dsl", S, beta_h=abs(math.log(ctx.q)))


def effective_model_iso(S: int, l: int) -> EffectiveModel:
    """Heisenberg coupling of the two boundary spins of an isotropic block."""
    if l < 1:
        raise ValueError("l must be >= 1")
    ratio = S / (S + 2)
    if 3 * ratio**l >= ISO_VALIDITY_THRESHOLD:
        warnings.warn(
            f"3 (S/(S+2))^l = {3 * ratio ** l:.3g} is not small; Heisenberg form is unreliable",
            ValidityWarning,
            stacklevel=2,
        )
    gamma = 12.0 / (S * (S + 2)) * ratio**l
    return EffectiveModel("heisenberg_finite_iso", S, gamma=gamma, sign=(-1) ** l)


def renyi_finite_correction(S: int, alpha: float, l: int) -> float:
    """Leading finite-block Renyi entropy at q = 1,

        2 ln(S+1) - (3 alpha / 2) (S/(S+2))^(2l).

    The coefficient follows from expanding tr rho^alpha to second order in the
    leading correction x_J of p_JM: sum_J (2J+1) x_J^2 / (S+1)^2 = 3 (S/(S+2))^(2l)
    for every S.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 2.0 * math.log(S + 1) - 1.5 * alpha * (S / (S + 2)) ** (2 * l)
