"""SU_q(2) representation theory for real deformation parameter 0 < q <= 1.

All spin and magnetic quantum numbers are passed around as *doubled* integers
(``two_j = 2*j``) so that half-integer labels index arrays and dictionaries
exactly.  Basis states of a spin-j multiplet are ordered by ascending m, so the
state |j, m> sits at row ``(two_j + two_m) // 2``.

Coupled states follow the coproduct

    J_tot^+- = q^(-J1^z/2) (x) J2^+-  +  J1^+- (x) q^(J2^z/2)
    J_tot^z  = 1 (x) J2^z  +  J1^z (x) 1

and Clebsch-Gordan tables are generated by the highest-weight + lowering
construction with the positive highest-weight phase convention.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

__all__ = [
    "DeformationContext",
    "as_context",
    "SpinRep",
    "QcgTable",
    "sign_phase",
    "q_number",
    "q_factorial",
    "spin_rep",
    "coproduct_rep",
    "qcg",
    "triangle",
    "q6j",
    "f_element",
    "write_qcg_csv",
]


@dataclass(frozen=True)
class DeformationContext:
    """Deformation parameter plus the numerical tolerances used with it."""

    q: float
    eps_degeneracy: float = 1e-9
    eps_zero: float = 1e-12

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {self.q!r}")
        if self.eps_degeneracy <= 0 or self.eps_zero <= 0:
            raise ValueError("tolerances must be positive")
        object.__setattr__(self, "q", q)

    @property
    def isotropic(self) -> bool:
        return self.q == 1.0


def as_context(ctx) -> DeformationContext:
    """Accept either a ``DeformationContext`` or a bare value of q."""
    if isinstance(ctx, DeformationContext):
        return ctx
    return DeformationContext(float(ctx))


def sign_phase(two_x: int) -> complex:
    """(-1)**x evaluated as exp(i*pi*x) for x = two_x / 2."""
    return (1.0, 1j, -1.0, -1j)[two_x % 4]


def _real_sign(two_x: int) -> int:
    if two_x % 2:
        raise ValueError(f"(-1)^({two_x}/2) is not real")
    return -1 if two_x % 4 else 1


def q_number(n, ctx) -> float:
    """q-number [n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2)).

    ``n`` may be any real (integers and half-integers in practice).  At q = 1
    the limit value n is returned exactly.
    """
    q = as_context(ctx).q
    if q == 1.0:
        return float(n)
    # sinh form avoids forming q^(-n/2) - q^(n/2) for large n by subtraction of
    # two huge numbers; identical to the quotient definition
    t = 0.5 * math.log(q)
    return math.sinh(n * t) / math.sinh(t)


def q_factorial(n: int, ctx) -> float:
    """[n]! = [1][2]...[n], with [0]! = 1."""
    if n < 0:
        raise ValueError("q_factorial is undefined for negative n")
    ctx = as_context(ctx)
    out = 1.0
    for k in range(2, n + 1):
        out *= q_number(k, ctx)
    return out


def _m_values(two_j: int) -> np.ndarray:
    """Doubled magnetic numbers -two_j, -two_j+2, ..., two_j."""
    return np.arange(-two_j, two_j + 1, 2)


@dataclass(frozen=True)
class SpinRep:
    """Matrices of J^z, J^+, J^- on a (2j+1)-dimensional spin-j space."""

    two_j: int
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray

    @property
    def dim(self) -> int:
        return self.jz.shape[0]

    def q_power_jz(self, ctx, power: float) -> np.ndarray:
        """Diagonal matrix q^(power * J^z)."""
        q = as_context(ctx).q
        return np.diag(q ** (power * np.diag(self.jz)))


def spin_rep(two_j: int, ctx) -> SpinRep:
    """Spin-j representation with J^+-|j,m> = sqrt([j-+m][j+-m+1]) |j,m+-1>."""
    if two_j < 0:
        raise ValueError("two_j must be non-negative")
    ctx = as_context(ctx)
    two_m = _m_values(two_j)
    dim = len(two_m)
    jz = np.diag(two_m / 2.0)
    jplus = np.zeros((dim, dim))
    for i in range(dim - 1):
        m = two_m[i] / 2.0
        j = two_j / 2.0
        jplus[i + 1, i] = math.sqrt(q_number(j - m, ctx) * q_number(j + m + 1, ctx))
    return SpinRep(two_j, jz, jplus, jplus.T.copy())


def coproduct_rep(rep1: SpinRep, rep2: SpinRep, ctx) -> SpinRep:
    """Total J^z, J^+- on the tensor product via the coproduct.

    The returned ``two_j`` is the largest spin in the product, ``two_j1 + two_j2``.
    """
    ctx = as_context(ctx)
    id1 = np.eye(rep1.dim)
    id2 = np.eye(rep2.dim)
    jz = np.kron(id1, rep2.jz) + np.kron(rep1.jz, id2)
    left = rep1.q_power_jz(ctx, -0.5)
    right = rep2.q_power_jz(ctx, 0.5)
    jplus = np.kron(left, rep2.jplus) + np.kron(rep1.jplus, right)
    jminus = np.kron(left, rep2.jminus) + np.kron(rep1.jminus, right)
    return SpinRep(rep1.two_j + rep2.two_j, jz, jplus, jminus)


def triangle(two_a: int, two_b: int, two_c: int) -> bool:
    """|a-b| <= c <= a+b with a+b+c integer."""
    if min(two_a, two_b, two_c) < 0:
        return False
    if (two_a + two_b + two_c) % 2:
        return False
    return abs(two_a - two_b) <= two_c <= two_a + two_b


@dataclass(frozen=True)
class QcgTable:
    """q-Clebsch-Gordan coefficients <j1 m1; j2 m2 | J M>_q for fixed j1, j2.

    ``vectors[two_J]`` is a (2J+1, 2j1+1, 2j2+1) array whose slice ``[k]``
    holds the product-basis amplitudes of |J, M> with M = -J + k.
    """

    two_j1: int
    two_j2: int
    vectors: Mapping[int, np.ndarray] = field(repr=False)

    def __call__(self, two_m1: int, two_m2: int, two_J: int, two_M: int) -> float:
        vec = self.vectors.get(two_J)
        if vec is None:
            return 0.0
        if abs(two_m1) > self.two_j1 or abs(two_m2) > self.two_j2 or abs(two_M) > two_J:
            return 0.0
        if (self.two_j1 + two_m1) % 2 or (self.two_j2 + two_m2) % 2 or (two_J + two_M) % 2:
            return 0.0
        return float(
            vec[(two_J + two_M) // 2, (self.two_j1 + two_m1) // 2, (self.two_j2 + two_m2) // 2]
        )

    @property
    def coefficients(self) -> Mapping[tuple[int, int, int, int], float]:
        """Nonzero entries keyed by (two_m1, two_m2, two_J, two_M)."""
        return MappingProxyType(dict(self.items()))

    def items(self) -> Iterator[tuple[tuple[int, int, int, int], float]]:
        for two_J in sorted(self.vectors, reverse=True):
            for two_M in _m_values(two_J):
                for two_m1 in _m_values(self.two_j1):
                    two_m2 = two_M - two_m1
                    if abs(two_m2) > self.two_j2:
                        continue
                    value = self(two_m1, two_m2, two_J, two_M)
                    if value != 0.0:
                        yield (int(two_m1), int(two_m2), two_J, int(two_M)), value

    def matrix(self) -> np.ndarray:
        """Unitary change of basis: rows are coupled states |J,M> (J descending,
        M ascending), columns the product basis |m1> (x) |m2>."""
        rows = [
            self.vectors[two_J][k].ravel()
            for two_J in sorted(self.vectors, reverse=True)
            for k in range(two_J + 1)
        ]
        return np.array(rows)


# q-CG tables are built in extended precision: lowering sums terms of both
# signs, and for small q the small coefficients of the lowest multiplets lose
# several digits to cancellation.
_EXT = np.longdouble


def _qnum_ext(n, half_log_q):
    if half_log_q == 0:
        return _EXT(n)
    return np.sinh(_EXT(n) * half_log_q) / np.sinh(half_log_q)


def _ladder_ext(two_j: int, half_log_q) -> np.ndarray:
    """sqrt([j+m][j-m+1]), the amplitude of J^-|j,m> on |j,m-1>, for m ascending."""
    j = _EXT(two_j) / 2
    out = [
        np.sqrt(_qnum_ext(j + _EXT(two_m) / 2, half_log_q) * _qnum_ext(j - _EXT(two_m) / 2 + 1, half_log_q))
        for two_m in range(-two_j, two_j + 1, 2)
    ]
    return np.array(out, dtype=_EXT)


def _highest_weight(two_j1: int, two_j2: int, two_J: int, q: float) -> np.ndarray:
    """|J, J> as a (2j1+1, 2j2+1) array from J^+|J, J> = 0.

    Matching the amplitude of each |m1+1, m2+1> gives a two-term recursion in
    m1, so every coefficient carries only a product of ratios (no subtractive
    cancellation).  The state is normalized with C(j1, j1; j2, J-j1 | J, J) > 0.
    """
    h = _EXT(0.5) * np.log(_EXT(q))
    qe = _EXT(q)
    # J^+ amplitude on |m> equals the J^- amplitude on |m+1>
    lad1, lad2 = _ladder_ext(two_j1, h), _ladder_ext(two_j2, h)
    d1, d2 = two_j1 + 1, two_j2 + 1
    lo = max(-two_j1, two_J - two_j2)
    vec = np.zeros((d1, d2), dtype=_EXT)
    c = _EXT(1)
    vec[(two_j1 + lo) // 2, (two_j2 + two_J - lo) // 2] = c
    for two_k in range(lo + 2, two_j1 + 1, 2):
        two_m2 = two_J - two_k
        a1 = lad1[(two_j1 + two_k) // 2]
        a2 = lad2[(two_j2 + two_m2) // 2 + 1]
        c = -c * a1 * qe ** (_EXT(two_m2 + 2 + two_k) / 4) / a2
        vec[(two_j1 + two_k) // 2, (two_j2 + two_m2) // 2] = c
    vec /= np.sqrt(np.sum(vec * vec))
    if c < 0:
        vec = -vec
    return vec


def _lower_ext(state: np.ndarray, lad1, lad2, pow1, pow2) -> np.ndarray:
    """Coproduct J^- = q^(-J1z/2) (x) J2^- + J1^- (x) q^(J2z/2) on a (d1, d2) array."""
    out = np.zeros_like(state)
    out[:, :-1] += pow1[:, None] * lad2[None, 1:] * state[:, 1:]
    out[:-1, :] += lad1[1:, None] * pow2[None, :] * state[1:, :]
    return out


@functools.lru_cache(maxsize=512)
def _upper_half(two_j1: int, two_j2: int, q: float) -> dict:
    """Coupled states |J, M> with M >= 0 by lowering from |J, J>.

    Keys are (two_J, two_M); values are (2j1+1, 2j2+1) float64 arrays.
    """
    h = _EXT(0.5) * np.log(_EXT(q))
    qe = _EXT(q)
    lad1, lad2 = _ladder_ext(two_j1, h), _ladder_ext(two_j2, h)
    pow1 = qe ** (-np.arange(-two_j1, two_j1 + 1, 2).astype(_EXT) / 4)
    pow2 = qe ** (np.arange(-two_j2, two_j2 + 1, 2).astype(_EXT) / 4)
    out = {}
    for two_J in range(two_j1 + two_j2, abs(two_j1 - two_j2) - 1, -2):
        state = _highest_weight(two_j1, two_j2, two_J, q)
        out[two_J, two_J] = state.astype(float)
        j = _EXT(two_J) / 2
        for two_M in range(two_J, 0, -2):
            m = _EXT(two_M) / 2
            norm = np.sqrt(_qnum_ext(j + m, h) * _qnum_ext(j - m + 1, h))
            state = _lower_ext(state, lad1, lad2, pow1, pow2) / norm
            out[two_J, two_M - 2] = state.astype(float)
    return out


@functools.lru_cache(maxsize=512)
def _qcg_cached(two_j1: int, two_j2: int, q: float) -> QcgTable:
    # Lowering all the way from M = J to M = -J loses relative accuracy in the
    # small coefficients once q^J is far from 1, so only M >= 0 is lowered and
    # M < 0 is read from the swapped table through
    #   <j1 m1; j2 m2 | J M> = <j2 -m2; j1 -m1 | J -M>.
    d1, d2 = two_j1 + 1, two_j2 + 1
    upper = _upper_half(two_j1, two_j2, q)
    swapped = _upper_half(two_j2, two_j1, q)
    vectors = {}
    for two_J in range(two_j1 + two_j2, abs(two_j1 - two_j2) - 1, -2):
        arr = np.empty((two_J + 1, d1, d2))
        for k, two_M in enumerate(range(-two_J, two_J + 1, 2)):
            if two_M >= 0:
                arr[k] = upper[two_J, two_M]
            else:
                # reverse both magnetic axes of the swapped (m2, m1) layout
                arr[k] = swapped[two_J, -two_M].T[::-1, ::-1]
        arr.setflags(write=False)
        vectors[two_J] = arr
    return QcgTable(two_j1, two_j2, MappingProxyType(vectors))


def qcg(two_j1: int, two_j2: int, ctx) -> QcgTable:
    """q-Clebsch-Gordan table for coupling j1 (x) j2."""
    if two_j1 < 0 or two_j2 < 0:
        raise ValueError("spins must be non-negative")
    return _qcg_cached(int(two_j1), int(two_j2), as_context(ctx).q)


def q6j(two_a: int, two_b: int, two_c: int, two_d: int, two_e: int, two_f: int, ctx) -> float:
    """Recoupling symbol {a b c; d e f}_q obtained by contracting q-CG tables.

    The layout is {D C B; J A K} for the recoupling of A (x) B (x) C with
    intermediate spins D = A+B, K = B+C and total J.  The symbol is read off

        sum_{b,d,k} <A a;B b|D d> <B -b;C c|K k> <D d;K k|J j> (-1)^(-b) q^(b/2)
            = (-1)^(A+B+C+J) sqrt([2D+1][2K+1]) {D C B; J A K} <A a;C c|J j>

    at the (a, c, j) where the right-hand q-CG coefficient is largest.
    """
    ctx = as_context(ctx)
    two_D, two_C, two_B, two_J, two_A, two_K = two_a, two_b, two_c, two_d, two_e, two_f
    if not (
        triangle(two_A, two_B, two_D)
        and triangle(two_B, two_C, two_K)
        and triangle(two_D, two_K, two_J)
        and triangle(two_A, two_C, two_J)
    ):
        return 0.0
    return _q6j_cached(two_D, two_C, two_B, two_J, two_A, two_K, ctx.q)


@functools.lru_cache(maxsize=4096)
def _q6j_cached(two_D, two_C, two_B, two_J, two_A, two_K, q) -> float:
    ctx = DeformationContext(q)
    ab_d = qcg(two_A, two_B, ctx)
    bc_k = qcg(two_B, two_C, ctx)
    dk_j = qcg(two_D, two_K, ctx)
    ac_j = qcg(two_A, two_C, ctx)
    target = ac_j.vectors[two_J]  # (2J+1, 2A+1, 2C+1)
    k_idx, a_idx, c_idx = np.unravel_index(np.argmax(np.abs(target)), target.shape)
    two_j = -two_J + 2 * k_idx
    two_a = -two_A + 2 * a_idx
    two_c = -two_C + 2 * c_idx
    total = 0.0 + 0.0j
    for two_b in _m_values(two_B):
        two_d = two_a + two_b
        two_k = two_j - two_d
        if abs(two_d) > two_D or abs(two_k) > two_K or two_k != -two_b + two_c:
            continue
        term = ab_d(two_a, two_b, two_D, two_d) * bc_k(-two_b, two_c, two_K, two_k)
        term *= dk_j(two_d, two_k, two_J, two_j)
        total += term * sign_phase(-two_b) * q ** (two_b / 4.0)
    norm = sign_phase(two_A + two_B + two_C + two_J) * math.sqrt(
        q_number(two_D + 1, ctx) * q_number(two_K + 1, ctx)
    )
    value = total / (norm * target[k_idx, a_idx, c_idx])
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise ArithmeticError(f"q6j contraction left an imaginary part {value.imag:g}")
    return float(value.real)


def f_element(two_D: int, two_C: int, two_B: int, two_J: int, two_A: int, two_K: int, ctx) -> float:
    """F-matrix element F_q[D C B J; A K] = (-1)^(D+B+J+C) sqrt([2K+1][2A+1]) {D C B; J A K}."""
    ctx = as_context(ctx)
    six = q6j(two_D, two_C, two_B, two_J, two_A, two_K, ctx)
    if six == 0.0:
        return 0.0
    sign = _real_sign(two_D + two_B + two_J + two_C)
    return sign * math.sqrt(q_number(two_K + 1, ctx) * q_number(two_A + 1, ctx)) * six


def write_qcg_csv(table: QcgTable, path_or_buf) -> None:
    """Dump a table as CSV: two_j1,two_m1,two_j2,two_m2,two_J,two_M,value."""
    import csv

    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["two_j1", "two_m1", "two_j2", "two_m2", "two_J", "two_M", "value"])
        for (two_m1, two_m2, two_J, two_M), value in table.items():
            writer.writerow(
                [table.two_j1, two_m1, table.two_j2, two_m2, two_J, two_M, format(value, ".15g")]
            )
    finally:
        if own:
            fh.close()
