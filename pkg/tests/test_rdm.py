import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvbs.errors import NegativeEigenvalueError
from qvbs.mps import correlation_length, transfer_spectrum
from qvbs.oracle import build_vbs_state, oracle_spectrum
from qvbs.qalgebra import q_number
from qvbs.rdm import (
    BlockSpectrum,
    Level,
    ReducedDensityMatrix,
    group_levels,
    q_block,
    rdm_double_scaling,
    rdm_finite_block,
    rdm_finite_chain,
    sector_vbasis,
    spectrum_of,
)
from qvbs.spectra import cg_spin_one_zero, isotropic_p

spins = st.integers(1, 4)
qs = st.floats(0.1, 1.0)
lengths = st.integers(1, 9)


def _aux_sum(S):
    a = np.arange(-S, S + 1, 2) / 2
    return np.add.outer(a, a).ravel()


# -- Q blocks ----------------------------------------------------------------


@pytest.mark.parametrize("S", [1, 2, 3])
@pytest.mark.parametrize("q", [0.4, 1.0])
def test_q00_square_is_double_scaling_diagonal(S, q):
    Q = q_block(S, 0, 0, q).matrix
    assert np.abs(Q - np.diag(np.diag(Q))).max() == 0.0
    expected = q ** -_aux_sum(S) / q_number(S + 1, q) ** 2
    assert np.allclose(np.diag(np.kron(Q, Q)), expected, rtol=1e-13)


def test_q_block_selection_rule():
    for S in (1, 2, 3):
        for j in range(1, S + 1):
            for m in range(-j, j + 1):
                Q = q_block(S, 2 * j, 2 * m, 0.5).matrix
                if m != 0:
                    assert not np.diag(Q).any()
                rows, cols = np.nonzero(Q)
                assert np.all(cols - rows == m)


def test_q_block_rejects_bad_labels():
    with pytest.raises(ValueError):
        q_block(2, 6, 0, 0.5)
    with pytest.raises(ValueError):
        q_block(2, 2, 4, 0.5)


@pytest.mark.parametrize("S", [1, 2, 3, 4])
@pytest.mark.parametrize("q", [0.3, 0.5, 0.9])
def test_q10_diagonal_follows_spin_one_coefficient(S, q):
    # (Q_10)_aa / (Q_00)_aa is proportional to <S/2 a; 1 0 | S/2 a>_q
    diag = np.diag(q_block(S, 2, 0, q).matrix)
    closed = np.array([cg_spin_one_zero(S, two_a, q) for two_a in range(-S, S + 1, 2)])
    ratio = diag / (closed * q ** (-np.arange(-S, S + 1, 2) / 2))
    assert np.allclose(ratio, ratio[0], rtol=1e-12)


# -- double scaling ----------------------------------------------------------


@given(S=spins, q=qs)
@settings(max_examples=30, deadline=None)
def test_double_scaling_is_diagonal_with_unit_trace(S, q):
    rho = rdm_double_scaling(S, q)
    assert np.trace(rho.matrix) == pytest.approx(1.0, abs=1e-12)
    expected = q ** -_aux_sum(S) / q_number(S + 1, q) ** 2
    assert np.allclose(np.diag(rho.matrix), expected, rtol=1e-13)
    assert rho.l == math.inf and rho.L is None


@pytest.mark.parametrize("q", [0.1, 0.5, 0.8, 1.0])
def test_double_scaling_spin_two_values(q):
    p = spectrum_of(rdm_double_scaling(2, q)).values()
    ref = np.sort(np.array([q**2, q, q, 1, 1, 1, 1 / q, 1 / q, q**-2]) / (q + 1 + 1 / q) ** 2)[::-1]
    assert np.abs(p - ref).max() < 1e-12


def test_maximally_mixed_at_isotropy():
    for S in (1, 2, 5):
        spec = spectrum_of(rdm_double_scaling(S, 1.0))
        assert len(spec.levels) == 1
        assert spec.levels[0].degeneracy == (S + 1) ** 2
        assert spec.levels[0].p == pytest.approx(1 / (S + 1) ** 2, rel=1e-14)


def test_double_scaling_degeneracy_pattern():
    assert spectrum_of(rdm_double_scaling(2, 0.5)).degeneracies == (1, 2, 3, 2, 1)


# -- finite blocks -----------------------------------------------------------


@given(S=spins, q=qs, l=lengths)
@settings(max_examples=40, deadline=None)
def test_finite_block_invariants(S, q, l):
    rho = rdm_finite_block(S, l, q)
    m = rho.matrix
    assert np.trace(m) == pytest.approx(1.0, abs=1e-12)
    assert np.abs(m - m.conj().T).max() < 1e-12
    # block diagonal in the charge M
    labels = rho.sector_labels
    assert np.abs(m[labels[:, None] != labels[None, :]]).max(initial=0.0) == 0.0
    spec = spectrum_of(rho)
    assert spec.values().min() >= -1e-12
    assert spec.total == pytest.approx(1.0, abs=1e-12)
    # rank bound
    assert np.sum(spec.values() > 1e-12) <= (S + 1) ** 2
    # the Q-form matrix is similar to the symmetric one
    a = np.sort(np.linalg.eigvals(rho.q_form).real)
    b = np.sort(np.linalg.eigvalsh(m))
    assert np.abs(a - b).max() < 1e-10


@given(S=spins, q=qs, l=lengths)
@settings(max_examples=30, deadline=None)
def test_charge_reflection_symmetry(S, q, l):
    rho = rdm_finite_block(S, l, q)
    for M in range(1, S + 1):
        a = np.sort(np.linalg.eigvalsh(rho.sector(M)))
        b = np.sort(np.linalg.eigvalsh(rho.sector(-M)))
        assert np.abs(a - b).max() < 1e-10


@pytest.mark.parametrize("S", [1, 2, 3])
def test_long_blocks_approach_double_scaling(S):
    q = 0.6
    r = abs(transfer_spectrum(S, q).ratio(2))
    for l in (5, 10, 20):
        diff = np.abs(rdm_finite_block(S, l, q).matrix - rdm_double_scaling(S, q).matrix).max()
        assert diff <= r**l


def test_infinite_length_routes_to_double_scaling():
    a = rdm_finite_block(2, math.inf, 0.5)
    assert np.array_equal(a.matrix, rdm_double_scaling(2, 0.5).matrix)
    for bad in (0, -1, 2.5):
        with pytest.raises(ValueError):
            rdm_finite_block(2, bad, 0.5)


def test_spin_two_isotropic_length_two():
    p = spectrum_of(rdm_finite_block(2, 2, 1.0)).values()
    ref = sorted([isotropic_p(2, 2, J) for J in range(3) for _ in range(2 * J + 1)], reverse=True)
    assert np.abs(p - ref).max() < 1e-12


def test_spin_one_block_against_long_chain():
    # a chain of L >= l + 40 xi is indistinguishable from the infinite one at 1e-8
    q, l = 0.6, 3
    L = l + math.ceil(40 * correlation_length(1, q))
    block = spectrum_of(rdm_finite_block(1, l, q)).values()
    chain = spectrum_of(rdm_finite_chain(1, l, L, q)).values()
    assert np.abs(block - chain).max() < 1e-8
    # and the finite-chain construction itself equals brute force on a short ring
    oracle = oracle_spectrum(build_vbs_state(1, 8, q), l)[:4]
    short = spectrum_of(rdm_finite_chain(1, l, 8, q)).values()
    assert np.abs(oracle - short).max() < 1e-10


@pytest.mark.parametrize("S", [1, 2, 3])
def test_single_site_isotropic(S):
    p = spectrum_of(rdm_finite_block(S, 1, 1.0)).values()
    assert np.abs(p[: 2 * S + 1] - 1 / (2 * S + 1)).max() < 1e-12
    assert np.abs(p[2 * S + 1 :]).max() < 1e-12


def test_isotropic_dominant_multiplet_alternates():
    for l in range(2, 9):
        spec = spectrum_of(rdm_finite_block(2, l, 1.0))
        top = spec.levels[0]
        assert top.degeneracy == (5 if l % 2 else 1)


# -- sector basis ------------------------------------------------------------


@pytest.mark.parametrize("S", [1, 2, 3])
@pytest.mark.parametrize("q", [0.3, 0.7, 1.0])
@pytest.mark.parametrize("l", [1, 2, 5])
def test_sector_basis_spectra(S, q, l):
    rho = rdm_finite_block(S, l, q)
    for M in range(-S, S + 1):
        direct = np.sort(np.linalg.eigvalsh(rho.sector(M)))
        raw = np.sort(np.linalg.eigvals(sector_vbasis(S, l, M, q)).real)
        sym = sector_vbasis(S, l, M, q, symmetrize=True)
        assert np.abs(sym - sym.T).max() < 1e-13
        assert np.abs(direct - raw).max() < 1e-12
        assert np.abs(direct - np.sort(np.linalg.eigvalsh(sym))).max() < 1e-12


@pytest.mark.parametrize("S", [1, 2, 3])
@pytest.mark.parametrize("l", [1, 2, 3, 6])
def test_sector_basis_is_diagonal_at_isotropy(S, l):
    for M in range(-S, S + 1):
        X = sector_vbasis(S, l, M, 1.0)
        assert np.abs(X - np.diag(np.diag(X))).max() < 1e-12
        expected = [isotropic_p(S, l, J) for J in range(abs(M), S + 1)]
        assert np.allclose(np.diag(X), expected, atol=1e-12)


def test_sector_basis_rejects_bad_charge():
    with pytest.raises(ValueError):
        sector_vbasis(2, 2, 3, 0.5)


# -- finite chains -----------------------------------------------------------


@pytest.mark.parametrize("S, L", [(1, 2), (1, 5), (2, 3), (3, 4)])
@pytest.mark.parametrize("q", [0.4, 1.0])
def test_finite_chain_trace_and_hermiticity(S, L, q):
    for l in range(1, L):
        rho = rdm_finite_chain(S, l, L, q)
        assert np.trace(rho.matrix) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(rho.matrix - rho.matrix.conj().T).max() < 1e-12
        assert rho.L == L


def test_finite_chain_matches_brute_force():
    q, L, l = 0.5, 8, 3
    exact = spectrum_of(rdm_finite_chain(1, l, L, q)).values()
    oracle = oracle_spectrum(build_vbs_state(1, L, q), l)[: len(exact)]
    assert np.abs(exact - oracle).max() < 1e-10


@pytest.mark.parametrize("q", [0.4, 0.8, 1.0])
def test_finite_chain_converges_geometrically(q):
    S, l = 2, 2
    r = abs(transfer_spectrum(S, q).ratio(2))
    target = spectrum_of(rdm_finite_block(S, l, q)).values()
    for L in (8, 12, 16, 24):
        diff = np.abs(spectrum_of(rdm_finite_chain(S, l, L, q)).values() - target).max()
        assert diff <= 10 * r ** (L - l)


def test_finite_chain_rejects_bad_lengths():
    for l, L in [(0, 4), (4, 4), (5, 4)]:
        with pytest.raises(ValueError):
            rdm_finite_chain(1, l, L, 0.5)


# -- spectrum bookkeeping ----------------------------------------------------


def _wrap(matrix, S):
    return ReducedDensityMatrix(S, 1, 0.5, np.asarray(matrix, dtype=float))


def test_rank_one_input():
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    spec = spectrum_of(_wrap(m, 1))
    assert spec.nonzero().values().tolist() == [1.0]


def test_negative_eigenvalue_rejected():
    m = np.diag([0.6, 0.5, -1e-6, -0.1 + 1e-6])
    with pytest.raises(NegativeEigenvalueError):
        spectrum_of(_wrap(m, 1))
    tiny = np.diag([0.6, 0.4, -1e-13, 0.0])
    assert spectrum_of(_wrap(tiny, 1)).values().min() == 0.0


def test_grouping_keeps_raw_values():
    # values below the round-off floor of the largest one group together, but
    # each keeps its own value for entropy sums
    levels = group_levels([(1e-20, 0), (2e-20, 1), (0.5, 0), (0.5 + 1e-12, 1)], 1e-9)
    assert [lv.degeneracy for lv in levels] == [2, 2]
    assert sorted(levels[-1].raw()) == [1e-20, 2e-20]
    # above the floor the tolerance is relative
    levels = group_levels([(1e-3, 0), (1e-3 * (1 + 1e-6), 0)], 1e-9)
    assert [lv.degeneracy for lv in levels] == [1, 1]


def test_energies_and_entropies():
    spec = BlockSpectrum((Level(0.5, 1, (0,)), Level(0.25, 2, (-1, 1)), Level(0.0, 1, (0,))))
    assert spec.total == pytest.approx(1.0)
    assert spec.energies().tolist() == pytest.approx([math.log(2), math.log(4)])
    assert spec.energies(shifted=True).tolist() == pytest.approx([0.0, math.log(2)])
    assert spec.von_neumann() == pytest.approx(1.5 * math.log(2))
    assert spec.renyi(2) == pytest.approx(-math.log(0.375))
    assert spec.renyi(1) == spec.von_neumann()
    assert list(spec.by_sector()) == [(-1, 0.25, 1), (0, 0.5, 1), (0, 0.0, 1), (1, 0.25, 1)]
    with pytest.raises(ValueError):
        spec.renyi(0)
    assert Level(0.0, 1).epsilon == math.inf
