import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qvbs.errors import NotHermitianError, SizeLimitError
from qvbs.oracle import (
    MAX_STATE_DIM,
    StateVector,
    build_vbs_state,
    crosscheck_rdm,
    hamiltonian_annihilation_check,
    hermitian_eigs,
    multiplet_projectors,
    oracle_spectrum,
    partial_trace,
    two_site_overlap,
)

# state vectors


def test_two_site_state():
    state = build_vbs_state(1, 2, 0.5)
    assert state.amplitudes.shape == (9,)
    assert state.norm > 0
    assert state.normalized().norm == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("S, L", [(1, 3), (1, 5), (2, 3), (2, 4), (3, 3)])
@pytest.mark.parametrize("q", [0.4, 1.0])
def test_amplitudes_need_zero_total_magnetization(S, L, q):
    amps = build_vbs_state(S, L, q).amplitudes
    d = 2 * S + 1
    for idx, ms in enumerate(itertools.product(range(-S, S + 1), repeat=L)):
        if sum(ms) != 0:
            assert amps[idx] == 0
    assert np.abs(amps).max() > 0
    assert idx == d**L - 1


def test_state_is_translation_invariant():
    S, L = 1, 5
    psi = build_vbs_state(S, L, 0.6).amplitudes.reshape((3,) * L)
    assert np.allclose(np.moveaxis(psi, 0, -1), psi, atol=1e-14)


def test_state_size_guard():
    with pytest.raises(SizeLimitError):
        build_vbs_state(1, 13, 0.5)  # 3^13 > 10^6
    with pytest.raises(SizeLimitError):
        build_vbs_state(3, 8, 0.5)
    assert 3**12 <= MAX_STATE_DIM
    with pytest.raises(SizeLimitError):
        build_vbs_state(1, 0, 0.5)


# projectors


@pytest.mark.parametrize("S", [1, 2, 3])
@pytest.mark.parametrize("q", [0.3, 0.7, 1.0])
def test_projector_invariants(S, q):
    ps = multiplet_projectors(S, q)
    d2 = (2 * S + 1) ** 2
    total = np.zeros((d2, d2))
    for s, P in ps.projectors.items():
        assert np.abs(P @ P - P).max() < 1e-10
        assert np.abs(P - P.conj().T).max() < 1e-10
        assert round(np.trace(P).real) == 2 * s + 1
        assert np.linalg.matrix_rank(P, tol=1e-8) == 2 * s + 1
        for t, R in ps.projectors.items():
            if t != s:
                assert np.abs(P @ R).max() < 1e-10
        total = total + P
    assert np.abs(total - np.eye(d2)).max() < 1e-10
    assert sorted(ps.hamiltonian_terms()) == list(range(S + 1, 2 * S + 1))


def test_isotropic_projectors_are_spin_projectors():
    # at q = 1, S1.S2 = sum_s [s(s+1) - 2 j(j+1)]/2 Pi_s
    S = 2
    ps = multiplet_projectors(S, 1.0)
    j = S
    m = np.arange(j, -j - 1, -1.0)
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1)
    jz = np.diag(m)
    jx, jy = (jp + jp.T) / 2, (jp - jp.T) / 2j
    dot = sum(np.kron(a, a) for a in (jx, jy, jz))
    ref = sum(0.5 * (s * (s + 1) - 2 * j * (j + 1)) * P for s, P in ps.projectors.items())
    # the projectors use ascending m; reverse both factors to compare
    perm = np.arange(25).reshape(5, 5)[::-1, ::-1].ravel()
    assert np.abs(ref[np.ix_(perm, perm)] - dot).max() < 1e-12


def test_spin_one_overlap_has_no_quintet():
    gg = two_site_overlap(1, 0.5)
    P2 = multiplet_projectors(1, 0.5).projectors[2]
    assert np.abs(np.einsum("ij,abj->abi", P2, gg)).max() < 1e-14


# Hamiltonian annihilation


@pytest.mark.parametrize(
    "S, L",
    [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 3), (3, 4)],
)
@pytest.mark.parametrize("q", [0.3, 0.7, 1.0])
def test_hamiltonian_annihilates_vbs(S, L, q):
    assert hamiltonian_annihilation_check(S, L, q) < 1e-10


def test_annihilation_examples():
    assert hamiltonian_annihilation_check(2, 4, 0.5) < 1e-10
    assert hamiltonian_annihilation_check(1, 6, 0.3) < 1e-10


def test_annihilation_detects_wrong_state():
    # a random state is not annihilated, so the check is not vacuous
    S, L, q = 1, 4, 0.5
    ps = multiplet_projectors(S, q).bond_hamiltonian()
    rng = np.random.default_rng(1)
    psi = rng.normal(size=3**L)
    from qvbs.oracle import _apply_bond

    assert np.linalg.norm(_apply_bond(psi, ps, 0, L, 3)) > 0.1


def test_annihilation_needs_two_sites():
    with pytest.raises(ValueError):
        hamiltonian_annihilation_check(1, 1, 0.5)


# partial trace


@pytest.mark.parametrize("S, L", [(1, 4), (1, 6), (2, 4)])
@pytest.mark.parametrize("q", [0.3, 1.0])
def test_partial_trace_is_a_density_matrix(S, L, q):
    state = build_vbs_state(S, L, q)
    for l in range(1, L):
        rho = partial_trace(state, l)
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho).min() > -1e-12
        # rank bound from the auxiliary space
        assert np.linalg.matrix_rank(rho, tol=1e-12) <= (S + 1) ** 2


def test_partial_trace_of_product_state_is_pure():
    a = np.array([1.0, 2.0, 0.5])
    b = np.array([0.0, 1.0, 1.0])
    state = StateVector(1, 2, np.kron(a, b))
    rho = partial_trace(state, 1)
    assert np.linalg.matrix_rank(rho, tol=1e-12) == 1
    assert np.allclose(rho, np.outer(a, a) / a.dot(a), atol=1e-15)


def test_full_trace_is_unit():
    state = build_vbs_state(1, 4, 0.6)
    assert np.trace(partial_trace(state, 4)).real == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("q", [0.4, 1.0])
def test_schmidt_symmetry(q):
    S, L = 1, 6
    state = build_vbs_state(S, L, q)

    def top(rho):
        w = np.sort(np.linalg.eigvalsh(rho))[::-1]
        return np.pad(w, (0, max(0, 4 - len(w))))[:4]

    for l in range(1, L):
        left, right = top(partial_trace(state, l)), top(partial_trace(state, L - l))
        assert np.abs(left - right).max() < 1e-12


def test_partial_trace_guards():
    state = build_vbs_state(2, 6, 0.5)
    with pytest.raises(SizeLimitError):
        partial_trace(state, 6)  # 5^6 > 4096
    with pytest.raises(ValueError):
        partial_trace(state, 0)


# Jacobi eigensolver


def test_jacobi_examples():
    w, V = hermitian_eigs(np.eye(4))
    assert np.allclose(w, 1.0)
    w, _ = hermitian_eigs(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(w, [-1.0, 2.0, 3.0], atol=1e-15)
    w, V = hermitian_eigs([[0, 1], [1, 0]])
    assert np.allclose(w, [-1.0, 1.0], atol=1e-15)
    w, _ = hermitian_eigs([[5.0]])
    assert w.tolist() == [5.0]


def test_jacobi_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eigs([[0, 1], [0, 0]])
    with pytest.raises(NotHermitianError):
        hermitian_eigs(np.ones((2, 3)))


def check_eigenpairs(A, w, V):
    norm = max(1.0, np.linalg.norm(A, 2))
    assert np.abs(A @ V - V * w).max() <= 1e-10 * norm
    assert np.abs(V.conj().T @ V - np.eye(len(w))).max() <= 1e-10
    assert np.all(np.diff(w) >= 0)


@given(
    re=arrays(np.float64, (7, 7), elements=st.floats(-10, 10)),
    im=arrays(np.float64, (7, 7), elements=st.floats(-10, 10)),
)
@settings(max_examples=60, deadline=None)
def test_jacobi_random_hermitian(re, im):
    M = re + 1j * im
    A = M + M.conj().T
    w, V = hermitian_eigs(A)
    check_eigenpairs(A, w, V)
    assert np.abs(w - np.linalg.eigvalsh(A)).max() <= 1e-10 * max(1.0, np.abs(A).max())


@given(n=st.integers(1, 12), seed=st.integers(0, 2**32 - 1), rank=st.integers(0, 12))
@settings(max_examples=60, deadline=None)
def test_jacobi_degenerate_spectra(n, seed, rank):
    # projectors and density-matrix-like inputs with repeated eigenvalues
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    d = np.zeros(n)
    d[: min(rank, n)] = 1.0
    A = (Q * d) @ Q.conj().T
    w, V = hermitian_eigs(A)
    check_eigenpairs(A, w, V)
    assert np.allclose(w, np.sort(d), atol=1e-12)


def test_jacobi_matches_reference_on_a_large_matrix():
    rng = np.random.default_rng(7)
    M = rng.normal(size=(81, 81))
    A = M + M.T
    w, V = hermitian_eigs(A)
    check_eigenpairs(A, w, V)
    assert np.abs(w - np.linalg.eigvalsh(A)).max() < 1e-10 * np.abs(A).max()


# cross-check against the transfer-matrix density matrices


@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("q", [0.4, 1.0])
def test_crosscheck_spin_one_examples(l, q):
    assert crosscheck_rdm(1, l, 8, q) < 1e-10


@pytest.mark.parametrize("l, q", [(2, 0.6), (3, 1.0)])
def test_crosscheck_spin_two_examples(l, q):
    assert crosscheck_rdm(2, l, 6, q) < 1e-10


GRID = [(1, L, l) for L in range(2, 9) for l in range(1, L)] + [(2, L, l) for L in range(2, 7) for l in range(1, L)]


@pytest.mark.parametrize("S, L, l", GRID)
@pytest.mark.parametrize("q", [0.3, 0.7, 1.0])
def test_crosscheck_grid(S, L, l, q):
    assert crosscheck_rdm(S, l, L, q) < 1e-10


@pytest.mark.parametrize("S, L", [(1, 8), (2, 6)])
def test_oracle_rank_bound(S, L):
    state = build_vbs_state(S, L, 0.7)
    for l in range(1, L):
        p = oracle_spectrum(state, l)
        assert np.sum(p > 1e-12) <= (S + 1) ** 2
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
