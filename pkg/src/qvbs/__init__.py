"""Entanglement of the q-deformed valence-bond-solid chain.

Spins are passed as doubled integers (``two_j = 2j``) wherever half-integers
can occur; the site spin S and block lengths are plain integers.
"""
from .errors import (
    AnalyticMismatchError,
    NegativeEigenvalueError,
    NotHermitianError,
    SizeLimitError,
    ValidityWarning,
)
from .mps import correlation_length, g_matrix, transfer_matrix, transfer_spectrum
from .oracle import (
    build_vbs_state,
    crosscheck_rdm,
    hamiltonian_annihilation_check,
    hermitian_eigs,
    multiplet_projectors,
    partial_trace,
)
from .qalgebra import DeformationContext, f_element, q6j, q_factorial, q_number, qcg
from .rdm import (
    rdm_double_scaling,
    rdm_finite_block,
    rdm_finite_chain,
    sector_vbasis,
    spectrum_of,
)
from .spectra import (
    effective_model_dsl,
    effective_model_iso,
    entropy_large_S,
    isotropic_eigs,
    perturbative_eigs,
    renyi_dsl,
    renyi_finite_correction,
    vn_dsl,
)

__all__ = [
    "AnalyticMismatchError",
    "DeformationContext",
    "NegativeEigenvalueError",
    "NotHermitianError",
    "SizeLimitError",
    "ValidityWarning",
    "build_vbs_state",
    "correlation_length",
    "crosscheck_rdm",
    "effective_model_dsl",
    "effective_model_iso",
    "entropy_large_S",
    "f_element",
    "g_matrix",
    "hamiltonian_annihilation_check",
    "hermitian_eigs",
    "isotropic_eigs",
    "multiplet_projectors",
    "partial_trace",
    "perturbative_eigs",
    "q6j",
    "q_factorial",
    "q_number",
    "qcg",
    "rdm_double_scaling",
    "rdm_finite_block",
    "rdm_finite_chain",
    "renyi_dsl",
    "renyi_finite_correction",
    "sector_vbasis",
    "spectrum_of",
    "transfer_matrix",
    "transfer_spectrum",
    "vn_dsl",
]

__version__ = "0.1.0"
