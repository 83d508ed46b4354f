"""Positivity certificates for the operator inequalities behind the bounds.

Every bound in :mod:`filter_bounds.bounds` follows from the positive
semidefiniteness of the witness operator

    R = |omega><omega| - sum_j |e_j><e_j|^T (x) |e_j><e_j|
                       - sum_k |f_k><f_k|^T (x) |f_k><f_k| + I (x) I

for the probe pair (e, f).  For a Fourier pair, R equals the sum of all
maximally entangled basis projectors with both indices >= 2, hence has
spectrum {0, 1} and rank (d-1)^2.  For the computational/Hadamard pair on
n qubits, regrouping input and output qubits pairwise block-diagonalizes R
in the Bell-product basis, with a zero eigenspace of dimension 2^(n+1)-1.
This module verifies those statements numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import (
    check_orthonormal,
    computational_basis,
    fourier_basis,
    hadamard_product_basis,
    maximally_entangled_basis,
    maximally_entangled_state,
)

EIGENVALUE_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class WitnessReport:
    min_eigenvalue: float
    zero_space_dim: int
    spectrum_histogram: dict[float, int]

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "zero_space_dim": self.zero_space_dim,
            "spectrum_histogram": {str(k): v for k, v in self.spectrum_histogram.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _histogram(eigs: np.ndarray) -> dict[float, int]:
    hist: dict[float, int] = {}
    for v in np.round(eigs, 9):
        key = float(v) + 0.0  # normalize -0.0
        hist[key] = hist.get(key, 0) + 1
    return hist


def spectrum_report(mat: np.ndarray) -> WitnessReport:
    eigs = np.linalg.eigvalsh(mat)
    return WitnessReport(
        min_eigenvalue=float(eigs.min()),
        zero_space_dim=int(np.sum(np.abs(eigs) <= EIGENVALUE_ZERO_TOL)),
        spectrum_histogram=_histogram(eigs),
    )


def _transposed_projector(state: np.ndarray) -> np.ndarray:
    return np.outer(state.conj(), state)


def witness_operator(e_basis: np.ndarray, f_basis: np.ndarray) -> np.ndarray:
    """The Hermitian witness R for a probe basis pair."""
    e_basis = np.asarray(e_basis, dtype=complex)
    f_basis = np.asarray(f_basis, dtype=complex)
    if e_basis.shape != f_basis.shape:
        raise ValueError(f"dimension mismatch: {e_basis.shape} vs {f_basis.shape}")
    check_orthonormal(e_basis)
    check_orthonormal(f_basis)
    d = e_basis.shape[0]
    omega = maximally_entangled_state(d)
    r = np.outer(omega, omega.conj()) + np.eye(d * d, dtype=complex)
    for j in range(d):
        r -= np.kron(_transposed_projector(e_basis[j]), np.outer(e_basis[j], e_basis[j].conj()))
        r -= np.kron(_transposed_projector(f_basis[j]), np.outer(f_basis[j], f_basis[j].conj()))
    return 0.5 * (r + r.conj().T)


def bell_diagonal_witness(d: int) -> np.ndarray:
    """R rebuilt as the projector sum over entangled-basis indices j, k >= 2.

    Matches :func:`witness_operator` of the computational/Fourier pair
    elementwise.
    """
    meb = maximally_entangled_basis(d)
    r = np.zeros((d * d, d * d), dtype=complex)
    for j in range(1, d):
        for k in range(1, d):
            state = meb[j * d + k]
            r += np.outer(state, state.conj())
    return r


def fourier_witness(d: int) -> np.ndarray:
    comp = computational_basis(d)
    return witness_operator(comp, fourier_basis(comp))


def _interleave_permutation(n: int) -> np.ndarray:
    """Index permutation grouping the m-th input and output qubits.

    Maps |j_1..j_n>|k_1..k_n> to |j_1 k_1>...|j_n k_n>.
    """
    dim = 4**n
    perm = np.empty(dim, dtype=np.int64)
    for j in range(2**n):
        for k in range(2**n):
            src = (j << n) | k
            dst = 0
            for m in range(n):
                jm = (j >> (n - 1 - m)) & 1
                km = (k >> (n - 1 - m)) & 1
                dst = (dst << 2) | (jm << 1) | km
            perm[src] = dst
    return perm


_BELL_SINGLE = np.array(
    [
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, -1.0],
        [1.0, -1.0, 0.0, 0.0],
    ],
    dtype=complex,
).T / np.sqrt(2.0)  # columns: Phi+, Phi-, Psi+, Psi-


def hadamard_witness_spectrum(n: int) -> WitnessReport:
    """Spectrum of R for the computational/Hadamard pair on n qubits.

    Conjugates R by the qubit-regrouping permutation, checks the result is
    diagonal in the Bell-product basis, and reports the {0, 1} spectrum
    with its 2^(n+1)-1 dimensional zero space.
    """
    if not 1 <= n <= 3:
        raise ValueError(f"qubit count must lie in 1..3, got {n}")
    d = 2**n
    comp = computational_basis(d)
    r = witness_operator(comp, hadamard_product_basis(n))
    perm = _interleave_permutation(n)
    inv = np.argsort(perm)
    grouped = r[np.ix_(inv, inv)]
    bell = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        bell = np.kron(bell, _BELL_SINGLE)
    diag_form = bell.conj().T @ grouped @ bell
    off = diag_form - np.diag(np.diag(diag_form))
    max_off = float(np.max(np.abs(off)))
    if max_off > EIGENVALUE_ZERO_TOL:
        raise AssertionError(f"regrouped witness not Bell-product diagonal: {max_off:.3e}")
    eigs = np.sort(np.diag(diag_form).real)
    bad = np.min(np.abs(eigs[:, None] - np.array([0.0, 1.0])[None, :]), axis=1)
    if np.max(bad) > EIGENVALUE_ZERO_TOL:
        raise AssertionError("witness spectrum is not contained in {0, 1}")
    return WitnessReport(
        min_eigenvalue=float(eigs.min()),
        zero_space_dim=int(np.sum(np.abs(eigs) <= EIGENVALUE_ZERO_TOL)),
        spectrum_histogram=_histogram(eigs),
    )


def upper_bound_witnesses(d: int) -> tuple[float, float]:
    """Minimum eigenvalues of the two projector-sum differences.

    These certify the pair of upper bounds:
    ``sum_j |w_{j1}><w_{j1}| - |w_{11}><w_{11}|`` and the analogous sum
    over the second index, both PSD by projector counting.
    """
    meb = maximally_entangled_basis(d)
    first = meb[0]
    base = -np.outer(first, first.conj())
    a = base.copy()
    for j in range(d):
        state = meb[j * d]
        a += np.outer(state, state.conj())
    b = base.copy()
    for k in range(d):
        state = meb[k]
        b += np.outer(state, state.conj())
    return (
        float(np.linalg.eigvalsh(a).min()),
        float(np.linalg.eigvalsh(b).min()),
    )


def filtered_witness_min_eig(r: np.ndarray, kraus: np.ndarray) -> float:
    """Min eigenvalue of (I (x) K) R (I (x) K^+), nonnegative when R >= 0."""
    d = kraus.shape[0]
    op = np.kron(np.eye(d, dtype=complex), kraus)
    return float(np.linalg.eigvalsh(op @ r @ op.conj().T).min())
