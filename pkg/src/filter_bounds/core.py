"""Dense complex linear algebra and the Choi-matrix machinery.

Conventions used across the package:

* Choi matrices live on ``H_in (x) H_out``; the input factor comes first
  and partial traces are always over the input factor.
* Bases are ``(d, d)`` complex arrays whose ROWS are the basis states.
* Index conventions in phase formulas are 1-based, i.e. the Fourier basis
  uses phases ``exp(2i pi j k / d)`` with ``j, k = 1..d``, and the
  clock/shift constructions of :func:`maximally_entangled_basis` follow
  the same convention.  No rephasing is applied afterwards.
* Transposition (for the ``rho = d Tr_in(chi |psi><psi|^T (x) I)`` rule)
  is taken in the computational basis, the same basis that defines the
  maximally entangled reference state.
"""

from __future__ import annotations

import numpy as np

# Tolerances: constructions must hit 1e-12, validation checks allow 1e-10.
CONSTRUCTION_TOL = 1e-12
CHECK_TOL = 1e-10
KRAUS_TRACE_TOL = 1e-9


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def check_unit_vector(psi: np.ndarray, tol: float = CONSTRUCTION_TOL) -> None:
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state is not normalized: |<psi|psi> - 1| = {abs(nrm**2 - 1):.3e}")


def check_orthonormal(basis: np.ndarray, tol: float = CHECK_TOL) -> None:
    """Validate that the rows of ``basis`` form an orthonormal set."""
    basis = np.asarray(basis)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise ValueError(f"basis must be a square (d, d) array, got {basis.shape}")
    gram = basis.conj() @ basis.T
    err = np.max(np.abs(gram - np.eye(basis.shape[0])))
    if err > tol:
        raise ValueError(f"basis is not orthonormal: max |G - I| = {err:.3e}")


def check_hermitian(mat: np.ndarray, tol: float = CONSTRUCTION_TOL) -> None:
    err = np.max(np.abs(mat - dagger(mat)))
    if err > tol:
        raise ValueError(f"matrix is not Hermitian: max |A - A^+| = {err:.3e}")


def computational_basis(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def maximally_entangled_state(d: int) -> np.ndarray:
    """Return ``(1/sqrt(d)) sum_j |e_j>|e_j>`` in the computational basis."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def fourier_basis(basis: np.ndarray) -> np.ndarray:
    """Discrete-Fourier partner basis, ``f_k = d^{-1/2} sum_j e^{2i pi jk/d} e_j``.

    Indices j, k run 1..d in the phase factor.  The output is mutually
    unbiased with the input: all cross overlaps have modulus d^{-1/2}.
    """
    basis = np.asarray(basis, dtype=complex)
    check_orthonormal(basis)
    d = basis.shape[0]
    j = np.arange(1, d + 1)
    phases = np.exp(2j * np.pi * np.outer(j, j) / d)  # phases[k-1, j-1]
    return (phases @ basis) / np.sqrt(d)


def hadamard_product_basis(n: int) -> np.ndarray:
    """Basis ``{H^{(x)n} |k>}`` ordered by the binary index k."""
    if n < 1:
        raise ValueError(f"qubit count must be at least 1, got {n}")
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
    out = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        out = np.kron(out, h)
    # H^{(x)n} is symmetric, so row k equals the image of |k>.
    return out


def maximally_entangled_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d^2 maximally entangled states.

    Built from shift and clock operators acting on the input factor of the
    maximally entangled state: row ``j*d + k`` holds
    ``(Z^j W^k (x) I)|omega>`` with ``Z|e_a> = |e_{a+1 mod d}>`` and
    ``W|e_a> = exp(2i pi (a+1)/d)|e_a>`` (1-based phase convention).
    Row 0 is ``|omega>`` itself.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    omega = maximally_entangled_state(d)
    shift = np.zeros((d, d), dtype=complex)
    shift[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
    clock = np.diag(np.exp(2j * np.pi * (np.arange(d) + 1) / d))
    eye = np.eye(d, dtype=complex)
    out = np.empty((d * d, d * d), dtype=complex)
    zj = np.eye(d, dtype=complex)
    for j in range(d):
        op = zj.copy()
        for k in range(d):
            out[j * d + k] = np.kron(op, eye) @ omega
            op = op @ clock
        zj = shift @ zj
    return out


def choi_of_kraus(kraus: list[np.ndarray] | tuple[np.ndarray, ...]) -> np.ndarray:
    """Choi matrix ``sum_i (I (x) K_i)|omega><omega|(I (x) K_i^+)``.

    The map must be trace-nonincreasing: ``sum_i K_i^+ K_i <= I`` within
    1e-9, otherwise a ``ValueError`` is raised.
    """
    if len(kraus) == 0:
        raise ValueError("kraus list must be nonempty")
    mats = [np.asarray(k, dtype=complex) for k in kraus]
    d = mats[0].shape[0]
    for k in mats:
        if k.shape != (d, d):
            raise ValueError(f"all Kraus operators must be {d}x{d}, got {k.shape}")
    total = sum(dagger(k) @ k for k in mats)
    excess = np.max(np.linalg.eigvalsh(total - np.eye(d)))
    if excess > KRAUS_TRACE_TOL:
        raise ValueError(f"trace-increasing Kraus set: max eig(sum K^+K - I) = {excess:.3e}")
    chi = np.zeros((d * d, d * d), dtype=complex)
    for k in mats:
        v = k.T.reshape(-1) / np.sqrt(d)  # (I (x) K)|omega>
        chi += np.outer(v, v.conj())
    return 0.5 * (chi + dagger(chi))


def process_fidelity(chi: np.ndarray, chi_target: np.ndarray) -> float:
    """Normalized overlap ``Tr(chi chi_t) / (Tr chi * Tr chi_t)``."""
    tr_a = float(np.trace(chi).real)
    tr_b = float(np.trace(chi_target).real)
    if tr_a <= CONSTRUCTION_TOL or tr_b <= CONSTRUCTION_TOL:
        raise ValueError("degenerate channel: Choi matrix has (near-)zero trace")
    return float(np.trace(chi @ chi_target).real) / (tr_a * tr_b)


def output_state(chi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Unnormalized output ``d Tr_in(chi |psi><psi|^T (x) I)`` of a pure probe."""
    psi = np.asarray(psi, dtype=complex)
    d = psi.shape[0]
    if chi.shape != (d * d, d * d):
        raise ValueError(f"dimension mismatch: chi is {chi.shape}, probe dim {d}")
    chi4 = chi.reshape(d, d, d, d)
    rho = d * np.einsum("abcd,a,c->bd", chi4, psi, psi.conj())
    return 0.5 * (rho + dagger(rho))


def mutual_unbiasedness_error(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Max deviation of cross-overlap moduli from d^{-1/2}."""
    d = basis_a.shape[0]
    overlaps = np.abs(basis_a.conj() @ basis_b.T)
    return float(np.max(np.abs(overlaps - 1.0 / np.sqrt(d))))
