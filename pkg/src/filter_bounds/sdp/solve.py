"""Data-constrained fidelity extremization by semidefinite programming.

Maximizes and minimizes ``Delta * Tr(A |w_K><w_K|)`` over all normalized
channels A >= 0, Tr(A) = 1 consistent with the measured linear
constraints.  Complex Hermitian matrices are embedded as real symmetric
ones of doubled size, ``[[Re A, -Im A], [Im A, Re A]]``; traces double
under the embedding, so target values pick up a factor 2 and the
objective a factor 1/2.  Averaging any feasible real solution with its
symplectic conjugate recovers the embedding structure without changing
objective or feasibility, so the real and complex optima coincide.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..core import maximally_entangled_state
from ..filters import QuantumFilter
from .constraints import ConstraintSet, max_violation
from .ipm import STATUS_INFEASIBLE, STATUS_OPTIMAL, ipm_core, ipm_core_python

DEFAULT_TOL_GAP = 1e-7
DEFAULT_TOL_FEAS = 1e-8

_STATUS_NAMES = {0: "optimal", 1: "max-iter", 2: "infeasible"}


@dataclass(frozen=True)
class SdpSolution:
    value: float
    matrix: np.ndarray      # normalized Choi candidate A (complex Hermitian)
    gap: float
    iterations: int
    status: str
    max_violation: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "gap": self.gap,
            "iterations": self.iterations,
            "status": self.status,
            "max_violation": self.max_violation,
            "matrix_re": self.matrix.real.tolist(),
            "matrix_im": self.matrix.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def embed_hermitian(mat: np.ndarray) -> np.ndarray:
    """Real symmetric representation [[Re, -Im], [Im, Re]] of a Hermitian matrix."""
    big = mat.shape[0]
    out = np.empty((2 * big, 2 * big))
    out[:big, :big] = mat.real
    out[big:, big:] = mat.real
    out[:big, big:] = -mat.imag
    out[big:, :big] = mat.imag
    return out


def deembed_hermitian(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_hermitian`, averaging over the symplectic symmetry."""
    big = x.shape[0] // 2
    re = 0.5 * (x[:big, :big] + x[big:, big:])
    im = 0.5 * (x[big:, :big] - x[:big, big:])
    mat = re + 1j * im
    return 0.5 * (mat + mat.conj().T)


def _build_rows(constraints: ConstraintSet, slack: float):
    """Embedded constraint rows; interval slacks attach to data rows only."""
    big = constraints.matrices.shape[1]
    n = 2 * big
    base = [embed_hermitian(mat) for mat in constraints.matrices]
    values = [2.0 * v for v in constraints.values]
    if slack == 0.0:
        astack = np.array(base)
        b = np.array(values)
        blin = np.zeros((len(base), 0))
        clin = np.zeros(0)
        return astack, blin, b, clin
    if slack < 0.0:
        raise ValueError(f"slack must be nonnegative, got {slack}")
    ndata = constraints.m - 1
    p = 2 * ndata
    rows = constraints.m + ndata
    astack = np.zeros((rows, n, n))
    blin = np.zeros((rows, p))
    b = np.zeros(rows)
    astack[0] = base[0]
    b[0] = values[0]
    eps2 = 2.0 * slack  # embedded-scale half width
    for q in range(ndata):
        i = q + 1
        astack[i] = base[i]
        blin[i, 2 * q] = 1.0
        b[i] = values[i] + eps2
        cap = constraints.m + q
        blin[cap, 2 * q] = 1.0
        blin[cap, 2 * q + 1] = 1.0
        b[cap] = 2.0 * eps2
    clin = np.zeros(p)
    return astack, blin, b, clin


def solve_bounds(
    constraints: ConstraintSet,
    target: QuantumFilter,
    slack: float = 0.0,
    max_iter: int = 200,
    tol_gap: float = DEFAULT_TOL_GAP,
    tol_feas: float = DEFAULT_TOL_FEAS,
    use_numba: bool = True,
) -> tuple[SdpSolution, SdpSolution]:
    """Extremal fidelities (lower, upper) consistent with the constraints."""
    d = target.d
    if constraints.dim != d:
        raise ValueError(f"constraint dimension {constraints.dim} != target dimension {d}")
    omega = maximally_entangled_state(d)
    omega_k = np.kron(np.eye(d, dtype=complex), target.kraus) @ omega
    objective = np.outer(omega_k, omega_k.conj())
    cmat = 0.5 * target.delta * embed_hermitian(objective)

    astack, blin, b, clin = _build_rows(constraints, slack)
    core = ipm_core if use_numba else ipm_core_python

    solutions = []
    for sign in (1.0, -1.0):
        x, _u, _y, _s, _z, iters, gap, pres, _dres, status = core(
            astack, blin, b, sign * cmat, clin, max_iter, tol_gap, tol_feas
        )
        a_mat = deembed_hermitian(x)
        tr = float(np.trace(a_mat).real)
        if tr > 0:
            a_mat = a_mat / tr
        value = float(np.sum(cmat * x))
        viol = max_violation(constraints, a_mat)
        if status == STATUS_INFEASIBLE:
            viol = max(viol, float(pres))
        solutions.append(
            SdpSolution(
                value=value,
                matrix=a_mat,
                gap=float(gap),
                iterations=int(iters),
                status=_STATUS_NAMES[int(status)],
                max_violation=float(viol),
            )
        )
    lower, upper = solutions
    return lower, upper


def unconstrained_maximum(target: QuantumFilter) -> float:
    """Largest objective value subject only to Tr(A) = 1 (direct eigenvalue)."""
    d = target.d
    omega = maximally_entangled_state(d)
    omega_k = np.kron(np.eye(d, dtype=complex), target.kraus) @ omega
    objective = np.outer(omega_k, omega_k.conj())
    return float(target.delta * np.linalg.eigvalsh(objective).max())


def is_optimal(sol: SdpSolution) -> bool:
    return sol.status == _STATUS_NAMES[STATUS_OPTIMAL]
