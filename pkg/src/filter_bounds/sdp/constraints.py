"""Linear data constraints for the fidelity semidefinite programs.

Every measured outcome yields one linear constraint on the normalized
Choi matrix A = chi / Tr(chi):

    Tr(A |m_j><m_j|^T (x) |n_jk><n_jk|) = f_jk / sum_lm f_lm,

with the normalization taken over the full table of the probe basis.  The
raw set is linearly dependent (the outcomes of one basis sum to the
normalization Tr(A) = 1), so constraints are pruned to an independent
subset by a greedy Gram-Schmidt pass in deterministic (basis, probe,
outcome) order; each d-dimensional probe basis then contributes d^2 - 1
independent rows on top of the trace normalization.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..probes import MeasurementRecord

INDEPENDENCE_TOL = 1e-8


@dataclass(frozen=True)
class ConstraintSet:
    """Hermitian constraint matrices with target values and provenance.

    Row 0 is always the trace normalization.  ``provenance[i]`` is a
    (role, probe, outcome) triple, with ("norm", -1, -1) for the
    normalization row.
    """

    matrices: np.ndarray  # (m, D, D) complex Hermitian
    values: np.ndarray    # (m,)
    provenance: tuple[tuple[str, int, int], ...]
    dim: int              # d (matrices act on D = d^2)

    @property
    def m(self) -> int:
        return self.matrices.shape[0]

    @property
    def data_count(self) -> int:
        return self.m - 1

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "values": self.values.tolist(),
            "provenance": [list(p) for p in self.provenance],
            "matrices_re": self.matrices.real.tolist(),
            "matrices_im": self.matrices.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data: dict) -> "ConstraintSet":
        mats = np.asarray(data["matrices_re"], dtype=float) + 1j * np.asarray(
            data["matrices_im"], dtype=float
        )
        return ConstraintSet(
            matrices=mats,
            values=np.asarray(data["values"], dtype=float),
            provenance=tuple(tuple(p) for p in data["provenance"]),
            dim=int(data["dim"]),
        )


def _vectorize(mat: np.ndarray) -> np.ndarray:
    return np.concatenate([mat.real.reshape(-1), mat.imag.reshape(-1)])


def assemble_constraints(
    records: Sequence[MeasurementRecord],
    roles: Sequence[str] | None = None,
) -> ConstraintSet:
    """Build the pruned constraint set from one or more measurement records.

    ``roles`` restricts the assembly to the named probe bases (e.g.
    ``("e",)``); by default every section of every record contributes.
    """
    if len(records) == 0:
        raise ValueError("at least one measurement record is required")
    d = records[0].ensemble.d
    big = d * d

    matrices: list[np.ndarray] = [np.eye(big, dtype=complex)]
    values: list[float] = [1.0]
    provenance: list[tuple[str, int, int]] = [("norm", -1, -1)]

    accepted: list[np.ndarray] = []
    norm_vec = _vectorize(matrices[0])
    accepted.append(norm_vec / np.linalg.norm(norm_vec))

    for record in records:
        if record.ensemble.d != d:
            raise ValueError("records mix different dimensions")
        for pset in record.ensemble.sections():
            if roles is not None and pset.role not in roles:
                continue
            table = record.tables[pset.role]
            total = float(table.sum())
            if total <= 0.0:
                raise ValueError(f"section {pset.role!r} carries no counts")
            for j in range(d):
                probe = pset.states[j]
                left = np.outer(probe.conj(), probe)  # (|m><m|)^T
                for k in range(d):
                    vec_out = pset.meas[j, k]
                    mat = np.kron(left, np.outer(vec_out, vec_out.conj()))
                    cand = _vectorize(mat)
                    for q in accepted:
                        cand = cand - q * (q @ cand)
                    resid = np.linalg.norm(cand)
                    if resid > INDEPENDENCE_TOL:
                        accepted.append(cand / resid)
                        matrices.append(mat)
                        values.append(table[j, k] / total)
                        provenance.append((pset.role, j, k))

    return ConstraintSet(
        matrices=np.array(matrices),
        values=np.array(values),
        provenance=tuple(provenance),
        dim=d,
    )


def max_violation(constraints: ConstraintSet, a_matrix: np.ndarray) -> float:
    """Largest absolute constraint violation of a candidate normalized Choi."""
    vals = np.einsum("kij,ji->k", constraints.matrices, a_matrix).real
    return float(np.max(np.abs(vals - constraints.values)))
