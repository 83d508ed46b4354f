"""Analytical process-fidelity bounds for quantum filters.

The lower bound generalizes the Hofmann bound F >= F1 + F2 - 1 for unitary
targets: the plain averages of output-state fidelities over two mutually
unbiased probe bases become weighted averages, and the constant -1 becomes
a correction term built from the mean output state of the channel and the
left singular spectrum of the target,

    F >= sum_j p_j <e~_j|rho~_j|e~_j> + sum_k q_k <f~_k|xi~_k|f~_k>
         - Delta * sum_{j,l} lambda_l R_j <v_l|zeta~_j|v_l>,

with p_j = Delta P_j <e_j|K^+K|e_j>, q_k = Delta Q_k <f_k|K^+K|f_k> and
Delta = d / Tr(K^+K).  Terms whose target-side weight is zero are dropped.
When the e basis is the right singular basis of the target, the e record
doubles as the auxiliary record and the whole expression collapses to

    F >= sum_k Q_k <f~_k|xi~_k|f~_k>
         - sum_{j != l} (lambda_l / lambda_bar) P_j <v_l|rho~_j|v_l>,

which evaluates to exactly 1 for a perfectly implemented filter.  The two
weighted sums are individually valid upper bounds on F.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .filters import ZERO_WEIGHT_TOL, QuantumFilter
from .probes import ReducedStats

EIGENBASIS_TOL = 1e-8


class MissingAuxiliaryRecordError(ValueError):
    """No auxiliary stats and the e basis is not the target's right eigenbasis."""


class MissingCrossOverlapsError(ValueError):
    """Stats lack the left-eigenbasis cross-overlap table."""


def hofmann_unitary_bounds(f1: float, f2: float) -> tuple[float, float]:
    """Classic bounds for unitary targets: (F1 + F2 - 1, min(F1, F2)).

    The lower bound may be negative and is reported as-is.
    """
    for name, v in (("F1", f1), ("F2", f2)):
        if not 0.0 <= v <= 1.0 + 1e-12:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return f1 + f2 - 1.0, min(f1, f2)


def _is_right_eigenbasis(target: QuantumFilter, states: np.ndarray) -> bool:
    """Check ||K e_j - sqrt(lambda_j) v_j|| <= tol against the stored SVD."""
    k = target.kraus
    for j in range(target.d):
        resid = np.linalg.norm(k @ states[j] - target.root_values[j] * target.left[j])
        if resid > EIGENBASIS_TOL:
            return False
    return True


def mean_output_correction(target: QuantumFilter, aux_stats: ReducedStats) -> float:
    """Estimate of Tr(K K^+ Omega~), the filtered mean-output overlap.

    Computed from the auxiliary record as
    ``sum_{j,l} lambda_l R_j <v_l|zeta~_j|v_l>``; requires the probes to
    have been measured in the left singular basis of the target.
    """
    if aux_stats.cross is None:
        raise MissingCrossOverlapsError(
            "auxiliary record lacks left-eigenbasis cross overlaps"
        )
    lam = target.lam
    return float(aux_stats.rel_success @ (aux_stats.cross @ lam))


def _weighted_overlap_sum(target: QuantumFilter, stats: ReducedStats) -> float:
    """sum_j Delta P_j <e_j|K^+K|e_j> <e~_j|rho~_j|e~_j>, zero-weight terms dropped."""
    w = stats.probes.ideal_weights
    keep = stats.included & (w > ZERO_WEIGHT_TOL)
    return float(target.delta * np.sum(stats.rel_success[keep] * w[keep] * stats.overlaps[keep]))


def general_lower_bound(
    target: QuantumFilter,
    e_stats: ReducedStats,
    f_stats: ReducedStats,
    u_stats: ReducedStats | None = None,
) -> float:
    """Weighted two-basis lower bound on the process fidelity.

    ``u_stats`` may be omitted only when the e basis is the right
    eigenbasis of the target, in which case the e record is reused for the
    correction term.
    """
    if u_stats is None:
        if not _is_right_eigenbasis(target, e_stats.probes.states):
            raise MissingAuxiliaryRecordError(
                "auxiliary stats required: e basis is not the right eigenbasis of the target"
            )
        u_stats = e_stats
    correction = mean_output_correction(target, u_stats)
    return (
        _weighted_overlap_sum(target, e_stats)
        + _weighted_overlap_sum(target, f_stats)
        - target.delta * correction
    )


def eigenprobe_lower_bound(
    target: QuantumFilter,
    e_stats: ReducedStats,
    f_stats: ReducedStats,
) -> float:
    """Tight lower bound for eigenbasis probes.

    Requires e probes equal to the right singular basis (in SVD order) and
    measured in the left singular basis.  Agrees with
    :func:`general_lower_bound` on the same data and equals 1 for a
    perfectly implemented filter.
    """
    if not _is_right_eigenbasis(target, e_stats.probes.states):
        raise ValueError("e basis is not the right eigenbasis of the target")
    if e_stats.cross is None:
        raise MissingCrossOverlapsError("e record lacks left-eigenbasis cross overlaps")
    lam = target.lam
    lam_bar = target.lambda_bar
    f_term = float(np.sum(f_stats.rel_success[f_stats.included]
                          * f_stats.overlaps[f_stats.included]))
    cross_term = e_stats.rel_success @ (e_stats.cross @ lam)
    diag_term = np.sum(e_stats.rel_success * np.diag(e_stats.cross) * lam)
    return f_term - float(cross_term - diag_term) / lam_bar


def upper_bounds(
    target: QuantumFilter,
    e_stats: ReducedStats,
    f_stats: ReducedStats,
) -> tuple[float, float]:
    """The pair of weighted-average upper bounds (e side, f side).

    With eigenbasis probes the e side specializes to
    ``sum_j (lambda_j/lambda_bar) P_j <v_j|rho~_j|v_j>``; the f side is
    exactly 1 for a perfect filter, the e side generally is not (its value
    at a perfect channel is ``sum lambda^2 / (d lambda_bar^2) >= 1``), so
    the effective bound is the minimum of the pair.
    """
    return _weighted_overlap_sum(target, e_stats), _weighted_overlap_sum(target, f_stats)


@dataclass(frozen=True)
class BoundsReport:
    """Analytical bounds with the components needed to audit them."""

    lower: float
    upper_e: float
    upper_f: float
    provenance: str              # "general" | "eigenprobe"
    components: dict = field(default_factory=dict)

    @property
    def upper(self) -> float:
        return min(self.upper_e, self.upper_f)

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper_e": self.upper_e,
            "upper_f": self.upper_f,
            "provenance": self.provenance,
            "components": self.components,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def bounds_report(
    target: QuantumFilter,
    stats: dict[str, ReducedStats],
) -> BoundsReport:
    """Evaluate all analytical bounds on reduced statistics.

    Picks the eigenprobe formula when the e record was measured in the
    left eigenbasis of an eigenbasis probe set, otherwise the general
    formula with the auxiliary record.
    """
    e_stats, f_stats = stats["e"], stats["f"]
    u_stats = stats.get("u")
    eigen = e_stats.cross is not None and _is_right_eigenbasis(target, e_stats.probes.states)
    if eigen:
        lower = eigenprobe_lower_bound(target, e_stats, f_stats)
        provenance = "eigenprobe"
        correction = mean_output_correction(target, e_stats)
    else:
        lower = general_lower_bound(target, e_stats, f_stats, u_stats)
        provenance = "general"
        correction = mean_output_correction(target, u_stats if u_stats is not None else e_stats)
    up_e, up_f = upper_bounds(target, e_stats, f_stats)
    delta = target.delta
    we = e_stats.probes.ideal_weights
    wf = f_stats.probes.ideal_weights
    components = {
        "delta": delta,
        "lambda_bar": target.lambda_bar,
        "p_weights": (delta * e_stats.rel_success * we).tolist(),
        "q_weights": (delta * f_stats.rel_success * wf).tolist(),
        "e_term": up_e,
        "f_term": up_f,
        "correction": correction,
        "correction_term": delta * correction,
    }
    return BoundsReport(lower=lower, upper_e=up_e, upper_f=up_f,
                        provenance=provenance, components=components)
