"""Probe-and-measure protocol simulation.

The protocol probes a channel with the states of two mutually unbiased
bases (e and f) plus, when the e basis is not the right-eigenbasis of the
target filter, a third auxiliary basis u.  Each output state is measured
in a basis that contains the ideal output of the target filter for that
probe as its first element; auxiliary probes are measured in the left
singular basis of the target so the mean-output correction term can be
estimated.

Exact mode stores the theoretical outcome probabilities; sampled mode
draws multinomial counts with a per-probe shot budget, with a "no click"
slot absorbing the failure probability of the filter.  RNG streams are
derived from (seed, section, probe) so results do not depend on
evaluation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import check_orthonormal, computational_basis, fourier_basis, output_state
from .filters import ZERO_WEIGHT_TOL, QuantumFilter, ZeroWeightError, ideal_output

PROB_CLIP_TOL = 1e-12
PARALLEL_DROP_TOL = 1e-8

_HAD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)

_SECTION_INDEX = {"e": 0, "f": 1, "u": 2}


class InsufficientDataError(ValueError):
    """A probe with nonzero ideal weight produced no counts in sampled mode."""


@dataclass(frozen=True)
class ProbeSet:
    """One basis worth of probes with their per-probe measurement bases."""

    role: str                 # "e" | "f" | "u"
    states: np.ndarray        # (d, d), rows are probe states
    meas: np.ndarray          # (d, d, d), meas[j] has measurement vectors as rows
    ideal_weights: np.ndarray  # (d,) target-side success probabilities
    labels: np.ndarray | None  # (d, d) int map from outcome to left-eigenvector index

    @property
    def d(self) -> int:
        return self.states.shape[0]


@dataclass(frozen=True)
class ProbeEnsemble:
    target: QuantumFilter
    kind: str                 # "product" | "eigen"
    e: ProbeSet
    f: ProbeSet
    u: ProbeSet | None

    @property
    def d(self) -> int:
        return self.target.d

    def sections(self) -> list[ProbeSet]:
        out = [self.e, self.f]
        if self.u is not None:
            out.append(self.u)
        return out


def complete_basis(first: np.ndarray | None, d: int) -> np.ndarray:
    """Deterministic Gram-Schmidt completion over computational candidates.

    Candidates that are near-parallel to the span built so far (residual
    norm below 1e-8) are dropped.
    """
    vecs: list[np.ndarray] = []
    if first is not None:
        vecs.append(np.asarray(first, dtype=complex))
    for i in range(d):
        if len(vecs) == d:
            break
        cand = np.zeros(d, dtype=complex)
        cand[i] = 1.0
        for v in vecs:
            cand = cand - v * (v.conj() @ cand)
        nrm = np.linalg.norm(cand)
        if nrm > PARALLEL_DROP_TOL:
            vecs.append(cand / nrm)
    if len(vecs) != d:
        raise ValueError("could not complete measurement basis")
    basis = np.array(vecs)
    check_orthonormal(basis)
    return basis


def _overlap_completed_set(role: str, target: QuantumFilter, states: np.ndarray) -> ProbeSet:
    """Measurement bases with the ideal output first, Gram-Schmidt completed.

    Probes the target filters to zero get a plain computational measurement
    basis; their overlap terms are excluded from the bounds.
    """
    d = target.d
    meas = np.empty((d, d, d), dtype=complex)
    weights = np.empty(d)
    for j in range(d):
        try:
            out, w = ideal_output(target, states[j])
        except ZeroWeightError:
            out, w = None, 0.0
        meas[j] = complete_basis(out, d)
        weights[j] = w
    return ProbeSet(role=role, states=states, meas=meas, ideal_weights=weights, labels=None)


def _eigen_measured_set(role: str, target: QuantumFilter, states: np.ndarray) -> ProbeSet:
    """Probes measured in the left singular basis of the target.

    The basis for probe j is reordered so that v_j comes first (for the
    eigenprobe choice states[j] = w_j the first vector is then the ideal
    output); ``labels`` records the left-eigenvector index of each outcome.
    """
    d = target.d
    meas = np.empty((d, d, d), dtype=complex)
    labels = np.empty((d, d), dtype=np.int64)
    weights = np.empty(d)
    for j in range(d):
        order = [j] + [l for l in range(d) if l != j]
        meas[j] = target.left[order]
        labels[j] = order
        weights[j] = target.weight(states[j])
    return ProbeSet(role=role, states=states, meas=meas, ideal_weights=weights, labels=labels)


def eigen_probe_ensemble(target: QuantumFilter) -> ProbeEnsemble:
    """Probe with the right singular basis of the target and its Fourier partner.

    The e probes are measured in the left singular basis, which doubles as
    the auxiliary record needed for the mean-output correction; no separate
    u basis is required.
    """
    e_states = target.right.copy()
    f_states = fourier_basis(e_states)
    e_set = _eigen_measured_set("e", target, e_states)
    f_set = _overlap_completed_set("f", target, f_states)
    return ProbeEnsemble(target=target, kind="eigen", e=e_set, f=f_set, u=None)


def product_probe_states(d: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """The two-qubit product probe bases |0+>,|0->,|1+>,|1-> and H(x)H images."""
    if d != 4:
        raise ValueError("product probes are defined for two qubits (d = 4)")
    comp = computational_basis(2)
    plus, minus = _HAD[0], _HAD[1]
    e = np.array([
        np.kron(comp[0], plus),
        np.kron(comp[0], minus),
        np.kron(comp[1], plus),
        np.kron(comp[1], minus),
    ])
    hh = np.kron(_HAD, _HAD)
    f = e @ hh.T  # f_j = (H (x) H) e_j
    return e, f


def product_probe_ensemble(target: QuantumFilter) -> ProbeEnsemble:
    """Product-state probes for two-qubit filters.

    The e/f pair are the Hadamard-related product bases; both are measured
    in per-probe bases holding the target's ideal output first.  The
    auxiliary u probes are the right singular basis of the target, measured
    in the left singular basis.
    """
    e_states, f_states = product_probe_states(target.d)
    e_set = _overlap_completed_set("e", target, e_states)
    f_set = _overlap_completed_set("f", target, f_states)
    u_set = _eigen_measured_set("u", target, target.right.copy())
    return ProbeEnsemble(target=target, kind="product", e=e_set, f=f_set, u=u_set)


def theoretical_probabilities(chi: np.ndarray, probe: np.ndarray, meas: np.ndarray) -> np.ndarray:
    """Outcome probabilities ``p_k = d Tr(chi |m><m|^T (x) |n_k><n_k|)``.

    Tiny negative values from roundoff (>= -1e-12) are clipped to zero;
    anything more negative indicates an invalid Choi matrix.
    """
    rho = output_state(chi, probe)
    p = np.einsum("kx,xy,ky->k", meas.conj(), rho, meas).real
    worst = float(p.min())
    if worst < -PROB_CLIP_TOL:
        raise ValueError(f"negative outcome probability {worst:.3e}: chi is not PSD")
    return np.clip(p, 0.0, None)


@dataclass(frozen=True)
class MeasurementRecord:
    """Measured outcome weights for every probe of an ensemble.

    ``tables[role][j, k]`` holds the probability (exact mode) or the count
    divided by shots (sampled mode) of outcome k for probe j.
    """

    mode: str                     # "exact" | "sampled"
    shots: int | None
    ensemble: ProbeEnsemble
    tables: dict[str, np.ndarray]

    def to_dict(self) -> dict:
        bases = []
        rows = []
        for pset in self.ensemble.sections():
            table = self.tables[pset.role]
            for j in range(pset.d):
                entry = {
                    "role": pset.role,
                    "probe_re": pset.states[j].real.tolist(),
                    "probe_im": pset.states[j].imag.tolist(),
                    "meas_re": pset.meas[j].real.tolist(),
                    "meas_im": pset.meas[j].imag.tolist(),
                    "ideal_weight": float(pset.ideal_weights[j]),
                }
                if pset.labels is not None:
                    entry["labels"] = pset.labels[j].tolist()
                bases.append(entry)
                rows.append(table[j].tolist())
        return {"mode": self.mode, "shots": self.shots, "bases": bases, "f": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def record_from_dict(data: dict, target: QuantumFilter) -> MeasurementRecord:
    """Rebuild a record (e.g. real experimental data) against a target filter."""
    d = target.d
    by_role: dict[str, list[dict]] = {}
    by_role_rows: dict[str, list[list[float]]] = {}
    for entry, row in zip(data["bases"], data["f"]):
        by_role.setdefault(entry["role"], []).append(entry)
        by_role_rows.setdefault(entry["role"], []).append(row)
    sets = {}
    tables = {}
    for role, entries in by_role.items():
        if len(entries) != d:
            raise ValueError(f"section {role!r} holds {len(entries)} probes, expected {d}")
        states = np.array([
            np.asarray(e["probe_re"], dtype=float) + 1j * np.asarray(e["probe_im"], dtype=float)
            for e in entries
        ])
        meas = np.array([
            np.asarray(e["meas_re"], dtype=float) + 1j * np.asarray(e["meas_im"], dtype=float)
            for e in entries
        ])
        labels = None
        if all("labels" in e for e in entries):
            labels = np.array([e["labels"] for e in entries], dtype=np.int64)
        weights = np.array([target.weight(s) for s in states])
        sets[role] = ProbeSet(role=role, states=states, meas=meas,
                              ideal_weights=weights, labels=labels)
        tables[role] = np.asarray(by_role_rows[role], dtype=float)
    if "e" not in sets or "f" not in sets:
        raise ValueError("record must contain at least the e and f probe sections")
    ensemble = ProbeEnsemble(target=target, kind="custom",
                             e=sets["e"], f=sets["f"], u=sets.get("u"))
    return MeasurementRecord(mode=data["mode"], shots=data.get("shots"),
                             ensemble=ensemble, tables=tables)


def run_ensemble(
    chi: np.ndarray,
    ensemble: ProbeEnsemble,
    shots: int | None = None,
    seed: int | None = None,
) -> MeasurementRecord:
    """Probe the channel ``chi`` with every state of the ensemble.

    With ``shots=None`` the exact outcome probabilities are stored; with a
    positive shot count, per-probe multinomial frequencies (counts/shots)
    are drawn instead, deterministically for a fixed seed.
    """
    if shots is not None and shots <= 0:
        raise ValueError(f"shots must be positive, got {shots}")
    entropy = np.random.SeedSequence().entropy if (shots is not None and seed is None) else seed
    tables: dict[str, np.ndarray] = {}
    for pset in ensemble.sections():
        d = pset.d
        table = np.empty((d, d))
        for j in range(d):
            p = theoretical_probabilities(chi, pset.states[j], pset.meas[j])
            if shots is None:
                table[j] = p
            else:
                fail = max(0.0, 1.0 - p.sum())
                pvec = np.append(p, fail)
                pvec /= pvec.sum()
                rng = np.random.default_rng([entropy, _SECTION_INDEX[pset.role], j])
                counts = rng.multinomial(shots, pvec)[:d]
                table[j] = counts / shots
        tables[pset.role] = table
    mode = "exact" if shots is None else "sampled"
    return MeasurementRecord(mode=mode, shots=shots, ensemble=ensemble, tables=tables)


@dataclass(frozen=True)
class ReducedStats:
    """Per-basis statistics consumed by the bound formulas."""

    probes: ProbeSet
    rel_success: np.ndarray      # P_j, sums to 1 over the basis
    overlaps: np.ndarray         # fraction of counts on the ideal-output vector
    included: np.ndarray         # probes with counts (terms that participate)
    cross: np.ndarray | None     # cross[j, l] = <v_l| rho~_j |v_l> when measured in v


def _reduce_section(pset: ProbeSet, table: np.ndarray, mode: str) -> ReducedStats:
    totals = table.sum(axis=1)
    grand = float(totals.sum())
    if grand <= 0.0:
        raise ValueError(f"section {pset.role!r} carries no counts")
    included = totals > 0.0
    if mode == "sampled":
        starved = ~included & (pset.ideal_weights > ZERO_WEIGHT_TOL)
        if np.any(starved):
            bad = np.nonzero(starved)[0].tolist()
            raise InsufficientDataError(
                f"section {pset.role!r}: probes {bad} have nonzero ideal weight but no counts"
            )
    rel = totals / grand
    overlaps = np.zeros(pset.d)
    overlaps[included] = table[included, 0] / totals[included]
    if np.max(overlaps) > 1.0 + 1e-10:
        raise ValueError(f"overlap estimate exceeds 1: {np.max(overlaps)}")
    cross = None
    if pset.labels is not None:
        cross = np.zeros((pset.d, pset.d))
        for j in range(pset.d):
            if included[j]:
                cross[j, pset.labels[j]] = table[j] / totals[j]
    return ReducedStats(probes=pset, rel_success=rel, overlaps=overlaps,
                        included=included, cross=cross)


def reduce(record: MeasurementRecord) -> dict[str, ReducedStats]:
    """Relative success probabilities and overlap estimates per probe basis.

    In exact mode a probe with zero total probability is simply dropped
    (its terms contribute exactly zero); in sampled mode zero counts for a
    probe with nonzero ideal weight raise :class:`InsufficientDataError`.
    """
    return {
        pset.role: _reduce_section(pset, record.tables[pset.role], record.mode)
        for pset in record.ensemble.sections()
    }
