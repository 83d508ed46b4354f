"""Quantum filters (single-Kraus probabilistic operations) and mixtures.

A filter is stored together with its singular value decomposition
``K = sum_l sqrt(lambda_l) |v_l><w_l|``; the left/right singular bases are
what the eigenprobe bound construction and the mean-output correction term
consume.  The decomposition is made deterministic by a descending sort
with a lexicographic tie-break and a phase convention that makes the
largest-magnitude entry of each left vector real positive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import choi_of_kraus, dagger

# Probe weights below this threshold count as exactly zero and the
# corresponding terms are dropped from bound sums.
ZERO_WEIGHT_TOL = 1e-12
SPECTRAL_NORM_TOL = 1e-9
SVD_RECONSTRUCTION_TOL = 1e-10


class ZeroWeightError(ValueError):
    """Probe state is filtered to zero: success probability below threshold."""


@dataclass(frozen=True)
class QuantumFilter:
    """Kraus operator with cached singular value decomposition."""

    kraus: np.ndarray        # (d, d) complex
    root_values: np.ndarray  # sqrt(lambda_l), descending
    left: np.ndarray         # rows are output singular vectors v_l
    right: np.ndarray        # rows are input singular vectors w_l

    @property
    def d(self) -> int:
        return self.kraus.shape[0]

    @property
    def lam(self) -> np.ndarray:
        """Eigenvalues lambda_l of K^+K (squared singular values)."""
        return self.root_values**2

    @property
    def lambda_bar(self) -> float:
        return float(np.sum(self.lam)) / self.d

    @property
    def delta(self) -> float:
        """Normalization factor d / Tr(K^+K) = 1 / Tr(choi)."""
        total = float(np.sum(self.lam))
        if total <= ZERO_WEIGHT_TOL:
            raise ZeroWeightError("filter is (numerically) zero")
        return self.d / total

    def weight(self, psi: np.ndarray) -> float:
        """Success probability <psi|K^+K|psi> of a unit probe state."""
        return float(np.linalg.norm(self.kraus @ psi) ** 2)

    def choi(self) -> np.ndarray:
        return choi_of_kraus([self.kraus])

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "re": self.kraus.real.tolist(),
            "im": self.kraus.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data: dict) -> "QuantumFilter":
        k = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if k.shape != (data["d"], data["d"]):
            raise ValueError(f"filter entries have shape {k.shape}, expected d={data['d']}")
        return quantum_filter(k)

    @staticmethod
    def from_json(text: str) -> "QuantumFilter":
        return QuantumFilter.from_dict(json.loads(text))


def quantum_filter(kraus: np.ndarray) -> QuantumFilter:
    """Build a :class:`QuantumFilter`, validating physicality.

    The spectral norm must not exceed 1 (success probability <= 1).
    """
    kraus = np.asarray(kraus, dtype=complex)
    d = kraus.shape[0]
    if kraus.shape != (d, d):
        raise ValueError(f"Kraus operator must be square, got {kraus.shape}")
    u, s, vh = np.linalg.svd(kraus)
    if s[0] > 1.0 + SPECTRAL_NORM_TOL:
        raise ValueError(f"unphysical filter: spectral norm {s[0]:.6f} > 1")
    # Deterministic ordering: descending singular values; ties broken by the
    # position of the dominant component of the left vector.
    order = sorted(
        range(d),
        key=lambda l: (-round(float(s[l]), 12), int(np.argmax(np.abs(u[:, l])))),
    )
    left = np.empty((d, d), dtype=complex)
    right = np.empty((d, d), dtype=complex)
    root = np.empty(d)
    for new_l, l in enumerate(order):
        v = u[:, l]
        w = vh[l].conj()
        idx = int(np.argmax(np.abs(v)))
        a = v[idx]
        if abs(a) > 0:
            phase = np.conj(a / abs(a))
            v = v * phase
            w = w * phase
        left[new_l] = v
        right[new_l] = w
        root[new_l] = s[l]
    rebuilt = (left.T * root) @ right.conj()
    err = np.max(np.abs(rebuilt - kraus))
    if err > SVD_RECONSTRUCTION_TOL:
        raise AssertionError(f"SVD reconstruction error {err:.3e}")
    return QuantumFilter(kraus=kraus, root_values=root, left=left, right=right)


def ppbs_filter(t_h: float, t_v: float) -> QuantumFilter:
    """Two-qubit filter of a lossless partially polarizing beam splitter.

    ``t_h``/``t_v`` are real amplitude transmittances for the two
    polarizations; reflectances are ``r = sqrt(1 - t^2)``.  Post-selecting
    on one photon per output port gives, in the (HH, HV, VH, VV) basis::

        [[tH^2 - rH^2, 0,        0,        0          ],
         [0,           tH tV,   -rH rV,    0          ],
         [0,          -rH rV,    tH tV,    0          ],
         [0,           0,        0,        tV^2 - rV^2]]

    For ``t_h = 1`` this reduces to ``diag(1, tV, tV, 2 tV^2 - 1)``.
    """
    for name, t in (("t_h", t_h), ("t_v", t_v)):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {t}")
    r_h = np.sqrt(1.0 - t_h * t_h)
    r_v = np.sqrt(1.0 - t_v * t_v)
    k = np.zeros((4, 4), dtype=complex)
    k[0, 0] = t_h * t_h - r_h * r_h
    k[1, 1] = k[2, 2] = t_h * t_v
    k[1, 2] = k[2, 1] = -r_h * r_v
    k[3, 3] = t_v * t_v - r_v * r_v
    return quantum_filter(k)


def ideal_output(filt: QuantumFilter, psi: np.ndarray) -> tuple[np.ndarray, float]:
    """Normalized ideal output ``K|psi>/||.||`` and its success weight.

    Raises :class:`ZeroWeightError` when the probe is filtered to zero;
    callers must drop the corresponding term from bound sums.
    """
    out = filt.kraus @ np.asarray(psi, dtype=complex)
    w = float(np.linalg.norm(out) ** 2)
    if w < ZERO_WEIGHT_TOL:
        raise ZeroWeightError(f"probe weight {w:.3e} below threshold {ZERO_WEIGHT_TOL}")
    return out / np.sqrt(w), w


def as_rng(rng: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def random_filter(d: int, rng: int | np.random.Generator | None = None) -> QuantumFilter:
    """Ginibre matrix normalized by its spectral norm (norm exactly 1)."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    gen = as_rng(rng)
    g = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    g /= np.linalg.svd(g, compute_uv=False)[0]
    return quantum_filter(g)


def random_unitary(d: int, rng: int | np.random.Generator | None = None) -> QuantumFilter:
    """Haar-random unitary treated as a (deterministic) filter."""
    gen = as_rng(rng)
    g = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return quantum_filter(q)


@dataclass(frozen=True)
class MixtureChannel:
    """Convex mixture of an ideal filter with a perturbing filter."""

    weight: float
    ideal: QuantumFilter
    perturber: QuantumFilter
    choi: np.ndarray

    def true_fidelity(self) -> float:
        from .core import process_fidelity

        return process_fidelity(self.choi, self.ideal.choi())


def mixture_channel(ideal: QuantumFilter, perturber: QuantumFilter, p: float) -> MixtureChannel:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {p}")
    if ideal.d != perturber.d:
        raise ValueError(f"dimension mismatch: {ideal.d} vs {perturber.d}")
    chi = p * ideal.choi() + (1.0 - p) * perturber.choi()
    return MixtureChannel(weight=p, ideal=ideal, perturber=perturber, choi=chi)


def filter_fidelity(a: QuantumFilter, b: QuantumFilter) -> float:
    """Rank-1 Choi fidelity ``|Tr(a^+ b)|^2 / (Tr(a^+a) Tr(b^+b))``."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    na = float(np.trace(dagger(a.kraus) @ a.kraus).real)
    nb = float(np.trace(dagger(b.kraus) @ b.kraus).real)
    if na <= ZERO_WEIGHT_TOL or nb <= ZERO_WEIGHT_TOL:
        raise ZeroWeightError("filter fidelity undefined for zero operator")
    overlap = np.trace(dagger(a.kraus) @ b.kraus)
    return float(abs(overlap) ** 2 / (na * nb))
