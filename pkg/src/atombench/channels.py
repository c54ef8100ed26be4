"""Kraus channel constructors for the neutral-atom noise model.

Every channel acts on the 4-level site basis |0>, |1>, |l0>, |l1>, where the
two loss states are inert under gates and are populated only by the loss
channels.  Pauli operators are generalized to act as identity on the loss
subspace, so all channels map the sparse block pattern of the density matrix
to itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict, fields

import numpy as np

from .errors import ValidationError, ParameterRegimeError

SITE_DIM = 4
SITE_LABELS = ("0", "1", "l0", "l1")

# Generalized Pauli operators: identity on the loss subspace.
IDENT = np.eye(4, dtype=complex)
PAULI_X = np.array(
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
)
PAULI_Y = np.array(
    [[0, -1j, 0, 0], [1j, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
)
PAULI_Z = np.array(
    [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
)

CPTP_ATOL = 1e-10


@dataclass
class NoiseParams:
    """Full noise-parameter record (channel rates, SPAM, decoherence, timing).

    Rates tagged per-pi-pulse scale linearly with the rotation angle via
    :func:`scaled_probability`.  Durations are not measured quantities; they
    are calibrated so that simulated average gate fidelities reproduce the
    reference values (see ``scripts/calibrate_durations.py``).
    """

    uw_depol_per_pi: float = 1.8e-6

    rz_phaseflip_per_pi: float = 3.2e-4
    rz_loss_dark_per_pi: float = 1.9e-4
    rz_loss_bright_per_pi: float = 2.7e-4
    rz_decay_per_pi: float = 2.0e-8

    cz_phaseflip: float = 3.3e-2
    cz_loss_dark: float = 1.8e-2
    cz_loss_bright: float = 2.9e-2
    cz_decay: float = 2.1e-5
    cz_phaseshift: float = -2.0e-3  # radians, coherent conditional-phase offset

    prep_error: float = 5.2e-3
    meas_error: float = 5.3e-3

    t1: float = 10.0
    t2_star: float = 3.5e-3
    p0_equilibrium: float = 0.42

    # Calibrated gate durations (seconds); see module docstring.
    dur_uw_pi: float = 5.243e-6
    dur_rz_pi: float = 4.772e-5
    dur_cz: float = 5.0e-7

    # "correlated": one ZZ phase-flip per CZ; "per_site": independent Z flip
    # on each participating site.
    cz_phaseflip_mode: str = "conditional"

    _PROB_FIELDS = (
        "uw_depol_per_pi",
        "rz_phaseflip_per_pi",
        "rz_loss_dark_per_pi",
        "rz_loss_bright_per_pi",
        "rz_decay_per_pi",
        "cz_phaseflip",
        "cz_loss_dark",
        "cz_loss_bright",
        "cz_decay",
        "prep_error",
        "meas_error",
        "p0_equilibrium",
    )

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in self._PROB_FIELDS:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v} outside [0, 1]")
        for name in ("dur_uw_pi", "dur_rz_pi", "dur_cz"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0")
        if not self.t1 >= self.t2_star > 0:
            raise ValidationError(
                f"need t1 >= t2_star > 0, got t1={self.t1}, t2_star={self.t2_star}"
            )
        if self.cz_phaseflip_mode not in ("conditional", "correlated", "per_site"):
            raise ValidationError(
                f"unknown cz_phaseflip_mode {self.cz_phaseflip_mode!r}"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown noise parameter(s): {sorted(unknown)}")
        return cls(**d)

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, path) -> "NoiseParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def replace(self, **kw) -> "NoiseParams":
        d = self.to_dict()
        d.update(kw)
        return NoiseParams.from_dict(d)

    @classmethod
    def noiseless(cls) -> "NoiseParams":
        """Zero error rates and negligible durations; for identity checks."""
        return cls(
            uw_depol_per_pi=0.0,
            rz_phaseflip_per_pi=0.0,
            rz_loss_dark_per_pi=0.0,
            rz_loss_bright_per_pi=0.0,
            rz_decay_per_pi=0.0,
            cz_phaseflip=0.0,
            cz_loss_dark=0.0,
            cz_loss_bright=0.0,
            cz_decay=0.0,
            cz_phaseshift=0.0,
            prep_error=0.0,
            meas_error=0.0,
            t1=1e30,
            t2_star=1e29,
            dur_uw_pi=1e-30,
            dur_rz_pi=1e-30,
            dur_cz=1e-30,
        )


@dataclass(frozen=True)
class KrausSet:
    """A CPTP channel as a tuple of square complex operators (dim 4 or 16)."""

    operators: tuple
    label: str = ""

    def __post_init__(self):
        ops = tuple(np.asarray(a, dtype=complex) for a in self.operators)
        object.__setattr__(self, "operators", ops)
        if not ops:
            raise ValidationError(f"{self.label}: empty Kraus set")
        dim = ops[0].shape[0]
        for a in ops:
            if a.shape != (dim, dim):
                raise ValidationError(f"{self.label}: non-square or mixed-dim operators")
        s = sum(a.conj().T @ a for a in ops)
        if not np.allclose(s, np.eye(dim), atol=CPTP_ATOL):
            err = np.max(np.abs(s - np.eye(dim)))
            raise ValidationError(f"{self.label}: not CPTP (|sum A^dag A - I| = {err:.2e})")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def n_sites(self) -> int:
        return 1 if self.dim == SITE_DIM else 2


def _check_prob(p: float, name: str = "p"):
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name}={p} outside [0, 1]")


def scaled_probability(rate_per_pi: float, theta: float) -> float:
    """Error probability of an angle-theta pulse given a per-pi-pulse rate."""
    _check_prob(rate_per_pi, "rate_per_pi")
    return min(rate_per_pi * abs(theta) / math.pi, 1.0)


def depolarization(p: float) -> KrausSet:
    """rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)."""
    _check_prob(p)
    return KrausSet(
        (
            math.sqrt(1 - p) * IDENT,
            math.sqrt(p / 3) * PAULI_X,
            math.sqrt(p / 3) * PAULI_Y,
            math.sqrt(p / 3) * PAULI_Z,
        ),
        label="depolarization",
    )


def phase_flip(p: float) -> KrausSet:
    """rho -> (1-p) rho + p Z rho Z."""
    _check_prob(p)
    return KrausSet(
        (math.sqrt(1 - p) * IDENT, math.sqrt(p) * PAULI_Z), label="phase_flip"
    )


def bit_flip(p: float) -> KrausSet:
    """rho -> (1-p) rho + p X rho X.  Models state-preparation error."""
    _check_prob(p)
    return KrausSet(
        (math.sqrt(1 - p) * IDENT, math.sqrt(p) * PAULI_X), label="bit_flip"
    )


def loss_channel(p: float, target: str) -> KrausSet:
    """Transfer of |1> population into a loss state with probability p.

    target is "dark" (|l0>, reads as 0) or "bright" (|l1>, reads as 1).
    """
    _check_prob(p)
    if target not in ("dark", "bright"):
        raise ValidationError(f"loss target must be 'dark' or 'bright', got {target!r}")
    a0 = np.diag([1.0, math.sqrt(1 - p), 1.0, 1.0]).astype(complex)
    a1 = np.zeros((4, 4), dtype=complex)
    a1[2 if target == "dark" else 3, 1] = math.sqrt(p)
    return KrausSet((a0, a1), label=f"loss_{target}")


def decay(p: float) -> KrausSet:
    """Amplitude damping |1> -> |0> with probability p."""
    _check_prob(p)
    a0 = np.diag([1.0, math.sqrt(1 - p), 1.0, 1.0]).astype(complex)
    a1 = np.zeros((4, 4), dtype=complex)
    a1[0, 1] = math.sqrt(p)
    return KrausSet((a0, a1), label="decay")


def correlated_phase_flip(p: float) -> KrausSet:
    """Two-site channel rho -> (1-p) rho + p (ZZ) rho (ZZ)."""
    _check_prob(p)
    zz = np.kron(PAULI_Z, PAULI_Z)
    return KrausSet(
        (math.sqrt(1 - p) * np.eye(16, dtype=complex), math.sqrt(p) * zz),
        label="correlated_phase_flip",
    )


def conditional_phase_flip(p: float) -> KrausSet:
    """Two-site flip of the entangling phase: with probability p an extra
    controlled-Z (sign flip of the |11> amplitude) is applied."""
    _check_prob(p)
    flip = np.eye(16, dtype=complex)
    flip[5, 5] = -1.0  # |11> element in the 4x4-per-site ordering
    return KrausSet(
        (math.sqrt(1 - p) * np.eye(16, dtype=complex), math.sqrt(p) * flip),
        label="conditional_phase_flip",
    )


def decoherence(t: float, params: NoiseParams) -> tuple[KrausSet, KrausSet]:
    """Idle T1/T2* decoherence over a time t, as a two-stage channel.

    Stage one is the three-operator population channel {A, B, C}; stage two is
    a phase flip whose probability is chosen so the composition reproduces the
    direct matrix action (d1 scaling plus equilibrium refill on the diagonal,
    d2 scaling on the off-diagonal) on the computational block.
    """
    if t < 0:
        raise ValidationError(f"decoherence time must be >= 0, got {t}")
    p0 = params.p0_equilibrium
    p1 = 1.0 - p0
    d1 = math.exp(-t / params.t1)
    d2 = math.exp(-t / params.t2_star)

    g0 = p0 * (1 - d1) + d1
    g1 = p1 * (1 - d1) + d1
    a = np.diag([math.sqrt(g0), math.sqrt(g1), 1.0, 1.0]).astype(complex)
    b = np.zeros((4, 4), dtype=complex)
    b[0, 1] = math.sqrt(p0 * (1 - d1))
    c = np.zeros((4, 4), dtype=complex)
    c[1, 0] = math.sqrt(p1 * (1 - d1))

    phi = 0.5 - d2 / (2.0 * math.sqrt(g0 * g1))
    if phi < -1e-12 or phi > 0.5 + 1e-12:
        raise ParameterRegimeError(
            f"dephasing probability {phi} outside [0, 1/2]; "
            f"check t1/t2_star consistency (t={t})"
        )
    phi = min(max(phi, 0.0), 0.5)

    return (
        KrausSet((a, b, c), label="decoherence_population"),
        phase_flip(phi),
    )


def decoherence_direct_action(rho: np.ndarray, t: float, params: NoiseParams) -> np.ndarray:
    """Direct 2x2-computational-block form of the decoherence channel.

    Reference implementation used to cross-check the composed Kraus form;
    acts on a single-site 4x4 density matrix, leaving loss populations alone.
    """
    p0 = params.p0_equilibrium
    p1 = 1.0 - p0
    d1 = math.exp(-t / params.t1)
    d2 = math.exp(-t / params.t2_star)
    out = rho.astype(complex).copy()
    pt = rho[0, 0] + rho[1, 1]
    out[0, 0] = d1 * rho[0, 0] + (1 - d1) * p0 * pt
    out[1, 1] = d1 * rho[1, 1] + (1 - d1) * p1 * pt
    out[0, 1] = d2 * rho[0, 1]
    out[1, 0] = d2 * rho[1, 0]
    return out
