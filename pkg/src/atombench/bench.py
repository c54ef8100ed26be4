"""Benchmark-circuit generators with statevector-computed ideal outputs.

Each generator builds an abstract circuit (``Circuit`` of qubit-level gates)
and its ideal noiseless output distribution over the measured qubits.  Ideal
distributions are always computed by the statevector oracle in this module,
never substituted from closed forms, so the generators double as a check on
the gate definitions.

Bit-order convention: qubit 0 is the leftmost character of a bitstring (most
significant).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, cz, grot, rz
from .errors import SchemaError, ValidationError
from .metrics import Distribution

HALF_PI = math.pi / 2.0

KINDS = (
    "BernsteinVazirani",
    "DeutschJozsa",
    "HiddenShift",
    "QftMethod1",
    "QftMethod2",
    "PhaseEstimation",
    "AmplitudeEstimation",
    "Grover",
    "HamiltonianSim",
    "MonteCarlo",
    "Ghz",
    "GhzParity",
    "ExternalCircuit",
)

# width bounds per kind; simulation memory is guarded separately
WIDTH_BOUNDS = {
    "BernsteinVazirani": (2, 10),   # one ancilla site on top of the width
    "DeutschJozsa": (2, 10),
    "HiddenShift": (2, 10),
    "QftMethod1": (2, 11),
    "QftMethod2": (2, 11),
    "PhaseEstimation": (2, 11),
    "AmplitudeEstimation": (3, 11),
    "Grover": (2, 8),
    "HamiltonianSim": (2, 11),
    "MonteCarlo": (3, 11),
    "Ghz": (2, 11),
    "GhzParity": (2, 11),
    "ExternalCircuit": (1, 11),
}

DEFAULT_SAMPLES = {"AmplitudeEstimation": 2, "MonteCarlo": 1}

# Trotterization constants for the Heisenberg-chain benchmark
HAMSIM_STEPS = 1
HAMSIM_DT = 0.25
HAMSIM_J = 1.0
HAMSIM_H_SCALE = 1.0


@dataclass(frozen=True)
class BenchmarkSpec:
    kind: str
    width: int
    instance_param: object = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown benchmark kind {self.kind!r}")
        lo, hi = WIDTH_BOUNDS[self.kind]
        if not lo <= self.width <= hi:
            raise ValidationError(
                f"{self.kind} width {self.width} outside [{lo}, {hi}]"
            )
        if self.kind == "HiddenShift" and self.width % 2:
            raise ValidationError("HiddenShift width must be even")


# -- statevector oracle ----------------------------------------------------

_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
_X = np.array([[0.0, 1], [1, 0]])
_Y = np.array([[0.0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0])


def _rx(t):
    return math.cos(t / 2) * np.eye(2) - 1j * math.sin(t / 2) * _X


def _ry(t):
    return math.cos(t / 2) * np.eye(2) - 1j * math.sin(t / 2) * _Y


def _rz(t):
    return np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)])


def _rphi(phi, t):
    # rotation by t about the equatorial axis at azimuth phi
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([
        [c, -1j * s * np.exp(-1j * phi)],
        [-1j * s * np.exp(1j * phi), c],
    ])


def gate_unitary_1q(g: Gate) -> np.ndarray:
    name = g.name
    if name == "h":
        return _H
    if name == "x":
        return _X
    if name == "y":
        return _Y
    if name == "z":
        return _Z
    if name == "rx":
        return _rx(g.params[0])
    if name == "ry":
        return _ry(g.params[0])
    if name == "rz":
        return _rz(g.params[0])
    if name == "rphi":
        return _rphi(g.params[0], g.params[1])
    raise ValidationError(f"not a one-qubit gate: {name}")


_CX = np.eye(4)
_CX[2:, 2:] = _X
_CZ = np.diag([1.0, 1, 1, -1])
_SWAP = np.eye(4)[[0, 2, 1, 3]]


def gate_unitary_2q(g: Gate) -> np.ndarray:
    if g.name == "cx":
        return _CX
    if g.name == "cz":
        return _CZ
    if g.name == "swap":
        return _SWAP
    if g.name == "cp":
        return np.diag([1.0, 1, 1, np.exp(1j * g.params[0])])
    raise ValidationError(f"not a two-qubit gate: {g.name}")


def _apply_1q(psi: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    psi = np.tensordot(u, psi, axes=([1], [q]))
    return np.moveaxis(psi, 0, q)


def _apply_2q(psi: np.ndarray, u: np.ndarray, a: int, b: int) -> np.ndarray:
    n = psi.ndim
    u4 = u.reshape(2, 2, 2, 2)
    psi = np.tensordot(u4, psi, axes=([2, 3], [a, b]))
    return np.moveaxis(psi, [0, 1], [a, b])


def statevector(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Noiseless final state of an abstract or native circuit, shape (2,)*n."""
    n = circuit.n_qubits
    if initial is None:
        psi = np.zeros((2,) * n, dtype=complex)
        psi[(0,) * n] = 1.0
    else:
        psi = np.asarray(initial, dtype=complex).reshape((2,) * n).copy()
    for g in circuit.ops:
        if g.name == "grot":
            u = _rphi(g.params[0], g.params[1])
            for q in range(n):
                psi = _apply_1q(psi, u, q)
        elif g.name == "ccx":
            a, b, c = g.sites
            # act on the doubly-controlled block only
            idx = [slice(None)] * n
            idx[a] = 1
            idx[b] = 1
            sub = psi[tuple(idx)]
            psi[tuple(idx)] = np.moveaxis(
                np.tensordot(_X, sub, axes=([1], [c - (c > a) - (c > b)])),
                0, c - (c > a) - (c > b))
        elif len(g.sites) == 1:
            psi = _apply_1q(psi, gate_unitary_1q(g), g.sites[0])
        else:
            psi = _apply_2q(psi, gate_unitary_2q(g), *g.sites)
    return psi


def ideal_distribution(circuit: Circuit, prune: float = 1e-12) -> Distribution:
    """Measured-qubit marginal of |psi|^2 for the noiseless circuit."""
    probs = np.abs(statevector(circuit)) ** 2
    n = circuit.n_qubits
    keep = circuit.measured_qubits
    drop = tuple(i for i in range(n) if i not in keep)
    if drop:
        probs = probs.sum(axis=drop)
    remaining = [i for i in range(n) if i not in drop]
    probs = probs.transpose([remaining.index(k) for k in keep])
    return Distribution.from_vector(probs.reshape(-1), len(keep), prune=prune)


# -- circuit-construction helpers ------------------------------------------


def _g(name, sites, *params):
    return Gate(name, tuple(sites) if isinstance(sites, (list, tuple)) else (sites,),
                tuple(float(p) for p in params))


def _mcp_ops(theta: float, qubits: tuple) -> list:
    """Multi-controlled phase on the last qubit, recursive and ancilla-free."""
    if len(qubits) == 1:
        return [_g("rz", qubits, theta)]
    if len(qubits) == 2:
        return [_g("cp", qubits, theta)]
    *controls, last_c, target = qubits
    ops = [_g("cp", (last_c, target), theta / 2)]
    ops += _mcx_ops(tuple(controls), last_c)
    ops += [_g("cp", (last_c, target), -theta / 2)]
    ops += _mcx_ops(tuple(controls), last_c)
    ops += _mcp_ops(theta / 2, tuple(controls) + (target,))
    return ops


def _mcx_ops(controls: tuple, target: int) -> list:
    if len(controls) == 1:
        return [_g("cx", (controls[0], target))]
    if len(controls) == 2:
        return [_g("ccx", (*controls, target))]
    return ([_g("h", (target,))]
            + _mcp_ops(math.pi, (*controls, target))
            + [_g("h", (target,))])


def _qft_ops(qubits: list, inverse: bool = False) -> list:
    """Swapless QFT: qubit order carries the bit reversal.

    Maps |x> to a product state where qubit i (of the given list) holds the
    relative phase 2*pi*x / 2^(n-i).
    """
    ops = []
    n = len(qubits)
    for i in range(n):
        ops.append(_g("h", (qubits[i],)))
        for k in range(i + 1, n):
            ops.append(_g("cp", (qubits[k], qubits[i]), math.pi / 2 ** (k - i)))
    if inverse:
        ops = [
            Gate(o.name, o.sites, tuple(-p for p in o.params) if o.name == "cp" else o.params)
            for o in reversed(ops)
        ]
    return ops


def _cry_ops(theta: float, control: int, target: int) -> list:
    return [
        _g("cx", (control, target)),
        _g("ry", (target,), -theta / 2),
        _g("cx", (control, target)),
        _g("ry", (target,), theta / 2),
    ]


def _heisenberg_bond_ops(a: int, b: int, theta: float) -> list:
    """exp(-i theta (XX + YY + ZZ) / 2) on the pair, up to global phase."""
    return [
        _g("cx", (a, b)),
        _g("h", (a,)),
        _g("cp", (a, b), 2 * theta),
        _g("h", (a,)),
        _g("cx", (a, b)),
    ]


# -- generators -------------------------------------------------------------


def _bitstring_param(param, width: int, what: str) -> str:
    if isinstance(param, int):
        param = format(param, f"0{width}b")
    if not isinstance(param, str) or len(param) != width or set(param) - {"0", "1"}:
        raise ValidationError(f"{what} must be a {width}-bit string, got {param!r}")
    return param


def _bernstein_vazirani(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    secret = _bitstring_param(spec.instance_param, w, "secret")
    if secret == "0" * w:
        raise ValidationError("secret must be nonzero")
    anc = w
    c = Circuit(w + 1, metadata={"measured_qubits": list(range(w))})
    c.add(_g("x", (anc,)))
    c.add(grot(HALF_PI, HALF_PI))           # global Ry(pi/2)
    for i, bit in enumerate(secret):
        if bit == "1":
            c.add(_g("cx", (i, anc)))
    c.add(grot(HALF_PI, -HALF_PI))
    return c


def _deutsch_jozsa(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    variant = spec.instance_param
    if variant not in ("constant_0", "constant_1", "balanced"):
        raise ValidationError(f"bad DeutschJozsa variant {variant!r}")
    anc = w
    c = Circuit(w + 1, metadata={"measured_qubits": list(range(w))})
    c.add(_g("x", (anc,)))
    c.add(grot(HALF_PI, HALF_PI))
    if variant == "constant_1":
        c.add(_g("x", (anc,)))
    elif variant == "balanced":
        for i in range(w):
            c.add(_g("cx", (i, anc)))
    c.add(grot(HALF_PI, -HALF_PI))
    return c


def _hidden_shift(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    shift = _bitstring_param(spec.instance_param, w, "shift")
    pairs = [(2 * i, 2 * i + 1) for i in range(w // 2)]
    c = Circuit(w, metadata={"measured_qubits": list(range(w))})
    c.add(grot(HALF_PI, HALF_PI))           # H layer from |0...0>
    for i, bit in enumerate(shift):
        if bit == "1":
            c.add(_g("x", (i,)))
    for a, b in pairs:
        c.add(_g("cz", (a, b)))
    for i, bit in enumerate(shift):
        if bit == "1":
            c.add(_g("x", (i,)))
    for i in range(w):
        c.add(_g("h", (i,)))
    for a, b in pairs:
        c.add(_g("cz", (a, b)))
    c.add(grot(HALF_PI, -HALF_PI))          # Z.H per site; Z is harmless pre-readout
    return c


def _encoded_value(param, width: int) -> int:
    if not isinstance(param, (int, np.integer)) or not 0 <= param < 2**width:
        raise ValidationError(f"encoded value {param!r} outside [0, 2^{width})")
    return int(param)


def _qft_method1(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    a = _encoded_value(spec.instance_param, w)
    c = Circuit(w, metadata={"measured_qubits": list(range(w))})
    for i, bit in enumerate(format(a, f"0{w}b")):
        if bit == "1":
            c.add(_g("x", (i,)))
    for op in _qft_ops(list(range(w))):
        c.add(op)
    for i in range(w):                       # increment by 1 in the Fourier basis
        c.add(rz(i, 2 * math.pi / 2 ** (w - i)))
    for op in _qft_ops(list(range(w)), inverse=True):
        c.add(op)
    return c


def _qft_method2(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    a = _encoded_value(spec.instance_param, w)
    c = Circuit(w, metadata={"measured_qubits": list(range(w))})
    c.add(grot(HALF_PI, HALF_PI))
    for i in range(w):
        angle = 2 * math.pi * a / 2 ** (w - i)
        c.add(rz(i, angle))
    for op in _qft_ops(list(range(w)), inverse=True):
        c.add(op)
    return c


def _phase_estimation(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    t = w - 1
    k = spec.instance_param
    if not isinstance(k, (int, np.integer)) or not 1 <= k < 2**t:
        raise ValidationError(f"phase index {k!r} outside [1, 2^{t})")
    target = t
    c = Circuit(w, metadata={"measured_qubits": list(range(t))})
    c.add(grot(HALF_PI, HALF_PI))
    c.add(_g("ry", (target,), HALF_PI))      # |+> -> |1>, eigenstate of the phase
    theta = 2 * math.pi * k / 2**t
    for j in range(t):
        c.add(_g("cp", (j, target), theta * 2**j))
    for op in _qft_ops(list(range(t)), inverse=True):
        c.add(op)
    return c


def _grover_power_ops(mu: float, control: int, obj: int, power: int) -> list:
    """power sequential applications of the controlled Grover iterate.

    Q = A S0 A^dag S_chi with A = Ry(2 mu), S0/S_chi = Z reflections; each
    factor is individually controlled on the counting qubit.
    """
    ops = []
    for _ in range(power):
        ops.append(_g("cz", (control, obj)))            # controlled S_chi
        ops += _cry_ops(-2 * mu, control, obj)          # controlled A^dag
        ops.append(_g("x", (obj,)))                     # controlled S0
        ops.append(_g("cz", (control, obj)))
        ops.append(_g("x", (obj,)))
        ops += _cry_ops(2 * mu, control, obj)           # controlled A
    return ops


def _amplitude_estimation(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    t = w - 1
    k = spec.instance_param
    if not isinstance(k, (int, np.integer)) or not 1 <= k < 2**t:
        raise ValidationError(f"amplitude index {k!r} outside [1, 2^{t})")
    mu = math.pi * k / 2**t
    return _ae_like_circuit(w, mu)


def _ae_like_circuit(w: int, mu: float) -> Circuit:
    t = w - 1
    obj = t
    c = Circuit(w, metadata={"measured_qubits": list(range(t))})
    c.add(grot(HALF_PI, HALF_PI))
    c.add(_g("ry", (obj,), 2 * mu - HALF_PI))  # net effect: A = Ry(2 mu) from |0>
    for j in range(t):
        for op in _grover_power_ops(mu, j, obj, 2**j):
            c.add(op)
    for op in _qft_ops(list(range(t)), inverse=True):
        c.add(op)
    return c


def _monte_carlo(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    a = spec.instance_param
    if not isinstance(a, float) or not 0.0 < a < 1.0:
        raise ValidationError(f"target amplitude {a!r} outside (0, 1)")
    mu = math.asin(math.sqrt(a))
    return _ae_like_circuit(w, mu)


def _grover(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    marked = _bitstring_param(spec.instance_param, w, "marked item")
    c = Circuit(w, metadata={"measured_qubits": list(range(w))})
    c.add(grot(HALF_PI, HALF_PI))
    n_iter = max(1, int(math.floor(math.pi / 4 * math.sqrt(2**w))))
    for _ in range(n_iter):
        # oracle: phase flip on the marked string
        for i, bit in enumerate(marked):
            if bit == "0":
                c.add(_g("x", (i,)))
        for op in _mcp_ops(math.pi, tuple(range(w))):
            c.add(op)
        for i, bit in enumerate(marked):
            if bit == "0":
                c.add(_g("x", (i,)))
        # diffuser: reflection about the uniform state
        c.add(grot(HALF_PI, -HALF_PI))
        for i in range(w):
            c.add(_g("x", (i,)))
        for op in _mcp_ops(math.pi, tuple(range(w))):
            c.add(op)
        for i in range(w):
            c.add(_g("x", (i,)))
        c.add(grot(HALF_PI, HALF_PI))
    return c


def _hamiltonian_sim(spec: BenchmarkSpec) -> Circuit:
    w = spec.width
    seed = spec.instance_param
    if not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"disorder seed must be an int, got {seed!r}")
    rng = np.random.default_rng(int(seed))
    fields = rng.uniform(-HAMSIM_H_SCALE, HAMSIM_H_SCALE, size=w)
    c = Circuit(w, metadata={
        "measured_qubits": list(range(w)),
        "hamsim": {"steps": HAMSIM_STEPS, "dt": HAMSIM_DT, "j": HAMSIM_J,
                   "fields": [float(h) for h in fields]},
    })
    for i in range(1, w, 2):                 # Neel-like initial state
        c.add(_g("x", (i,)))
    theta = 2 * HAMSIM_J * HAMSIM_DT
    for _ in range(HAMSIM_STEPS):
        for i in range(w):
            c.add(rz(i, 2 * fields[i] * HAMSIM_DT))
        for start in (0, 1):                 # even bonds, then odd bonds
            for a in range(start, w - 1, 2):
                for op in _heisenberg_bond_ops(a, a + 1, theta):
                    c.add(op)
    return c


def _ghz_ops(w: int) -> list:
    ops = [_g("ry", (0,), HALF_PI)]
    ops += [_g("cx", (i, i + 1)) for i in range(w - 1)]
    return ops


def _ghz(spec: BenchmarkSpec) -> Circuit:
    c = Circuit(spec.width, metadata={"measured_qubits": list(range(spec.width))})
    for op in _ghz_ops(spec.width):
        c.add(op)
    return c


def _ghz_parity(spec: BenchmarkSpec) -> Circuit:
    phi = spec.instance_param
    if not isinstance(phi, (int, float)):
        raise ValidationError(f"analysis angle must be a number, got {phi!r}")
    c = Circuit(spec.width, metadata={"measured_qubits": list(range(spec.width))})
    for op in _ghz_ops(spec.width):
        c.add(op)
    c.add(grot(float(phi), HALF_PI))
    return c


_GENERATORS = {
    "BernsteinVazirani": _bernstein_vazirani,
    "DeutschJozsa": _deutsch_jozsa,
    "HiddenShift": _hidden_shift,
    "QftMethod1": _qft_method1,
    "QftMethod2": _qft_method2,
    "PhaseEstimation": _phase_estimation,
    "AmplitudeEstimation": _amplitude_estimation,
    "Grover": _grover,
    "HamiltonianSim": _hamiltonian_sim,
    "MonteCarlo": _monte_carlo,
    "Ghz": _ghz,
    "GhzParity": _ghz_parity,
}


def generate(spec: BenchmarkSpec) -> tuple[Circuit, Distribution]:
    """Build the circuit for a benchmark instance and its ideal distribution."""
    if spec.kind == "ExternalCircuit":
        return load_external(spec.instance_param)
    circuit = _GENERATORS[spec.kind](spec)
    circuit.metadata.setdefault("kind", spec.kind)
    circuit.metadata.setdefault("width", spec.width)
    return circuit, ideal_distribution(circuit)


# -- instance sampling -------------------------------------------------------


def _admissible(kind: str, width: int):
    """(count, value_fn) for enumerable instance spaces, or None if continuous."""
    if kind == "BernsteinVazirani":
        return 2**width - 1, lambda i: format(i + 1, f"0{width}b")
    if kind == "HiddenShift":
        return 2**width - 1, lambda i: format(i + 1, f"0{width}b")
    if kind == "Grover":
        return 2**width, lambda i: format(i, f"0{width}b")
    if kind == "DeutschJozsa":
        values = ("constant_0", "constant_1", "balanced")
        return 3, lambda i: values[i]
    if kind in ("QftMethod1", "QftMethod2"):
        return 2**width, lambda i: i
    if kind in ("PhaseEstimation", "AmplitudeEstimation"):
        return 2 ** (width - 1) - 1, lambda i: i + 1
    if kind == "Ghz":
        return 1, lambda i: None
    return None


def sample_instances(kind: str, width: int, n_samples: int = None,
                     seed: int = 0) -> list:
    """Distinct seeded instance draws; enumerates small instance spaces."""
    if n_samples is None:
        n_samples = DEFAULT_SAMPLES.get(kind, 3)
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    if kind not in KINDS:
        raise ValidationError(f"unknown benchmark kind {kind!r}")
    rng = np.random.default_rng((KINDS.index(kind), width, seed))
    space = _admissible(kind, width)
    if space is not None:
        count, value = space
        if count <= n_samples:
            picks = range(count)
        else:
            picks = rng.choice(count, size=n_samples, replace=False)
        return [BenchmarkSpec(kind, width, value(int(i)), seed) for i in picks]
    if kind == "HamiltonianSim":
        seeds = rng.integers(0, 2**31, size=n_samples)
        return [BenchmarkSpec(kind, width, int(s), seed) for s in seeds]
    if kind == "MonteCarlo":
        vals = rng.uniform(0.05, 0.95, size=n_samples)
        return [BenchmarkSpec(kind, width, float(v), seed) for v in vals]
    if kind == "GhzParity":
        phis = rng.uniform(0.0, 2 * math.pi, size=n_samples)
        return [BenchmarkSpec(kind, width, float(p), seed) for p in phis]
    raise ValidationError(f"cannot sample instances for kind {kind!r}")


# -- external circuits --------------------------------------------------------


def load_external(path) -> tuple[Circuit, Distribution]:
    """Parse an external circuit file with a measured bitstring distribution.

    Format: {"n_qubits": int, "ops": [{"gate", "sites", "params"}, ...],
    "measured": {"bitstring": prob, ...}}.
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read external circuit {path!r}: {exc}") from exc
    for field in ("n_qubits", "ops", "measured"):
        if field not in data:
            raise SchemaError(f"external circuit missing field {field!r}")
    circuit = Circuit.from_dict({"n_qubits": data["n_qubits"],
                                 "ops": data["ops"],
                                 "metadata": data.get("metadata", {})})
    measured = data["measured"]
    if not isinstance(measured, dict) or not measured:
        raise SchemaError("'measured' must be a non-empty mapping")
    total = sum(measured.values())
    if abs(total - 1.0) > 1e-6:
        raise SchemaError(f"measured distribution sums to {total}, not 1")
    n_bits = len(next(iter(measured)))
    try:
        dist = Distribution({k: v / total for k, v in measured.items()}, n_bits)
    except ValidationError as exc:
        raise SchemaError(f"bad measured distribution: {exc}") from exc
    circuit.metadata.setdefault("measured_qubits", list(range(circuit.n_qubits)))
    circuit.metadata.setdefault("kind", "ExternalCircuit")
    return circuit, dist
