"""Suite orchestration: generate, lower, route, simulate, score.

The runner owns layer timing: native gates inside a scheduled layer are
applied without their trailing idle decoherence, and a single decoherence
interval equal to the layer's maximum gate duration is then applied to every
site.  Readout is reduced to bitstrings, un-permuted through the router's
final placement, restricted to the measured qubits, convolved with the
measurement-error channel and scored against the ideal distribution.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import bench, gatemodel, metrics
from .channels import NoiseParams
from .circuit import Circuit, schedule_layers
from .errors import AtombenchError, DegenerateIdealError, ValidationError
from .metrics import Distribution
from .routing import Topology
from .state import DEFAULT_MEMORY_CAP, QuquartState, init_state


@dataclass
class RunConfig:
    noise: NoiseParams = field(default_factory=NoiseParams)
    topologies: list = field(default_factory=lambda: ["all_to_all"])
    kinds: list = field(default_factory=lambda: ["Ghz"])
    widths: list = field(default_factory=lambda: [2, 3])
    samples_per_point: dict = field(default_factory=dict)
    seed: int = 0
    memory_cap: int = DEFAULT_MEMORY_CAP
    workers: int = 1
    timing_model: str = "gate"

    def __post_init__(self):
        if self.timing_model not in ("gate", "layer"):
            raise ValidationError(
                f"unknown timing_model {self.timing_model!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        noise = d.get("noise", {})
        if noise == "noiseless":
            d["noise"] = NoiseParams.noiseless()
        elif isinstance(noise, str):
            d["noise"] = NoiseParams.from_json(noise)
        elif isinstance(noise, dict):
            d["noise"] = NoiseParams.from_dict(noise)
        widths = d.get("widths", [2, 3])
        if isinstance(widths, dict):
            d["widths"] = list(range(widths["min"], widths["max"] + 1))
        extra = set(d) - set(cls.__dataclass_fields__)
        if extra:
            raise ValidationError(f"unknown config fields: {sorted(extra)}")
        return cls(**d)


@dataclass
class ResultRecord:
    kind: str
    width: int
    topology: str
    instance_param: object
    transpiled_depth: int = 0
    native_gate_counts: dict = field(default_factory=dict)
    f: float = float("nan")
    f_s: float = float("nan")
    f_n: float = float("nan")
    wall_time: float = 0.0
    status: str = "ok"
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "width": self.width, "topology": self.topology,
            "instance_param": self.instance_param,
            "transpiled_depth": self.transpiled_depth,
            "native_gate_counts": self.native_gate_counts,
            "f": self.f, "f_s": self.f_s, "f_n": self.f_n,
            "wall_time": self.wall_time, "status": self.status,
            "error": self.error,
        }


def make_topology(descriptor, n_qubits: int) -> Topology:
    """Build a Topology from "all_to_all", {"grid": [r, c]} or "grid"."""
    if isinstance(descriptor, Topology):
        return descriptor
    if descriptor == "all_to_all":
        return Topology.all_to_all(n_qubits)
    if descriptor == "grid":
        return Topology.grid(n_qubits)
    if isinstance(descriptor, dict) and "grid" in descriptor:
        rows, cols = descriptor["grid"]
        return Topology.grid(n_qubits, rows, cols)
    raise ValidationError(f"unknown topology descriptor {descriptor!r}")


def topology_label(descriptor) -> str:
    if isinstance(descriptor, Topology):
        return descriptor.mode
    if isinstance(descriptor, dict) and "grid" in descriptor:
        return "grid"
    return str(descriptor)


def execute_native(circuit: Circuit, params: NoiseParams,
                   memory_cap: int = DEFAULT_MEMORY_CAP,
                   prepare: bool = True, timing_model: str = "gate"
                   ) -> tuple[QuquartState, int]:
    """Run a native circuit with SPAM preparation and idle decoherence.

    timing_model "gate" attaches each gate's decoherence interval to its own
    sites (global pulses decohere every site); "layer" instead schedules the
    circuit and applies one decoherence interval of the layer's maximum gate
    duration to all sites after each layer.  Returns the final state and the
    transpiled depth (layer count).
    """
    layers, depth = schedule_layers(circuit, params)
    state = init_state(circuit.n_qubits, memory_cap)
    if prepare:
        gatemodel.apply_preparation(state, params)
    per_gate = timing_model == "gate"
    if timing_model not in ("gate", "layer"):
        raise ValidationError(f"unknown timing_model {timing_model!r}")
    for layer in layers:
        for g in layer.gates:
            if g.name == "grot":
                gatemodel.apply_noisy_global_rotation(
                    state, g.params[0], g.params[1], params,
                    decohere=per_gate)
            elif g.name == "rz":
                gatemodel.apply_noisy_local_rz(
                    state, g.sites[0], g.params[0], params,
                    decohere=per_gate)
            elif g.name == "cz":
                gatemodel.apply_noisy_cz(
                    state, g.sites[0], g.sites[1], params,
                    decohere=per_gate)
            else:
                raise ValidationError(f"non-native gate in layer: {g.name}")
        if not per_gate:
            gatemodel.apply_decoherence(state, layer.duration, params)
    return state, depth


def output_distribution(state: QuquartState, l2p: list, measured: list,
                        meas_error: float) -> Distribution:
    """Readout pipeline: reduce, un-permute, marginalize, measurement error."""
    v = metrics.reduce_readout_array(state.diagonal())
    n = state.n_sites
    if l2p != list(range(n)):
        v = metrics.permute_bits(v, l2p)
    if measured != list(range(n)):
        v = metrics.marginalize(v, n, measured)
    v = metrics.apply_measurement_error_vector(v, len(measured), meas_error)
    return Distribution.from_vector(v, len(measured), prune=1e-15)


def run_instance(spec: bench.BenchmarkSpec, topology, params: NoiseParams,
                 memory_cap: int = DEFAULT_MEMORY_CAP,
                 timing_model: str = "gate") -> ResultRecord:
    rec = ResultRecord(spec.kind, spec.width, topology_label(topology),
                       spec.instance_param)
    start = time.perf_counter()
    circuit, ideal = bench.generate(spec)
    from .circuit import lower_to_native, optimize_native
    from .routing import route
    native = optimize_native(lower_to_native(circuit))
    topo = make_topology(topology, native.n_qubits)
    routed, l2p = route(native, topo)
    routed = optimize_native(routed)
    rec.native_gate_counts = routed.gate_counts()
    state, depth = execute_native(routed, params, memory_cap,
                                  timing_model=timing_model)
    rec.transpiled_depth = depth
    out = output_distribution(state, l2p, circuit.measured_qubits,
                              params.meas_error)
    try:
        rec.f_s, rec.f_n, rec.f = metrics.classical_fidelity(ideal, out)
    except DegenerateIdealError as exc:
        rec.f_s = exc.f_s
        rec.status = "degenerate_ideal"
    rec.wall_time = time.perf_counter() - start
    return rec


def run_reference(circuit: Circuit, params: NoiseParams,
                  memory_cap: int = DEFAULT_MEMORY_CAP,
                  timing_model: str = "gate") -> Distribution:
    """Simulate an already-built abstract circuit on all-to-all connectivity."""
    from .circuit import lower_to_native, optimize_native
    native = optimize_native(lower_to_native(circuit))
    state, _ = execute_native(native, params, memory_cap,
                              timing_model=timing_model)
    return output_distribution(state, list(range(state.n_sites)),
                               circuit.measured_qubits, params.meas_error)


def run_suite(config: RunConfig) -> tuple[list, list]:
    """Run every (kind, width, topology, instance); aggregate per point.

    Returns (records, aggregates); aggregates are dicts with mean fidelity and
    mean transpiled depth.  Per-instance failures are recorded with status
    "error" and excluded from the means.
    """
    records = []
    aggregates = []
    for kind in config.kinds:
        for width in config.widths:
            lo, hi = bench.WIDTH_BOUNDS.get(kind, (2, 11))
            if not lo <= width <= hi:
                continue
            if kind == "HiddenShift" and width % 2:
                continue
            n_samples = config.samples_per_point.get(
                kind, bench.DEFAULT_SAMPLES.get(kind, 3))
            specs = bench.sample_instances(kind, width, n_samples, config.seed)
            for topology in config.topologies:
                def one(spec, topology=topology):
                    try:
                        return run_instance(spec, topology, config.noise,
                                            config.memory_cap,
                                            config.timing_model)
                    except AtombenchError as exc:
                        return ResultRecord(
                            kind, width, topology_label(topology),
                            spec.instance_param, status="error",
                            error=f"{type(exc).__name__}: {exc}")

                if config.workers > 1:
                    from concurrent.futures import ThreadPoolExecutor
                    with ThreadPoolExecutor(config.workers) as pool:
                        point = list(pool.map(one, specs))
                else:
                    point = [one(s) for s in specs]
                records.extend(point)
                good = [r for r in point if r.status == "ok"]
                aggregates.append({
                    "kind": kind, "width": width,
                    "topology": topology_label(topology),
                    "n_instances": len(point),
                    "n_failed": len(point) - len(good),
                    "mean_fidelity": float(np.mean([r.f for r in good]))
                    if good else float("nan"),
                    "mean_depth": float(np.mean([r.transpiled_depth
                                                 for r in good]))
                    if good else float("nan"),
                })
    return records, aggregates


def bell_state_fidelity(params: NoiseParams) -> float:
    """Quantum fidelity of a noisily prepared Bell state against the ideal.

    Preparation: Ry(pi/2) pulse on the first qubit, native CX onto the
    second, with SPAM preparation errors and per-layer decoherence; scored on
    the readout-reduced two-qubit density matrix.
    """
    from .bench import _ghz_ops
    from .circuit import Circuit, lower_to_native, optimize_native

    c = Circuit(2, metadata={"measured_qubits": [0, 1]})
    for op in _ghz_ops(2):
        c.add(op)
    native = optimize_native(lower_to_native(c))
    state, _ = execute_native(native, params)
    rho = state.reduced_qubit_density()
    ideal = np.zeros(4, dtype=complex)
    ideal[0] = ideal[3] = 1.0 / np.sqrt(2.0)
    return metrics.quantum_fidelity(np.outer(ideal, ideal.conj()), rho)


def save_records(records: list, path) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_dict() for r in records], fh, indent=1)
