"""Dense 4^n density-matrix reference engine, used only by the tests.

The production simulator stores 6^n symbols per state; this module applies
the same gates and Kraus channels to the full (4,)*2n density tensor with no
sparsity assumptions, so any bookkeeping error in the sparse engine shows up
as an elementwise mismatch.
"""

from __future__ import annotations

import math

import numpy as np

from atombench import channels as ch
from atombench.channels import NoiseParams
from atombench.gatemodel import (
    cz_matrix,
    cz_phaseshift_matrix,
    global_rotation_matrix,
    rz_matrix,
)

D = 4


def initial_rho(n: int) -> np.ndarray:
    rho = np.zeros((D,) * (2 * n), dtype=complex)
    rho[(0,) * (2 * n)] = 1.0
    return rho


def to_matrix(rho: np.ndarray) -> np.ndarray:
    n = rho.ndim // 2
    return rho.reshape(D**n, D**n)


def apply_ops(rho: np.ndarray, ops, sites) -> np.ndarray:
    """rho -> sum_i A_i rho A_i^dag on the given sites, densely."""
    n = rho.ndim // 2
    sites = list(sites)
    k = len(sites)
    col_axes = [n + s for s in sites]
    out = np.zeros_like(rho)
    for a in ops:
        a = np.asarray(a, dtype=complex)
        at = a.reshape((D,) * (2 * k))
        t = np.tensordot(at, rho, axes=(list(range(k, 2 * k)), sites))
        t = np.moveaxis(t, list(range(k)), sites)
        ac = a.conj().reshape((D,) * (2 * k))
        t = np.tensordot(t, ac, axes=(col_axes, list(range(k, 2 * k))))
        t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), col_axes)
        out += t
    return out


def apply_channel(rho: np.ndarray, kraus: ch.KrausSet, sites) -> np.ndarray:
    return apply_ops(rho, kraus.operators, sites)


def apply_decoherence(rho: np.ndarray, t: float, params: NoiseParams,
                      sites=None) -> np.ndarray:
    if t <= 0.0:
        return rho
    n = rho.ndim // 2
    pop, deph = ch.decoherence(t, params)
    for s in range(n) if sites is None else sites:
        rho = apply_channel(rho, pop, (s,))
        rho = apply_channel(rho, deph, (s,))
    return rho


def apply_grot(rho: np.ndarray, phi: float, theta: float,
               params: NoiseParams, decohere: bool = True) -> np.ndarray:
    n = rho.ndim // 2
    u = global_rotation_matrix(phi, theta)
    for s in range(n):
        rho = apply_ops(rho, (u,), (s,))
    p = ch.scaled_probability(params.uw_depol_per_pi, theta)
    if p > 0.0:
        depol = ch.depolarization(p)
        for s in range(n):
            rho = apply_channel(rho, depol, (s,))
    if decohere:
        rho = apply_decoherence(rho, params.dur_uw_pi * abs(theta) / math.pi,
                                params)
    return rho


def apply_rz(rho: np.ndarray, site: int, theta: float,
             params: NoiseParams, decohere: bool = True) -> np.ndarray:
    rho = apply_ops(rho, (rz_matrix(theta),), (site,))
    scale = lambda r: ch.scaled_probability(r, theta)
    for kraus in (
        ch.phase_flip(scale(params.rz_phaseflip_per_pi)),
        ch.decay(scale(params.rz_decay_per_pi)),
        ch.loss_channel(scale(params.rz_loss_dark_per_pi), "dark"),
        ch.loss_channel(scale(params.rz_loss_bright_per_pi), "bright"),
    ):
        rho = apply_channel(rho, kraus, (site,))
    if decohere:
        rho = apply_decoherence(rho, params.dur_rz_pi * abs(theta) / math.pi,
                                params, sites=(site,))
    return rho


def apply_cz(rho: np.ndarray, a: int, b: int, params: NoiseParams,
             decohere: bool = True) -> np.ndarray:
    sites = (a, b)
    rho = apply_ops(rho, (cz_matrix(),), sites)
    for target, p in (("dark", params.cz_loss_dark),
                      ("bright", params.cz_loss_bright)):
        kraus = ch.loss_channel(p, target)
        for s in sites:
            rho = apply_channel(rho, kraus, (s,))
    dec = ch.decay(params.cz_decay)
    for s in sites:
        rho = apply_channel(rho, dec, (s,))
    if params.cz_phaseflip_mode == "conditional":
        rho = apply_channel(rho, ch.conditional_phase_flip(params.cz_phaseflip),
                            sites)
    elif params.cz_phaseflip_mode == "correlated":
        rho = apply_channel(rho, ch.correlated_phase_flip(params.cz_phaseflip),
                            sites)
    else:
        pf = ch.phase_flip(params.cz_phaseflip)
        for s in sites:
            rho = apply_channel(rho, pf, (s,))
    if params.cz_phaseshift != 0.0:
        rho = apply_ops(rho, (cz_phaseshift_matrix(params.cz_phaseshift),),
                        sites)
    if decohere:
        rho = apply_decoherence(rho, params.dur_cz, params, sites=sites)
    return rho


def apply_preparation(rho: np.ndarray, params: NoiseParams) -> np.ndarray:
    n = rho.ndim // 2
    if params.prep_error > 0.0:
        bf = ch.bit_flip(params.prep_error)
        for s in range(n):
            rho = apply_channel(rho, bf, (s,))
    return rho


def execute_native(circuit, params: NoiseParams, prepare: bool = True
                   ) -> np.ndarray:
    """Dense replay of a native circuit with per-gate decoherence.

    Within a scheduled layer all gates act on disjoint sites, so replaying
    ops in program order is equivalent to the layered execution used by the
    production runner under the per-gate timing model.
    """
    rho = initial_rho(circuit.n_qubits)
    if prepare:
        rho = apply_preparation(rho, params)
    for g in circuit.ops:
        if g.name == "grot":
            rho = apply_grot(rho, g.params[0], g.params[1], params)
        elif g.name == "rz":
            rho = apply_rz(rho, g.sites[0], g.params[0], params)
        elif g.name == "cz":
            rho = apply_cz(rho, g.sites[0], g.sites[1], params)
        else:
            raise ValueError(f"non-native gate {g.name}")
    return rho
