"""Noisy native gates: ideal unitary first, then the gate's error channels,
then idle decoherence.

Gate error channels follow the fixed ordering: the unitary itself, then
(for the microwave gate) depolarization, (for the local Rz) phase-flip,
decay and both loss channels, (for the CZ) loss channels, decay, phase-flip
and the conditional-phase offset; T1/T2* decoherence is always last.

The CZ phase-flip is applied either as one correlated ZZ flip or as an
independent flip on each site, selected by ``NoiseParams.cz_phaseflip_mode``.
The Table-derived conditional phase offset is coherent: diag(1,1,1,e^{i d})
on the computational block of the pair.
"""

from __future__ import annotations

import math

import numpy as np

from . import channels as ch
from .channels import KrausSet, NoiseParams
from .state import QuquartState


def global_rotation_matrix(phi: float, theta: float) -> np.ndarray:
    """4x4 rotation about the equatorial axis at angle phi; identity on loss."""
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    u = np.eye(4, dtype=complex)
    u[0, 0] = c
    u[0, 1] = -1j * s * np.exp(-1j * phi)
    u[1, 0] = -1j * s * np.exp(1j * phi)
    u[1, 1] = c
    return u


def rz_matrix(theta: float) -> np.ndarray:
    """4x4 local Rz(theta) = diag(e^{-i t/2}, e^{i t/2}, 1, 1)."""
    u = np.eye(4, dtype=complex)
    u[0, 0] = np.exp(-1j * theta / 2.0)
    u[1, 1] = np.exp(1j * theta / 2.0)
    return u


def cz_matrix() -> np.ndarray:
    """16x16 controlled-Z on the computational block of a site pair."""
    u = np.eye(16, dtype=complex)
    u[5, 5] = -1.0  # |11><11|
    return u


def cz_phaseshift_matrix(delta: float) -> np.ndarray:
    """Coherent conditional-phase offset diag(1, 1, 1, e^{i delta})."""
    u = np.eye(16, dtype=complex)
    u[5, 5] = np.exp(1j * delta)
    return u


def apply_decoherence(state: QuquartState, t: float, params: NoiseParams,
                      sites=None) -> QuquartState:
    """Idle T1/T2* decoherence over time t on the given sites (default all)."""
    if t <= 0.0:
        return state
    pop, deph = ch.decoherence(t, params)
    if sites is None:
        sites = range(state.n_sites)
    for s in sites:
        state.apply_channel((s,), pop)
        state.apply_channel((s,), deph)
    return state


def apply_noisy_global_rotation(state: QuquartState, phi: float, theta: float,
                                params: NoiseParams, decohere: bool = True
                                ) -> QuquartState:
    state.apply_global_unitary(global_rotation_matrix(phi, theta))
    p = ch.scaled_probability(params.uw_depol_per_pi, theta)
    if p > 0.0:
        depol = ch.depolarization(p)
        for s in range(state.n_sites):
            state.apply_channel((s,), depol)
    if decohere:
        apply_decoherence(state, params.dur_uw_pi * abs(theta) / math.pi, params)
    return state


def apply_noisy_local_rz(state: QuquartState, site: int, theta: float,
                         params: NoiseParams, decohere: bool = True
                         ) -> QuquartState:
    state.apply_site_unitary(site, rz_matrix(theta))
    scale = lambda r: ch.scaled_probability(r, theta)
    for kraus in (
        ch.phase_flip(scale(params.rz_phaseflip_per_pi)),
        ch.decay(scale(params.rz_decay_per_pi)),
        ch.loss_channel(scale(params.rz_loss_dark_per_pi), "dark"),
        ch.loss_channel(scale(params.rz_loss_bright_per_pi), "bright"),
    ):
        state.apply_channel((site,), kraus)
    if decohere:
        apply_decoherence(state, params.dur_rz_pi * abs(theta) / math.pi, params,
                          sites=(site,))
    return state


def apply_noisy_cz(state: QuquartState, site_a: int, site_b: int,
                   params: NoiseParams, decohere: bool = True) -> QuquartState:
    sites = (site_a, site_b)
    state.apply_channel(sites, KrausSet((cz_matrix(),), label="cz"))
    for target, p in (("dark", params.cz_loss_dark), ("bright", params.cz_loss_bright)):
        kraus = ch.loss_channel(p, target)
        for s in sites:
            state.apply_channel((s,), kraus)
    dec = ch.decay(params.cz_decay)
    for s in sites:
        state.apply_channel((s,), dec)
    if params.cz_phaseflip_mode == "conditional":
        state.apply_channel(sites, ch.conditional_phase_flip(params.cz_phaseflip))
    elif params.cz_phaseflip_mode == "correlated":
        state.apply_channel(sites, ch.correlated_phase_flip(params.cz_phaseflip))
    else:
        pf = ch.phase_flip(params.cz_phaseflip)
        for s in sites:
            state.apply_channel((s,), pf)
    if params.cz_phaseshift != 0.0:
        state.apply_channel(
            sites, KrausSet((cz_phaseshift_matrix(params.cz_phaseshift),),
                            label="cz_phaseshift")
        )
    if decohere:
        apply_decoherence(state, params.dur_cz, params, sites=sites)
    return state


def apply_preparation(state: QuquartState, params: NoiseParams) -> QuquartState:
    """Independent bit-flip preparation error on every site; run at t=0."""
    if params.prep_error > 0.0:
        bf = ch.bit_flip(params.prep_error)
        for s in range(state.n_sites):
            state.apply_channel((s,), bf)
    return state
