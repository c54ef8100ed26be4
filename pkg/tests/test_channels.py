"""Channel constructors: CPTP property, parameter validation, scaling."""

import math

import numpy as np
import pytest

from atombench import channels as ch
from atombench.channels import KrausSet, NoiseParams
from atombench.errors import ValidationError

TABLE_RATES = NoiseParams()


def cptp_defect(kraus: KrausSet) -> float:
    s = sum(a.conj().T @ a for a in kraus.operators)
    return float(np.max(np.abs(s - np.eye(kraus.dim))))


def all_channels(p: float, params: NoiseParams):
    yield ch.depolarization(p)
    yield ch.phase_flip(p)
    yield ch.bit_flip(p)
    yield ch.loss_channel(p, "dark")
    yield ch.loss_channel(p, "bright")
    yield ch.decay(p)
    yield ch.correlated_phase_flip(p)
    yield ch.conditional_phase_flip(p)
    pop, deph = ch.decoherence(p * 1e-3, params)  # p reused as a time knob
    yield pop
    yield deph


def test_cptp_at_table_rates():
    p = TABLE_RATES
    rates = [p.uw_depol_per_pi, p.rz_phaseflip_per_pi, p.rz_loss_dark_per_pi,
             p.rz_loss_bright_per_pi, p.rz_decay_per_pi, p.cz_phaseflip,
             p.cz_loss_dark, p.cz_loss_bright, p.cz_decay, p.prep_error,
             p.meas_error]
    for r in rates:
        for kraus in all_channels(r, p):
            assert cptp_defect(kraus) < 1e-10, kraus.label


def test_cptp_parameter_sweep():
    for r in np.linspace(0.0, 1.0, 20):
        for kraus in all_channels(float(r), TABLE_RATES):
            assert cptp_defect(kraus) < 1e-10, (kraus.label, r)


def test_kraus_set_rejects_non_cptp():
    with pytest.raises(ValidationError):
        KrausSet((np.eye(4) * 0.5,), label="broken")


def test_probability_validation():
    for ctor in (ch.depolarization, ch.phase_flip, ch.bit_flip, ch.decay,
                 ch.correlated_phase_flip, ch.conditional_phase_flip):
        with pytest.raises(ValidationError):
            ctor(-0.1)
        with pytest.raises(ValidationError):
            ctor(1.1)
    with pytest.raises(ValidationError):
        ch.loss_channel(0.1, "sideways")


def test_scaled_probability_linear_and_clamped():
    assert ch.scaled_probability(0.01, math.pi) == pytest.approx(0.01)
    assert ch.scaled_probability(0.01, math.pi / 2) == pytest.approx(0.005)
    assert ch.scaled_probability(0.01, -math.pi) == pytest.approx(0.01)
    assert ch.scaled_probability(0.9, 4 * math.pi) == 1.0


def test_noise_params_validation():
    with pytest.raises(ValidationError):
        NoiseParams(cz_phaseflip=1.5)
    with pytest.raises(ValidationError):
        NoiseParams(t1=1e-6, t2_star=1.0)  # t2* may not exceed t1
    with pytest.raises(ValidationError):
        NoiseParams(dur_cz=0.0)
    with pytest.raises(ValidationError):
        NoiseParams(cz_phaseflip_mode="sometimes")


def test_noise_params_round_trip_and_unknown_key():
    p = NoiseParams(cz_phaseflip=0.01)
    q = NoiseParams.from_dict(p.to_dict())
    assert q == p
    with pytest.raises(ValidationError):
        NoiseParams.from_dict({"cz_phaseflop": 0.01})


def test_conditional_phase_flip_action():
    # With probability p the entangling phase of |11> is flipped.
    kraus = ch.conditional_phase_flip(0.25)
    rho = np.full((16, 16), 1 / 16.0, dtype=complex)
    out = sum(a @ rho @ a.conj().T for a in kraus.operators)
    assert out[0, 0] == pytest.approx(1 / 16)
    assert out[0, 5] == pytest.approx((1 - 2 * 0.25) / 16)
    assert out[5, 5] == pytest.approx(1 / 16)


def test_loss_channel_moves_only_bright_or_dark():
    rho = np.diag([0.3, 0.7, 0.0, 0.0]).astype(complex)
    for target, idx in (("dark", 2), ("bright", 3)):
        kraus = ch.loss_channel(0.1, target)
        out = sum(a @ rho @ a.conj().T for a in kraus.operators)
        assert out[0, 0] == pytest.approx(0.3)     # |0> untouched
        assert out[1, 1] == pytest.approx(0.63)    # |1> keeps 90%
        assert out[idx, idx] == pytest.approx(0.07)


def test_decoherence_matches_direct_action():
    rng = np.random.default_rng(11)
    p = NoiseParams()
    for _ in range(100):
        t = float(rng.uniform(0, 5e-3))
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        rho = np.zeros((4, 4), dtype=complex)
        rho[:2, :2] = np.outer(psi, psi.conj())
        pop, deph = ch.decoherence(t, p)
        out = sum(a @ rho @ a.conj().T for a in pop.operators)
        out = sum(a @ out @ a.conj().T for a in deph.operators)
        direct = ch.decoherence_direct_action(rho, t, p)
        assert np.max(np.abs(out - direct)) < 1e-12


def test_decoherence_equilibrium():
    p = NoiseParams()
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = 1.0
    out = ch.decoherence_direct_action(rho, 1e6 * p.t1, p)
    assert np.allclose(np.diag(out)[:2], [0.42, 0.58], atol=1e-12)


def test_decoherence_rejects_negative_time():
    with pytest.raises(ValidationError):
        ch.decoherence(-1.0, NoiseParams())
