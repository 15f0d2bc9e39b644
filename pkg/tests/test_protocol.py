"""Branch construction, trig tables and the source mixture."""

import math

import numpy as np
import pytest

from qtel.errors import ConfigInvalidError
from qtel.fock import MU, Mode, ModeKind, PhotonForm, nu, substitute
from qtel.protocol import (
    Branch,
    ExperimentConfig,
    NuPolicy,
    alpha_for_loss,
    branch_tables,
    build_forms,
    distinguish_map,
    distribution,
    loss_map,
    mixture_port_trig,
    mixture_probability,
    port_text,
)

DL, DR = ModeKind.DETECTOR_LEFT, ModeKind.DETECTOR_RIGHT


def _port_mixture_direct(config, phi):
    """Counter distribution straight from the states at one phase; no trig
    solve involved."""
    present = distribution(build_forms(config, Branch.STAR_PRESENT), phi)
    absent = distribution(build_forms(config, Branch.STAR_ABSENT), phi)
    out = {}
    for ports, prob in present.items():
        out[ports] = out.get(ports, 0.0) + config.epsilon * prob
    for ports, prob in absent.items():
        out[ports] = out.get(ports, 0.0) + (1.0 - config.epsilon) * prob
    return out


def test_config_validation():
    with pytest.raises(ConfigInvalidError):
        ExperimentConfig(photons=7)
    with pytest.raises(ConfigInvalidError):
        ExperimentConfig(photons=2, epsilon=1.5)
    with pytest.raises(ConfigInvalidError):
        ExperimentConfig(photons=3, indist=(0.5,))
    with pytest.raises(ConfigInvalidError):
        ExperimentConfig(photons=2, alpha=-0.1)
    with pytest.raises(ConfigInvalidError):
        ExperimentConfig(photons=2, indist=(1.2,))


def test_alpha_for_loss_roundtrip():
    for p in (0.0, 0.3, 0.9):
        config = ExperimentConfig(photons=2, alpha=alpha_for_loss(p))
        assert config.loss_prob == pytest.approx(p, abs=1e-15)


def test_distinguish_map_amplitudes():
    config = ExperimentConfig(photons=2, indist=(0.36,))
    probe = substitute(PhotonForm({Mode(DL, 2, MU): 1.0}), distinguish_map(config, 2))
    assert probe.coeff[Mode(DL, 2, MU)] == pytest.approx(0.6)
    assert probe.coeff[Mode(DL, 2, nu(2))] == pytest.approx(0.8)
    assert probe.norm_sq() == pytest.approx(1.0)


def test_loss_map_splits_transmission():
    config = ExperimentConfig(photons=2, alpha=1.7)
    eta = math.exp(-1.7 / 4.0)
    probe = substitute(PhotonForm({Mode(DR, 2, MU): 1.0}), loss_map(config, 2))
    assert probe.coeff[Mode(DR, 2, MU)] == pytest.approx(eta)
    assert probe.coeff[Mode(ModeKind.ENV_RIGHT, 2, MU)] == pytest.approx(math.sqrt(1 - eta * eta))
    assert probe.norm_sq() == pytest.approx(1.0)


def test_forms_stay_normalized():
    config = ExperimentConfig(photons=3, indist=(0.7, 0.4), alpha=2.3)
    for branch in (Branch.STAR_PRESENT, Branch.STAR_ABSENT):
        for form in build_forms(config, branch):
            assert form.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_unit_overlap_uses_no_deviating_packets():
    config = ExperimentConfig(photons=3, alpha=1.0)
    for form in build_forms(config, Branch.STAR_PRESENT):
        for mode in list(form.static.coeff) + list(form.rotating.coeff):
            assert mode.label == MU


def test_mixture_sums_to_one():
    rng = np.random.default_rng(3)
    for photons in (2, 3):
        config = ExperimentConfig(
            photons=photons,
            epsilon=float(rng.uniform()),
            indist=tuple(rng.uniform(size=photons - 1)),
            alpha=float(rng.uniform(0.0, 3.0)),
        )
        tables = branch_tables(config)
        for phi in rng.uniform(-math.pi, math.pi, size=20):
            total = sum(mixture_probability(tables, config.epsilon, float(phi)).values())
            assert total == pytest.approx(1.0, abs=1e-12)


def test_ideal_two_port_rows():
    config = ExperimentConfig(photons=2)
    rows = mixture_port_trig(branch_tables(config), config.epsilon)
    both_one = (((DL, 1), 1), ((DR, 1), 1))
    cross = (((DL, 2), 1), ((DR, 1), 1))
    same_left = (((DL, 1), 2),)
    for phi in (0.0, 0.9, -2.2):
        assert rows[both_one].value(phi) == pytest.approx((1 + math.cos(phi)) / 8, abs=1e-12)
        assert rows[cross].value(phi) == pytest.approx((1 - math.cos(phi)) / 8, abs=1e-12)
        assert rows[same_left].value(phi) == pytest.approx(0.125, abs=1e-12)


def test_port_text_rendering():
    assert port_text((((DL, 2), 1), ((DR, 1), 1))) == "L2:1 R1:1"
    assert port_text(()) == "-"


def test_nu_policies_agree_with_one_distinguishable_photon():
    shared = ExperimentConfig(
        photons=3, epsilon=0.6, indist=(0.7, 1.0), alpha=1.1, nu_policy=NuPolicy.SHARED
    )
    distinct = ExperimentConfig(
        photons=3, epsilon=0.6, indist=(0.7, 1.0), alpha=1.1, nu_policy=NuPolicy.DISTINCT
    )
    rows_s = mixture_port_trig(branch_tables(shared), 0.6)
    rows_d = mixture_port_trig(branch_tables(distinct), 0.6)
    assert set(rows_s) == set(rows_d)
    for ports in rows_s:
        for phi in (0.0, 1.3):
            assert rows_s[ports].value(phi) == pytest.approx(rows_d[ports].value(phi), abs=1e-12)


def test_heavy_attenuation_leaves_reference_photon_alone():
    config = ExperimentConfig(photons=2, alpha=200.0)
    rows = mixture_port_trig(branch_tables(config), 1.0)
    for slot in (1, 2):
        for kind in (DL, DR):
            tp = rows[(((kind, slot), 1),)]
            assert tp.a == pytest.approx(0.25, abs=1e-12)
            assert tp.swing < 1e-12


def test_trig_tables_match_direct_evaluation():
    rng = np.random.default_rng(5)
    for photons in (2, 2, 3, 3):
        config = ExperimentConfig(
            photons=photons,
            epsilon=float(rng.uniform()),
            indist=tuple(rng.uniform(size=photons - 1)),
            alpha=float(rng.uniform(0.0, 3.0)),
        )
        phi = float(rng.uniform(-math.pi, math.pi))
        direct = _port_mixture_direct(config, phi)
        trig = mixture_port_trig(branch_tables(config), config.epsilon)
        for ports in set(direct) | set(trig):
            reconstructed = trig[ports].value(phi) if ports in trig else 0.0
            assert reconstructed == pytest.approx(direct.get(ports, 0.0), abs=1e-12)


def test_station_swap_mirrors_phase():
    config = ExperimentConfig(photons=3, epsilon=0.8, indist=(0.9, 0.6), alpha=1.4)
    rows = mixture_port_trig(branch_tables(config), config.epsilon)

    def swap(ports):
        flipped = tuple(
            ((DR if kind is DL else DL, slot), count) for (kind, slot), count in ports
        )
        return tuple(sorted(flipped))

    for ports, tp in rows.items():
        partner = rows[swap(ports)]
        for phi in (0.4, 2.0):
            assert tp.value(phi) == pytest.approx(partner.value(-phi), abs=1e-12)
