"""Exact product expansion and counter marginals."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtel.errors import CapacityExceededError, UnknownModeError
from qtel.fock import (
    MU,
    LinearMap,
    Mode,
    ModeKind,
    PhotonForm,
    expand_product,
    marginal_distribution,
    nu,
    qft_matrix,
    substitute,
)

L1 = Mode(ModeKind.DETECTOR_LEFT, 1, MU)
L2 = Mode(ModeKind.DETECTOR_LEFT, 2, MU)
R1 = Mode(ModeKind.DETECTOR_RIGHT, 1, MU)
S = 1.0 / math.sqrt(2.0)


def test_hom_bunching_amplitudes():
    sym = PhotonForm({L1: S, R1: S})
    anti = PhotonForm({L1: S, R1: -S})
    state = expand_product([sym, anti])
    assert state.amplitude({L1: 2}) == pytest.approx(S)
    assert state.amplitude({R1: 2}) == pytest.approx(-S)
    assert abs(state.amplitude({L1: 1, R1: 1})) < 1e-15
    assert state.norm_sq() == pytest.approx(1.0)


def test_qft_is_unitary():
    for n in range(2, 6):
        u = qft_matrix(n)
        assert np.allclose(u @ u.conj().T, np.eye(n), atol=1e-12)


def test_qft_two_port_entries():
    expected = np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2.0)
    assert np.allclose(qft_matrix(2), expected, atol=1e-12)


def test_capacity_cap():
    form = PhotonForm({L1: 1.0})
    with pytest.raises(CapacityExceededError):
        expand_product([form] * 7)
    with pytest.raises(CapacityExceededError):
        expand_product([])


def test_substitute_rejects_undeclared_modes():
    mapping = LinearMap({L1: {L1: 1.0}})
    with pytest.raises(UnknownModeError):
        substitute(PhotonForm({R1: 1.0}), mapping)


def _enumerated_amplitudes(forms):
    """Oracle: expand by picking one term per photon, then attach the
    multiplicity factor sqrt(prod n_m!)."""
    poly = {}
    for choice in itertools.product(*(form.coeff.items() for form in forms)):
        key = tuple(sorted(mode for mode, _ in choice))
        coeff = 1.0 + 0.0j
        for _, amp in choice:
            coeff *= amp
        poly[key] = poly.get(key, 0.0 + 0.0j) + coeff
    out = {}
    for key, coeff in poly.items():
        fact, run = 1, 1
        for prev, cur in zip(key, key[1:]):
            if cur == prev:
                run += 1
                fact *= run
            else:
                run = 1
        out[key] = coeff * math.sqrt(fact)
    return out


def test_expansion_matches_term_enumeration():
    rng = np.random.default_rng(7)
    modes = [L1, L2, Mode(ModeKind.DETECTOR_RIGHT, 1, nu(1)), Mode(ModeKind.ENV_LEFT, 2, MU)]
    for _ in range(5):
        forms = [
            PhotonForm({m: complex(rng.normal(), rng.normal()) for m in modes})
            for _ in range(3)
        ]
        state = expand_product(forms)
        oracle = _enumerated_amplitudes(forms)
        for key in set(state.amplitudes) | set(oracle):
            assert state.amplitudes.get(key, 0j) == pytest.approx(oracle.get(key, 0j), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.permutations(range(3)),
    st.lists(
        st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
        min_size=9,
        max_size=9,
    ),
)
def test_photon_order_is_irrelevant(order, flat):
    modes = (L1, L2, R1)
    forms = [PhotonForm({m: flat[3 * i + j] for j, m in enumerate(modes)}) for i in range(3)]
    base = expand_product(forms).amplitudes
    shuffled = expand_product([forms[i] for i in order]).amplitudes
    for key in set(base) | set(shuffled):
        assert base.get(key, 0j) == pytest.approx(shuffled.get(key, 0j), abs=1e-9)


def test_marginal_sums_internal_labels():
    split = PhotonForm({L1: S, Mode(ModeKind.DETECTOR_LEFT, 1, nu(1)): S})
    probs = marginal_distribution(expand_product([split]))
    assert probs == {(((ModeKind.DETECTOR_LEFT, 1), 1),): pytest.approx(1.0)}


def test_marginal_traces_out_unobserved():
    half_lost = PhotonForm({L1: S, Mode(ModeKind.ENV_LEFT, 1, MU): S})
    probs = marginal_distribution(expand_product([half_lost]))
    assert probs[()] == pytest.approx(0.5)
    assert probs[(((ModeKind.DETECTOR_LEFT, 1), 1),)] == pytest.approx(0.5)


def test_unitary_mixing_preserves_norm():
    n = 3
    matrix = qft_matrix(n)
    rules = {
        Mode(ModeKind.DETECTOR_LEFT, j, MU): {
            Mode(ModeKind.DETECTOR_LEFT, k, MU): matrix[j - 1, k - 1] for k in range(1, n + 1)
        }
        for j in range(1, n + 1)
    }
    mixer = LinearMap(rules)
    forms = []
    for j in range(1, n + 1):
        forms.append(substitute(PhotonForm({Mode(ModeKind.DETECTOR_LEFT, j, MU): 1.0}), mixer))
    state = expand_product(forms)
    assert state.norm_sq() == pytest.approx(1.0, abs=1e-12)
