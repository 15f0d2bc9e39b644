"""Exact few-photon state algebra.

Single photons are represented as linear forms in creation operators over a
set of labelled modes.  Products of such forms applied to vacuum are expanded
symbolically into number-state amplitudes, which is exact and cheap for the
photon counts handled here (at most six).  No permanents, no truncated Fock
spaces.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Dict, Iterable, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import CapacityExceededError, UnknownModeError

#: Amplitudes below this magnitude are dropped after every algebraic step.
PRUNE_TOL = 1e-15

#: Hard cap on the number of photons in one exact expansion.
PHOTON_CAP = 6


class ModeKind(IntEnum):
    """Where a mode physically lives.

    Detector modes are observed; environment modes absorb photons lost in
    transmission and are traced out.  The integer values fix the canonical
    ordering used for occupation keys.
    """

    DETECTOR_LEFT = 0
    DETECTOR_RIGHT = 1
    ENV_LEFT = 2
    ENV_RIGHT = 3


#: Internal wave-packet label of the shared reference packet.
MU = ("mu", 0)


def nu(index: int) -> Tuple[str, int]:
    """Internal label for an orthogonal wave packet.  Index 0 is the shared
    packet used when all ground photons deviate identically; positive indices
    tag per-photon packets."""
    return ("nu", index)


class Mode(NamedTuple):
    """A single bosonic mode: physical location, port slot, internal label."""

    kind: ModeKind
    slot: int
    label: Tuple[str, int]


def is_detector(mode: Mode) -> bool:
    return mode.kind in (ModeKind.DETECTOR_LEFT, ModeKind.DETECTOR_RIGHT)


@dataclass
class PhotonForm:
    """A single-photon creation operator written in a mode basis.

    ``coeff`` maps each mode to its complex amplitude.  Entries below
    :data:`PRUNE_TOL` are discarded on construction.
    """

    coeff: Dict[Mode, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.coeff = {m: complex(c) for m, c in self.coeff.items() if abs(c) >= PRUNE_TOL}

    def norm_sq(self) -> float:
        return sum(abs(c) ** 2 for c in self.coeff.values())

    def support(self) -> Tuple[Mode, ...]:
        return tuple(sorted(self.coeff))

    def scaled(self, factor: complex) -> "PhotonForm":
        return PhotonForm({m: c * factor for m, c in self.coeff.items()})


@dataclass
class LinearMap:
    """A linear rewrite of creation operators, mode by mode.

    ``rules[m]`` gives the output decomposition of input mode ``m``.  Maps are
    composed by repeated substitution, so unitarity is a property of the
    rules, not of this container.
    """

    rules: Dict[Mode, Dict[Mode, complex]]

    def inputs(self) -> Tuple[Mode, ...]:
        return tuple(self.rules)


def substitute(form: PhotonForm, mapping: LinearMap) -> PhotonForm:
    """Rewrite every mode in ``form`` through ``mapping``.

    Raises :class:`UnknownModeError` if the form touches a mode the map does
    not define.  Norm is preserved whenever the map restricted to the form's
    support is an isometry.
    """
    out: Dict[Mode, complex] = defaultdict(complex)
    for mode, amp in form.coeff.items():
        try:
            targets = mapping.rules[mode]
        except KeyError:
            raise UnknownModeError(f"map does not define mode {mode}") from None
        for target, weight in targets.items():
            out[target] += amp * weight
    return PhotonForm(dict(out))


def qft_matrix(n: int) -> np.ndarray:
    """Discrete-Fourier multiport matrix with entries exp(2*pi*i*j*k/n)/sqrt(n)
    for port indices j, k running from 1 to n."""
    j = np.arange(1, n + 1)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / math.sqrt(n)


# An occupation is stored as the sorted tuple of occupied modes, with
# repetition.  Sorting makes the key canonical.
Occupation = Tuple[Mode, ...]


@dataclass
class FockState:
    """Number-state decomposition of an n-photon state.

    ``amplitudes`` maps canonical occupations to complex amplitudes.  States
    produced by :func:`expand_product` are normalized as long as the input
    forms are orthonormal in the usual bosonic sense.
    """

    amplitudes: Dict[Occupation, complex]
    photons: int

    def norm_sq(self) -> float:
        return sum(abs(a) ** 2 for a in self.amplitudes.values())

    def amplitude(self, occupation: Mapping[Mode, int]) -> complex:
        key_parts = []
        for mode, count in occupation.items():
            key_parts.extend([mode] * count)
        return self.amplitudes.get(tuple(sorted(key_parts)), 0.0 + 0.0j)


def _sqrt_multiplicity_factor(occupation: Occupation) -> float:
    """sqrt(prod_m n_m!) for the occupation; converts a monomial coefficient
    of creation operators into a number-state amplitude."""
    factor = 1.0
    run = 1
    for prev, cur in zip(occupation, occupation[1:]):
        if cur == prev:
            run += 1
            factor *= run
        else:
            run = 1
    return math.sqrt(factor)


def expand_product(forms: Sequence[PhotonForm]) -> FockState:
    """Expand a product of single-photon forms applied to vacuum.

    The product of linear forms is multiplied out monomial by monomial;
    coefficients of equal monomials merge as the product grows, and the final
    amplitude on each occupation is the monomial coefficient times
    sqrt(prod_m n_m!).
    """
    if len(forms) > PHOTON_CAP:
        raise CapacityExceededError(
            f"{len(forms)} photons requested, exact expansion is capped at {PHOTON_CAP}"
        )
    if not forms:
        raise CapacityExceededError("expand_product requires at least one form")

    poly: Dict[Occupation, complex] = {(): 1.0 + 0.0j}
    for form in forms:
        grown: Dict[Occupation, complex] = defaultdict(complex)
        for key, acc in poly.items():
            for mode, amp in form.coeff.items():
                grown[tuple(sorted(key + (mode,)))] += acc * amp
        poly = {k: v for k, v in grown.items() if abs(v) >= PRUNE_TOL}

    amplitudes = {key: coeff * _sqrt_multiplicity_factor(key) for key, coeff in poly.items()}
    return FockState(amplitudes, len(forms))


# A signature key lists (mode, count) pairs for the occupied modes, sorted.
SignatureKey = Tuple[Tuple[Mode, int], ...]

# What a photon counter can actually report: counts per (kind, slot), with
# the internal wave-packet label summed out.
PortSignature = Tuple[Tuple[Tuple[ModeKind, int], int], ...]


def _port_signature_of(
    occupation: Occupation, observed: Callable[[Mode], bool]
) -> PortSignature:
    counts: Dict[Tuple[ModeKind, int], int] = {}
    for mode in occupation:
        if observed(mode):
            port = (mode.kind, mode.slot)
            counts[port] = counts.get(port, 0) + 1
    return tuple(sorted(counts.items()))


def marginal_distribution(
    state: FockState, observed: Callable[[Mode], bool] = is_detector
) -> Dict[PortSignature, float]:
    """Probability of each observed counter readout, tracing out the rest.

    Counts are aggregated per (kind, slot): the counters cannot tell internal
    wave packets apart, so labels are summed over.  Distinct occupations are
    orthogonal, so the trace is an incoherent sum of squared amplitudes over
    everything the predicate rejects or the aggregation folds together.
    """
    probs: Dict[PortSignature, float] = defaultdict(float)
    for occupation, amp in state.amplitudes.items():
        probs[_port_signature_of(occupation, observed)] += abs(amp) ** 2
    return dict(probs)
