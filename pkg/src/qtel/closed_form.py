"""Closed-form Fisher information expressions for small photon numbers.

These are transcribed analytic results used to cross-check the numeric
engine; the numeric engine stays the source of truth for reported numbers.
Each loss term is a ratio whose denominator can reach zero on the boundary
of the parameter domain (full occupancy together with unit overlaps, or no
loss); there the numerator vanishes to higher order and the term is read as
zero.

Catalog identifiers:

* ``F2``            two photons, one overlap parameter
* ``F3_distinct``   three photons, independent overlaps (single-loss sum over
                    nine loss configurations)
* ``F3_identical``  three photons with a common overlap; the equal-overlap
                    slice of ``F3_distinct``
* ``F4_identical``  four mutually identical photons (six single-loss plus
                    fifteen double-loss configurations)

``three_photon_unit_occupancy`` covers the guaranteed-source limit
(occupancy weight 1) with independent overlaps, which is also what
``F3_distinct`` reduces to there.
"""

import math
from typing import Dict, Tuple

from .errors import DomainError

_SQRT3 = math.sqrt(3.0)


def _ratio(num: float, den: float) -> float:
    """Loss-term ratio with the boundary 0/0 read as zero."""
    if den < 1e-300:
        return 0.0
    return num / den


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def two_photon(phi: float, p: float, epsilon: float, overlap: float) -> float:
    """Fisher information for one ground photon; flat in phi."""
    _check_unit("p", p)
    _check_unit("epsilon", epsilon)
    _check_unit("overlap", overlap)
    return 0.5 * epsilon * (1.0 - p) * overlap


def three_photon_unit_occupancy(phi: float, p: float, i2: float, i3: float) -> float:
    """Three photons from a guaranteed source, independent overlaps."""
    _check_unit("p", p)
    _check_unit("i2", i2)
    _check_unit("i3", i3)
    c = math.cos(phi)
    q = 1.0 - p
    full = 0.5 * q * q * (6.0 * (1.0 + c) / (5.0 + 4.0 * c) * i2 * i3 + (i2 + i3) - 2.0 * i2 * i3)
    single_loss = 0.5 * p * q * (i2 + i3)
    return full + single_loss


def three_photon_loss_terms(
    phi: float, p: float, epsilon: float, i2: float, i3: float
) -> Tuple[float, ...]:
    """The nine single-loss contributions for three photons with independent
    overlaps; a2, b2, a3, b3 are the overlap amplitudes sqrt(I) and
    sqrt(1 - I) of the two ground photons."""
    s, c = math.sin(phi), math.cos(phi)
    q = 1.0 - p
    e = epsilon
    a2sq, a3sq = i2, i3
    b2sq, b3sq = 1.0 - i2, 1.0 - i3
    pq = p * q
    qq = q * q
    plus = 2.0 + _SQRT3 * s - c
    minus = 2.0 - _SQRT3 * s - c
    sp = (s + _SQRT3 * c) ** 2
    sm = (s - _SQRT3 * c) ** 2
    cross = 4.0 * a2sq * a3sq * qq * (1.0 - e)
    return (
        _ratio(a2sq**2 * b3sq**2 * e**2 * p * pq * q * s * s,
               6.0 * (e * pq * a2sq * b3sq * (1.0 + c) + cross)),
        _ratio(a3sq**2 * b2sq**2 * e**2 * p * pq * q * s * s,
               6.0 * (a3sq * b2sq * e * pq * (1.0 + c) + cross)),
        _ratio(a3sq**2 * a2sq**2 * e**2 * p * pq * q * s * s,
               3.0 * (cross + a2sq * a3sq * e * pq * (1.0 + c))),
        _ratio(a2sq**2 * b3sq**2 * e**2 * p * pq * q * sm,
               6.0 * (2.0 * a2sq * b3sq * e * pq * minus + cross)),
        _ratio(a3sq**2 * b2sq**2 * e**2 * p * pq * q * sp,
               6.0 * (2.0 * a3sq * b2sq * pq * e * plus + cross)),
        _ratio(a2sq**2 * a3sq**2 * e**2 * p * pq * q * sm,
               3.0 * (cross + 2.0 * a2sq * a3sq * pq * e * minus)),
        _ratio(a3sq**2 * a2sq**2 * e**2 * p * pq * q * sp,
               3.0 * (cross + 2.0 * a2sq * a3sq * pq * e * plus)),
        _ratio(a2sq**2 * b3sq**2 * e**2 * p * pq * q * sp,
               6.0 * (2.0 * a2sq * b3sq * pq * e * plus + cross)),
        _ratio(a3sq**2 * b2sq**2 * e**2 * p * pq * q * sm,
               6.0 * (2.0 * a3sq * b2sq * pq * e * minus + cross)),
    )


def three_photon_loss_terms_identical(phi: float, p: float, epsilon: float) -> Tuple[float, ...]:
    """The three single-loss contributions printed for mutually identical
    photons; equals the distinct list at unit overlaps."""
    s, c = math.sin(phi), math.cos(phi)
    q = 1.0 - p
    e = epsilon
    pq = p * q
    tail = 4.0 * (1.0 - e) * q * q
    return (
        _ratio(e**2 * p * pq * q * s * s, 3.0 * (e * pq * (1.0 + c) + tail)),
        _ratio(e**2 * p * pq * q * (s + _SQRT3 * c) ** 2,
               3.0 * (2.0 * e * pq * (2.0 + _SQRT3 * s - c) + tail)),
        _ratio(e**2 * p * pq * q * (s - _SQRT3 * c) ** 2,
               3.0 * (2.0 * e * pq * (2.0 - _SQRT3 * s - c) + tail)),
    )


def three_photon(phi: float, p: float, epsilon: float, i2: float, i3: float) -> float:
    """Three photons with source occupancy weight epsilon and independent
    overlaps."""
    _check_unit("p", p)
    _check_unit("epsilon", epsilon)
    _check_unit("i2", i2)
    _check_unit("i3", i3)
    c = math.cos(phi)
    q = 1.0 - p
    full = (
        0.5 * epsilon * q * q
        * (6.0 * (1.0 + c) / (5.0 + 4.0 * c) * i2 * i3 + (i2 + i3) - 2.0 * i2 * i3)
    )
    return full + sum(three_photon_loss_terms(phi, p, epsilon, i2, i3))


def four_photon_single_loss_terms(phi: float, p: float, epsilon: float) -> Tuple[float, ...]:
    """Single-loss contributions for four mutually identical photons."""
    s, c = math.sin(phi), math.cos(phi)
    q = 1.0 - p
    e = epsilon
    num_base = e * e * p * p * q**4
    miss = (1.0 - e) * q**3
    pqq = p * q * q
    return (
        _ratio(num_base * c * c, 4.0 * (2.0 * miss + e * pqq * (1.0 - s))),
        _ratio(num_base * c * c, 4.0 * (2.0 * miss + e * pqq * (1.0 + s))),
        _ratio(6.0 * num_base * s * s, 4.0 * (18.0 * miss + e * pqq * (5.0 + 4.0 * c))),
        _ratio(num_base * s * s, 2.0 * (2.0 * miss + e * pqq * (5.0 - 4.0 * c))),
        _ratio(num_base * (s + c) ** 2, 2.0 * (4.0 * miss + 2.0 * e * pqq * (3.0 + 2.0 * s - 2.0 * c))),
        _ratio(num_base * (s - c) ** 2, 2.0 * (4.0 * miss + 2.0 * e * pqq * (3.0 - 2.0 * s - 2.0 * c))),
    )


def four_photon_double_loss_terms(phi: float, p: float, epsilon: float) -> Tuple[float, ...]:
    """Double-loss contributions for four mutually identical photons.  The
    thirteenth entry is printed with a stray parenthesis in the source and is
    read as (cos(phi) + 1), matching the eighth."""
    s, c = math.sin(phi), math.cos(phi)
    q = 1.0 - p
    e = epsilon
    num = p**4 * q * q * e * e
    ppq = p * p * q
    miss = p * q * q * (1.0 - e)
    return (
        _ratio(num * s * s, 8.0 * (ppq * e * (1.0 + c) + 4.0 * miss)),
        _ratio(num * s * s, 16.0 * (ppq * e * (1.0 - c) + 2.0 * miss)),
        _ratio(num * c * c, 16.0 * (ppq * e * (1.0 + s) + 2.0 * miss)),
        _ratio(num * s * s, 16.0 * (ppq * e * (1.0 - c) + 2.0 * miss)),
        _ratio(num * c * c, 16.0 * (ppq * e * (1.0 - s) + 2.0 * miss)),
        _ratio(3.0 * num * s * s, 32.0 * (ppq * e * (1.0 - c) + 4.0 * miss)),
        _ratio(3.0 * num * s * s, 32.0 * (ppq * e * (1.0 + c) + 4.0 * miss)),
        _ratio(num * s * s, 8.0 * (ppq * e * (c + 1.0) + 4.0 * miss)),
        _ratio(num * s * s, 16.0 * (ppq * e * (1.0 - c) + 2.0 * miss)),
        _ratio(num * c * c, 16.0 * (ppq * e * (s + 1.0) + 2.0 * miss)),
        _ratio(num * s * s, 16.0 * (ppq * e * (1.0 - c) + 2.0 * miss)),
        _ratio(num * c * c, 16.0 * (ppq * e * (1.0 - s) + 2.0 * miss)),
        _ratio(num * s * s, 32.0 * (ppq * e * (c + 1.0) + 4.0 * miss)),
        _ratio(num * s * s, 32.0 * (ppq * e * (1.0 - c) + 4.0 * miss)),
        0.5 * q * p * p * e,
    )


def four_photon(phi: float, p: float, epsilon: float) -> float:
    """Four mutually identical photons with source occupancy weight epsilon."""
    _check_unit("p", p)
    _check_unit("epsilon", epsilon)
    c = math.cos(phi)
    q = 1.0 - p
    full = 3.0 * epsilon * q**3 * (9.0 + 7.0 * c) / (8.0 * (5.0 + 3.0 * c))
    return (
        full
        + sum(four_photon_single_loss_terms(phi, p, epsilon))
        + sum(four_photon_double_loss_terms(phi, p, epsilon))
    )


def sector_values(
    catalog_id: str, phi: float, p: float, epsilon: float, indist: Tuple[float, ...]
) -> Dict[int, float]:
    """Per-detected-count decomposition of a catalog entry, for comparison
    against the numeric sector breakdown."""
    if catalog_id == "F2":
        return {2: two_photon(phi, p, epsilon, indist[0]), 1: 0.0}
    if catalog_id in ("F3_distinct", "F3_identical"):
        i2, i3 = _three_overlaps(catalog_id, indist)
        c = math.cos(phi)
        q = 1.0 - p
        full = (
            0.5 * epsilon * q * q
            * (6.0 * (1.0 + c) / (5.0 + 4.0 * c) * i2 * i3 + (i2 + i3) - 2.0 * i2 * i3)
        )
        return {3: full, 2: sum(three_photon_loss_terms(phi, p, epsilon, i2, i3))}
    if catalog_id == "F4_identical":
        c = math.cos(phi)
        q = 1.0 - p
        full = 3.0 * epsilon * q**3 * (9.0 + 7.0 * c) / (8.0 * (5.0 + 3.0 * c))
        return {
            4: full,
            3: sum(four_photon_single_loss_terms(phi, p, epsilon)),
            2: sum(four_photon_double_loss_terms(phi, p, epsilon)),
        }
    raise DomainError(f"unknown catalog id {catalog_id!r}")


def _three_overlaps(catalog_id: str, indist: Tuple[float, ...]) -> Tuple[float, float]:
    if catalog_id == "F3_identical":
        if len(indist) == 1:
            return indist[0], indist[0]
        if len(set(indist)) != 1:
            raise DomainError("F3_identical requires a single common overlap")
    if len(indist) != 2:
        raise DomainError("three-photon forms take two overlap values")
    return indist[0], indist[1]


CATALOG_IDS = ("F2", "F3_distinct", "F3_identical", "F4_identical")


def closed_form(
    catalog_id: str, phi: float, p: float, epsilon: float, indist: Tuple[float, ...] = (1.0,)
) -> float:
    """Evaluate a catalog entry by identifier."""
    _check_unit("p", p)
    _check_unit("epsilon", epsilon)
    for x in indist:
        _check_unit("overlap", x)
    if catalog_id == "F2":
        if len(indist) != 1:
            raise DomainError("F2 takes a single overlap value")
        return two_photon(phi, p, epsilon, indist[0])
    if catalog_id in ("F3_distinct", "F3_identical"):
        i2, i3 = _three_overlaps(catalog_id, indist)
        return three_photon(phi, p, epsilon, i2, i3)
    if catalog_id == "F4_identical":
        if any(x != 1.0 for x in indist):
            raise DomainError("F4_identical is only available for unit overlaps")
        return four_photon(phi, p, epsilon)
    raise DomainError(f"unknown catalog id {catalog_id!r}")
