"""Classical Fisher information of the detection record.

Every fully resolved event e of the reference-photon branch (detector counts
plus the record of where each lost photon went) contributes

    F(phi) = sum_e eps^2 (dP_B(e)/dphi)^2 / (eps P_B(e) + (1 - eps) P_A(d(e)))

where d(e) is the event's detector part and P_A(d) the probability that the
reference-photon-absent branch shows the same counter readout.  Keeping the
loss record resolved matters: events that lose different photons oscillate
with opposite phase offsets, and folding them together cancels information
the protocol does recover.  The absent branch carries no phase, so it enters
only through the denominators.

Each event probability is A + B cos(phi) + C sin(phi), which lets every term
be evaluated in closed form.  Events whose probability touches zero at
isolated phases are kept: writing the oscillation as rho*cos(phi - psi) and
using half-angle identities removes the apparent 0/0, whose limit is the
correct information content (2 * eps * A at a zero), not zero.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .protocol import (
    BranchTables,
    ExperimentConfig,
    TrigProbability,
    alpha_for_loss,
    branch_tables,
)

_TINY = 1e-300


def _stable_term(
    rho: float, psi: float, margin: float, p_absent: float, epsilon: float, phi: float
) -> float:
    """One signature's contribution, stable across probability zeros.

    margin is a - rho clamped at zero; the denominator is then a sum of
    non-negative pieces and the half-angle factor cancels analytically when
    everything else vanishes.
    """
    if rho <= 0.0 or epsilon <= 0.0:
        return 0.0
    u = 0.5 * (phi - psi)
    cos_u2 = math.cos(u) ** 2
    sin_u2 = math.sin(u) ** 2
    denom = (1.0 - epsilon) * p_absent + epsilon * margin + 2.0 * epsilon * rho * cos_u2
    if denom < _TINY:
        return 0.0
    return 4.0 * epsilon**2 * rho**2 * sin_u2 * cos_u2 / denom


def _margin(tp: TrigProbability) -> float:
    """Distance of the probability floor from zero, with rounding noise in
    the subtraction snapped to an exact zero."""
    m = tp.a - tp.swing
    if m < 1e-12 * tp.a:
        return 0.0
    return m


@dataclass
class FisherBreakdown:
    """Fisher information split by the number of detected photons."""

    total: float
    by_sector: Dict[int, float]
    phi: float
    epsilon: float
    loss_prob: float

    def sector(self, detected: int) -> float:
        return self.by_sector.get(detected, 0.0)


def fisher_numeric(
    tables: BranchTables, phi: float, epsilon: Optional[float] = None
) -> FisherBreakdown:
    """Fisher information of the mixture, from exact branch tables."""
    if epsilon is None:
        epsilon = tables.config.epsilon
    loss = tables.config.loss_prob
    by_sector: Dict[int, float] = {}
    if epsilon <= 0.0:
        return FisherBreakdown(0.0, by_sector, phi, epsilon, loss)

    absent_counts = {sig: tp.a for sig, tp in tables.absent.detector_probs().items()}
    for sig, tp in tables.present.probs.items():
        if tp.is_flat:
            continue
        p_absent = absent_counts.get(sig.detector_part, 0.0)
        term = _stable_term(tp.swing, math.atan2(tp.c, tp.b), _margin(tp), p_absent, epsilon, phi)
        if term:
            sector = sig.detected
            by_sector[sector] = by_sector.get(sector, 0.0) + term

    return FisherBreakdown(sum(by_sector.values()), by_sector, phi, epsilon, loss)


class LossFamily:
    """Branch tables with the loss dependence factored out, for fast sweeps.

    Every event probability carries the loss only through a known power:
    each detected ground photon contributes a factor eta^2 and each lost one
    a factor 1 - eta^2, and how many were lost is fixed by the event's
    photon count within a branch.  Building the tables once at a reference
    loss and rescaling is therefore exact, and makes the baseline the cheap
    axis of a scan.
    """

    REFERENCE_LOSS = 0.5

    def __init__(self, config: ExperimentConfig):
        self.config = config
        ref = config.with_alpha(alpha_for_loss(self.REFERENCE_LOSS))
        p_ref = ref.loss_prob
        q_ref = 1.0 - p_ref
        tables = branch_tables(ref)
        ground = config.photons - 1

        # Counter readouts of the absent branch, loss factor divided out.
        # All events behind one readout lose the same number of photons, so
        # folding them and rescaling commute.
        absent_counts = {}
        for sig, tp in tables.absent.detector_probs().items():
            d = sig.detected
            absent_counts[sig] = tp.a / (q_ref**d * p_ref ** (ground - d))

        sigs = [sig for sig, tp in tables.present.probs.items() if not tp.is_flat]
        count = len(sigs)
        a_p = np.zeros(count)
        b_p = np.zeros(count)
        c_p = np.zeros(count)
        a_a = np.zeros(count)
        det_ground_p = np.zeros(count, dtype=np.int64)
        lost_p = np.zeros(count, dtype=np.int64)
        det_ground_a = np.zeros(count, dtype=np.int64)
        lost_a = np.zeros(count, dtype=np.int64)
        detected = np.zeros(count, dtype=np.int64)

        for i, sig in enumerate(sigs):
            d = sig.detected
            detected[i] = d
            tp = tables.present.probs[sig]
            gd = d - 1  # the reference photon is never lost
            det_ground_p[i] = gd
            lost_p[i] = ground - gd
            scale = q_ref**gd * p_ref ** (ground - gd)
            a_p[i] = tp.a / scale
            b_p[i] = tp.b / scale
            c_p[i] = tp.c / scale
            if d <= ground:
                det_ground_a[i] = d
                lost_a[i] = ground - d
                a_a[i] = absent_counts.get(sig.detector_part, 0.0)

        self.signatures = sigs
        self.detected = detected
        self._a_p, self._b_p, self._c_p, self._a_a = a_p, b_p, c_p, a_a
        self._dg_p, self._lost_p = det_ground_p, lost_p
        self._dg_a, self._lost_a = det_ground_a, lost_a
        self._rho = np.hypot(b_p, c_p)
        self._psi = np.arctan2(c_p, b_p)
        margin = a_p - self._rho
        margin[margin < 1e-12 * a_p] = 0.0
        self._margin = margin

    def fisher(self, phi: float, epsilon: float, loss_prob: float) -> FisherBreakdown:
        """Fisher information at an arbitrary loss probability."""
        if not 0.0 <= loss_prob <= 1.0:
            raise ValueError(f"loss probability out of range: {loss_prob}")
        if epsilon <= 0.0:
            return FisherBreakdown(0.0, {}, phi, epsilon, loss_prob)
        p = loss_prob
        q = 1.0 - p
        lf_p = q**self._dg_p * p**self._lost_p
        lf_a = q**self._dg_a * p**self._lost_a
        rho = lf_p * self._rho
        u = 0.5 * (phi - self._psi)
        cos_u2 = np.cos(u) ** 2
        sin_u2 = np.sin(u) ** 2
        denom = (
            (1.0 - epsilon) * lf_a * self._a_a
            + epsilon * lf_p * self._margin
            + 2.0 * epsilon * rho * cos_u2
        )
        numer = 4.0 * epsilon**2 * rho**2 * sin_u2 * cos_u2
        terms = np.divide(numer, denom, out=np.zeros_like(numer), where=denom > _TINY)
        by_sector = {}
        for d in np.unique(self.detected):
            val = float(terms[self.detected == d].sum())
            if val:
                by_sector[int(d)] = val
        return FisherBreakdown(float(terms.sum()), by_sector, phi, epsilon, p)

    def fisher_at_alpha(self, phi: float, epsilon: float, alpha: float) -> FisherBreakdown:
        return self.fisher(phi, epsilon, 1.0 - math.exp(-alpha / 2.0))

    def fisher_curve(self, phi: float, epsilon: float, loss_probs: np.ndarray) -> np.ndarray:
        """Total Fisher information over a vector of loss probabilities."""
        return np.array([self.fisher(phi, epsilon, float(p)).total for p in loss_probs])


def fisher_at(config: ExperimentConfig, phi: Optional[float] = None) -> FisherBreakdown:
    """Convenience: build the branch tables for a config and evaluate."""
    tables = branch_tables(config)
    return fisher_numeric(tables, config.phi if phi is None else phi, config.epsilon)
