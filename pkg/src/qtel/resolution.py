"""Angular resolution limits and baseline optimization.

The smallest resolvable source angle follows from the Fisher information per
detection event via the Cramer-Rao bound: delta_theta = 1/(k L sqrt(F)) with
k the wavenumber and L the station separation.  Since the loss probability
grows with L while the lever arm k*L improves, delta_theta(alpha) has one or
more interior minima; the optimizer brackets all of them on a coarse grid and
polishes each with golden-section steps.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

from .closed_form import closed_form
from .errors import ConfigInvalidError, NoMinimumError, ZeroInformationError
from .fisher import LossFamily
from .protocol import ExperimentConfig

#: Radians to microarcseconds.
MICROARCSEC_PER_RAD = 180.0 * 3600.0 * 1e6 / math.pi

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ResolutionResult:
    """Cramer-Rao limited angular resolution at one baseline."""

    alpha: float
    baseline_m: float
    wavenumber: float
    fisher: float
    delta_theta_rad: float

    @property
    def delta_theta_uas(self) -> float:
        return self.delta_theta_rad * MICROARCSEC_PER_RAD


def resolution(config: ExperimentConfig, fisher_total: float) -> ResolutionResult:
    """Resolution limit for a given config and Fisher information value."""
    if not fisher_total > 0.0:
        raise ZeroInformationError(
            f"Fisher information {fisher_total} does not bound the resolution"
        )
    baseline = config.baseline_m
    if baseline <= 0.0:
        raise ZeroInformationError("zero baseline resolves no angle")
    rad = 1.0 / (config.wavenumber * baseline * math.sqrt(fisher_total))
    return ResolutionResult(config.alpha, baseline, config.wavenumber, fisher_total, rad)


@dataclass(frozen=True)
class AlphaOptimum:
    """One local optimum of the resolution over the baseline."""

    alpha: float
    delta_theta_rad: float
    fisher: float
    is_global: bool

    @property
    def delta_theta_uas(self) -> float:
        return self.delta_theta_rad * MICROARCSEC_PER_RAD


def _closed_form_catalog(config: ExperimentConfig) -> str:
    if config.photons == 2:
        return "F2"
    if config.photons == 3:
        return "F3_distinct"
    if config.photons == 4:
        return "F4_identical"
    raise ConfigInvalidError(
        f"no closed-form expression covers {config.photons} photons"
    )


def fisher_engine(
    config: ExperimentConfig,
    engine: str,
    phi: float,
    family: LossFamily = None,
) -> Callable[[float], float]:
    """Total Fisher information as a function of alpha.

    engine 'simulation' evaluates the exact branch tables (ground truth);
    'closed-form' evaluates the published expression for the configuration,
    which exists only for 2..4 photons (4 requires unit overlaps).  A
    prebuilt LossFamily for the same photon set may be passed to skip the
    table construction.
    """
    if engine == "simulation":
        if family is None:
            family = LossFamily(config)
        return lambda alpha: family.fisher_at_alpha(phi, config.epsilon, alpha).total
    if engine == "closed-form":
        catalog = _closed_form_catalog(config)

        def evaluate(alpha: float) -> float:
            p = 1.0 - math.exp(-alpha / 2.0)
            return closed_form(catalog, phi, p, config.epsilon, config.indist)

        evaluate(0.0)  # surface unsupported-parameter errors before the sweep
        return evaluate
    raise ConfigInvalidError(f"unknown fisher engine {engine!r}")


def golden_minimize(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-4
) -> Tuple[float, float]:
    """Golden-section minimum of a unimodal function on [lo, hi]."""
    a, b = float(lo), float(hi)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def optimize_alpha(
    config: ExperimentConfig,
    alpha_range: Tuple[float, float] = (0.5, 12.0),
    engine: str = "simulation",
    phi: float = 0.0,
    step: float = 0.01,
    tol: float = 1e-4,
    family: LossFamily = None,
) -> List[AlphaOptimum]:
    """All local minima of the resolution over the baseline, ascending in
    alpha, with the global one flagged.

    A coarse scan at the given step brackets every interior minimum; each
    bracket is polished by golden-section search.  Raises NoMinimumError when
    the resolution is monotone (or flat) over the whole range.
    """
    lo, hi = alpha_range
    if not (0.0 < lo < hi <= 60.0):
        raise ConfigInvalidError(f"alpha range must satisfy 0 < lo < hi <= 60, got {alpha_range}")
    fisher_of = fisher_engine(config, engine, phi, family=family)
    scale = config.wavenumber * config.attenuation_length_m

    def delta_theta(alpha: float) -> float:
        fval = fisher_of(alpha)
        if fval <= 0.0:
            return math.inf
        return 1.0 / (scale * alpha * math.sqrt(fval))

    count = int(round((hi - lo) / step))
    grid = [lo + (hi - lo) * i / count for i in range(count + 1)]
    values = [delta_theta(x) for x in grid]

    optima: List[AlphaOptimum] = []
    for i in range(1, len(grid) - 1):
        if values[i] < values[i - 1] and values[i] <= values[i + 1] and math.isfinite(values[i]):
            alpha, dtheta = golden_minimize(delta_theta, grid[i - 1], grid[i + 1], tol)
            optima.append(AlphaOptimum(alpha, dtheta, fisher_of(alpha), False))
    if not optima:
        raise NoMinimumError(
            f"resolution is monotone over alpha range {alpha_range}; no interior minimum"
        )

    best = min(range(len(optima)), key=lambda i: optima[i].delta_theta_rad)
    return [
        AlphaOptimum(o.alpha, o.delta_theta_rad, o.fisher, i == best)
        for i, o in enumerate(optima)
    ]


def curve_export(
    config: ExperimentConfig,
    sweep: str,
    samples: int,
    alpha_range: Tuple[float, float] = (0.5, 12.0),
    phi_range: Tuple[float, float] = (-math.pi, math.pi),
    phi: float = 0.0,
) -> List[Tuple[float, float]]:
    """Evenly spaced (x, y) rows for one sweep.

    'fisher-phi' sweeps the phase at the config's baseline and reports the
    total Fisher information; 'resolution-alpha' sweeps the baseline and
    reports the resolution in microarcseconds at the given phase.
    """
    if samples < 2:
        raise ConfigInvalidError(f"a sweep needs at least 2 samples, got {samples}")
    family = LossFamily(config)
    rows: List[Tuple[float, float]] = []
    if sweep == "fisher-phi":
        lo, hi = phi_range
        for i in range(samples):
            x = lo + (hi - lo) * i / (samples - 1)
            rows.append((x, family.fisher_at_alpha(x, config.epsilon, config.alpha).total))
        return rows
    if sweep == "resolution-alpha":
        lo, hi = alpha_range
        if not (0.0 < lo < hi):
            raise ConfigInvalidError(f"alpha range must be positive and increasing, got {alpha_range}")
        scale = config.wavenumber * config.attenuation_length_m
        for i in range(samples):
            x = lo + (hi - lo) * i / (samples - 1)
            fval = family.fisher_at_alpha(phi, config.epsilon, x).total
            y = 1.0 / (scale * x * math.sqrt(fval)) * MICROARCSEC_PER_RAD if fval > 0 else math.inf
            rows.append((x, y))
        return rows
    raise ConfigInvalidError(f"unknown sweep {sweep!r}")
