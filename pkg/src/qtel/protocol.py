"""Two-station interferometry protocol under loss and partial distinguishability.

One reference photon arrives split between a left and a right station, with a
relative phase phi carrying the sky information.  Each remaining input port
feeds a ground photon split the same way.  Ground photons may deviate from
the reference wave packet (overlap I per photon) and pass through lossy links
(transmission eta per arm); the reference photon is assumed delivered
losslessly.  Both stations end in an n-port Fourier multiport feeding photon
counters.

Everything downstream works from branch tables: for each detector signature
the probability is exactly A + B cos(phi) + C sin(phi), because only the
reference photon carries the phase.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

from .errors import ConfigInvalidError
from .fock import (
    MU,
    LinearMap,
    Mode,
    ModeKind,
    PhotonForm,
    PortSignature,
    SignatureKey,
    expand_product,
    is_detector,
    marginal_distribution,
    nu,
    qft_matrix,
)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class NuPolicy(Enum):
    """How the deviating wave-packet components of ground photons relate.

    DISTINCT gives every ground photon its own orthogonal packet; SHARED puts
    all deviations into one common packet, making the ground photons mutually
    identical.
    """

    DISTINCT = "distinct"
    SHARED = "shared"


class Branch(Enum):
    """The two components of the low-occupancy source model: either the sky
    photon arrived alongside the ground photons, or it did not."""

    STAR_PRESENT = "present"
    STAR_ABSENT = "absent"


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameter set of one protocol instance.

    photons counts all input ports including the reference photon; indist
    holds one overlap per ground photon (ports 2..N).  alpha is the station
    separation in units of the fiber attenuation length, so the arm
    transmission is eta = exp(-alpha/4) and the per-photon loss probability
    is p = 1 - exp(-alpha/2).
    """

    photons: int = 2
    epsilon: float = 1.0
    indist: Tuple[float, ...] = None
    nu_policy: NuPolicy = NuPolicy.DISTINCT
    wavelength_m: float = 628e-9
    attenuation_length_m: float = 10e3
    alpha: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not isinstance(self.photons, int) or not 2 <= self.photons <= 5:
            raise ConfigInvalidError(f"photons must be an integer in 2..5, got {self.photons}")
        if self.indist is None:
            object.__setattr__(self, "indist", (1.0,) * (self.photons - 1))
        else:
            object.__setattr__(self, "indist", tuple(float(x) for x in self.indist))
        if len(self.indist) != self.photons - 1:
            raise ConfigInvalidError(
                f"indist needs {self.photons - 1} entries for {self.photons} photons, "
                f"got {len(self.indist)}"
            )
        if any(not 0.0 <= x <= 1.0 for x in self.indist):
            raise ConfigInvalidError(f"indist entries must lie in [0, 1], got {self.indist}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigInvalidError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not self.alpha >= 0.0:
            raise ConfigInvalidError(f"alpha must be >= 0, got {self.alpha}")
        if not self.wavelength_m > 0.0:
            raise ConfigInvalidError("wavelength must be positive")
        if not self.attenuation_length_m > 0.0:
            raise ConfigInvalidError("attenuation length must be positive")
        if not math.isfinite(self.phi):
            raise ConfigInvalidError("phi must be finite")
        if not isinstance(self.nu_policy, NuPolicy):
            raise ConfigInvalidError(f"nu_policy must be a NuPolicy, got {self.nu_policy!r}")

    @property
    def transmission(self) -> float:
        """Amplitude transmission of one arm."""
        return math.exp(-self.alpha / 4.0)

    @property
    def loss_prob(self) -> float:
        """Probability that a ground photon is lost before detection."""
        return 1.0 - math.exp(-self.alpha / 2.0)

    @property
    def baseline_m(self) -> float:
        return self.alpha * self.attenuation_length_m

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m

    def with_alpha(self, alpha: float) -> "ExperimentConfig":
        return ExperimentConfig(
            photons=self.photons,
            epsilon=self.epsilon,
            indist=self.indist,
            nu_policy=self.nu_policy,
            wavelength_m=self.wavelength_m,
            attenuation_length_m=self.attenuation_length_m,
            alpha=alpha,
            phi=self.phi,
        )


def alpha_for_loss(loss_prob: float) -> float:
    """Baseline (in attenuation lengths) at which the per-photon loss
    probability equals ``loss_prob``."""
    if not 0.0 <= loss_prob < 1.0:
        raise ConfigInvalidError(f"loss probability must lie in [0, 1), got {loss_prob}")
    return -2.0 * math.log1p(-loss_prob)


@dataclass
class PhasedForm:
    """A single-photon form with its phase dependence kept exact.

    The physical form at phase phi is static + exp(i*phi) * rotating.  Ground
    photons have an empty rotating part; the reference photon carries the
    right-station half there.
    """

    static: PhotonForm
    rotating: PhotonForm = field(default_factory=PhotonForm)

    def at(self, phi: float) -> PhotonForm:
        if not self.rotating.coeff:
            return self.static
        phase = complex(math.cos(phi), math.sin(phi))
        merged = dict(self.static.coeff)
        for mode, amp in self.rotating.coeff.items():
            merged[mode] = merged.get(mode, 0.0) + phase * amp
        return PhotonForm(merged)

    def norm_sq(self) -> float:
        return self.static.norm_sq() + self.rotating.norm_sq()


def _nu_label(config: ExperimentConfig, port: int) -> Tuple[str, int]:
    return nu(0) if config.nu_policy is NuPolicy.SHARED else nu(port)


def distinguish_map(config: ExperimentConfig, port: int) -> LinearMap:
    """Split the port's detector-bound modes into reference and deviating
    packets with amplitudes sqrt(I) and sqrt(1 - I)."""
    overlap = config.indist[port - 2]
    keep = math.sqrt(overlap)
    leak = math.sqrt(1.0 - overlap)
    tag = _nu_label(config, port)
    rules = {}
    for kind in (ModeKind.DETECTOR_LEFT, ModeKind.DETECTOR_RIGHT):
        src = Mode(kind, port, MU)
        rules[src] = {src: keep, Mode(kind, port, tag): leak}
    return LinearMap(rules)


def loss_map(config: ExperimentConfig, port: int) -> LinearMap:
    """Beam-splitter loss on both arms of one port: detector-bound amplitude
    keeps eta, the rest leaks into a per-port environment mode."""
    eta = config.transmission
    leak = math.sqrt(max(0.0, 1.0 - eta * eta))
    labels = (MU, _nu_label(config, port))
    rules = {}
    for det_kind, env_kind in (
        (ModeKind.DETECTOR_LEFT, ModeKind.ENV_LEFT),
        (ModeKind.DETECTOR_RIGHT, ModeKind.ENV_RIGHT),
    ):
        for label in labels:
            src = Mode(det_kind, port, label)
            rules[src] = {src: eta, Mode(env_kind, port, label): leak}
    return LinearMap(rules)


def fourier_map(n: int, labels, ports) -> LinearMap:
    """The n-port Fourier mixer applied at both stations: input port j goes to
    detector k with weight exp(2*pi*i*j*k/n)/sqrt(n).  Environment modes pass
    through untouched."""
    matrix = qft_matrix(n)
    rules: Dict[Mode, Dict[Mode, complex]] = {}
    for kind in (ModeKind.DETECTOR_LEFT, ModeKind.DETECTOR_RIGHT):
        for port in ports:
            for label in labels:
                src = Mode(kind, port, label)
                rules[src] = {
                    Mode(kind, k, label): matrix[port - 1, k - 1] for k in range(1, n + 1)
                }
    for kind in (ModeKind.ENV_LEFT, ModeKind.ENV_RIGHT):
        for port in ports:
            for label in labels:
                src = Mode(kind, port, label)
                rules[src] = {src: 1.0}
    return LinearMap(rules)


def build_forms(config: ExperimentConfig, branch: Branch) -> List[PhasedForm]:
    """Propagate every input photon of the branch to the detector/environment
    mode basis.  The reference photon keeps its phase dependence symbolic."""
    from .fock import substitute

    n = config.photons
    forms: List[PhasedForm] = []

    if branch is Branch.STAR_PRESENT:
        labels = (MU,)
        mixer = fourier_map(n, labels, ports=(1,))
        static = substitute(PhotonForm({Mode(ModeKind.DETECTOR_LEFT, 1, MU): _SQRT_HALF}), mixer)
        rotating = substitute(PhotonForm({Mode(ModeKind.DETECTOR_RIGHT, 1, MU): _SQRT_HALF}), mixer)
        forms.append(PhasedForm(static, rotating))

    for port in range(2, n + 1):
        seed = PhotonForm(
            {
                Mode(ModeKind.DETECTOR_LEFT, port, MU): _SQRT_HALF,
                Mode(ModeKind.DETECTOR_RIGHT, port, MU): _SQRT_HALF,
            }
        )
        split = substitute(seed, distinguish_map(config, port))
        lossy = substitute(split, loss_map(config, port))
        labels = (MU, _nu_label(config, port))
        mixed = substitute(lossy, fourier_map(n, labels, ports=(port,)))
        forms.append(PhasedForm(mixed))

    return forms


_SIDE_TOKEN = {
    ModeKind.DETECTOR_LEFT: "L",
    ModeKind.DETECTOR_RIGHT: "R",
    ModeKind.ENV_LEFT: "l",
    ModeKind.ENV_RIGHT: "r",
}


def _mode_token(mode: Mode, count: int) -> str:
    kind, idx = mode.label
    tag = "m" if kind == "mu" else f"n{idx}"
    return f"{_SIDE_TOKEN[mode.kind]}{mode.slot}{tag}:{count}"


@dataclass(frozen=True)
class DetectorSignature:
    """One fully resolved detection event.

    modes holds the detector-mode counts with internal packet labels kept
    apart; env records where the lost photons went (which port, which side,
    which packet).  Two signatures compare equal exactly when every mode
    holds the same number of photons, regardless of which input photons
    produced them.
    """

    modes: SignatureKey
    env: SignatureKey = ()

    @property
    def detected(self) -> int:
        return sum(count for _, count in self.modes)

    @property
    def lost(self) -> int:
        return sum(count for _, count in self.env)

    @property
    def detector_part(self) -> "DetectorSignature":
        """The signature with the environment record dropped; what the
        stations actually print out for this event."""
        if not self.env:
            return self
        return DetectorSignature(self.modes)

    def port_counts(self, n: int) -> Tuple[int, ...]:
        """Detector counts aggregated over internal labels: left detectors
        1..n, then right detectors 1..n."""
        counts = [0] * (2 * n)
        for mode, count in self.modes:
            offset = 0 if mode.kind is ModeKind.DETECTOR_LEFT else n
            counts[offset + mode.slot - 1] += count
        return tuple(counts)

    def text(self, n: int) -> str:
        """Compact printable form, one token per occupied mode.  Lost-photon
        records use lowercase side letters."""
        tokens = [_mode_token(mode, count) for mode, count in self.modes]
        tokens += [_mode_token(mode, count) for mode, count in self.env]
        return " ".join(tokens) if tokens else "-"


@dataclass(frozen=True)
class TrigProbability:
    """Exact phase dependence of one signature: P(phi) = a + b cos(phi) + c sin(phi)."""

    a: float
    b: float = 0.0
    c: float = 0.0

    def value(self, phi: float) -> float:
        return self.a + self.b * math.cos(phi) + self.c * math.sin(phi)

    def derivative(self, phi: float) -> float:
        return -self.b * math.sin(phi) + self.c * math.cos(phi)

    @property
    def swing(self) -> float:
        """Amplitude of the oscillating part; never exceeds a for a
        physical probability."""
        return math.hypot(self.b, self.c)

    @property
    def is_flat(self) -> bool:
        return self.swing < 1e-14


_FLAT = TrigProbability(0.0, 0.0, 0.0)


@dataclass
class BranchTable:
    """All event probabilities of one branch, with exact phase structure.

    probs is keyed by fully resolved events; detector_probs() folds the
    lost-photon records away and gives what the counters alone show.
    """

    branch: Branch
    photons: int
    ports: int
    probs: Dict[DetectorSignature, TrigProbability]

    def probability(self, sig: DetectorSignature, phi: float) -> float:
        return self.probs.get(sig, _FLAT).value(phi)

    def total(self, phi: float) -> float:
        return sum(tp.value(phi) for tp in self.probs.values())

    def signatures(self):
        return self.probs.keys()

    def detector_probs(self) -> Dict[DetectorSignature, TrigProbability]:
        folded: Dict[DetectorSignature, List[float]] = {}
        for sig, tp in self.probs.items():
            acc = folded.setdefault(sig.detector_part, [0.0, 0.0, 0.0])
            acc[0] += tp.a
            acc[1] += tp.b
            acc[2] += tp.c
        return {sig: TrigProbability(*acc) for sig, acc in folded.items()}


def distribution(forms: List[PhasedForm], phi: float) -> Dict[PortSignature, float]:
    """Counter-readout distribution of the branch at a concrete phase: counts
    per detector port, lost photons and internal labels traced out."""
    state = expand_product([f.at(phi) for f in forms])
    return marginal_distribution(state)


def _run_lengths(modes) -> SignatureKey:
    out = []
    for mode in modes:
        if out and out[-1][0] == mode:
            out[-1][1] += 1
        else:
            out.append([mode, 1])
    return tuple((mode, count) for mode, count in out)


def _event_signature(occupation) -> DetectorSignature:
    """Split an occupation into its detector and environment records.
    Occupations are sorted with detector modes first."""
    split = 0
    while split < len(occupation) and is_detector(occupation[split]):
        split += 1
    return DetectorSignature(
        _run_lengths(occupation[:split]), _run_lengths(occupation[split:])
    )


def event_distribution(forms: List[PhasedForm], phi: float) -> Dict[DetectorSignature, float]:
    """Fully resolved event distribution of the branch at a concrete phase."""
    state = expand_product([f.at(phi) for f in forms])
    out: Dict[DetectorSignature, float] = {}
    for occupation, amp in state.amplitudes.items():
        sig = _event_signature(occupation)
        out[sig] = out.get(sig, 0.0) + (amp.real * amp.real + amp.imag * amp.imag)
    return out


# Phase sample points from which A, B, C are recovered exactly.
_PHI_SAMPLES = (0.0, math.pi / 2.0, math.pi)


def branch_table(config: ExperimentConfig, branch: Branch) -> BranchTable:
    """Evaluate the branch at phases 0, pi/2 and pi and solve for the trig
    coefficients of every event.  Exact because each probability is a
    first-order trig polynomial in phi."""
    forms = build_forms(config, branch)
    photons = config.photons if branch is Branch.STAR_PRESENT else config.photons - 1

    sampled = [event_distribution(forms, phi) for phi in _PHI_SAMPLES]
    keys = set()
    for table in sampled:
        keys.update(table)

    probs: Dict[DetectorSignature, TrigProbability] = {}
    for key in sorted(keys, key=lambda s: (s.modes, s.env)):
        p0, p90, p180 = (table.get(key, 0.0) for table in sampled)
        a = 0.5 * (p0 + p180)
        b = 0.5 * (p0 - p180)
        c = p90 - a
        tp = TrigProbability(a, b, c)
        if tp.a < -1e-12 or tp.swing > tp.a + 1e-12:
            raise AssertionError(f"non-physical trig probability for {key}: {tp}")
        probs[key] = tp

    table = BranchTable(branch, photons, config.photons, probs)
    if abs(sum(tp.a for tp in probs.values()) - 1.0) > 1e-12:
        raise AssertionError("branch table does not sum to one")
    return table


@dataclass
class BranchTables:
    """The branch pair a mixture is built from."""

    config: ExperimentConfig
    present: BranchTable
    absent: BranchTable

    def all_signatures(self):
        return sorted(
            set(self.present.probs) | set(self.absent.probs),
            key=lambda s: (s.modes, s.env),
        )


def branch_tables(config: ExperimentConfig) -> BranchTables:
    return BranchTables(
        config,
        branch_table(config, Branch.STAR_PRESENT),
        branch_table(config, Branch.STAR_ABSENT),
    )


def mixture_trig(tables: BranchTables, epsilon: float) -> Dict[DetectorSignature, TrigProbability]:
    """Trig coefficients of the counter readout under the source mixture:
    weight 1 - epsilon on the reference-photon-absent branch, epsilon on the
    full branch.  Keyed by detector part only, since the counters cannot see
    where lost photons went."""
    present = tables.present.detector_probs()
    absent = tables.absent.detector_probs()
    out: Dict[DetectorSignature, TrigProbability] = {}
    for sig in sorted(set(present) | set(absent), key=lambda s: s.modes):
        pb = present.get(sig, _FLAT)
        pa = absent.get(sig, _FLAT)
        out[sig] = TrigProbability(
            (1.0 - epsilon) * pa.a + epsilon * pb.a,
            epsilon * pb.b,
            epsilon * pb.c,
        )
    return out


def mixture_probability(
    tables: BranchTables, epsilon: float, phi: float
) -> Dict[DetectorSignature, float]:
    """Detection probabilities of the mixture at a concrete phase."""
    return {sig: tp.value(phi) for sig, tp in mixture_trig(tables, epsilon).items()}


def port_signature(sig: DetectorSignature) -> PortSignature:
    """Fold the internal labels out of a signature's detector part."""
    counts: Dict[Tuple[ModeKind, int], int] = {}
    for mode, count in sig.modes:
        port = (mode.kind, mode.slot)
        counts[port] = counts.get(port, 0) + count
    return tuple(sorted(counts.items()))


def port_text(ports: PortSignature) -> str:
    """Printable counter readout, e.g. 'L2:1 R1:1'; '-' when nothing fired."""
    if not ports:
        return "-"
    tokens = []
    for (kind, slot), count in ports:
        side = "L" if kind is ModeKind.DETECTOR_LEFT else "R"
        tokens.append(f"{side}{slot}:{count}")
    return " ".join(tokens)


def mixture_port_trig(
    tables: BranchTables, epsilon: float
) -> Dict[PortSignature, TrigProbability]:
    """Mixture readout folded all the way down to counter ports."""
    folded: Dict[PortSignature, List[float]] = {}
    for sig, tp in mixture_trig(tables, epsilon).items():
        acc = folded.setdefault(port_signature(sig), [0.0, 0.0, 0.0])
        acc[0] += tp.a
        acc[1] += tp.b
        acc[2] += tp.c
    return {ports: TrigProbability(*acc) for ports, acc in sorted(folded.items())}
