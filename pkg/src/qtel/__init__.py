"""Toolkit for a two-station interferometric telescope that distributes a
single star photon across N input ports: exact detection statistics under
loss and partial distinguishability, Fisher information of the phase, and
the resulting angular resolution limit over the baseline."""

from .errors import (
    CapacityExceededError,
    ConfigInvalidError,
    DomainError,
    NoMinimumError,
    QtelError,
    UnknownModeError,
    ZeroInformationError,
)
from .fock import (
    MU,
    FockState,
    LinearMap,
    Mode,
    ModeKind,
    PhotonForm,
    expand_product,
    is_detector,
    marginal_distribution,
    nu,
    qft_matrix,
    substitute,
)
from .protocol import (
    Branch,
    BranchTables,
    DetectorSignature,
    ExperimentConfig,
    NuPolicy,
    TrigProbability,
    alpha_for_loss,
    branch_tables,
    mixture_port_trig,
    mixture_probability,
    mixture_trig,
    port_text,
)
from .fisher import FisherBreakdown, LossFamily, fisher_at, fisher_numeric
from .closed_form import (
    CATALOG_IDS,
    closed_form,
    four_photon,
    sector_values,
    three_photon,
    three_photon_unit_occupancy,
    two_photon,
)
from .resolution import (
    MICROARCSEC_PER_RAD,
    AlphaOptimum,
    ResolutionResult,
    curve_export,
    golden_minimize,
    optimize_alpha,
    resolution,
)
from .tables import TABLE_I, TABLE_II, TableRow, compute_table_rows
from .verify import VerifyReport, verify_catalog

__version__ = "0.1.0"

__all__ = [
    "CapacityExceededError",
    "ConfigInvalidError",
    "DomainError",
    "NoMinimumError",
    "QtelError",
    "UnknownModeError",
    "ZeroInformationError",
    "MU",
    "FockState",
    "LinearMap",
    "Mode",
    "ModeKind",
    "PhotonForm",
    "expand_product",
    "is_detector",
    "marginal_distribution",
    "nu",
    "qft_matrix",
    "substitute",
    "Branch",
    "BranchTables",
    "DetectorSignature",
    "ExperimentConfig",
    "NuPolicy",
    "TrigProbability",
    "alpha_for_loss",
    "branch_tables",
    "mixture_port_trig",
    "mixture_probability",
    "mixture_trig",
    "port_text",
    "FisherBreakdown",
    "LossFamily",
    "fisher_at",
    "fisher_numeric",
    "CATALOG_IDS",
    "closed_form",
    "four_photon",
    "sector_values",
    "three_photon",
    "three_photon_unit_occupancy",
    "two_photon",
    "MICROARCSEC_PER_RAD",
    "AlphaOptimum",
    "ResolutionResult",
    "curve_export",
    "golden_minimize",
    "optimize_alpha",
    "resolution",
    "TABLE_I",
    "TABLE_II",
    "TableRow",
    "compute_table_rows",
    "VerifyReport",
    "verify_catalog",
    "__version__",
]
