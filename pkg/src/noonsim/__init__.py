"""noonsim: exact second-quantized simulation of heralded multiphoton
path-entangled state preparation from stimulated down-conversion light."""

from .fock import (
    Ensemble,
    ModeLabel,
    ModeMismatchError,
    ModeRegistry,
    PureState,
    ZeroNormError,
)
from .oppoly import OpMonomial, OpPolynomial, PolarizationAxis, axis_operators, bunching_product
from .optics import (
    Circuit,
    ModeUnitary,
    beamsplitter,
    bs_coupler,
    embed,
    hwp,
    pbs,
    phase_plate,
    polarization_element,
    qwp,
)
from .pdc import (
    PdcParams,
    pair_registry,
    pdc_state,
    singlet_term,
    source_from_json,
    truncation_deficit,
    two_pair_mixture,
    two_pair_registry,
)
from .heralding import (
    DetectionPattern,
    HeraldOutcome,
    detect,
    detect_ensemble,
    fidelity,
    herald_noon2,
    herald_noon4,
    herald_noon8,
    herald_via_operator,
    path_entangled_target,
)
from .experiments import (
    ScanResult,
    alpha_from_visibility,
    alpha_visibility_curve,
    fringe_scan,
    pair_ratio,
    visibility_scan,
)

__version__ = "0.1.0"
