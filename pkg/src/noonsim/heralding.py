"""Projective photon-counting detection and heralded state preparation.

Detection patterns address *physical* detector positions (spatial path +
polarization). On registries that carry internal distinguishing tags, a
detector cannot resolve the tag, so pattern counts apply to the summed
occupation of a physical group and the conditional state becomes a mixture
over the exact tag-level outcomes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .fock import (
    Ensemble,
    ModeLabel,
    ModeMismatchError,
    ModeRegistry,
    PureState,
    as_mode,
    polarization_pair,
)
from .oppoly import OpPolynomial
from .optics import (
    ModeUnitary,
    beamsplitter,
    hwp,
    polarization_element,
    qwp,
)

PNR = "pnr"
THRESHOLD = "threshold"

# Analyzer kernels that bring each named basis onto h/v detection.
BASIS_ANALYZERS = {
    "hv": np.eye(2, dtype=complex),
    "pm": hwp(math.pi / 8),
    "rl": qwp(math.pi / 4),
}

NOON8_LEAVES = ("a1", "a2", "a3", "a4")
# Half-wave plates analyzing the linear bases at 0, 22.5, 45 and 67.5 degrees,
# i.e. fast axes at half those angles. These place the four pair operators
# equidistantly on the great circle of linear polarizations, so their product
# bunches eight photons around the circular (rl) axis.
NOON8_WAVEPLATE_ANGLES = (0.0, math.pi / 16, math.pi / 8, 3 * math.pi / 16)


@dataclass(frozen=True)
class DetectionPattern:
    """Required counts at physical detector positions.

    ``pnr``: each listed position holds exactly the given count.
    ``threshold``: a positive count means "at least one photon" (a click); a
    zero count means "explicitly dark". Unlisted modes are never constrained.
    """

    counts: tuple[tuple[ModeLabel, int], ...]
    model: str = PNR

    def __post_init__(self) -> None:
        if self.model not in (PNR, THRESHOLD):
            raise ValueError(f"unknown detector model {self.model!r}")
        if not self.counts:
            raise ValueError("detection pattern constrains no modes")
        physicals = [m.physical for m, _ in self.counts]
        if len(set(physicals)) != len(physicals):
            raise ValueError("detection pattern repeats a detector position")
        if any(c < 0 for _, c in self.counts):
            raise ValueError("detection counts must be >= 0")

    @classmethod
    def of(cls, counts: Mapping[ModeLabel | str, int], model: str = PNR) -> "DetectionPattern":
        return cls(tuple(sorted((as_mode(m), int(c)) for m, c in counts.items())), model)

    @property
    def factorial_product(self) -> int:
        out = 1
        for _, c in self.counts:
            out *= math.factorial(c)
        return out


@dataclass(frozen=True)
class HeraldOutcome:
    """Probability of the detection pattern and the conditional state of the
    unmeasured modes (None when the herald never fires)."""

    probability: float
    conditional: PureState | Ensemble | None


def detect(state: PureState, pattern: DetectionPattern) -> HeraldOutcome:
    """Project onto the detection pattern; condition the unmeasured modes.

    Measured modes end in a definite Fock state and are stripped from the
    conditional. Distinct tag-level outcomes are perfectly distinguishable in
    principle, so they contribute incoherently: the conditional is an Ensemble
    whenever more than one exact outcome matches.
    """
    registry = state.registry
    groups: list[tuple[tuple[int, ...], int]] = []
    measured: set[int] = set()
    for label, required in pattern.counts:
        idx = registry.physical_indices(label)
        if not idx:
            raise ModeMismatchError(f"no registry mode at detector position {label}")
        groups.append((idx, required))
        measured.update(idx)
    measured_sorted = tuple(sorted(measured))
    keep = tuple(i for i in range(len(registry)) if i not in measured)

    classes: dict[tuple[int, ...], dict[tuple[int, ...], complex]] = {}
    for occ, amp in state.terms.items():
        if not _matches(occ, groups, pattern.model):
            continue
        exact = tuple(occ[i] for i in measured_sorted)
        reduced = tuple(occ[i] for i in keep)
        bucket = classes.setdefault(exact, {})
        bucket[reduced] = bucket.get(reduced, 0j) + amp

    weights = {
        exact: sum(abs(a) ** 2 for a in bucket.values()) for exact, bucket in classes.items()
    }
    probability = sum(weights.values())
    if probability == 0.0:
        return HeraldOutcome(0.0, None)

    reduced_registry = registry.without(registry.modes[i] for i in measured_sorted)
    components: list[tuple[float, PureState]] = []
    for exact in sorted(classes):
        w = weights[exact]
        if w == 0.0:
            continue
        scale = 1.0 / math.sqrt(w)
        components.append(
            (
                w / probability,
                PureState(reduced_registry, {o: a * scale for o, a in classes[exact].items()}),
            )
        )
    if len(components) == 1:
        return HeraldOutcome(probability, components[0][1])
    total = sum(w for w, _ in components)
    components = [(w / total, s) for w, s in components]
    return HeraldOutcome(probability, Ensemble.of(components))


def _matches(
    occ: tuple[int, ...], groups: Sequence[tuple[tuple[int, ...], int]], model: str
) -> bool:
    for idx, required in groups:
        count = sum(occ[i] for i in idx)
        if model == PNR:
            if count != required:
                return False
        else:
            if required == 0:
                if count != 0:
                    return False
            elif count < 1:
                return False
    return True


def detect_ensemble(ensemble: Ensemble, pattern: DetectionPattern) -> HeraldOutcome:
    """Mixture detection: probabilities combine linearly, conditionals reweight."""
    probability = 0.0
    collected: list[tuple[float, PureState]] = []
    for weight, state in ensemble.components:
        outcome = detect(state, pattern)
        probability += weight * outcome.probability
        if outcome.probability == 0.0:
            continue
        if isinstance(outcome.conditional, PureState):
            collected.append((weight * outcome.probability, outcome.conditional))
        else:
            for w, s in outcome.conditional.components:
                collected.append((weight * outcome.probability * w, s))
    if probability == 0.0:
        return HeraldOutcome(0.0, None)
    components = [(w / probability, s) for w, s in collected]
    if len(components) == 1:
        return HeraldOutcome(probability, components[0][1])
    return HeraldOutcome(probability, Ensemble.of(components))


def detect_any(source: PureState | Ensemble, pattern: DetectionPattern) -> HeraldOutcome:
    if isinstance(source, Ensemble):
        return detect_ensemble(source, pattern)
    return detect(source, pattern)


def rotate_spatial(
    source: PureState | Ensemble, spatial: str, jones: np.ndarray
) -> PureState | Ensemble:
    """Apply a polarization kernel to one spatial path of a state or mixture."""
    if isinstance(source, Ensemble):
        element = polarization_element(source.registry, spatial, jones)
        return Ensemble.of([(w, element.apply(s)) for w, s in source.components])
    return polarization_element(source.registry, spatial, jones).apply(source)


def fidelity(state: PureState, target: PureState) -> float:
    """|<target|state>|^2 for unit-norm pure states."""
    return abs(target.inner(state)) ** 2


def path_entangled_target(n: int, sign: float, spatial: str = "b") -> PureState:
    """(|n,0> + sign |0,n>)/sqrt(2) on one spatial path's h/v pair."""
    registry = ModeRegistry(polarization_pair(spatial))
    ih = registry.index(ModeLabel(spatial, "h"))
    amp = 1.0 / math.sqrt(2.0)
    terms = {}
    for occ_h, s in ((n, 1.0), (0, sign)):
        occ = [0, 0]
        occ[ih] = occ_h
        occ[1 - ih] = n - occ_h
        terms[tuple(occ)] = amp * s
    return PureState(registry, terms)


# -- the three heralding schemes ------------------------------------------------


def herald_noon2(source: PureState | Ensemble, basis: str) -> HeraldOutcome:
    """Coincidence on path a in a rotated basis heralds a two-photon
    path-entangled state on path b.

    ``pm`` leaves relative phase pi between the b terms, ``rl`` phase 0.
    """
    if basis not in ("pm", "rl"):
        raise ValueError("noon2 heralding basis must be 'pm' or 'rl'")
    rotated = rotate_spatial(source, "a", BASIS_ANALYZERS[basis])
    pattern = DetectionPattern.of({"a_h": 1, "a_v": 1})
    return detect_any(rotated, pattern)


def _noon4_extend(state: PureState) -> PureState:
    moved = state.rename_spatial({"a": "a1"})
    vac = PureState.vacuum(ModeRegistry(polarization_pair("a2")))
    return moved.tensor(vac)


def noon4_unitary(registry: ModeRegistry) -> ModeUnitary:
    """Balanced splitter from a1 into (a1, a2), then hwp 22.5 deg on a1 and
    qwp 45 deg on a2."""
    u = beamsplitter(registry, "a1", "a2", 0.5)
    u = polarization_element(registry, "a1", hwp(math.pi / 8)) @ u
    u = polarization_element(registry, "a2", qwp(math.pi / 4)) @ u
    return u


NOON4_PATTERN = {"a1_h": 1, "a1_v": 1, "a2_h": 1, "a2_v": 1}


def herald_noon4(state: PureState) -> HeraldOutcome:
    """Fourfold coincidence behind the splitter-and-waveplates train heralds a
    four-photon path-entangled state on path b."""
    extended = _noon4_extend(state)
    evolved = noon4_unitary(extended.registry).apply(extended)
    return detect(evolved, DetectionPattern.of(NOON4_PATTERN))


def _noon8_extend(state: PureState) -> PureState:
    moved = state.rename_spatial({"a": NOON8_LEAVES[0]})
    for leaf in NOON8_LEAVES[1:]:
        moved = moved.tensor(PureState.vacuum(ModeRegistry(polarization_pair(leaf))))
    return moved


def noon8_unitary(registry: ModeRegistry) -> ModeUnitary:
    """Three balanced splitters fan path a1 out to four leaves; each leaf gets
    the half-wave plate for its point on the great circle."""
    l1, l2, l3, l4 = NOON8_LEAVES
    u = beamsplitter(registry, l1, l3, 0.5)
    u = beamsplitter(registry, l1, l2, 0.5) @ u
    u = beamsplitter(registry, l3, l4, 0.5) @ u
    for leaf, angle in zip(NOON8_LEAVES, NOON8_WAVEPLATE_ANGLES):
        u = polarization_element(registry, leaf, hwp(angle)) @ u
    return u


NOON8_PATTERN = {f"{leaf}_{pol}": 1 for leaf in NOON8_LEAVES for pol in ("h", "v")}


def herald_noon8(state: PureState) -> HeraldOutcome:
    """Eightfold coincidence across the four leaves heralds an eight-photon
    path-entangled state, bunched in the circular (rl) basis of path b."""
    extended = _noon8_extend(state)
    registry = extended.registry
    l1, l2, l3, l4 = NOON8_LEAVES
    # Element-by-element application keeps the intermediate expansions small.
    evolved = beamsplitter(registry, l1, l3, 0.5).apply(extended)
    evolved = beamsplitter(registry, l1, l2, 0.5).apply(evolved)
    evolved = beamsplitter(registry, l3, l4, 0.5).apply(evolved)
    for leaf, angle in zip(NOON8_LEAVES, NOON8_WAVEPLATE_ANGLES):
        evolved = polarization_element(registry, leaf, hwp(angle)).apply(evolved)
    return detect(evolved, DetectionPattern.of(NOON8_PATTERN))


# -- operator-level route --------------------------------------------------------


def coincidence_operator(pattern: DetectionPattern, registry: ModeRegistry) -> OpPolynomial:
    """Product of annihilation operators realizing a PNR pattern.

    Only defined on registries without internal tags (one mode per detector).
    """
    poly = OpPolynomial.constant(1.0)
    for label, count in pattern.counts:
        idx = registry.physical_indices(label)
        if len(idx) != 1:
            raise ModeMismatchError(
                f"detector position {label} is ambiguous on this registry"
            )
        poly = poly * OpPolynomial.annihilator(registry.modes[idx[0]]).power(count)
    return poly


def herald_via_operator(
    state: PureState, train: ModeUnitary, pattern: DetectionPattern
) -> HeraldOutcome:
    """Backward-propagated route: pull the coincidence operator through the
    optical train and apply it to the source directly.

    Must agree with evolving the state forward and projecting; used as the
    independent cross-check of the circuit-level heralds.
    """
    if pattern.model != PNR:
        raise ValueError("operator route is defined for PNR patterns")
    registry = state.registry
    pulled = coincidence_operator(pattern, registry).transform(train.dagger())
    applied = pulled.apply(state)
    measured: set[int] = set()
    for label, _ in pattern.counts:
        measured.update(registry.physical_indices(label))
    surviving = {
        occ: amp for occ, amp in applied.terms.items() if all(occ[i] == 0 for i in measured)
    }
    norm_sq = sum(abs(a) ** 2 for a in surviving.values())
    probability = norm_sq / pattern.factorial_product
    if probability == 0.0:
        return HeraldOutcome(0.0, None)
    keep = [i for i in range(len(registry)) if i not in measured]
    reduced_registry = registry.without(registry.modes[i] for i in measured)
    scale = 1.0 / math.sqrt(norm_sq)
    conditional = PureState(
        reduced_registry,
        {tuple(occ[i] for i in keep): amp * scale for occ, amp in surviving.items()},
    )
    return HeraldOutcome(probability, conditional)


def herald_from_json(data: Mapping, source: PureState | Ensemble) -> HeraldOutcome:
    """Run a herald described by its JSON form against a source state."""
    scheme = data.get("scheme")
    if scheme == "noon2":
        return herald_noon2(source, data.get("basis", "pm"))
    if scheme == "noon4":
        if not isinstance(source, PureState):
            raise ValueError("noon4 heralding expects a pure source state")
        return herald_noon4(source)
    if scheme == "noon8":
        if not isinstance(source, PureState):
            raise ValueError("noon8 heralding expects a pure source state")
        return herald_noon8(source)
    if scheme == "custom":
        from .optics import Circuit  # local import keeps module deps one-way

        circuit = Circuit.from_json(data["circuit"])
        pattern = DetectionPattern.of(
            data["pattern"]["counts"], data["pattern"].get("model", PNR)
        )
        if isinstance(source, Ensemble):
            evolved = Ensemble.of(
                [(w, circuit.apply(s)) for w, s in source.components]
            )
        else:
            evolved = circuit.apply(source)
        return detect_any(evolved, pattern)
    raise ValueError(f"unknown herald scheme {scheme!r}")
