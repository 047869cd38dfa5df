"""Photon-pair sources: stimulated down-conversion and its fixed-pair terms.

The source emits into two spatial paths ``a`` and ``b``, each carrying an
(h, v) polarization pair. The n-pair term is the rotationally invariant
singlet with alternating signs; the full source state is their tanh-weighted
sum, truncated at a configurable pair number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .fock import Ensemble, ModeLabel, ModeRegistry, PureState

SOURCE_SPATIALS = ("a", "b")


def pair_registry(tag: str = "") -> ModeRegistry:
    """The four source modes a_h, a_v, b_h, b_v (optionally tagged)."""
    return ModeRegistry(
        ModeLabel(s, p, tag) for s in SOURCE_SPATIALS for p in ("h", "v")
    )


def two_pair_registry() -> ModeRegistry:
    """Eight modes carrying the internal I/II distinguishing labels."""
    return ModeRegistry(
        ModeLabel(s, p, tag)
        for s in SOURCE_SPATIALS
        for p in ("h", "v")
        for tag in ("I", "II")
    )


@dataclass(frozen=True)
class PdcParams:
    """Interaction strength and truncation for the down-conversion source."""

    tau: float
    n_max: int = 4

    def __post_init__(self) -> None:
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")


def singlet_term(n: int, tag: str = "") -> PureState:
    """Normalized n-pair singlet: (n+1) terms with alternating signs.

    Each term holds n photons in path a and n in path b, with the a-side
    polarization counts anticorrelated against the b side.
    """
    if n < 0:
        raise ValueError("pair number must be >= 0")
    registry = pair_registry(tag)
    ia_h = registry.index(ModeLabel("a", "h", tag))
    ia_v = registry.index(ModeLabel("a", "v", tag))
    ib_h = registry.index(ModeLabel("b", "h", tag))
    ib_v = registry.index(ModeLabel("b", "v", tag))
    terms: dict[tuple[int, ...], complex] = {}
    for m in range(n + 1):
        occ = [0, 0, 0, 0]
        occ[ia_h], occ[ia_v] = n - m, m
        occ[ib_h], occ[ib_v] = m, n - m
        terms[tuple(occ)] = float((-1) ** m)
    return PureState(registry, terms).normalized()


def pdc_state(params: PdcParams) -> PureState:
    """Truncated down-conversion state; NOT renormalized.

    The missing probability mass is exactly ``truncation_deficit(params)``.
    Built directly from the double sum over pair number and splitting, so the
    per-block comparison against ``singlet_term`` is an independent check.
    """
    registry = pair_registry()
    ia_h = registry.index(ModeLabel("a", "h"))
    ia_v = registry.index(ModeLabel("a", "v"))
    ib_h = registry.index(ModeLabel("b", "h"))
    ib_v = registry.index(ModeLabel("b", "v"))
    t = math.tanh(params.tau)
    prefactor = 1.0 / math.cosh(params.tau) ** 2
    terms: dict[tuple[int, ...], complex] = {}
    for n in range(params.n_max + 1):
        # sqrt(n+1) tanh^n / cosh^2 spread over the (n+1)-term singlet.
        amp_n = prefactor * math.sqrt(n + 1) * t**n / math.sqrt(n + 1)
        for m in range(n + 1):
            occ = [0, 0, 0, 0]
            occ[ia_h], occ[ia_v] = n - m, m
            occ[ib_h], occ[ib_v] = m, n - m
            terms[tuple(occ)] = (-1) ** m * amp_n
    return PureState(registry, terms)


def truncation_deficit(params: PdcParams) -> float:
    """Probability mass of pair numbers above n_max (closed form)."""
    t2 = math.tanh(params.tau) ** 2
    c4 = math.cosh(params.tau) ** 4
    kept = sum((n + 1) * t2**n for n in range(params.n_max + 1)) / c4
    return 1.0 - kept


def two_pair_mixture(alpha: float) -> Ensemble:
    """Two-pair emission with indistinguishable weight ``alpha``.

    The indistinguishable branch is the two-pair singlet (both pairs share
    internal label I); the distinguishable branch is a product of two one-pair
    singlets carrying orthogonal labels I and II. The branches never interfere
    in any detector statistic, so the state is modeled as their incoherent
    mixture on the common eight-mode registry.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    vac_ii = PureState.vacuum(pair_registry("II"))
    indistinct = singlet_term(2, tag="I").tensor(vac_ii)
    distinct = singlet_term(1, tag="I").tensor(singlet_term(1, tag="II"))
    return Ensemble.of([(alpha, indistinct), (1.0 - alpha, distinct)])


def source_from_json(data: Mapping) -> tuple[PureState | Ensemble, dict]:
    """Build a source from its JSON description; returns (source, metadata)."""
    kind = data.get("kind")
    if kind == "pdc":
        params = PdcParams(float(data["tau"]), int(data.get("n_max", 4)))
        state = pdc_state(params)
        return state, {"truncation_deficit": truncation_deficit(params)}
    if kind == "singlet":
        return singlet_term(int(data["n"])), {}
    if kind == "eq4":
        return two_pair_mixture(float(data["alpha"])), {}
    raise ValueError(f"unknown source kind {kind!r}")
