"""Scripted measurements: visibility scans, birefringent-phase fringes, the
indistinguishability inversion and the pair-production ratio.

All scans report exact probabilities on a dense grid; visibilities come from
grid extrema (the curves are exact sinusoids here, so no fitting is needed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import Ensemble, PureState
from .heralding import (
    BASIS_ANALYZERS,
    THRESHOLD,
    DetectionPattern,
    detect_any,
    rotate_spatial,
)
from .optics import hwp, phase_plate
from .pdc import PdcParams, pdc_state, two_pair_mixture

FOURFOLD = DetectionPattern.of({"a_h": 1, "a_v": 1, "b_h": 1, "b_v": 1})
TWOFOLD = DetectionPattern.of({"a_h": 1, "b_v": 1}, THRESHOLD)


@dataclass(frozen=True)
class ScanResult:
    """Probability series over a strictly increasing abscissa (radians)."""

    abscissa: tuple[float, ...]
    series: dict[str, tuple[float, ...]]

    def visibility(self, name: str) -> float:
        values = self.series[name]
        hi, lo = max(values), min(values)
        return 0.0 if hi + lo == 0.0 else (hi - lo) / (hi + lo)

    def minima_positions(self, name: str, tol: float = 1e-12) -> tuple[float, ...]:
        values = self.series[name]
        lo = min(values)
        return tuple(x for x, v in zip(self.abscissa, values) if v <= lo + tol)

    def argmax(self, name: str) -> float:
        values = self.series[name]
        return self.abscissa[values.index(max(values))]


def _check_grid(grid: tuple[float, ...]) -> tuple[float, ...]:
    grid = tuple(float(x) for x in grid)
    if not grid:
        raise ValueError("scan grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("scan grid must be strictly increasing")
    return grid


def degree_grid(start_deg: float, stop_deg: float, points: int) -> tuple[float, ...]:
    return tuple(math.radians(x) for x in np.linspace(start_deg, stop_deg, points))


def phase_grid(points: int = 720, span: float = 2.0 * math.pi) -> tuple[float, ...]:
    return tuple(span * k / points for k in range(points))


def visibility_scan(
    source: PureState | Ensemble,
    basis_a: str,
    grid: tuple[float, ...],
) -> ScanResult:
    """Fix the analyzer of path a, rotate path b's half-wave plate through
    ``grid`` and record two-fold (a_h x b_v) and four-fold coincidences."""
    grid = _check_grid(grid)
    fixed = rotate_spatial(source, "a", BASIS_ANALYZERS[basis_a])
    twofold: list[float] = []
    fourfold: list[float] = []
    for angle in grid:
        rotated = rotate_spatial(fixed, "b", hwp(angle))
        twofold.append(detect_any(rotated, TWOFOLD).probability)
        fourfold.append(detect_any(rotated, FOURFOLD).probability)
    return ScanResult(grid, {"twofold": tuple(twofold), "fourfold": tuple(fourfold)})


def fringe_scan(
    basis_a: str,
    grid: tuple[float, ...],
    tau: float = 0.1,
    n_max: int = 4,
    source: PureState | Ensemble | None = None,
) -> ScanResult:
    """Herald on path a (pm or rl), then scan a birefringent phase on path b
    ahead of a 22.5-degree half-wave plate.

    The four-fold b_h b_v coincidence (joint with the herald) oscillates at
    twice the induced phase; the two-fold a_h x b_v follows the phase itself.
    """
    if basis_a not in ("pm", "rl"):
        raise ValueError("fringe heralding basis must be 'pm' or 'rl'")
    grid = _check_grid(grid)
    if source is None:
        source = pdc_state(PdcParams(tau, n_max)).normalized()
    fixed = rotate_spatial(source, "a", BASIS_ANALYZERS[basis_a])
    interferer = hwp(math.pi / 8)
    twofold: list[float] = []
    fourfold: list[float] = []
    for theta_b in grid:
        shifted = rotate_spatial(fixed, "b", interferer @ phase_plate(theta_b))
        twofold.append(detect_any(shifted, TWOFOLD).probability)
        fourfold.append(detect_any(shifted, FOURFOLD).probability)
    return ScanResult(grid, {"twofold": tuple(twofold), "fourfold": tuple(fourfold)})


DEFAULT_ALPHA_SCAN_GRID = degree_grid(0.0, 45.0, 181)  # one full period, 0.25 deg steps


def alpha_visibility_curve(
    alphas: tuple[float, ...],
    grid: tuple[float, ...] = DEFAULT_ALPHA_SCAN_GRID,
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Four-fold visibility of the two-pair mixture versus the
    indistinguishable weight, with path a fixed in hv."""
    alphas = tuple(float(a) for a in alphas)
    visibilities = []
    for alpha in alphas:
        scan = visibility_scan(two_pair_mixture(alpha), "hv", grid)
        visibilities.append(scan.visibility("fourfold"))
    return alphas, tuple(visibilities)


def _fine_visibility_curve(
    points: int = 1001, grid: tuple[float, ...] = DEFAULT_ALPHA_SCAN_GRID
) -> tuple[np.ndarray, np.ndarray]:
    # Detection probabilities are linear in the mixture weights, so the two
    # component curves determine V(alpha) for every alpha.
    pure = np.array(visibility_scan(two_pair_mixture(1.0), "hv", grid).series["fourfold"])
    labeled = np.array(visibility_scan(two_pair_mixture(0.0), "hv", grid).series["fourfold"])
    alphas = np.linspace(0.0, 1.0, points)
    curves = alphas[:, None] * pure[None, :] + (1.0 - alphas[:, None]) * labeled[None, :]
    hi, lo = curves.max(axis=1), curves.min(axis=1)
    return alphas, (hi - lo) / (hi + lo)


def alpha_from_visibility(v_measured: float, points: int = 1001) -> float:
    """Invert the monotone visibility curve of the two-pair mixture model."""
    alphas, vis = _fine_visibility_curve(points)
    if np.any(np.diff(vis) <= 0):
        raise RuntimeError("model visibility curve is not strictly increasing")
    if not vis[0] <= v_measured <= vis[-1]:
        raise ValueError(
            f"visibility {v_measured} outside the attainable interval "
            f"[{vis[0]:.6f}, {vis[-1]:.6f}]"
        )
    return float(np.interp(v_measured, vis, alphas))


def pair_ratio(tau: float, n_max: int = 4) -> float:
    """Three-pair to two-pair production ratio, from the simulated photon
    number distribution (six photons vs four)."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    if n_max < 3:
        raise ValueError("need n_max >= 3 to resolve three pairs")
    dist = pdc_state(PdcParams(tau, n_max)).normalized().number_distribution()
    if 4 not in dist:
        raise ValueError(f"two-pair emission is below the sparse floor at tau={tau}")
    # a missing six-photon bin means the three-pair mass was pruned to zero
    return dist.get(6, 0.0) / dist[4]
