"""Optical elements as mode unitaries, and the lift of a mode unitary to
Fock space.

Fixed phase conventions (all physical claims checked elsewhere are invariant
under the conventions left open by global phases):

  hwp(t)         [[cos 2t,  sin 2t], [sin 2t, -cos 2t]]          on (h, v)
  qwp(t)         R(t) @ diag(1, i) @ R(-t), R a real rotation    on (h, v)
  phase_plate(t) diag(1, e^{it})                                 on (h, v)
  bs_coupler(r)  [[sqrt(1-r), i sqrt(r)], [i sqrt(r), sqrt(1-r)]] on two ports
  pbs            h transmitted with +1, v swapped across ports with +1

Circular basis used by the rest of the package: r = (h - i v)/sqrt(2),
l = (h + i v)/sqrt(2); qwp(45 deg) maps the rl axis onto the hv axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fock import (
    ModeLabel,
    ModeMismatchError,
    ModeRegistry,
    PureState,
    as_mode,
)

UNITARITY_TOL = 1e-12

_SQRT_FACT = [math.sqrt(math.factorial(k)) for k in range(40)]


# -- 2x2 element kernels ----------------------------------------------------

def rotator(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def hwp(theta: float) -> np.ndarray:
    """Half-wave plate with fast axis at ``theta`` (radians) from horizontal."""
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def qwp(theta: float) -> np.ndarray:
    """Quarter-wave plate with fast axis at ``theta`` (radians)."""
    return rotator(theta) @ np.diag([1.0, 1.0j]) @ rotator(-theta)


def phase_plate(theta: float) -> np.ndarray:
    """Birefringent phase between h and v: diag(1, e^{i theta})."""
    return np.diag([1.0, np.exp(1j * theta)]).astype(complex)


def bs_coupler(reflectivity: float = 0.5) -> np.ndarray:
    """Lossless beam-splitter kernel on two spatial ports (symmetric phases)."""
    if not 0.0 <= reflectivity <= 1.0:
        raise ValueError(f"reflectivity must be in [0, 1], got {reflectivity}")
    t, r = math.sqrt(1.0 - reflectivity), math.sqrt(reflectivity)
    return np.array([[t, 1j * r], [1j * r, t]], dtype=complex)


def random_polarization_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary (a random analyzer basis)."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# -- mode unitaries ----------------------------------------------------------

@dataclass(frozen=True)
class ModeUnitary:
    """Unitary matrix over a registry's modes. Column i holds the image of
    mode i: the lift replaces each creation operator a_i^dag by
    sum_j U[j, i] a_j^dag."""

    registry: ModeRegistry
    matrix: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.registry)
        if self.matrix.shape != (n, n):
            raise ModeMismatchError(
                f"matrix shape {self.matrix.shape} does not match registry size {n}"
            )
        dev = np.abs(self.matrix @ self.matrix.conj().T - np.eye(n)).max()
        if dev > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (deviation {dev:.2e})")

    def dagger(self) -> "ModeUnitary":
        return ModeUnitary(self.registry, self.matrix.conj().T.copy())

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        if self.registry != other.registry:
            raise ModeMismatchError("cannot compose unitaries over different registries")
        return ModeUnitary(self.registry, self.matrix @ other.matrix)

    def apply(self, state: PureState) -> PureState:
        """Lift to Fock space and apply; the homomorphism U -> Phi(U).

        Photon-number conserving and norm preserving.
        """
        if state.registry != self.registry:
            raise ModeMismatchError("state registry does not match unitary registry")
        n_modes = len(self.registry)
        cols = [
            tuple(j for j in range(n_modes) if abs(self.matrix[j, i]) > 1e-16)
            for i in range(n_modes)
        ]
        out: dict[tuple[int, ...], complex] = {}
        zero = (0,) * n_modes
        power_cache: dict[tuple[int, int], dict[tuple[int, ...], complex]] = {}
        for occ, amp in state.terms.items():
            norm = 1.0
            for n in occ:
                norm *= _SQRT_FACT[n]
            poly: dict[tuple[int, ...], complex] = {zero: amp / norm}
            for i, n in enumerate(occ):
                if n:
                    factor = power_cache.get((i, n))
                    if factor is None:
                        factor = _column_power(self.matrix, cols[i], i, n, n_modes)
                        power_cache[(i, n)] = factor
                    poly = _poly_mult(poly, factor)
            for expo, coeff in poly.items():
                weight = 1.0
                for n in expo:
                    weight *= _SQRT_FACT[n]
                out[expo] = out.get(expo, 0j) + coeff * weight
        return PureState(self.registry, out)


def _column_power(
    matrix: np.ndarray, js: tuple[int, ...], col: int, power: int, n_modes: int
) -> dict[tuple[int, ...], complex]:
    """(sum_j U[j, col] x_j)^power expanded over exponent tuples."""
    out: dict[tuple[int, ...], complex] = {}

    def rec(slot: int, remaining: int, coeff: complex, expo: list[int]) -> None:
        if slot == len(js) - 1:
            j = js[slot]
            expo[j] = remaining
            out_key = tuple(expo)
            c = coeff * matrix[j, col] ** remaining / math.factorial(remaining)
            out[out_key] = out.get(out_key, 0j) + c
            expo[j] = 0
            return
        j = js[slot]
        for k in range(remaining + 1):
            expo[j] = k
            rec(slot + 1, remaining - k, coeff * matrix[j, col] ** k / math.factorial(k), expo)
        expo[j] = 0

    rec(0, power, complex(math.factorial(power)), [0] * n_modes)
    return out


def _poly_mult(
    a: dict[tuple[int, ...], complex], b: dict[tuple[int, ...], complex]
) -> dict[tuple[int, ...], complex]:
    out: dict[tuple[int, ...], complex] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0j) + ca * cb
    return out


# -- embedding kernels into full registries ----------------------------------

def embed(
    registry: ModeRegistry, targets: Sequence[ModeLabel | str], small: np.ndarray
) -> ModeUnitary:
    """Place ``small`` on the given target modes (in the order given),
    identity everywhere else."""
    idx = [registry.index(t) for t in targets]
    if len(set(idx)) != len(idx):
        raise ModeMismatchError("embed targets must be distinct")
    k = len(idx)
    if small.shape != (k, k):
        raise ModeMismatchError(f"kernel shape {small.shape} does not match {k} targets")
    full = np.eye(len(registry), dtype=complex)
    for r, ir in enumerate(idx):
        for c, ic in enumerate(idx):
            full[ir, ic] = small[r, c]
    return ModeUnitary(registry, full)


def _tags_for(registry: ModeRegistry, spatial: str) -> list[str]:
    tags: dict[str, None] = {}
    for m in registry:
        if m.spatial == spatial:
            tags.setdefault(m.tag, None)
    if not tags:
        raise ModeMismatchError(f"no modes with spatial label {spatial!r}")
    return list(tags)


def polarization_element(registry: ModeRegistry, spatial: str, jones: np.ndarray) -> ModeUnitary:
    """Lift a 2x2 Jones kernel onto the (h, v) pair of one spatial path.

    Applied identically to every internal tag present (a waveplate cannot see
    the distinguishing quantum number).
    """
    full = np.eye(len(registry), dtype=complex)
    for tag in _tags_for(registry, spatial):
        ih = registry.index(ModeLabel(spatial, "h", tag))
        iv = registry.index(ModeLabel(spatial, "v", tag))
        for r, ir in enumerate((ih, iv)):
            for c, ic in enumerate((ih, iv)):
                full[ir, ic] = jones[r, c]
    return ModeUnitary(registry, full)


def _paired_keys(registry: ModeRegistry, s1: str, s2: str) -> list[tuple[str, str]]:
    keys1 = {(m.pol, m.tag) for m in registry if m.spatial == s1}
    keys2 = {(m.pol, m.tag) for m in registry if m.spatial == s2}
    if not keys1 or keys1 != keys2:
        raise ModeMismatchError(
            f"spatial paths {s1!r} and {s2!r} do not carry matching mode sets"
        )
    return sorted(keys1)


def beamsplitter(
    registry: ModeRegistry, s1: str, s2: str, reflectivity: float = 0.5
) -> ModeUnitary:
    """Beam splitter between two spatial paths, acting per polarization (and tag)."""
    kernel = bs_coupler(reflectivity)
    full = np.eye(len(registry), dtype=complex)
    for pol, tag in _paired_keys(registry, s1, s2):
        i1 = registry.index(ModeLabel(s1, pol, tag))
        i2 = registry.index(ModeLabel(s2, pol, tag))
        for r, ir in enumerate((i1, i2)):
            for c, ic in enumerate((i1, i2)):
                full[ir, ic] = kernel[r, c]
    return ModeUnitary(registry, full)


def pbs(registry: ModeRegistry, s1: str, s2: str) -> ModeUnitary:
    """Polarizing beam splitter: h transmitted, v swapped between the paths."""
    full = np.eye(len(registry), dtype=complex)
    for pol, tag in _paired_keys(registry, s1, s2):
        if pol != "v":
            continue
        i1 = registry.index(ModeLabel(s1, pol, tag))
        i2 = registry.index(ModeLabel(s2, pol, tag))
        full[i1, i1] = full[i2, i2] = 0.0
        full[i1, i2] = full[i2, i1] = 1.0
    return ModeUnitary(registry, full)


def phase_element(registry: ModeRegistry, spatial: str, theta: float) -> ModeUnitary:
    return polarization_element(registry, spatial, phase_plate(theta))


# -- circuits -----------------------------------------------------------------

@dataclass(frozen=True)
class CircuitElement:
    kind: str
    params: tuple[tuple[str, float], ...]
    targets: tuple[str, ...]

    def param(self, name: str) -> float:
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)


@dataclass(frozen=True)
class Circuit:
    """Ordered optical elements; applied strictly in list order."""

    elements: tuple[CircuitElement, ...]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "Circuit":
        elements = []
        for entry in data:
            kind = entry["kind"]
            params = tuple(
                sorted((k, float(v)) for k, v in entry.items() if k not in ("kind", "targets"))
            )
            elements.append(CircuitElement(kind, params, tuple(entry["targets"])))
        return cls(tuple(elements))

    def to_json(self) -> list[dict]:
        return [
            {"kind": e.kind, **{k: v for k, v in e.params}, "targets": list(e.targets)}
            for e in self.elements
        ]

    def unitary(self, registry: ModeRegistry) -> ModeUnitary:
        total = ModeUnitary(registry, np.eye(len(registry), dtype=complex))
        for element in self.elements:
            total = _element_unitary(element, registry) @ total
        return total

    def apply(self, state: PureState) -> PureState:
        for element in self.elements:
            state = _element_unitary(element, state.registry).apply(state)
        return state


def _element_unitary(element: CircuitElement, registry: ModeRegistry) -> ModeUnitary:
    kind = element.kind
    if kind in ("hwp", "qwp"):
        angle = math.radians(element.param("angle_deg"))
        jones = hwp(angle) if kind == "hwp" else qwp(angle)
        if len(element.targets) == 1:
            return polarization_element(registry, element.targets[0], jones)
        if len(element.targets) == 2:
            return embed(registry, [as_mode(t) for t in element.targets], jones)
        raise ModeMismatchError(f"{kind} takes one spatial or two mode targets")
    if kind == "phase_plate":
        (spatial,) = element.targets
        return phase_element(registry, spatial, element.param("theta_rad"))
    if kind == "bs":
        s1, s2 = element.targets
        return beamsplitter(registry, s1, s2, element.param("r"))
    if kind == "pbs":
        s1, s2 = element.targets
        return pbs(registry, s1, s2)
    raise ValueError(f"unknown circuit element kind {kind!r}")
