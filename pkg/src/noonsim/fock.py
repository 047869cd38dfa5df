"""Sparse multimode bosonic Fock states.

A state is a sparse map from occupation tuples to complex amplitudes over an
explicit, canonically ordered mode registry. Mixtures are weighted lists of
pure states. Everything here is a pure function of immutable values; states
are never mutated after construction and are safe to share across workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

# Stored amplitudes with |amp|^2 below this are dropped. Far below every
# tolerance asserted anywhere else, so pruning never moves a reported
# probability by more than 1e-10.
PRUNE_TOL_SQ = 1e-24

POLARIZATIONS = ("h", "v")


class ModeMismatchError(ValueError):
    """A mode label or registry does not match what an operation expects."""


class ZeroNormError(ValueError):
    """Normalization or conditioning was attempted on a zero-norm state
    (an impossible conditioning event)."""


@dataclass(frozen=True, order=True)
class ModeLabel:
    """One optical mode: spatial path, polarization, optional internal tag.

    The tag marks a hidden distinguishing quantum number (used to model
    partially distinguishable photon pairs); detectors never resolve it.
    Field order defines the canonical mode ordering: lexicographic by
    (spatial, polarization), untagged before tagged.
    """

    spatial: str
    pol: str
    tag: str = ""

    def __post_init__(self) -> None:
        if not self.spatial or "_" in self.spatial:
            raise ValueError(f"bad spatial label {self.spatial!r}")
        if self.pol not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}, got {self.pol!r}")
        if "_" in self.tag:
            raise ValueError(f"bad tag {self.tag!r}")

    @property
    def physical(self) -> tuple[str, str]:
        """(spatial, pol) identity seen by a detector; tags are invisible."""
        return (self.spatial, self.pol)

    def __str__(self) -> str:
        return f"{self.spatial}_{self.pol}" + (f"_{self.tag}" if self.tag else "")

    @classmethod
    def parse(cls, text: str) -> "ModeLabel":
        parts = text.split("_")
        if len(parts) == 2:
            return cls(parts[0], parts[1])
        if len(parts) == 3:
            return cls(parts[0], parts[1], parts[2])
        raise ValueError(f"cannot parse mode label {text!r}")


def as_mode(label: "ModeLabel | str") -> ModeLabel:
    return label if isinstance(label, ModeLabel) else ModeLabel.parse(label)


class ModeRegistry:
    """Ordered set of distinct mode labels; fixes the occupation-axis order."""

    __slots__ = ("modes", "_index")

    def __init__(self, labels: Iterable[ModeLabel | str]):
        modes = tuple(sorted(as_mode(l) for l in labels))
        if len(set(modes)) != len(modes):
            raise ModeMismatchError("duplicate mode labels in registry")
        self.modes = modes
        self._index = {m: i for i, m in enumerate(modes)}

    def index(self, label: ModeLabel | str) -> int:
        try:
            return self._index[as_mode(label)]
        except KeyError:
            raise ModeMismatchError(f"mode {label} not in registry {self}") from None

    def __contains__(self, label: object) -> bool:
        return as_mode(label) in self._index if isinstance(label, (ModeLabel, str)) else False

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self) -> Iterator[ModeLabel]:
        return iter(self.modes)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModeRegistry) and self.modes == other.modes

    def __hash__(self) -> int:
        return hash(self.modes)

    def __repr__(self) -> str:
        return "ModeRegistry[" + ", ".join(map(str, self.modes)) + "]"

    def union(self, other: "ModeRegistry") -> "ModeRegistry":
        overlap = set(self.modes) & set(other.modes)
        if overlap:
            raise ModeMismatchError(f"registries overlap on {sorted(map(str, overlap))}")
        return ModeRegistry(self.modes + other.modes)

    def without(self, labels: Iterable[ModeLabel]) -> "ModeRegistry":
        drop = set(labels)
        return ModeRegistry(m for m in self.modes if m not in drop)

    def physical_indices(self, label: ModeLabel | str) -> tuple[int, ...]:
        """Indices of every mode a detector at (spatial, pol) cannot tell apart."""
        key = as_mode(label).physical
        return tuple(i for i, m in enumerate(self.modes) if m.physical == key)

    def spatials(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for m in self.modes:
            seen.setdefault(m.spatial, None)
        return tuple(seen)


def polarization_pair(spatial: str, tag: str = "") -> tuple[ModeLabel, ModeLabel]:
    return ModeLabel(spatial, "h", tag), ModeLabel(spatial, "v", tag)


class PureState:
    """Sparse superposition of occupation-number basis states.

    Terms with |amplitude|^2 below ``PRUNE_TOL_SQ`` are dropped at
    construction. Not automatically normalized: ladder operators and
    projections deliberately return sub-normalized states.
    """

    __slots__ = ("registry", "terms")

    def __init__(self, registry: ModeRegistry, terms: Mapping[tuple[int, ...], complex]):
        self.registry = registry
        width = len(registry)
        kept: dict[tuple[int, ...], complex] = {}
        for occ, amp in terms.items():
            if len(occ) != width:
                raise ModeMismatchError(f"occupation {occ} has wrong width for {registry}")
            if any(n < 0 or int(n) != n for n in occ):
                raise ValueError(f"occupation counts must be nonnegative integers: {occ}")
            a = complex(amp)
            if a.real * a.real + a.imag * a.imag >= PRUNE_TOL_SQ:
                kept[tuple(int(n) for n in occ)] = a
        self.terms = kept

    # -- constructors ------------------------------------------------------

    @classmethod
    def basis(cls, registry: ModeRegistry, occ: Iterable[int], amp: complex = 1.0) -> "PureState":
        return cls(registry, {tuple(occ): amp})

    @classmethod
    def vacuum(cls, registry: ModeRegistry) -> "PureState":
        return cls.basis(registry, (0,) * len(registry))

    @classmethod
    def zero(cls, registry: ModeRegistry) -> "PureState":
        return cls(registry, {})

    # -- basic queries -----------------------------------------------------

    def amplitude(self, occ: Iterable[int]) -> complex:
        return self.terms.get(tuple(occ), 0j)

    @property
    def norm_sq(self) -> float:
        return sum(a.real * a.real + a.imag * a.imag for a in self.terms.values())

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    def is_zero(self) -> bool:
        return not self.terms

    def canonical_terms(self) -> list[tuple[tuple[int, ...], complex]]:
        """Terms sorted by occupation tuple; the deterministic serialization order."""
        return sorted(self.terms.items())

    # -- algebra -----------------------------------------------------------

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.registry, {o: a * factor for o, a in self.terms.items()})

    def __add__(self, other: "PureState") -> "PureState":
        self._require_same_registry(other)
        out = dict(self.terms)
        for occ, amp in other.terms.items():
            out[occ] = out.get(occ, 0j) + amp
        return PureState(self.registry, out)

    def __sub__(self, other: "PureState") -> "PureState":
        return self + other.scaled(-1.0)

    def normalized(self) -> "PureState":
        n = self.norm
        if n == 0.0:
            raise ZeroNormError("cannot normalize a zero state (herald never fires)")
        return self.scaled(1.0 / n)

    def inner(self, other: "PureState") -> complex:
        """<self|other>; conjugate-linear in self."""
        self._require_same_registry(other)
        small, big = (self, other) if len(self.terms) <= len(other.terms) else (other, self)
        total = 0j
        for occ, amp in small.terms.items():
            b = big.terms.get(occ)
            if b is not None:
                total += (amp.conjugate() * b) if small is self else (b.conjugate() * amp)
        return total

    def annihilate(self, mode: ModeLabel | str) -> "PureState":
        i = self.registry.index(mode)
        out: dict[tuple[int, ...], complex] = {}
        for occ, amp in self.terms.items():
            n = occ[i]
            if n:
                target = occ[:i] + (n - 1,) + occ[i + 1:]
                out[target] = out.get(target, 0j) + amp * math.sqrt(n)
        return PureState(self.registry, out)

    def create(self, mode: ModeLabel | str) -> "PureState":
        i = self.registry.index(mode)
        out: dict[tuple[int, ...], complex] = {}
        for occ, amp in self.terms.items():
            target = occ[:i] + (occ[i] + 1,) + occ[i + 1:]
            out[target] = out.get(target, 0j) + amp * math.sqrt(occ[i] + 1)
        return PureState(self.registry, out)

    def tensor(self, other: "PureState") -> "PureState":
        merged = self.registry.union(other.registry)
        pos_a = [merged.index(m) for m in self.registry]
        pos_b = [merged.index(m) for m in other.registry]
        out: dict[tuple[int, ...], complex] = {}
        for occ_a, amp_a in self.terms.items():
            for occ_b, amp_b in other.terms.items():
                occ = [0] * len(merged)
                for p, n in zip(pos_a, occ_a):
                    occ[p] = n
                for p, n in zip(pos_b, occ_b):
                    occ[p] = n
                out[tuple(occ)] = amp_a * amp_b
        return PureState(merged, out)

    def number_distribution(self, modes: Iterable[ModeLabel | str] | None = None) -> dict[int, float]:
        """Probability of the total photon count restricted to ``modes``.

        Sums to 1 for a unit-norm state (to the state's squared norm otherwise).
        """
        if modes is None:
            idx = range(len(self.registry))
        else:
            idx = [self.registry.index(m) for m in modes]
        dist: dict[int, float] = {}
        for occ, amp in self.terms.items():
            total = sum(occ[i] for i in idx)
            dist[total] = dist.get(total, 0.0) + abs(amp) ** 2
        return dict(sorted(dist.items()))

    def rename_spatial(self, mapping: Mapping[str, str]) -> "PureState":
        """Relabel spatial paths; occupations follow their modes into the new order."""
        new_labels = [
            ModeLabel(mapping.get(m.spatial, m.spatial), m.pol, m.tag) for m in self.registry
        ]
        if len(set(new_labels)) != len(new_labels):
            raise ModeMismatchError("spatial renaming collides")
        registry = ModeRegistry(new_labels)
        positions = [registry.index(l) for l in new_labels]
        out: dict[tuple[int, ...], complex] = {}
        for occ, amp in self.terms.items():
            target = [0] * len(occ)
            for p, n in zip(positions, occ):
                target[p] = n
            out[tuple(target)] = amp
        return PureState(registry, out)

    def isclose(self, other: "PureState", tol: float = 1e-12) -> bool:
        if self.registry != other.registry:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0j) - other.terms.get(k, 0j)) <= tol for k in keys)

    def _require_same_registry(self, other: "PureState") -> None:
        if self.registry != other.registry:
            raise ModeMismatchError("states live on different registries")

    def __repr__(self) -> str:
        parts = [f"({amp:.4g})|{','.join(map(str, occ))}>" for occ, amp in self.canonical_terms()]
        return " + ".join(parts) if parts else "0"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "modes": [str(m) for m in self.registry],
            "terms": [
                {"occ": list(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in self.canonical_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PureState":
        registry = ModeRegistry(data["modes"])
        order = [registry.index(m) for m in data["modes"]]
        terms: dict[tuple[int, ...], complex] = {}
        for entry in data["terms"]:
            occ = [0] * len(registry)
            for pos, n in zip(order, entry["occ"]):
                occ[pos] = n
            terms[tuple(occ)] = complex(entry["re"], entry.get("im", 0.0))
        return cls(registry, terms)


@dataclass(frozen=True)
class Ensemble:
    """Incoherent mixture of pure states sharing one registry."""

    components: tuple[tuple[float, PureState], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("ensemble needs at least one component")
        registry = self.components[0][1].registry
        total = 0.0
        for weight, state in self.components:
            if weight < 0:
                raise ValueError(f"negative ensemble weight {weight}")
            if state.registry != registry:
                raise ModeMismatchError("ensemble components live on different registries")
            total += weight
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"ensemble weights sum to {total}, not 1")

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, PureState]]) -> "Ensemble":
        kept = tuple((w, s) for w, s in pairs if w > 0.0)
        return cls(kept)

    @property
    def registry(self) -> ModeRegistry:
        return self.components[0][1].registry

    def to_json(self) -> dict:
        return {
            "components": [
                {"weight": w, "state": s.to_json()} for w, s in self.components
            ]
        }
