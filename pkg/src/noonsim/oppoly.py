"""Polynomials in bosonic annihilation operators.

Coincidence-detection operators are products of annihilation operators; this
module gives them an algebra: multiplication, application to states, and the
covariant transformation under a mode unitary. The substitution direction is
fixed by the contract

    transform(p, U).apply(U.apply(s)) == U.apply(p.apply(s))

which works out to a_i -> sum_j conj(U[j, i]) a_j.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .fock import ModeLabel, PureState, as_mode
from .optics import ModeUnitary

# Coefficients below this magnitude are treated as cancelled round-off and
# dropped from the canonical form; well below the 1e-10 comparison tolerance.
COEFF_DROP_TOL = 1e-14

ExponentKey = tuple[tuple[ModeLabel, int], ...]


@dataclass(frozen=True)
class OpMonomial:
    """coefficient * prod_m a_m^e_m with strictly positive exponents."""

    coefficient: complex
    exponents: ExponentKey

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exponents)


def _canonical_key(exponents: Mapping[ModeLabel, int]) -> ExponentKey:
    return tuple(sorted((m, e) for m, e in exponents.items() if e))


class OpPolynomial:
    """Sum of monomials in commuting annihilation operators."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[ExponentKey, complex]):
        kept: dict[ExponentKey, complex] = {}
        for key, coeff in terms.items():
            c = complex(coeff)
            if abs(c) > COEFF_DROP_TOL:
                kept[key] = c
        self.terms = kept

    # -- constructors -------------------------------------------------------

    @classmethod
    def annihilator(cls, mode: ModeLabel | str, coeff: complex = 1.0) -> "OpPolynomial":
        return cls({((as_mode(mode), 1),): coeff})

    @classmethod
    def constant(cls, value: complex) -> "OpPolynomial":
        return cls({(): value})

    @classmethod
    def zero(cls) -> "OpPolynomial":
        return cls({})

    # -- queries -------------------------------------------------------------

    @property
    def monomials(self) -> list[OpMonomial]:
        return [OpMonomial(c, key) for key, c in sorted(self.terms.items())]

    def modes(self) -> set[ModeLabel]:
        return {m for key in self.terms for m, _ in key}

    def coefficient(self, exponents: Mapping[ModeLabel, int]) -> complex:
        return self.terms.get(_canonical_key(exponents), 0j)

    def significant_monomials(self, tol: float = 1e-10) -> list[OpMonomial]:
        return [m for m in self.monomials if abs(m.coefficient) > tol]

    # -- algebra --------------------------------------------------------------

    def __add__(self, other: "OpPolynomial") -> "OpPolynomial":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out.get(key, 0j) + coeff
        return OpPolynomial(out)

    def __sub__(self, other: "OpPolynomial") -> "OpPolynomial":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "OpPolynomial":
        return OpPolynomial({k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other: "OpPolynomial | complex | float") -> "OpPolynomial":
        if not isinstance(other, OpPolynomial):
            return self.scaled(complex(other))
        out: dict[ExponentKey, complex] = {}
        for ka, ca in self.terms.items():
            da = dict(ka)
            for kb, cb in other.terms.items():
                merged = dict(da)
                for mode, e in kb:
                    merged[mode] = merged.get(mode, 0) + e
                key = _canonical_key(merged)
                out[key] = out.get(key, 0j) + ca * cb
        return OpPolynomial(out)

    __rmul__ = __mul__

    def power(self, n: int) -> "OpPolynomial":
        if n < 0:
            raise ValueError("negative operator powers are not defined")
        result = OpPolynomial.constant(1.0)
        for _ in range(n):
            result = result * self
        return result

    # -- actions ---------------------------------------------------------------

    def apply(self, state: PureState) -> "PureState":
        """Linear extension of the monomial ladder action; not renormalized."""
        out = PureState.zero(state.registry)
        for key, coeff in self.terms.items():
            partial = state
            for mode, e in key:
                for _ in range(e):
                    partial = partial.annihilate(mode)
                if partial.is_zero():
                    break
            if not partial.is_zero() or not key:
                out = out + partial.scaled(coeff)
        return out

    def transform(self, unitary: ModeUnitary) -> "OpPolynomial":
        """Conjugate by the lifted unitary: substitute a_i -> sum_j conj(U[j,i]) a_j."""
        registry = unitary.registry
        matrix = unitary.matrix
        subs: dict[ModeLabel, OpPolynomial] = {}
        for mode in self.modes():
            i = registry.index(mode)
            linear: dict[ExponentKey, complex] = {}
            for j, target in enumerate(registry.modes):
                c = matrix[j, i].conjugate()
                if abs(c) > COEFF_DROP_TOL:
                    linear[((target, 1),)] = c
            subs[mode] = OpPolynomial(linear)
        out = OpPolynomial.zero()
        for key, coeff in self.terms.items():
            term = OpPolynomial.constant(coeff)
            for mode, e in key:
                term = term * subs[mode].power(e)
            out = out + term
        return out

    def restricted_to(self, modes: set[ModeLabel]) -> "OpPolynomial":
        """Keep only monomials supported entirely on ``modes``."""
        return OpPolynomial(
            {k: c for k, c in self.terms.items() if all(m in modes for m, _ in k)}
        )

    # -- comparison and display --------------------------------------------------

    def isclose(
        self, other: "OpPolynomial", tol: float = 1e-10, up_to_global_phase: bool = False
    ) -> bool:
        a, b = self, other
        if up_to_global_phase:
            pivot = max(a.terms, key=lambda k: abs(a.terms[k]), default=None)
            if pivot is None:
                return not b.significant_monomials(tol)
            cb = b.terms.get(pivot, 0j)
            if abs(cb) <= tol:
                return False
            phase = (a.terms[pivot] / cb)
            phase /= abs(phase)
            b = b.scaled(phase)
        keys = set(a.terms) | set(b.terms)
        return all(abs(a.terms.get(k, 0j) - b.terms.get(k, 0j)) <= tol for k in keys)

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono in self.monomials:
            body = " ".join(
                f"{mode}^{e}" if e > 1 else str(mode) for mode, e in mono.exponents
            )
            c = mono.coefficient
            if abs(c.imag) <= COEFF_DROP_TOL:
                sign = "-" if c.real < 0 else "+"
                mag = abs(c.real)
                coeff_txt = "" if (abs(mag - 1.0) <= COEFF_DROP_TOL and body) else f"{mag:g}"
            else:
                sign = "+"
                coeff_txt = f"({c.real:g}{c.imag:+g}j)"
            piece = coeff_txt + ("*" if coeff_txt and body else "") + body
            parts.append((sign, piece or "0"))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, piece in parts[1:]:
            text += f" {sign} {piece}"
        return text

    def __repr__(self) -> str:
        return f"OpPolynomial({self.render()})"

    def to_json(self) -> dict:
        return {
            "monomials": [
                {
                    "re": m.coefficient.real,
                    "im": m.coefficient.imag,
                    "exponents": {str(mode): e for mode, e in m.exponents},
                }
                for m in self.monomials
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "OpPolynomial":
        terms: dict[ExponentKey, complex] = {}
        for entry in data["monomials"]:
            key = _canonical_key({as_mode(m): e for m, e in entry["exponents"].items()})
            terms[key] = terms.get(key, 0j) + complex(entry["re"], entry.get("im", 0.0))
        return cls(terms)


class PolarizationAxis(Enum):
    """Axis through the Poincare sphere; each defines a bunching basis pair."""

    HV = "hv"
    PM = "pm"
    RL = "rl"


_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# (plus, minus) basis vectors as (h, v) components.
_AXIS_VECTORS: dict[PolarizationAxis, tuple[tuple[complex, complex], tuple[complex, complex]]] = {
    PolarizationAxis.HV: ((1.0, 0.0), (0.0, 1.0)),
    PolarizationAxis.PM: ((_INV_SQRT2, _INV_SQRT2), (_INV_SQRT2, -_INV_SQRT2)),
    PolarizationAxis.RL: ((_INV_SQRT2, -1j * _INV_SQRT2), (_INV_SQRT2, 1j * _INV_SQRT2)),
}


def axis_operators(
    axis: PolarizationAxis, spatial: str = "a", tag: str = ""
) -> tuple[OpPolynomial, OpPolynomial]:
    """Annihilation operators of the axis's two poles, in h/v coordinates."""
    a_h = OpPolynomial.annihilator(ModeLabel(spatial, "h", tag))
    a_v = OpPolynomial.annihilator(ModeLabel(spatial, "v", tag))
    (ph, pv), (mh, mv) = _AXIS_VECTORS[axis]
    plus = a_h * ph + a_v * pv
    minus = a_h * mh + a_v * mv
    return plus, minus


def bunching_product(
    n: int,
    theta: float = 0.0,
    axis: PolarizationAxis = PolarizationAxis.HV,
    spatial: str = "a",
) -> OpPolynomial:
    """Product of n annihilation operators spaced equidistantly on the great
    circle perpendicular to ``axis``.

    Expands to exactly two monomials in the axis coordinates:
    plus^n - e^{i(n pi + theta)} minus^n.
    """
    if n < 1:
        raise ValueError("bunching product needs n >= 1")
    plus, minus = axis_operators(axis, spatial)
    product = OpPolynomial.constant(1.0)
    for m in range(n):
        phase = cmath.exp(1j * (2.0 * math.pi * m + theta) / n)
        product = product * (plus + minus * phase)
    return product
