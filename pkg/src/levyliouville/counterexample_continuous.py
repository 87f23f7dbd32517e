"""Exact piecewise-polynomial harmonic function for ``L = d²/dx² + L0`` on the line.

Every piece lives on ``(c - 1/2, c + 1/2)`` around an integer center ``c`` and
is a polynomial in the local variable ``z = x - c``.  The seed piece at 0 is
the polynomial bump ``(1/4 - z²)^q``; level ``m`` adds ``φ_m`` at
``m + x_m`` (and its reflection at ``-(m + x_m)``), chosen so that ``L h``
vanishes on ``|x - m| < 1/2``.  Since all centers are integers, every lookup
``h(x ± x_k)`` lands on a whole piece and no polynomial shifts are needed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb

import numpy as np

from .levy_core import LevyTriplet, SeriesMeasure, apply_operator, counterexample_mass

# strict lower bound for ln 2; makes the choice of x_m rigorous
LN2_LO = Fraction("0.6931471805599453")
HALF = Fraction(1, 2)


class OutsideWindowError(ValueError):
    pass


class BumpDegreeError(ValueError):
    pass


@dataclass(frozen=True)
class Polynomial:
    """Exact polynomial ``Σ c_i z^i`` on ``z ∈ (-1/2, 1/2)``."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, s) -> "Polynomial":
        return Polynomial(tuple(s * c for c in self.coeffs))

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def reflect(self) -> "Polynomial":
        """``z -> -z``."""
        return Polynomial(tuple(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)))

    def sup_bound(self) -> Fraction:
        """Rigorous bound for ``sup_{|z|<=1/2} |p(z)|``: ``Σ |c_i| 2^{-i}``."""
        return sum((abs(c) / (1 << i) for i, c in enumerate(self.coeffs)), Fraction(0))

    @cached_property
    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in reversed(self.coeffs)] or [0.0])

    def evaluate(self, z) -> np.ndarray:
        return np.polyval(self.float_coeffs, z)


def polynomial_bump(q: int) -> Polynomial:
    """``(1/4 - z²)^q`` expanded exactly."""
    cs = [Fraction(0)] * (2 * q + 1)
    for j in range(q + 1):
        cs[2 * j] = comb(q, j) * Fraction(1, 4) ** (q - j) * (-1) ** j
    return Polynomial(tuple(cs))


def x_lower_bound(m: int, prev: int) -> int:
    """Smallest power of two ``>= max(2 x_{m-1}, 4m, 2^{2m²})``."""
    need = max(2 * prev, 4 * m, 1 << (2 * m * m), 1)
    return 1 << (need - 1).bit_length()


@dataclass(frozen=True)
class PiecewiseBundle:
    pieces: dict[int, Polynomial]
    levels: tuple[int, ...]  # x_0 .. x_M
    q: int

    @property
    def level(self) -> int:
        return len(self.levels) - 1

    @cached_property
    def second_derivatives(self) -> dict[int, Polynomial]:
        return {c: p.derivative().derivative() for c, p in self.pieces.items()}

    @cached_property
    def support_radius(self) -> Fraction:
        return max(abs(c) for c in self.pieces) + HALF

    sup_norm = None

    def jump_location(self, k: int) -> int:
        """``x_k`` for built levels; beyond them the smallest admissible value.

        Lookups at distance ``>= x_k`` from the validity window land outside
        the support for any admissible ``x_k``, so the stand-in is harmless.
        """
        if k <= self.level:
            return self.levels[k]
        x = self.levels[-1]
        for j in range(self.level + 1, k + 1):
            x = x_lower_bound(j, x)
        return x

    def triplet(self, truncation: int | None = None) -> LevyTriplet:
        K = self.level + 8 if truncation is None else truncation
        meas = SeriesMeasure(location=self.jump_location, mass=counterexample_mass,
                             tail=lambda K: Fraction(1, 1 << (K + 1)), truncation=K,
                             name="counterexample-continuous")
        return LevyTriplet(1, 0, meas)

    # --- exact evaluation
    @staticmethod
    def _locate(x):
        n = math.floor(x + HALF)
        return n, x - n

    def _eval(self, table, x):
        n, z = self._locate(Fraction(x))
        p = table.get(n)
        return p(z) if p is not None else Fraction(0)

    def value(self, x):
        return self._eval(self.pieces, x)

    __call__ = value

    def d2(self, x):
        return self._eval(self.second_derivatives, x)

    def d1(self, x):
        raise NotImplementedError("first derivative is not needed by a driftless operator")

    # --- float evaluation with exact integer shifts
    def evaluate_shifted(self, u, shift: int = 0, second: bool = False) -> np.ndarray:
        """``h(u + shift)`` for float ``u`` and an arbitrary integer ``shift``."""
        table = self.second_derivatives if second else self.pieces
        u = np.asarray(u, dtype=float)
        n = np.floor(u + 0.5)
        z = u - n
        out = np.zeros_like(u)
        for c in np.unique(n):
            p = table.get(int(c) + shift)
            if p is not None:
                mask = n == c
                out[mask] = p.evaluate(z[mask])
        return out

    def level_piece(self, m: int) -> Polynomial:
        return self.pieces.get(m + self.levels[m], Polynomial())


def _lookup(pieces, c):
    return pieces.get(c, Polynomial())


def build_continuous(M: int, q: int) -> PiecewiseBundle:
    """Bundle through level ``M`` with seed bump ``(1/4 - z²)^q``; needs ``q >= 2M + 6``."""
    if M < 0:
        raise ValueError("level must be nonnegative")
    if q < 2 * M + 6:
        raise BumpDegreeError(f"bump degree q={q} too small for level {M}; need q >= {2 * M + 6}")
    seed = polynomial_bump(q)
    pieces: dict[int, Polynomial] = {0: seed}
    levels: list[int] = []
    for m in range(M + 1):
        if m == 0:
            phi = seed.scale(2) - seed.derivative().derivative().scale(2)
            x = 1
        else:
            pm = counterexample_mass(m)
            acc = _lookup(pieces, m) - _lookup(pieces, m).derivative().derivative()
            for k in range(m):
                xk = levels[k]
                acc = acc - (_lookup(pieces, m + xk) + _lookup(pieces, m - xk)).scale(counterexample_mass(k))
            phi = acc.scale(1 / pm)
            bound = norm_bound(phi)
            x = x_lower_bound(m, levels[-1])
            e = max(x.bit_length() - 1, math.ceil(bound / LN2_LO))
            x = 1 << e
        levels.append(x)
        if not phi.is_zero():
            pieces[m + x] = phi
            pieces[-(m + x)] = phi.reflect()
    return PiecewiseBundle(pieces, tuple(levels), q)


def norm_bound(p: Polynomial) -> Fraction:
    """Upper bound for ``sup|p| + sup|p''|`` on the unit piece."""
    return p.sup_bound() + p.derivative().derivative().sup_bound()


def apply_L_continuous(bundle: PiecewiseBundle, x) -> Fraction:
    """Exact ``L h(x) = h''(x) + Σ p_k (h(x+x_k) + h(x-x_k)) - h(x)`` for ``|x| <= M + 1/2``."""
    x = Fraction(x)
    if abs(x) > bundle.level + HALF:
        raise OutsideWindowError(f"x={x} outside validity window |x| <= {bundle.level + HALF}")
    return apply_operator(bundle.triplet(), bundle, x)


@dataclass(frozen=True)
class NormBound:
    m: int
    upper: Fraction
    sampled: float
    log_x: float

    @property
    def holds(self) -> bool:
        # x_0 = 1 is fixed; the logarithmic constraint starts at level 1
        return self.m == 0 or self.log_x >= self.upper


def piece_norm_bounds(bundle: PiecewiseBundle, samples: int = 1001) -> list[NormBound]:
    """Coefficient bound and grid-sampled value of ``sup|φ_m| + sup|φ_m''|`` per level."""
    z = np.linspace(-0.5, 0.5, samples)
    out = []
    for m, xm in enumerate(bundle.levels):
        p = bundle.level_piece(m)
        d2 = p.derivative().derivative()
        sampled = float(np.max(np.abs(p.evaluate(z))) + np.max(np.abs(d2.evaluate(z))))
        out.append(NormBound(m, norm_bound(p), sampled, (xm.bit_length() - 1) * math.log(2)))
    return out


def sample_csv(bundle: PiecewiseBundle, path, points: int = 401) -> None:
    """Columns ``x, h, h'', Lh`` on the validity window, exact values rounded to float."""
    R = bundle.level + HALF
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "h", "h2", "Lh"])
        for j in range(points):
            x = -R + 2 * R * Fraction(j, points - 1)
            w.writerow([repr(float(x)), repr(float(bundle.value(x))), repr(float(bundle.d2(x))),
                        repr(float(apply_L_continuous(bundle, x)))])
