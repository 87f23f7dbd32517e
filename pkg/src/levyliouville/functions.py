"""Function descriptors: a value together with analytic first/second derivatives.

Operators never differentiate numerically, so every descriptor carries its
own derivatives.  Descriptors built from polynomials stay exact on ``int`` /
``Fraction`` input; the transcendental ones are numpy-vectorised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Function:
    """A real function with optional analytic derivatives.

    ``support_radius`` promises ``f(y) == 0`` for ``|y| > support_radius``;
    ``sup_norm`` promises ``|f| <= sup_norm`` everywhere.  Both are used to
    certify truncation of infinite jump sums.
    """

    value: Callable
    d1: Callable | None = None
    d2: Callable | None = None
    support_radius: float | int | Fraction | None = None
    sup_norm: float | None = None
    name: str = ""

    def __call__(self, x):
        return self.value(x)


def polynomial(coeffs: Sequence, name: str = "") -> Function:
    """``sum(c[i] * x**i)``; exact when coefficients and input are rational."""
    cs = tuple(coeffs)

    def horner(c, x):
        acc = 0
        for a in reversed(c):
            acc = acc * x + a
        return acc

    c1 = tuple(i * c for i, c in enumerate(cs))[1:]
    c2 = tuple(i * c for i, c in enumerate(c1))[1:]
    return Function(
        value=lambda x: horner(cs, x),
        d1=lambda x: horner(c1, x),
        d2=lambda x: horner(c2, x),
        name=name or f"poly{list(map(str, cs))}",
    )


def constant(c=1) -> Function:
    return replace(polynomial([c], name=f"const({c})"), sup_norm=abs(c))


def exponential(lam: float, weight: float = 1.0) -> Function:
    """``weight * exp(lam * x)``."""
    lam = float(lam)
    return Function(
        value=lambda x: weight * np.exp(lam * np.asarray(x, dtype=float)),
        d1=lambda x: weight * lam * np.exp(lam * np.asarray(x, dtype=float)),
        d2=lambda x: weight * lam * lam * np.exp(lam * np.asarray(x, dtype=float)),
        name=f"{weight}*exp({lam}x)",
    )


def exponential_mixture(terms: Sequence[tuple[float, float]]) -> Function:
    """``sum(w * exp(lam * x))`` over ``(lam, w)`` pairs."""
    pairs = [(float(lam), float(w)) for lam, w in terms]

    def make(power):
        def f(x):
            x = np.asarray(x, dtype=float)
            return sum(w * lam**power * np.exp(lam * x) for lam, w in pairs)

        return f

    return Function(value=make(0), d1=make(1), d2=make(2), name=f"mixture{pairs}")


def cosine(omega: float) -> Function:
    w = float(omega)
    return Function(
        value=lambda x: np.cos(w * np.asarray(x, dtype=float)),
        d1=lambda x: -w * np.sin(w * np.asarray(x, dtype=float)),
        d2=lambda x: -w * w * np.cos(w * np.asarray(x, dtype=float)),
        sup_norm=1.0,
        name=f"cos({w}x)",
    )


def _bump_parts(x, center: float, radius: float):
    t = (np.asarray(x, dtype=float) - center) / radius
    inside = np.abs(t) < 1.0
    ts = np.where(inside, t, 0.0)
    u = 1.0 - ts * ts
    g = np.where(inside, np.exp(-1.0 / u), 0.0)
    return t, u, g, inside


@dataclass(frozen=True)
class Bump(Function):
    """C-infinity bump ``exp(-1 / (1 - t^2))``, ``t = (x - center) / radius``."""

    center: float = 0.0
    radius: float = 1.0


def bump(center: float = 0.0, radius: float = 1.0) -> Bump:
    c, r = float(center), float(radius)

    def value(x):
        return _bump_parts(x, c, r)[2]

    def d1(x):
        t, u, g, inside = _bump_parts(x, c, r)
        return np.where(inside, g * (-2.0 * t / u**2) / r, 0.0)

    def d2(x):
        t, u, g, inside = _bump_parts(x, c, r)
        gtt = g * (4.0 * t**2 / u**4 - 2.0 / u**2 - 8.0 * t**2 / u**3)
        return np.where(inside, gtt / (r * r), 0.0)

    return Bump(value=value, d1=d1, d2=d2, support_radius=abs(c) + r,
                sup_norm=math.exp(-1.0), name=f"bump({c},{r})", center=c, radius=r)


@dataclass(frozen=True)
class SmoothStep:
    """C-infinity transition from 0 (at ``t <= 0``) to 1 (at ``t >= 1``)."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a, b = _psi(t), _psi(1.0 - t)
        return a / (a + b)


def _psi(s):
    pos = s > 0
    return np.where(pos, np.exp(-1.0 / np.where(pos, s, 1.0)), 0.0)


_smoothstep = SmoothStep()


@dataclass(frozen=True)
class PlateauWindow:
    """Equal to 1 on each interval of ``plateau``, 0 beyond ``margin`` of it."""

    plateau: tuple[tuple[float, float], ...]
    margin: float = 0.5
    _step: SmoothStep = field(default=_smoothstep, repr=False)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for lo, hi in self.plateau:
            rise = self._step((xi - (lo - self.margin)) / self.margin)
            fall = self._step(((hi + self.margin) - xi) / self.margin)
            out = np.maximum(out, rise * fall)
        return out

    def support(self) -> list[tuple[float, float]]:
        return [(lo - self.margin, hi + self.margin) for lo, hi in self.plateau]
