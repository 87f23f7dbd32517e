"""One-dimensional Lévy triplets, their symbols, and pointwise operator application.

Conventions
-----------
The operator is

    L f(x) = a f''(x) + b f'(x) + ∫ (f(x+y) - f(x) - y f'(x) 1_B(y)) ν(dy)

and its characteristic exponent (so that ``L e^{iξx} = -Ψ(ξ) e^{iξx}``) is

    Ψ(ξ) = a ξ² - i b ξ + ∫ (1 - e^{iξy} + iξy 1_B(y)) ν(dy).

``B`` is the *open* unit ball: atoms at ``|y| = 1`` get no compensation.

Three measure classes are supported.  :class:`AtomicMeasure` holds finitely
many atoms and keeps exact arithmetic exact.  :class:`SeriesMeasure` is a
symmetric measure with infinitely many atoms given by generators and a
closed-form tail mass; jump sums are truncated at an index that is either
computed from the support of the input (exact) or certified by a sup-norm
bound.  :class:`DensityMeasure` wraps a named density and integrates with
adaptive quadrature on declared panels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np
from scipy import integrate


class InvalidTripletError(ValueError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved tolerance {achieved:.3e})")
        self.achieved = achieved


class DivergentIntegralError(ArithmeticError):
    pass


# --------------------------------------------------------------------------
# frequencies and exact trigonometry


@dataclass(frozen=True)
class PiMultiple:
    """The frequency ``ratio * π``; lets symbols of integer atoms stay exact."""

    ratio: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ratio", Fraction(self.ratio))

    def __float__(self):
        return float(self.ratio) * math.pi

    def __neg__(self):
        return PiMultiple(-self.ratio)


_EXACT_COS = {
    Fraction(0): 1, Fraction(1, 3): Fraction(1, 2), Fraction(1, 2): 0,
    Fraction(2, 3): Fraction(-1, 2), Fraction(1): -1, Fraction(4, 3): Fraction(-1, 2),
    Fraction(3, 2): 0, Fraction(5, 3): Fraction(1, 2),
}
_EXACT_SIN = {Fraction(0): 0, Fraction(1, 2): 1, Fraction(1): 0, Fraction(3, 2): -1}


def _is_exact(v) -> bool:
    return isinstance(v, (int, Rational)) and not isinstance(v, bool)


def cos_sin(y, xi) -> tuple:
    """``(cos(ξ y), sin(ξ y))`` with exact values where they are rational.

    The argument reduction is exact: ``y`` may be a huge integer (``2**3200``)
    and ``ξ`` a float, in which case the product is formed as an exact rational
    and reduced at sufficient working precision.
    """
    if isinstance(xi, PiMultiple):
        t = (Fraction(y) * xi.ratio) % 2
        c = _EXACT_COS.get(t)
        s = _EXACT_SIN.get(t)
        if c is None:
            c = math.cos(math.pi * float(t))
        if s is None:
            s = math.sin(math.pi * float(t))
        return c, s
    prod = Fraction(y) * Fraction(xi)
    if prod == 0:
        return 1, 0
    if abs(prod) <= 1:
        p = float(prod)
        return math.cos(p), math.sin(p)
    bits = max(abs(prod.numerator).bit_length() - prod.denominator.bit_length(), 0) + 80
    with mpmath.workprec(bits):
        a = mpmath.mpf(prod.numerator) / prod.denominator
        return float(mpmath.cos(a)), float(mpmath.sin(a))


def _in_open_ball(y) -> bool:
    return abs(y) < 1


# --------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms ``(location, mass)``."""

    atoms: tuple[tuple, ...] = ()

    def __post_init__(self):
        atoms = tuple((loc, mass) for loc, mass in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        locs = [loc for loc, _ in atoms]
        if any(loc == 0 for loc in locs):
            raise InvalidTripletError("Lévy measure has an atom at 0")
        if len(set(locs)) != len(locs):
            raise InvalidTripletError("atom locations must be distinct")
        if any(not mass > 0 for _, mass in atoms):
            raise InvalidTripletError("atom masses must be positive")

    @property
    def total_mass(self):
        return sum((m for _, m in self.atoms), 0)

    def reflected(self) -> "AtomicMeasure":
        return AtomicMeasure(tuple((-loc, m) for loc, m in self.atoms))

    def compensator(self):
        """``∫_B y ν(dy)``: the drift absorbed by the small-jump compensation."""
        return sum((m * loc for loc, m in self.atoms if _in_open_ball(loc)), 0)

    def symbol_part(self, xi):
        re, im = 0, 0
        for loc, m in self.atoms:
            c, s = cos_sin(loc, xi)
            re += m * (1 - c)
            im -= m * s
            if _in_open_ball(loc):
                im += m * loc * (float(xi) if isinstance(xi, PiMultiple) else xi)
        return re, im, 0.0

    def apply_part(self, f, x):
        out = 0
        fx = f.value(x)
        comp = self.compensator()
        for loc, m in self.atoms:
            out += m * (f.value(x + loc) - fx)
        if comp != 0:
            out -= comp * f.d1(x)
        return out, 0.0

    def laplace_part(self, lam):
        out = 0.0
        for loc, m in self.atoms:
            term = math.expm1(lam * float(loc))
            if _in_open_ball(loc):
                term -= lam * float(loc)
            out += float(m) * term
        return out


@dataclass(frozen=True)
class SeriesMeasure:
    """Symmetric measure ``Σ_k mass(k) (δ_{location(k)} + δ_{-location(k)})``.

    ``location`` must be increasing with ``location(0) >= 1`` (so no atom is
    compensated) and ``tail(K)`` must return ``Σ_{k>K} 2 mass(k)`` exactly.
    ``truncation`` is the default index used when the input function gives no
    support information.
    """

    location: Callable[[int], int]
    mass: Callable[[int], Fraction]
    tail: Callable[[int], Fraction]
    truncation: int = 40
    name: str = "series"

    def __post_init__(self):
        if self.location(0) < 1:
            raise InvalidTripletError("series locations must satisfy location(0) >= 1")
        if self.truncation < 0:
            raise InvalidTripletError("truncation must be nonnegative")

    def atoms(self, K: int | None = None) -> list[tuple[int, Fraction]]:
        K = self.truncation if K is None else K
        out = []
        for k in range(K + 1):
            loc, m = self.location(k), self.mass(k)
            out.append((loc, m))
            out.append((-loc, m))
        return out

    @property
    def total_mass(self):
        return 2 * sum(self.mass(k) for k in range(self.truncation + 1)) + self.tail(self.truncation)

    def reflected(self) -> "SeriesMeasure":
        return self

    def compensator(self):
        return 0

    def cover_index(self, radius) -> int:
        """Smallest ``k`` with ``location(k) > radius``."""
        k = 0
        while self.location(k) <= radius:
            k += 1
        return k

    def symbol_part(self, xi):
        K = self.truncation
        re = 0
        for k in range(K + 1):
            c, _ = cos_sin(self.location(k), xi)
            re += 2 * self.mass(k) * (1 - c)
        return re, 0, float(2 * self.tail(K))

    def apply_part(self, f, x):
        radius = getattr(f, "support_radius", None)
        fx = f.value(x)
        if radius is not None:
            K = self.cover_index(radius + math.ceil(_max_abs(x)))
            err = 0.0
        elif getattr(f, "sup_norm", None) is not None:
            K = self.truncation
            while K > 0 and self.location(K) > 2**1000:
                K -= 1
            err = float(self.tail(K)) * float(f.sup_norm)
        else:
            raise DivergentIntegralError(
                f"jump sum of {self.name} cannot be certified for a function with "
                "neither bounded support nor a sup-norm bound")
        out = 0
        for k in range(K + 1):
            loc = self.location(k)
            out += self.mass(k) * (f.value(x + loc) + f.value(x - loc))
        out -= (2 * sum(self.mass(k) for k in range(K + 1)) + self.tail(K)) * fx
        return out, err

    def laplace_part(self, lam):
        if lam == 0:
            return 0.0
        raise DivergentIntegralError(
            f"exponential moment of {self.name} diverges for λ = {lam}")


def _max_abs(x):
    if isinstance(x, np.ndarray):
        return float(np.max(np.abs(x))) if x.size else 0.0
    return abs(x)


def counterexample_measure(truncation: int = 40) -> SeriesMeasure:
    """Jump part of the lattice counterexample: ``p_k = 2^{-k-2}``, ``x_k = 2^{2k²}``."""
    return SeriesMeasure(
        location=counterexample_location,
        mass=counterexample_mass,
        tail=lambda K: Fraction(1, 2 ** (K + 1)),
        truncation=truncation,
        name="counterexample",
    )


def counterexample_location(k: int) -> int:
    return 1 << (2 * k * k)


def counterexample_mass(k: int) -> Fraction:
    return Fraction(1, 1 << (k + 2))


# --- densities ------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Panels ``[low_cutoff, 1]`` and ``[1, high_cutoff]`` on each half-line."""

    low_cutoff: float = 1e-6
    high_cutoff: float = 1e4
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    limit: int = 400


@dataclass(frozen=True)
class _Family:
    density: Callable  # (y > 0, side, params) -> density
    order: Callable  # params -> singularity order s, density ~ y^{-s} at 0
    tail_mass: Callable  # (R, side, params) -> ν((R, ∞)) on that side
    small_moment: Callable  # (eps, side, params) -> ∫_0^eps y² ν(dy) on that side
    exp_radius: Callable  # params -> sup{|λ|: exponential moment finite}


def _side_c(params, side):
    key = "c_plus" if side > 0 else "c_minus"
    return float(params.get(key, params.get("c", 1.0)))


DENSITY_FAMILIES: dict[str, _Family] = {
    # c |y|^{-1-α}
    "stable": _Family(
        density=lambda y, side, p: _side_c(p, side) * y ** (-1.0 - p["alpha"]),
        order=lambda p: 1.0 + p["alpha"],
        tail_mass=lambda R, side, p: _side_c(p, side) * R ** (-p["alpha"]) / p["alpha"],
        small_moment=lambda e, side, p: _side_c(p, side) * e ** (2 - p["alpha"]) / (2 - p["alpha"]),
        exp_radius=lambda p: 0.0,
    ),
    # c |y|^{-1-α} e^{-θ|y|}
    "tempered_stable": _Family(
        density=lambda y, side, p: _side_c(p, side) * y ** (-1.0 - p["alpha"]) * math.exp(-p["theta"] * y),
        order=lambda p: 1.0 + p["alpha"],
        tail_mass=lambda R, side, p: _side_c(p, side) * R ** (-1.0 - p["alpha"]) * math.exp(-p["theta"] * R) / p["theta"],
        small_moment=lambda e, side, p: _side_c(p, side) * e ** (2 - p["alpha"]) / (2 - p["alpha"]),
        exp_radius=lambda p: p["theta"],
    ),
}


@dataclass(frozen=True)
class DensityMeasure:
    """``ν(dy) = density(|y|, sign y) dy`` from :data:`DENSITY_FAMILIES`."""

    name: str
    params: dict = field(default_factory=dict)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.name not in DENSITY_FAMILIES:
            raise InvalidTripletError(f"unknown density family {self.name!r}")
        fam = DENSITY_FAMILIES[self.name]
        if not fam.order(self.params) < 3:
            raise InvalidTripletError("density singularity at 0 must be weaker than |y|^-3")
        if not 0 < self.params.get("alpha", 1.0) < 2:
            raise InvalidTripletError("alpha must lie in (0, 2)")
        if any(_side_c(self.params, s) < 0 for s in (1, -1)):
            raise InvalidTripletError("density constants must be nonnegative")

    @property
    def family(self) -> _Family:
        return DENSITY_FAMILIES[self.name]

    def reflected(self) -> "DensityMeasure":
        p = dict(self.params)
        cp, cm = _side_c(p, 1), _side_c(p, -1)
        p.pop("c", None)
        p["c_plus"], p["c_minus"] = cm, cp
        return replace(self, params=p)

    def _quad(self, fn, lo, hi, **kw):
        q = self.quadrature
        # convergence is judged from the returned estimate below
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(fn, lo, hi, epsabs=q.abs_tol, epsrel=q.rel_tol, limit=q.limit, **kw)
        if err > max(q.abs_tol, q.rel_tol * abs(val)) * 1e3:
            raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge", err)
        return val, err

    def _quad_panels(self, fn, lo, hi, width: float = 64.0):
        """``_quad`` over panels of length ``<= width``; robust for oscillating integrands."""
        edges = np.unique(np.concatenate([np.arange(lo, hi, width), [hi]]))
        val = err = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            v, e = self._quad(fn, float(a), float(b))
            val += v
            err += e
        return val, err

    def symbol_part(self, xi):
        xi = float(xi)
        q, fam = self.quadrature, self.family
        R = q.high_cutoff
        re = im = err = 0.0
        for side in (1, -1):
            dens = lambda y: fam.density(y, side, self.params)
            v, e1 = self._quad(lambda y: 2 * math.sin(0.5 * xi * y) ** 2 * dens(y), q.low_cutoff, 1.0)
            w, e2 = self._quad(lambda y: _z_minus_sin(xi * y) * dens(y), q.low_cutoff, 1.0)
            mass, e3 = self._quad(dens, 1.0, R)
            c_part, e4 = (self._quad(dens, 1.0, R, weight="cos", wvar=xi)
                          if xi != 0 else (mass, 0.0))
            s_part, e5 = (self._quad(dens, 1.0, R, weight="sin", wvar=xi)
                          if xi != 0 else (0.0, 0.0))
            small = fam.small_moment(q.low_cutoff, side, self.params)
            tail = fam.tail_mass(R, side, self.params)
            # beyond R the mass is added exactly; the oscillatory remainder of a
            # decreasing density is at most 2 dens(R) / |ξ| (second mean value theorem)
            osc = 2 * dens(R) / abs(xi) if xi != 0 else 0.0
            re += v + (mass + tail - c_part) + 0.5 * xi * xi * small
            im += side * (w - s_part)
            err += (e1 + e2 + e3 + e4 + e5 + 2 * osc + abs(xi) ** 3 * q.low_cutoff * small / 6
                    + xi ** 4 * q.low_cutoff ** 2 * small / 24)
        return re, im, err

    def apply_part(self, f, x):
        x = float(x)
        q, fam = self.quadrature, self.family
        fx, f1, f2 = float(f.value(x)), float(f.d1(x)), float(f.d2(x))
        sup = getattr(f, "sup_norm", None)
        if sup is None and fam.exp_radius(self.params) == 0:
            raise DivergentIntegralError(
                "heavy-tailed density needs a bounded function (declare sup_norm)")
        total = err = 0.0
        for side in (1, -1):
            dens = lambda y: fam.density(y, side, self.params)
            near = lambda y: (float(f.value(x + side * y)) - fx - side * y * f1) * dens(y)
            far = lambda y: (float(f.value(x + side * y)) - fx) * dens(y)
            v1, e1 = self._quad(near, q.low_cutoff, 1.0)
            radius = getattr(f, "support_radius", None)
            if radius is not None:
                # beyond the support only -f(x) dens remains, integrated in closed form
                U = max(1.0, abs(x) + float(radius))
                v2, e2 = self._quad_panels(far, 1.0, U) if U > 1.0 else (0.0, 0.0)
                v2 -= fx * fam.tail_mass(U, side, self.params)
                tail_err = 0.0
            elif sup is None:
                v2, e2 = self._quad(far, 1.0, math.inf)
                tail_err = 0.0
            else:
                v2, e2 = self._quad_panels(far, 1.0, q.high_cutoff)
                tail_err = 2 * float(sup) * fam.tail_mass(q.high_cutoff, side, self.params)
            small = fam.small_moment(q.low_cutoff, side, self.params)
            total += v1 + v2 + 0.5 * f2 * small
            err += e1 + e2 + tail_err
        return total, err

    def laplace_part(self, lam):
        fam = self.family
        radius = fam.exp_radius(self.params)
        if lam != 0 and not abs(lam) < radius:
            raise DivergentIntegralError(
                f"exponential moment of {self.name} density diverges for λ = {lam}")
        q = self.quadrature
        total = 0.0
        for side in (1, -1):
            dens = lambda y: fam.density(y, side, self.params)
            v1, _ = self._quad(lambda y: (math.expm1(side * lam * y) - side * lam * y) * dens(y), 0.0, 1.0)
            v2, _ = self._quad(lambda y: math.expm1(side * lam * y) * dens(y), 1.0, math.inf)
            total += v1 + v2
        return total


def _z_minus_sin(z: float) -> float:
    """``z - sin z`` without cancellation for small ``z``."""
    if abs(z) < 1e-2:
        z2 = z * z
        return z * z2 * (1 / 6 - z2 * (1 / 120 - z2 / 5040))
    return z - math.sin(z)


MeasureSpec = AtomicMeasure | SeriesMeasure | DensityMeasure


# --------------------------------------------------------------------------
# triplets


@dataclass(frozen=True)
class LevyTriplet:
    diffusion: float | Fraction = 0
    drift: float | Fraction = 0
    measure: MeasureSpec = field(default_factory=AtomicMeasure)

    def __post_init__(self):
        if not self.diffusion >= 0:
            raise InvalidTripletError("diffusion coefficient must be nonnegative")
        if not isinstance(self.measure, (AtomicMeasure, SeriesMeasure, DensityMeasure)):
            raise InvalidTripletError(f"unsupported measure {type(self.measure).__name__}")


def brownian(diffusion=1, drift=0) -> LevyTriplet:
    return LevyTriplet(diffusion, drift, AtomicMeasure())


def counterexample_triplet(diffusion=0, truncation: int = 40) -> LevyTriplet:
    """``L_0`` (``diffusion=0``) or its continuous variant ``Δ + L_0`` (``diffusion=1``)."""
    return LevyTriplet(diffusion, 0, counterexample_measure(truncation))


@dataclass(frozen=True)
class SymbolValue:
    re: float | Fraction
    im: float | Fraction
    error: float = 0.0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "SymbolValue":
        return SymbolValue(self.re, -self.im, self.error)


def symbol_eval(t: LevyTriplet, xi) -> SymbolValue:
    """Characteristic exponent Ψ(ξ); ``xi`` may be a float, rational or :class:`PiMultiple`."""
    re, im, err = t.measure.symbol_part(xi)
    if t.diffusion != 0:
        x = xi.ratio * xi.ratio * math.pi**2 if isinstance(xi, PiMultiple) else xi * xi
        re += t.diffusion * x
    if t.drift != 0:
        im -= t.drift * (float(xi) if isinstance(xi, PiMultiple) else xi)
    return SymbolValue(re, im, err)


def apply_operator(t: LevyTriplet, f, x, *, with_error: bool = False):
    """``L f(x)``; exact for atomic / series measures when ``f`` and ``x`` are exact.

    ``f`` needs ``value``; ``d1`` / ``d2`` are only called when the drift,
    compensator or diffusion coefficient is nonzero.  Works elementwise when
    ``x`` is a numpy array and ``f`` is vectorised (not for densities).
    """
    jump, err = t.measure.apply_part(f, x)
    out = jump
    if t.diffusion != 0:
        out = out + t.diffusion * f.d2(x)
    if t.drift != 0:
        out = out + t.drift * f.d1(x)
    return (out, err) if with_error else out


def dual_triplet(t: LevyTriplet) -> LevyTriplet:
    return LevyTriplet(t.diffusion, -t.drift, t.measure.reflected())


# --------------------------------------------------------------------------
# weak harmonicity


@dataclass(frozen=True)
class QuadRule:
    """Composite Gauss-Legendre rule; panels also break at half-integers."""

    nodes: int = 32
    panel_width: float = 0.05
    x_range: tuple[float, float] | None = None  # density measures only


@lru_cache(maxsize=16)
def _gauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panels(lo: float, hi: float, width: float) -> np.ndarray:
    cuts = set(np.arange(math.ceil(lo - 0.5) + 0.5, hi, 1.0).tolist())
    n = max(int(math.ceil((hi - lo) / width)), 1)
    cuts.update(np.linspace(lo, hi, n + 1).tolist())
    return np.array(sorted(c for c in cuts if lo <= c <= hi))


def _nodes(lo: float, hi: float, rule: QuadRule):
    xg, wg = _gauss(rule.nodes)
    edges = _panels(lo, hi, rule.panel_width)
    a, b = edges[:-1, None], edges[1:, None]
    x = (0.5 * (b - a) * xg + 0.5 * (a + b)).ravel()
    w = (0.5 * (b - a) * wg).ravel()
    return x, w


def _shift(h, u: np.ndarray, s) -> np.ndarray:
    if hasattr(h, "evaluate_shifted"):
        return h.evaluate_shifted(u, s)
    return np.asarray(h.value(u + float(s)), dtype=float)


def _eval(h, u):
    if hasattr(h, "evaluate_shifted"):
        return h.evaluate_shifted(u, 0)
    return np.asarray(h.value(u), dtype=float)


def weak_harmonicity_residual(h, t: LevyTriplet, tests: Iterable, quad: QuadRule = QuadRule(),
                              relative: bool = False) -> float:
    """``max_φ |∫ h(x) (Ľφ)(x) dx|`` over compactly supported test functions.

    For atomic and series measures each jump term is rewritten as
    ``∫ h(u + y) φ(u) du`` so that only the support of ``φ`` is integrated,
    even when jumps are astronomically long.  With ``relative=True`` each
    value is divided by the integral of the absolute values of its terms.
    """
    worst = 0.0
    for phi in tests:
        c, r = phi.center, phi.radius
        if isinstance(t.measure, DensityMeasure):
            val, scale = _weak_density(h, t, phi, quad)
        else:
            val, scale = _weak_atomic(h, t, phi, c - r, c + r, quad)
        if relative:
            val = val / scale if scale > 0 else 0.0
        worst = max(worst, abs(val))
    return worst


def _weak_atomic(h, t, phi, lo, hi, quad):
    u, w = _nodes(lo, hi, quad)
    tv = dual_triplet(t)
    meas = tv.measure
    hu = _eval(h, u)
    if isinstance(meas, SeriesMeasure):
        radius = getattr(h, "support_radius", None)
        if radius is not None:
            K = meas.cover_index(radius + math.ceil(max(abs(lo), abs(hi))))
        else:
            if getattr(h, "sup_norm", None) is None:
                raise DivergentIntegralError(
                    "h needs bounded support or a sup-norm bound against an infinite jump series")
            K = meas.truncation
            while K > 0 and meas.location(K) > 2**1000:
                K -= 1
        atoms = meas.atoms(K)
        mass = float(2 * sum(meas.mass(k) for k in range(K + 1)) + meas.tail(K))
    else:
        atoms = list(meas.atoms)
        mass = float(meas.total_mass)
    comp = float(meas.compensator())
    local = (float(tv.diffusion) * phi.d2(u) + (float(tv.drift) - comp) * phi.d1(u)
             - mass * phi.value(u))
    total = np.sum(w * hu * local)
    scale = np.sum(w * np.abs(hu * local))
    phiu = phi.value(u)
    for loc, m in atoms:
        # ∫ h(x) φ(x + y̌) dx = ∫ h(u - y̌) φ(u) du
        term = float(m) * w * _shift(h, u, -loc) * phiu
        total += np.sum(term)
        scale += np.sum(np.abs(term))
    return float(total), float(scale)


def _weak_density(h, t, phi, quad):
    if quad.x_range is None:
        raise DivergentIntegralError("density measures need an explicit x_range for the weak residual")
    tv = dual_triplet(t)
    x, w = _nodes(*quad.x_range, quad)
    vals = np.array([apply_operator(tv, phi, xi) for xi in x])
    terms = w * _eval(h, x) * vals
    return float(np.sum(terms)), float(np.sum(np.abs(terms)))


def truncation_error_bound(measure: SeriesMeasure, K: int, sup_norm: float) -> float:
    """Bound on the omitted jump terms ``Σ_{k>K} p_k (f(x+x_k) + f(x-x_k))``."""
    return float(measure.tail(K)) * float(sup_norm)


def levy_integrability(measure: MeasureSpec) -> float:
    """``∫ min(1, y²) ν(dy)`` (exact for atomic, tail-summed for series)."""
    if isinstance(measure, AtomicMeasure):
        return sum((m * min(1, loc * loc) for loc, m in measure.atoms), 0)
    if isinstance(measure, SeriesMeasure):
        return measure.total_mass
    fam = measure.family
    total = 0.0
    for side in (1, -1):
        dens = lambda y: fam.density(y, side, measure.params)
        a, _ = integrate.quad(lambda y: y * y * dens(y), 0.0, 1.0)
        b, _ = integrate.quad(dens, 1.0, math.inf)
        total += a + b
    return total
