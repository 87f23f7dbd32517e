"""Harmonic exponentials, Deny identities and exit laws.

``κ(λ) = L e_λ(0)`` is the Laplace exponent; ``e_λ`` is harmonic exactly when
``κ(λ) = 0``, and nonnegative mixtures of such exponentials are harmonic too.
Exit distributions from an interval are simulated with an Euler scheme for
the diffusion part and exact compound-Poisson sampling of the jumps.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize

from .counterexample_discrete import SparseSequence
from .functions import Function, exponential_mixture
from .levy_core import (AtomicMeasure, DensityMeasure, DivergentIntegralError, LevyTriplet,
                        SeriesMeasure, apply_operator)

RNG_NAME = f"numpy.random.PCG64/SeedSequence(seed, batch) numpy-{np.__version__}"
BATCH = 1 << 14


class NegativeWeightError(ValueError):
    pass


class UnsupportedMeasureError(TypeError):
    pass


class NotProbabilityError(ValueError):
    pass


# --------------------------------------------------------------------------
# Laplace exponent and its zeros


def laplace_exponent(t: LevyTriplet, lam) -> float:
    """``κ(λ) = a λ² + b λ + ∫ (e^{λy} - 1 - λy 1_B(y)) ν(dy)``."""
    if lam == 0:
        # κ(0) = 0 identically, also for measures whose exponential moments diverge
        return 0
    return float(t.diffusion) * lam * lam + float(t.drift) * lam + t.measure.laplace_part(lam)


@dataclass(frozen=True)
class RootReport:
    roots: list[float]
    grid_step: float
    convex_ok: bool  # second differences of κ on the scan grid are >= -tol
    suspicious: bool  # more than two roots: κ cannot be convex


def lambda_set(t: LevyTriplet, bracket: tuple[float, float], tol: float = 1e-10,
               step: float = 0.01) -> RootReport:
    """Zeros of κ on ``bracket`` by a grid scan followed by bisection.

    The scan always contains 0 (an exact root).  Convexity is only reported,
    not relied upon.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    n = max(int(math.ceil((hi - lo) / step)), 1)
    grid = set(np.linspace(lo, hi, n + 1).tolist())
    if lo <= 0 <= hi:
        grid.add(0.0)
    grid = sorted(grid)
    vals = [laplace_exponent(t, g) for g in grid]
    roots = [g for g, v in zip(grid, vals) if v == 0]
    for (x0, v0), (x1, v1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if v0 * v1 < 0:
            r = optimize.bisect(lambda s: laplace_exponent(t, s), x0, x1, xtol=tol, rtol=4 * np.finfo(float).eps)
            roots.append(r)
    roots = sorted(roots)
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 2 * tol:
            merged.append(r)
    v = np.asarray(vals, dtype=float)
    scale = max(1.0, float(np.max(np.abs(v))))
    convex = bool(np.all(v[2:] - 2 * v[1:-1] + v[:-2] >= -1e-9 * scale)) if len(v) > 2 else True
    return RootReport(merged, step, convex, len(merged) > 2)


# --------------------------------------------------------------------------
# mixtures


@dataclass(frozen=True)
class ExponentialMixture:
    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(l), float(w)) for l, w in self.terms)
        object.__setattr__(self, "terms", terms)
        if any(w < 0 for _, w in terms):
            raise NegativeWeightError("mixture weights must be nonnegative")
        lams = [l for l, _ in terms]
        if len(set(lams)) != len(lams):
            raise ValueError("mixture exponents must be distinct")

    def function(self) -> Function:
        return exponential_mixture(self.terms)


@dataclass(frozen=True)
class MixtureReport:
    points: list[float]
    residuals: list[float]  # |L h(x)| via operator application
    analytic: list[float]  # |Σ w κ(λ) e^{λx}|
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_mixture(m: ExponentialMixture, t: LevyTriplet, points: Sequence[float],
                   tol: float = 1e-9) -> MixtureReport:
    kappas = [laplace_exponent(t, lam) for lam, _ in m.terms]
    f = m.function()
    res, ana = [], []
    for x in points:
        res.append(abs(float(apply_operator(t, f, float(x)))))
        ana.append(abs(sum(w * k * math.exp(lam * x) for (lam, w), k in zip(m.terms, kappas))))
    return MixtureReport(list(map(float, points)), res, ana, tol)


# --------------------------------------------------------------------------
# Deny


def deny_check(h: SparseSequence, mu, window: Iterable[int] | None = None) -> dict[int, Fraction]:
    """Exact ``(h * μ)(n) - h(n)`` with ``(h * μ)(n) = Σ_y h(n - y) μ(y)``.

    ``mu`` is a finite probability ``{y: mass}`` or a symmetric
    :class:`SeriesMeasure` of total mass one.  The default window is
    ``|n| <= level`` for built sequences, otherwise the indices whose lookups
    stay inside the range spanned by ``h``.
    """
    if isinstance(mu, SeriesMeasure):
        K = mu.truncation
        if 2 * sum(mu.mass(k) for k in range(K + 1)) + mu.tail(K) != 1:
            raise NotProbabilityError("series measure does not have total mass 1")
    else:
        mu = {int(y): Fraction(w) for y, w in mu.items()}
        if any(w < 0 for w in mu.values()) or sum(mu.values()) != 1:
            raise NotProbabilityError("μ must be a probability measure with exact rational masses")
    if window is None:
        if h.level >= 0:
            window = range(-h.level, h.level + 1)
        else:
            sup = h.support()
            reach = max(abs(y) for y in mu) if isinstance(mu, dict) else 0
            window = range(sup[0] + reach, sup[-1] - reach + 1)
    out = {}
    for n in window:
        if isinstance(mu, SeriesMeasure):
            K = mu.cover_index(h.radius + abs(n))
            conv = sum((mu.mass(k) * (h(n - mu.location(k)) + h(n + mu.location(k))) for k in range(K + 1)),
                       Fraction(0))
        else:
            conv = sum((h(n - y) * w for y, w in mu.items()), Fraction(0))
        out[n] = conv - h(n)
    return out


# --------------------------------------------------------------------------
# Monte Carlo exit laws


@dataclass(frozen=True)
class ExitLaw:
    interval: tuple[float, float]  # (-a, b)
    samples: np.ndarray  # exit positions
    times: np.ndarray
    paths: int
    seed: int
    dt: float
    rng: str = RNG_NAME

    def __post_init__(self):
        lo, hi = self.interval
        if len(self.samples) != self.paths:
            raise ValueError("sample count does not match path count")
        if np.any((self.samples > lo) & (self.samples < hi)):
            raise AssertionError("an exit sample lies inside the interval")

    @property
    def right_fraction(self) -> float:
        return float(np.mean(self.samples >= self.interval[1]))

    @property
    def right_stderr(self) -> float:
        p = self.right_fraction
        return math.sqrt(max(p * (1 - p), 1e-300) / self.paths)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["exit_position", "exit_time"])
            for x, s in zip(self.samples, self.times):
                w.writerow([repr(float(x)), repr(float(s))])


@dataclass(frozen=True)
class _Jumps:
    locs: np.ndarray
    rates: np.ndarray  # per-atom intensity
    escape_rate: float  # mass whose jumps leave any interval of the given size
    compensation: float  # ∫_B y ν(dy)


def _jump_table(t: LevyTriplet, width: float) -> _Jumps:
    meas = t.measure
    if isinstance(meas, AtomicMeasure):
        atoms = meas.atoms
        escape = 0.0
    elif isinstance(meas, SeriesMeasure):
        atoms, escape, k = [], 0.0, 0
        while k <= meas.truncation and meas.location(k) <= 4 * width:
            atoms += [(meas.location(k), meas.mass(k)), (-meas.location(k), meas.mass(k))]
            k += 1
        # every remaining jump is longer than the interval: exit law is a jump to ±inf
        escape = float(2 * sum(meas.mass(j) for j in range(k, meas.truncation + 1)) + meas.tail(meas.truncation))
    else:
        raise UnsupportedMeasureError("density measures have no exact jump sampler")
    locs = np.array([float(y) for y, _ in atoms])
    rates = np.array([float(w) for _, w in atoms])
    comp = float(sum(float(w) * float(y) for y, w in atoms if abs(y) < 1))
    return _Jumps(locs, rates, escape, comp)


def _run_batch(t: LevyTriplet, jumps: _Jumps, lo: float, hi: float, x0: float, n: int, dt: float,
               seed: int, index: int, monitors: tuple[int, ...], occupation: Callable | None,
               block: int, max_steps: int):
    """Simulate ``n`` paths; return exit positions/times (and occupation sums) per monitor stride."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
    sig = math.sqrt(2.0 * float(t.diffusion) * dt)
    mu = (float(t.drift) - jumps.compensation) * dt
    k_res = len(monitors)
    pos = np.full((k_res, n), np.nan)
    tim = np.full((k_res, n), np.nan)
    occ = np.zeros((k_res, n))
    x = np.full(n, float(x0))
    alive = [np.arange(n) for _ in monitors]
    live = np.arange(n)
    step0 = 0
    while live.size:
        if step0 >= max_steps:
            raise RuntimeError(f"{live.size} paths still inside after {max_steps} steps")
        m = live.size
        inc = np.full((m, block), mu)
        if sig > 0:
            inc += sig * rng.standard_normal((m, block))
        for y, r in zip(jumps.locs, jumps.rates):
            cnt = rng.poisson(r * dt, size=(m, block))
            if cnt.any():
                inc += cnt * y
        if jumps.escape_rate > 0:
            esc = rng.poisson(jumps.escape_rate * dt, size=(m, block)) > 0
            if esc.any():
                inc[esc] = np.where(rng.random(int(esc.sum())) < 0.5, -np.inf, np.inf)
        with np.errstate(invalid="ignore"):
            # inf - inf only appears after an escape, which is already an exit
            path = x[live, None] + np.cumsum(inc, axis=1)
        outside = ~((path > lo) & (path < hi))
        steps = step0 + 1 + np.arange(block)
        if occupation is not None:
            prev = np.concatenate([x[live, None], path[:, :-1]], axis=1)
            g = np.broadcast_to(np.nan_to_num(np.asarray(occupation(prev), dtype=float)), prev.shape) * dt
        still = np.zeros(m, dtype=bool)
        for r, every in enumerate(monitors):
            watched = outside & (steps % every == 0)
            act = np.isin(live, alive[r], assume_unique=True)
            hit = watched.any(axis=1) & act
            first = watched.argmax(axis=1)
            if occupation is not None:
                # left-point sums over the steps taken before (and including) the exit step
                csum = np.cumsum(g, axis=1)
                occ[r, live[act & ~hit]] += csum[act & ~hit, -1]
                occ[r, live[hit]] += csum[hit, first[hit]]
            idx = live[hit]
            pos[r, idx] = path[hit, first[hit]]
            tim[r, idx] = (step0 + first[hit] + 1) * dt
            alive[r] = np.setdiff1d(alive[r], idx, assume_unique=True)
            still |= act & ~hit
        x[live] = path[:, -1]
        live = live[still]
        step0 += block
    return pos, tim, occ


def _simulate(t, a, b, x0, paths, dt, seed, monitors=(1,), occupation=None, threads=1,
              block=256, max_steps=10**8):
    if paths <= 0:
        raise ValueError("need at least one path")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not (a > 0 and b > 0 and -a < x0 < b):
        raise ValueError("need a, b > 0 and x0 in (-a, b)")
    jumps = _jump_table(t, a + b)
    sizes = [min(BATCH, paths - s) for s in range(0, paths, BATCH)]
    args = [(t, jumps, -a, b, x0, n, dt, seed, i, tuple(monitors), occupation, block, max_steps)
            for i, n in enumerate(sizes)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda p: _run_batch(*p), args))
    else:
        parts = [_run_batch(*p) for p in args]
    pos = np.concatenate([p[0] for p in parts], axis=1)
    tim = np.concatenate([p[1] for p in parts], axis=1)
    occ = np.concatenate([p[2] for p in parts], axis=1)
    return pos, tim, occ


def exit_distribution_mc(t: LevyTriplet, a: float, b: float, x0: float, paths: int, dt: float,
                         seed: int, monitor_every: int = 1, threads: int = 1) -> ExitLaw:
    """Exit law of ``X`` from ``(-a, b)`` started at ``x0``.

    Batches of ``BATCH`` paths draw from independent streams keyed by
    ``(seed, batch index)``, so results do not depend on ``threads``.
    """
    pos, tim, _ = _simulate(t, a, b, x0, paths, dt, seed, (monitor_every,), threads=threads)
    return ExitLaw((-a, b), pos[0], tim[0], paths, seed, dt * 1.0)


@dataclass(frozen=True)
class RefinementCheck:
    coarse: float
    fine: float
    sigma: float

    @property
    def shift(self) -> float:
        return abs(self.fine - self.coarse)

    @property
    def passed(self) -> bool:
        return self.shift < self.sigma


def dt_refinement(t: LevyTriplet, a: float, b: float, x0: float, paths: int, dt: float,
                  seed: int, threads: int = 1) -> RefinementCheck:
    """Right-exit frequency at ``dt`` versus ``dt/2`` on coupled paths.

    Paths are simulated at ``dt/2``; checking every second step gives an Euler
    scheme with step ``dt`` driven by the same noise.
    """
    pos, _, _ = _simulate(t, a, b, x0, paths, dt / 2, seed, (2, 1), threads=threads)
    coarse = float(np.mean(pos[0] >= b))
    fine = float(np.mean(pos[1] >= b))
    sigma = math.sqrt(coarse * (1 - coarse) / paths)
    return RefinementCheck(coarse, fine, sigma)


@dataclass(frozen=True)
class DynkinEstimate:
    value: float  # mean of φ(x0) - φ(X_τ) + ∫_0^τ Lφ(X_s) ds
    stderr: float
    paths: int

    @property
    def within(self) -> float:
        """Distance from 0 in standard errors."""
        return abs(self.value) / self.stderr if self.stderr > 0 else (0.0 if self.value == 0 else math.inf)


def dynkin_residual(t: LevyTriplet, a: float, b: float, x0: float, phi: Function, paths: int,
                    dt: float, seed: int, threads: int = 1) -> DynkinEstimate:
    """Monte Carlo Dynkin residual with a left-point occupation sum."""
    def Lphi(x):
        return apply_operator(t, phi, x)

    pos, _, occ = _simulate(t, a, b, x0, paths, dt, seed, (1,), occupation=Lphi, threads=threads)
    z = float(phi.value(x0)) - np.asarray(phi.value(pos[0]), dtype=float) + occ[0]
    return DynkinEstimate(float(np.mean(z)), float(np.std(z, ddof=1) / math.sqrt(paths)) if paths > 1 else math.inf,
                          paths)
