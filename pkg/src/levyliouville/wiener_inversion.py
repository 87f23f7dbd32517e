"""Weighted Wiener algebras on uniform grids and local ``1/Φ`` inversion.

Fourier convention: ``F f(ξ) = ∫ f(x) e^{-iξx} dx``, discretised as a
Riemann sum ``Δ Σ_j f_j e^{-iξ x_j}``.  On FFT frequencies this sum is exact
for the grid function, so the only discretisation errors are the Riemann
error of the continuous transform and wrap-around, both reported separately
from the analytic (geometric) error of the Neumann series.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, signal

from .functions import PlateauWindow, bump


class NonIntegrableError(ValueError):
    pass


class NotDecreasingError(ValueError):
    pass


class DoublingConditionError(ValueError):
    pass


class InversionImpossibleError(ArithmeticError):
    pass


class WindowError(ValueError):
    pass


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``f(origin + j * spacing)``; complex samples are allowed."""

    origin: float
    spacing: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("a grid function needs at least two samples")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "samples", s)

    def __eq__(self, other):
        return (isinstance(other, GridFunction) and self.origin == other.origin
                and self.spacing == other.spacing and np.array_equal(self.samples, other.samples))

    @classmethod
    def sample(cls, f: Callable, lo: float, hi: float, spacing: float) -> "GridFunction":
        n = int(round((hi - lo) / spacing))
        x = lo + spacing * np.arange(n + 1)
        return cls(lo, spacing, np.asarray(f(x)))

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.samples.size)

    def l1(self) -> float:
        return float(self.spacing * np.sum(np.abs(self.samples)))

    def fourier(self, xi) -> np.ndarray:
        """Direct Riemann-sum transform at arbitrary frequencies."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        x = self.x
        out = np.empty(xi.size, dtype=complex)
        for i in range(0, xi.size, 64):
            blk = xi[i:i + 64, None]
            out[i:i + 64] = self.spacing * (np.exp(-1j * blk * x) @ self.samples)
        return out

    def spectrum(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """``(ξ_k, Φ_k)`` on ``size`` FFT frequencies (zero padded)."""
        if size < self.samples.size:
            raise ValueError("padding size smaller than the grid")
        xi = 2 * np.pi * np.fft.fftfreq(size, self.spacing)
        phi = self.spacing * np.exp(-1j * xi * self.origin) * np.fft.fft(self.samples, size)
        return xi, phi


def from_spectrum(xi: np.ndarray, phi: np.ndarray, spacing: float, origin: float) -> GridFunction:
    """Inverse of :meth:`GridFunction.spectrum` onto the grid starting at ``origin``."""
    f = np.fft.ifft(phi * np.exp(1j * xi * origin)) / spacing
    return GridFunction(origin, spacing, f)


def _convolve(a: np.ndarray, b: np.ndarray, spacing: float) -> np.ndarray:
    return spacing * signal.fftconvolve(a, b, mode="full")


# --------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightSpec:
    """Weight ``Y``: ``power`` (α), ``log`` (β), ``radial`` (φ, ε) or ``callable`` (fn)."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in ("power", "log", "radial", "callable"):
            raise ValueError(f"unknown weight family {self.family!r}")

    def __call__(self, x) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))
        p = self.params
        if self.family == "power":
            return np.expm1(p["alpha"] * np.log1p(ax))
        if self.family == "log":
            return np.log(math.e**2 + ax) ** p["beta"]
        if self.family == "radial":
            return p.get("eps", 1.0) * p["phi"](ax)
        return np.asarray(p["fn"](np.asarray(x, dtype=float)), dtype=float)


def power_weight(alpha: float) -> WeightSpec:
    return WeightSpec("power", {"alpha": float(alpha)})


def log_weight(beta: float) -> WeightSpec:
    return WeightSpec("log", {"beta": float(beta)})


def radial_weight(phi: Callable, eps: float) -> WeightSpec:
    return WeightSpec("radial", {"phi": phi, "eps": float(eps)})


def random_pairs(n: int, seed: int, lo: float = 1e-3, hi: float = 1e6) -> np.ndarray:
    """``n`` pairs with log-uniform magnitudes in ``[lo, hi]`` and random signs."""
    rng = np.random.default_rng(seed)
    mag = np.exp(rng.uniform(math.log(lo), math.log(hi), size=(n, 2)))
    return mag * rng.choice([-1.0, 1.0], size=(n, 2))


def check_submultiplicative(Y: WeightSpec, pairs=None, n: int = 10_000, seed: int = 0) -> float:
    """``max (1 + Y(x+y)) - (1 + Y(x))(1 + Y(y))`` over the pairs, clamped at 0."""
    pairs = random_pairs(n, seed) if pairs is None else np.asarray(pairs, dtype=float).reshape(-1, 2)
    x, y = pairs[:, 0], pairs[:, 1]
    excess = (1 + Y(x + y)) - (1 + Y(x)) * (1 + Y(y))
    return float(max(0.0, np.max(excess)))


# --- direct jump property


@dataclass(frozen=True)
class DirectJumpReport:
    excess: float  # max over the grid of Y*Y - Y
    ratio: float  # max over the grid of Y*Y / Y
    radii: list[float]
    tail_ratios: list[float]  # sup Y_r*Y_r / Y for each radius
    tol: float
    tail_tol: float

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.tail_ratios, self.tail_ratios[1:]))

    @property
    def passed(self) -> bool:
        return self.excess <= self.tol and self.decreasing and self.tail_ratios[-1] <= self.tail_tol


def _edge_exponent(Y, L: float, d: int = 1) -> float:
    y1, y2 = float(Y(L / 2)), float(Y(L))
    if y1 <= 0 or y2 <= 0:
        return math.inf
    return math.log(y1 / y2) / math.log(2)


def check_direct_jump(Y: WeightSpec | GridFunction, radii: Sequence[float] = (1, 10, 100), *,
                      half_width: float = 1000.0, spacing: float = 0.1, tol: float = 0.0,
                      tail_tol: float = 0.01) -> DirectJumpReport:
    """Grid check of ``Y*Y <= Y`` and of the decay of ``sup Y_r*Y_r / Y``."""
    if isinstance(Y, GridFunction):
        grid = Y
        samples = np.real(grid.samples)
        n = samples.size
        edge = samples[[n // 4, 0]] if samples[0] > 0 else np.array([1.0, 1.0])
        exponent = math.log(edge[0] / edge[1]) / math.log(2) if edge[1] > 0 else math.inf
    else:
        exponent = _edge_exponent(Y, half_width)
        grid = GridFunction.sample(Y, -half_width, half_width, spacing)
        samples = grid.samples
    if exponent <= 1.0:
        raise NonIntegrableError(f"weight decays like |x|^-{exponent:.3g} at the grid edge; not integrable")
    x, n = grid.x, grid.samples.size
    if n % 2 == 0 or not np.isclose(grid.origin, -x[-1]):
        raise ValueError("weight grid must be symmetric about 0 with an odd number of samples")

    def self_conv(v):
        # full convolution lives on [2 origin, 2 end]; keep the original window
        return _convolve(v, v, grid.spacing)[n // 2: n // 2 + n]

    yy = self_conv(samples)
    pos = samples > 0
    excess = float(np.max(yy - samples))
    ratio = float(np.max(yy[pos] / samples[pos]))
    tails = []
    for r in radii:
        yr = np.where(np.abs(x) >= r, samples, 0.0)
        tails.append(float(np.max(self_conv(yr)[pos] / samples[pos])))
    return DirectJumpReport(excess, ratio, list(map(float, radii)), tails, tol, tail_tol)


# --- radial scale


@dataclass(frozen=True)
class RadialEpsilon:
    eps: float
    c1: float
    c2: float


def radial_epsilon(phi: Callable, d: int = 1, r_max: float = 1e4, samples: int = 4001,
                   alpha_max: float = 50.0) -> RadialEpsilon:
    """``ε = 1 / (2 c1 c2)`` for the radial profile ``φ``.

    ``c1 = ∫ φ(|x|) dx`` by quadrature on ``[0, r_max]`` plus a power-law
    tail; ``c2 = sup φ(r/2) / φ(r)`` over a log-spaced table together with
    the doubling limit ``2^p`` implied by the edge decay exponent ``p``.
    """
    r = np.concatenate([[0.0], np.geomspace(1e-6, r_max, samples)])
    v = np.asarray(phi(r), dtype=float)
    if np.any(np.diff(v) > 0):
        raise NotDecreasingError("φ is not decreasing")
    if not v[0] > 0:
        raise ValueError("φ must be positive")
    upper = r[r >= r_max / 100]
    upper = upper[upper <= r_max / 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        local = -np.log2(np.asarray(phi(2 * upper), dtype=float) / np.asarray(phi(upper), dtype=float))
    if not np.all(np.isfinite(local)) or np.max(local) > alpha_max:
        raise DoublingConditionError("φ(2r)/φ(r) tends to 0 on the table range")
    p = float(local[-1])
    if p <= d:
        raise NonIntegrableError(f"r^(d-1) φ(r) is not integrable (edge exponent {p:.3g} <= {d})")
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    pieces = np.concatenate([[0.0], np.geomspace(1e-3, r_max, 60)])
    body = sum(integrate.quad(lambda s: s ** (d - 1) * float(phi(s)), a, b, epsrel=1e-12, limit=200)[0]
               for a, b in zip(pieces, pieces[1:]))
    tail = r_max**d * float(phi(r_max)) / (p - d)
    c1 = sphere * (body + tail)
    half = np.asarray(phi(r / 2), dtype=float)
    c2 = max(float(np.max(half / v)), 2.0**p)
    return RadialEpsilon(1.0 / (2 * c1 * c2), c1, c2)


# --------------------------------------------------------------------------
# Neumann-series inversion


@dataclass(frozen=True)
class InversionCertificate:
    K: list[tuple[float, float]]
    epsilon: float  # ‖f - g‖_1
    r: float
    N: int
    analytic_bound: float  # sup_K|Φ| ‖φ/Ψ‖_∞ 2^{-N}
    grid_bound: float
    residual: float  # max_K |Φ F f̃ - 1| by direct quadrature
    rho: float  # sup_U |(Ψ - Φ)/Ψ|
    min_phi: float  # min_K |Φ|
    oracle_gap: float  # max_K |Φ̃ - φ/Φ| on FFT frequencies

    @property
    def sharp_bound(self) -> float:
        return self.rho ** (self.N + 1)

    @property
    def passed(self) -> bool:
        return self.residual <= self.analytic_bound + self.grid_bound

    def to_json(self) -> dict:
        return {"K": [list(k) for k in self.K], "epsilon": self.epsilon, "r": self.r, "N": self.N,
                "analytic_bound": self.analytic_bound, "grid_bound": self.grid_bound,
                "residual": self.residual}


@dataclass(frozen=True)
class InversionResult:
    f_tilde: GridFunction
    certificate: InversionCertificate
    xi: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    Phi_tilde: np.ndarray
    g: GridFunction


def _in_set(xi: np.ndarray, intervals) -> np.ndarray:
    mask = np.zeros(xi.shape, dtype=bool)
    for lo, hi in intervals:
        mask |= (xi >= lo) & (xi <= hi)
    return mask


def _points(intervals, n: int) -> np.ndarray:
    return np.concatenate([np.linspace(lo, hi, n) for lo, hi in intervals])


def min_modulus(f: GridFunction, intervals, grid_points: int = 401) -> tuple[float, float]:
    """``min |F f|`` over the intervals: grid scan refined by bounded minimisation."""
    best, arg = math.inf, 0.0
    for lo, hi in intervals:
        xs = np.linspace(lo, hi, grid_points)
        vals = np.abs(f.fourier(xs))
        i = int(np.argmin(vals))
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        cand = [(float(vals[i]), float(xs[i]))]
        if b > a:
            res = optimize.minimize_scalar(lambda s: abs(f.fourier(s)[0]), bounds=(a, b), method="bounded",
                                           options={"xatol": 1e-10})
            cand.append((float(res.fun), float(res.x)))
        v, s = min(cand)
        if v < best:
            best, arg = v, s
    return best, arg


def auto_radius(f: GridFunction, target: float) -> float:
    """Smallest grid-aligned ``r`` with ``‖f - f 1_{B_r}‖_1 < target``."""
    x, a = f.x, np.abs(f.samples) * f.spacing
    ax = np.abs(x)
    order = np.argsort(-ax)
    # tail(r) = mass of |x| > r; scan radii from the outside in
    radii = np.unique(np.round(ax / f.spacing)) * f.spacing
    cum = np.cumsum(a[order])
    sorted_ax = ax[order]
    for r in radii:
        k = np.searchsorted(-sorted_ax, -r, side="left")  # entries with |x| > r
        if (cum[k - 1] if k > 0 else 0.0) < target:
            return float(r)
    return float(radii[-1])


def truncate(f: GridFunction, r: float) -> GridFunction:
    return GridFunction(f.origin, f.spacing, np.where(np.abs(f.x) <= r + 1e-9 * f.spacing, f.samples, 0.0))


def neumann_invert(f: GridFunction, K: Sequence[tuple[float, float]], N: int, *,
                   window: PlateauWindow | None = None, r: float | str = "auto", size: int = 1 << 17,
                   zero_tol: float = 1e-6, check_points: int = 201) -> InversionResult:
    """Local inverse ``Φ̃ = Σ_{n<=N} (Ψ - Φ)^n φ / Ψ^{n+1}`` with ``Φ = F f``, ``Ψ = F(f 1_{B_r})``."""
    K = [(float(lo), float(hi)) for lo, hi in K]
    window = window or PlateauWindow(tuple(K), margin=0.5)
    if np.any(window(_points(K, check_points)) < 1 - 1e-12):
        raise WindowError("window is not identically 1 on K")
    U = window.support()
    min_K, _ = min_modulus(f, K)
    if min_K <= zero_tol * max(f.l1(), 1e-300):
        raise InversionImpossibleError(f"transform vanishes on K (min |Φ| = {min_K:.3e})")
    min_U, _ = min_modulus(f, U)
    if min_U <= zero_tol * max(f.l1(), 1e-300):
        raise InversionImpossibleError(f"transform vanishes on the window support (min |Φ| = {min_U:.3e})")
    if r == "auto":
        r = auto_radius(f, min_U / 6)
    g = truncate(f, float(r))
    eps = float(np.sum(np.abs(f.samples - g.samples)) * f.spacing)

    xi, Phi = f.spectrum(size)
    _, Psi = g.spectrum(size)
    w = window(xi)
    live = w > 0
    if np.any(Psi[live] == 0):
        raise InversionImpossibleError("truncated transform vanishes on the window support")
    q = np.zeros_like(Phi)
    q[live] = (Psi[live] - Phi[live]) / Psi[live]
    rho = float(np.max(np.abs(q[live])))
    if rho >= 1:
        raise InversionImpossibleError(f"Neumann ratio {rho:.3f} >= 1 on the window support")
    Phi_t = np.zeros_like(Phi)
    term = np.zeros_like(Phi)
    term[live] = w[live] / Psi[live]
    for _ in range(N + 1):
        Phi_t += term
        term = term * q
    n = size
    origin = -(n // 2) * f.spacing
    f_t = from_spectrum(xi, Phi_t, f.spacing, origin)
    if np.max(np.abs(f_t.samples.imag)) <= 1e-12 * max(np.max(np.abs(f_t.samples.real)), 1e-300):
        f_t = GridFunction(origin, f.spacing, f_t.samples.real)

    pts = _points(K, check_points)
    residual = float(np.max(np.abs(f.fourier(pts) * f_t.fourier(pts) - 1)))
    inK = _in_set(xi, K)
    oracle_gap = float(np.max(np.abs(Phi_t[inK] - w[inK] / Phi[inK]))) if inK.any() else 0.0
    sup_phi = float(np.max(np.abs(f.fourier(pts))))
    ratio = float(np.max(np.abs(w[live] / Psi[live])))
    analytic = sup_phi * ratio * 2.0**-N

    # grid term: Riemann error of Φ (Δ versus 2Δ) and mass of f̃ near the grid edge
    coarse = GridFunction(f.origin, 2 * f.spacing, f.samples[::2])
    riemann = float(np.max(np.abs(f.fourier(pts) - coarse.fourier(pts))))
    edge = max(n // 20, 1)
    edge_mass = float(f.spacing * (np.sum(np.abs(f_t.samples[:edge])) + np.sum(np.abs(f_t.samples[-edge:]))))
    grid_bound = riemann * float(np.max(np.abs(Phi_t))) + sup_phi * edge_mass + 1e-13
    cert = InversionCertificate(K, eps, float(r), N, analytic, grid_bound, residual, rho, min_K, oracle_gap)
    return InversionResult(f_t, cert, xi, Phi, Psi, Phi_t, g)


def convolution_powers(d: GridFunction, n_max: int) -> list[np.ndarray]:
    """``d^{*1}, ..., d^{*n_max}`` as full linear convolutions (samples only)."""
    out = [np.asarray(d.samples)]
    for _ in range(n_max - 1):
        out.append(_convolve(out[-1], d.samples, d.spacing))
    return out


def weighted_norm_bound(f: GridFunction, g: GridFunction, n_max: int = 6) -> list[tuple[int, float, float]]:
    """``(n, ‖(g-f)^{*n}‖_1, ‖g-f‖_1^n)`` for ``n <= n_max``."""
    d = GridFunction(f.origin, f.spacing, g.samples - f.samples)
    base = d.l1()
    return [(k + 1, float(f.spacing * np.sum(np.abs(p))), base ** (k + 1))
            for k, p in enumerate(convolution_powers(d, n_max))]


@dataclass(frozen=True)
class W1Check:
    lam: float  # ‖f/Y‖_∞
    eps: float  # ‖f - g‖_1
    r: float
    tail_ratio: float  # sup Y_r*Y_r / Y
    tail_target: float  # ε² / λ²
    pointwise: list[tuple[int, float]]  # (n, max |(g-f)^{*n}| / ((λ+ε) ε^{n-1} Y))
    satisfiable: bool

    @property
    def pointwise_ok(self) -> bool:
        return all(v <= 1 + 1e-9 for _, v in self.pointwise)


def w1_check(f: GridFunction, Y: WeightSpec, radii: Sequence[float], n_max: int = 4) -> W1Check:
    """Search ``radii`` (ascending) for an ``r`` with ``sup Y_r*Y_r/Y <= ε(r)²/λ²``.

    The pointwise bound on ``(g - f)^{*n}`` is evaluated at the first radius
    meeting the constraint, or at the last radius when none does
    (``satisfiable=False``).
    """
    x = f.x
    if x.size % 2 == 0 or not np.isclose(f.origin, -x[-1]):
        raise ValueError("f must live on a grid symmetric about 0 with an odd number of samples")
    n = x.size
    y = np.asarray(Y(x), dtype=float)
    lam = float(np.max(np.abs(f.samples) / y))
    chosen, found = None, False
    for r in radii:
        g = truncate(f, r)
        eps = float(np.sum(np.abs(f.samples - g.samples)) * f.spacing)
        yr = np.where(np.abs(x) > r, y, 0.0)
        tail = float(np.max(_convolve(yr, yr, f.spacing)[n // 2: n // 2 + n] / y))
        chosen = (r, g, eps, tail)
        if tail <= eps**2 / lam**2:
            found = True
            break
    r, g, eps, tail = chosen
    d = GridFunction(f.origin, f.spacing, g.samples - f.samples)
    pointwise = []
    for k, p in enumerate(convolution_powers(d, n_max), start=1):
        # k-fold convolution of a length-n grid starting at origin lives on k * origin + j Δ
        start = (k - 1) * (n // 2)
        win = np.abs(p[start:start + n])
        bound = (lam + eps) * eps ** (k - 1) * y
        pointwise.append((k, float(np.max(win / bound)) if eps > 0 else 0.0))
    return W1Check(lam, eps, float(r), tail, eps**2 / lam**2, pointwise, found)


# --------------------------------------------------------------------------
# spectra


# outside/total spectral mass of tapered polynomials (degree <= 4) stays below this
LEAKAGE_THRESHOLD = 1e-10


def taper(radius: float, beta: float = 10.0) -> Callable:
    """C-infinity taper ``exp(β - β/(1 - t²))``, ``t = x/radius``; larger β concentrates the spectrum."""
    def w(x):
        t = np.asarray(x, dtype=float) / radius
        inside = np.abs(t) < 1
        u = np.where(inside, 1 - t * t, 1.0)
        return np.where(inside, np.exp(beta - beta / u), 0.0)

    return w


def spectrum_mass(h: GridFunction, taper_fn: Callable, delta: float, size: int | None = None
                  ) -> tuple[float, float]:
    """L¹ mass of ``|F(h · taper)|`` inside and outside ``[-δ, δ]``."""
    size = size or 1 << max(int(math.ceil(math.log2(4 * h.samples.size))), 10)
    tapered = GridFunction(h.origin, h.spacing, h.samples * taper_fn(h.x))
    xi, H = tapered.spectrum(size)
    dxi = 2 * np.pi / (size * h.spacing)
    mass = np.abs(H) * dxi
    inside = np.abs(xi) <= delta
    return float(np.sum(mass[inside])), float(np.sum(mass[~inside]))


def render_atoms(atoms: dict[int, float], lo: float, hi: float, spacing: float = 0.01,
                 radius: float = 0.25) -> GridFunction:
    """Sum of narrow bumps ``h(n) B(x - n)`` for atoms inside ``[lo, hi]``."""
    grid = GridFunction.sample(lambda x: np.zeros_like(x), lo, hi, spacing)
    x = grid.x
    vals = np.zeros_like(x)
    for n, v in atoms.items():
        if lo <= n <= hi:
            vals += float(v) * bump(float(n), radius).value(x)
    return GridFunction(grid.origin, spacing, vals)


def write_grid_csv(g: GridFunction, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["origin", repr(float(g.origin)), "spacing", repr(float(g.spacing))])
        for v in np.real(g.samples):
            w.writerow([repr(float(v))])
