"""Exact construction of a non-polynomial harmonic sequence on the integers.

The operator is ``L0 f(n) = Σ_k p_k (f(n + x_k) + f(n - x_k)) - f(n)`` with
``p_k = 2^{-k-2}`` and ``x_k = 2^{2k²}``.  Starting from ``h_{-1} = 1_{0}``,
level ``m`` adds the atoms ``a_m`` at ``±(m + x_m)`` that cancel
``L0 h_{m-1}(m)``.  Because the jump lengths grow super-exponentially, each
lookup hits at most one atom, and every sum below is finite and exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable


class WindowExceedsLevelError(ValueError):
    pass


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class CounterexampleParams:
    p: Callable[[int], Fraction] = field(default=lambda k: Fraction(1, 1 << (k + 2)))
    x: Callable[[int], int] = field(default=lambda k: 1 << (2 * k * k))

    def tail_mass(self, K: int) -> Fraction:
        """``Σ_{k>K} 2 p_k`` for the default masses."""
        return Fraction(1, 1 << (K + 1))

    def check(self, kmax: int = 20) -> bool:
        """Sparse-support hypotheses ``x_{k+1} >= 2 x_k`` and ``x_k >= 2k`` on ``k <= kmax``."""
        return all(self.x(k + 1) >= 2 * self.x(k) and self.x(k) >= 2 * k for k in range(kmax))

    def cover_index(self, radius: int) -> int:
        k = 0
        while self.x(k) <= radius:
            k += 1
        return k


DEFAULT_PARAMS = CounterexampleParams()


@dataclass(frozen=True)
class SparseSequence:
    """Finitely supported map ``n -> value`` with exact rational values."""

    atoms: dict[int, Fraction]
    level: int = -1

    def __post_init__(self):
        clean = {int(n): Fraction(v) for n, v in self.atoms.items() if v != 0}
        object.__setattr__(self, "atoms", clean)

    def __call__(self, n: int) -> Fraction:
        return self.atoms.get(n, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, SparseSequence) and self.atoms == other.atoms and self.level == other.level

    def __hash__(self):
        return hash((self.level, tuple(sorted(self.atoms.items()))))

    @property
    def radius(self) -> int:
        return max((abs(n) for n in self.atoms), default=0)

    def support(self) -> list[int]:
        return sorted(self.atoms)

    def is_symmetric(self) -> bool:
        return all(self(-n) == v for n, v in self.atoms.items())


def apply_L0(seq: SparseSequence, n: int, K: int | None = None,
             params: CounterexampleParams = DEFAULT_PARAMS) -> Fraction:
    """``Σ_{k<=K} p_k (h(n+x_k) + h(n-x_k)) - h(n)``, exact.

    With ``K=None`` the truncation is the smallest ``k`` with
    ``x_k > radius + |n|``; all later lookups are then provably zero.  The
    ``-h(n)`` term uses ``Σ_k 2p_k = 1`` for the full series.
    """
    need = params.cover_index(seq.radius + abs(n))
    if K is None:
        K = need
    elif K < need - 1 and any(seq(n + params.x(k)) or seq(n - params.x(k)) for k in range(K + 1, need)):
        raise TruncationError(f"truncation K={K} drops nonzero terms; need K >= {need - 1}")
    total = Fraction(0)
    for k in range(K + 1):
        xk = params.x(k)
        hp, hm = seq(n + xk), seq(n - xk)
        if hp or hm:
            total += params.p(k) * (hp + hm)
    return total - seq(n)


def build_discrete(M: int, params: CounterexampleParams = DEFAULT_PARAMS) -> SparseSequence:
    """Level-``M`` sequence ``h_M``: 1 at 0 and ``a_m`` at ``±(m + x_m)`` for ``m <= M``."""
    if M < 0:
        raise ValueError("level must be nonnegative")
    h = SparseSequence({0: Fraction(1)}, level=-1)
    atoms = dict(h.atoms)
    for m in range(M + 1):
        if m == 0:
            a = -apply_L0(h, 0, params=params) / (2 * params.p(0))
        else:
            a = -apply_L0(h, m, params=params) / params.p(m)
        if a != 0:
            loc = m + params.x(m)
            atoms[loc] = a
            atoms[-loc] = a
        h = SparseSequence(atoms, level=m)
    return h


def level_coefficients(seq: SparseSequence, params: CounterexampleParams = DEFAULT_PARAMS) -> list[Fraction]:
    """``[a_0, ..., a_M]`` read back from a build."""
    return [seq(m + params.x(m)) for m in range(seq.level + 1)]


@dataclass(frozen=True)
class WindowCertificate:
    level: int
    window: int
    values: dict[int, Fraction]

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.values.values())


def verify_harmonic_window(M: int, N: int, params: CounterexampleParams = DEFAULT_PARAMS,
                           seq: SparseSequence | None = None) -> WindowCertificate:
    """Exact ``L0 h_M(n)`` for ``|n| <= N``; only ``N <= M`` is determined by the build."""
    if N > M:
        raise WindowExceedsLevelError(f"window {N} exceeds level {M}")
    if seq is None:
        seq = build_discrete(M, params)
    values = {n: apply_L0(seq, n, params=params) for n in range(-N, N + 1)}
    return WindowCertificate(M, N, values)


def convolve(seq: SparseSequence, mu: dict[int, Fraction], n: int) -> Fraction:
    """``(h * μ)(n) = Σ_y h(n - y) μ(y)`` for a finitely supported ``μ``."""
    return sum((seq(n - y) * w for y, w in mu.items()), Fraction(0))


def counterexample_mu(K: int, params: CounterexampleParams = DEFAULT_PARAMS) -> dict[int, Fraction]:
    """``Σ_{k<=K} p_k (δ_{x_k} + δ_{-x_k})``; the remaining mass is ``2^{-K-1}``."""
    mu: dict[int, Fraction] = {}
    for k in range(K + 1):
        mu[params.x(k)] = params.p(k)
        mu[-params.x(k)] = params.p(k)
    return mu


def sparsity_violations(seq: SparseSequence, params: CounterexampleParams = DEFAULT_PARAMS) -> list[tuple]:
    """Triples ``(n, k, m)`` breaking: ``|n ± x_k| = m + x_m`` implies ``|n| = m`` or ``|n| >= x_m / 2``."""
    M = seq.level
    targets = {m + params.x(m): m for m in range(M + 1)}
    bad = []
    for n in seq.atoms:
        for k in range(M + 1):
            for s in (n + params.x(k), n - params.x(k)):
                m = targets.get(abs(s))
                if m is not None and not (abs(n) == m or 2 * abs(n) >= params.x(m)):
                    bad.append((n, k, m))
    return bad


# --------------------------------------------------------------------------
# growth


@dataclass(frozen=True)
class GrowthReport:
    epsilon: float
    atom_ratios: list[tuple[int, float]]  # (n, |h(n)| / (1+|n|)^ε), n >= 0
    level_values: list[tuple[int, Fraction, float]]  # (m, a_m, p_m |a_m| / (1+m)^ε)
    jump_sums: list[tuple[int, float]]  # (n, Σ p_k (|h(n+x_k)| + |h(n-x_k)|) / (1+|n|)^ε)
    bounded: dict[str, bool]
    decreasing_from: int | None  # first level after which atom ratios decrease

    @property
    def max_atom_ratio(self) -> float:
        return max(r for _, r in self.atom_ratios)


def _pow_ratio(value: Fraction, n: int, eps: float) -> float:
    # |value| / (1+n)^eps without converting huge n to float
    if value == 0:
        return 0.0
    lv = math.log(abs(value.numerator)) - math.log(value.denominator)
    return math.exp(lv - eps * math.log(n + 1))


def _running_max_bounded(values: list[float]) -> bool:
    """Whether the tail stays below the running maximum of the first half."""
    if len(values) < 2:
        return True
    half = max(1, len(values) // 2)
    return max(values[half:]) <= max(values[:half])


def growth_report(seq: SparseSequence, eps: float,
                  params: CounterexampleParams = DEFAULT_PARAMS) -> GrowthReport:
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    atoms = sorted(n for n in seq.atoms if n >= 0)
    atom_ratios = [(n, _pow_ratio(seq(n), n, eps)) for n in atoms]
    level_values = []
    for m in range(seq.level + 1):
        a = seq(m + params.x(m))
        level_values.append((m, a, _pow_ratio(params.p(m) * a, m, eps)))
    jump_sums = []
    for n in atoms:
        K = params.cover_index(seq.radius + n)
        s = sum((params.p(k) * (abs(seq(n + params.x(k))) + abs(seq(n - params.x(k)))) for k in range(K + 1)),
                Fraction(0))
        jump_sums.append((n, _pow_ratio(s, n, eps)))
    ratios = [r for _, r in atom_ratios]
    decreasing_from = None
    for i in range(len(ratios)):
        if all(ratios[j + 1] < ratios[j] for j in range(i, len(ratios) - 1)) and len(ratios) - i >= 3:
            decreasing_from = atoms[i]
            break
    bounded = {
        "atoms": _running_max_bounded(ratios),
        "levels": _running_max_bounded([v for *_, v in level_values]),
        "jumps": _running_max_bounded([r for _, r in jump_sums]),
    }
    return GrowthReport(eps, atom_ratios, level_values, jump_sums, bounded, decreasing_from)


def write_growth_csv(report: GrowthReport, path, params: CounterexampleParams = DEFAULT_PARAMS) -> None:
    """Columns ``m, n, a_m, ratio`` with ``a_m`` as ``p/q`` and ratio ``|a_m|/(1+n)^ε``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "n", "a_m", "ratio"])
        for m, a, _ in report.level_values:
            n = m + params.x(m)
            w.writerow([m, str(n), f"{a.numerator}/{a.denominator}", repr(_pow_ratio(a, n, report.epsilon))])
