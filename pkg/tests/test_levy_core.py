import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from levyliouville import levy_core as lc
from levyliouville.functions import bump, constant, cosine, exponential, polynomial

fracs = st.fractions(min_value=-4, max_value=4, max_denominator=16)
pos_fracs = st.fractions(min_value=Fraction(1, 16), max_value=3, max_denominator=16)


@st.composite
def atomic_triplets(draw):
    locs = draw(st.lists(fracs.filter(lambda v: v != 0), min_size=0, max_size=4, unique=True))
    masses = [draw(pos_fracs) for _ in locs]
    a = draw(st.fractions(min_value=0, max_value=3, max_denominator=8))
    b = draw(fracs)
    return lc.LevyTriplet(a, b, lc.AtomicMeasure(tuple(zip(locs, masses))))


def stable_exponent(alpha, c, xi):
    """Closed form of ``2c ∫_0^∞ (1 - cos ξy) y^{-1-α} dy``."""
    k = mpmath.pi / 2 if alpha == 1 else -mpmath.gamma(-alpha) * mpmath.cos(mpmath.pi * alpha / 2)
    return float(2 * c * abs(xi) ** alpha * k)


# ----------------------------------------------------------------------------
# symbols


def test_counterexample_symbol_exact_at_pi():
    v = lc.symbol_eval(lc.counterexample_triplet(0, truncation=40), lc.PiMultiple(1))
    assert v.re == 1 and v.im == 0
    assert v.error == pytest.approx(2.0**-40)


@pytest.mark.parametrize("m", [1, 2, 3, 7, 50])
def test_counterexample_symbol_vanishes_on_two_pi_lattice(m):
    K = 40
    v = lc.symbol_eval(lc.counterexample_triplet(0, truncation=K), lc.PiMultiple(2 * m))
    assert v.re == 0
    assert v.error <= 2.0 ** (-K - 1) * 2


@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_brownian_symbol_is_square(xi):
    v = lc.symbol_eval(lc.brownian(1, 0), xi)
    assert abs(complex(v) - xi * xi) <= 1e-14 * max(1.0, xi * xi)


@given(atomic_triplets(), st.floats(min_value=-20, max_value=20, allow_nan=False))
def test_symbol_hermitian_and_nonnegative_real_part(t, xi):
    v, w = complex(lc.symbol_eval(t, xi)), complex(lc.symbol_eval(t, -xi))
    assert v.real >= -1e-12
    assert abs(w - v.conjugate()) <= 1e-9 * (1 + abs(v))


@given(atomic_triplets(), st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_dual_symbol_is_conjugate(t, xi):
    v = complex(lc.symbol_eval(t, xi))
    d = complex(lc.symbol_eval(lc.dual_triplet(t), xi))
    assert abs(d - v.conjugate()) <= 1e-9 * (1 + abs(v))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
@pytest.mark.parametrize("xi", [0.3, 1.0, 2.5, -7.0])
def test_stable_symbol_against_closed_form(alpha, xi):
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("stable", {"alpha": alpha, "c": 1.0}))
    v = lc.symbol_eval(t, xi)
    exact = stable_exponent(alpha, 1.0, xi)
    assert abs(float(v.re) - exact) <= v.error
    assert abs(float(v.re) - exact) <= 1e-5 * exact
    assert abs(v.im) <= 1e-12


def test_tempered_symbol_has_imaginary_part_when_skewed():
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("tempered_stable",
                                               {"alpha": 0.7, "c_plus": 2.0, "c_minus": 0.5, "theta": 1.0}))
    v = lc.symbol_eval(t, 1.3)
    assert v.re > 0 and abs(v.im) > 1e-3


# ----------------------------------------------------------------------------
# operator application


@given(atomic_triplets(), fracs)
def test_operator_on_quadratic_is_exact(t, x):
    f = polynomial([Fraction(1), Fraction(-2), Fraction(3)])
    # L x² = 2a + 2bx + ∫ (2xy + y² - 1_B 2xy) ν(dy)
    comp = t.measure.compensator()
    expected = 6 * t.diffusion + t.drift * (-2 + 6 * x)
    expected += sum((m * (-2 * y + 3 * (2 * x * y + y * y)) for y, m in t.measure.atoms), Fraction(0))
    expected -= comp * (-2 + 6 * x)
    assert lc.apply_operator(t, f, x) == expected


@given(atomic_triplets(), st.floats(min_value=-1.5, max_value=1.5), st.floats(min_value=-2, max_value=2))
def test_exponentials_are_eigenfunctions(t, lam, x):
    f = exponential(lam)
    lhs = float(lc.apply_operator(t, f, x))
    kappa = float(t.diffusion) * lam * lam + float(t.drift) * lam + t.measure.laplace_part(lam)
    assert lhs == pytest.approx(kappa * math.exp(lam * x), rel=1e-9, abs=1e-9)


def test_unit_atoms_are_not_compensated():
    t = lc.LevyTriplet(0, 0, lc.AtomicMeasure(((1, Fraction(1)), (Fraction(1, 2), Fraction(1)))))
    assert t.measure.compensator() == Fraction(1, 2)
    f = polynomial([Fraction(0), Fraction(1)])
    assert lc.apply_operator(t, f, Fraction(7)) == 1


@pytest.mark.parametrize("alpha", [0.6, 1.2, 1.7])
def test_stable_operator_on_cosine(alpha):
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("stable", {"alpha": alpha, "c": 1.0}))
    w, x = 1.7, 0.4
    val, err = lc.apply_operator(t, cosine(w), x, with_error=True)
    expected = -stable_exponent(alpha, 1.0, w) * math.cos(w * x)
    assert abs(val - expected) <= max(err, 1e-7) * 10


def test_counterexample_operator_on_constant_within_certified_error():
    val, err = lc.apply_operator(lc.counterexample_triplet(0), constant(Fraction(3)), Fraction(5), with_error=True)
    assert abs(val) <= err <= 3 * 2.0**-20


def test_counterexample_on_compact_support_uses_exact_cover():
    f = bump(0.0, 1.0)
    val, err = lc.apply_operator(lc.counterexample_triplet(0), f, 4.0, with_error=True)
    assert err == 0
    # only x_1 = 4 reaches the bump from 4
    assert val == pytest.approx(0.125 * float(f.value(0.0)))


def test_series_rejects_unbounded_functions():
    with pytest.raises(lc.DivergentIntegralError):
        lc.apply_operator(lc.counterexample_triplet(0), polynomial([0, 1]), 0)
    with pytest.raises(lc.DivergentIntegralError):
        lc.counterexample_measure().laplace_part(0.1)
    assert lc.counterexample_measure().laplace_part(0) == 0


def test_heavy_tail_needs_bounded_function():
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("stable", {"alpha": 0.5}))
    with pytest.raises(lc.DivergentIntegralError):
        lc.apply_operator(t, polynomial([0.0, 1.0]), 0.0)


@pytest.mark.parametrize("bad", [
    lambda: lc.LevyTriplet(-1, 0),
    lambda: lc.AtomicMeasure(((0, 1),)),
    lambda: lc.AtomicMeasure(((1, 0),)),
    lambda: lc.AtomicMeasure(((1, 1), (1, 2))),
    lambda: lc.DensityMeasure("stable", {"alpha": 2.5}),
    lambda: lc.DensityMeasure("gamma", {}),
])
def test_invalid_triplets(bad):
    with pytest.raises(lc.InvalidTripletError):
        bad()


def test_quadrature_failure_is_reported():
    spec = lc.QuadratureSpec(rel_tol=1e-15, abs_tol=1e-300, limit=2)
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("stable", {"alpha": 1.5}, spec))
    with pytest.raises(lc.QuadratureError) as info:
        lc.symbol_eval(t, 30.0)
    assert info.value.achieved > 0


# ----------------------------------------------------------------------------
# exact trigonometry


@given(st.integers(min_value=-10**6, max_value=10**6), st.fractions(min_value=-8, max_value=8, max_denominator=6))
def test_cos_sin_matches_float(y, r):
    c, s = lc.cos_sin(y, lc.PiMultiple(r))
    assert float(c) == pytest.approx(math.cos(y * float(r) * math.pi), abs=1e-6)
    assert float(s) == pytest.approx(math.sin(y * float(r) * math.pi), abs=1e-6)


def test_cos_sin_huge_argument():
    y = 2**4000 + 1
    c, s = lc.cos_sin(y, 0.5)
    mpmath.mp.dps = 1300
    exact = mpmath.cos(mpmath.mpf(y) * mpmath.mpf(0.5))
    mpmath.mp.dps = 15
    assert float(c) == pytest.approx(float(exact), abs=1e-12)


# ----------------------------------------------------------------------------
# weak harmonicity


def test_weak_residual_brownian():
    t = lc.brownian(1, 0)
    tests = [bump(c, 0.7) for c in (-1.0, 0.0, 2.5)]
    assert lc.weak_harmonicity_residual(polynomial([1.0, 2.0]), t, tests) <= 1e-12
    # ∫ x² φ'' = 2 ∫ φ, far from zero
    assert lc.weak_harmonicity_residual(polynomial([0.0, 0.0, 1.0]), t, tests) > 0.1


def test_weak_residual_density_needs_range():
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("stable", {"alpha": 1.0}))
    with pytest.raises(lc.DivergentIntegralError):
        lc.weak_harmonicity_residual(constant(1.0), t, [bump(0.0, 1.0)])


def test_weak_residual_density_constant():
    t = lc.LevyTriplet(0, 0, lc.DensityMeasure("tempered_stable", {"alpha": 0.8, "theta": 1.0}))
    quad = lc.QuadRule(nodes=16, panel_width=0.5, x_range=(-3.0, 3.0))
    r = lc.weak_harmonicity_residual(constant(1.0), t, [bump(0.0, 1.0)], quad, relative=True)
    assert r < 0.2  # constant is harmonic; range cut only loses the outer part


def test_levy_integrability_and_truncation_bound():
    m = lc.AtomicMeasure(((Fraction(1, 2), Fraction(2)), (3, Fraction(1))))
    assert lc.levy_integrability(m) == Fraction(3, 2)
    cm = lc.counterexample_measure(10)
    assert lc.levy_integrability(cm) == 1
    assert lc.truncation_error_bound(cm, 10, 2.0) == pytest.approx(2.0**-10)
    d = lc.DensityMeasure("stable", {"alpha": 1.0, "c": 1.0})
    assert lc.levy_integrability(d) == pytest.approx(2 * (1 / (2 - 1.0) + 1 / 1.0))
