"""Correlated random walk: tent kernel, memory series, and estimates."""

from fractions import Fraction

import numpy as np
import pytest

from shiftdiff import (
    MapParams,
    d_crw,
    d_exact,
    finite_convergence_order,
    jump,
    memory_profile,
    memory_series,
    memory_term,
    step_mod1,
    tent,
    truncated_green_kubo,
)

H_GRID_21 = [i / 20 for i in range(21)]


def test_tent_values():
    assert tent(0.4, MapParams(0.4)) == pytest.approx(0.1, abs=1e-15)
    assert tent(0.2, MapParams(0.4)) == 0
    assert tent(0.8, MapParams(0.4)) == 0
    assert tent(0.5, MapParams(0.5)) == pytest.approx(0.25, abs=1e-15)


def test_tent_continuity_and_peak():
    for h in (0.3, 0.62, 1.0):
        p = MapParams(h)
        xs = np.linspace(0, 1, 4000, endpoint=False)  # grid contains 1/2
        vals = [tent(x, p) for x in xs]
        diffs = np.abs(np.diff(vals))
        assert diffs.max() <= 1.1 * (xs[1] - xs[0])  # slope at most 1
        assert max(vals) == pytest.approx(h / 2, abs=1e-12)
        assert tent(0.0, p) == 0


def test_memory_term_values():
    assert memory_term(MapParams(0.4), 1) == pytest.approx(0.05, abs=1e-15)
    for n in range(6):
        assert memory_term(MapParams(0.0), n) == 0
    # fixed-point orbit at h = 1/2 gives the constant 1/4 at every order
    for n in (0, 1, 5, 40):
        assert memory_term(MapParams(0.5), n) == pytest.approx(0.25, abs=1e-14)
    assert memory_term(MapParams(0.3), -1) == 0


def test_memory_term_matches_unreduced_recursion():
    # literal two-sum recursion with the intermediate weighted tail kept
    def unreduced(p, n, cache=None):
        if cache is None:
            cache = {}
        if n < 0:
            return 0.0
        if n in cache:
            return cache[n]
        x = p.h % 1
        total = 0.0
        for k in range(n + 1):
            total += tent(x, p) / 2**k
            x = step_mod1(x, p)
        for k in range(1, n + 1):
            total -= unreduced(p, n - k, cache) / 2**k
        cache[n] = total
        return total

    for h in (0.13, 0.4, 0.5, 0.77, 0.98):
        p = MapParams(h)
        for n in range(9):
            assert memory_term(p, n) == pytest.approx(
                unreduced(p, n), abs=1e-13
            ), (h, n)


def test_memory_series_partial_sum_structure():
    p = MapParams(0.37)
    series = memory_series(p, 12)
    tents = series.tent_values
    for n, ps in enumerate(series.partial_sums):
        direct = tents[n] / 2**n + sum(
            tents[k] / 2 ** (k + 1) for k in range(n)
        )
        assert ps == pytest.approx(direct, abs=1e-15)
    # geometric tail bound between any two orders
    sums = series.partial_sums
    for n in range(len(sums)):
        for m in range(len(sums)):
            assert abs(sums[n] - sums[m]) <= p.h * 2.0 ** (-min(n, m)) + 1e-15


def test_memory_profile_anchors_and_seed():
    for h in (0.0, 0.4, 0.81):
        p = MapParams(h)
        for n in (0, 1, 4):
            assert memory_profile(0.0, p, n) == 0
            assert memory_profile(1.0, p, n) == 0
    p = MapParams(0.4)
    assert memory_profile(0.4, p, 1) == pytest.approx(
        memory_term(p, 1), abs=1e-14
    )
    assert memory_profile(0.5, MapParams(0.5), 3) == pytest.approx(
        memory_term(MapParams(0.5), 3), abs=1e-14
    )


def test_memory_profile_against_quadrature():
    # independent oracle: T^n(x) is the integral of the accumulated jump
    n_pts = 200_000
    for h, x_eval, n in ((0.4, 0.3, 2), (0.7, 0.8, 3), (0.29, 0.55, 1)):
        p = MapParams(h)
        ys = (np.arange(n_pts) + 0.5) / n_pts
        ys = ys[ys < x_eval]
        integral = sum(jump(float(y), p, n) for y in ys) / n_pts
        assert memory_profile(x_eval, p, n) == pytest.approx(
            integral, abs=2e-5
        ), (h, x_eval, n)


def test_d_crw_order0_is_random_walk():
    for h in H_GRID_21:
        est = d_crw(MapParams(h), 0)
        assert est.value == pytest.approx(h / 2, abs=1e-16)
        assert est.method == "crw" and est.order == 0


def test_d_crw_finite_convergence_at_two_fifths():
    est = d_crw(MapParams(0.4), 2)
    assert est.value == pytest.approx(0.25, abs=1e-15)
    assert est.exact


def test_d_crw_h1():
    est = d_crw(MapParams(1.0), 1)
    assert est.value == pytest.approx(0.5, abs=1e-15)


def test_d_exact_values():
    assert d_exact(MapParams(0.0)).value == 0
    est = d_exact(MapParams(0.4))
    assert est.value == pytest.approx(0.25, abs=1e-14)
    assert est.exact and est.error_bound == 0
    assert d_exact(MapParams(0.5)).value == pytest.approx(0.5, abs=1e-14)
    # constant branch of D(h): the parameter point is a fixed point above 1/2
    for h in (0.55, 0.7, 0.93):
        assert d_exact(MapParams(h)).value == pytest.approx(0.5, abs=1e-13)


def test_finite_convergence_order_cases():
    assert finite_convergence_order(MapParams(0.4)) == 2
    assert finite_convergence_order(MapParams(0.5)) is None
    assert finite_convergence_order(MapParams(0.0)) == 1
    assert finite_convergence_order(MapParams(Fraction(2, 5))) == 2


def test_exactness_closure():
    # wherever a certificate exists, the estimate is constant past it
    for h in (0.2, 0.4, 1.0):
        p = MapParams(h)
        cert = finite_convergence_order(p)
        assert cert is not None
        base = d_crw(p, cert).value
        for n in range(cert, cert + 12):
            assert abs(d_crw(p, n).value - base) <= 1e-14


def test_oracle_equivalence_with_cylinder_sum():
    for h in H_GRID_21:
        p = MapParams(h)
        for n in (0, 1, 2, 5, 10):
            oracle = truncated_green_kubo(p, n)
            assert d_crw(p, n).value == pytest.approx(oracle, abs=1e-11), (h, n)


def test_certified_error_bound():
    for h in (0.1, 0.35, 0.5, 0.85):
        p = MapParams(h)
        ref = d_exact(p, tol=1e-15).value
        for n in range(1, 16):
            est = d_crw(p, n)
            assert abs(est.value - ref) <= h * 2.0 ** (-(n - 1)) + 1e-15
            assert est.error_bound == pytest.approx(h * 2.0 ** (-(n - 1)))


def test_random_walk_asymptotically_exact():
    for h in (1e-3, 1e-4):
        est = d_exact(MapParams(h))
        assert abs(est.value - h / 2) <= h


def test_tent_domain_error():
    with pytest.raises(ValueError):
        tent(1.0, MapParams(0.5))
    with pytest.raises(ValueError):
        memory_profile(1.2, MapParams(0.5), 2)
