"""Map primitives: branch arithmetic, orbits, and cylinder measures."""

import math
from fractions import Fraction

import numpy as np
import pytest

from shiftdiff import (
    CylinderSet,
    MapParams,
    cylinder_intervals,
    cylinder_measures,
    exact_autocorrelation,
    itinerary_pieces,
    jump,
    orbit_mod1,
    step_lifted,
    step_mod1,
    velocity,
)
from shiftdiff.map_core import EnumerationLimitError

H_GRID_21 = [i / 20 for i in range(21)]


def test_params_validation():
    MapParams(0.0)
    MapParams(1.0)
    with pytest.raises(ValueError):
        MapParams(-0.1)
    with pytest.raises(ValueError):
        MapParams(1.5)


def test_breakpoints_ordering():
    for h in H_GRID_21:
        b1, mid, b3 = MapParams(h).breakpoints
        assert 0 <= b1 <= mid <= b3 <= 1


def test_step_lifted_values():
    assert step_lifted(0.25, MapParams(0.5)) == pytest.approx(1.0, abs=1e-15)
    assert step_lifted(0.75, MapParams(0.0)) == pytest.approx(0.5, abs=1e-15)
    assert step_lifted(1.25, MapParams(0.5)) == pytest.approx(2.0, abs=1e-15)


def test_step_mod1_values():
    p = MapParams(0.4)
    assert step_mod1(0.4, p) == pytest.approx(0.2, abs=1e-14)
    assert step_mod1(0.2, p) == pytest.approx(0.8, abs=1e-14)
    assert step_mod1(0.5, MapParams(0.5)) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        step_mod1(1.0, p)
    with pytest.raises(ValueError):
        step_mod1(-0.1, p)


def test_velocity_windows():
    p = MapParams(0.5)
    assert velocity(0.3, p) == 1
    assert velocity(0.6, p) == -1
    assert velocity(0.9, p) == 0
    assert velocity(0.1, p) == 0
    # boundary points belong to the right-hand branch
    assert velocity(0.25, p) == 1
    assert velocity(0.5, p) == -1
    assert velocity(0.75, p) == 0
    with pytest.raises(ValueError):
        velocity(1.0, p)


def test_jump_values():
    assert jump(0.9, MapParams(0.5), 0) == 0
    # orbit of 2/5 under h=2/5: velocities +1 then 0
    assert jump(0.4, MapParams(0.4), 1) == 1
    p0 = MapParams(0.0)
    for x in (0.1, 0.5, 0.9):
        assert jump(x, p0, 7) == 0
    with pytest.raises(ValueError):
        jump(0.5, p0, -1)


def test_jump_recursion_identity():
    rng = np.random.default_rng(3)
    p = MapParams(0.63)
    for x in rng.random(20):
        n = 6
        assert jump(x, p, n) == velocity(x, p) + jump(step_mod1(x, p), p, n - 1)


def test_orbit_preperiodic_examples():
    rec = orbit_mod1(0.4, MapParams(0.4))
    assert (rec.preperiod, rec.period) == (1, 2)
    rec = orbit_mod1(0.5, MapParams(0.5))
    assert (rec.preperiod, rec.period) == (0, 1)
    rec = orbit_mod1(0.0, MapParams(1.0))
    assert (rec.preperiod, rec.period) == (0, 1)


def test_orbit_step_consistency():
    p = MapParams(0.37)
    rec = orbit_mod1(0.123, p, n_max=40)
    for a, b in zip(rec.points, rec.points[1:]):
        assert step_mod1(a, p) == b


def test_lift_mod1_velocity_consistency():
    rng = np.random.default_rng(11)
    for h in rng.random(8):
        p = MapParams(h)
        for x in rng.random(50):
            lifted = step_lifted(x, p)
            assert velocity(x, p) == math.floor(lifted) - math.floor(x)
            assert abs((lifted - math.floor(lifted)) - step_mod1(x, p)) < 1e-12 or (
                step_mod1(x, p) > 1 - 1e-12
            )


def test_cylinder_single_plus_window():
    cyl = cylinder_intervals([1], MapParams(0.5))
    assert cyl.intervals == [(0.25, 0.5)]
    assert cyl.measure == pytest.approx(0.25, abs=1e-15)


def test_cylinder_minus_measure_is_half_h():
    for h in H_GRID_21:
        cyl = cylinder_intervals([-1], MapParams(h))
        assert cyl.measure == pytest.approx(h / 2, abs=1e-15)


def test_cylinder_empty_below_one_third():
    cyl = cylinder_intervals([1, 1], MapParams(0.25))
    assert cyl.intervals == []
    assert cyl.measure == 0


def test_cylinder_symbol_validation():
    p = MapParams(0.5)
    with pytest.raises(ValueError):
        cylinder_intervals([], p)
    with pytest.raises(ValueError):
        cylinder_intervals([2], p)


def test_cylinder_completeness():
    for h in H_GRID_21:
        p = MapParams(h)
        for m in range(1, 13):
            total = sum(cylinder_measures(p, m).values())
            assert abs(total - 1) < 1e-12, (h, m)


def test_no_mean_drift():
    for h in H_GRID_21:
        mu = cylinder_measures(MapParams(h), 1)
        drift = sum(sym[0] * m for sym, m in mu.items())
        assert abs(drift) < 1e-14


def test_refinement_consistency():
    for h in (0.2, 0.45, 0.77):
        p = MapParams(h)
        mu2 = cylinder_measures(p, 2)
        mu3 = cylinder_measures(p, 3)
        for (a, b), m in mu2.items():
            children = sum(mu3.get((a, b, c), 0.0) for c in (-1, 0, 1))
            assert abs(children - m) < 1e-13


def test_autocorrelation_lag0_is_h():
    for h in H_GRID_21:
        assert exact_autocorrelation(MapParams(h), 0) == pytest.approx(h, abs=1e-14)


def test_autocorrelation_trivial_cases():
    for n in range(5):
        assert exact_autocorrelation(MapParams(0.0), n) == 0
    assert exact_autocorrelation(MapParams(1.0), 1) == pytest.approx(0.0, abs=1e-14)


def test_autocorrelation_against_riemann_sum():
    # independent oracle: midpoint Riemann sum of v0 * vn over 10^6 points
    n_pts = 1_000_000
    for h, n in ((0.4, 1), (0.4, 2), (0.7, 2), (0.23, 3)):
        p = MapParams(h)
        b1, mid, b3 = p.breakpoints
        x = (np.arange(n_pts) + 0.5) / n_pts

        def vel(arr):
            return np.where(
                (arr >= b1) & (arr < mid), 1, np.where((arr >= mid) & (arr < b3), -1, 0)
            )

        v0 = vel(x)
        y = x.copy()
        for _ in range(n):
            f = y
            y = np.where(
                f < b1,
                2 * f + h,
                np.where(
                    f < mid, 2 * f + h - 1, np.where(f < b3, 2 * f - h, 2 * f - 1 - h)
                ),
            )
        estimate = float(np.mean(v0 * vel(y)))
        assert abs(estimate - exact_autocorrelation(p, n)) < 1e-4


def test_itinerary_pieces_partition():
    p = MapParams(0.3)
    pieces = itinerary_pieces(p, 4)
    assert pieces[0][0] == 0.0
    assert pieces[-1][1] == 1.0
    for (lo1, hi1, _), (lo2, _, _) in zip(pieces, pieces[1:]):
        assert hi1 == lo2
        assert lo1 < hi1


def test_enumeration_cap():
    p = MapParams(0.5)
    with pytest.raises(EnumerationLimitError):
        exact_autocorrelation(p, 30)
    with pytest.raises(EnumerationLimitError):
        itinerary_pieces(p, 30)


def test_rational_mode_exact_orbit():
    p = MapParams(Fraction(2, 5))
    rec = orbit_mod1(Fraction(2, 5), p)
    assert rec.points[:3] == [Fraction(2, 5), Fraction(1, 5), Fraction(4, 5)]
    assert (rec.preperiod, rec.period) == (1, 2)
    assert rec.tolerance == 0


def test_rational_mode_exact_measures():
    p = MapParams(Fraction(2, 5))
    mu = cylinder_measures(p, 6)
    assert sum(mu.values()) == 1  # exact rational sum
    assert all(isinstance(v, Fraction) for v in mu.values())
    assert exact_autocorrelation(p, 0) == Fraction(2, 5)


def test_cylinder_set_types():
    cyl = cylinder_intervals([0, 1], MapParams(0.5))
    assert isinstance(cyl, CylinderSet)
    assert cyl.measure == pytest.approx(
        sum(b - a for a, b in cyl.intervals), abs=1e-14
    )
