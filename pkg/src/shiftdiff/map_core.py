"""Core dynamics of the lifted Bernoulli shift map.

The map doubles the fractional part of a point and lifts it over the real
line, with a height parameter ``h`` that opens two symmetric jump windows
inside the unit cell.  Every quantity in this package reduces to three
primitives defined here: the map itself, the integer velocity observable,
and exact cylinder-set measures under the uniform invariant density.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

SYMBOLS = (-1, 0, 1)

# Cylinder enumeration grows like 2**n; refuse anything past this depth.
ENUMERATION_CAP = 24


class EnumerationLimitError(RuntimeError):
    """Raised when a cylinder enumeration would exceed the depth cap."""


def _half(h):
    """1/2 in the same arithmetic (float or Fraction) as ``h``."""
    if isinstance(h, Fraction):
        return Fraction(1, 2)
    return 0.5


@dataclass(frozen=True)
class MapParams:
    """Lift parameter ``h`` and the branch geometry derived from it.

    ``h`` may be a float or a :class:`fractions.Fraction`;  with a Fraction
    every map operation runs in exact rational arithmetic, which makes
    orbit periodicity detection exact.
    """

    h: float | Fraction

    def __post_init__(self):
        if not (0 <= self.h <= 1):
            raise ValueError(f"lift parameter must satisfy 0 <= h <= 1, got {self.h}")

    @property
    def exact(self) -> bool:
        return isinstance(self.h, Fraction)

    @property
    def breakpoints(self):
        """The branch points ((1-h)/2, 1/2, (1+h)/2), nondecreasing in [0, 1]."""
        h = self.h
        half = _half(h)
        return ((1 - h) / 2, half, (1 + h) / 2)


@dataclass
class OrbitRecord:
    """Orbit of the mod-1 map with optional pre-periodicity detection.

    ``points[k]`` is the k-th iterate (``points[0]`` is the seed).  When a
    recurrence within ``tolerance`` is found, ``preperiod`` is the index of
    the first point on the cycle and ``period`` the cycle length; both stay
    ``None`` otherwise.
    """

    seed: float | Fraction
    points: list = field(default_factory=list)
    preperiod: int | None = None
    period: int | None = None
    tolerance: float = 0.0


@dataclass
class CylinderSet:
    """Set of points sharing a fixed finite velocity itinerary.

    For this piecewise-linear family every cylinder is a finite union of
    disjoint half-open subintervals of [0, 1); ``measure`` is their total
    length, exact under the uniform invariant density.
    """

    symbols: tuple
    intervals: list
    measure: float | Fraction


@dataclass
class DiffusionEstimate:
    """A single (method, order, h) diffusion-coefficient value.

    ``exact`` marks finite-time convergence certified by the orbit of the
    lift parameter; ``error_bound`` is an upper bound on the deviation from
    the converged value when one is available.
    """

    method: str
    order: int
    h: float
    value: float
    exact: bool = False
    error_bound: float | None = None


def _check_unit(x):
    if not (0 <= x < 1):
        raise ValueError(f"point must lie in [0, 1), got {x}")


def step_lifted(x, p: MapParams):
    """One step of the lifted map on the real line.

    The unit-cell map doubles the fractional part and shifts by ``+h`` below
    1/2 and ``-1-h`` above; integer cells are translated copies.
    """
    z = math.floor(x)
    f = x - z
    if f < _half(p.h):
        return 2 * f + p.h + z
    return 2 * f - 1 - p.h + z


def step_mod1(x, p: MapParams):
    """The unit-cell map taken modulo 1; domain and range are [0, 1)."""
    _check_unit(x)
    b1, mid, b3 = p.breakpoints
    if x < b1:
        r = 2 * x + p.h
    elif x < mid:
        r = 2 * x + p.h - 1
    elif x < b3:
        r = 2 * x - p.h
    else:
        r = 2 * x - 1 - p.h
    # guard against rounding onto the excluded endpoints
    if r < 0:
        return 0 * r
    if r >= 1:
        return math.nextafter(1.0, 0.0)
    return r


def velocity(x, p: MapParams) -> int:
    """Integer cell displacement of one step: +1, -1 or 0.

    A point jumps +1 on [(1-h)/2, 1/2), -1 on [1/2, (1+h)/2), and stays in
    its cell elsewhere; boundary points belong to the right-hand window.
    """
    _check_unit(x)
    b1, mid, b3 = p.breakpoints
    if b1 <= x < mid:
        return 1
    if mid <= x < b3:
        return -1
    return 0


def jump(x, p: MapParams, n: int) -> int:
    """Accumulated displacement after n+1 steps: sum of v_k for k = 0..n.

    Equivalently ``velocity(x) + jump(step_mod1(x), n-1)``.
    """
    _check_unit(x)
    if n < 0:
        raise ValueError("n must be >= 0")
    total = 0
    for _ in range(n + 1):
        total += velocity(x, p)
        x = step_mod1(x, p)
    return total


def orbit_mod1(x0, p: MapParams, n_max: int = 256, tol: float = 1e-12) -> OrbitRecord:
    """Iterate the mod-1 map and detect the first recurrence.

    Recurrence is an absolute-tolerance match against every stored point;
    with a Fraction parameter and seed the comparison is exact.  Absence of
    detection leaves preperiod/period unset.
    """
    _check_unit(x0)
    if n_max < 1 or tol <= 0:
        raise ValueError("need n_max >= 1 and tol > 0")
    exact = isinstance(x0, Fraction) and p.exact
    points = [x0]
    seen = {x0: 0} if exact else None
    rec = OrbitRecord(seed=x0, points=points, tolerance=0.0 if exact else tol)
    x = x0
    for k in range(1, n_max + 1):
        x = step_mod1(x, p)
        if exact:
            j = seen.get(x)
            if j is not None:
                rec.preperiod, rec.period = j, k - j
                return rec
            seen[x] = k
        else:
            for j, y in enumerate(points):
                if abs(x - y) <= tol:
                    rec.preperiod, rec.period = j, k - j
                    return rec
        points.append(x)
    return rec


def _velocity_pieces(lo, hi, p: MapParams):
    """Split [lo, hi) at the branch points; yield (a, b, v, image offset).

    On each piece the map is the affine branch ``x -> 2x + offset`` with
    image inside [0, 1), and the velocity symbol v is constant.
    """
    b1, mid, b3 = p.breakpoints
    h = p.h
    cuts = [lo]
    for c in (b1, mid, b3):
        if lo < c < hi:
            cuts.append(c)
    cuts.append(hi)
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        if a < b1:
            yield a, b, 0, h
        elif a < mid:
            yield a, b, 1, h - 1
        elif a < b3:
            yield a, b, -1, -h
        else:
            yield a, b, 0, -1 - h


def itinerary_pieces(p: MapParams, m: int):
    """Partition [0, 1) into intervals of constant length-``m`` itinerary.

    Returns a sorted list of ``(lo, hi, symbols)`` triples where ``symbols``
    is the tuple (v_0, ..., v_{m-1}) shared by every point of [lo, hi).
    Whole-interval refinement keeps the piece endpoints telescoping, so the
    lengths sum to exactly 1 up to rounding of the sum itself.
    """
    if m < 1:
        raise ValueError("itinerary length must be >= 1")
    if m > ENUMERATION_CAP:
        raise EnumerationLimitError(
            f"itinerary length {m} exceeds the enumeration cap {ENUMERATION_CAP}"
        )
    one = Fraction(1) if p.exact else 1.0
    pieces = [(0 * one, one, 0 * one, one, ())]  # x_lo, x_hi, img_lo, img_hi, symbols
    for depth in range(m):
        scale = 2 ** depth
        refined = []
        for x_lo, x_hi, img_lo, img_hi, syms in pieces:
            for a, b, v, off in _velocity_pieces(img_lo, img_hi, p):
                # reuse stored endpoints at parent boundaries so that the
                # x-space pieces telescope exactly
                xa = x_lo if a == img_lo else x_lo + (a - img_lo) / scale
                xb = x_hi if b == img_hi else x_lo + (b - img_lo) / scale
                if xb <= xa:
                    continue  # sub-ulp sliver from a near-breakpoint image
                refined.append((xa, xb, 2 * a + off, 2 * b + off, syms + (v,)))
        pieces = refined
    return [(x_lo, x_hi, syms) for x_lo, x_hi, _, _, syms in pieces]


def cylinder_intervals(symbols, p: MapParams) -> CylinderSet:
    """Exact cylinder set of a velocity-symbol sequence.

    Adjacent refinement pieces with the same itinerary are merged, so the
    intervals are disjoint, sorted, and minimal.  An impossible sequence
    yields an empty interval list with measure 0.
    """
    symbols = tuple(symbols)
    if not symbols:
        raise ValueError("symbol sequence must be nonempty")
    if any(s not in SYMBOLS for s in symbols):
        raise ValueError(f"symbols must be in {SYMBOLS}, got {symbols}")
    intervals = []
    for lo, hi, syms in itinerary_pieces(p, len(symbols)):
        if syms != symbols:
            continue
        if intervals and intervals[-1][1] == lo:
            intervals[-1] = (intervals[-1][0], hi)
        else:
            intervals.append((lo, hi))
    measure = sum((b - a for a, b in intervals), 0 * p.h)
    return CylinderSet(symbols=symbols, intervals=intervals, measure=measure)


def cylinder_measures(p: MapParams, m: int) -> dict:
    """Measures of all length-``m`` cylinders, keyed by symbol tuple.

    Only cylinders of positive measure appear; the values sum to 1.
    """
    out = {}
    for lo, hi, syms in itinerary_pieces(p, m):
        out[syms] = out.get(syms, 0 * p.h) + (hi - lo)
    return out


def exact_autocorrelation(p: MapParams, n: int):
    """Velocity autocorrelation <v_0 v_n> under the uniform density.

    Evaluated exactly as a sum of v_0 * v_n * measure over all length-(n+1)
    cylinders, enumerated depth-first so memory stays O(n).
    """
    if n < 0:
        raise ValueError("lag must be >= 0")
    if n + 1 > ENUMERATION_CAP:
        raise EnumerationLimitError(
            f"lag {n} needs depth {n + 1} > cap {ENUMERATION_CAP}"
        )
    one = Fraction(1) if p.exact else 1.0
    total = 0 * one

    def walk(lo, hi, k, v0):
        nonlocal total
        for a, b, v, off in _velocity_pieces(lo, hi, p):
            w0 = v if k == 0 else v0
            if w0 == 0:
                continue  # zero first symbol cannot contribute at any depth
            if k == n:
                total += w0 * v * (b - a)
            else:
                walk(2 * a + off, 2 * b + off, k + 1, w0)

    walk(0 * one, one, 0, 0)
    return total / 2 ** n


def truncated_green_kubo(p: MapParams, n: int):
    """Brute-force truncation of the velocity-correlation sum for D.

    Sums <v_0 v_k> for k = 0..n and subtracts half the instantaneous term,
    entirely from cylinder measures.  This is the independent oracle for the
    orbit-based evaluation in :mod:`shiftdiff.correlated_walk`.
    """
    terms = [exact_autocorrelation(p, k) for k in range(n + 1)]
    return sum(terms) - terms[0] / 2
