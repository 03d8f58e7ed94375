"""Correlated random walk: truncated velocity-correlation series for D(h).

The n-th order approximation is the random-walk value h/2 plus a memory
correction T given by a geometrically weighted sum of a tent function
evaluated along the orbit of the lift parameter itself.  Because the tent
vanishes outside the jump windows, the series converges in finite time
whenever that orbit falls onto a cycle on which the tent is zero; those
parameter values are where the fractal structure of D(h) emerges.

The exact reference D(h) is the limit of the same series, certified by the
unconditional tail bound |tail after n terms| <= h * 2**-n that follows
from |tent| <= h/2 and the geometric weights.
"""

from dataclasses import dataclass

from .map_core import DiffusionEstimate, MapParams, OrbitRecord, orbit_mod1, step_mod1


def tent(x, p: MapParams):
    """Piecewise-linear one-step memory kernel.

    Zero outside the jump windows, rising with slope +1 on the +1 window and
    falling with slope -1 on the -1 window; continuous on [0, 1] with
    maximum h/2 attained at x = 1/2.
    """
    if not (0 <= x < 1):
        raise ValueError(f"point must lie in [0, 1), got {x}")
    b1, mid, b3 = p.breakpoints
    if b1 <= x < mid:
        return x + (p.h - 1) / 2
    if mid <= x < b3:
        return -x + (p.h + 1) / 2
    return 0 * p.h


@dataclass
class MemorySeries:
    """Orbit of the lift parameter with tent values and partial memory sums.

    ``partial_sums[n]`` is the order-n memory term
    ``2**-n * t_n + sum_k 2**-(k+1) * t_k (k < n)`` over the tent values
    ``t_k`` along the orbit; successive entries differ by at most h * 2**-n.
    """

    h: float
    orbit: OrbitRecord
    tent_values: list
    partial_sums: list


def memory_series(p: MapParams, n: int, orbit_tol: float = 1e-12) -> MemorySeries:
    """Tent values and partial sums along the orbit of x = h (mod 1)."""
    if n < 0:
        raise ValueError("order must be >= 0")
    seed = p.h % 1
    orbit = orbit_mod1(seed, p, n_max=max(n + 1, 2), tol=orbit_tol)
    pts = orbit.points
    # extend to n+1 points if recurrence detection stopped the record early
    while len(pts) < n + 1:
        pts.append(step_mod1(pts[-1], p))
    tents = [tent(x, p) for x in pts[: n + 1]]
    sums = []
    prefix = 0 * p.h
    for k, t in enumerate(tents):
        sums.append(t / 2 ** k + prefix)
        prefix += t / 2 ** (k + 1)
    return MemorySeries(h=p.h, orbit=orbit, tent_values=tents, partial_sums=sums)


def memory_term(p: MapParams, n: int):
    """Order-n memory correction T; T(-1) is 0 by convention."""
    if n < 0:
        return 0 * p.h
    return memory_series(p, n).partial_sums[n]


def memory_profile(x, p: MapParams, n: int):
    """Memory correction as a function of position, by branch recursion.

    Evaluates the order-n cumulative jump integral at arbitrary x in [0, 1]
    through ``tent(x) + T(map x, n-1)/2 - T(h, n-1)/2``, with recursion
    depth exactly n + 1.  Anchored at 0 at both endpoints.
    """
    if not (0 <= x <= 1):
        raise ValueError(f"point must lie in [0, 1], got {x}")
    if n < -1:
        raise ValueError("order must be >= -1")
    offsets = [memory_term(p, k) for k in range(n)]  # T(h, k) for k < n

    def profile(y, k):
        if k < 0 or y == 0 or y == 1:
            return 0 * p.h
        off = offsets[k - 1] if k >= 1 else 0 * p.h
        return tent(y, p) + profile(step_mod1(y, p), k - 1) / 2 - off / 2

    return profile(x, n)


def finite_convergence_order(
    p: MapParams, n_max: int = 256, tol: float = 1e-12
) -> int | None:
    """Order past which the truncated series is exactly the limit, if certified.

    Certification requires the orbit of the lift parameter to be detected
    pre-periodic within ``n_max`` steps with the tent vanishing (|t| <= tol)
    on every cycle point; the certified order is the transient length plus
    one.  Returns None when no certificate is found.
    """
    orbit = orbit_mod1(p.h % 1, p, n_max=n_max, tol=tol)
    if orbit.period is None:
        return None
    cycle = orbit.points[orbit.preperiod : orbit.preperiod + orbit.period]
    if all(abs(tent(x, p)) <= tol for x in cycle):
        return orbit.preperiod + 1
    return None


def d_crw(p: MapParams, n: int, cert_tol: float = 1e-12) -> DiffusionEstimate:
    """Order-n correlated random walk approximation h/2 + T(n-1).

    Order 0 is the bare random walk h/2.  The error bound is the geometric
    tail h * 2**-(n-1); the exact flag is set when finite-time convergence
    is certified at an order <= n.
    """
    if n < 0:
        raise ValueError("order must be >= 0")
    value = p.h / 2 + memory_term(p, n - 1)
    if n == 0:
        bound = p.h / 2 + p.h  # coarse: random walk value plus the D <= h cap
    else:
        bound = p.h * 2.0 ** (-(n - 1))
    cert = finite_convergence_order(p, n_max=max(2 * n, 32), tol=cert_tol)
    return DiffusionEstimate(
        method="crw",
        order=n,
        h=float(p.h),
        value=float(value),
        exact=cert is not None and cert <= n,
        error_bound=float(bound),
    )


def d_exact(p: MapParams, tol: float = 1e-15) -> DiffusionEstimate:
    """Converged series reference for D(h).

    Terms are accumulated until the certified tail bound h * 2**-n drops
    below ``tol`` (at most ~60 terms for tol = 1e-16).  When finite-time
    convergence is certified the value is exact and the bound collapses
    to zero.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    n = 0
    x = p.h % 1
    total = 0 * p.h
    while p.h * 2.0 ** (-n) >= tol:
        total += tent(x, p) / 2 ** (n + 1)
        x = step_mod1(x, p)
        n += 1
    cert = finite_convergence_order(p, n_max=max(n, 64))
    return DiffusionEstimate(
        method="exact",
        order=n,
        h=float(p.h),
        value=float(p.h / 2 + total),
        exact=cert is not None,
        error_bound=0.0 if cert is not None else p.h * 2.0 ** (-n),
    )
