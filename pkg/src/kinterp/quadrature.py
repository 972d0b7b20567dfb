"""Log-axis quadrature engine.

Every integral in this package has the shape ``∫ f(s) ds/s`` over a
subinterval of (0, ∞).  Substituting s = e^x turns it into ``∫ f(e^x) dx`` on
the real line, so all routines here work with *log-space integrands*:
vectorized callables that take an ndarray of x = ln s values and return the
integrand evaluated at s = e^x.  Working in x avoids the under/overflow that
raw s values would hit long before the mathematically relevant range ends.

Three mechanisms together cover a half line:

* composite Gauss-Legendre panels snapped to an absolute lattice, so node
  sets are shared between overlapping integrals (this also makes repeated
  runs bitwise deterministic);
* a log-log substitution x = ±e^y for the infinite ends, compressing
  |x| up to ``DEEP_LOG_RANGE`` into a short y interval, which resolves both
  exponentially and logarithmically decaying integrands;
* an asymptotic log-power tail estimate beyond that, fitted from two
  boundary samples.  The fit doubles as the divergence detector: a boundary
  slope ≥ -1, or a last-doubling increment above ``DIVERGENCE_REL`` of the
  accumulated value, flags the integral as divergent.

Integrands are assumed nonnegative.  Divergence is reported through a flag
rather than an exception because +∞ is a legal quasi-norm value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN10 = math.log(10.0)

GL_ORDER = 8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)

#: |x| reach of the log-log substituted region (x = ln t, so this covers
#: t down to exp(-1e12)).
DEEP_LOG_RANGE = 1.0e12
#: |x| at which integration switches from direct panels to the substitution.
SWITCH = 1.0
#: relative size of the last domain-doubling increment that flags divergence
DIVERGENCE_REL = 1.0e-3
_SLOPE_MARGIN = 1.0e-6
_TINY_POS = 1.0e-300
_ABS_FLOOR = 1.0e-280

DEFAULT_PPD = 64


@dataclass(frozen=True)
class LogGrid:
    """Geometric evaluation grid on (0, ∞)."""

    t_min: float = 1.0e-8
    t_max: float = 1.0e8
    points_per_decade: int = 16

    def __post_init__(self):
        if not (0.0 < self.t_min < self.t_max < math.inf):
            raise ValueError("LogGrid requires 0 < t_min < t_max < inf")
        if self.points_per_decade < 1:
            raise ValueError("LogGrid requires points_per_decade >= 1")

    def log_points(self) -> np.ndarray:
        d0 = math.log10(self.t_min)
        d1 = math.log10(self.t_max)
        n = max(1, round((d1 - d0) * self.points_per_decade))
        return LN10 * np.linspace(d0, d1, n + 1)

    def points(self) -> np.ndarray:
        return np.exp(self.log_points())

    def describe(self) -> dict:
        return {
            "t_min": self.t_min,
            "t_max": self.t_max,
            "points_per_decade": self.points_per_decade,
        }


@dataclass(frozen=True)
class QuadResult:
    value: float
    diverged: bool

    def or_inf(self) -> float:
        return math.inf if self.diverged else self.value


def decay_product(exponent, factor):
    """``exp(exponent) * factor`` with joint-decay handling.

    Where the exponential underflows to zero the product is zero no matter
    how large ``factor`` is (the exponential always wins against slowly
    varying growth); where ``factor`` is exactly zero the product is zero no
    matter the weight.  Everything else, including honest overflow to +inf,
    is passed through.
    """
    exponent = np.asarray(exponent, dtype=float)
    factor = np.asarray(factor, dtype=float)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        e = np.exp(exponent)
        out = e * factor
    out = np.where(e == 0.0, 0.0, out)
    return np.where(factor == 0.0, 0.0, out)


def _panel_edges(lo: float, hi: float, width: float, kinks=()):
    """Panel edges on [lo, hi], snapped to the absolute lattice k*width."""
    pts = [lo, hi]
    k0 = math.floor(lo / width) + 1
    k1 = math.ceil(hi / width) - 1
    if k1 >= k0:
        pts.extend(k * width for k in range(k0, k1 + 1))
    pts.extend(k for k in kinks if lo < k < hi)
    pts.sort()
    tol = width * 1e-9
    out = [pts[0]]
    for p in pts[1:]:
        if p - out[-1] > tol:
            out.append(p)
    out[0], out[-1] = lo, hi
    return out


def _gl_nodes(edges):
    e = np.asarray(edges, dtype=float)
    half = 0.5 * (e[1:] - e[:-1])
    mid = 0.5 * (e[1:] + e[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_X).ravel()
    weights = (half[:, None] * _GL_W).ravel()
    return nodes, weights


def _direct_part(fn, lo, hi, width, kinks):
    if hi - lo < 1e-15:
        return 0.0, False
    nodes, weights = _gl_nodes(_panel_edges(lo, hi, width, kinks))
    vals = np.asarray(fn(nodes), dtype=float)
    bad = not bool(np.all(np.isfinite(vals)))
    if bad:
        vals = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
    return float(np.dot(weights, vals)), bad


def _far_region(fn, u_min, u_max, sign, width, ukinks=(), unbounded=False):
    """Integrate fn over x = sign*u, u in [u_min, min(u_max, DEEP)], y = ln u.

    Returns (value, last_doubling_increment, tail_estimate, diverged_flag);
    the increment, tail estimate and divergence checks apply only when the
    region is ``unbounded`` (the true bound lies at or beyond DEEP).
    """
    u_top = min(u_max, DEEP_LOG_RANGE)
    part = 0.0
    inc = 0.0
    flag = False
    if u_top > u_min:
        ykinks = [math.log(u) for u in ukinks if u_min < u < u_top]
        edges = _panel_edges(math.log(u_min), math.log(u_top), width, ykinks)
        ynodes, yweights = _gl_nodes(edges)
        u = np.exp(ynodes)
        vals = np.asarray(fn(sign * u), dtype=float)
        flag = not bool(np.all(np.isfinite(vals)))
        if flag:
            vals = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
        contrib = yweights * u * vals
        part = float(np.sum(contrib))
        if unbounded and u_min < u_top / 4.0:
            inc = float(np.sum(contrib[u > u_top / 2.0]))
    if not unbounded:
        return part, 0.0, 0.0, flag

    # log-power fit of the boundary decay; also the divergence detector
    u_ref = max(DEEP_LOG_RANGE, 2.0 * u_min)
    probe = np.array([u_ref, u_ref / 2.0])
    g = np.asarray(fn(sign * probe), dtype=float)
    g1, g2 = float(g[0]), float(g[1])
    tail = 0.0
    if not (math.isfinite(g1) and math.isfinite(g2)):
        flag = True
    elif g1 > _TINY_POS:
        if g2 <= _TINY_POS:
            flag = True
        else:
            p = math.log(g1 / g2) / math.log(2.0)
            if p < -1.0 - _SLOPE_MARGIN:
                tail = g1 * u_ref / (-1.0 - p)
            else:
                flag = True
    return part, inc, tail, flag


def integral_log(fn, x_lo=-math.inf, x_hi=math.inf, *, ppd=DEFAULT_PPD, kinks=()):
    """``∫ fn(x) dx`` over [x_lo, x_hi]; either bound may be infinite.

    ``fn`` must be vectorized over x and nonnegative; ``kinks`` lists known
    non-smooth points (they become panel boundaries).  The direct panels
    cover [-SWITCH, SWITCH]; everything farther out goes through the y = ln|x|
    substitution, so bounds of arbitrary magnitude stay cheap.  Bounds at or
    beyond DEEP_LOG_RANGE are treated as infinite (tail-estimated).
    """
    if not x_hi > x_lo:
        return QuadResult(0.0, False)
    width = LN10 / max(1, round(ppd / GL_ORDER))

    total = 0.0
    diverged = False
    a = max(x_lo, -SWITCH)
    b = min(x_hi, SWITCH)
    if b > a:
        part, bad = _direct_part(fn, a, b, width, kinks)
        total += part
        diverged |= bad

    regions = []
    if x_lo < -SWITCH:
        u_min = max(SWITCH, -x_hi)
        regions.append(_far_region(
            fn, u_min, -x_lo, -1.0, width,
            [-k for k in kinks if x_lo < k < -u_min],
            unbounded=-x_lo >= DEEP_LOG_RANGE))
    if x_hi > SWITCH:
        u_min = max(SWITCH, x_lo)
        regions.append(_far_region(
            fn, u_min, x_hi, 1.0, width,
            [k for k in kinks if u_min < k < x_hi],
            unbounded=x_hi >= DEEP_LOG_RANGE))

    for part, _inc, _tail, flag in regions:
        total += part
        diverged |= flag
    tails = 0.0
    for _part, inc, tail, _flag in regions:
        if inc > DIVERGENCE_REL * abs(total) + _ABS_FLOOR:
            diverged = True
        tails += tail
    return QuadResult(total + tails, diverged)


def _refine_max(fn, lo, hi, iters=80):
    """Ternary search for the max of fn on [lo, hi] (locally unimodal)."""
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        v = np.asarray(fn(np.array([m1, m2])), dtype=float)
        if v[0] < v[1]:
            lo = m1
        else:
            hi = m2
    mid = 0.5 * (lo + hi)
    return float(np.asarray(fn(np.array([mid])), dtype=float)[0])


def sup_log(fn, x_lo=-math.inf, x_hi=math.inf, *, ppd=DEFAULT_PPD, anchors=(),
            max_rounds=3):
    """Supremum of fn over [x_lo, x_hi] in x = ln t coordinates.

    Infinite bounds are probed over successively wider windows; a supremum
    that keeps growing after ``max_rounds`` extensions is flagged divergent.
    Exact anchor points (kinks, truncation points) are always sampled, and
    the discrete argmax is polished by a local ternary search.
    """
    step = LN10 / max(1, ppd)
    lo_inf = not math.isfinite(x_lo)
    hi_inf = not math.isfinite(x_hi)
    finite_refs = [a for a in anchors if math.isfinite(a)]
    if not lo_inf:
        finite_refs.append(x_lo)
    if not hi_inf:
        finite_refs.append(x_hi)
    center = 0.0 if not finite_refs else min(finite_refs + [0.0])
    center_hi = 0.0 if not finite_refs else max(finite_refs + [0.0])
    window = 46.0  # 20 decades

    best = -math.inf
    diverged = False
    rounds = max_rounds if (lo_inf or hi_inf) else 0
    grew_last = False
    xs = None
    for r in range(rounds + 1):
        lo = (center - window * (r + 1)) if lo_inf else x_lo
        hi = (center_hi + window * (r + 1)) if hi_inf else x_hi
        xs = np.arange(lo, hi, step)
        xs = np.append(xs, hi)
        extra = [a for a in anchors if lo <= a <= hi]
        if extra:
            xs = np.sort(np.concatenate([xs, np.asarray(extra, dtype=float)]))
        vals = np.asarray(fn(xs), dtype=float)
        if not np.all(np.isfinite(vals)):
            diverged = True
            vals = np.nan_to_num(vals, nan=-math.inf, posinf=-math.inf)
        m = float(np.max(vals)) if vals.size else -math.inf
        grew_last = m > best * (1.0 + 1e-12) + _TINY_POS if best > 0 else m > best
        if not grew_last and r > 0:
            break
        if m > best:
            best = m
            best_xs, best_vals = xs, vals
    if (lo_inf or hi_inf) and grew_last:
        diverged = True
    if best > 0 and math.isfinite(best):
        i = int(np.argmax(best_vals))
        lo_b = best_xs[max(i - 1, 0)]
        hi_b = best_xs[min(i + 1, len(best_xs) - 1)]
        if hi_b > lo_b:
            best = max(best, _refine_max(fn, lo_b, hi_b))
    return QuadResult(best if best > -math.inf else 0.0, diverged)
