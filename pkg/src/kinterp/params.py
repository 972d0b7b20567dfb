"""Weighted-Lq(dt/t) interpolation parameters and their norms.

A parameter is the monotone quasi-norm

    ||g|| = ( ∫_0^∞ [t^{-theta} b(t) |g(t)|]^q dt/t )^{1/q},

with the usual sup modification at q = ∞, for theta in [0, 1], q in (0, ∞]
and b slowly varying.  Throughout, norms of the canonical test functions are
factored as an exact power of t times a slowly varying factor,

    ||u χ_(0,t)||        = t^{1-theta} * H(ln t)
    ||χ_(t,∞)||          = t^{-theta}  * T(ln t)
    ||min(u, t)||        = t^{1-theta} * M(ln t)

with H, T, M computed by shifted quadrature that stays finite for |ln t| far
beyond the representable range of t — the nested condition checks probe that
deep.  At the endpoints the min-norm uses its dominated representative form
(M = T at theta = 0, M = H at theta = 1), which matches the full norm up to
a constant controlled by slow variation and makes the canonical weight take
its endpoint-ratio shape exactly.  The full two-sided quadrature remains
available through ``norm_head_u``/``norm_tail_char``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .couples import KProfile
from .errors import MembershipError
from .quadrature import (LogGrid, QuadResult, decay_product,
                         integral_log, sup_log)
from .sv import (Constant, SVDescriptor, eval_sv_log, shift_integral,
                 sv_from_json, sv_to_json)

_NORM_GRID = LogGrid(1e-8, 1e8, 64)


@dataclass(frozen=True)
class PhiParam:
    """One K-interpolation parameter: exponent, integrability, SV weight."""

    theta: float
    q: float
    b: SVDescriptor = Constant(1.0)
    grid_policy: LogGrid = field(default=_NORM_GRID)

    def __post_init__(self):
        if not (0.0 <= self.theta <= 1.0):
            raise ValueError("theta must lie in [0, 1]")
        if not (self.q > 0.0):
            raise ValueError("q must lie in (0, inf]")

    @property
    def sup_norm(self) -> bool:
        return math.isinf(self.q)

    @property
    def ppd(self) -> int:
        return self.grid_policy.points_per_decade


def head_factor(p: PhiParam, x: float) -> float:
    """H(x) with ||u χ_(0,t)|| = t^{1-theta} H(ln t); +inf on divergence."""
    c = (1.0 - p.theta)
    if p.sup_norm:
        def fn(v):
            return decay_product(c * v, eval_sv_log(p.b, x + v))
        r = sup_log(fn, -math.inf, 0.0, ppd=p.ppd, anchors=(-x, 0.0))
        return math.inf if r.diverged else r.value
    r = shift_integral(p.b, p.q, x, c * p.q, "head", p.ppd)
    return math.inf if r.diverged else r.value ** (1.0 / p.q)


def tail_factor(p: PhiParam, x: float) -> float:
    """T(x) with ||χ_(t,∞)|| = t^{-theta} T(ln t); +inf on divergence."""
    c = -p.theta
    if p.sup_norm:
        def fn(v):
            return decay_product(c * v, eval_sv_log(p.b, x + v))
        r = sup_log(fn, 0.0, math.inf, ppd=p.ppd, anchors=(-x, 0.0))
        return math.inf if r.diverged else r.value
    r = shift_integral(p.b, p.q, x, c * p.q, "tail", p.ppd)
    return math.inf if r.diverged else r.value ** (1.0 / p.q)


def _closed_min_factor(p: PhiParam):
    """Exact M for constant b, finite q, 0 < theta < 1."""
    if (isinstance(p.b, Constant) and not p.sup_norm
            and 0.0 < p.theta < 1.0):
        return p.b.c * (1.0 / ((1.0 - p.theta) * p.q)
                        + 1.0 / (p.theta * p.q)) ** (1.0 / p.q)
    return None


def min_factor(p: PhiParam, x: float, *, method: str = "auto") -> float:
    """M(x) with ||min(u, t)|| = t^{1-theta} M(ln t).

    At theta = 0 this is the tail-dominated representative T, at theta = 1
    the head-dominated H; for 0 < theta < 1 it combines both sides, using
    the closed form when b is constant and q finite (method="quadrature"
    forces the quadrature path for cross-checks).
    """
    if p.theta == 0.0:
        return tail_factor(p, x)
    if p.theta == 1.0:
        return head_factor(p, x)
    if method == "auto":
        closed = _closed_min_factor(p)
        if closed is not None:
            return closed
    h = head_factor(p, x)
    t = tail_factor(p, x)
    if math.isinf(h) or math.isinf(t):
        return math.inf
    if p.sup_norm:
        return max(h, t)
    return (h ** p.q + t ** p.q) ** (1.0 / p.q)


_membership_cache: dict = {}


def membership_min1(p: PhiParam) -> bool:
    """True iff t ↦ min(1, t) has a finite norm under p."""
    v = _membership_cache.get(p)
    if v is None:
        v = math.isfinite(head_factor(p, 0.0)) and math.isfinite(tail_factor(p, 0.0))
        _membership_cache[p] = v
    return v


def require_membership(p: PhiParam):
    if not membership_min1(p):
        raise MembershipError(
            f"min(1, t) has infinite norm for theta={p.theta}, q={p.q}")


def norm_head_u(p: PhiParam, t: float) -> float:
    """||u χ_(0,t)(u)||; +inf on divergence."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = math.log(t)
    return math.exp((1.0 - p.theta) * x) * head_factor(p, x)


def norm_tail_char(p: PhiParam, t: float) -> float:
    """||χ_(t,∞)||; +inf on divergence."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = math.log(t)
    return math.exp(-p.theta * x) * tail_factor(p, x)


def norm_min(p: PhiParam, t: float, *, method: str = "auto") -> float:
    """||min(u, t)||; requires min(1, u) to be a member of the space."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    require_membership(p)
    x = math.log(t)
    return math.exp((1.0 - p.theta) * x) * min_factor(p, x, method=method)


def phi_norm(p: PhiParam, g, support=(0.0, math.inf)) -> float:
    """Quasi-norm of a nonnegative function given as a vectorized callable of t.

    ``g`` is evaluated on quadrature nodes and must tolerate the limit
    arguments t == 0.0 and t == inf, which appear when nodes probe far
    outside double range.  Returns +inf when divergence is detected;
    divergence is a value here, not an exception.
    """
    lo, hi = support
    if not (0.0 <= lo < hi):
        raise ValueError("support must be a nonempty subinterval of (0, inf)")
    x_lo = math.log(lo) if lo > 0.0 else -math.inf
    x_hi = math.log(hi) if math.isfinite(hi) else math.inf
    theta, q = p.theta, p.q

    def raw(x):
        with np.errstate(over="ignore", under="ignore"):
            u = np.exp(np.asarray(x, dtype=float))
        gv = np.asarray(g(u), dtype=float)
        bv = eval_sv_log(p.b, x)
        return gv, bv

    if p.sup_norm:
        def fn(x):
            gv, bv = raw(x)
            return decay_product(-theta * np.asarray(x, dtype=float), bv * gv)
        return sup_log(fn, x_lo, x_hi, ppd=p.ppd, anchors=(0.0,)).or_inf()

    def fn(x):
        gv, bv = raw(x)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            core = (bv * gv) ** q
        core = np.where(gv == 0.0, 0.0, core)
        return decay_product(-theta * q * np.asarray(x, dtype=float), core)

    r = integral_log(fn, x_lo, x_hi, ppd=p.ppd, kinks=(0.0,))
    return r.or_inf() ** (1.0 / q)


def _integrand_slope_form(p, profile):
    # [u^{-theta} b K]^q du/u as e^{(1-theta)q x} (b * K/u)^q dx: the slope
    # form, stable toward u -> 0 where K/u tends to a constant
    theta, q = p.theta, p.q

    def fn(x):
        x = np.asarray(x, dtype=float)
        core = eval_sv_log(p.b, x) * np.asarray(profile.slope_log(x), float)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            cq = core ** q
        cq = np.where(core == 0.0, 0.0, cq)
        return decay_product((1.0 - theta) * q * x, cq)
    return fn


def _integrand_value_form(p, profile):
    # e^{-theta q x} (b * K)^q dx: stable toward u -> inf where K saturates
    theta, q = p.theta, p.q

    def fn(x):
        x = np.asarray(x, dtype=float)
        core = eval_sv_log(p.b, x) * np.asarray(profile.value_log(x), float)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            cq = core ** q
        cq = np.where(core == 0.0, 0.0, cq)
        return decay_product(-theta * q * x, cq)
    return fn


def trunc_profile_pow(p: PhiParam, profile: KProfile, side: str, t: float):
    """Raw q-th power of the truncated norm (QuadResult); finite q only."""
    x_t = math.log(t)
    kinks = tuple(profile.log_kinks()) + (0.0,)
    if side == "head":
        mid = min(x_t, 0.0)
        r1 = integral_log(_integrand_slope_form(p, profile), -math.inf, mid,
                          ppd=p.ppd, kinks=kinks)
        r2 = integral_log(_integrand_value_form(p, profile), mid, x_t,
                          ppd=p.ppd, kinks=kinks)
        return QuadResult(r1.value + r2.value, r1.diverged or r2.diverged)
    if side == "tail":
        return integral_log(_integrand_value_form(p, profile), x_t, math.inf,
                            ppd=p.ppd, kinks=kinks)
    raise ValueError("side must be 'head' or 'tail'")


def norm_trunc_profile(p: PhiParam, profile: KProfile, side: str,
                       t: float) -> float:
    """Truncated norm of a K-profile: ||χ_(0,t) K||  or  ||χ_(t,∞) K||."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    if p.sup_norm:
        x_t = math.log(t)
        anchors = tuple(profile.log_kinks()) + (0.0, x_t)
        if side == "head":
            def fn(x):
                x = np.asarray(x, dtype=float)
                core = eval_sv_log(p.b, x) * np.asarray(profile.slope_log(x), float)
                return decay_product((1.0 - p.theta) * x, core)
            r = sup_log(fn, -math.inf, x_t, ppd=p.ppd, anchors=anchors)
        elif side == "tail":
            def fn(x):
                x = np.asarray(x, dtype=float)
                core = eval_sv_log(p.b, x) * np.asarray(profile.value_log(x), float)
                return decay_product(-p.theta * x, core)
            r = sup_log(fn, x_t, math.inf, ppd=p.ppd, anchors=anchors)
        else:
            raise ValueError("side must be 'head' or 'tail'")
        return r.or_inf()
    r = trunc_profile_pow(p, profile, side, t)
    return math.inf if r.diverged else r.value ** (1.0 / p.q)


def full_norm_profile(p: PhiParam, profile: KProfile) -> float:
    """||K(·, f)|| over all of (0, ∞); +inf on divergence."""
    if p.sup_norm:
        h = norm_trunc_profile(p, profile, "head", 1.0)
        t = norm_trunc_profile(p, profile, "tail", 1.0)
        return max(h, t)
    rh = trunc_profile_pow(p, profile, "head", 1.0)
    rt = trunc_profile_pow(p, profile, "tail", 1.0)
    if rh.diverged or rt.diverged:
        return math.inf
    return (rh.value + rt.value) ** (1.0 / p.q)


def phi_to_json(p: PhiParam) -> dict:
    return {"theta": p.theta,
            "q": "inf" if p.sup_norm else p.q,
            "b": sv_to_json(p.b)}


def phi_from_json(obj: dict, path: str = "phi") -> PhiParam:
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected an object")
    try:
        qraw = obj["q"]
        q = math.inf if qraw in ("inf", "Infinity") else float(qraw)
        return PhiParam(theta=float(obj["theta"]), q=q,
                        b=sv_from_json(obj["b"], path + ".b"))
    except KeyError as exc:
        raise ValueError(f"{path}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from exc
