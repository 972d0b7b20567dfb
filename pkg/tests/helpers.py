"""Independent numerical oracles used to freeze expected test values.

Everything here deliberately avoids the package's quadrature engine:
composite Simpson on a uniform log grid, plus direct scans.  Windows for
improper integrals are chosen per call site with a hand-bounded tail.
"""

import numpy as np


def simpson_log(fn, x_lo, x_hi, n=40001):
    """Composite Simpson for ∫ fn(x) dx on a finite window (n odd)."""
    if n % 2 == 0:
        n += 1
    xs = np.linspace(x_lo, x_hi, n)
    ys = np.asarray(fn(xs), dtype=float)
    h = xs[1] - xs[0]
    return h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum()
                      + 2.0 * ys[2:-1:2].sum())


def ratio_bracket(values_a, values_b):
    """(inf, sup) of values_a / values_b over a grid."""
    r = np.asarray(values_a, dtype=float) / np.asarray(values_b, dtype=float)
    return float(np.min(r)), float(np.max(r))


def is_monotone(values, direction, rel_tol=1e-12):
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    scale = np.maximum(np.abs(v[1:]), np.abs(v[:-1]))
    if direction == "nondecreasing":
        return bool(np.all(d >= -rel_tol * scale))
    if direction == "nonincreasing":
        return bool(np.all(d <= rel_tol * scale))
    raise ValueError(direction)
