"""Embedded adaptive Runge-Kutta integrator (Dormand-Prince 5(4)).

One fixed scheme, PI-free elementary step control, and dense output by
cubic Hermite interpolation on the accepted steps. Termination is always
structured: reached-end, a caller-supplied singularity predicate, or
step-size collapse below 1e-12 of the integration span. No NaN is ever
propagated silently.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

# Dormand-Prince tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_C = (0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1)
_B5 = (35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0)
_B4 = (5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)

STEP_COLLAPSE_FRACTION = 1e-12

REACHED_END = "reached-end"
SINGULARITY = "singularity"
STEP_COLLAPSE = "step-collapse"


@dataclass
class RKResult:
    xs: np.ndarray
    ys: np.ndarray  # shape (n_samples, dim)
    fs: np.ndarray  # derivatives at samples, same shape
    steps: np.ndarray  # accepted step sizes (len n_samples - 1)
    errors: np.ndarray  # local error estimates per accepted step
    termination: str
    termination_location: float | None = None
    termination_detail: str = ""

    def hermite(self, x):
        """Dense output: cubic Hermite on the accepted step containing x."""
        xs = self.xs
        if not (xs[0] <= x <= xs[-1]) and not (xs[-1] <= x <= xs[0]):
            raise ValueError(f"x={x} outside integrated range [{xs[0]}, {xs[-1]}]")
        i = min(max(bisect.bisect_right(xs, x) - 1, 0), len(xs) - 2)
        h = xs[i + 1] - xs[i]
        t = (x - xs[i]) / h
        y0, y1 = self.ys[i], self.ys[i + 1]
        f0, f1 = self.fs[i], self.fs[i + 1]
        h00 = (1 + 2 * t) * (1 - t) ** 2
        h10 = t * (1 - t) ** 2
        h01 = t * t * (3 - 2 * t)
        h11 = t * t * (t - 1)
        return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1

    def hermite_derivative(self, x):
        xs = self.xs
        i = min(max(bisect.bisect_right(xs, x) - 1, 0), len(xs) - 2)
        h = xs[i + 1] - xs[i]
        t = (x - xs[i]) / h
        y0, y1 = self.ys[i], self.ys[i + 1]
        f0, f1 = self.fs[i], self.fs[i + 1]
        d00 = 6 * t * (t - 1) / h
        d10 = (1 - t) * (1 - 3 * t)
        d01 = -6 * t * (t - 1) / h
        d11 = t * (3 * t - 2)
        return d00 * y0 + d10 * f0 + d01 * y1 + d11 * f1


def integrate(f, x0: float, y0, x_end: float, tol: float, singular=None, first_step=None) -> RKResult:
    """Integrate y' = f(x, y) from x0 to x_end.

    tol is used as both absolute and relative tolerance in the standard
    mixed error norm. `singular(x, y)` may return a reason string to stop
    integration at the current point.
    """
    y = np.asarray(y0, dtype=float)
    span = abs(x_end - x0)
    if span == 0:
        raise ValueError("empty integration interval")
    direction = 1.0 if x_end > x0 else -1.0
    x = float(x0)
    k0 = np.asarray(f(x, y), dtype=float)
    h = first_step if first_step is not None else min(span / 100.0, 1e-2)
    h *= direction

    xs = [x]
    ys = [y.copy()]
    fs = [k0.copy()]
    steps: list = []
    errors: list = []
    termination = REACHED_END
    loc = None
    detail = ""

    while (x_end - x) * direction > 0:
        if abs(h) < STEP_COLLAPSE_FRACTION * span:
            termination = STEP_COLLAPSE
            loc = x
            detail = f"step size {abs(h):.3e} below collapse threshold"
            break
        if (x + h - x_end) * direction > 0:
            h = x_end - x
        ks = [k0]
        failed = False
        for s in range(1, 7):
            ya = y + h * sum(a * k for a, k in zip(_A[s], ks))
            if not np.all(np.isfinite(ya)):
                failed = True
                break
            ks.append(np.asarray(f(x + _C[s] * h, ya), dtype=float))
            if not np.all(np.isfinite(ks[-1])):
                failed = True
                break
        if failed:
            h *= 0.5
            continue
        y5 = y + h * sum(b * k for b, k in zip(_B5, ks))
        y4 = y + h * sum(b * k for b, k in zip(_B4, ks))
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            x += h
            y = y5
            k0 = ks[6]  # FSAL
            xs.append(x)
            ys.append(y.copy())
            fs.append(k0.copy())
            steps.append(abs(h))
            errors.append(err * tol)
            if singular is not None:
                reason = singular(x, y)
                if reason:
                    termination = SINGULARITY
                    loc = x
                    detail = reason
                    break
        factor = 0.9 * (max(err, 1e-16)) ** (-0.2)
        h *= min(5.0, max(0.2, factor))

    return RKResult(
        np.array(xs),
        np.array(ys),
        np.array(fs),
        np.array(steps),
        np.array(errors),
        termination,
        loc,
        detail,
    )
