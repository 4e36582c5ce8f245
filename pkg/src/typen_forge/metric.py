"""Metric reconstruction on coordinate grids.

Assembles the metric data of the twisting type N family in coordinates
(x, z, u, r) from a solution J(z) of the third-order reduction:

    g = J'/(2 cos^2(r/2)) [ dzeta dzetabar
        + lambda (dr + W dzeta + Wbar dzetabar + H lambda) ]

with W = (1/2)(P'/2 + Lam J + i C1)(e^{-ir} + 1), H = -(1/6) Lam P cos r,
and lambda = (e^{C1 x} du - 2 [int E dz] dx)/E where E = exp(int F2 dz).
The two inner quadrature constants are free and exposed as arguments; both
default to zero at the lower grid edge.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from scipy.integrate import quad

from .numeric_ode import K_of_solution, PhysicalityError

COS_HALF_R_FLOOR = 1e-9


@dataclass
class MetricSample:
    x: float
    z: float
    u: float
    r: float
    p: float
    c: complex
    W: complex
    H: float
    lambda_du: float
    lambda_dx: float
    psi4_factor: complex

    def row(self) -> list:
        from .serialize import float_str

        return [
            float_str(v)
            for v in (
                self.x,
                self.z,
                self.u,
                self.r,
                self.p,
                self.c.real,
                self.c.imag,
                self.W.real,
                self.W.imag,
                self.H,
                self.lambda_du,
                self.lambda_dx,
                self.psi4_factor.real,
                self.psi4_factor.imag,
            )
        ]


METRIC_COLUMNS = "x,z,u,r,p,c_re,c_im,W_re,W_im,H,lambda_du,lambda_dx,psi4_re,psi4_im"


def thread_count() -> int:
    raw = os.environ.get("TYPEN_FORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"TYPEN_FORGE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def parse_grid(text: str) -> list:
    """Coordinate grid: one (x, z, u, r) tuple per line, whitespace
    separated, '#' comments."""
    grid = []
    for ln, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 4:
            raise ValueError(f"grid line {ln}: expected 4 coordinates, got {len(parts)}")
        grid.append(tuple(float(p) for p in parts))
    return grid


def reconstruct_metric(spec, grid, c_inner: float = 0.0, c_outer: float = 0.0) -> list:
    """Metric samples for a SolutionSpec on a grid of (x, z, u, r) tuples.

    c_inner and c_outer are the additive constants of the two nested
    quadratures in lambda, applied at the lowest z of the grid."""
    if not grid:
        return []
    lam, C1 = spec.lam, spec.C1

    def F2(z):
        J, Jp, Jpp = spec.data(z)
        return Jpp / (2.0 * Jp) - lam * J

    z_sorted = sorted({g[1] for g in grid})
    z_base = z_sorted[0]
    # cumulative nested quadratures over the sorted z ladder
    inner = {}
    outer = {}
    acc_i = c_inner
    acc_o = c_outer
    prev = z_base
    for z in z_sorted:
        if z != prev:
            acc_i += quad(F2, prev, z, epsabs=1e-12, limit=200)[0]
        inner[z] = acc_i
        prev = z

    def E_of(z):
        if z in inner:
            return math.exp(inner[z])
        lo = max(v for v in z_sorted if v <= z)
        return math.exp(inner[lo] + quad(F2, lo, z, epsabs=1e-12, limit=200)[0])

    prev = z_base
    for z in z_sorted:
        if z != prev:
            acc_o += quad(E_of, prev, z, epsabs=1e-12, limit=200)[0]
        outer[z] = acc_o
        prev = z

    def sample(pt):
        x, z, u, r = pt
        J, Jp, Jpp = spec.data(z)
        if not Jp > 0:
            raise PhysicalityError(f"J' = {Jp} <= 0 at z = {z}")
        half = math.cos(r / 2.0)
        if abs(half) < COS_HALF_R_FLOOR:
            raise ValueError(f"grid point at r = {r}: metric pole at cos(r/2) = 0")
        P = Jp
        Pp = Jpp / Jp
        f2 = Pp / 2.0 - lam * J
        p = math.sqrt(Jp) / 2.0
        c = (1j * f2 + C1) / 2.0
        W = 0.5 * (Pp / 2.0 + lam * J + 1j * C1) * (cmath.exp(-1j * r) + 1.0)
        H = -lam * P * math.cos(r) / 6.0
        E = math.exp(inner[z])
        lam_du = math.exp(C1 * x) / E
        lam_dx = -2.0 * outer[z] / E
        K = K_of_solution(J, Jp, Jpp, lam, C1)
        psi4 = -lam * K * cmath.exp(-0.5j * r) * half**3 / (3.0 * Jp)
        return MetricSample(x, z, u, r, p, c, W, H, lam_du, lam_dx, psi4)

    n = thread_count()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(sample, grid))
    return [sample(pt) for pt in grid]


def metric_csv(samples, spec, path=None) -> str:
    from .serialize import SCHEMA_VERSION, float_str

    lines = [
        f"# schema={SCHEMA_VERSION} solution={spec.name} lam={float_str(spec.lam)} C1={float_str(spec.C1)}",
        METRIC_COLUMNS,
    ]
    for s in samples:
        lines.append(",".join(s.row()))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
