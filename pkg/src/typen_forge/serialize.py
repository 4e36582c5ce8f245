"""Deterministic JSON/CSV formatting shared by all exporters.

Rationals are written as exact "p/q" strings, never floats; floats are
written with 17 significant digits so identical inputs give byte-identical
output. Every JSON document carries a schema version.
"""

from __future__ import annotations

import json
from fractions import Fraction

SCHEMA_VERSION = "typen-forge/1"


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def frac_from_str(s: str) -> Fraction:
    return Fraction(s)


def float_str(x: float) -> str:
    return format(float(x), ".17g")


def complex_pair(z: complex) -> list[str]:
    z = complex(z)
    return [float_str(z.real), float_str(z.imag)]


def exponent_str(num: int, den: int) -> str:
    return f"{num}/{den}" if den != 1 else str(num)


def to_json(payload: dict, path=None) -> str:
    doc = {"schema": SCHEMA_VERSION}
    doc.update(payload)
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def trajectory_csv(traj, path=None) -> str:
    """CSV export with the frozen header `# ode=<id> params=<...> tol=<...>`."""
    lines = [f"# ode={traj.ode_id} params={traj.params_str()} tol={float_str(traj.tol)}"]
    lines.append("x,y,yp,residual")
    for i in range(len(traj.x)):
        lines.append(
            ",".join(
                [
                    float_str(traj.x[i]),
                    float_str(traj.y[i]),
                    float_str(traj.yp[i]),
                    float_str(traj.residual[i]),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
