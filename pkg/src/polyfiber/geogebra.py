"""GeoGebra command scripts for the lifted curves.

Quadratics get the two parametric ``Curve[...]`` commands (plus coefficient
sliders in the general case); other degrees fall back to sampled
``Polyline[...]`` commands, one per lifted branch.
"""

from __future__ import annotations

import math

from .locus import lift_branches, sweep_locus
from .polynomial import RealPolynomial, expand_real_imag, format_number


def _signed_const(c: float) -> str:
    if c > 0.0:
        return f" + {format_number(c)}"
    if c < 0.0:
        return f" - {format_number(-c)}"
    return ""


def to_geogebra(
    f: RealPolynomial, t_min: float, t_max: float, samples: int = 129
) -> list[str]:
    """Command strings drawing the restricted-domain graph of f.

    For x^2 + c shaped quadratics the two closed-form curves are emitted
    directly; general quadratics get sliders a, b, c and the slider-driven
    curve templates with the current values set. ``t_min``/``t_max`` fill the
    parameter range slots.
    """
    if not (math.isfinite(t_min) and math.isfinite(t_max) and t_min < t_max):
        raise ValueError("need t_min < t_max")
    p0, p1 = format_number(t_min), format_number(t_max)
    if f.degree == 2:
        a, b, c = f.coeffs[2], f.coeffs[1], f.coeffs[0]
        if a == 1.0 and b == 0.0:
            const = _signed_const(c)
            return [
                f"Curve[t, 0, t^2{const}, t, {p0}, {p1}]",
                f"Curve[0, t, -t^2{const}, t, {p0}, {p1}]",
            ]
        commands = []
        named = (("a", a), ("b", b), ("c", c))
        for name, val in named:
            lo = min(-5.0, math.floor(val))
            hi = max(5.0, math.ceil(val))
            commands.append(
                f"{name} = Slider[{format_number(lo)}, {format_number(hi)}, 0.1]"
            )
        for name, val in named:
            commands.append(f"SetValue[{name}, {format_number(val)}]")
        commands.append(f"Curve[t, 0, a*t^2 + b*t + c, t, {p0}, {p1}]")
        commands.append(
            "Curve[-b/(2*a), t, a*(-b/(2*a))^2 - a*t^2 + b*(-b/(2*a))+c, t, "
            f"{p0}, {p1}]"
        )
        return commands
    p, _ = expand_real_imag(f)
    curves = lift_branches(sweep_locus(f, t_min, t_max, samples), p)
    out = []
    for curve in curves:
        pts = ", ".join(
            f"({format_number(x)}, {format_number(y)}, {format_number(z)})"
            for x, y, z in curve.points
        )
        out.append(f"Polyline[{pts}]")
    return out
