"""Tracing the restricted domain: the locus Q(x, y) = 0 where f(x + iy) is real.

The locus always contains the real axis. Off-axis components come from the
nonnegative roots u of the reduced polynomial R(x, u) (u standing for y^2),
and whole vertical lines appear at abscissas where R(x0, u) vanishes for
every u. Branches are sampled over an x-grid, stitched by continuity in u,
and their endpoints refined by bisection.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from statistics import median

import numpy as np

from .polynomial import (
    BivariatePoly,
    DegreeError,
    RealPolynomial,
    ReducedImagPoly,
    reduce_imag,
)

LOCUS_TOL = 1e-8        # relative residual bound for emitted locus points
CLASS_TOL = 1e-9        # slope tolerance for the cubic categories
REFINE_TOL = 1e-12      # x-width target of endpoint bisection
FULL_LINE_TOL = 1e-10   # vanishing threshold for full-vertical-line detection
_IMAG_TOL = 1e-7        # imaginary slack for calling a u-root real
_MAX_BISECT = 64


class BranchKind(str, Enum):
    REAL_AXIS = "real_axis"
    OFF_AXIS = "off_axis"
    VERTICAL_LINE = "vertical_line"


class SlopeCategory(str, Enum):
    NEGATIVE_SLOPE = "NegativeSlope"
    ZERO_SLOPE = "ZeroSlope"
    POSITIVE_SLOPE = "PositiveSlope"


class FullLine:
    """Marker: R(x0, .) vanished identically, the whole vertical line is locus."""

    _instance = None

    def __new__(cls) -> "FullLine":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FullLine"


FULL_LINE = FullLine()


@dataclass(frozen=True)
class LocusBranch:
    """One sampled component of the restricted domain.

    Off-axis branches store only y > 0 samples; ``mirror`` marks that the
    y -> -y twin is implied rather than stored.
    """

    kind: BranchKind
    points: tuple[tuple[float, float], ...]
    mirror: bool = False


@dataclass(frozen=True)
class SpaceCurve:
    """A locus branch lifted to 3D: z is the (real) output value at (x, y)."""

    points: tuple[tuple[float, float, float], ...]
    source_kind: BranchKind
    mirrored: bool = False


@dataclass(frozen=True)
class CubicClassification:
    category: SlopeCategory
    inflection_x: float
    inflection_slope: float


def solve_offaxis_at(
    R: ReducedImagPoly, x: float, tol: float = LOCUS_TOL
) -> "list[float] | FullLine":
    """Nonnegative y with (x, y) on the off-axis locus, or FULL_LINE.

    Returns sqrt(u) for every real root u >= -tol of the section R(x, .),
    clamping small negatives to zero. FULL_LINE is returned when all section
    coefficients vanish below the detection threshold.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    c = R.u_coeffs_at(float(x))
    thr = FULL_LINE_TOL * (1.0 + float(np.abs(R.coeff).max()))
    if float(np.abs(c).max()) <= thr:
        return FULL_LINE
    out: list[float] = []
    for u in _accepted_us(R, float(x), c, tol):
        out.append(math.sqrt(u))
    return out


def _accepted_us(
    R: ReducedImagPoly, x: float, section: np.ndarray, tol: float
) -> list[float]:
    """Clamped, residual-filtered u-roots of one section, ascending."""
    roots = _section_real_roots(section)
    kept: list[float] = []
    for u in roots:
        if u < -tol:
            continue
        uc = max(float(u), 0.0)
        if uc > 0.0:
            scale = float(R.magnitude_at(x, uc))
            val = abs(float(R(x, uc)))
            if scale > 0.0 and val > tol * scale:
                continue
        kept.append(uc)
    kept.sort()
    merged: list[float] = []
    for u in kept:
        if merged and u - merged[-1] <= 1e-12 * (1.0 + abs(u)):
            merged[-1] = 0.5 * (merged[-1] + u)
        else:
            merged.append(u)
    return merged


def _section_real_roots(c: np.ndarray) -> np.ndarray:
    """Real roots (unclamped, ascending) of an ascending-coefficient section."""
    mag = float(np.abs(c).max())
    if mag == 0.0:
        return np.empty(0)
    d = len(c) - 1
    while d > 0 and abs(c[d]) <= 1e-13 * mag:
        d -= 1
    if d == 0:
        return np.empty(0)
    if d == 1:
        return np.array([-c[0] / c[1]])
    if d == 2:
        a2, a1, a0 = float(c[2]), float(c[1]), float(c[0])
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc < 0.0:
            re = -a1 / (2.0 * a2)
            spread = math.sqrt(-disc) / (2.0 * abs(a2))
            if spread <= _IMAG_TOL * (1.0 + abs(re)):
                return np.array([re, re])
            return np.empty(0)
        sq = math.sqrt(disc)
        if a1 == 0.0 and sq == 0.0:
            return np.array([0.0, 0.0])
        qq = -(a1 + math.copysign(sq, a1)) / 2.0
        if qq == 0.0:
            r = -a1 / (2.0 * a2)
            return np.array([r, r])
        r1 = qq / a2
        r2 = a0 / qq
        return np.array(sorted((r1, r2)))
    roots = np.roots(c[d::-1] if d == len(c) - 1 else c[: d + 1][::-1])
    real = [
        float(r.real)
        for r in roots
        if abs(r.imag) <= _IMAG_TOL * (1.0 + abs(r.real))
    ]
    real.sort()
    return np.array(real)


def _nearest_real_root(R: ReducedImagPoly, x: float, u_ref: float) -> float | None:
    c = R.u_coeffs_at(x)
    if float(np.abs(c).max()) <= FULL_LINE_TOL * (1.0 + float(np.abs(R.coeff).max())):
        return None
    roots = _section_real_roots(c)
    if len(roots) == 0:
        return None
    idx = int(np.argmin(np.abs(roots - u_ref)))
    return float(roots[idx])


def _bisect_boundary(
    R: ReducedImagPoly,
    x_have: float,
    x_lack: float,
    u_ref: float,
    sign_mode: bool,
) -> tuple[float, float]:
    """Refine the x where a tracked u-root crosses zero (sign_mode) or vanishes.

    ``x_have`` is the side where the root is known; the boundary is bracketed
    between the two abscissas and bisected to REFINE_TOL in x.
    """
    tol_x = REFINE_TOL * max(1.0, abs(x_have), abs(x_lack))
    u_cur = u_ref
    for _ in range(_MAX_BISECT):
        if abs(x_have - x_lack) <= tol_x:
            break
        xm = 0.5 * (x_have + x_lack)
        um = _nearest_real_root(R, xm, u_cur)
        if sign_mode:
            if um is not None and um >= 0.0:
                x_have, u_cur = xm, um
            else:
                x_lack = xm
                if um is not None:
                    u_cur = um
        else:
            if um is not None and abs(um - u_cur) <= 0.25 * (1.0 + abs(u_cur)):
                x_have, u_cur = xm, um
            else:
                x_lack = xm
    if sign_mode:
        return 0.5 * (x_have + x_lack), 0.0
    return x_have, max(u_cur, 0.0)


class _Track:
    """An off-axis branch under construction during the sweep."""

    __slots__ = ("xs", "ys", "us", "steps")

    def __init__(self, x: float, u: float) -> None:
        self.xs = [x]
        self.ys = [math.sqrt(max(u, 0.0))]
        self.us = [u]
        self.steps: deque[float] = deque(maxlen=8)

    def append(self, x: float, u: float) -> None:
        self.steps.append(abs(u - self.us[-1]))
        self.xs.append(x)
        self.ys.append(math.sqrt(max(u, 0.0)))
        self.us.append(u)

    def append_endpoint(self, x: float, y: float) -> None:
        if x > self.xs[-1]:
            self.xs.append(x)
            self.ys.append(y)
            self.us.append(y * y)

    def prepend_endpoint(self, x: float, y: float) -> None:
        if x < self.xs[0]:
            self.xs.insert(0, x)
            self.ys.insert(0, y)
            self.us.insert(0, y * y)

    def jump_cap(self) -> float:
        if len(self.steps) < 3:
            return math.inf
        return 10.0 * median(self.steps) + 0.02 * (1.0 + abs(self.us[-1]))

    def to_branch(self) -> LocusBranch:
        pts = tuple(zip(self.xs, self.ys))
        return LocusBranch(BranchKind.OFF_AXIS, pts, mirror=True)


def _full_line_abscissas(R: ReducedImagPoly, lo: float, hi: float) -> list[float]:
    """Abscissas in [lo, hi] where every u-column of R has a common real zero."""
    cmax = float(np.abs(R.coeff).max())
    thr = FULL_LINE_TOL * (1.0 + cmax)
    columns: list[tuple[int, int, np.ndarray]] = []
    for t in range(R.degree_u + 1):
        col = np.asarray(R.coeff[:, t], dtype=float)
        d = len(col) - 1
        while d >= 0 and abs(col[d]) <= thr:
            d -= 1
        if d >= 0:
            columns.append((d, t, col[: d + 1]))
    if not columns:
        return []
    d, _, pivot = min(columns, key=lambda item: (item[0], -item[1]))
    if d == 0:
        return []
    roots = np.roots(pivot[::-1])
    pad = 1e-9 * (1.0 + abs(lo) + abs(hi))
    cands = sorted(
        {
            float(r.real)
            for r in roots
            if abs(r.imag) <= 1e-8 * (1.0 + abs(r.real))
            and lo - pad <= r.real <= hi + pad
        }
    )
    out: list[float] = []
    for x0 in cands:
        sec = R.u_coeffs_at(x0)
        if float(np.abs(sec).max()) <= thr:
            if not out or x0 - out[-1] > 1e-9 * (1.0 + abs(x0)):
                out.append(x0 + 0.0)
    return out


def sweep_locus(
    f: RealPolynomial,
    x_min: float,
    x_max: float,
    samples: int,
    tol: float = LOCUS_TOL,
) -> list[LocusBranch]:
    """Trace the restricted domain of f over [x_min, x_max].

    Emits the real-axis branch, off-axis branches stitched across the x-grid
    by nearest-neighbor matching in u with bisection-refined endpoints, and
    vertical-line branches at full-line abscissas.
    """
    if not (math.isfinite(x_min) and math.isfinite(x_max) and x_min < x_max):
        raise ValueError("need x_min < x_max")
    samples = int(samples)
    if samples < 16:
        raise ValueError("need at least 16 samples")
    R = reduce_imag(f)
    xs = np.linspace(x_min, x_max, samples)
    grid = tuple(float(x) for x in xs)

    full_xs = _full_line_abscissas(R, x_min, x_max)
    open_tracks: list[_Track] = []
    closed: list[_Track] = []

    def close_track(track: _Track, x_lo: float, x_hi: float) -> None:
        u_ref = track.us[-1]
        far = _nearest_real_root(R, x_hi, u_ref)
        if far is not None and far < 0.0 and u_ref >= 0.0:
            x_star, _ = _bisect_boundary(R, x_lo, x_hi, u_ref, sign_mode=True)
            track.append_endpoint(x_star, 0.0)
        else:
            x_star, u_star = _bisect_boundary(R, x_lo, x_hi, u_ref, sign_mode=False)
            track.append_endpoint(x_star, math.sqrt(max(u_star, 0.0)))
        closed.append(track)

    def open_track(x_prev: float, x_cur: float, u: float, first: bool) -> _Track:
        track = _Track(x_cur, u)
        if not first:
            near = _nearest_real_root(R, x_prev, u)
            if near is not None and near < 0.0:
                x_star, _ = _bisect_boundary(R, x_cur, x_prev, u, sign_mode=True)
                track.prepend_endpoint(x_star, 0.0)
            else:
                x_star, u_star = _bisect_boundary(R, x_cur, x_prev, u, sign_mode=False)
                track.prepend_endpoint(x_star, math.sqrt(max(u_star, 0.0)))
        return track

    grid_full_hits: list[float] = []
    for i, x in enumerate(grid):
        section = R.u_coeffs_at(x)
        thr = FULL_LINE_TOL * (1.0 + float(np.abs(R.coeff).max()))
        if float(np.abs(section).max()) <= thr:
            grid_full_hits.append(x)
            if open_tracks:
                for track in open_tracks:
                    close_track(track, grid[i - 1] if i else x, x)
                open_tracks = []
            continue
        us = _accepted_us(R, x, section, tol)
        if not open_tracks:
            open_tracks = [open_track(grid[i - 1] if i else x, x, u, first=(i == 0)) for u in us]
            continue
        pairs = sorted(
            (abs(u - track.us[-1]), ti, ui)
            for ti, track in enumerate(open_tracks)
            for ui, u in enumerate(us)
        )
        track_used = [False] * len(open_tracks)
        root_used = [False] * len(us)
        for dist, ti, ui in pairs:
            if track_used[ti] or root_used[ui]:
                continue
            if dist > open_tracks[ti].jump_cap():
                continue
            open_tracks[ti].append(x, us[ui])
            track_used[ti] = True
            root_used[ui] = True
        survivors: list[_Track] = []
        for ti, track in enumerate(open_tracks):
            if track_used[ti]:
                survivors.append(track)
            else:
                close_track(track, grid[i - 1], x)
        for ui, u in enumerate(us):
            if not root_used[ui]:
                survivors.append(open_track(grid[i - 1], x, u, first=False))
        open_tracks = survivors
    closed.extend(open_tracks)

    branches: list[LocusBranch] = [
        LocusBranch(BranchKind.REAL_AXIS, tuple((x, 0.0) for x in grid), mirror=False)
    ]
    off = [t.to_branch() for t in closed if len(t.xs) >= 2 and max(t.ys) > 0.0]
    off.sort(key=lambda b: (b.points[0][0], b.points[0][1]))
    branches.extend(off)

    vertical = list(full_xs)
    half_step = 0.5 * (x_max - x_min) / (samples - 1)
    for x0 in grid_full_hits:
        if not any(abs(x0 - v) <= half_step for v in vertical):
            vertical.append(x0)
    for x0 in sorted(vertical):
        pts = tuple((x0, float(y)) for y in xs)
        branches.append(LocusBranch(BranchKind.VERTICAL_LINE, pts, mirror=False))
    return branches


def _arc_points(
    radicand,
    lo: float,
    hi: float,
    count: int,
    zero_lo: bool,
    zero_hi: bool,
) -> tuple[tuple[float, float], ...]:
    count = max(int(count), 2)
    xs = np.linspace(lo, hi, count)
    pts = []
    for i, x in enumerate(xs):
        x = float(x)
        if (i == 0 and zero_lo) or (i == count - 1 and zero_hi):
            pts.append((x, 0.0))
            continue
        r = float(radicand(x))
        pts.append((x, math.sqrt(r) if r > 0.0 else 0.0))
    return tuple(pts)


def closed_form_locus(
    f: RealPolynomial,
    x_min: float,
    x_max: float,
    samples: int = 257,
) -> list[LocusBranch]:
    """Locus from the explicit degree-2/3/4 formulas.

    Degree 2: real axis plus the vertical line x = -b/(2a). Degree 3: off-axis
    points satisfy y^2 = (3ax^2 + 2bx + c)/a. Degree 4: y^2 =
    (4ax^3 + 3bx^2 + 2cx + d)/(4ax + b) away from the singular abscissa
    x = -b/(4a), which is handled separately (skipped in a small window, and
    emitted as a vertical line when the section vanishes identically there).
    """
    if not (math.isfinite(x_min) and math.isfinite(x_max) and x_min < x_max):
        raise ValueError("need x_min < x_max")
    samples = int(samples)
    if samples < 16:
        raise ValueError("need at least 16 samples")
    n = f.degree
    if n not in (2, 3, 4):
        raise DegreeError(f"closed forms cover degrees 2..4, got {n}")
    xs = np.linspace(x_min, x_max, samples)
    branches: list[LocusBranch] = [
        LocusBranch(BranchKind.REAL_AXIS, tuple((float(x), 0.0) for x in xs), mirror=False)
    ]
    span = x_max - x_min

    if n == 2:
        a, b = f.coeffs[2], f.coeffs[1]
        x0 = -b / (2.0 * a) + 0.0
        pts = tuple((x0, float(y)) for y in xs)
        branches.append(LocusBranch(BranchKind.VERTICAL_LINE, pts, mirror=False))
        return branches

    if n == 3:
        a, b, c = f.coeffs[3], f.coeffs[2], f.coeffs[1]

        def radicand(x: float) -> float:
            return (3.0 * a * x * x + 2.0 * b * x + c) / a

        disc = b * b - 3.0 * a * c
        zeros: list[float] = []
        if disc >= 0.0:
            sq = math.sqrt(disc)
            zeros = sorted(((-b - sq) / (3.0 * a), (-b + sq) / (3.0 * a)))
        cuts = sorted({x_min, x_max, *(z for z in zeros if x_min < z < x_max)})
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            if radicand(mid) < 0.0:
                continue
            count = max(2, round(samples * (hi - lo) / span))
            pts = _arc_points(radicand, lo, hi, count, lo in zeros, hi in zeros)
            branches.append(LocusBranch(BranchKind.OFF_AXIS, pts, mirror=True))
        return branches

    a, b, c, d = f.coeffs[4], f.coeffs[3], f.coeffs[2], f.coeffs[1]
    x_sing = -b / (4.0 * a) + 0.0

    def numerator(x: float) -> float:
        return ((4.0 * a * x + 3.0 * b) * x + 2.0 * c) * x + d

    def radicand(x: float) -> float:
        return numerator(x) / (4.0 * a * x + b)

    R = reduce_imag(f)
    window = max(span / (samples - 1), 1e-9 * (1.0 + abs(x_sing)))
    num_roots = [
        float(r.real)
        for r in np.roots([4.0 * a, 3.0 * b, 2.0 * c, d])
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real)) and x_min < r.real < x_max
    ]
    cuts = {x_min, x_max, *num_roots}
    if x_min < x_sing - window < x_max:
        cuts.add(x_sing - window)
    if x_min < x_sing + window < x_max:
        cuts.add(x_sing + window)
    cuts_sorted = sorted(cuts)
    for lo, hi in zip(cuts_sorted[:-1], cuts_sorted[1:]):
        mid = 0.5 * (lo + hi)
        if abs(mid - x_sing) <= window:
            continue
        if radicand(mid) < 0.0:
            continue
        count = max(2, round(samples * (hi - lo) / span))
        pts = _arc_points(radicand, lo, hi, count, lo in num_roots, hi in num_roots)
        branches.append(LocusBranch(BranchKind.OFF_AXIS, pts, mirror=True))
    if _full_line_abscissas(R, x_sing - 1.0, x_sing + 1.0):
        pts = tuple((x_sing, float(y)) for y in xs)
        branches.append(LocusBranch(BranchKind.VERTICAL_LINE, pts, mirror=False))
    return branches


def classify_cubic(f: RealPolynomial, tol: float = CLASS_TOL) -> CubicClassification:
    """Classify a cubic by the slope at its inflection point x = -b/(3a)."""
    if f.degree != 3:
        raise DegreeError(f"classification needs a cubic, got degree {f.degree}")
    a, b, c = f.coeffs[3], f.coeffs[2], f.coeffs[1]
    inflection_x = -b / (3.0 * a) + 0.0
    slope = (3.0 * a * c - b * b) / (3.0 * a) + 0.0
    thr = tol * (1.0 + abs(b * b / (3.0 * a)) + abs(c))
    if abs(slope) <= thr:
        category = SlopeCategory.ZERO_SLOPE
    elif slope < 0.0:
        category = SlopeCategory.NEGATIVE_SLOPE
    else:
        category = SlopeCategory.POSITIVE_SLOPE
    return CubicClassification(category, inflection_x, slope)


def cubic_conic_is_degenerate(f: RealPolynomial, tol: float = CLASS_TOL) -> bool:
    """True when b^2 = 3ac: the off-axis conic degenerates to a line pair."""
    if f.degree != 3:
        raise DegreeError(f"needs a cubic, got degree {f.degree}")
    a, b, c = f.coeffs[3], f.coeffs[2], f.coeffs[1]
    return abs(b * b - 3.0 * a * c) <= tol * (1.0 + b * b + abs(3.0 * a * c))


def cubic_hyperbola_check(f: RealPolynomial, pt: tuple[float, float]) -> float:
    """Residual of the cubic's central-conic identity at pt = (x, y).

    Evaluates 3a^2 (x + b/(3a))^2 - a^2 y^2 - (b^2 - 3ac)/3, which is zero
    exactly on the off-axis locus. Needs no division by b^2 - 3ac, so the
    degenerate case b^2 = 3ac (conic collapsing to the lines
    y = +/- sqrt(3) (x + b/(3a))) evaluates fine; use
    cubic_conic_is_degenerate to detect it.
    """
    if f.degree != 3:
        raise DegreeError(f"needs a cubic, got degree {f.degree}")
    a, b, c = f.coeffs[3], f.coeffs[2], f.coeffs[1]
    x, y = float(pt[0]), float(pt[1])
    shift = x + b / (3.0 * a)
    return 3.0 * a * a * shift * shift - a * a * y * y - (b * b - 3.0 * a * c) / 3.0


def lift_to_space(
    branch: LocusBranch, P: BivariatePoly, mirrored: bool = False
) -> SpaceCurve:
    """Lift branch points (x, y) to (x, y, P(x, y)).

    With ``mirrored`` the stored y values are negated; the height is unchanged
    because P is even in y (f has real coefficients).
    """
    if mirrored and not branch.mirror:
        raise ValueError("branch does not imply a mirror twin")
    xs = np.array([p[0] for p in branch.points])
    ys = np.array([p[1] for p in branch.points])
    zs = np.atleast_1d(P(xs, ys))
    sign = -1.0 if mirrored else 1.0
    pts = tuple(
        (float(x), float(sign * y), float(z)) for x, y, z in zip(xs, ys, zs)
    )
    return SpaceCurve(pts, branch.kind, mirrored)


def lift_branches(branches: list[LocusBranch], P: BivariatePoly) -> list[SpaceCurve]:
    """Lift every branch, materializing implied mirror twins as separate curves."""
    curves: list[SpaceCurve] = []
    for branch in branches:
        curves.append(lift_to_space(branch, P))
        if branch.mirror:
            curves.append(lift_to_space(branch, P, mirrored=True))
    return curves
