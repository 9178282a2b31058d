"""All complex roots of a real polynomial, with multiplicities and slicing.

The solver runs a simultaneous Ehrlich-Aberth iteration (Jacobi sweep) from a
deterministic starting circle, falling back to Durand-Kerner corrections when
progress stalls. Iterates are frozen individually once their residual reaches
the evaluation noise floor, then clustered into roots with multiplicities.
Clusters of a multiple root stagnate on a ring of radius roughly
eps^(1/m), so clustering is done in two stages: a fixed-tolerance pass, then
a validated agglomeration that only merges clusters sitting within the
expected noise ring of the combined multiplicity and whose Taylor profile at
the joint center confirms it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .polynomial import (
    BivariatePoly,
    RealPolynomial,
    derivative,
    eval_complex,
    expand_real_imag,
)

ROOT_TOL = 1e-9
CLUSTER_TOL = 1e-6
MAX_ITER = 500
_INIT_ANGLE = 0.4  # fixed angular offset of the starting circle
_EPS = float(np.finfo(float).eps)


class ConvergenceError(RuntimeError):
    """Root iteration missed the residual target; carries the best iterate."""

    def __init__(self, message: str, best=None, residuals=None) -> None:
        super().__init__(message)
        self.best = best
        self.residuals = residuals


@dataclass(frozen=True)
class RootInfo:
    """A complex root, its multiplicity, and relative residuals.

    ``residual`` is |f(root)| over sum(|a_k| |root|^k) + max|a_k|;
    ``locus_residual`` is the same construction for Q = Im f(x + iy).
    """

    location: complex
    multiplicity: int
    residual: float
    locus_residual: float


@dataclass(frozen=True)
class SliceResult:
    """Roots of f - w: where the height-w plane meets the lifted curves."""

    level: float
    intersections: tuple[RootInfo, ...]
    total_multiplicity: int


def _horner_many(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full_like(z, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def _aberth_roots(coeffs: np.ndarray, tol: float) -> np.ndarray:
    """Unclustered roots of the polynomial with the given ascending coefficients."""
    n = len(coeffs) - 1
    if n == 1:
        return np.array([-coeffs[0] / coeffs[1]], dtype=complex)
    monic = np.asarray(coeffs, dtype=float) / coeffs[-1]
    dmonic = npoly.polyder(monic)
    absmon = np.abs(monic)
    maxb = float(absmon.max())
    radius = 1.0 + float(absmon[:-1].max())
    ks = np.arange(n)
    z = radius * np.exp(1j * (2.0 * np.pi * ks / n + _INIT_ANGLE))
    frozen = np.zeros(n, dtype=bool)
    use_dk = False
    best_resid = math.inf
    stall = 0
    for it in range(MAX_ITER):
        p = _horner_many(monic, z)
        scale = _horner_many(absmon, np.abs(z) + 0j).real + maxb
        frozen |= np.abs(p) <= 8.0 * _EPS * scale
        if frozen.all():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        if (diff == 0).any():
            # exact collision of two iterates: deterministic nudge, retry
            for i in range(n):
                z[i] = z[i] * (1.0 + 1e-12 * (i + 1)) + 1e-12 * (i + 1) * 1j * 0
            continue
        if use_dk:
            delta = p / diff.prod(axis=1)
        else:
            dp = _horner_many(dmonic, z)
            dp_ok = dp != 0
            w = np.where(dp_ok, p / np.where(dp_ok, dp, 1.0), 0.0)
            s = (1.0 / diff).sum(axis=1) - 1.0
            denom = 1.0 - w * s
            den_ok = np.abs(denom) > 1e-12
            delta = np.where(den_ok, w / np.where(den_ok, denom, 1.0), w)
            if not dp_ok.all():
                dk = p / diff.prod(axis=1)
                delta = np.where(dp_ok, delta, dk)
        z = np.where(frozen, z, z - delta)
        bad = ~np.isfinite(z)
        if bad.any():
            reseed = (radius * 1.5) * np.exp(1j * (2.0 * np.pi * ks / n + 0.9))
            z = np.where(bad, reseed, z)
        resid = float((np.abs(p) / np.maximum(scale, 1e-300)).max())
        if resid < 0.9 * best_resid:
            best_resid = resid
            stall = 0
        else:
            stall += 1
        if not use_dk and it >= 120 and stall >= 40:
            use_dk = True
            stall = 0
    p = _horner_many(monic, z)
    scale = _horner_many(absmon, np.abs(z) + 0j).real + maxb
    rel = np.abs(p) / np.maximum(scale, 1e-300)
    if bool((rel > tol).any()):
        raise ConvergenceError(
            f"root iteration did not converge within {MAX_ITER} iterations "
            f"(worst relative residual {float(rel.max()):.3e})",
            best=z.copy(),
            residuals=rel.copy(),
        )
    return z


def _derivative_chain(f: RealPolynomial) -> list[np.ndarray]:
    chain = [f.as_array()]
    for k in range(1, f.degree + 1):
        chain.append(derivative(f, k).as_array())
    return chain


def _coeff_scale(chain0: np.ndarray, c: complex) -> float:
    mags = np.abs(chain0)
    return float(npoly.polyval(abs(c), mags)) + float(mags.max())


def _taylor_terms(chain: list[np.ndarray], c: complex, r: float) -> list[float]:
    out = []
    rk = 1.0
    for k, coeffs in enumerate(chain):
        tk = abs(complex(npoly.polyval(c, coeffs))) / math.factorial(k)
        out.append(tk * rk)
        rk *= r
    return out


def _profile_supports(chain: list[np.ndarray], c: complex, r: float, m: int) -> bool:
    """True when the Taylor expansion at radius r is dominated by order m."""
    if m >= len(chain):
        return False
    r = max(r, 1e3 * _EPS * (1.0 + abs(c)))
    s = _taylor_terms(chain, c, r)
    sm = s[m]
    below = max(s[:m]) if m > 0 else 0.0
    if sm == 0.0:
        return below == 0.0
    return below <= 4.0 * sm


def _expected_ring_radius(chain: list[np.ndarray], c: complex, m: int) -> float:
    """Radius where a multiplicity-m root's iterates hit the noise floor."""
    tm = abs(complex(npoly.polyval(c, chain[m]))) / math.factorial(m) if m < len(chain) else 0.0
    scale = _coeff_scale(chain[0], c)
    if tm <= 0.0:
        return 0.05 * (1.0 + abs(c))
    r = (64.0 * _EPS * scale / tm) ** (1.0 / m)
    return min(r, 0.05 * (1.0 + abs(c)))


class _Cluster:
    __slots__ = ("members",)

    def __init__(self, members: list[complex]) -> None:
        self.members = members

    @property
    def center(self) -> complex:
        return sum(self.members) / len(self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def spread(self) -> float:
        c = self.center
        return max(abs(z - c) for z in self.members)


def _cluster_roots(
    zs: np.ndarray, chain: list[np.ndarray], base_tol: float
) -> list[_Cluster]:
    n = len(zs)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            gap = base_tol * (1.0 + 0.5 * (abs(zs[i]) + abs(zs[j])))
            if abs(zs[i] - zs[j]) <= gap:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(complex(zs[i]))
    clusters = [_Cluster(m) for m in groups.values()]
    clusters.sort(key=lambda cl: (cl.center.real, cl.center.imag))

    # Validated agglomeration: only merge clusters that sit inside the noise
    # ring a root of the combined multiplicity would produce, and whose Taylor
    # profile at the joint center confirms that multiplicity.
    while len(clusters) > 1:
        best: tuple[float, int, int] | None = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = abs(clusters[i].center - clusters[j].center)
                if best is None or d < best[0]:
                    best = (d, i, j)
        assert best is not None
        d, i, j = best
        joint = _Cluster(clusters[i].members + clusters[j].members)
        m = joint.size
        c = joint.center
        ring = _expected_ring_radius(chain, c, m)
        if d <= 4.0 * ring and _profile_supports(chain, c, joint.spread(), m):
            clusters[i] = joint
            del clusters[j]
            clusters.sort(key=lambda cl: (cl.center.real, cl.center.imag))
        else:
            break
    return clusters


def _polish_center(
    chain: list[np.ndarray], c: complex, m: int, guard: float
) -> complex:
    """Newton-polish a multiplicity-m center on f^(m-1); keep only improvements."""
    g = chain[m - 1]
    dg = chain[m] if m < len(chain) else None
    if dg is None:
        return c
    z = c
    for _ in range(3):
        dgv = complex(npoly.polyval(z, dg))
        if dgv == 0:
            break
        z_next = z - complex(npoly.polyval(z, g)) / dgv
        if abs(z_next - c) > guard:
            return c
        z = z_next
    if abs(complex(npoly.polyval(z, g))) <= abs(complex(npoly.polyval(c, g))):
        return z
    return c


def _symmetrize(entries: list[tuple[complex, int]], base_tol: float) -> list[tuple[complex, int]]:
    """Make the multiset exactly closed under conjugation."""
    out: list[tuple[complex, int]] = []
    ups: list[tuple[complex, int]] = []
    downs: list[tuple[complex, int]] = []
    for c, m in entries:
        if c.imag == 0.0:
            out.append((c, m))
        elif c.imag > 0.0:
            ups.append((c, m))
        else:
            downs.append((c, m))
    used = [False] * len(downs)
    for c, m in ups:
        match = None
        for idx, (cd, md) in enumerate(downs):
            if used[idx] or md != m:
                continue
            gap = abs(complex(c.real - cd.real, c.imag + cd.imag))
            if gap <= 8.0 * base_tol * (1.0 + abs(c)):
                if match is None or gap < match[0]:
                    match = (gap, idx)
        if match is None:
            out.append((c, m))
            continue
        idx = match[1]
        used[idx] = True
        cd = downs[idx][0]
        re = 0.5 * (c.real + cd.real)
        im = 0.5 * (c.imag - cd.imag)
        out.append((complex(re, im), m))
        out.append((complex(re, -im), m))
    for idx, (cd, md) in enumerate(downs):
        if not used[idx]:
            out.append((cd, md))
    return out


def _root_info(
    f: RealPolynomial, q: BivariatePoly, location: complex, multiplicity: int
) -> RootInfo:
    val = abs(eval_complex(f, location))
    scale = _coeff_scale(f.as_array(), location)
    residual = val / scale if scale > 0.0 else 0.0
    x, y = location.real, location.imag
    qval = abs(float(q(x, y)))
    qscale = float(q.magnitude_at(x, y)) + float(np.abs(q.coeff).max())
    locus_residual = qval / qscale if qscale > 0.0 else 0.0
    return RootInfo(location, multiplicity, residual, locus_residual)


def find_roots(
    f: RealPolynomial, tol: float = ROOT_TOL, cluster_tol: float = CLUSTER_TOL
) -> list[RootInfo]:
    """All complex roots of f with multiplicities; they sum to the degree."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    zs = _aberth_roots(f.as_array(), tol)
    chain = _derivative_chain(f)
    clusters = _cluster_roots(zs, chain, cluster_tol)
    entries: list[tuple[complex, int]] = []
    for cl in clusters:
        c = cl.center
        m = cl.size
        if abs(c.imag) <= cluster_tol * (1.0 + abs(c)):
            c = complex(c.real, 0.0)
        guard = max(4.0 * cl.spread(), 4.0 * _expected_ring_radius(chain, c, m),
                    cluster_tol * (1.0 + abs(c)))
        c = _polish_center(chain, c, m, guard)
        if abs(c.imag) <= cluster_tol * (1.0 + abs(c)):
            c = complex(c.real, 0.0)
        entries.append((c, m))
    entries = _symmetrize(entries, cluster_tol)
    entries.sort(key=lambda e: (e[0].real, e[0].imag))
    _, q = expand_real_imag(f)
    roots = [_root_info(f, q, c, m) for c, m in entries]
    assert sum(r.multiplicity for r in roots) == f.degree
    worst = max(r.residual for r in roots)
    if worst > tol:
        raise ConvergenceError(
            f"clustered root residual {worst:.3e} exceeds tol {tol:.1e}",
            best=[r.location for r in roots],
            residuals=[r.residual for r in roots],
        )
    return roots


def slice_at(f: RealPolynomial, w: float, tol: float = ROOT_TOL) -> SliceResult:
    """Intersections of the lifted locus with the horizontal plane z = w.

    These are the roots of f - w; subtracting a real constant leaves Q, and
    with it the locus, unchanged.
    """
    w = float(w)
    if not math.isfinite(w):
        raise ValueError("slice level must be finite")
    shifted = f.shift_constant(-w)
    roots = find_roots(shifted, tol)
    total = sum(r.multiplicity for r in roots)
    return SliceResult(w, tuple(roots), total)


def verify_roots_on_locus(roots: list[RootInfo], q: BivariatePoly) -> list[float]:
    """Relative |Q| residual at each root's (re, im); small iff on the locus."""
    maxq = float(np.abs(q.coeff).max())
    out: list[float] = []
    for r in roots:
        x, y = r.location.real, r.location.imag
        val = abs(float(q(x, y)))
        scale = float(q.magnitude_at(x, y)) + maxq
        out.append(val / scale if scale > 0.0 else 0.0)
    return out
