"""Real-coefficient polynomials and their split into bivariate real/imaginary parts.

Writing f(x + iy) = P(x, y) + i*Q(x, y) for real x, y gives two bivariate
polynomials with real coefficients. Every monomial of Q carries a factor of y,
so Q(x, y) = y * R(x, y^2) for a third polynomial R; the nonnegative roots of
R in its second argument are what the locus tracer follows.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

# Parsers refuse degrees above this; keeps sweeps fast and exact binomials small.
MAX_PARSE_DEGREE = 20


class DegreeError(ValueError):
    """Polynomial degree unsuitable for the requested operation."""


class EvaluationError(ArithmeticError):
    """Evaluation produced a non-finite value."""


@dataclass(frozen=True)
class RealPolynomial:
    """Dense univariate polynomial with real coefficients, ascending powers.

    ``coeffs[k]`` is the coefficient of z^k. Trailing zeros are stripped at
    construction; the result must have degree >= 1 and finite coefficients.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        cleaned = tuple(float(c) for c in self.coeffs)
        if not cleaned:
            raise DegreeError("need at least two coefficients")
        if not all(math.isfinite(c) for c in cleaned):
            raise ValueError("coefficients must be finite")
        while len(cleaned) > 1 and cleaned[-1] == 0.0:
            cleaned = cleaned[:-1]
        if len(cleaned) < 2:
            raise DegreeError("degree must be at least 1, got a constant")
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def _unchecked(cls, coeffs: tuple[float, ...]) -> "RealPolynomial":
        # Constant results are valid only as derivative outputs.
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) == 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def shift_constant(self, delta: float) -> "RealPolynomial":
        """Return the polynomial f(z) + delta."""
        return RealPolynomial((self.coeffs[0] + float(delta),) + self.coeffs[1:])

    def __call__(self, x):
        """Evaluate at a real scalar or array."""
        return npoly.polyval(x, self.as_array())

    def __str__(self) -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0.0 and self.degree > 0:
                continue
            mag = format_number(abs(c))
            if k == 0:
                body = mag
            else:
                var = "z" if k == 1 else f"z^{k}"
                body = var if abs(c) == 1.0 else f"{mag}*{var}"
            if not terms:
                terms.append(body if c >= 0 else f"-{body}")
            else:
                terms.append(f"+ {body}" if c >= 0 else f"- {body}")
        return " ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class BivariatePoly:
    """Bivariate polynomial; ``coeff[j, k]`` multiplies x^j y^k."""

    coeff: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.coeff, dtype=float)
        if arr.ndim != 2:
            raise ValueError("coefficient array must be 2-D")
        if not np.isfinite(arr).all():
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeff", arr)

    @property
    def degree_x(self) -> int:
        return self.coeff.shape[0] - 1

    @property
    def degree_y(self) -> int:
        return self.coeff.shape[1] - 1

    def __call__(self, x, y):
        return npoly.polyval2d(x, y, self.coeff)

    def magnitude_at(self, x, y):
        """Sum of absolute monomial values; the natural residual scale."""
        return npoly.polyval2d(np.abs(x), np.abs(y), np.abs(self.coeff))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self.coeff.shape == other.coeff.shape and bool(
            np.array_equal(self.coeff, other.coeff)
        )


@dataclass(frozen=True, eq=False)
class ReducedImagPoly:
    """Q(x, y) / y written in x and u = y^2; ``coeff[j, t]`` multiplies x^j u^t."""

    coeff: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.coeff, dtype=float)
        if arr.ndim != 2:
            raise ValueError("coefficient array must be 2-D")
        if not np.isfinite(arr).all():
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeff", arr)

    @property
    def degree_x(self) -> int:
        return self.coeff.shape[0] - 1

    @property
    def degree_u(self) -> int:
        return self.coeff.shape[1] - 1

    def u_coeffs_at(self, x: float) -> np.ndarray:
        """Coefficients (ascending in u) of the univariate section R(x, .)."""
        return np.atleast_1d(npoly.polyval(x, self.coeff))

    def __call__(self, x, u):
        return npoly.polyval2d(x, u, self.coeff)

    def magnitude_at(self, x, u):
        return npoly.polyval2d(np.abs(x), np.abs(u), np.abs(self.coeff))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReducedImagPoly):
            return NotImplemented
        return self.coeff.shape == other.coeff.shape and bool(
            np.array_equal(self.coeff, other.coeff)
        )


def eval_complex(f: RealPolynomial, z: complex) -> complex:
    """Evaluate f at a complex point by Horner's rule."""
    acc = complex(f.coeffs[-1])
    for c in reversed(f.coeffs[:-1]):
        acc = acc * z + c
    if not (math.isfinite(acc.real) and math.isfinite(acc.imag)):
        raise EvaluationError(f"evaluation overflowed at z = {z!r}")
    return acc


def derivative(f: RealPolynomial, order: int = 1) -> RealPolynomial:
    """k-th formal derivative. Orders past the degree give the zero polynomial."""
    if order < 1:
        raise ValueError("order must be >= 1")
    n = f.degree
    if order > n:
        return RealPolynomial._unchecked((0.0,))
    new = tuple(
        f.coeffs[k + order] * math.perm(k + order, order) for k in range(n - order + 1)
    )
    if len(new) == 1:
        return RealPolynomial._unchecked(new)
    return RealPolynomial(new)


def expand_real_imag(f: RealPolynomial) -> tuple[BivariatePoly, BivariatePoly]:
    """Split f(x + iy) into P(x, y) + i*Q(x, y) by binomial expansion.

    Binomial coefficients are exact integers, so the expansion is exact in
    float coefficient arithmetic.
    """
    n = f.degree
    p = np.zeros((n + 1, n + 1))
    q = np.zeros((n + 1, n + 1))
    for power, a in enumerate(f.coeffs):
        if a == 0.0:
            continue
        for m in range(power + 1):
            c = math.comb(power, m) * a
            j = power - m
            r = m % 4
            if r == 0:
                p[j, m] += c
            elif r == 1:
                q[j, m] += c
            elif r == 2:
                p[j, m] -= c
            else:
                q[j, m] -= c
    return BivariatePoly(p), BivariatePoly(q)


def reduce_imag(f: RealPolynomial) -> ReducedImagPoly:
    """Return R with Q(x, y) = y * R(x, y^2).

    Exact because every monomial of Q has odd degree in y; the division is a
    reindexing of coefficients, never an arithmetic operation.
    """
    _, q = expand_real_imag(f)
    n = f.degree
    du = (n - 1) // 2
    r = np.zeros((n, du + 1))
    for t in range(du + 1):
        r[:, t] = q.coeff[:n, 2 * t + 1]
    return ReducedImagPoly(r)


def format_number(v: float) -> str:
    """Shortest round-trip decimal; integral values lose the trailing '.0'."""
    v = float(v)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def parse_coeffs(text: str, descending: bool = False) -> RealPolynomial:
    """Parse a comma-separated coefficient list (ascending powers by default)."""
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"malformed coefficient list: {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ValueError(f"malformed coefficient list: {text!r}") from exc
    if descending:
        values.reverse()
    if len(values) - 1 > MAX_PARSE_DEGREE:
        raise DegreeError(f"degree above {MAX_PARSE_DEGREE} is not supported")
    return RealPolynomial(tuple(values))


_TERM_RE = re.compile(
    r"(?P<sign>[+-])?\s*"
    r"(?P<coeff>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*"
    r"(?:\*\s*)?"
    r"(?:(?P<var>[a-zA-Z])\s*(?:\^\s*(?P<pow>\d+))?)?"
)


def parse_poly_string(text: str) -> RealPolynomial:
    """Parse expressions like ``z^3 - 2z + 4`` into a polynomial.

    Any single letter works as the variable, but it must be used consistently.
    """
    pos = 0
    stripped = text.strip()
    if not stripped:
        raise ValueError("empty polynomial expression")
    acc: dict[int, float] = {}
    var_seen: str | None = None
    while pos < len(stripped):
        m = _TERM_RE.match(stripped, pos)
        if m is None or m.end() == pos or (m.group("coeff") is None and m.group("var") is None):
            raise ValueError(f"could not parse polynomial near {stripped[pos:]!r}")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        coeff = float(m.group("coeff")) if m.group("coeff") else 1.0
        var = m.group("var")
        if var is not None:
            if var_seen is None:
                var_seen = var
            elif var != var_seen:
                raise ValueError(f"mixed variables {var_seen!r} and {var!r}")
            power = int(m.group("pow")) if m.group("pow") else 1
        else:
            power = 0
        if power > MAX_PARSE_DEGREE:
            raise DegreeError(f"degree above {MAX_PARSE_DEGREE} is not supported")
        acc[power] = acc.get(power, 0.0) + sign * coeff
        pos = m.end()
        while pos < len(stripped) and stripped[pos].isspace():
            pos += 1
    top = max(acc)
    coeffs = tuple(acc.get(k, 0.0) for k in range(top + 1))
    return RealPolynomial(coeffs)
