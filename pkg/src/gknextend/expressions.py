"""Supported differential expressions and their boundary (trace) models.

Every supported expression determines a trace layout -- endpoint values and
derivatives, left endpoint first, derivatives ascending -- together with a
skew-Hermitian form on trace vectors that reproduces the Green's-formula
boundary terms.  The minimal domain of each supported kind is exactly
{zero traces}, so the trace space is a finite model of the boundary space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Union

import numpy as np

from .polynomials import Poly
from .symplectic import SkewForm


class ExpressionError(ValueError):
    """Unsupported expression input."""


# ---------------------------------------------------------------------------
# expression kinds


@dataclass(frozen=True)
class FirstOrderI:
    """i x'(u) on [0, 1]."""

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return (Fraction(0), Fraction(1))


@dataclass(frozen=True)
class Fourier:
    """-x''(u) on a compact interval [a, b]."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not self.a < self.b:
            raise ExpressionError("need a < b")

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return (self.a, self.b)


@dataclass(frozen=True)
class LegendreType:
    """(u^2-1)^2 x'''' + 8u(u^2-1)x''' + (4A+12)(u^2-1)x'' + 8Au x' on [-1, 1].

    Fourth order, but the trace model keeps only (x, x') at each endpoint:
    the leading coefficient has double zeros at the endpoints, so for smooth
    data the boundary terms close on those four traces alone.
    """

    A: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "A", Fraction(self.A))
        if not self.A > 0:
            raise ExpressionError("parameter A must be positive")

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return (Fraction(-1), Fraction(1))


@dataclass(frozen=True)
class GeneralEvenOrder:
    """sum_j (-1)^j (q_j(u) x^(j))^(j) with real polynomial q_j, on [a, b].

    `qs[j]` is the coefficient polynomial of the j-th term; the order of the
    expression is 2 * (len(qs) - 1).
    """

    qs: tuple[Poly, ...]
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "qs", tuple(self.qs))
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not self.a < self.b:
            raise ExpressionError("need a < b")
        if len(self.qs) < 2 or self.qs[-1].is_zero():
            raise ExpressionError("leading coefficient q_n must not vanish identically")

    @property
    def n(self) -> int:
        return len(self.qs) - 1

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return (self.a, self.b)


DiffExpr = Union[FirstOrderI, Fourier, LegendreType, GeneralEvenOrder]


def traces_per_endpoint(expr: DiffExpr) -> int:
    if isinstance(expr, FirstOrderI):
        return 1
    if isinstance(expr, (Fourier, LegendreType)):
        return 2
    if isinstance(expr, GeneralEvenOrder):
        return 2 * expr.n
    raise ExpressionError(f"unknown expression kind {expr!r}")


def trace_arity(expr: DiffExpr) -> int:
    return 2 * traces_per_endpoint(expr)


def trace_labels(expr: DiffExpr) -> tuple[str, ...]:
    def prime(name: str, k: int) -> str:
        if k <= 3:
            ticks = "'" * k
            return f"x{ticks}({name})"
        return f"x^({k})({name})"

    if isinstance(expr, FirstOrderI):
        return ("x(0)", "x(1)")
    if isinstance(expr, LegendreType):
        ends = ("-1", "1")
    elif isinstance(expr, Fourier):
        ends = ("a", "b")
    else:
        ends = ("a", "b")
    d = traces_per_endpoint(expr)
    return tuple(prime(e, k) for e in ends for k in range(d))


def deficiency_index(expr: DiffExpr) -> int:
    """Number of boundary conditions a self-adjoint restriction needs.

    Regular kinds get the full count (all classical solutions of
    l x = +-i x are square integrable on a compact interval); the singular
    fourth-order kind is a configured constant from its endpoint
    classification (limit-3 at both ends).
    """
    if isinstance(expr, FirstOrderI):
        return 1
    if isinstance(expr, Fourier):
        return 2
    if isinstance(expr, LegendreType):
        return 2
    if isinstance(expr, GeneralEvenOrder):
        return 2 * expr.n
    raise ExpressionError(f"unknown expression kind {expr!r}")


# ---------------------------------------------------------------------------
# coefficient view and exact application


def coefficient_polys(expr: DiffExpr) -> list[tuple[int, Poly]]:
    """Expanded form of the expression: l x = sum c_j(u) x^(j)."""
    if isinstance(expr, FirstOrderI):
        return [(1, Poly([1j]))]
    if isinstance(expr, Fourier):
        return [(2, Poly([-1]))]
    if isinstance(expr, LegendreType):
        A = expr.A
        u = Poly.x()
        w = u * u - Poly.const(1)  # u^2 - 1
        return [
            (4, w * w),
            (3, u.scale(8) * w),
            (2, w.scale(4 * A + 12)),
            (1, u.scale(8 * A)),
        ]
    if isinstance(expr, GeneralEvenOrder):
        acc: dict[int, Poly] = {}
        for j, q in enumerate(expr.qs):
            # d^j/du^j (q x^(j)) = sum_i C(j,i) q^(i) x^(2j-i)
            for i in range(j + 1):
                term = q.deriv(i).scale((-1) ** j * comb(j, i))
                m = 2 * j - i
                acc[m] = acc.get(m, Poly()) + term
        return [(m, p) for m, p in sorted(acc.items()) if not p.is_zero()]
    raise ExpressionError(f"unknown expression kind {expr!r}")


def apply_expr(expr: DiffExpr, p: Poly) -> Poly:
    """Apply the expression to a polynomial, exactly when inputs are exact."""
    out = Poly()
    for j, c in coefficient_polys(expr):
        out = out + c * p.deriv(j)
    return out


# ---------------------------------------------------------------------------
# trace vectors


@dataclass(frozen=True)
class TraceVector:
    """Endpoint data in the fixed layout of the expression kind.

    Values may be exact scalars (Fraction) or complex floats; `as_array`
    gives the float view used by the numerical layers.
    """

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values], dtype=complex)


def trace_of_poly(expr: DiffExpr, p: Poly) -> TraceVector:
    a, b = expr.interval
    d = traces_per_endpoint(expr)
    vals = [p.deriv(k)(a) for k in range(d)] + [p.deriv(k)(b) for k in range(d)]
    return TraceVector(tuple(vals))


# ---------------------------------------------------------------------------
# boundary forms


@dataclass(frozen=True)
class BoundaryForm:
    """Trace layout plus the skew form realizing the Green's-formula terms."""

    expr: DiffExpr
    form: SkewForm
    labels: tuple[str, ...]

    @property
    def arity(self) -> int:
        return self.form.dim


_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _solve_exact(A: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over Fractions (small systems only)."""
    n = len(A)
    M = [row[:] + [rhs[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ExpressionError("singular probe system")
        M[col], M[piv] = M[piv], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _hermite_probe_basis(expr: GeneralEvenOrder) -> list[Poly]:
    """Polynomials e_j of degree 4n-1 with trace(e_j) = j-th unit vector."""
    a, b = expr.interval
    d = traces_per_endpoint(expr)
    m = 2 * d
    rows: list[list[Fraction]] = []
    for end in (a, b):
        for r in range(d):
            row = []
            for col in range(m):
                if col < r:
                    row.append(Fraction(0))
                else:
                    fall = 1
                    for t in range(r):
                        fall *= col - t
                    row.append(Fraction(fall) * end ** (col - r))
            rows.append(row)
    basis = []
    for j in range(m):
        rhs = [Fraction(1) if i == j else Fraction(0) for i in range(m)]
        basis.append(Poly(_solve_exact(rows, rhs)))
    return basis


def boundary_form(expr: DiffExpr) -> BoundaryForm:
    """Skew form S with y* S x = <l x, y> - <x, l y> on traces.

    Closed forms for the named kinds; for GeneralEvenOrder the matrix is
    assembled by exact integration by parts against Hermite probe
    polynomials (the boundary functional is trace-determined, so probing a
    trace basis determines it completely).
    """
    if isinstance(expr, FirstOrderI):
        S = np.diag([-1j, 1j])
        return BoundaryForm(expr, SkewForm(S, nondegenerate=True), trace_labels(expr))
    if isinstance(expr, Fourier):
        S = np.zeros((4, 4))
        S[0:2, 0:2] = _J2
        S[2:4, 2:4] = -_J2
        return BoundaryForm(expr, SkewForm(S, nondegenerate=True), trace_labels(expr))
    if isinstance(expr, LegendreType):
        S = np.zeros((4, 4))
        S[0:2, 0:2] = 8 * _J2
        S[2:4, 2:4] = -8 * _J2
        return BoundaryForm(expr, SkewForm(S, nondegenerate=True), trace_labels(expr))
    if isinstance(expr, GeneralEvenOrder):
        if expr.n > 2:
            raise ExpressionError("boundary form supported for order <= 4 only")
        if not all(q.is_exact() for q in expr.qs):
            raise ExpressionError("boundary form needs exact rational coefficients")
        if expr.qs[-1](expr.a) == 0 or expr.qs[-1](expr.b) == 0:
            raise ExpressionError(
                "leading coefficient vanishes at an endpoint; the expression "
                "is singular there and the full-trace boundary form degenerates"
            )
        basis = _hermite_probe_basis(expr)
        a, b = expr.interval
        m = len(basis)
        S = np.zeros((m, m))
        for k, ek in enumerate(basis):
            lek = apply_expr(expr, ek)
            for j, ej in enumerate(basis):
                lej = apply_expr(expr, ej)
                val = (lek * ej - ek * lej).integral(a, b)
                S[j, k] = float(val)
        return BoundaryForm(expr, SkewForm(S, nondegenerate=True), trace_labels(expr))
    raise ExpressionError(f"unknown expression kind {expr!r}")


def green_defect(expr: DiffExpr, p: Poly, q: Poly) -> complex:
    """<l p, q> - <p, l q> by exact polynomial quadrature over the interval.

    Independent of `boundary_form`; used to validate it.  Conjugation of the
    second slot is honoured for complex coefficient polynomials.
    """
    a, b = expr.interval
    qbar = Poly([c.conjugate() if isinstance(c, complex) else c for c in q.coeffs])
    lp = apply_expr(expr, p)
    lq_bar = Poly(
        [c.conjugate() if isinstance(c, complex) else c for c in apply_expr(expr, q).coeffs]
    )
    val = (lp * qbar - p * lq_bar).integral(a, b)
    return complex(val)


# ---------------------------------------------------------------------------
# deficiency solutions (closed form, regular kinds)


@dataclass(frozen=True)
class ExpSolution:
    """x(u) = exp(mu u), a classical solution of l x = sign * i x."""

    expr: DiffExpr
    mu: complex
    sign: int

    def value(self, u):
        return np.exp(self.mu * np.asarray(u, dtype=float))

    def derivative(self, u, order: int = 1):
        return self.mu**order * self.value(u)

    def apply(self, u):
        """l x sampled at u, using the exact exponential derivatives."""
        if isinstance(self.expr, FirstOrderI):
            return 1j * self.mu * self.value(u)
        if isinstance(self.expr, Fourier):
            return -self.mu**2 * self.value(u)
        raise ExpressionError("closed-form application only for regular kinds")

    def trace(self) -> TraceVector:
        a, b = self.expr.interval
        d = traces_per_endpoint(self.expr)
        vals = [self.mu**k * np.exp(self.mu * float(a)) for k in range(d)]
        vals += [self.mu**k * np.exp(self.mu * float(b)) for k in range(d)]
        return TraceVector(tuple(complex(v) for v in vals))


def deficiency_solutions(expr: DiffExpr, sign: int) -> list[ExpSolution]:
    """Solutions of l x = sign * i x for the regular first/second order kinds."""
    if sign not in (+1, -1):
        raise ExpressionError("sign must be +1 or -1")
    if isinstance(expr, FirstOrderI):
        # i x' = sign*i x  =>  x' = sign*x
        return [ExpSolution(expr, complex(sign), sign)]
    if isinstance(expr, Fourier):
        # -x'' = sign*i x  =>  mu^2 = -sign*i
        mu = np.sqrt(complex(0, -sign))
        return [ExpSolution(expr, mu, sign), ExpSolution(expr, -mu, sign)]
    raise ExpressionError(
        "deficiency solutions in closed form only for FirstOrderI and Fourier"
    )


# ---------------------------------------------------------------------------
# patch functions


_RAMP = Poly([1, 0, 0, -10, 15, -6])  # C^2 step-down on [0, 1]


def _compose_affine(p: Poly, c0: float, c1: float) -> Poly:
    """p(c0 + c1 * u) as a polynomial in u."""
    t = Poly([c0, c1])
    out = Poly()
    tk = Poly([1])
    for c in p.coeffs:
        out = out + tk.scale(c)
        tk = tk * t
    return out


@dataclass(frozen=True)
class PatchFunction:
    """Endpoint germ times a plateau cutoff, zero on the middle third.

    Near each endpoint the function equals the (at most linear) germ that
    realizes the requested trace exactly; the cutoff ramps down with two
    flat derivatives, so the patch is piecewise polynomial and C^2.
    """

    expr: DiffExpr
    trace: TraceVector
    pieces: tuple  # ((u_lo, u_hi, Poly), ...) covering [a, b]
    grid: np.ndarray
    samples: np.ndarray

    def __call__(self, u, order: int = 0):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=complex)
        for lo, hi, piece in self.pieces:
            mask = (u >= lo) & (u <= hi)
            if mask.any():
                p = piece.deriv(order)
                acc = np.zeros(u.shape, dtype=complex)
                for c in reversed(p.coeffs):
                    acc = acc * u + complex(c)
                out = np.where(mask, acc, out)
        return out


def patch_realization(expr: DiffExpr, trace: TraceVector, grid_size: int = 201) -> PatchFunction:
    """Smooth function with the requested traces, supported near the endpoints."""
    if len(trace) != trace_arity(expr):
        raise ExpressionError(
            f"trace has {len(trace)} entries, expression expects {trace_arity(expr)}"
        )
    d = traces_per_endpoint(expr)
    if d > 2:
        raise ExpressionError("patches carry at most (value, derivative) per endpoint")
    a, b = (float(x) for x in expr.interval)
    L = (b - a) / 3.0
    vals = [complex(v) for v in trace.values]
    if d == 1:
        lv, rv = (vals[0], 0.0), (vals[1], 0.0)
    else:
        lv, rv = (vals[0], vals[1]), (vals[d], vals[d + 1])
    germ_l = Poly([lv[0] - lv[1] * a, lv[1]])      # lv0 + lv1 (u - a)
    germ_r = Poly([rv[0] - rv[1] * b, rv[1]])      # rv0 + rv1 (u - b)
    # ramp arguments: t = 2(u-a)/L - 1 on the left, t = 2(b-u)/L - 1 on the right
    ramp_l = _compose_affine(_RAMP, -2.0 * a / L - 1.0, 2.0 / L)
    ramp_r = _compose_affine(_RAMP, 2.0 * b / L - 1.0, -2.0 / L)
    pieces = (
        (a, a + L / 2, germ_l),
        (a + L / 2, a + L, germ_l * ramp_l),
        (a + L, b - L, Poly()),
        (b - L, b - L / 2, germ_r * ramp_r),
        (b - L / 2, b, germ_r),
    )
    grid = np.linspace(a, b, grid_size)
    patch = PatchFunction(expr, trace, pieces, grid, np.zeros(grid.shape, dtype=complex))
    samples = patch(grid)
    return PatchFunction(expr, trace, pieces, grid, samples)
