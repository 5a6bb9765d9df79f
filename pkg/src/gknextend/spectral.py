"""Collocation discretization of extended operators and spectral checks.

A discrete vector stacks (samples on the grid, W coordinates).  Boundary
conditions are imposed by restriction to the nullspace of the discretized
constraint rows (basis recombination), so the reduced pair (A_red, M_red)
stays honestly checkable for Hermitian symmetry instead of being made
symmetric by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .collocation import CollocationGrid
from .expressions import (
    DiffExpr,
    ExpSolution,
    FirstOrderI,
    Fourier,
    coefficient_polys,
    traces_per_endpoint,
)
from .extension import BoundaryConditions, ExtendedModel, ModelError
from .polynomials import Poly


class SpectralError(ValueError):
    pass


def expr_order(expr: DiffExpr) -> int:
    return max(j for j, _ in coefficient_polys(expr))


def trace_rows(grid: CollocationGrid, expr: DiffExpr) -> np.ndarray:
    """Matrix extracting the expression's trace vector from grid samples."""
    d = traces_per_endpoint(expr)
    n = grid.N + 1
    rows = []
    for idx in (0, n - 1):
        for k in range(d):
            if k == 0:
                r = np.zeros(n)
                r[idx] = 1.0
            else:
                r = grid.diff(k)[idx]
            rows.append(r)
    return np.array(rows)


def expr_grid_matrix(expr: DiffExpr, grid: CollocationGrid) -> np.ndarray:
    """Collocation matrix of the expression on grid samples."""
    n = grid.N + 1
    L = np.zeros((n, n), dtype=complex)
    for j, c in coefficient_polys(expr):
        cvals = np.array([complex(c(u)) for u in grid.nodes])
        L += cvals[:, None] * grid.diff(j)
    return L


@dataclass(frozen=True)
class DiscreteExtendedOperator:
    model: ExtendedModel
    bc: BoundaryConditions
    grid: CollocationGrid
    P: np.ndarray              # domain basis, columns span the constrained space
    A_full: np.ndarray         # action on (samples, W coords)
    Gram_full: np.ndarray      # block-diagonal: interpolant Gram and G
    A_red: np.ndarray
    Gram_red: np.ndarray

    @property
    def reduced_dim(self) -> int:
        return self.P.shape[1]

    def inner(self, x, y) -> complex:
        return complex(np.asarray(y).conj() @ self.Gram_full @ np.asarray(x))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))


def assemble(
    model: ExtendedModel, bc: BoundaryConditions, grid: CollocationGrid
) -> DiscreteExtendedOperator:
    """Discretize (l x, B a - Omega tr x) under the given boundary rows."""
    expr = model.expr
    if grid.N < 2 * expr_order(expr) + 4:
        raise SpectralError(f"N = {grid.N} too small for order {expr_order(expr)}")
    a, b = (float(v) for v in expr.interval)
    if not (np.isclose(grid.a, a) and np.isclose(grid.b, b)):
        raise SpectralError("grid interval does not match the expression")
    n = grid.N + 1
    k = model.k
    Tr = trace_rows(grid, expr)

    A_full = np.zeros((n + k, n + k), dtype=complex)
    A_full[:n, :n] = expr_grid_matrix(expr, grid)
    if k:
        A_full[n:, :n] = -model.Omega @ Tr
        A_full[n:, n:] = model.B.matrix

    Gram_full = np.zeros((n + k, n + k), dtype=complex)
    Gram_full[:n, :n] = grid.gram
    if k:
        Gram_full[n:, n:] = model.W.G

    lift = np.zeros((model.trace_dim + k, n + k), dtype=complex)
    lift[: model.trace_dim, :n] = Tr
    if k:
        lift[model.trace_dim :, n:] = np.eye(k)
    rows = bc.canonical @ lift
    _, s, vh = np.linalg.svd(rows)
    rank = int(np.sum(s > 1e-10 * s[0])) if s.size else 0
    P = vh[rank:].conj().T

    A_red = P.conj().T @ Gram_full @ A_full @ P
    Gram_red = P.conj().T @ Gram_full @ P
    return DiscreteExtendedOperator(model, bc, grid, P, A_full, Gram_full, A_red, Gram_red)


def symmetry_defect(
    op: DiscreteExtendedOperator, trials: int = 20, seed: int = 0, poly_degree: int | None = None
) -> float:
    """max |<Au,v> - <u,Av>| / (|u||v|(1 + |A|)) over random domain pairs.

    With `poly_degree` set, random vectors are drawn from the domain's
    intersection with sampled polynomials of that degree (used for the
    singular fourth-order kind, where rough nodal vectors are meaningless).
    """
    rng = np.random.default_rng(seed)
    n = op.grid.N + 1

    if poly_degree is not None:
        V = np.vander(op.grid.nodes, poly_degree + 1, increasing=True)
        basis = np.zeros((n + op.model.k, poly_degree + 1 + op.model.k), dtype=complex)
        basis[:n, : poly_degree + 1] = V
        if op.model.k:
            basis[n:, poly_degree + 1 :] = np.eye(op.model.k)
        lift = op.bc.canonical @ _trace_lift(op)
        constrained = lift @ basis
        null = scipy.linalg.null_space(constrained)
        sample_basis = basis @ null
    else:
        sample_basis = op.P
    # operator scale on the subspace actually probed
    q, _ = np.linalg.qr(sample_basis)
    nrmA = np.linalg.norm(q.conj().T @ op.Gram_full @ op.A_full @ q, 2) if q.size else 0.0

    dim = sample_basis.shape[1]
    worst = 0.0
    for _ in range(trials):
        u = sample_basis @ (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
        v = sample_basis @ (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
        Au, Av = op.A_full @ u, op.A_full @ v
        num = abs(op.inner(Au, v) - op.inner(u, Av))
        den = op.norm(u) * op.norm(v) * (1.0 + nrmA)
        if den > 0:
            worst = max(worst, num / den)
    return worst


def _trace_lift(op: DiscreteExtendedOperator) -> np.ndarray:
    n = op.grid.N + 1
    k = op.model.k
    lift = np.zeros((op.model.trace_dim + k, n + k), dtype=complex)
    lift[: op.model.trace_dim, :n] = trace_rows(op.grid, op.model.expr)
    if k:
        lift[op.model.trace_dim :, n:] = np.eye(k)
    return lift


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray    # sorted by |lambda|, then real part
    residuals: np.ndarray
    max_imag: float
    symmetry_defect: float
    seed: int

    def to_json(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "residuals": [float(r) for r in self.residuals],
            "max_imag": float(self.max_imag),
            "symmetry_defect": float(self.symmetry_defect),
            "seed": self.seed,
        }


def spectrum(op: DiscreteExtendedOperator, count: int, seed: int = 0) -> SpectrumReport:
    """Generalized eigenvalues of the reduced pair, smallest |lambda| first.

    Realness is measured from the solver output, never assumed.
    """
    if count > op.reduced_dim:
        raise SpectralError(f"requested {count} eigenvalues, reduced dim {op.reduced_dim}")
    try:
        evals, evecs = scipy.linalg.eig(op.A_red, op.Gram_red)
    except scipy.linalg.LinAlgError as e:  # pragma: no cover
        cond = np.linalg.cond(op.Gram_red)
        raise SpectralError(f"eigensolver failed (Gram condition {cond:.3e}): {e}")
    order = np.lexsort((evals.real, np.abs(evals)))
    evals, evecs = evals[order][:count], evecs[:, order][:, :count]
    resids = np.zeros(count)
    scale = np.linalg.norm(op.A_red, 2) + np.abs(evals).max(initial=0.0)
    for i in range(count):
        v = evecs[:, i]
        r = op.A_red @ v - evals[i] * (op.Gram_red @ v)
        resids[i] = np.linalg.norm(r) / (np.linalg.norm(v) * max(scale, 1.0))
    defect = symmetry_defect(op)
    return SpectrumReport(
        eigenvalues=evals,
        residuals=resids,
        max_imag=float(np.abs(evals.imag).max(initial=0.0)),
        symmetry_defect=defect,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# shooting oracle


def _fundamental_traces(expr: DiffExpr, lam: float, rtol: float = 1e-11):
    """Traces of a fundamental solution system of l x = lam x via adaptive RK."""
    a, b = (float(v) for v in expr.interval)
    if isinstance(expr, Fourier):
        # y'' = -lam y, two initial-value columns
        def rhs(_, y):
            y1, dy1, y2, dy2 = y
            return [dy1, -lam * y1, dy2, -lam * y2]

        sol = solve_ivp(
            rhs, (a, b), [1.0, 0.0, 0.0, 1.0], method="DOP853", rtol=rtol, atol=1e-13
        )
        y = sol.y[:, -1]
        tr1 = np.array([1.0, 0.0, y[0], y[1]])
        tr2 = np.array([0.0, 1.0, y[2], y[3]])
        return [tr1, tr2]
    if isinstance(expr, FirstOrderI):
        # i x' = lam x
        def rhs(_, y):
            return [-1j * lam * y[0]]

        sol = solve_ivp(
            rhs, (a, b), [1.0 + 0.0j], method="DOP853", rtol=rtol, atol=1e-13
        )
        return [np.array([1.0 + 0.0j, sol.y[0, -1]])]
    raise SpectralError("shooting supports the first- and second-order kinds only")


def characteristic_value(model: ExtendedModel, bc: BoundaryConditions, lam: float) -> float:
    """Real characteristic function whose zeros are the eigenvalues.

    Assembles the square system (boundary rows, W eigen-rows) on the
    fundamental-solution coefficients and the W coordinates.  For the
    first-order kind the determinant is made real by a unimodular phase;
    a non-negligible imaginary remainder raises.
    """
    expr = model.expr
    k = model.k
    fund = _fundamental_traces(expr, lam)
    ncols = len(fund) + k
    M = np.zeros((bc.canonical.shape[0] + k, ncols), dtype=complex)
    for i, row in enumerate(bc.canonical):
        for j, tr in enumerate(fund):
            M[i, j] = row[: model.trace_dim] @ tr
        M[i, len(fund) :] = row[model.trace_dim :]
    for i in range(k):
        for j, tr in enumerate(fund):
            M[bc.canonical.shape[0] + i, j] = -(model.Omega @ tr)[i]
        M[bc.canonical.shape[0] + i, len(fund) :] = (
            model.B.matrix[i] - lam * np.eye(k)[i]
        )
    if M.shape[0] != M.shape[1]:
        raise SpectralError(
            f"characteristic system is {M.shape[0]}x{M.shape[1]}; need def(T0) "
            f"boundary rows for a square system"
        )
    det = np.linalg.det(M)
    if isinstance(expr, FirstOrderI):
        a, b = (float(v) for v in expr.interval)
        det = det * np.exp(1j * lam * (b - a) / 2.0)
    # integration noise in Im(det) scales with the determinant's natural
    # size, not with Re(det), which vanishes at eigenvalues
    hadamard = float(np.prod(np.maximum(np.linalg.norm(M, axis=1), 1e-30)))
    if abs(det.imag) > 1e-6 * max(hadamard, 1.0):
        raise SpectralError(
            f"characteristic determinant is not real at lambda = {lam} "
            f"(got {det:.3e}); complex-coefficient B is outside the oracle's scope"
        )
    return float(det.real)


def shooting_oracle(
    model: ExtendedModel,
    bc: BoundaryConditions,
    lam_window: tuple[float, float],
    scan_points: int = 240,
) -> list[float]:
    """Eigenvalues in the window by scanning the characteristic function.

    Sign changes are bracketed on a uniform scan and refined by Brent's
    method to 1e-10; windows without sign changes yield an empty list.
    """
    lo, hi = lam_window
    if not lo < hi:
        raise SpectralError("empty window")
    grid = np.linspace(lo, hi, scan_points)
    vals = np.array([characteristic_value(model, bc, lam) for lam in grid])
    roots = []
    for i in range(len(grid) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            roots.append(float(grid[i]))
        elif v0 * v1 < 0:
            r = brentq(
                lambda lam: characteristic_value(model, bc, lam),
                grid[i],
                grid[i + 1],
                xtol=1e-10,
                rtol=8.9e-16,
            )
            roots.append(float(r))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return sorted(roots)


# ---------------------------------------------------------------------------
# eigen-relation residuals


def eigenrelation_residual(
    model: ExtendedModel,
    grid: CollocationGrid,
    x,
    a: np.ndarray,
    lam: complex,
) -> float:
    """||T_hat(x, a) - lam (x, a)|| in the quadrature + G norm.

    `x` may be an ExpSolution (exact exponential derivatives) or a Poly
    (exact expression application); samples are taken on the grid.
    """
    from .expressions import apply_expr, trace_of_poly

    a = np.asarray(a, dtype=complex).reshape(-1)
    if isinstance(x, ExpSolution):
        h_action = x.apply(grid.nodes)
        h_val = x.value(grid.nodes)
        tr = x.trace()
    elif isinstance(x, Poly):
        lx = apply_expr(model.expr, x)
        h_action = np.array([complex(lx(u)) for u in grid.nodes])
        h_val = np.array([complex(x(u)) for u in grid.nodes])
        tr = trace_of_poly(model.expr, x)
    else:
        raise ModelError("x must be an ExpSolution or a Poly")
    h_res = h_action - lam * h_val
    w_res = model.B.matrix @ a - model.omega_of(tr) - lam * a if model.k else np.zeros(0)
    h_part = (h_res.conj() @ grid.gram @ h_res).real
    w_part = (w_res.conj() @ model.W.G @ w_res).real if model.k else 0.0
    return float(np.sqrt(max(h_part + w_part, 0.0)))
