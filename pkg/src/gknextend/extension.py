"""Extended-space machinery: W, B, Psi, Omega, and boundary conditions.

Vectors of the extended boundary space are stacked as (trace coords, W
coords) in C^(2d+k), with W kept in *standard* coordinates and its inner
product carried by an explicit Gram matrix G: <a, b>_W = b* G a.  The
columns of Xi are the G-orthonormal basis against which the coupling map
Omega is expanded, Omega(tr x) = Xi (T* S tr x) with T the column matrix
of the partial-GKN traces.

The extended skew form on C^(2d+k) is then

    F_ext((x,a),(y,b)) = y* S x - b* G Omega x + (Omega y)* G a,

whose matrix is [[S, Omega* G], [-G Omega, 0]].  The span of the pairs
(t_j, xi_j) is always inside its radical; quotienting by it leaves a
nondegenerate form of dimension 2 * def, the finite shadow of the
boundary space of the extended minimal operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import symplectic as sym
from .expressions import (
    BoundaryForm,
    DiffExpr,
    ExpSolution,
    ExpressionError,
    PatchFunction,
    TraceVector,
    apply_expr,
    deficiency_index,
    deficiency_solutions,
    trace_of_poly,
)
from .polynomials import Poly
from .symplectic import SkewForm, Subspace

TOL_BUILD = 1e-12
TOL_PIVOT = 1e-12
TOL_SPAN = 1e-10


class ModelError(ValueError):
    """Rejected extension-model input."""


@dataclass(frozen=True)
class ExtensionSpace:
    """Finite-dimensional W with Gram matrix G and G-orthonormal basis Xi."""

    k: int
    G: np.ndarray
    Xi: np.ndarray = None

    def __post_init__(self):
        G = np.asarray(self.G, dtype=complex).reshape(self.k, self.k)
        if np.abs(G - G.conj().T).max(initial=0.0) > TOL_BUILD * (1 + np.abs(G).max(initial=0.0)):
            raise ModelError("Gram matrix must be Hermitian")
        if self.k and np.linalg.eigvalsh(G).min() <= 0:
            raise ModelError("Gram matrix must be positive definite")
        object.__setattr__(self, "G", G)
        if self.Xi is None:
            # G = L L*  =>  columns of L^{-*} are G-orthonormal
            L = np.linalg.cholesky(G) if self.k else np.zeros((0, 0))
            Xi = np.linalg.inv(L).conj().T if self.k else L
        else:
            Xi = np.asarray(self.Xi, dtype=complex).reshape(self.k, self.k)
        object.__setattr__(self, "Xi", Xi)
        if self.k:
            resid = np.abs(Xi.conj().T @ G @ Xi - np.eye(self.k)).max()
            if resid > 1e-10:
                raise ModelError(f"Xi is not G-orthonormal (residual {resid:.3e})")

    def inner(self, a, b) -> complex:
        """<a, b>_W = b* G a."""
        a = np.asarray(a, dtype=complex).reshape(-1)
        b = np.asarray(b, dtype=complex).reshape(-1)
        return complex(b.conj() @ self.G @ a)


@dataclass(frozen=True)
class OperatorB:
    """Operator on W, self-adjoint with respect to the G inner product."""

    matrix: np.ndarray

    @staticmethod
    def zero(k: int) -> "OperatorB":
        return OperatorB(np.zeros((k, k)))

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    def check_against(self, W: ExtensionSpace):
        GB = W.G @ self.matrix
        resid = np.abs(GB - GB.conj().T).max(initial=0.0)
        if resid > 1e-10 * (1 + np.abs(GB).max(initial=0.0)):
            raise ModelError(
                f"B is not self-adjoint for the W inner product (GB residual {resid:.3e})"
            )


@dataclass(frozen=True)
class PartialGKNSet:
    """Up to def(T0) maximal-domain traces, independent, pairwise symmetric."""

    traces: tuple

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))

    def __len__(self) -> int:
        return len(self.traces)

    def matrix(self) -> np.ndarray:
        if not self.traces:
            return np.zeros((0, 0), dtype=complex)
        return np.column_stack([t.as_array() for t in self.traces])


@dataclass(frozen=True)
class ExtendedModel:
    boundary: BoundaryForm
    W: ExtensionSpace
    B: OperatorB
    gkn_partial: PartialGKNSet
    Omega: np.ndarray          # k x 2d, acts on trace coordinates
    F_ext: SkewForm            # on C^(2d + k)
    M_min: Subspace            # span{(t_j, xi_j)}

    @property
    def expr(self) -> DiffExpr:
        return self.boundary.expr

    @property
    def trace_dim(self) -> int:
        return self.boundary.arity

    @property
    def k(self) -> int:
        return self.W.k

    @property
    def ambient_dim(self) -> int:
        return self.trace_dim + self.k

    @property
    def deficiency(self) -> int:
        return deficiency_index(self.expr)

    def stack(self, trace, w) -> np.ndarray:
        """(trace, W) pair as a vector of the extended boundary space."""
        t = trace.as_array() if isinstance(trace, TraceVector) else np.asarray(trace, dtype=complex)
        w = np.asarray(w, dtype=complex).reshape(-1)
        if t.shape[0] != self.trace_dim or w.shape[0] != self.k:
            raise ModelError("stacked vector has wrong trace or W dimension")
        return np.concatenate([t, w])

    def omega_of(self, trace) -> np.ndarray:
        t = trace.as_array() if isinstance(trace, TraceVector) else np.asarray(trace, dtype=complex)
        return self.Omega @ t

    def labels(self) -> tuple[str, ...]:
        return self.boundary.labels + tuple(f"a_W[{j+1}]" for j in range(self.k))


def build_model(
    bf: BoundaryForm,
    W: ExtensionSpace,
    B: OperatorB,
    T: PartialGKNSet,
) -> ExtendedModel:
    """Assemble Omega, the extended form, and the minimal-pair span.

    Rejects inputs violating the construction's standing assumptions:
    dim W <= def(T0), |T| = dim W, T independent with pairwise vanishing
    boundary form, B self-adjoint for the W Gram.
    """
    expr = bf.expr
    ndef = deficiency_index(expr)
    if W.k > ndef:
        raise ModelError(
            f"dim W = {W.k} exceeds the deficiency index {ndef}; the "
            f"construction requires dim W <= def(T0)"
        )
    if len(T) != W.k:
        raise ModelError(f"partial GKN set has {len(T)} vectors, dim W = {W.k}")
    if B.matrix.shape != (W.k, W.k):
        raise ModelError("B has wrong shape for W")
    B.check_against(W)

    S = bf.form.matrix
    Tm = T.matrix() if W.k else np.zeros((bf.arity, 0), dtype=complex)
    if W.k:
        if Tm.shape[0] != bf.arity:
            raise ModelError("partial GKN traces have wrong arity for this expression")
        if sym.matrix_rank(Tm) != W.k:
            raise ModelError("partial GKN traces are linearly dependent")
        vals = Tm.conj().T @ S @ Tm
        scale = 1.0 + np.abs(S).max() * (1 + np.abs(Tm).max()) ** 2
        bad = np.argwhere(np.abs(vals) > sym.TOL_FORM * scale)
        if bad.size:
            i, j = bad[0]
            raise ModelError(
                f"partial GKN set breaks the symmetry condition: "
                f"[t_{i+1}, t_{j+1}]_H = {vals[j, i]:.3e}"
            )

    Omega = W.Xi @ (Tm.conj().T @ S) if W.k else np.zeros((0, bf.arity), dtype=complex)
    m = bf.arity + W.k
    F = np.zeros((m, m), dtype=complex)
    F[: bf.arity, : bf.arity] = S
    if W.k:
        F[: bf.arity, bf.arity :] = Omega.conj().T @ W.G
        F[bf.arity :, : bf.arity] = -W.G @ Omega
    F = 0.5 * (F - F.conj().T)
    F_ext = SkewForm(F, nondegenerate=False)

    if W.k:
        M_min = Subspace(m, np.vstack([Tm, W.Xi]))
    else:
        M_min = Subspace.zero(m)

    model = ExtendedModel(bf, W, B, T, Omega, F_ext, M_min)

    # construction invariants, checked at build time
    if W.k:
        resid = np.abs(Omega @ Tm).max(initial=0.0)
        if resid > TOL_BUILD * (1 + np.abs(Omega).max()):
            raise ModelError(f"Omega does not annihilate the partial GKN set ({resid:.3e})")
    if not sym.subspace_contains(sym.radical(F_ext), M_min, tol=1e-10):
        raise ModelError("minimal pairs (t_j, xi_j) escaped the radical of the extended form")
    return model


def psi(model: ExtendedModel, t) -> np.ndarray:
    """Psi on Delta_0 traces: t = sum alpha_j t_j maps to sum alpha_j xi_j."""
    tv = t.as_array() if isinstance(t, TraceVector) else np.asarray(t, dtype=complex)
    if model.k == 0:
        if np.abs(tv).max(initial=0.0) > TOL_SPAN:
            raise ModelError("trace is not in Delta_0 modulo the minimal domain")
        return np.zeros(0, dtype=complex)
    Tm = model.gkn_partial.matrix()
    alpha, *_ = np.linalg.lstsq(Tm, tv, rcond=None)
    resid = np.abs(Tm @ alpha - tv).max(initial=0.0)
    if resid > TOL_SPAN * (1 + np.abs(tv).max(initial=0.0)):
        raise ModelError(
            f"trace is not in Delta_0 modulo the minimal domain (residual {resid:.3e})"
        )
    return model.W.Xi @ alpha


def maximal_action(model: ExtendedModel, x, a):
    """Action (l x, B a - Omega tr x) of the extended maximal operator.

    `x` may be a Poly (exact expression application, exact traces) or a
    PatchFunction (piecewise-polynomial application on its own grid).
    Returns (H part, W part); the W part is a plain complex vector.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    if isinstance(x, Poly):
        h_part = apply_expr(model.expr, x)
        tr = trace_of_poly(model.expr, x)
    elif isinstance(x, PatchFunction):
        from .expressions import coefficient_polys

        vals = np.zeros(x.grid.shape, dtype=complex)
        for j, c in coefficient_polys(model.expr):
            cs = np.array([complex(c(float(u))) for u in x.grid])
            vals += cs * x(x.grid, order=j)
        h_part = vals
        tr = x.trace
    else:
        raise ModelError("x must be a Poly or a PatchFunction")
    w_part = model.B.matrix @ a - model.omega_of(tr)
    return h_part, w_part


@dataclass(frozen=True)
class ExtendedGknReport:
    independent_mod_min: bool
    symmetric: bool
    count_ok: bool

    @property
    def ok(self) -> bool:
        return self.independent_mod_min and self.symmetric and self.count_ok


def check_gkn_extended(model: ExtendedModel, candidates: Sequence) -> ExtendedGknReport:
    """GKN conditions for (trace, W) pairs, modulo the minimal pairs."""
    vecs = [model.stack(t, w) for t, w in candidates]
    res = sym.check_gkn_vectors(model.F_ext, model.M_min, vecs)
    return ExtendedGknReport(
        independent_mod_min=res.independent_mod_M,
        symmetric=res.symmetric,
        count_ok=len(candidates) == model.deficiency,
    )


# ---------------------------------------------------------------------------
# boundary conditions


def rref(C: np.ndarray, tol: float = TOL_PIVOT) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form with relative pivot tolerance."""
    R = np.array(C, dtype=complex)
    rows, cols = R.shape
    scale = np.abs(R).max(initial=0.0)
    if scale == 0:
        return R, []
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[piv, c]) <= tol * scale:
            continue
        R[[r, piv]] = R[[piv, r]]
        R[r] = R[r] / R[r, c]
        for rr in range(rows):
            if rr != r and abs(R[rr, c]) > 0:
                R[rr] = R[rr] - R[rr, c] * R[r]
        pivots.append(c)
        r += 1
    R[np.abs(R) <= tol * max(1.0, scale)] = 0.0
    # pivot columns exactly canonical
    for i, c in enumerate(pivots):
        R[:, c] = 0.0
        R[i, c] = 1.0
    return R, pivots


def _fmt_coeff(z: complex) -> str:
    if abs(z.imag) <= 1e-12 * (1 + abs(z.real)):
        v = z.real
        if v == int(v):
            return str(int(v))
        return f"{v:.12g}"
    return f"({z.real:.12g}{z.imag:+.12g}i)"


def _fmt_terms(coeffs: np.ndarray, labels: Sequence[str]) -> str:
    parts = []
    for c, lab in zip(coeffs, labels):
        if c == 0:
            continue
        s = _fmt_coeff(c)
        if s == "1":
            parts.append(("+", lab))
        elif s == "-1":
            parts.append(("-", lab))
        elif s.startswith("-"):
            parts.append(("-", f"{s[1:]}*{lab}"))
        else:
            parts.append(("+", f"{s}*{lab}"))
    if not parts:
        return "0"
    out = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
    for sign, txt in parts[1:]:
        out += f" {sign} {txt}"
    return out


@dataclass(frozen=True)
class BoundaryConditions:
    """Constraint rows on (trace, W) vectors with a canonical reduced form."""

    C: np.ndarray
    canonical: np.ndarray
    pivots: tuple[int, ...]
    labels: tuple[str, ...]
    human_readable: tuple[str, ...]

    @property
    def count(self) -> int:
        return self.C.shape[0]


def render_rows(canonical: np.ndarray, labels: Sequence[str], trace_dim: int) -> tuple[str, ...]:
    """One equality per row: solved for the W coordinate when one is present.

    Rows that couple a W coordinate render as `a_W[j] = <trace terms>`,
    mirroring how the worked examples state their conditions; pure trace
    rows render with the pivot on the left.
    """
    out = []
    for row in canonical:
        if np.abs(row).max(initial=0.0) == 0:
            out.append("0 = 0 (degenerate row)")
            continue
        w_idx = [j for j in range(trace_dim, len(row)) if row[j] != 0]
        if w_idx:
            j = w_idx[0]
        else:
            j = int(np.flatnonzero(row)[0])
        rest = -row / row[j]
        rest[j] = 0.0
        out.append(f"{labels[j]} = {_fmt_terms(rest, labels)}")
    return tuple(out)


def derive_boundary_conditions(model: ExtendedModel, candidates: Sequence) -> BoundaryConditions:
    """Constraint matrix whose row j is (x,a) -> F_ext((x,a), (x_j,a_j)).

    The candidates must pass `check_gkn_extended`; the rows of a valid GKN
    set are automatically independent, so a rank-deficient result is
    reported as an internal inconsistency.
    """
    report = check_gkn_extended(model, candidates)
    if not report.ok:
        raise ModelError(
            f"candidates are not a GKN set for the extended minimal operator: {report}"
        )
    rows = [model.stack(t, w).conj() @ model.F_ext.matrix for t, w in candidates]
    C = np.vstack(rows)
    canonical, pivots = rref(C)
    if len(pivots) != model.deficiency:
        raise ModelError(
            f"internal inconsistency: derived constraints have rank {len(pivots)}, "
            f"expected {model.deficiency}"
        )
    labels = model.labels()
    rendered = render_rows(canonical, labels, model.trace_dim)
    return BoundaryConditions(C, canonical, tuple(pivots), labels, rendered)


def boundary_conditions_from_rows(model: ExtendedModel, rows: np.ndarray) -> BoundaryConditions:
    """Wrap explicit constraint rows (no GKN provenance implied)."""
    C = np.atleast_2d(np.asarray(rows, dtype=complex))
    canonical, pivots = rref(C)
    labels = model.labels()
    return BoundaryConditions(
        C, canonical, tuple(pivots), labels, render_rows(canonical, labels, model.trace_dim)
    )


def verify_self_adjoint_domain(model: ExtendedModel, bc: BoundaryConditions) -> bool:
    """Does the constrained domain correspond to a self-adjoint restriction?

    The nullspace of the constraint rows, pushed into the quotient of the
    extended form by the minimal pairs, must be a complete Lagrangian of
    dimension def(T0).
    """
    N = sym.nullspace(bc.C)
    Fq, Q = sym.quotient_by(model.F_ext, model.M_min)
    if Fq.dim != 2 * model.deficiency or not Fq.nondegenerate:
        return False
    coords = Q.conj().T @ N
    # columns of N are orthonormal, so genuine quotient content has O(1)
    # singular values; an absolute cutoff correctly reports rank 0 when the
    # nullspace collapsed into the minimal pairs
    s = np.linalg.svd(coords, compute_uv=False) if coords.size else np.zeros(0)
    rank = int(np.sum(s > sym.TOL_RANK))
    if rank != model.deficiency:
        return False
    u, s, _ = np.linalg.svd(coords)
    L = Subspace(Fq.dim, u[:, :rank])
    return sym.is_complete_lagrangian(Fq, L)


# ---------------------------------------------------------------------------
# deficiency vectors in the extended space


@dataclass(frozen=True)
class ExtendedDeficiencyVector:
    solution: ExpSolution
    a: np.ndarray
    sign: int


def extended_deficiency_vectors(model: ExtendedModel, sign: int) -> list[ExtendedDeficiencyVector]:
    """Pairs (x, a) with the extended maximal action equal to sign*i*(x, a).

    x runs over the closed-form classical deficiency solutions and
    a = (B - sign*i I)^{-1} Omega x; the W-side eigen-relation is checked
    at build time.
    """
    sols = deficiency_solutions(model.expr, sign)
    out = []
    eye = np.eye(model.k)
    for s in sols:
        om = model.omega_of(s.trace())
        a = np.linalg.solve(model.B.matrix - sign * 1j * eye, om) if model.k else om[:0]
        w_resid = np.abs(model.B.matrix @ a - om - sign * 1j * a).max(initial=0.0)
        if w_resid > 1e-10 * (1 + np.abs(om).max(initial=0.0)):
            raise ModelError(f"deficiency vector failed its eigen-relation ({w_resid:.3e})")
        out.append(ExtendedDeficiencyVector(s, a, sign))
    return out


# ---------------------------------------------------------------------------
# JSON serialization


def _cmat_to_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def _cmat_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)


def _trace_to_json(t: TraceVector) -> list:
    flat = []
    for v in t.as_array():
        flat += [float(v.real), float(v.imag)]
    return flat


def _trace_from_json(data) -> TraceVector:
    vals = [complex(data[2 * i], data[2 * i + 1]) for i in range(len(data) // 2)]
    return TraceVector(tuple(vals))


def expr_to_json(expr: DiffExpr) -> dict:
    from . import expressions as ex
    from .polynomials import poly_to_json

    if isinstance(expr, ex.FirstOrderI):
        return {"kind": "first_order_i"}
    if isinstance(expr, ex.Fourier):
        return {"kind": "fourier", "a": str(expr.a), "b": str(expr.b)}
    if isinstance(expr, ex.LegendreType):
        return {"kind": "legendre_type", "A": str(expr.A)}
    if isinstance(expr, ex.GeneralEvenOrder):
        return {
            "kind": "general_even_order",
            "qs": [poly_to_json(q) for q in expr.qs],
            "a": str(expr.a),
            "b": str(expr.b),
        }
    raise ExpressionError(f"unknown expression kind {expr!r}")


def expr_from_json(data: dict) -> DiffExpr:
    from fractions import Fraction

    from . import expressions as ex
    from .polynomials import poly_from_json

    kind = data["kind"]
    if kind == "first_order_i":
        return ex.FirstOrderI()
    if kind == "fourier":
        return ex.Fourier(Fraction(data["a"]), Fraction(data["b"]))
    if kind == "legendre_type":
        return ex.LegendreType(Fraction(data["A"]))
    if kind == "general_even_order":
        return ex.GeneralEvenOrder(
            tuple(poly_from_json(q) for q in data["qs"]),
            Fraction(data["a"]),
            Fraction(data["b"]),
        )
    raise ExpressionError(f"unknown expression kind {kind!r}")


def model_to_json(model: ExtendedModel) -> dict:
    return {
        "expression": expr_to_json(model.expr),
        "G": _cmat_to_json(model.W.G),
        "B": _cmat_to_json(model.B.matrix),
        "Xi": _cmat_to_json(model.W.Xi),
        "gkn_traces": [_trace_to_json(t) for t in model.gkn_partial.traces],
    }


def model_from_json(data: dict) -> ExtendedModel:
    from .expressions import boundary_form

    expr = expr_from_json(data["expression"])
    G = _cmat_from_json(data["G"])
    Xi = _cmat_from_json(data["Xi"]) if "Xi" in data else None
    W = ExtensionSpace(G.shape[0], G, Xi)
    B = OperatorB(_cmat_from_json(data["B"]))
    T = PartialGKNSet(tuple(_trace_from_json(t) for t in data["gkn_traces"]))
    return build_model(boundary_form(expr), W, B, T)


def bc_to_json(bc: BoundaryConditions) -> dict:
    return {
        "rows": _cmat_to_json(bc.C),
        "canonical": _cmat_to_json(bc.canonical),
        "conditions": list(bc.human_readable),
    }
