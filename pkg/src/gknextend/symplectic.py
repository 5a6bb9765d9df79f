"""Finite-dimensional complex symplectic linear algebra.

A skew-Hermitian form on C^m is evaluated as ``form(x, y) = y* S x``
(linear in the first slot, conjugate-linear in the second), so that
``form(x, y) == -conj(form(y, x))``.  Rank and degeneracy decisions go
through SVD with relative thresholds; subspaces are compared by mutual
projection residuals, never by basis identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_SKEW = 1e-12
TOL_RANK = 1e-8
TOL_FORM = 1e-10
TOL_RADICAL = 1e-10


class SymplecticError(ValueError):
    """Violated precondition or invariant in symplectic algebra."""


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return m


@dataclass(frozen=True)
class SkewForm:
    """Skew-Hermitian sesquilinear form on C^m, optionally nondegenerate."""

    matrix: np.ndarray
    nondegenerate: bool = False

    def __post_init__(self):
        S = _as_matrix(self.matrix)
        if S.shape[0] != S.shape[1]:
            raise SymplecticError(f"form matrix must be square, got {S.shape}")
        object.__setattr__(self, "matrix", S)
        scale = 1.0 + np.abs(S).max(initial=0.0)
        skew = np.abs(S + S.conj().T).max(initial=0.0)
        if skew > TOL_SKEW * scale:
            raise SymplecticError(f"matrix is not skew-Hermitian: residual {skew:.3e}")
        if self.nondegenerate and self.dim > 0:
            sv = np.linalg.svd(S, compute_uv=False)
            if sv[-1] <= TOL_RANK * sv[0]:
                raise SymplecticError(
                    f"form flagged nondegenerate but smallest/largest singular "
                    f"value = {sv[-1]:.3e}/{sv[0]:.3e}"
                )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^m given by a full-column-rank basis matrix (m x r)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        B = _as_matrix(self.basis)
        if B.size == 0:
            B = B.reshape(self.ambient_dim, 0)
        if B.shape[0] != self.ambient_dim:
            raise SymplecticError(
                f"basis has {B.shape[0]} rows, ambient dim is {self.ambient_dim}"
            )
        if B.shape[1] > self.ambient_dim:
            raise SymplecticError("more basis vectors than ambient dimension")
        if B.shape[1] > 0:
            sv = np.linalg.svd(B, compute_uv=False)
            if sv[-1] <= TOL_RANK * sv[0]:
                raise SymplecticError("basis is numerically rank-deficient")
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthonormal(self) -> np.ndarray:
        if self.dim == 0:
            return self.basis
        q, _ = np.linalg.qr(self.basis)
        return q

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0)))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.eye(ambient_dim))


# ---------------------------------------------------------------------------
# basic numerical subspace machinery


def nullspace(A: np.ndarray, rtol: float = TOL_RANK) -> np.ndarray:
    """Orthonormal basis of the nullspace of A (columns)."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if A.shape[0] == 0 or A.size == 0:
        return np.eye(A.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(A)
    if s.size:
        r = int(np.sum(s > rtol * s[0]))
    else:
        r = 0
    return vh[r:].conj().T


def matrix_rank(A: np.ndarray, rtol: float = TOL_RANK) -> int:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


def orth_complement(V: Subspace) -> np.ndarray:
    """Orthonormal basis of the Euclidean orthogonal complement."""
    if V.dim == 0:
        return np.eye(V.ambient_dim, dtype=complex)
    return nullspace(V.orthonormal().conj().T)


def subspace_contains(big: Subspace, small: Subspace, tol: float = TOL_RANK) -> bool:
    """True iff every vector of `small` lies in `big` (projection residual)."""
    if small.dim == 0:
        return True
    if big.dim == 0:
        return False
    Q = big.orthonormal()
    P = small.orthonormal()
    resid = P - Q @ (Q.conj().T @ P)
    return bool(np.abs(resid).max() <= tol)


def subspaces_equal(a: Subspace, b: Subspace, tol: float = TOL_RANK) -> bool:
    return subspace_contains(a, b, tol) and subspace_contains(b, a, tol)


# ---------------------------------------------------------------------------
# form operations


def form_eval(F: SkewForm, x, y) -> complex:
    """Evaluate form(x, y) = y* S x."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    y = np.asarray(y, dtype=complex).reshape(-1)
    if x.shape[0] != F.dim or y.shape[0] != F.dim:
        raise SymplecticError(
            f"vector lengths {x.shape[0]}, {y.shape[0]} do not match form dim {F.dim}"
        )
    return complex(y.conj() @ F.matrix @ x)


def radical(F: SkewForm) -> Subspace:
    """Orthonormal basis of {x : form(x, y) = 0 for all y} = null(S)."""
    return Subspace(F.dim, nullspace(F.matrix))


def quotient_by(F: SkewForm, M: Subspace) -> tuple[SkewForm, np.ndarray]:
    """Quotient form on an orthonormal complement basis of M.

    Requires M inside the radical of F (that is what makes the quotient
    well defined).  Returns the reduced form together with the complement
    basis Q (columns), so callers can push ambient vectors to quotient
    coordinates via Q* v.
    """
    if M.ambient_dim != F.dim:
        raise SymplecticError("subspace ambient dimension does not match form")
    if M.dim > 0:
        Q_M = M.orthonormal()
        scale = 1.0 + np.abs(F.matrix).max(initial=0.0)
        resid = np.abs(F.matrix @ Q_M).max(initial=0.0)
        if resid > TOL_RADICAL * scale:
            j = int(np.argmax(np.abs(F.matrix @ Q_M).sum(axis=0)))
            raise SymplecticError(
                f"subspace is not inside the radical: basis vector {j} has "
                f"form residual {resid:.3e}"
            )
    Q = orth_complement(M)
    S_red = Q.conj().T @ F.matrix @ Q
    # clean rounding so the reduced matrix is skew-Hermitian to working precision
    S_red = 0.5 * (S_red - S_red.conj().T)
    if S_red.shape[0] == 0:
        return SkewForm(S_red, nondegenerate=False), Q
    sv = np.linalg.svd(S_red, compute_uv=False)
    nondeg = bool(sv[0] > 0 and sv[-1] > TOL_RANK * sv[0])
    return SkewForm(S_red, nondegenerate=nondeg), Q


def is_lagrangian(F: SkewForm, L: Subspace) -> bool:
    """True iff the form vanishes identically on L."""
    if L.dim == 0:
        return True
    Q = L.orthonormal()
    vals = Q.conj().T @ F.matrix @ Q
    scale = 1.0 + np.abs(F.matrix).max(initial=0.0)
    return bool(np.abs(vals).max() <= TOL_FORM * scale)


def symplectic_complement(F: SkewForm, L: Subspace) -> Subspace:
    """{x : form(x, l) = 0 for all l in L} = null(B_L* S)."""
    if L.dim == 0:
        return Subspace.full(F.dim)
    rows = L.basis.conj().T @ F.matrix
    return Subspace(F.dim, nullspace(rows))


def is_complete_lagrangian(F: SkewForm, L: Subspace) -> bool:
    """Lagrangian and equal to its own symplectic complement.

    Only meaningful for nondegenerate forms; degenerate input must be
    quotiented by its radical first.
    """
    if not F.nondegenerate:
        raise SymplecticError(
            "complete-Lagrangian test needs a nondegenerate form; quotient "
            "by the radical first"
        )
    if not is_lagrangian(F, L):
        return False
    return subspaces_equal(symplectic_complement(F, L), L)


@dataclass(frozen=True)
class GknCheck:
    independent_mod_M: bool
    symmetric: bool

    @property
    def ok(self) -> bool:
        return self.independent_mod_M and self.symmetric


def check_gkn_vectors(F: SkewForm, M: Subspace, V) -> GknCheck:
    """Independence modulo M (joint rank) and pairwise form vanishing."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in V]
    for v in vecs:
        if v.shape[0] != F.dim:
            raise SymplecticError("candidate vector has wrong ambient dimension")
    if vecs:
        stacked = np.column_stack(vecs)
        joint = np.hstack([M.basis, stacked]) if M.dim else stacked
        independent = matrix_rank(joint) == M.dim + len(vecs)
    else:
        independent = True
    scale = 1.0 + np.abs(F.matrix).max(initial=0.0)
    symmetric = True
    for vi in vecs:
        ni = 1.0 + np.linalg.norm(vi)
        for vj in vecs:
            nj = 1.0 + np.linalg.norm(vj)
            if abs(form_eval(F, vi, vj)) > TOL_FORM * scale * ni * nj:
                symmetric = False
    return GknCheck(independent_mod_M=independent, symmetric=symmetric)


# ---------------------------------------------------------------------------
# test utility: sampling complete Lagrangians of a nondegenerate form


def random_complete_lagrangian(F: SkewForm, rng: np.random.Generator) -> Subspace:
    """Random complete Lagrangian of a nondegenerate balanced form.

    Diagonalize the Hermitian matrix iS; a subspace is Lagrangian iff it is
    isotropic for that Hermitian form, and the maximal isotropic subspaces of
    a signature-(d, d) form are exactly the graphs of unitaries between the
    positive and negative eigenspaces.
    """
    if not F.nondegenerate:
        raise SymplecticError("need a nondegenerate form")
    H = 1j * F.matrix
    H = 0.5 * (H + H.conj().T)
    evals, evecs = np.linalg.eigh(H)
    pos = evals > 0
    neg = evals < 0
    d_pos, d_neg = int(pos.sum()), int(neg.sum())
    if d_pos != d_neg:
        raise SymplecticError(
            f"form has unbalanced signature ({d_pos}, {d_neg}); no complete "
            f"Lagrangian exists"
        )
    # scale eigenvectors so the Hermitian form is exactly +/-1 on them
    Up = evecs[:, pos] / np.sqrt(evals[pos])
    Un = evecs[:, neg] / np.sqrt(-evals[neg])
    z = rng.standard_normal((d_pos, d_pos)) + 1j * rng.standard_normal((d_pos, d_pos))
    K, _ = np.linalg.qr(z)
    return Subspace(F.dim, Up + Un @ K)
