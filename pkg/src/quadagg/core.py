"""Symmetric matrices, pencils, quadratic evaluation, restriction, sampling.

Everything downstream works with a triple of real symmetric (n+1)x(n+1)
matrices Q_1, Q_2, Q_3.  Each matrix carries the block structure

    Q_i = [ A_i   b_i ]
          [ b_i^T c_i ]

so that f_i(x) = x^T A_i x + 2 b_i^T x + c_i is the inhomogeneous quadratic
and f_i^h(x, t) = (x, t)^T Q_i (x, t) its homogenization.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySample, PreconditionFailed


def sym(M):
    """Symmetrize and return a float copy of a square matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise PreconditionFailed("expected a square matrix, got shape %s" % (M.shape,))
    if M.shape[0] < 2:
        raise PreconditionFailed("matrix dimension must be at least 2")
    return 0.5 * (M + M.T)


def default_tol(M):
    """Scale-aware eigenvalue zero threshold."""
    return 1e-9 * (1.0 + np.linalg.norm(M, "fro"))


@dataclass(frozen=True)
class Signature:
    """Eigenvalue sign counts of a symmetric matrix at a tolerance."""

    n_pos: int
    n_neg: int
    n_zero: int
    tol: float

    @property
    def dim(self):
        return self.n_pos + self.n_neg + self.n_zero

    def __iter__(self):
        return iter((self.n_pos, self.n_neg, self.n_zero))


def signature(M, tol=None):
    """Signature of a symmetric matrix.

    Eigenvalues with magnitude <= tol count as zero; tol defaults to
    1e-9 * (1 + ||M||_F).
    """
    M = sym(M)
    if tol is None:
        tol = default_tol(M)
    if tol < 0:
        raise PreconditionFailed("tol must be nonnegative")
    w = np.linalg.eigvalsh(M)
    n_pos = int(np.sum(w > tol))
    n_neg = int(np.sum(w < -tol))
    return Signature(n_pos, n_neg, len(w) - n_pos - n_neg, tol)


def _vectorize_upper(M):
    # upper triangle with off-diagonal entries scaled so the Euclidean inner
    # product of vectorizations equals the Frobenius inner product
    n = M.shape[0]
    iu = np.triu_indices(n)
    scale = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return M[iu] * scale


@dataclass(frozen=True)
class QuadraticTriple:
    """Three linearly independent symmetric (n+1)x(n+1) matrices."""

    Q: tuple  # three (n+1, n+1) symmetric arrays

    def __init__(self, Q1, Q2, Q3):
        Qs = tuple(sym(Q) for Q in (Q1, Q2, Q3))
        if not (Qs[0].shape == Qs[1].shape == Qs[2].shape):
            raise PreconditionFailed("the three matrices must share one shape")
        V = np.stack([_vectorize_upper(Q) for Q in Qs])
        norms = np.linalg.norm(V, axis=1)
        if np.any(norms == 0) or np.linalg.svd(V / norms[:, None], compute_uv=False)[-1] <= 1e-8:
            raise PreconditionFailed("Q1, Q2, Q3 must be linearly independent")
        object.__setattr__(self, "Q", Qs)

    @property
    def n(self):
        """Ambient dimension of x."""
        return self.Q[0].shape[0] - 1

    @property
    def dim(self):
        return self.Q[0].shape[0]

    def A(self, i):
        """n x n leading block of Q_i (0-based i)."""
        return self.Q[i][:-1, :-1]

    def b(self, i):
        return self.Q[i][:-1, -1]

    def c(self, i):
        return self.Q[i][-1, -1]

    def stacked(self):
        """The three matrices as one (3, n+1, n+1) array."""
        return np.stack(self.Q)


def pencil(T, lam):
    """The matrix Q_lam = lam_1 Q_1 + lam_2 Q_2 + lam_3 Q_3."""
    lam = np.asarray(lam, dtype=float)
    return np.einsum("k,kij->ij", lam, T.stacked())


def eval_homogeneous(T, lam, y):
    """(y)^T Q_lam (y) for an (n+1)-vector y."""
    y = np.asarray(y, dtype=float)
    return float(y @ pencil(T, lam) @ y)


def eval_quadratic(T, lam, x):
    """f_lam(x) = sum_i lam_i f_i(x) for an n-vector x."""
    x = np.asarray(x, dtype=float)
    return eval_homogeneous(T, lam, np.append(x, 1.0))


@dataclass(frozen=True)
class Hyperplane:
    """A hyperplane through the origin in R^{n+1} with an orthonormal basis
    of its tangent space."""

    normal: np.ndarray
    basis: np.ndarray  # (n+1, n), orthonormal columns, normal^T basis = 0

    @classmethod
    def from_normal(cls, v):
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0:
            raise PreconditionFailed("hyperplane normal must be nonzero")
        v = v / nv
        # complete v to an orthonormal basis; drop the column spanning v
        _, _, Vt = np.linalg.svd(v[None, :])
        return cls(normal=v, basis=Vt[1:].T.copy())

    @classmethod
    def affine(cls, alpha, beta):
        """Homogenization of the affine hyperplane {x : alpha^T x = beta}."""
        alpha = np.asarray(alpha, dtype=float)
        return cls.from_normal(np.append(alpha, -float(beta)))

    def __post_init__(self):
        B = self.basis
        if np.linalg.norm(B.T @ B - np.eye(B.shape[1])) > 1e-10:
            raise PreconditionFailed("hyperplane basis is not orthonormal")
        if np.linalg.norm(self.normal @ B) > 1e-10:
            raise PreconditionFailed("hyperplane basis is not orthogonal to normal")


def restrict(M, H):
    """Matrix representative B^T M B of the quadratic form restricted to H."""
    return sym(H.basis.T @ sym(M) @ H.basis)


def _box_bounds(box, n):
    box = np.asarray(box, dtype=float)
    if box.ndim == 1:
        box = np.tile(box, (n, 1))
    if box.shape != (n, 2) or np.any(box[:, 0] >= box[:, 1]):
        raise PreconditionFailed("box must give lo < hi per coordinate")
    return box


def grid_points(box, n, res):
    """Deterministic row-major grid of res^n points over the box."""
    box = _box_bounds(box, n)
    axes = [np.linspace(lo, hi, res) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def eval_all(T, X):
    """f_i(x) for each row x of X; returns shape (3, len(X))."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Xh = np.column_stack([X, np.ones(len(X))])
    return np.stack([np.einsum("ni,ij,nj->n", Xh, Q, Xh) for Q in T.Q])


def sample_S(T, box, grid=None, count=None, seed=0, strict=False, eps=1e-9):
    """Points of S = {x : f_i(x) <= 0 for all i} inside an axis-aligned box.

    Either `grid` (points per axis, deterministic row-major scan) or `count`
    (seeded uniform draws) selects the candidate set.  With strict=True only
    points with f_i(x) < -eps for all i are kept.
    """
    n = T.n
    if grid is not None:
        X = grid_points(box, n, int(grid))
    elif count is not None:
        rng = np.random.default_rng(seed)
        b = _box_bounds(box, n)
        X = rng.uniform(b[:, 0], b[:, 1], size=(int(count), n))
    else:
        raise PreconditionFailed("pass grid=res or count=N")
    F = eval_all(T, X)
    keep = (F < -eps).all(axis=0) if strict else (F <= eps).all(axis=0)
    pts = X[keep]
    if len(pts) == 0:
        raise EmptySample("no point of S found in the box (not a proof of emptiness)")
    return pts


def points_at_infinity(T, grid=10000, tol=1e-9):
    """Scan unit directions x for x^T A_i x <= tol for all i.

    Returns (True, None) when no such direction is found (no points at
    infinity, up to scan resolution), else (False, witness).
    """
    n = T.n
    rng = np.random.default_rng(12345)
    X = rng.standard_normal((int(grid), n))
    X /= np.linalg.norm(X, axis=1)[:, None]
    A = np.stack([T.A(i) for i in range(3)])
    vals = np.einsum("ni,kij,nj->kn", X, A, X)
    bad = (vals <= tol).all(axis=0)
    if bad.any():
        return False, X[np.argmax(bad)]
    return True, None
