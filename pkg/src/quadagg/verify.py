"""Desk-scale ground truth by dense sampling.

Sampled convex hulls (n = 2, 3), grid comparisons between the intersection
of aggregated sublevel sets and the convex hull of S, a regularity heuristic,
and a projective component-count oracle that cross-validates the spherical
level-set counts computed in `cones`.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize as sopt
from scipy.ndimage import binary_dilation, label
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, cKDTree

from .core import eval_all, grid_points, pencil, _box_bounds
from .errors import DegenerateInput, EmptySample, GridTooCoarse, PreconditionFailed
from .spectral import fibonacci_sphere


@dataclass(frozen=True)
class Hull:
    """A full-dimensional convex hull with an inequality representation
    {x : A x <= b}."""

    vertices: np.ndarray
    A: np.ndarray
    b: np.ndarray
    measure: float  # area (n=2) or volume (n=3)

    def contains(self, X, margin=1e-9):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(len(X), dtype=bool)
        step = max(1, 10_000_000 // max(1, len(self.A)))
        for s in range(0, len(X), step):
            blk = X[s : s + step]
            out[s : s + step] = (blk @ self.A.T <= self.b[None, :] + margin).all(axis=1)
        return out


def _monotone_chain(points):
    P = sorted(map(tuple, points))
    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                ux, uy = np.subtract(out[-1], out[-2])
                vx, vy = np.subtract(p, out[-2])
                if ux * vy - uy * vx > 0:
                    break
                out.pop()
            out.append(p)
        return out
    lower = half(P)
    upper = half(P[::-1])
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def convex_hull(points):
    """Convex hull of a point cloud in R^2 or R^3.

    n = 2 uses a monotone chain (vertices counter-clockwise from the
    lexicographic minimum); n = 3 an incremental hull.  Every input point
    satisfies the returned inequalities within 1e-9.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = P.shape[1]
    if n not in (2, 3):
        raise DegenerateInput("hulls are computed for dimension 2 or 3")
    if len(P) < n + 1:
        raise DegenerateInput("need at least n+1 points")
    C = P - P.mean(axis=0)
    sv = np.linalg.svd(C, compute_uv=False)
    if sv[-1] <= 1e-12 * (1 + sv[0]):
        raise DegenerateInput("points are affinely dependent")
    if n == 2:
        V = _monotone_chain(P)
        # inward edge walk is counter-clockwise: outward normal is the edge
        # direction rotated clockwise
        E = np.roll(V, -1, axis=0) - V
        A = np.column_stack([E[:, 1], -E[:, 0]])
        A /= np.linalg.norm(A, axis=1)[:, None]
        b = np.einsum("ij,ij->i", A, V)
        area = 0.5 * abs(
            float(np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1]))
        )
        return Hull(vertices=V, A=A, b=b, measure=area)
    h = ConvexHull(P, incremental=True)
    h.close()
    V = P[np.sort(h.vertices)]
    # coplanar simplicial facets share one inequality
    eqs = np.unique(np.round(h.equations, 9), axis=0)
    return Hull(vertices=V, A=eqs[:, :-1], b=-eqs[:, -1], measure=float(h.volume))


@dataclass(frozen=True)
class HullReport:
    n: int
    hullVertices: np.ndarray
    aggRegionMeasure: float
    hullMeasure: float
    gapMeasure: float
    equal: bool
    componentCounts: dict  # {"S": int, "agg": int}
    cellMeasure: float

    def to_json(self):
        return {
            "n": self.n,
            "hullVertices": np.asarray(self.hullVertices).tolist(),
            "aggRegionMeasure": self.aggRegionMeasure,
            "hullMeasure": self.hullMeasure,
            "gapMeasure": self.gapMeasure,
            "equal": self.equal,
            "componentCounts": dict(self.componentCounts),
            "cellMeasure": self.cellMeasure,
        }


def _lam_vectors(lambdas):
    out = []
    for lam in lambdas:
        v = lam.vec if hasattr(lam, "vec") else np.asarray(lam, dtype=float)
        out.append(v / np.linalg.norm(v))
    return out


def hull_check(T, lambdas, box=(-5, 5), grid=None, eps=1e-9):
    """Grid comparison of the aggregated region with the convex hull of S.

    Classifies box grid points into S, the hull of the S samples, and the
    intersection of the aggregated sublevel sets; `equal` holds when the
    aggregated region exceeds the (one-cell-inflated) hull by at most two
    grid cells of measure.
    """
    n = T.n
    if n not in (2, 3):
        raise PreconditionFailed("hull comparison supports n in {2, 3}")
    lams = _lam_vectors(lambdas)
    if not lams:
        raise PreconditionFailed("lambdas must be nonempty")
    if grid is None:
        grid = 301 if n == 2 else 101
    grid = int(grid)
    b = _box_bounds(box, n)
    X = grid_points(b, n, grid)
    spacing = (b[:, 1] - b[:, 0]) / (grid - 1)
    cell = float(np.prod(spacing))
    diag = float(np.linalg.norm(spacing))
    F = eval_all(T, X)
    s_mask = (F <= eps).all(axis=0)
    if not s_mask.any():
        raise EmptySample("no point of S on the grid")
    hull = convex_hull(X[s_mask])
    Xh = np.column_stack([X, np.ones(len(X))])
    agg_mask = np.ones(len(X), dtype=bool)
    for lam in lams:
        M = pencil(T, lam)
        f = np.einsum("ni,ij,nj->n", Xh, M, Xh)
        agg_mask &= f <= eps * (1 + np.abs(f).max())
    hull_infl = hull.contains(X, margin=diag)
    gap = float(np.count_nonzero(agg_mask & ~hull_infl)) * cell
    shape = (grid,) * n
    struct = np.ones((3,) * n, dtype=bool)
    comp_s = int(label(s_mask.reshape(shape), structure=struct)[1])
    comp_agg = int(label(agg_mask.reshape(shape), structure=struct)[1])
    return HullReport(
        n=n,
        hullVertices=hull.vertices,
        aggRegionMeasure=float(np.count_nonzero(agg_mask)) * cell,
        hullMeasure=hull.measure,
        gapMeasure=gap,
        equal=gap <= 2 * cell,
        componentCounts={"S": comp_s, "agg": comp_agg},
        cellMeasure=cell,
    )


def regularity_probe(T, box=(-5, 5), grid=301, eps=1e-9):
    """Heuristic check that S has no low-dimensional pieces on the box:
    every grid point of S must be within one cell of a strict-interior
    point.  An empty S passes vacuously."""
    n = T.n
    b = _box_bounds(box, n)
    X = grid_points(b, n, int(grid))
    F = eval_all(T, X)
    scale = 1 + np.abs(F).max()
    shape = (int(grid),) * n
    s_mask = (F <= eps).all(axis=0).reshape(shape)
    if not s_mask.any():
        return True
    strict = (F < -1e-6 * scale).all(axis=0).reshape(shape)
    near = binary_dilation(strict, structure=np.ones((3,) * n, dtype=bool))
    return bool(np.all(near[s_mask]))


def _sphere_sample(d, count, seed=11):
    if d == 3:
        return fibonacci_sphere(count)
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((count, d))
    return P / np.linalg.norm(P, axis=1)[:, None]


def component_count_X(T, K, grid=None, seed=11, slack=1e-7):
    """Component count of the projective set {x : f^h(x) in K}.

    The set can occupy a tiny fraction of the sphere, so plain rejection
    sampling fragments it.  Instead, random starts are polished onto the set
    by minimizing the constraint violation, and two polished nodes are linked
    when the great-circle segment between them stays inside (a probabilistic
    roadmap); antipodal representatives are identified beforehand.
    """
    from .cones import dual

    if K.kind == "FULL":
        return 1
    if grid is None:
        grid = 400
    grid = int(grid)
    if grid < 100:
        raise GridTooCoarse("need at least 100 polish starts")
    Q = T.stacked()
    rng = np.random.default_rng(seed)
    scale = 1 + max(np.linalg.norm(M) for M in Q)
    if K.kind == "ZERO":
        # the variety itself: every homogeneous value must vanish
        L = np.vstack([np.eye(3), -np.eye(3)])
    else:
        L = dual(K).gen_array()  # x in K iff L @ x <= 0

    def viol(x):
        x = x / np.linalg.norm(x)
        f = np.einsum("kij,i,j->k", Q, x, x)
        return float(np.sum(np.clip(L @ f, 0, None) ** 2))

    tol_g = slack * scale
    nodes = []
    for x0 in rng.standard_normal((grid, T.dim)):
        res = sopt.minimize(
            viol,
            x0 / np.linalg.norm(x0),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-18, "maxiter": 800},
        )
        if res.fun <= tol_g**2:
            x = res.x / np.linalg.norm(res.x)
            nz = np.nonzero(np.abs(x) > 1e-9)[0][0]
            nodes.append(x if x[nz] > 0 else -x)
    if not nodes:
        return 0
    N = np.array(nodes)
    m = len(N)
    ts = np.linspace(0, 1, 33)[1:-1]
    pairs = []
    for i in range(m):
        for j in range(i + 1, m):
            a, b = N[i], N[j]
            if a @ b < 0:
                b = -b
            seg = (1 - ts)[:, None] * a + ts[:, None] * b
            nv = np.linalg.norm(seg, axis=1)
            if nv.min() < 1e-6:
                continue
            seg = seg / nv[:, None]
            g = np.einsum("kij,ni,nj->nk", Q, seg, seg) @ L.T
            if g.max() <= 100 * tol_g:
                pairs.append((i, j))
    if not pairs:
        return m
    P = np.array(pairs)
    G = coo_matrix((np.ones(len(P)), (P[:, 0], P[:, 1])), shape=(m, m))
    count, _ = connected_components(G, directed=False)
    return int(count)
