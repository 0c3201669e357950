"""Polyhedral cones in R^3, sphere-sampled level sets Omega^j, and the
emptiness certificates for varieties and inequality systems.

Omega^j(K) = {lam in K° ∩ S² : Q_lam has at least j positive eigenvalues}.
Component counts of Omega^n mirror the component structure of the projective
solution set; the loop indicator is never read off the grid, only from the
cone-containment surrogate (hyperbolicity cone of kind TWO_NEG contained in
the interior of K°).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize, nnls, least_squares
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .core import pencil, signature, eval_all, default_tol
from .errors import GridTooCoarse, HypothesisViolated, PreconditionFailed
from .spectral import (
    HypCone,
    curve_report,
    fibonacci_sphere,
    real_roots,
    restrict_line,
    spectral_polynomial,
)


# ---------------------------------------------------------------------------
# polyhedral cones


def _unit(v):
    return v / np.linalg.norm(v)


def _dedupe_rays(rays, tol=1e-8):
    out = []
    for r in rays:
        u = _unit(np.asarray(r, dtype=float))
        if all(np.linalg.norm(u - v) > tol for v in out):
            out.append(u)
    return out


def _in_nonneg_span(target, gens, tol=1e-8):
    if len(gens) == 0:
        return np.linalg.norm(target) <= tol
    _, res = nnls(np.array(gens).T, np.asarray(target, dtype=float))
    return res <= tol * (1 + np.linalg.norm(target))


@dataclass(frozen=True)
class PolyCone3:
    """Cone in R^3 as a conical hull of generators; {0} and R^3 as flags."""

    generators: tuple = ()
    kind: str = "GEN"  # GEN | ZERO | FULL

    @classmethod
    def from_generators(cls, gens):
        gens = _dedupe_rays([g for g in np.atleast_2d(np.asarray(gens, float)) if np.linalg.norm(g) > 0])
        if not gens:
            return cls(kind="ZERO")
        return cls(generators=tuple(tuple(g) for g in gens), kind="GEN")

    @classmethod
    def zero(cls):
        return cls(kind="ZERO")

    @classmethod
    def full(cls):
        return cls(kind="FULL")

    @classmethod
    def orthant(cls, sign=+1):
        return cls.from_generators(sign * np.eye(3))

    def gen_array(self):
        return np.array(self.generators, dtype=float).reshape(-1, 3)

    def contains(self, x, tol=1e-8):
        x = np.asarray(x, dtype=float)
        if self.kind == "FULL":
            return True
        if self.kind == "ZERO":
            return np.linalg.norm(x) <= tol
        return _in_nonneg_span(x, list(self.gen_array()), tol=tol)

    def facet_normals(self):
        """Inward normals of a full-dimensional generator cone; the
        H-representation is {x : n.x >= 0 for all returned n}."""
        if self.kind != "GEN":
            raise PreconditionFailed("facets are defined for generator cones")
        G = self.gen_array()
        if np.linalg.matrix_rank(G, tol=1e-10) < 3:
            raise PreconditionFailed("cone is not full-dimensional")
        normals = []
        for i in range(len(G)):
            for j in range(i + 1, len(G)):
                c = np.cross(G[i], G[j])
                if np.linalg.norm(c) < 1e-12:
                    continue
                c = _unit(c)
                for s in (c, -c):
                    if np.all(G @ s >= -1e-10):
                        normals.append(s)
        out = _dedupe_rays(normals)
        if not out:
            raise PreconditionFailed("cone has no facets (not pointed?)")
        return np.array(out)

    def interior_contains(self, x, margin=1e-8):
        x = np.asarray(x, dtype=float)
        if self.kind == "FULL":
            return True
        if self.kind == "ZERO":
            return False
        if np.linalg.matrix_rank(self.gen_array(), tol=1e-10) < 3:
            return False
        F = self.facet_normals()
        return bool(np.all(F @ x >= margin * np.linalg.norm(x)))


def _extreme_rays_pointed(rays):
    """Extreme rays of a pointed conical hull via the convex hull of the
    rays scaled onto a transverse plane; None when the hull is not clearly
    pointed (caller falls back to pairwise pruning)."""
    R = np.array([_unit(r) for r in rays])
    if len(R) <= 2:
        return list(R)
    c = R.mean(axis=0)
    if np.linalg.norm(c) <= 1e-9:
        return None
    c = _unit(c)
    d = R @ c
    if np.any(d <= 1e-6):
        return None
    _, _, Vt = np.linalg.svd(c[None, :])
    P2 = (R / d[:, None]) @ Vt[1:].T
    C = P2 - P2.mean(axis=0)
    sv = np.linalg.svd(C, compute_uv=False)
    if sv[0] <= 1e-12:
        return [R[0]]
    if sv[1] <= 1e-9 * sv[0]:
        axis = C @ np.linalg.svd(C, compute_uv=True)[2][0]
        return [R[int(np.argmin(axis))], R[int(np.argmax(axis))]]
    from scipy.spatial import ConvexHull

    try:
        hull = ConvexHull(P2)
    except Exception:
        return None
    return [R[i] for i in hull.vertices]


def dual(K):
    """Polar dual {y : y.x <= 0 for all x in K} as a generator cone."""
    if K.kind == "ZERO":
        return PolyCone3.full()
    if K.kind == "FULL":
        return PolyCone3.zero()
    A = K.gen_array()
    rank = np.linalg.matrix_rank(A, tol=1e-10)
    cands = []
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            c = np.cross(A[i], A[j])
            if np.linalg.norm(c) > 1e-12:
                cands += [c, -c]
    # lineality/boundary directions for rank-deficient generator sets
    _, s, Vt = np.linalg.svd(A)
    for k in range(rank, 3):
        cands += [Vt[k], -Vt[k]]
    if rank == 1:
        cands.append(-A[0])
    for a in A:
        for c in list(cands):
            cr = np.cross(a, c)
            if np.linalg.norm(cr) > 1e-12:
                cands += [cr, -cr]
    feas = [c for c in cands if np.all(A @ _unit(c) <= 1e-8)]
    feas = _dedupe_rays(feas)
    if not feas:
        return PolyCone3.zero()
    if rank == 3:
        # an extreme ray of a full-dimensional polar sits on two independent
        # active facets; nonneg-span pruning is unreliable here because wide
        # cones allow huge cancelling coefficients
        extreme = [
            c
            for c in feas
            if np.linalg.matrix_rank(A[np.abs(A @ c) <= 1e-8], tol=1e-8) >= 2
        ]
        if extreme:
            return PolyCone3.from_generators(_dedupe_rays(extreme, tol=1e-6))
    # prune rays that are nonnegative combinations of the others
    extreme = _extreme_rays_pointed(feas)
    if extreme is None:
        extreme = []
        for i, r in enumerate(feas):
            others = [v for j, v in enumerate(feas) if j != i]
            if not _in_nonneg_span(r, others):
                extreme.append(r)
    return PolyCone3.from_generators(extreme if extreme else feas)


# ---------------------------------------------------------------------------
# sphere grids


def icosphere(level=5):
    """Geodesic sphere nodes from repeated icosahedron subdivision."""
    t = (1 + 5**0.5) / 2
    V = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    V = list(V / np.linalg.norm(V, axis=1)[:, None])
    F = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    cache = {}

    def mid(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = V[i] + V[j]
            V.append(m / np.linalg.norm(m))
            cache[key] = len(V) - 1
        return cache[key]

    for _ in range(level):
        F = [
            tri
            for a, b, c in F
            for tri in (
                [a, mid(a, b), mid(c, a)],
                [b, mid(b, c), mid(a, b)],
                [c, mid(c, a), mid(b, c)],
                [mid(a, b), mid(b, c), mid(c, a)],
            )
        ]
    return np.array(V)


def _tri_grid(a, b, c, res):
    # barycentric triangular grid over the spherical triangle (a, b, c),
    # returned with its lattice adjacency
    pts = np.empty(((res + 1) * (res + 2) // 2, 3))
    valid = np.zeros(len(pts), dtype=bool)
    index = {}
    m = 0
    for i in range(res + 1):
        for j in range(res + 1 - i):
            k = res - i - j
            p = (i * a + j * b + k * c) / res
            nv = np.linalg.norm(p)
            if nv > 1e-12:
                pts[m] = p / nv
                valid[m] = True
            index[(i, j)] = m
            m += 1
    pairs = []
    for i in range(res + 1):
        for j in range(res + 1 - i):
            for di, dj in ((0, 1), (1, 0), (1, -1)):
                nb = (i + di, j + dj)
                if nb in index and valid[index[(i, j)]] and valid[index[nb]]:
                    pairs.append((index[(i, j)], index[nb]))
    # compress out the (rare) near-zero combinations
    remap = np.cumsum(valid) - 1
    pairs = np.array([(remap[p], remap[q]) for p, q in pairs]).reshape(-1, 2)
    return pts[valid], pairs


def cone_patch(gens, res=160):
    """Grid over the spherical polygon cut out by a pointed generator cone,
    with the triangulation adjacency joining the grid nodes."""
    G = np.array([_unit(g) for g in gens])
    if len(G) == 1:
        return G.copy(), np.zeros((0, 2), dtype=int)
    if len(G) == 2:
        ts = np.linspace(0, 1, res + 1)[:, None]
        seg = (1 - ts) * G[0] + ts * G[1]
        seg /= np.linalg.norm(seg, axis=1)[:, None]
        pairs = np.column_stack([np.arange(res), np.arange(1, res + 1)])
        return seg, pairs
    center = _unit(G.sum(axis=0))
    # order generators around the center to fan the polygon
    u = _unit(np.cross(center, G[0] if abs(G[0] @ center) < 0.999 else G[1]))
    v = np.cross(center, u)
    ang = np.arctan2(G @ v, G @ u)
    G = G[np.argsort(ang)]
    chunks, all_pairs, off = [], [], 0
    for i in range(len(G)):
        pts, pairs = _tri_grid(center, G[i], G[(i + 1) % len(G)], res)
        chunks.append(pts)
        all_pairs.append(pairs + off)
        off += len(pts)
    P = np.vstack(chunks)
    pairs = np.vstack(all_pairs)
    # nodes on shared fan edges coincide; merging them stitches the patches
    _, first, inv = np.unique(
        np.round(P, 9), axis=0, return_index=True, return_inverse=True
    )
    pairs = inv[pairs]
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    return P[first], pairs


def proximity_components(pts, mask, spacing=None, pairs=None):
    """Union-find over masked grid nodes, joined by the supplied adjacency
    pairs or by metric proximity."""
    idx = np.nonzero(mask)[0]
    if len(idx) == 0:
        return 0, []
    P = pts[idx]
    if pairs is not None:
        remap = np.full(len(pts), -1)
        remap[idx] = np.arange(len(idx))
        pairs = remap[np.asarray(pairs).reshape(-1, 2)]
        pairs = pairs[(pairs >= 0).all(axis=1)]
    else:
        if spacing is None:
            tree_all = cKDTree(pts)
            d, _ = tree_all.query(pts, k=2)
            spacing = float(np.median(d[:, 1]))
        tree = cKDTree(P)
        pairs = tree.query_pairs(2.0 * spacing, output_type="ndarray")
    G = sp.coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(P), len(P))
    )
    count, labels = connected_components(G, directed=False)
    sizes = np.bincount(labels)
    return count, sorted((int(s) for s in sizes), reverse=True)


# ---------------------------------------------------------------------------
# Omega level sets


@dataclass(frozen=True)
class OmegaReport:
    j: int
    K: PolyCone3
    componentCount: int
    hasLoop: bool
    samples: tuple  # (points array, n_pos labels array)
    componentSizes: tuple = ()

    def to_json(self):
        return {
            "j": self.j,
            "componentCount": self.componentCount,
            "hasLoop": self.hasLoop,
            "componentSizes": list(self.componentSizes),
        }


@dataclass(frozen=True)
class SpectralContext:
    """Precomputed curve data shared across repeated Omega queries."""

    gf: object
    report: object
    cone: object  # HypCone or None


def spectral_context(T, probes=500):
    gf = spectral_polynomial(T)
    rep = curve_report(T, gf=gf, probes=probes)
    cone = HypCone.build(gf, rep.direction, T) if rep.hyperbolic else None
    return SpectralContext(gf=gf, report=rep, cone=cone)


def _is_pointed(G):
    # pointed iff some w has G w strictly positive
    from scipy.optimize import linprog

    k = len(G)
    c = np.array([0.0, 0.0, 0.0, -1.0])
    A_ub = np.hstack([-G, np.ones((k, 1))])
    res = linprog(
        c, A_ub=A_ub, b_ub=np.zeros(k), bounds=[(-1, 1)] * 3 + [(None, 1)]
    )
    return bool(res.success and -res.fun > 1e-9)


def _polar_grid(Kpolar, icosphere_level, patch_res):
    if Kpolar.kind == "ZERO":
        return np.zeros((0, 3)), None
    if Kpolar.kind == "FULL":
        return icosphere(icosphere_level), None
    G = Kpolar.gen_array()
    if len(G) <= 2:
        # a ray or a planar wedge: the sphere trace is a point or an arc
        return cone_patch(G, res=patch_res)
    if np.linalg.matrix_rank(G, tol=1e-10) == 3 and len(G) <= 8 and _is_pointed(G):
        return cone_patch(G, res=patch_res)
    P = icosphere(icosphere_level)
    keep = np.array([Kpolar.contains(p, tol=1e-9) for p in P])
    return P[keep], None


def omega(T, K, j, icosphere_level=5, patch_res=160, context=None, strict_coarse=False):
    """Label K° ∩ S² by positive-eigenvalue count and count components of
    the sublevel region {n_pos >= j}."""
    if not (0 <= j <= T.dim):
        raise PreconditionFailed("level j out of range")
    pts, adj = _polar_grid(dual(K), icosphere_level, patch_res)
    if len(pts) == 0:
        return OmegaReport(j=j, K=K, componentCount=0, hasLoop=False, samples=((), ()))
    w = np.linalg.eigvalsh(np.einsum("nk,kij->nij", pts, T.stacked()))
    tol = 1e-9 * (1.0 + np.abs(w).max())
    npos = (w > tol).sum(axis=1)
    mask = npos >= j
    count, sizes = proximity_components(pts, mask, pairs=adj)
    # on a dense grid, components of one or two nodes are indistinguishable
    # from tolerance noise at the region boundary and are not counted
    if len(pts) >= 10:
        sizes = [s for s in sizes if s >= 3]
        count = len(sizes)
    if strict_coarse and any(s < 4 for s in sizes):
        raise GridTooCoarse("a component has fewer than 4 nodes; refine the grid")
    has_loop = False
    if mask.any():
        if context is None:
            context = spectral_context(T)
        if context.cone is not None and context.cone.kind == "TWO_NEG":
            has_loop = hyp_cone_containment(context.cone, dual(K)) == "CONTAINED_INT"
    return OmegaReport(
        j=j,
        K=K,
        componentCount=int(count),
        hasLoop=bool(has_loop),
        samples=(pts, npos),
        componentSizes=tuple(sizes),
    )


# ---------------------------------------------------------------------------
# hyperbolicity-cone containment


def boundary_samples(C, count=400):
    """Points of the boundary of the hyperbolicity cone C on the sphere."""
    e = _unit(np.asarray(C.e, dtype=float))
    out = []
    for a in fibonacci_sphere(count):
        if abs(a @ e) > 1 - 1e-9:
            continue
        p = restrict_line(C.form, a, e)  # t=0 at e, t=1 at a
        if p.is_zero() or p.degree == 0:
            continue
        _, roots = real_roots(p, interval=(1e-12, 1.0))
        if not roots:
            continue
        t = roots[0][0]
        x = (1 - t) * e + t * a
        nv = np.linalg.norm(x)
        if nv > 1e-12:
            out.append(x / nv)
    return np.array(out)


def hyp_cone_containment(Ccurve, K, count=400, margin=1e-8):
    """CONTAINED_INT / TOUCHES / DISJOINT position of the hyperbolicity cone
    relative to a polyhedral cone K."""
    if K.kind == "FULL":
        return "CONTAINED_INT"
    B = boundary_samples(Ccurve, count=count)
    e = _unit(np.asarray(Ccurve.e, dtype=float))
    if len(B) == 0:
        return "CONTAINED_INT" if K.interior_contains(e, margin) else "DISJOINT"
    inside = [K.interior_contains(x, margin) for x in B]
    if all(inside) and K.interior_contains(e, margin):
        return "CONTAINED_INT"
    interior_pts = [e] + [_unit(0.5 * (e + x)) for x in B[::4]]
    if not any(K.contains(x) for x in interior_pts) and not any(
        K.contains(x) for x in B
    ):
        return "DISJOINT"
    return "TOUCHES"


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    verdict: str  # EMPTY | NONEMPTY | INCONCLUSIVE
    reason: str
    witness: dict = field(default_factory=dict)

    def to_json(self):
        w = {}
        for k, v in self.witness.items():
            w[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return {"verdict": self.verdict, "reason": self.reason, "witness": w}


def pdlc_search(T, grid=2000, refine=True):
    """Search the lam-sphere for a positive definite pencil.

    Returns (best_lambda, best_min_eigenvalue); a positive value is a PDLC
    witness.
    """
    P = fibonacci_sphere(grid)
    w = np.linalg.eigvalsh(np.einsum("nk,kij->nij", P, T.stacked()))
    vals = w[:, 0]
    k = int(np.argmax(vals))
    lam, best = P[k], float(vals[k])
    if refine:
        res = minimize(
            lambda u: -np.linalg.eigvalsh(pencil(T, u / np.linalg.norm(u)))[0],
            lam,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000},
        )
        cand = res.x / np.linalg.norm(res.x)
        if -res.fun > best:
            lam, best = cand, float(-res.fun)
    return lam, best


def max_npos_direction(T, grid=2000):
    """Maximal positive-eigenvalue count of Q_lam over the lam-sphere,
    with a direction attaining it."""
    P = fibonacci_sphere(grid)
    w = np.linalg.eigvalsh(np.einsum("nk,kij->nij", P, T.stacked()))
    tol = 1e-9 * (1.0 + np.abs(w).max())
    npos = (w > tol).sum(axis=1)
    best = int(npos.max())
    lam = P[int(np.argmax(npos))]
    # local push on the smallest still-relevant eigenvalue
    m = T.dim

    def obj(u):
        u = u / np.linalg.norm(u)
        ww = np.linalg.eigvalsh(pencil(T, u))
        return -ww[m - best - 1] if best < m else 0.0

    if best < m:
        res = minimize(obj, lam, method="Nelder-Mead", options={"maxiter": 1000})
        u = res.x / np.linalg.norm(res.x)
        ww = np.linalg.eigvalsh(pencil(T, u))
        tol_u = 1e-9 * (1.0 + np.abs(ww).max())
        if int((ww > tol_u).sum()) > best:
            best = int((ww > tol_u).sum())
            lam = u
    return best, lam


def _variety_witness_search(T, grid=100000, seed=5):
    """Projective scan for a common zero of the homogenized quadratics."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((grid, T.dim))
    X /= np.linalg.norm(X, axis=1)[:, None]
    vals = np.stack([np.einsum("ni,ij,nj->n", X, Q, X) for Q in T.Q])
    score = np.abs(vals).max(axis=0)
    order = np.argsort(score)[:20]
    scale = 1 + max(np.linalg.norm(Q) for Q in T.Q)
    for k in order:
        res = least_squares(
            lambda y: np.array([y @ Q @ y for Q in T.Q] + [y @ y - 1.0]),
            X[k],
            xtol=1e-14,
            ftol=1e-14,
        )
        y = res.x / np.linalg.norm(res.x)
        if max(abs(y @ Q @ y) for Q in T.Q) <= 1e-8 * scale:
            return y
    return None


def certify_variety_empty(T, context=None, witness_grid=20000):
    """Emptiness certificate for the common real projective zero set of the
    homogenized quadratics."""
    n = T.n
    lam, val = pdlc_search(T)
    if val > 0:
        return Certificate("EMPTY", "PDLC_WITNESS", {"lambda": lam, "min_eig": val})
    if context is None:
        context = spectral_context(T)
    rep = context.report
    if not rep.smooth:
        return Certificate("INCONCLUSIVE", "SMOOTHNESS_PROBE_FAILED", {})
    if n == 1:
        return Certificate("NONEMPTY", "WITNESS_POINT", {"note": "no PD combination at n=1"})
    if n == 2:
        return Certificate("EMPTY", "SMOOTH_N2", {})
    if rep.hyperbolic:
        best, at = max_npos_direction(T)
        if best >= n:
            return Certificate(
                "EMPTY",
                "HYP_CONE_CONTAINED",
                {"direction": rep.direction, "npos_attained": best, "at": at},
            )
    if n == 3 and rep.emptyCurve:
        return Certificate("EMPTY", "CURVE_EMPTY_N3", {})
    x = _variety_witness_search(T, grid=witness_grid)
    if x is not None:
        return Certificate("NONEMPTY", "WITNESS_POINT", {"x": x})
    return Certificate("INCONCLUSIVE", "NO_CERTIFICATE_FOUND", {})


def certify_system_empty(T, K, context=None, variety_cert=None, grid=20000):
    """Emptiness certificate for X(K, f^h) = {x : f^h(x) in K}, K != {0}."""
    if K.kind == "ZERO":
        raise PreconditionFailed(
            "K = {0} is the variety itself; use certify_variety_empty"
        )
    if variety_cert is None:
        variety_cert = certify_variety_empty(T, context=context)
    if variety_cert.verdict != "EMPTY":
        raise HypothesisViolated("the variety is not certified empty")
    if context is None:
        context = spectral_context(T)
    n = T.n
    rep_n = omega(T, K, n, context=context)
    if rep_n.componentCount >= 1:
        if rep_n.hasLoop:
            return Certificate("EMPTY", "OMEGA_LOOP", {"omega_n_components": rep_n.componentCount})
        rep_n1 = omega(T, K, n + 1, context=context)
        if rep_n1.componentCount >= 1:
            return Certificate(
                "EMPTY", "OMEGA_TOP_NONEMPTY", {"omega_n_components": rep_n.componentCount}
            )
    # hunt for a witness x with f^h(x) in K
    rng = np.random.default_rng(17)
    X = rng.standard_normal((grid, T.dim))
    X /= np.linalg.norm(X, axis=1)[:, None]
    F = np.stack([np.einsum("ni,ij,nj->n", X, Q, X) for Q in T.Q]).T
    for k in range(len(X)):
        if K.contains(F[k], tol=1e-7 * (1 + np.linalg.norm(F[k]))):
            return Certificate("NONEMPTY", "WITNESS_POINT", {"x": X[k], "f": F[k]})
    return Certificate("NONEMPTY", "NO_OMEGA_CERTIFICATE", {})
