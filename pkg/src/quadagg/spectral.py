"""The determinant form g(lam) = det(Q_lam) and its real-algebraic toolkit.

Univariate restrictions are handled with Sturm sequences (exact sign-change
counts with explicit pruning), roots are isolated by bisection, and
hyperbolicity is certified by probing real-rootedness of g along lines in a
fixed direction.
"""

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize

from .core import pencil, signature, default_tol
from .errors import (
    DegeneratePoly,
    IllConditioned,
    NonTransverse,
    SingularDirection,
)


# ---------------------------------------------------------------------------
# trivariate homogeneous forms


def _monomial_exponents(degree):
    return [(a, b, degree - a - b) for a in range(degree + 1) for b in range(degree + 1 - a)]


@dataclass(frozen=True)
class TrivariateForm:
    """Homogeneous polynomial in (lam1, lam2, lam3) as an exponent->coeff map."""

    degree: int
    coeffs: dict

    def __post_init__(self):
        for e in self.coeffs:
            if len(e) != 3 or sum(e) != self.degree:
                raise ValueError("exponent %s does not sum to degree %d" % (e, self.degree))

    def _tables(self):
        exps = np.array(sorted(self.coeffs), dtype=int)
        coefs = np.array([self.coeffs[tuple(e)] for e in exps])
        return exps, coefs

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        single = lam.ndim == 1
        P = np.atleast_2d(lam)
        exps, coefs = self._tables()
        vals = np.prod(P[:, None, :] ** exps[None, :, :], axis=2) @ coefs
        return float(vals[0]) if single else vals

    def gradient(self):
        """The three partial derivatives, each a TrivariateForm of degree-1."""
        parts = []
        for k in range(3):
            d = {}
            for e, c in self.coeffs.items():
                if e[k] > 0:
                    e2 = list(e)
                    e2[k] -= 1
                    e2 = tuple(e2)
                    d[e2] = d.get(e2, 0.0) + c * e[k]
            parts.append(TrivariateForm(self.degree - 1, d))
        return tuple(parts)

    def grad_at(self, lam):
        return np.array([p(lam) for p in self.gradient()])

    def to_json(self):
        return {
            "degree": self.degree,
            "terms": [
                {"exp": list(e), "coef": self.coeffs[e]} for e in sorted(self.coeffs)
            ],
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["degree"], {tuple(t["exp"]): t["coef"] for t in d["terms"]})


def det_form(mats, check_points=50):
    """Recover det(lam1 M1 + lam2 M2 + lam3 M3) as a TrivariateForm.

    Evaluates the determinant on a lattice over the plane lam1+lam2+lam3 =
    const (one node per monomial) and solves for the coefficients; the fit is
    re-checked at fresh random points.
    """
    mats = np.asarray(mats, dtype=float)
    d = mats.shape[1]
    exps = np.array(_monomial_exponents(d), dtype=int)
    delta = 1.0 / 32.0
    nodes = np.array(
        [(i, j, d - i - j) for i in range(d + 1) for j in range(d + 1 - i)], dtype=float
    ) + delta
    V = np.prod(nodes[:, None, :] ** exps[None, :, :], axis=2)
    if np.linalg.cond(V) > 1e12:
        raise IllConditioned("interpolation nodes are near-degenerate for this pencil")
    dets = np.linalg.det(np.einsum("nk,kij->nij", nodes, mats))
    coefs = np.linalg.solve(V, dets)
    gf = TrivariateForm(d, {tuple(e): c for e, c in zip(exps, coefs)})
    rng = np.random.default_rng(7)
    P = rng.standard_normal((check_points, 3))
    ref = np.linalg.det(np.einsum("nk,kij->nij", P, mats))
    scale = max(np.abs(dets).max(), np.abs(ref).max(), 1e-300)
    if np.max(np.abs(gf(P) - ref)) > 1e-8 * scale:
        raise IllConditioned("interpolated determinant fails the residual re-check")
    return gf


def spectral_polynomial(T, check_points=50):
    """The determinant form g(lam) = det(Q_lam) of a quadratic triple."""
    return det_form(T.stacked(), check_points=check_points)


# ---------------------------------------------------------------------------
# univariate polynomials and Sturm sequences


@dataclass(frozen=True)
class UniPoly:
    """Real polynomial with ascending coefficients, trimmed at construction."""

    coeffs: tuple

    @classmethod
    def make(cls, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 1 or len(c) == 0:
            raise DegeneratePoly("empty coefficient array")
        scale = np.abs(c).max()
        if scale == 0:
            return cls(coeffs=(0.0,))
        keep = len(c)
        while keep > 1 and abs(c[keep - 1]) <= 1e-12 * scale:
            keep -= 1
        return cls(coeffs=tuple(float(v) for v in c[:keep]))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0.0

    def __call__(self, t):
        return npoly.polyval(t, np.array(self.coeffs))

    def deriv(self):
        return UniPoly.make(npoly.polyder(np.array(self.coeffs)))

    def norm(self):
        return float(np.abs(self.coeffs).max())


def _polydiv(a, b):
    # remainder of a / b over ascending coefficient arrays, pruned
    _, r = npoly.polydiv(np.array(a.coeffs), np.array(b.coeffs))
    return UniPoly.make(r)


def sturm_chain(p):
    chain = [p, p.deriv()]
    while chain[-1].degree > 0:
        r = _polydiv(chain[-2], chain[-1])
        if r.is_zero():
            break
        chain.append(UniPoly.make(-np.array(r.coeffs)))
    return chain


def _sign_changes(vals):
    s = [v for v in vals if v != 0]
    return int(np.sum(np.sign(s[:-1]) != np.sign(s[1:]))) if len(s) > 1 else 0


def _chain_value_signs(chain, t):
    if np.isinf(t):
        # sign at +/- infinity from the leading coefficients
        out = []
        for q in chain:
            lead = q.coeffs[-1]
            s = lead if t > 0 else lead * (-1) ** q.degree
            out.append(s)
        return out
    return [q(t) for q in chain]


def sturm_count(p, lo=-np.inf, hi=np.inf):
    """Number of distinct real roots of p in (lo, hi]."""
    if p.degree == 0:
        return 0
    chain = sturm_chain(p)
    return _sign_changes(_chain_value_signs(chain, lo)) - _sign_changes(
        _chain_value_signs(chain, hi)
    )


def cauchy_bound(p):
    c = np.array(p.coeffs)
    return 1.0 + np.abs(c[:-1]).max(initial=0.0) / abs(c[-1])


def poly_gcd(p, q):
    """Numerical gcd by the Euclidean algorithm with coefficient pruning."""
    a, b = p, q
    while not b.is_zero() and b.degree > 0:
        a, b = b, _polydiv(a, b)
    if b.is_zero():
        return a
    return UniPoly.make([1.0])


def square_free(p):
    g = poly_gcd(p, p.deriv())
    if g.degree == 0:
        return p
    q, _ = npoly.polydiv(np.array(p.coeffs), np.array(g.coeffs))
    return UniPoly.make(q)


def real_rooted(p):
    """True when every complex root of p is real (multiplicities allowed)."""
    if p.is_zero():
        raise DegeneratePoly("zero polynomial has no root count")
    if p.degree == 0:
        return True
    g = poly_gcd(p, p.deriv())
    q = square_free(p)
    if sturm_count(q) != q.degree:
        return False
    return real_rooted(g) if g.degree > 0 else True


def real_roots(p, interval=None, width=1e-10):
    """Distinct real roots of p in an interval, with multiplicities.

    Returns (count, [(root, multiplicity), ...]).  Counting uses the Sturm
    chain; roots are isolated and then narrowed by bisection on the chain's
    sign-change count.
    """
    if p.is_zero():
        raise DegeneratePoly("polynomial is identically zero")
    if p.degree == 0:
        return 0, []
    chain = sturm_chain(p)

    def count(lo, hi):
        return _sign_changes(_chain_value_signs(chain, lo)) - _sign_changes(
            _chain_value_signs(chain, hi)
        )

    B = cauchy_bound(p)
    lo, hi = (-B, B) if interval is None else (float(interval[0]), float(interval[1]))
    lo = max(lo, -B) if np.isfinite(lo) else -B
    hi = min(hi, B) if np.isfinite(hi) else B
    if hi <= lo:
        return 0, []
    total = count(lo, hi)
    intervals = [(lo, hi, total)]
    isolated = []
    while intervals:
        a, b, k = intervals.pop()
        if k == 0:
            continue
        if k == 1 and b - a <= width:
            isolated.append(0.5 * (a + b))
            continue
        m = 0.5 * (a + b)
        kl = count(a, m)
        intervals.append((a, m, kl))
        intervals.append((m, b, k - kl))
    isolated.sort()

    # multiplicities from the gcd(p, p') recursion
    mult = {r: 1 for r in isolated}
    g = poly_gcd(p, p.deriv())
    if g.degree > 0:
        _, sub = real_roots(g, interval=(lo - width, hi + width), width=width)
        for r_sub, m_sub in sub:
            if isolated:
                nearest = min(isolated, key=lambda r: abs(r - r_sub))
                if abs(nearest - r_sub) < 1e-6 * (1 + abs(nearest)):
                    mult[nearest] += m_sub
    return len(isolated), [(r, mult[r]) for r in isolated]


# ---------------------------------------------------------------------------
# lines, hyperbolicity, cones


def line_poly(gf, base, direction):
    """UniPoly t -> gf(base + t*direction), by Chebyshev interpolation."""
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    d = gf.degree
    k = np.arange(d + 1)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * (d + 1)))
    pts = base[None, :] + nodes[:, None] * direction[None, :]
    vals = gf(pts)
    V = np.vander(nodes, d + 1, increasing=True)
    return UniPoly.make(np.linalg.solve(V, vals))


def restrict_line(gf, a, b):
    """UniPoly t -> gf(t*a + (1-t)*b); t=0 is b, t=1 is a."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return line_poly(gf, b, a - b)


def fibonacci_sphere(count):
    i = np.arange(count)
    golden = (1 + 5**0.5) / 2
    z = 1 - 2 * (i + 0.5) / count
    r = np.sqrt(1 - z * z)
    th = 2 * np.pi * i / golden
    return np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)


def is_hyperbolic(gf, e, T, probes=500):
    """Probabilistic hyperbolicity certificate of gf in direction e.

    A definite pencil at e passes outright; otherwise gf(t e + a) must be
    real rooted for every probe direction a on a deterministic sphere grid.
    """
    e = np.asarray(e, dtype=float)
    scale = max(abs(v) for v in gf.coeffs.values())
    if abs(gf(e)) <= 1e-10 * scale * np.linalg.norm(e) ** gf.degree:
        raise SingularDirection("g vanishes at the requested direction")
    Qe = pencil(T, e)
    sig = signature(Qe)
    if sig.n_zero == 0 and (sig.n_pos == 0 or sig.n_neg == 0):
        return True
    for a in fibonacci_sphere(probes):
        p = line_poly(gf, a, e)
        if p.degree < gf.degree:
            # line nearly at infinity for this chart; still needs real roots
            # of the full multiplicity it has
            pass
        if not real_rooted(p):
            return False
    return True


@dataclass(frozen=True)
class HypCone:
    """Hyperbolicity cone: component of e in the complement of {gf = 0}."""

    form: TrivariateForm
    e: np.ndarray
    kind: str  # PD | TWO_NEG | OTHER

    @classmethod
    def build(cls, gf, e, T):
        e = np.asarray(e, dtype=float)
        sig = signature(pencil(T, e))
        if sig.n_neg == 0 and sig.n_zero == 0:
            kind = "PD"
        elif sig.n_neg == 2 and sig.n_zero == 0:
            kind = "TWO_NEG"
        else:
            kind = "OTHER"
        return cls(form=gf, e=e, kind=kind)


def hyp_membership(C, lam, tol=1e-8):
    """INTERIOR / BOUNDARY / OUTSIDE classification of lam for the cone C.

    Walks the segment from lam (t=0) to C.e (t=1); no zero of the form on
    [0, 1] means lam sits in the same component as e.
    """
    lam = np.asarray(lam, dtype=float)
    p = restrict_line(C.form, C.e, lam)
    if p.is_zero():
        return "BOUNDARY"
    if p.degree == 0:
        return "INTERIOR"
    _, roots = real_roots(p, interval=(-tol, 1 + tol))
    roots = [r for r, _ in roots if -tol <= r <= 1 + tol]
    if not roots:
        return "INTERIOR"
    if all(abs(r) <= tol for r in roots):
        return "BOUNDARY"
    return "OUTSIDE"


def smoothness_probe(gf, samples=400, T=None, seed=3):
    """Heuristic smoothness check of the projective curve {gf = 0}.

    Locates curve points by bisecting sign changes of gf along random
    great-circle arcs, then tests the exact polynomial gradient there.
    Returns (smooth, min_gradient_norm); also flags rank-drop suspects when a
    triple T is supplied (two pencil eigenvalues inside tolerance).
    """
    rng = np.random.default_rng(seed)
    grads = gf.gradient()
    pts = []
    tries = 0
    while len(pts) < samples and tries < 40 * samples:
        tries += 1
        u = rng.standard_normal(3)
        v = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        v -= (v @ u) * u
        v /= np.linalg.norm(v)
        th = np.linspace(0, np.pi, 64)
        arc = np.cos(th)[:, None] * u + np.sin(th)[:, None] * v
        vals = gf(arc)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        for k in idx:
            a, b = th[k], th[k + 1]
            fa = vals[k]
            for _ in range(60):
                m = 0.5 * (a + b)
                fm = gf(np.cos(m) * u + np.sin(m) * v)
                if np.sign(fm) == np.sign(fa):
                    a, fa = m, fm
                else:
                    b = m
            pts.append(np.cos(0.5 * (a + b)) * u + np.sin(0.5 * (a + b)) * v)
    if not pts:
        # no real points found: an empty curve is vacuously smooth
        return True, np.inf
    pts = np.array(pts)
    gnorm = np.linalg.norm(np.stack([g(pts) for g in grads], axis=1), axis=1)
    scale = np.median(gnorm) + 1e-300

    # random probes rarely land on a node exactly; polish the weakest
    # candidates by minimizing |grad|^2 along the curve before deciding
    def objective(x):
        v = x / (np.linalg.norm(x) + 1e-300)
        g = np.array([g_i(v) for g_i in grads])
        return float(g @ g + (scale * gf(v)) ** 2)

    best = float(np.min(gnorm))
    for k in np.argsort(gnorm)[:8]:
        res = optimize.minimize(
            objective, pts[k], method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-24, "maxiter": 2000},
        )
        v = res.x / (np.linalg.norm(res.x) + 1e-300)
        if abs(gf(v)) <= 1e-9 * scale:
            gn = float(np.linalg.norm([g_i(v) for g_i in grads]))
            best = min(best, gn)
    smooth = bool(best >= 1e-6 * scale)
    if smooth and T is not None:
        for lam in pts:
            M = pencil(T, lam)
            w = np.sort(np.linalg.eigvalsh(M))
            tol = default_tol(M)
            if np.sum(np.abs(w) <= tol) >= 2:
                smooth = False
                break
    return smooth, best


def empty_curve_probe(gf, grid=20000):
    """True when gf has constant sign on a dense sphere grid (no real curve)."""
    P = fibonacci_sphere(grid)
    vals = gf(P)
    scale = np.abs(vals).max() + 1e-300
    if np.abs(vals).min() <= 1e-10 * scale:
        return False
    return bool(np.all(vals > 0) or np.all(vals < 0))


def crossings(gf, C, lam, jitters=5, seed=11):
    """Distinct transverse roots of gf on the open segment (C.e, lam)."""
    lam = np.asarray(lam, dtype=float)
    rng = np.random.default_rng(seed)
    e = C.e
    for attempt in range(jitters):
        p = restrict_line(gf, e, lam)
        if not p.is_zero() and p.degree > 0:
            _, roots = real_roots(p, interval=(1e-9, 1 - 1e-9))
            if all(m == 1 for _, m in roots):
                return len(roots)
        # tangential hit or degenerate line: nudge the viewpoint
        e = C.e + 1e-4 * rng.standard_normal(3) * np.linalg.norm(C.e)
        if hyp_membership(C, e) != "INTERIOR":
            e = C.e
    raise NonTransverse("probe line stays tangential after %d jitters" % jitters)


def depth(gf, C, lam):
    """Oval depth of lam: floor(degree/2) minus crossings seen from C.e."""
    scale = max(abs(v) for v in gf.coeffs.values())
    lam = np.asarray(lam, dtype=float)
    if abs(gf(lam)) <= 1e-12 * scale * np.linalg.norm(lam) ** gf.degree:
        raise SingularDirection("depth is undefined on the curve itself")
    return gf.degree // 2 - crossings(gf, C, lam)


@dataclass(frozen=True)
class CurveReport:
    smooth: bool
    hyperbolic: bool
    direction: np.ndarray | None
    maxDepthNest: int
    emptyCurve: bool


def curve_report(T, gf=None, probes=500, scan=100):
    """Smoothness, hyperbolicity (with a found direction), nest depth,
    and real-point emptiness of the spectral curve."""
    if gf is None:
        gf = spectral_polynomial(T)
    smooth, _ = smoothness_probe(gf, T=T)
    empty = empty_curve_probe(gf)
    direction = None
    scale = max(abs(v) for v in gf.coeffs.values())
    candidates = list(np.eye(3)) + list(-np.eye(3)) + list(fibonacci_sphere(scan))
    for e in candidates:
        if abs(gf(e)) <= 1e-9 * scale:
            continue
        if is_hyperbolic(gf, e, T, probes=probes):
            direction = np.asarray(e, dtype=float)
            break
    hyperbolic = direction is not None
    max_nest = gf.degree // 2 if hyperbolic else 0
    return CurveReport(
        smooth=smooth,
        hyperbolic=hyperbolic,
        direction=direction,
        maxDepthNest=max_nest,
        emptyCurve=empty,
    )
