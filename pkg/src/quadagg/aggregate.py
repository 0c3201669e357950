"""The aggregation pipeline.

An aggregation is a nonnegative combination f_lam = sum lam_i f_i of the
defining quadratics.  Lambda is the set of lam in the nonnegative orthant
whose pencil matrix Q_lam has exactly one negative eigenvalue; an aggregation
is good when the convex hull of S stays inside {f_lam <= 0}.  This module
extracts the extreme facet aggregations, classifies good/bad by sampling,
eliminates redundant aggregations, and reduces to small describing sets.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, nnls

from .core import default_tol, eval_all, pencil, points_at_infinity, sample_S, signature, restrict
from .cones import (
    Certificate,
    PolyCone3,
    certify_system_empty,
    certify_variety_empty,
    dual,
    boundary_samples,
    hyp_cone_containment,
    omega,
    pdlc_search,
    spectral_context,
    fibonacci_sphere,
)
from .errors import (
    CurveNotHyperbolic,
    HypothesisViolated,
    LeavesOrthant,
    NoInteriorSamples,
    PreconditionFailed,
    VarietyNotEmpty,
)
from .spectral import HypCone, det_form, hyp_membership, real_roots, restrict_line


@dataclass(frozen=True)
class AggregationLabel:
    """A unit-length lam in the nonnegative orthant with its pencil data."""

    lam: tuple
    sig: object
    permissible: bool
    quality: str  # GOOD | BAD | UNKNOWN | BOUNDARY

    @property
    def vec(self):
        return np.array(self.lam)

    def to_json(self):
        return {
            "lambda": list(self.lam),
            "signature": list(self.sig),
            "permissible": self.permissible,
            "quality": self.quality,
        }


def lambda_membership(T, lam, tol=None):
    """Label a nonnegative lam by the signature of its pencil matrix."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < -1e-12 * max(1.0, np.linalg.norm(lam))):
        raise PreconditionFailed("lam must lie in the nonnegative orthant")
    nv = np.linalg.norm(lam)
    if nv == 0:
        raise PreconditionFailed("lam must be nonzero")
    lam = lam / nv
    sig = signature(pencil(T, lam), tol=tol)
    quality = "BOUNDARY" if sig.n_zero > 0 else "UNKNOWN"
    return AggregationLabel(
        lam=tuple(lam), sig=sig, permissible=sig.n_neg <= 1, quality=quality
    )


def _facet_lambda_intervals(T, gf, i, j):
    """Maximal t-intervals of lam(t) = (1-t)e_i + t e_j with exactly one
    negative pencil eigenvalue."""
    ei = np.eye(3)[i]
    ej = np.eye(3)[j]
    p = restrict_line(gf, ej, ei)  # t=0 at e_i, t=1 at e_j
    cuts = [0.0, 1.0]
    if not p.is_zero() and p.degree > 0:
        _, roots = real_roots(p, interval=(1e-12, 1 - 1e-12))
        cuts = [0.0] + [r for r, _ in roots] + [1.0]
    intervals = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-12:
            continue
        mid = 0.5 * (a + b)
        sig = signature(pencil(T, (1 - mid) * ei + mid * ej))
        if sig.n_neg == 1:
            if intervals and abs(intervals[-1][1] - a) < 1e-10:
                intervals[-1] = (intervals[-1][0], b)
            else:
                intervals.append((a, b))
    return intervals


def lambda_prime(T, gf=None):
    """Unit generators of the extreme rays of Lambda with support <= 2.

    Per facet of the orthant, the one-negative-eigenvalue parameter set is a
    union of closed intervals; only its outermost endpoints generate extreme
    rays (every inner endpoint is a conic combination of the outer ones), so
    at most two rays per facet and six in total are emitted.
    """
    if gf is None:
        gf = det_form(T.stacked())
    out = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        intervals = _facet_lambda_intervals(T, gf, i, j)
        if not intervals:
            continue
        lo = intervals[0][0]
        hi = intervals[-1][1]
        ei, ej = np.eye(3)[i], np.eye(3)[j]
        for t in {lo, hi}:
            out.append((1 - t) * ei + t * ej)
    labels = []
    for lam in out:
        lam = lam / np.linalg.norm(lam)
        if all(np.linalg.norm(lam - l.vec) > 1e-8 for l in labels):
            labels.append(lambda_membership(T, lam))
    return labels


def classify(T, label, samples, margin=1e-8):
    """GOOD/BAD verdict for a permissible aggregation on a sample corpus.

    Convex sublevel sets are good outright; otherwise the corpus restricted
    to {f_lam <= 0} must stay on one side of the hyperplane spanned by the
    negative eigenvector.  GOOD verdicts are sampling-sound only.
    """
    if label.sig.n_neg != 1:
        raise PreconditionFailed("classification needs exactly one negative eigenvalue")
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(samples) == 0:
        raise NoInteriorSamples("empty sample corpus")
    lam = label.vec
    M = pencil(T, lam)
    A = M[:-1, :-1]
    if np.linalg.eigvalsh(A)[0] >= -default_tol(A):
        return "GOOD"
    w, V = np.linalg.eigh(M)
    a = V[:, 0]
    Xh = np.column_stack([samples, np.ones(len(samples))])
    f_lam = np.einsum("ni,ij,nj->n", Xh, M, Xh)
    s = Xh @ a
    sel = s[f_lam <= 1e-12 * (1 + np.abs(f_lam).max())]
    if len(sel) == 0:
        raise NoInteriorSamples("no sample satisfies the aggregated inequality")
    if (sel > margin).any() and (sel < -margin).any():
        return "BAD"
    return "GOOD"


@dataclass(frozen=True)
class ReductionResult:
    chosen: tuple
    method: str  # LAMBDA_PRIME | LAMBDA_PRIME_PLUS_POSITIVE | PDLC_FOUR
    bound: int
    log: tuple = ()

    def to_json(self):
        return {
            "chosen": [l.to_json() for l in self.chosen],
            "method": self.method,
            "bound": self.bound,
            "log": list(self.log),
        }


def _as_vec(lam):
    return lam.vec if isinstance(lam, AggregationLabel) else np.asarray(lam, dtype=float)


def is_redundant(T, base, candidate, context=None, variety_cert=None):
    """Whether the candidate aggregation adds nothing to the base set.

    True iff (a) the candidate constraint is never active on the base region
    (the equality-augmented system is certified empty) and (b) appending the
    candidate does not change the component count of the level set Omega^n.
    """
    base = [_as_vec(l) for l in base]
    cand = _as_vec(candidate)
    for lam in base + [cand]:
        if not lambda_membership(T, lam).permissible:
            raise HypothesisViolated("all inputs must be permissible")
    # a conic combination of base elements is redundant outright
    B = np.array([b / np.linalg.norm(b) for b in base]).T
    coef, resid = nnls(B, cand / np.linalg.norm(cand))
    if resid <= 1e-9:
        return True, {"conic_combination": [round(float(c), 9) for c in coef]}
    if context is None:
        context = spectral_context(T)
    if context.cone is None:
        raise HypothesisViolated("the determinant form is not certified hyperbolic")
    if variety_cert is None:
        variety_cert = certify_variety_empty(T, context=context)
    if variety_cert.verdict != "EMPTY":
        raise HypothesisViolated("the variety is not certified empty")
    n = T.n
    rep_base = omega(T, dual(PolyCone3.from_generators(base)), n, context=context)
    rep_aug = omega(T, dual(PolyCone3.from_generators(base + [cand])), n, context=context)
    counts_agree = rep_base.componentCount == rep_aug.componentCount
    evidence = {
        "base_components": rep_base.componentCount,
        "augmented_components": rep_aug.componentCount,
    }
    if not counts_agree:
        evidence["equality_system"] = "skipped"
        return False, evidence
    K_eq = dual(PolyCone3.from_generators(base + [cand, -cand]))
    cert = certify_system_empty(T, K_eq, context=context, variety_cert=variety_cert)
    evidence["equality_system"] = cert.verdict
    return cert.verdict == "EMPTY", evidence


def oval_candidates(T, context, count=64):
    """Strictly positive aggregations on the determinant curve, located by
    walking rays from the cone direction and isolating every crossing."""
    gf = context.gf
    C = context.cone
    e = np.asarray(C.e, dtype=float)
    e = e / np.linalg.norm(e)
    cands = []
    res = 10
    for a in range(1, res):
        for b in range(1, res - a):
            c = res - a - b
            d = np.array([a, b, c], dtype=float)
            d /= np.linalg.norm(d)
            p = restrict_line(gf, d, e)  # t=0 at e, t=1 at d
            if p.is_zero() or p.degree == 0:
                continue
            _, roots = real_roots(p, interval=(1e-9, 4.0))
            # outermost crossings first: they reach past the inner ovals
            for t in sorted((r for r, _ in roots), reverse=True):
                mu = (1 - t) * e + t * d
                if np.any(mu <= 1e-9):
                    continue
                mu /= np.linalg.norm(mu)
                sig = signature(pencil(T, mu))
                if sig.n_neg != 1:
                    continue
                if all(np.linalg.norm(mu - v) > 1e-6 for v in cands):
                    cands.append(mu)
                if len(cands) >= count:
                    return cands
    return cands


def reduce(T, context=None, patch_res=120, candidate_count=64):
    """Finite describing set of aggregations.

    If the level set Omega^n over the cone of the extreme facet aggregations
    is connected without a loop, those aggregations suffice.  Otherwise the
    set is augmented greedily by strictly positive aggregations on the middle
    oval that cut the component count.
    """
    if context is None:
        context = spectral_context(T)
    if context.cone is None:
        raise CurveNotHyperbolic("reduction needs a hyperbolic determinant form")
    cert = certify_variety_empty(T, context=context)
    if cert.verdict != "EMPTY":
        raise VarietyNotEmpty("reduction needs a certified-empty variety")
    lp = lambda_prime(T, context.gf)
    if not lp:
        return ReductionResult(chosen=(), method="LAMBDA_PRIME", bound=6)
    n = T.n
    vecs = [l.vec for l in lp]
    rep = omega(T, dual(PolyCone3.from_generators(vecs)), n, context=context, patch_res=patch_res)
    if rep.componentCount <= 1 and not rep.hasLoop:
        return ReductionResult(
            chosen=tuple(lp),
            method="LAMBDA_PRIME",
            bound=6,
            log=({"components": rep.componentCount},),
        )
    h0 = rep.componentCount
    bound = len(lp) + h0 - 1
    chosen = list(lp)
    count = h0
    log = [{"components": h0, "with": "extreme facet aggregations"}]
    current = PolyCone3.from_generators([l.vec for l in chosen])
    stale = 0
    for mu in oval_candidates(T, context, count=candidate_count):
        if len(chosen) >= bound or count <= 1 or stale >= 8:
            break
        if current.contains(mu):
            continue
        trial = omega(
            T,
            dual(PolyCone3.from_generators([l.vec for l in chosen] + [mu])),
            n,
            context=context,
            patch_res=patch_res,
        )
        if trial.componentCount < count:
            chosen.append(lambda_membership(T, mu))
            count = trial.componentCount
            current = PolyCone3.from_generators([l.vec for l in chosen])
            log.append({"components": count, "added": list(np.round(mu, 6))})
            stale = 0
        else:
            stale += 1
    return ReductionResult(
        chosen=tuple(chosen),
        method="LAMBDA_PRIME_PLUS_POSITIVE",
        bound=bound,
        log=tuple(log),
    )


def improve_pdlc(T, label, theta, samples=None, check_count=1000):
    """Tighten an aggregation by a positive semidefinite direction.

    Returns the label of lam + theta; the sublevel set of the result is
    contained in the original one, spot-checked on the corpus if given.
    """
    theta = np.asarray(theta, dtype=float)
    Mth = pencil(T, theta)
    if np.linalg.eigvalsh(Mth)[0] < -default_tol(Mth):
        raise PreconditionFailed("Q_theta must be positive semidefinite")
    new = label.vec + theta
    if np.linalg.norm(new) <= 1e-12:
        raise LeavesOrthant("lam + theta vanishes")
    if np.any(new < -1e-10 * np.linalg.norm(new)):
        raise LeavesOrthant("lam + theta leaves the nonnegative orthant")
    new = np.clip(new, 0.0, None)
    out = lambda_membership(T, new)
    if samples is not None and len(samples) > 0:
        X = np.atleast_2d(samples)[:check_count]
        Xh = np.column_stack([X, np.ones(len(X))])
        f_new = np.einsum("ni,ij,nj->n", Xh, pencil(T, out.vec), Xh)
        f_old = np.einsum("ni,ij,nj->n", Xh, pencil(T, label.vec), Xh)
        scale = 1 + np.abs(f_old).max()
        inside = f_new <= 1e-9 * scale
        if np.any(f_old[inside] > 1e-7 * scale):
            raise PreconditionFailed("containment spot-check failed")
    return out


def drag_to_facet(T, label, theta):
    """Push lam along theta until a coordinate with negative theta-component
    hits zero; the scaled step keeps the sum inside the orthant."""
    theta = np.asarray(theta, dtype=float)
    lam = label.vec
    neg = theta < -1e-12
    if not neg.any():
        raise PreconditionFailed("theta has no negative coordinate to drag against")
    eps = float(np.min(-lam[neg] / theta[neg]))
    return improve_pdlc(T, label, eps * theta)


def _facet_good_extremes(T, gf, i, j, samples, grid=201):
    """Outermost GOOD parameters on the facet spanned by e_i, e_j."""
    ei, ej = np.eye(3)[i], np.eye(3)[j]

    def verdict(t):
        lam = (1 - t) * ei + t * ej
        lab = lambda_membership(T, lam)
        if lab.sig.n_neg != 1:
            return None
        try:
            return classify(T, lab, samples)
        except NoInteriorSamples:
            return None

    ts = np.linspace(0, 1, grid)
    good = [verdict(t) == "GOOD" for t in ts]
    if not any(good):
        return []
    lo_idx = good.index(True)
    hi_idx = len(good) - 1 - good[::-1].index(True)
    out = []
    for idx, side in ((lo_idx, -1), (hi_idx, +1)):
        t = ts[idx]
        neighbor = idx + side
        if 0 <= neighbor < grid and not good[neighbor]:
            a, b = (ts[neighbor], t) if side < 0 else (t, ts[neighbor])
            # shrink toward the last GOOD parameter
            for _ in range(40):
                m = 0.5 * (a + b)
                if verdict(m) == "GOOD":
                    if side < 0:
                        b = m
                    else:
                        a = m
                else:
                    if side < 0:
                        a = m
                    else:
                        b = m
            t = b if side < 0 else a
        out.append((1 - t) * ei + t * ej)
    return out


def pdlc_reduce(T, box=(-5, 5), grid=101, samples=None, context=None, require_regularity=True):
    """Describing set of at most four aggregations under a definite
    combination, no points at infinity, and nonempty interior."""
    from .verify import regularity_probe

    lam_pd, val = pdlc_search(T)
    if val <= 0:
        raise PreconditionFailed("no positive definite combination found")
    if context is None:
        context = spectral_context(T)
    # no nonnegative combination with n positive eigenvalues: the hull is all
    # of R^n and no aggregation is needed (checked before the boundedness
    # preconditions, which such systems necessarily fail)
    rep0 = omega(T, PolyCone3.orthant(-1), T.n, context=context)
    if rep0.componentCount == 0:
        return ReductionResult(
            chosen=(),
            method="PDLC_FOUR",
            bound=4,
            log=({"hull": "all of R^n", "pd_witness": list(np.round(lam_pd, 6))},),
        )
    ok, witness = points_at_infinity(T)
    if not ok:
        raise PreconditionFailed("points at infinity exist")
    if samples is None:
        samples = sample_S(T, box, grid=grid)
    strict = eval_all(T, samples) < -1e-9
    if not strict.all(axis=0).any():
        raise PreconditionFailed("S has empty interior on the box")
    if require_regularity and not regularity_probe(T, box, grid):
        raise PreconditionFailed("S fails the regularity heuristic")
    gf = context.gf
    nd_center = -lam_pd / np.linalg.norm(lam_pd)
    Cnd = HypCone.build(gf, nd_center, T)
    B = boundary_samples(Cnd, count=300)
    nd_pts = np.vstack([B, nd_center[None, :]]) if len(B) else nd_center[None, :]
    contained = bool(nd_pts.min() >= -1e-8)
    log = [{"pd_witness": list(np.round(lam_pd, 6)), "nd_cone_in_orthant": contained}]
    facets = ((0, 1), (0, 2), (1, 2))
    if not contained:
        # some psd direction has a negative coordinate: every facet whose
        # support covers those coordinates can be dragged away
        order = np.argsort(nd_pts.min(axis=1))
        nu = nd_pts[order[0]]
        theta = -nu
        N = set(np.nonzero(theta < -1e-9)[0].tolist())
        remaining = [f for f in facets if not N.issubset(f)]
        chosen = []
        for i, j in remaining:
            chosen += _facet_good_extremes(T, gf, i, j, samples)
        log.append({"theta": list(np.round(theta, 6)), "facets": remaining})
        method = "PDLC_FOUR"
    elif T.n == 1:
        # on the line every boundary direction of the contained cone is a
        # permissible aggregation connected to the good ones, so the basis
        # vectors already describe the hull
        chosen = [np.eye(3)[i] for i in range(3)]
        method = "PDLC_FOUR"
    elif T.n == 2:
        chosen = []
        for i, j in facets:
            chosen += _facet_good_extremes(T, gf, i, j, samples)
        method = "PDLC_FOUR"
    else:
        rep = omega(T, PolyCone3.orthant(-1), T.n, context=context)
        if rep.componentCount == 0:
            return ReductionResult(chosen=(), method="PDLC_FOUR", bound=4, log=tuple(log))
        cands = []
        for i, j in facets:
            cands += _facet_good_extremes(T, gf, i, j, samples)
        pts, npos = rep.samples
        hot = pts[npos >= T.n]
        # keep the two candidates nearest the n-positive region
        cands.sort(key=lambda v: np.min(np.linalg.norm(hot - v / np.linalg.norm(v), axis=1)))
        chosen = cands[:2]
        method = "PDLC_FOUR"
    labels = []
    for lam in chosen:
        lam = lam / np.linalg.norm(lam)
        if all(np.linalg.norm(lam - l.vec) > 1e-8 for l in labels):
            labels.append(lambda_membership(T, lam))
    if len(labels) > 4:
        raise PreconditionFailed("reduction exceeded the four-aggregation bound")
    return ReductionResult(chosen=tuple(labels), method="PDLC_FOUR", bound=4, log=tuple(log))


def separating_aggregation(T, H, edge=200, tol=1e-9):
    """A nonnegative lam whose pencil restricted to the hyperplane H is
    positive semidefinite, or (None, diagnosis).

    Maximizes the smallest restricted eigenvalue over the simplex by a
    triangular grid plus local refinement.  When no lam qualifies, reports
    whether the restricted hyperbolicity cone sits inside the unrestricted
    one (the known failure mode of the sufficiency mechanism).
    """
    R = np.stack([restrict(Q, H) for Q in T.Q])

    def min_eig(lam):
        return float(np.linalg.eigvalsh(np.einsum("k,kij->ij", lam, R))[0])

    best, best_lam = -np.inf, None
    for a in range(edge + 1):
        for b in range(edge + 1 - a):
            lam = np.array([a, b, edge - a - b], dtype=float) / edge
            v = min_eig(lam)
            if v > best:
                best, best_lam = v, lam
    res = minimize(
        lambda u: -min_eig(np.abs(u) / np.abs(u).sum()),
        best_lam + 1e-3,
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000},
    )
    cand = np.abs(res.x) / np.abs(res.x).sum()
    if -res.fun > best:
        best, best_lam = -res.fun, cand
    scale = 1 + max(np.linalg.norm(M) for M in R)
    if best > -tol * scale:
        return best_lam, "RESTRICTED_PSD"
    # diagnose: is the restricted hyperbolicity cone inside the original one?
    diagnosis = "UNKNOWN"
    try:
        gH = det_form(R)
        big = spectral_context(T)
        if big.cone is not None:
            e = big.cone.e
            CH = HypCone.build(gH, e, T) if abs(gH(e)) > 1e-12 else None
            if CH is not None:
                inside = True
                for a in fibonacci_sphere(300):
                    if hyp_membership(CH, a) == "INTERIOR":
                        if hyp_membership(big.cone, a) == "OUTSIDE":
                            inside = False
                            break
                diagnosis = "P_H_CONTAINED" if inside else "P_H_NOT_CONTAINED"
    except Exception:
        pass
    return None, diagnosis
