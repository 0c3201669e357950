import numpy as np
import pytest

from quadagg.aggregate import (
    classify,
    drag_to_facet,
    improve_pdlc,
    is_redundant,
    lambda_membership,
    lambda_prime,
    oval_candidates,
    pdlc_reduce,
    separating_aggregation,
)
from quadagg.aggregate import reduce as agg_reduce
from quadagg.core import Hyperplane, QuadraticTriple, pencil, sample_S
from quadagg.errors import (
    HypothesisViolated,
    LeavesOrthant,
    NoInteriorSamples,
    PreconditionFailed,
)
from quadagg.verify import convex_hull


@pytest.fixture(scope="module")
def hd_samples(half_disk):
    return sample_S(half_disk, (-2, 2), grid=201)


@pytest.fixture(scope="module")
def all_pd_triple():
    return QuadraticTriple(
        np.eye(2), np.diag([1.0, 2.0]), np.array([[2.0, 0.5], [0.5, 1.0]])
    )


# ---------------------------------------------------------------------------
# membership and extreme rays


def test_membership_pd_axis(all_pd_triple):
    lab = lambda_membership(all_pd_triple, np.array([1.0, 0.0, 0.0]))
    assert lab.permissible and lab.sig.n_neg == 0


def test_membership_one_negative(half_disk):
    lab = lambda_membership(half_disk, np.array([0.5, 0.5, 0.0]))
    assert lab.permissible and lab.sig.n_neg == 1
    assert (lab.sig.n_pos, lab.sig.n_neg, lab.sig.n_zero) == (2, 1, 0)


def test_membership_two_negative_not_permissible(quartic):
    lab = lambda_membership(quartic, np.array([1.0, 0.0, 0.0]))
    assert not lab.permissible and lab.sig.n_neg == 2


def test_membership_rejects_negative_lambda(half_disk):
    with pytest.raises(PreconditionFailed):
        lambda_membership(half_disk, np.array([0.5, -0.5, 0.0]))
    with pytest.raises(PreconditionFailed):
        lambda_membership(half_disk, np.zeros(3))


def test_membership_scale_invariant(half_disk, rng):
    for _ in range(10):
        lam = rng.uniform(0.05, 1, 3)
        a = lambda_membership(half_disk, lam)
        b = lambda_membership(half_disk, 7.3 * lam)
        assert tuple(a.sig)[:3] == tuple(b.sig)[:3]


def test_lambda_prime_split_directions(split, split_ctx):
    expected = np.array(
        [[1.0, 0.0, 0.0], [0.41419, 0.91019, 0.0], [0.41419, 0.0, 0.91019]]
    )
    got = [l.vec for l in lambda_prime(split, split_ctx.gf)]
    assert len(got) == 3
    for e in expected:
        assert min(np.linalg.norm(e - v) for v in got) < 1e-3


def test_lambda_prime_properties(quartic, quartic_ctx):
    labels = lambda_prime(quartic, quartic_ctx.gf)
    assert 0 < len(labels) <= 6
    for l in labels:
        assert l.permissible
        assert np.sum(np.abs(l.vec) > 1e-10) <= 2
        assert abs(np.linalg.norm(l.vec) - 1) < 1e-12


def test_lambda_prime_empty_for_definite_triple(all_pd_triple):
    assert lambda_prime(all_pd_triple) == []


# ---------------------------------------------------------------------------
# good/bad classification


def test_classify_good(half_disk, hd_samples):
    lab = lambda_membership(half_disk, np.array([0.5, 0.5, 0.0]))
    assert classify(half_disk, lab, hd_samples) == "GOOD"


def test_classify_bad(half_disk, hd_samples):
    lab = lambda_membership(half_disk, np.array([0.75, 0.25, 0.0]))
    assert classify(half_disk, lab, hd_samples) == "BAD"


def test_classify_convex_sublevel_good(half_disk, hd_samples):
    # the quadratic block of Q_lam is psd: the sublevel set is convex
    lab = lambda_membership(half_disk, np.array([0.0, 1.0, 0.0]))
    A = pencil(half_disk, lab.vec)[:-1, :-1]
    assert np.linalg.eigvalsh(A)[0] >= -1e-12
    assert classify(half_disk, lab, hd_samples) == "GOOD"


def test_classify_requires_one_negative(quartic, hd_samples):
    lab = lambda_membership(quartic, np.array([1.0, 0.0, 0.0]))
    with pytest.raises(PreconditionFailed):
        classify(quartic, lab, hd_samples)


def test_classify_requires_samples(half_disk):
    lab = lambda_membership(half_disk, np.array([0.5, 0.5, 0.0]))
    with pytest.raises(NoInteriorSamples):
        classify(half_disk, lab, np.empty((0, 2)))


# ---------------------------------------------------------------------------
# redundancy


def test_redundant_conic_combination(quartic, quartic_ctx):
    lp = lambda_prime(quartic, quartic_ctx.gf)
    cand = 0.3 * lp[0].vec + 0.7 * lp[1].vec
    verdict, evidence = is_redundant(quartic, lp, cand, context=quartic_ctx)
    assert verdict
    assert "conic_combination" in evidence


def test_redundant_oval_point(quartic, quartic_ctx):
    lp = lambda_prime(quartic, quartic_ctx.gf)
    mu = oval_candidates(quartic, quartic_ctx)[0]
    verdict, evidence = is_redundant(quartic, lp, mu, context=quartic_ctx)
    assert verdict
    assert evidence["base_components"] == evidence["augmented_components"] == 1
    assert evidence["equality_system"] == "EMPTY"


def test_not_redundant_on_split_fixture(split, split_ctx):
    lp = lambda_prime(split, split_ctx.gf)
    mu = np.array([1.0, 3.0, 3.0]) / 7.0
    verdict, evidence = is_redundant(split, lp, mu, context=split_ctx)
    assert not verdict
    assert evidence["base_components"] == 3
    assert evidence["augmented_components"] == 2


def test_redundant_rejects_impermissible(quartic, quartic_ctx):
    lp = lambda_prime(quartic, quartic_ctx.gf)
    with pytest.raises(HypothesisViolated):
        is_redundant(quartic, lp, np.array([1.0, 0.0, 0.0]), context=quartic_ctx)


# ---------------------------------------------------------------------------
# finite reduction


def test_reduce_contractible_keeps_extremes(quartic, quartic_ctx):
    res = agg_reduce(quartic, context=quartic_ctx)
    assert res.method == "LAMBDA_PRIME"
    assert res.bound == 6
    lp = lambda_prime(quartic, quartic_ctx.gf)
    assert len(res.chosen) == len(lp)
    for a, b in zip(res.chosen, lp):
        assert np.allclose(a.vec, b.vec)


def test_reduce_split_needs_positive_aggregation(split, split_ctx):
    res = agg_reduce(split, context=split_ctx)
    assert res.method == "LAMBDA_PRIME_PLUS_POSITIVE"
    assert res.bound == 3 + 3 - 1
    assert len(res.chosen) == 4
    # the appended aggregation is strictly positive and cuts the count to 2
    extra = res.chosen[3].vec
    assert np.all(extra > 0)
    assert res.log[-1]["components"] == 2


def test_reduce_empty_lambda(all_pd_triple):
    res = agg_reduce(all_pd_triple)
    assert res.method == "LAMBDA_PRIME" and res.chosen == ()


# ---------------------------------------------------------------------------
# PDLC improvements


def test_improve_identity(half_disk):
    lab = lambda_membership(half_disk, np.array([0.5, 0.0, 0.5]))
    out = improve_pdlc(half_disk, lab, np.zeros(3))
    assert np.allclose(out.vec, lab.vec)


def test_improve_rejects_indefinite_theta(half_disk):
    lab = lambda_membership(half_disk, np.array([0.5, 0.5, 0.0]))
    with pytest.raises(PreconditionFailed):
        improve_pdlc(half_disk, lab, np.array([1.0, 0.0, 0.0]))


def test_improve_rejects_orthant_exit(half_disk, hd_samples):
    lab = lambda_membership(half_disk, np.array([0.2, 0.6, 0.2]))
    with pytest.raises(LeavesOrthant):
        improve_pdlc(half_disk, lab, np.array([0.5, 2.0, -1.0]), samples=hd_samples)


def test_improve_definite_step_contains(half_disk, hd_samples):
    lab = lambda_membership(half_disk, np.array([0.2, 0.6, 0.2]))
    out = improve_pdlc(half_disk, lab, np.array([0.1, 0.4, -0.2]), samples=hd_samples)
    assert np.all(out.vec >= 0)
    assert np.allclose(np.round(out.vec, 4), [0.2934, 0.9531, 0.0742])


def test_drag_reaches_facet(half_disk):
    lab = lambda_membership(half_disk, np.array([0.5, 0.0, 0.5]))
    out = drag_to_facet(half_disk, lab, np.array([1.0, 4.0, -2.0]))
    assert np.allclose(out.vec, [0.6, 0.8, 0.0], atol=1e-9)


def test_drag_zero_step_when_already_on_facet(half_disk):
    lab = lambda_membership(half_disk, np.array([0.75, 0.25, 0.0]))
    out = drag_to_facet(half_disk, lab, np.array([1.0, 4.0, -2.0]))
    assert np.allclose(out.vec, lab.vec)


def test_drag_requires_negative_component(half_disk):
    lab = lambda_membership(half_disk, np.array([0.5, 0.5, 0.0]))
    with pytest.raises(PreconditionFailed):
        drag_to_facet(half_disk, lab, np.array([1.0, 1.0, 0.0]))


# ---------------------------------------------------------------------------
# four-aggregation reduction


def test_pdlc_reduce_needs_definite_combination(quartic):
    with pytest.raises(PreconditionFailed):
        pdlc_reduce(quartic)


def test_pdlc_reduce_regularity_gate(half_disk):
    # the isolated point makes S != cl(int S)
    with pytest.raises(PreconditionFailed):
        pdlc_reduce(half_disk, box=(-2, 2), grid=201)


def test_pdlc_reduce_half_disk(half_disk):
    res = pdlc_reduce(half_disk, box=(-2, 2), grid=201, require_regularity=False)
    assert res.method == "PDLC_FOUR" and res.bound == 4
    got = sorted([tuple(np.round(l.vec, 4)) for l in res.chosen])
    assert got == [(0.0, 1.0, 0.0), (0.8944, 0.4472, 0.0)]


def test_pdlc_reduce_trivial_hull(full_line):
    res = pdlc_reduce(full_line, box=(-2, 2), grid=201)
    assert res.chosen == ()
    assert res.log[0]["hull"] == "all of R^n"


def test_pdlc_reduce_segment_drags_facet(segment):
    res = pdlc_reduce(segment, box=(-2, 2), grid=201)
    got = sorted(tuple(np.round(l.vec, 6)) for l in res.chosen)
    assert got == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert len(res.chosen) <= 4


# ---------------------------------------------------------------------------
# separating aggregations


def test_separating_under_pdlc(half_disk):
    H = Hyperplane.from_normal(np.array([0.3, -0.2, 1.0]))
    lam, tag = separating_aggregation(half_disk, H)
    assert lam is not None and tag == "RESTRICTED_PSD"
    assert np.all(lam >= -1e-12)


def test_separating_on_supporting_plane(modified):
    S = sample_S(modified, (-8, 8), grid=61)
    hull = convex_hull(S)
    a, b = hull.A[0], hull.b[0]
    # push the plane slightly off the sampled hull so it cannot cut S
    H = Hyperplane.affine(a, b + 0.05 * abs(b) + 0.05)
    lam, tag = separating_aggregation(modified, H, edge=60)
    assert lam is not None and tag == "RESTRICTED_PSD"


def test_separating_fails_with_contained_cone(quartic):
    H = Hyperplane.from_normal(np.array([0.8825, 0.5804, 0.0915, 0.6701]))
    lam, tag = separating_aggregation(quartic, H, edge=60)
    assert lam is None and tag == "P_H_CONTAINED"
