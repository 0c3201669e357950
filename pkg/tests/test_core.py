import numpy as np
import pytest

from quadagg.core import (
    Hyperplane,
    QuadraticTriple,
    eval_homogeneous,
    eval_quadratic,
    pencil,
    points_at_infinity,
    restrict,
    sample_S,
    signature,
)
from quadagg.errors import EmptySample, PreconditionFailed


def test_signature_diagonal():
    sig = signature(np.diag([3.0, -1.0, 0.0]))
    assert (sig.n_pos, sig.n_neg, sig.n_zero) == (1, 1, 1)


def test_signature_components_sum_to_dim(rng):
    for _ in range(50):
        d = int(rng.integers(2, 7))
        M = rng.standard_normal((d, d))
        M = (M + M.T) / 2
        sig = signature(M)
        assert sig.n_pos + sig.n_neg + sig.n_zero == d


def test_triple_symmetrizes_input():
    M = np.array([[1.0, 2.0], [0.0, 1.0]])
    T = QuadraticTriple(M, np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(T.Q[0], T.Q[0].T)
    assert T.Q[0][0, 1] == pytest.approx(1.0)


def test_triple_rejects_dependent_matrices():
    Q1 = np.diag([1.0, 2.0])
    with pytest.raises(PreconditionFailed):
        QuadraticTriple(Q1, 2 * Q1, np.eye(2))


def test_pencil_is_linear(quartic, rng):
    lam = rng.standard_normal(3)
    mu = rng.standard_normal(3)
    assert np.allclose(
        pencil(quartic, lam + mu), pencil(quartic, lam) + pencil(quartic, mu)
    )


def test_eval_quadratic_on_planar_fixture(cubic):
    assert eval_quadratic(cubic, np.eye(3)[0], np.array([1.0, 0.0])) == pytest.approx(0.0)
    assert eval_quadratic(cubic, np.eye(3)[2], np.array([1.0, 1.0])) == pytest.approx(1.0)


def test_eval_quadratic_at_origin_is_constant_block(quartic, rng):
    lam = rng.standard_normal(3)
    c = sum(lam[i] * quartic.c(i) for i in range(3))
    assert eval_quadratic(quartic, lam, np.zeros(3)) == pytest.approx(c)


def test_homogeneous_matches_affine(quartic, rng):
    for _ in range(20):
        lam = rng.standard_normal(3)
        x = rng.standard_normal(3)
        a = eval_homogeneous(quartic, lam, np.append(x, 1.0))
        b = eval_quadratic(quartic, lam, x)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_restrict_identity():
    H = Hyperplane.from_normal(np.array([0.0, 0.0, 0.0, 1.0]))
    assert np.allclose(restrict(np.eye(4), H), np.eye(3))


def test_restrict_coordinate_plane_is_leading_block(quartic):
    H = Hyperplane.from_normal(np.array([0.0, 0.0, 0.0, 1.0]))
    R = restrict(quartic.Q[0], H)
    expected = np.array([[25.0, 0.0, -32.0], [0.0, 25.0, 0.0], [-32.0, 0.0, 6.0]])
    # the basis is orthonormal in the plane x4 = 0, so R is congruent to the
    # leading block; signatures must match and here the basis is canonical
    sig = signature(R)
    assert (sig.n_pos, sig.n_neg, sig.n_zero) == (2, 1, 0)
    assert np.allclose(np.sort(np.linalg.eigvalsh(R)), np.sort(np.linalg.eigvalsh(expected)))


def test_restrict_signature_is_basis_independent(quartic, rng):
    v = rng.standard_normal(4)
    H1 = Hyperplane.from_normal(v)
    # rotate the tangent basis
    A = rng.standard_normal((3, 3))
    Qr, _ = np.linalg.qr(A)
    H2 = Hyperplane(normal=H1.normal, basis=H1.basis @ Qr)
    for Q in quartic.Q:
        assert tuple(signature(restrict(Q, H1)))[:3] == tuple(signature(restrict(Q, H2)))[:3]


def test_sample_grid_contains_known_point(cubic):
    pts = sample_S(cubic, (-2, 2), grid=201)
    assert len(pts) > 0
    d = np.linalg.norm(pts - np.array([-0.5, -0.5]), axis=1)
    assert d.min() < 1e-9


def test_sample_empty_set_raises():
    T = QuadraticTriple(
        np.diag([1.0, 1.0, 1.0]), np.diag([1.0, 0.0, -1.0]), np.diag([0.0, 1.0, -1.0])
    )
    with pytest.raises(EmptySample):
        sample_S(T, (-2, 2), grid=51)


def test_sample_isolated_point_kept(half_disk):
    pts = sample_S(half_disk, (-2, 2), grid=201)
    assert np.linalg.norm(pts - np.array([-0.5, 0.0]), axis=1).min() < 1e-9
    assert np.linalg.norm(pts - np.array([1.0, 0.0]), axis=1).min() < 1e-6


def test_sample_random_mode_reproducible(cubic):
    a = sample_S(cubic, (-2, 2), count=4000, seed=7)
    b = sample_S(cubic, (-2, 2), count=4000, seed=7)
    assert np.array_equal(a, b)


def test_points_at_infinity_pd_block():
    T = QuadraticTriple(np.eye(3), np.diag([1.0, -1.0, 0.0]), np.diag([0.0, 1.0, -1.0]))
    ok, witness = points_at_infinity(T)
    assert ok and witness is None


def test_points_at_infinity_planar_fixture(cubic):
    ok, _ = points_at_infinity(cubic)
    assert ok


def test_points_at_infinity_witness():
    T = QuadraticTriple(
        -np.eye(3), np.diag([-1.0, -2.0, 1.0]), np.diag([-2.0, -1.0, -1.0])
    )
    ok, witness = points_at_infinity(T)
    assert not ok
    A = T.A(0)
    assert witness is not None and witness @ A @ witness <= 1e-9
