"""Built-in example triples used by the demos and the test suite.

Each builder returns a QuadraticTriple with a distinctive, documented
behavior of the determinant curve and of the aggregation pipeline.
"""

import json

import numpy as np

from .core import QuadraticTriple


def nested_quartic_triple():
    """n = 3.  The determinant curve is a smooth quartic with a nested pair
    of ovals, hyperbolic with respect to (1, 0, 0), and no combination of the
    matrices is definite.  The common real projective zero set is empty, yet
    the intersection of all aggregations strictly contains the convex hull
    of S."""
    M1 = [[25, 0, -32, 0], [0, 25, 0, 24], [-32, 0, 6, 0], [0, 24, 0, 6]]
    M2 = [[0, 0, 12, 0], [0, 0, 0, 16], [12, 0, 4, 0], [0, 16, 0, 4]]
    M3 = [[0, 0, 0, -60], [0, 0, 10, 0], [0, 10, 0, 0], [-60, 0, 0, 0]]
    return QuadraticTriple(M1, M2, M3)


def modified_nested_quartic_triple():
    """The nested-quartic triple with the first inequality replaced by the
    combination 0.3 Q1 + 0.4 Q2 + 0.3 Q3.  For this variant no nonzero
    nonnegative combination lands in the hyperbolicity cone, and the convex
    hull of S is exactly the intersection of the reduced aggregations."""
    T = nested_quartic_triple()
    Q1t = 0.3 * T.Q[0] + 0.4 * T.Q[1] + 0.3 * T.Q[2]
    return QuadraticTriple(Q1t, T.Q[1], T.Q[2])


def smooth_cubic_triple():
    """n = 2.  f1 = x^2 - 1, f2 = y^2 - 1, f3 = 1 - (x-1)^2 - (y-1)^2.
    The determinant curve is a smooth non-hyperbolic cubic; the convex hull
    needs infinitely many good aggregations."""
    Q1 = [[1, 0, 0], [0, 0, 0], [0, 0, -1]]
    Q2 = [[0, 0, 0], [0, 1, 0], [0, 0, -1]]
    Q3 = [[-1, 0, 1], [0, -1, 1], [1, 1, -1]]
    return QuadraticTriple(Q1, Q2, Q3)


def half_disk_triple():
    """n = 2.  S is the closed left half of the unit disk together with the
    isolated point (1, 0), so S != cl(int(S)).  A definite combination exists
    at (1, 4, -2)."""
    Q1 = [[-1, 0, 0.5], [0, 0, 0], [0.5, 0, 0]]
    Q2 = np.diag([1.0, 1.0, -1.0])
    Q3 = np.diag([1.0, 1.0, -3.0])
    return QuadraticTriple(Q1, Q2, Q3)


def split_region_triple():
    """n = 3.  Combinations of the nested-quartic matrices chosen so that
    the intersection of the six extreme facet aggregations has three
    components, and one strictly positive aggregation on the middle oval of
    the determinant curve is needed to cut the count to two."""
    T = nested_quartic_triple()
    M1, M2, M3 = T.Q
    return QuadraticTriple(M1 + 1.5 * M2, M1 - 2 * M2 + 2 * M3, M1 - 2 * M2 - 2 * M3)


def segment_triple():
    """n = 1.  S is a short interval and a definite combination of the
    matrices exists.  The negative-definite cone of the pencil pokes slightly
    outside the nonnegative orthant, so the reduction drags away from an
    orthant facet; the basis vectors still describe the hull."""
    Q1 = np.diag([-1.5, 1.0])
    Q2 = np.array([[-1.0, -1.5], [-1.5, 1.5]])
    Q3 = np.array([[1.0, 0.5], [0.5, -1.5]])
    return QuadraticTriple(Q1, Q2, Q3)


def full_line_triple():
    """n = 1.  All three matrices are negative semidefinite yet a definite
    combination with mixed signs exists; no nonnegative combination has a
    positive eigenvalue, so S = R and no aggregation is needed."""
    Q1 = np.diag([-1.0, 0.0])
    Q2 = np.diag([0.0, -1.0])
    Q3 = np.array([[-1.0, -1.0], [-1.0, -1.0]])
    return QuadraticTriple(Q1, Q2, Q3)


BUILDERS = {
    "nested-quartic": nested_quartic_triple,
    "modified-nested-quartic": modified_nested_quartic_triple,
    "smooth-cubic": smooth_cubic_triple,
    "half-disk": half_disk_triple,
    "split-region": split_region_triple,
    "segment": segment_triple,
    "full-line": full_line_triple,
}


def triple_to_json(T):
    return {"n": T.n, "Q": [np.asarray(Q).tolist() for Q in T.Q]}


def triple_from_json(d):
    return QuadraticTriple(*[np.asarray(Q, dtype=float) for Q in d["Q"]])


def load_triple(path):
    with open(path) as fh:
        return triple_from_json(json.load(fh))


def dump_triple(T, path):
    with open(path, "w") as fh:
        json.dump(triple_to_json(T), fh, indent=2)
