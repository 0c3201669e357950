"""Static SVG renderings: the determinant curve in the affine chart
lam1 + lam2 + lam3 = 1, and planar sets for n = 2.

SVG is emitted by hand (paths, polygons, circles); no plotting dependency.
"""

import numpy as np

from .core import eval_all, grid_points, pencil, _box_bounds
from .spectral import hyp_membership


def _marching_squares(Z, xs, ys):
    """Zero-level segments of a scalar grid by linear edge interpolation."""
    segs = []
    nx, ny = Z.shape

    def interp(pa, va, pb, vb):
        t = va / (va - vb)
        return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

    for i in range(nx - 1):
        for j in range(ny - 1):
            corners = [
                ((xs[i], ys[j]), Z[i, j]),
                ((xs[i + 1], ys[j]), Z[i + 1, j]),
                ((xs[i + 1], ys[j + 1]), Z[i + 1, j + 1]),
                ((xs[i], ys[j + 1]), Z[i, j + 1]),
            ]
            pts = []
            for k in range(4):
                (pa, va), (pb, vb) = corners[k], corners[(k + 1) % 4]
                if (va < 0) != (vb < 0):
                    pts.append(interp(pa, va, pb, vb))
            if len(pts) == 2:
                segs.append((pts[0], pts[1]))
            elif len(pts) == 4:
                segs.append((pts[0], pts[1]))
                segs.append((pts[2], pts[3]))
    return segs


class _Svg:
    def __init__(self, width, height, world):
        # world = (xmin, xmax, ymin, ymax), y flipped to screen coordinates
        self.w, self.h = width, height
        self.xmin, self.xmax, self.ymin, self.ymax = world
        self.items = []

    def _map(self, p):
        x = (p[0] - self.xmin) / (self.xmax - self.xmin) * self.w
        y = self.h - (p[1] - self.ymin) / (self.ymax - self.ymin) * self.h
        return x, y

    def segments(self, segs, color, width=1.2):
        parts = []
        for a, b in segs:
            (x1, y1), (x2, y2) = self._map(a), self._map(b)
            parts.append("M%.2f %.2fL%.2f %.2f" % (x1, y1, x2, y2))
        if parts:
            self.items.append(
                '<path d="%s" stroke="%s" stroke-width="%.2f" fill="none"/>'
                % ("".join(parts), color, width)
            )

    def polygon(self, pts, fill, opacity=1.0, stroke="none"):
        coords = " ".join("%.2f,%.2f" % self._map(p) for p in pts)
        self.items.append(
            '<polygon points="%s" fill="%s" fill-opacity="%.2f" stroke="%s"/>'
            % (coords, fill, opacity, stroke)
        )

    def cells(self, centers, half, fill, opacity=0.35):
        parts = []
        for c in centers:
            x, y = self._map((c[0] - half, c[1] + half))
            x2, y2 = self._map((c[0] + half, c[1] - half))
            parts.append(
                '<rect x="%.2f" y="%.2f" width="%.2f" height="%.2f"/>'
                % (x, y, x2 - x, y2 - y)
            )
        if parts:
            self.items.append(
                '<g fill="%s" fill-opacity="%.2f" stroke="none">%s</g>'
                % (fill, opacity, "".join(parts))
            )

    def circle(self, p, r, fill):
        x, y = self._map(p)
        self.items.append('<circle cx="%.2f" cy="%.2f" r="%.1f" fill="%s"/>' % (x, y, r, fill))

    def text(self, p, s, size=12):
        x, y = self._map(p)
        self.items.append(
            '<text x="%.2f" y="%.2f" font-size="%d" font-family="sans-serif">%s</text>'
            % (x, y, size, s)
        )

    def tostring(self):
        head = (
            '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
            'viewBox="0 0 %d %d"><rect width="100%%" height="100%%" fill="white"/>'
            % (self.w, self.h, self.w, self.h)
        )
        return head + "".join(self.items) + "</svg>"


def _chart(lam):
    """Chart coordinates (lam1, lam2) of a direction scaled to unit sum."""
    lam = np.asarray(lam, dtype=float)
    s = lam.sum()
    if abs(s) < 1e-12:
        s = 1e-12
    lam = lam / s
    return lam[0], lam[1]


def plot_curve(gf, cone=None, lambda_points=(), res=400, size=640):
    """SVG of the zero set of the trivariate form on the chart
    lam1 + lam2 + lam3 = 1, inside the standard triangle scaled by three.

    Overlays the three orthant facets, the hyperbolicity-cone region when
    given, and marker dots for selected directions.
    """
    # window covering the standard triangle scaled about its centroid
    lo, hi = -0.8, 2.2
    us = np.linspace(lo, hi, res)
    vs = np.linspace(lo, hi, res)
    U, V = np.meshgrid(us, vs, indexing="ij")
    L = np.stack([U.ravel(), V.ravel(), 1 - U.ravel() - V.ravel()], axis=1)
    Z = gf(L).reshape(res, res)
    svg = _Svg(size, size, (lo, hi, lo, hi))
    if cone is not None:
        step = max(1, res // 120)
        centers = []
        for i in range(0, res, step):
            for j in range(0, res, step):
                lam = np.array([us[i], vs[j], 1 - us[i] - vs[j]])
                if hyp_membership(cone, lam) == "INTERIOR":
                    centers.append((us[i], vs[j]))
        svg.cells(centers, 0.5 * (us[step] - us[0]), "#9ecae1", opacity=0.45)
    # orthant facets in the chart: lam1 = 0, lam2 = 0, lam3 = 1 - u - v = 0
    svg.segments([((0, lo), (0, hi))], "#999999", 1.0)
    svg.segments([((lo, 0), (hi, 0))], "#999999", 1.0)
    svg.segments([((lo, 1 - lo), (hi, 1 - hi))], "#999999", 1.0)
    svg.polygon([(1, 0), (0, 1), (0, 0)], "none", stroke="#555555")
    svg.segments(_marching_squares(Z, us, vs), "#d62728", 1.4)
    for lam in lambda_points:
        svg.circle(_chart(lam), 4, "#2ca02c")
    svg.text((lo + 0.05, hi - 0.05), "det curve, chart sum=1")
    return svg.tostring()


def plot_set(T, lambdas=(), box=(-5, 5), res=301, size=640):
    """SVG of the planar set S (n = 2) with the three defining curves and
    the zero curves of the given aggregations."""
    b = _box_bounds(box, 2)
    xs = np.linspace(b[0, 0], b[0, 1], res)
    ys = np.linspace(b[1, 0], b[1, 1], res)
    X = grid_points(b, 2, res)
    F = eval_all(T, X)
    svg = _Svg(size, size, (b[0, 0], b[0, 1], b[1, 0], b[1, 1]))
    inside = (F <= 0).all(axis=0)
    svg.cells(X[inside], 0.5 * (xs[1] - xs[0]), "#fdd0a2", opacity=0.8)
    colors = ("#1f77b4", "#2ca02c", "#9467bd")
    for k in range(3):
        Z = F[k].reshape(res, res)
        svg.segments(_marching_squares(Z, xs, ys), colors[k], 1.0)
    Xh = np.column_stack([X, np.ones(len(X))])
    for lam in lambdas:
        v = lam.vec if hasattr(lam, "vec") else np.asarray(lam, dtype=float)
        Z = np.einsum("ni,ij,nj->n", Xh, pencil(T, v), Xh).reshape(res, res)
        svg.segments(_marching_squares(Z, xs, ys), "#d62728", 1.4)
    return svg.tostring()
