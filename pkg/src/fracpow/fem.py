"""P1 finite element assembly for the Robin-boundary diffusion operator.

The bilinear form integrates k grad(u).grad(v) + c u v over the domain
plus g u v over the arc segment of the boundary.  Element integrals are
exact for P1 basis products with the coefficients sampled at centroids;
the arc contribution uses the chord length of each boundary edge.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AssemblyError, ParameterError
from .geometry import BoundaryLabel
from .linalg import SparseSymMatrix, cg_solve, spectrum_bounds, dense_generalized_eig

_MIN_AREA = 1e-14

_MASS_LOCAL = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
_EDGE_LOCAL = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0


@dataclass(frozen=True)
class ProblemCoefficients:
    """Diffusion k, reaction c (constants or fields of (x1, x2)), and the
    Robin coefficient g on the arc; the straight edges are natural."""

    k: object = 1.0
    c: object = 0.0
    g: float = 0.0

    def __post_init__(self):
        if not callable(self.k) and not self.k > 0.0:
            raise ParameterError(f"diffusion coefficient must be positive, got {self.k}")
        if not callable(self.c) and self.c < 0.0:
            raise ParameterError(f"reaction coefficient must be >= 0, got {self.c}")
        if self.g < 0.0:
            raise ParameterError(f"Robin coefficient must be >= 0, got {self.g}")


class DiscreteOperator:
    """Assembled stiffness/mass pair with lazily computed spectrum bounds."""

    def __init__(self, stiff, mass, mesh):
        self.stiff = stiff
        self.mass = mass
        self.mesh = mesh
        self._bounds = None
        self._dense = None

    @property
    def n(self):
        return self.mass.n

    def spectrum(self, tol=1e-8):
        if self._bounds is None:
            self._bounds = spectrum_bounds(self.stiff, self.mass, tol)
        return self._bounds

    def dense_eig(self):
        if self._dense is None:
            self._dense = dense_generalized_eig(self.stiff, self.mass)
        return self._dense


def _sample(coeff, x, y):
    if callable(coeff):
        return np.asarray(coeff(x, y), dtype=float)
    return np.full(x.shape, float(coeff))


def assemble(mesh, coeff):
    """Assemble the DiscreteOperator for the given coefficients."""
    pts = mesh.vertices
    tri = mesh.triangles
    p = pts[tri]  # (T, 3, 2)
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    if np.any(area <= _MIN_AREA):
        bad = int(np.argmin(area))
        raise AssemblyError(f"degenerate triangle {bad} (area {area[bad]:.3e})")

    cx = p[:, :, 0].mean(axis=1)
    cy = p[:, :, 1].mean(axis=1)
    k_c = _sample(coeff.k, cx, cy)
    c_c = _sample(coeff.c, cx, cy)
    if np.any(k_c <= 0.0):
        raise AssemblyError("diffusion coefficient not positive at a centroid")
    if np.any(c_c < 0.0):
        raise AssemblyError("reaction coefficient negative at a centroid")

    # gradient factors: b_i = y_j - y_k, c_i = x_k - x_j (cyclic)
    y = p[:, :, 1]
    x = p[:, :, 0]
    bvec = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    cvec = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    grads = np.einsum("ti,tj->tij", bvec, bvec) + np.einsum("ti,tj->tij", cvec, cvec)
    ke = (k_c / (4.0 * area))[:, None, None] * grads
    me = area[:, None, None] * _MASS_LOCAL[None, :, :]
    se = ke + c_c[:, None, None] * me

    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    s_rows = [rows]
    s_cols = [cols]
    s_vals = [se.ravel()]

    if coeff.g > 0.0:
        arc = mesh.edges_with_label(BoundaryLabel.ARC)
        if arc.size:
            pa = pts[arc[:, 0]]
            pb = pts[arc[:, 1]]
            length = np.linalg.norm(pb - pa, axis=1)
            ee = coeff.g * length[:, None, None] * _EDGE_LOCAL[None, :, :]
            er = np.repeat(arc, 2, axis=1).ravel()
            ec = np.tile(arc, (1, 2)).ravel()
            s_rows.append(er)
            s_cols.append(ec)
            s_vals.append(ee.ravel())

    n = pts.shape[0]
    stiff = SparseSymMatrix.from_coo(
        n, np.concatenate(s_rows), np.concatenate(s_cols), np.concatenate(s_vals)
    )
    mass = SparseSymMatrix.from_coo(n, rows, cols, me.ravel())
    return DiscreteOperator(stiff, mass, mesh)


def l2_project(f, mesh, mass):
    """Coefficients of the L2 projection of f onto the P1 space.

    The load vector uses the three-edge-midpoint rule (exact for
    quadratics); the mass solve runs to relative residual 1e-10.
    """
    pts = mesh.vertices
    tri = mesh.triangles
    p = pts[tri]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    b = np.zeros(pts.shape[0])
    # midpoint of edge (i, j): basis i and j are 1/2 there, the third is 0
    for i, j in ((0, 1), (1, 2), (2, 0)):
        mid = 0.5 * (p[:, i] + p[:, j])
        fv = np.asarray(f(mid[:, 0], mid[:, 1]), dtype=float)
        contrib = area / 3.0 * fv * 0.5
        np.add.at(b, tri[:, i], contrib)
        np.add.at(b, tri[:, j], contrib)
    return cg_solve(mass, b, 1e-10)


def error_norms(w, exact, mesh, mass):
    """Mass-norm and vertex-max norm of w minus the nodal interpolant
    of the exact field (callable of x1, x2 or a nodal array)."""
    if callable(exact):
        vals = np.asarray(exact(mesh.vertices[:, 0], mesh.vertices[:, 1]), dtype=float)
    else:
        vals = np.asarray(exact, dtype=float)
    if vals.shape != (mesh.n_vertices,):
        raise ParameterError("exact field does not evaluate to one value per vertex")
    e = np.asarray(w, dtype=float) - vals
    return mass.norm(e), float(np.max(np.abs(e)))


def l2_error(w, field, mesh):
    """L2(Omega) norm of the difference between the P1 function with
    coefficients w and a smooth field, by the edge-midpoint rule.

    Unlike error_norms this measures against the field itself, not its
    interpolant, so it includes the interpolation deficit of the mesh;
    it is the right quantity for convergence tables against a known
    closed-form solution.
    """
    w = np.asarray(w, dtype=float)
    pts = mesh.vertices
    tri = mesh.triangles
    p = pts[tri]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    wt = w[tri]
    total = 0.0
    for i, j in ((0, 1), (1, 2), (2, 0)):
        mid = 0.5 * (p[:, i] + p[:, j])
        e = 0.5 * (wt[:, i] + wt[:, j]) - np.asarray(field(mid[:, 0], mid[:, 1]), dtype=float)
        total += float(np.sum(area / 3.0 * e * e))
    return math.sqrt(total)
