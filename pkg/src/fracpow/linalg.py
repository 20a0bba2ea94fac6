"""Sparse symmetric storage, CG, spectrum bounds, and a dense eigen-oracle.

Only the lower triangle (with diagonal) of a symmetric matrix is
stored; matrix-vector products go through a cached full CSR view.  The
extreme generalized eigenvalues of the (stiffness, mass) pencil come
from inverse/power iteration with CG inner solves, and a desk-scale
dense decomposition (Cholesky reduction plus Jacobi rotations) serves
as the independent oracle for the iterative paths.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EigenSolverError, ParameterError, SolverError

_DENSE_DIM_CAP = 5000


class SparseSymMatrix:
    """Symmetric sparse matrix keeping the lower-plus-diagonal triangle in CSR."""

    def __init__(self, tri):
        tri = sp.csr_matrix(tri)
        if tri.shape[0] != tri.shape[1] or tri.shape[0] < 1:
            raise ParameterError(f"matrix must be square and non-empty, got {tri.shape}")
        if (sp.triu(tri, k=1)).nnz:
            raise ParameterError("storage must contain only the lower triangle")
        tri.sum_duplicates()
        tri.sort_indices()
        self._tri = tri
        self._full = None

    @classmethod
    def from_coo(cls, n, rows, cols, values):
        """Build from full symmetric COO triplets; the strict upper
        triangle is dropped (its mirror carries the same sums)."""
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        values = np.asarray(values, dtype=float)
        keep = rows >= cols
        tri = sp.coo_matrix((values[keep], (rows[keep], cols[keep])), shape=(n, n))
        return cls(tri.tocsr())

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(sp.csr_matrix(np.tril(a)))

    @property
    def n(self):
        return self._tri.shape[0]

    @property
    def indptr(self):
        return self._tri.indptr

    @property
    def indices(self):
        return self._tri.indices

    @property
    def data(self):
        return self._tri.data

    @property
    def full(self):
        if self._full is None:
            self._full = (self._tri + sp.triu(self._tri.T, k=1)).tocsr()
        return self._full

    def matvec(self, x):
        return self.full @ x

    def to_dense(self):
        d = self._tri.toarray()
        return d + np.triu(d.T, k=1)

    def diagonal(self):
        return self._tri.diagonal()

    def inner(self, u, v):
        """Energy inner product u^T A v."""
        return float(np.dot(u, self.matvec(v)))

    def norm(self, v):
        """Energy norm sqrt(v^T A v) (A assumed positive semidefinite)."""
        return math.sqrt(max(self.inner(v, v), 0.0))


def add_scaled(ca, a, cb, b):
    """Return ca * A + cb * B as a new SparseSymMatrix."""
    if a.n != b.n:
        raise ParameterError("dimension mismatch in matrix combination")
    return SparseSymMatrix(ca * a._tri + cb * b._tri)


@dataclass(frozen=True)
class SpectrumBounds:
    """Extreme generalized eigenvalues of the (stiff, mass) pencil."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 < self.lower <= self.upper):
            raise ParameterError(f"bounds must satisfy 0 < lower <= upper, got {self}")

    @property
    def safe_lower(self):
        """Lower bound nudged down so downstream users stay below the
        true smallest eigenvalue despite iteration error."""
        return self.lower * (1.0 - 1e-8)


def cg_solve(mat, rhs, tol, max_iter=None, x0=None, callback=None):
    """Conjugate gradients for an SPD system.

    Stops once the relative residual ||A x - b|| / ||b|| drops below
    `tol` (verified against the true residual); raises SolverError with
    the achieved residual if the iteration cap (default 10 n) is hit.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = mat.n
    if rhs.shape != (n,):
        raise ParameterError(f"rhs length {rhs.shape} does not match dimension {n}")
    if max_iter is None:
        max_iter = 10 * n
    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return np.zeros(n)
    target = tol * b_norm

    if x0 is None:
        x = np.zeros(n)
        r = rhs.copy()
    else:
        x = np.array(x0, dtype=float)
        r = rhs - mat.matvec(x)
    p = r.copy()
    rs = float(np.dot(r, r))

    for k in range(max_iter):
        if math.sqrt(rs) <= target:
            # guard against recursive-residual drift
            r = rhs - mat.matvec(x)
            rs = float(np.dot(r, r))
            if math.sqrt(rs) <= target:
                return x
            p = r.copy()
        ap = mat.matvec(p)
        alpha = rs / float(np.dot(p, ap))
        x += alpha * p
        r -= alpha * ap
        rs_new = float(np.dot(r, r))
        p = r + (rs_new / rs) * p
        rs = rs_new
        if callback is not None:
            callback(k + 1, x)
    if math.sqrt(rs) <= target:
        r = rhs - mat.matvec(x)
        if np.linalg.norm(r) <= target:
            return x
    raise SolverError(
        f"CG did not reach relative residual {tol:g} in {max_iter} iterations",
        residual=math.sqrt(rs) / b_norm,
        iterations=max_iter,
    )


def _mass_normalize(mass, v):
    nrm = mass.norm(v)
    if nrm == 0.0:
        raise EigenSolverError("iteration vector collapsed to zero")
    return v / nrm


def spectrum_bounds(stiff, mass, tol, max_iter=400):
    """Extreme eigenvalues of Stiff phi = lambda Mass phi.

    The smallest eigenvalue comes from inverse iteration (CG solves
    with Stiff), the largest from power iteration on the mass-solved
    operator; both report the Rayleigh quotient of the final iterate,
    hence genuine inner bounds of the spectrum interval.
    """
    if stiff.n != mass.n:
        raise ParameterError("pencil matrices must share their dimension")
    n = stiff.n
    cg_tol = min(1e-10, tol)

    # smallest: v <- Stiff^{-1} Mass v
    v = _mass_normalize(mass, np.ones(n))
    rho = stiff.inner(v, v)
    guess = None
    settled = 0
    for _ in range(max_iter):
        y = cg_solve(stiff, mass.matvec(v), cg_tol, x0=guess)
        guess = y
        v = _mass_normalize(mass, y)
        rho_new = stiff.inner(v, v)
        settled = settled + 1 if abs(rho_new - rho) <= tol * abs(rho_new) else 0
        rho = rho_new
        if settled >= 2:
            break
    else:
        raise EigenSolverError(
            "inverse iteration for the lower bound did not settle",
            residual=abs(rho_new - rho),
        )
    lower = rho

    # largest: v <- Mass^{-1} Stiff v; the top of the spectrum may
    # cluster, so require three settled Rayleigh quotients.
    rng = np.random.default_rng(0x5EED)
    v = _mass_normalize(mass, rng.standard_normal(n))
    rho = stiff.inner(v, v)
    guess = None
    settled = 0
    for _ in range(max(max_iter, 5000)):
        y = cg_solve(mass, stiff.matvec(v), cg_tol, x0=guess)
        guess = y
        v = _mass_normalize(mass, y)
        rho_new = stiff.inner(v, v)
        settled = settled + 1 if abs(rho_new - rho) <= tol * abs(rho_new) else 0
        rho = rho_new
        if settled >= 3:
            break
    else:
        raise EigenSolverError(
            "power iteration for the upper bound did not settle",
            residual=abs(rho_new - rho),
        )
    return SpectrumBounds(lower=lower, upper=rho)


def _cholesky(a):
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        v = a[j, j] - np.dot(low[j, :j], low[j, :j])
        if v <= 0.0:
            raise ParameterError("matrix is not positive definite")
        low[j, j] = math.sqrt(v)
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low

def _solve_lower(low, b):
    x = np.array(b, dtype=float)
    for i in range(low.shape[0]):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


def _solve_upper(up, b):
    x = np.array(b, dtype=float)
    for i in range(up.shape[0] - 1, -1, -1):
        x[i] = (x[i] - up[i, i + 1 :] @ x[i + 1 :]) / up[i, i]
    return x


def _jacobi_eigh(a, tol=1e-12, max_sweeps=50):
    """Cyclic Jacobi rotations for a dense symmetric matrix."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    q = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), q
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * scale:
            vals = np.diag(a).copy()
            order = np.argsort(vals, kind="stable")
            return vals[order], q[:, order]
        skip = off / (n * n)
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if abs(apr) <= 1e-3 * skip:
                    continue
                app = a[p, p]
                arr = a[r, r]
                theta = (arr - app) / (2.0 * apr)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_r = a[r, :].copy()
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                col_p = a[:, p].copy()
                col_r = a[:, r].copy()
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r
                a[p, p] = app - t * apr
                a[r, r] = arr + t * apr
                a[p, r] = a[r, p] = 0.0
                qp = q[:, p].copy()
                qr = q[:, r].copy()
                q[:, p] = c * qp - s * qr
                q[:, r] = s * qp + c * qr
    raise EigenSolverError("Jacobi rotation sweep limit exceeded", residual=off)


def dense_generalized_eig(stiff, mass):
    """Full decomposition of the (Stiff, Mass) pencil at desk scale.

    Returns eigenvalues ascending and Mass-orthonormal eigenvectors as
    columns.  Refuses dimensions above 5000: this is an oracle for
    validating the iterative paths, not a production solver.
    """
    if stiff.n != mass.n:
        raise ParameterError("pencil matrices must share their dimension")
    if stiff.n > _DENSE_DIM_CAP:
        raise ParameterError(
            f"dense oracle refuses dimension {stiff.n} > {_DENSE_DIM_CAP}"
        )
    low = _cholesky(mass.to_dense())
    y = _solve_lower(low, stiff.to_dense())
    b = _solve_lower(low, y.T)
    b = 0.5 * (b + b.T)
    vals, qmat = _jacobi_eigh(b)
    vecs = _solve_upper(low.T, qmat)
    return vals, vecs
