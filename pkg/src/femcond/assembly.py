"""Stiffness and weighted mass matrix assembly over interior vertices.

Linear (P1) basis functions on simplicial meshes; the diffusion coefficient
enters through its per-element average.  Boundary rows and columns are never
assembled: the system lives on the interior vertices only.  Assembly is
deterministic: the same mesh and field produce a bit-identical matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .mesh import SimplicialMesh
from .quadrature import simplex_average_rule

__all__ = [
    "DiffusionField",
    "SparseSymmetric",
    "DensityFunction",
    "average_diffusion",
    "average_diffusion_all",
    "assemble_stiffness",
    "assemble_mass_weighted",
    "jacobi_scale",
    "density_equidistributed",
    "density_beta_weighted",
    "write_matrix_market",
    "read_matrix_market",
]

_SYM_TOL = 1e-12
_SPECTRUM_SLACK = 1e-9


@dataclass(frozen=True)
class DiffusionField:
    """Matrix-valued diffusion coefficient with known spectral bounds.

    evaluator maps a point (d,) to a symmetric positive definite (d, d)
    matrix whose eigenvalues lie in [d_min, d_max].  constant is set for
    spatially constant fields, letting element averaging short-circuit.
    """

    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    d_min: float
    d_max: float
    constant: np.ndarray | None = None

    def __post_init__(self):
        if not (0 < self.d_min <= self.d_max):
            raise ValueError("need 0 < d_min <= d_max")
        if self.constant is not None:
            c = np.array(self.constant, dtype=float).reshape(self.dim, self.dim)
            c.setflags(write=False)
            object.__setattr__(self, "constant", c)

    @staticmethod
    def identity(dim: int) -> "DiffusionField":
        eye = np.eye(dim)
        return DiffusionField(dim, lambda x: eye, 1.0, 1.0, constant=eye)

    @staticmethod
    def constant_matrix(matrix) -> "DiffusionField":
        m = np.array(matrix, dtype=float)
        if m.ndim == 0:
            m = m[None, None]
        if m.shape[0] != m.shape[1]:
            raise ValueError("diffusion matrix must be square")
        if not np.allclose(m, m.T, rtol=0, atol=_SYM_TOL * max(1, np.abs(m).max())):
            raise ValueError("diffusion matrix must be symmetric")
        m = 0.5 * (m + m.T)
        eigs = np.linalg.eigvalsh(m)
        if eigs[0] <= 0:
            raise ValueError("diffusion matrix must be positive definite")
        return DiffusionField(
            m.shape[0], lambda x: m, float(eigs[0]), float(eigs[-1]), constant=m
        )

    @staticmethod
    def from_callable(dim: int, f, d_min: float, d_max: float) -> "DiffusionField":
        return DiffusionField(dim, f, float(d_min), float(d_max))


def _check_spectrum(field: DiffusionField, mat: np.ndarray, where: str) -> None:
    sym_err = np.abs(mat - mat.T).max()
    if sym_err > _SYM_TOL * max(1.0, np.abs(mat).max()):
        raise ValueError(f"diffusion matrix not symmetric at {where}")
    eigs = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    lo = field.d_min * (1 - _SPECTRUM_SLACK)
    hi = field.d_max * (1 + _SPECTRUM_SLACK)
    if eigs[0] < lo or eigs[-1] > hi:
        raise ValueError(
            f"diffusion eigenvalues [{eigs[0]:.6g}, {eigs[-1]:.6g}] at {where} "
            f"leave the declared range [{field.d_min:.6g}, {field.d_max:.6g}]"
        )


def average_diffusion_all(mesh: SimplicialMesh, field: DiffusionField) -> np.ndarray:
    """Element averages of the diffusion matrix, shape (n_elements, d, d).

    Uses a rule exact for quadratic integrands, hence exact for constant and
    affine coefficient fields.
    """
    d = mesh.dim
    if field.dim != d:
        raise ValueError(f"field dimension {field.dim} does not match mesh {d}")
    n = mesh.n_elements
    if field.constant is not None:
        _check_spectrum(field, field.constant, "constant field")
        return np.broadcast_to(field.constant, (n, d, d)).copy()

    ref_pts, ref_w = simplex_average_rule(d, 2)
    v0 = mesh.vertices[mesh.elements[:, 0]]
    E = mesh.edge_matrices()
    out = np.zeros((n, d, d))
    for q in range(len(ref_w)):
        pts = v0 + E @ ref_pts[q]
        for k in range(n):
            mat = np.asarray(field.evaluator(pts[k]), dtype=float).reshape(d, d)
            _check_spectrum(field, mat, f"element {k}, quadrature point {q}")
            out[k] += ref_w[q] * mat
    for k in range(n):
        if np.linalg.eigvalsh(out[k])[0] <= 0:
            raise ValueError(f"averaged diffusion matrix on element {k} is not SPD")
    return out


def average_diffusion(mesh: SimplicialMesh, field: DiffusionField, element_id: int) -> np.ndarray:
    """Average of the diffusion matrix over one element."""
    if not 0 <= element_id < mesh.n_elements:
        raise ValueError(f"element id {element_id} out of range")
    if field.constant is not None:
        _check_spectrum(field, field.constant, "constant field")
        return field.constant.copy()
    d = mesh.dim
    ref_pts, ref_w = simplex_average_rule(d, 2)
    v0 = mesh.vertices[mesh.elements[element_id, 0]]
    E = mesh.edge_matrices()[element_id]
    out = np.zeros((d, d))
    for q in range(len(ref_w)):
        mat = np.asarray(field.evaluator(v0 + E @ ref_pts[q]), dtype=float).reshape(d, d)
        _check_spectrum(field, mat, f"element {element_id}, quadrature point {q}")
        out += ref_w[q] * mat
    if np.linalg.eigvalsh(out)[0] <= 0:
        raise ValueError(f"averaged diffusion matrix on element {element_id} is not SPD")
    return out


@dataclass(frozen=True)
class SparseSymmetric:
    """Symmetric sparse matrix over interior vertices.

    Stores the full symmetric pattern in CSR for fast row access plus a
    dense copy of the diagonal.  Construction verifies exact structural and
    numerical symmetry.
    """

    matrix: sp.csr_matrix
    diagonal: np.ndarray = dataclass_field(default=None)

    def __post_init__(self):
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        diff = (m - m.T).tocoo()
        if diff.nnz and np.abs(diff.data).max() != 0.0:
            raise ValueError("matrix is not exactly symmetric")
        if self.diagonal is None:
            object.__setattr__(self, "diagonal", m.diagonal())
        self.diagonal.setflags(write=False)

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _scatter_symmetric(order: int, rows, cols, vals) -> SparseSymmetric:
    """Deterministic duplicate summation: stable sort by (row, col), then
    reduce in insertion order within each group."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=float)
    perm = np.lexsort((cols, rows))  # stable: ties keep insertion order
    rows, cols, vals = rows[perm], cols[perm], vals[perm]
    if len(rows):
        new_group = np.empty(len(rows), dtype=bool)
        new_group[0] = True
        new_group[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new_group)
        summed = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
    else:
        summed = vals
    m = sp.csr_matrix((summed, (rows, cols)), shape=(order, order))
    return SparseSymmetric(m)


def _p1_gradients(mesh: SimplicialMesh) -> np.ndarray:
    """Constant gradients of the d+1 barycentric basis functions per
    element, shape (n, d+1, d)."""
    d = mesh.dim
    inv_e = np.linalg.inv(mesh.edge_matrices())
    grads = np.empty((mesh.n_elements, d + 1, d))
    grads[:, 1:, :] = inv_e
    grads[:, 0, :] = -inv_e.sum(axis=1)
    return grads


def _local_stiffness(mesh: SimplicialMesh, field: DiffusionField) -> np.ndarray:
    grads = _p1_gradients(mesh)
    dk = average_diffusion_all(mesh, field)
    local = np.einsum("kid,kde,kje->kij", grads, dk, grads)
    local *= mesh.volumes[:, None, None]
    return 0.5 * (local + local.transpose(0, 2, 1))


def _assemble_from_local(mesh: SimplicialMesh, local: np.ndarray,
                         all_vertices: bool = False) -> SparseSymmetric:
    d = mesh.dim
    if all_vertices:
        index = np.arange(mesh.n_vertices)
        order = mesh.n_vertices
    else:
        index = mesh.interior_index
        order = mesh.n_interior
        if order == 0:
            raise ValueError("mesh has no interior vertices (empty system)")
    ids = index[mesh.elements]  # (n, d+1)
    rows = np.repeat(ids, d + 1, axis=1).ravel()
    cols = np.tile(ids, (1, d + 1)).ravel()
    vals = local.reshape(len(local), -1).ravel()
    keep = (rows >= 0) & (cols >= 0)
    return _scatter_symmetric(order, rows[keep], cols[keep], vals[keep])


def assemble_stiffness(mesh: SimplicialMesh, field: DiffusionField) -> SparseSymmetric:
    """Stiffness matrix of the diffusion bilinear form on interior vertices:
    entries sum |K| grad(phi_i) . D_K grad(phi_j) over shared elements."""
    return _assemble_from_local(mesh, _local_stiffness(mesh, field))


def _assemble_stiffness_all_vertices(mesh: SimplicialMesh, field: DiffusionField) -> SparseSymmetric:
    """Diagnostic variant keeping boundary rows (no Dirichlet elimination)."""
    return _assemble_from_local(mesh, _local_stiffness(mesh, field), all_vertices=True)


@dataclass(frozen=True)
class DensityFunction:
    """Piecewise-constant positive weight, one value per element."""

    rho_k: np.ndarray
    rho_max: float = dataclass_field(default=None)

    def __post_init__(self):
        rho = np.asarray(self.rho_k, dtype=float)
        object.__setattr__(self, "rho_k", rho)
        if rho.ndim != 1 or not np.all(rho > 0):
            raise ValueError("density values must be a 1D array of positives")
        object.__setattr__(self, "rho_max", float(rho.max()))
        rho.setflags(write=False)


def check_normalized(mesh: SimplicialMesh, rho: DensityFunction, tol: float = 1e-12) -> bool:
    total = float(rho.rho_k @ mesh.volumes)
    return abs(total - 1.0) <= tol * max(1.0, abs(total))


def density_equidistributed(mesh: SimplicialMesh) -> DensityFunction:
    """Density giving every element the same weighted volume 1/N."""
    return DensityFunction(1.0 / (mesh.n_elements * mesh.volumes))


def density_beta_weighted(mesh: SimplicialMesh, field: DiffusionField) -> DensityFunction:
    """Density proportional to the per-element anisotropy factor, normalized
    to unit weighted domain volume."""
    from .bounds import compute_beta  # assembly <-> bounds is a soft cycle

    beta = compute_beta(mesh, field).beta_k
    return DensityFunction(beta / float(mesh.volumes @ beta))


def assemble_mass_weighted(mesh: SimplicialMesh, rho: DensityFunction) -> SparseSymmetric:
    """Weighted mass matrix on interior vertices using the exact linear-basis
    formula int_K phi_i phi_j = |K| (1 + delta_ij) / ((d+1)(d+2))."""
    if len(rho.rho_k) != mesh.n_elements:
        raise ValueError("density must have one value per element")
    d = mesh.dim
    base = (np.ones((d + 1, d + 1)) + np.eye(d + 1)) / ((d + 1) * (d + 2))
    local = (rho.rho_k * mesh.volumes)[:, None, None] * base[None, :, :]
    return _assemble_from_local(mesh, local)


def jacobi_scale(a: SparseSymmetric) -> SparseSymmetric:
    """Symmetric diagonal scaling to exact unit diagonal."""
    diag = a.diagonal
    if np.any(diag <= 0):
        raise ValueError("jacobi scaling needs a strictly positive diagonal")
    s = 1.0 / np.sqrt(diag)
    coo = a.matrix.tocoo()
    # s_i * s_j first: commutativity keeps the scaled matrix exactly symmetric
    data = coo.data * (s[coo.row] * s[coo.col])
    data[coo.row == coo.col] = 1.0
    m = sp.csr_matrix((data, (coo.row, coo.col)), shape=a.matrix.shape)
    return SparseSymmetric(m)


# -- MatrixMarket I/O ------------------------------------------------------


def write_matrix_market(a: SparseSymmetric, path) -> None:
    """Coordinate symmetric format, 1-based indices, 17 significant digits
    (lower triangle stored)."""
    coo = sp.tril(a.matrix).tocoo()
    with open(Path(path), "w", newline="\n") as f:
        f.write("%%MatrixMarket matrix coordinate real symmetric\n")
        f.write(f"{a.order} {a.order} {coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{i + 1} {j + 1} {v:.16e}\n")


def read_matrix_market(path) -> SparseSymmetric:
    path = Path(path)
    with open(path) as f:
        header = f.readline()
        if "matrixmarket" not in header.lower() or "symmetric" not in header.lower():
            raise ValueError(f"{path}: not a symmetric MatrixMarket coordinate file")
        line = f.readline()
        while line.startswith("%"):
            line = f.readline()
        n, m, nnz = (int(t) for t in line.split())
        if n != m:
            raise ValueError(f"{path}: matrix is not square")
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        for k in range(nnz):
            parts = f.readline().split()
            rows[k], cols[k] = int(parts[0]) - 1, int(parts[1]) - 1
            vals[k] = float(parts[2])
    off = rows != cols
    full_rows = np.concatenate([rows, cols[off]])
    full_cols = np.concatenate([cols, rows[off]])
    full_vals = np.concatenate([vals, vals[off]])
    return SparseSymmetric(
        sp.csr_matrix((full_vals, (full_rows, full_cols)), shape=(n, n))
    )
