"""Simplicial meshes: representation, generators, file I/O, geometric metrics.

Meshes are conforming simplicial complexes in d = 1, 2 or 3 with a
homogeneous Dirichlet orientation: vertices on the boundary are flagged and
the remaining (interior) vertices get a contiguous row index used by the
assembly routines.  Instances are immutable after construction and all
queries are safe to call concurrently.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "MeshError",
    "NonConformingMeshError",
    "DegenerateElementError",
    "MeshFormatError",
    "PointOutsideDomainError",
    "SimplicialMesh",
    "ElementGeometry",
    "MeshMetrics",
    "generate_uniform",
    "generate_chebyshev_1d",
    "generate_power2_1d",
    "generate_boundary_layer",
    "import_mesh",
    "export_mesh",
    "distance_to_boundary",
    "element_d_k",
    "compute_metrics",
    "max_aspect_ratio",
]


class MeshError(ValueError):
    """Base class for mesh construction and query failures."""


class NonConformingMeshError(MeshError):
    """A facet is shared by more than two elements, or the boundary is not
    a closed surface."""


class DegenerateElementError(MeshError):
    def __init__(self, element_id: int, volume: float):
        super().__init__(
            f"element {element_id} is degenerate (volume {volume:.3e})"
        )
        self.element_id = element_id
        self.volume = volume


class MeshFormatError(MeshError):
    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class PointOutsideDomainError(MeshError):
    """Query point has negative barycentric orientation w.r.t. every element."""


class SimplicialMesh:
    """Conforming simplicial mesh with interior-vertex row indexing.

    Construction normalizes element orientation (positive signed volume),
    verifies conformity (every facet belongs to one or two elements, the
    one-element facets forming a closed boundary) and computes boundary
    flags and the interior index.  Arrays are frozen after construction.
    """

    def __init__(self, dim: int, vertices, elements):
        if dim not in (1, 2, 3):
            raise MeshError(f"dim must be 1, 2 or 3, got {dim}")
        self.dim = dim

        vertices = np.array(vertices, dtype=float)
        if vertices.ndim == 1:
            vertices = vertices[:, None]
        if vertices.ndim != 2 or vertices.shape[1] != dim:
            raise MeshError(
                f"vertices must have shape (n, {dim}), got {vertices.shape}"
            )
        if not np.all(np.isfinite(vertices)):
            raise MeshError("vertex coordinates must be finite")

        elements = np.array(elements, dtype=np.int64)
        if elements.ndim != 2 or elements.shape[1] != dim + 1:
            raise MeshError(
                f"elements must have shape (n, {dim + 1}), got {elements.shape}"
            )
        if elements.size and (elements.min() < 0 or elements.max() >= len(vertices)):
            raise MeshError("element vertex index out of range")
        if len(elements) == 0:
            raise MeshError("mesh has no elements")

        used = np.zeros(len(vertices), dtype=bool)
        used[elements.ravel()] = True
        if not used.all():
            raise MeshError(
                f"vertex {int(np.flatnonzero(~used)[0])} is not used by any element"
            )

        # Orientation: positive signed volume, swapping the last two vertices
        # where needed.
        edges = vertices[elements[:, 1:]] - vertices[elements[:, :1]]
        dets = np.linalg.det(edges) if dim > 1 else edges[:, 0, 0]
        flip = dets < 0
        if flip.any():
            elements = elements.copy()
            elements[flip, dim - 1], elements[flip, dim] = (
                elements[flip, dim].copy(),
                elements[flip, dim - 1].copy(),
            )
            dets = np.abs(dets)
        volumes = dets / math.factorial(dim)
        bad = ~(volumes > 0) | ~np.isfinite(volumes)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise DegenerateElementError(k, float(volumes[k]))

        self.vertices = vertices
        self.elements = elements
        self.volumes = volumes

        self._build_facets()

        for arr in (self.vertices, self.elements, self.volumes,
                    self.boundary_facets, self.boundary_vertex_flags,
                    self.interior_index):
            arr.setflags(write=False)

    def _build_facets(self):
        d = self.dim
        elements = self.elements
        facet_list = []
        for drop in range(d + 1):
            keep = [i for i in range(d + 1) if i != drop]
            facet_list.append(elements[:, keep])
        facets = np.sort(np.concatenate(facet_list, axis=0), axis=1)
        uniq, counts = np.unique(facets, axis=0, return_counts=True)
        if counts.max(initial=0) > 2:
            f = uniq[int(np.argmax(counts))]
            raise NonConformingMeshError(
                f"facet {tuple(int(v) for v in f)} is shared by "
                f"{int(counts.max())} elements"
            )
        boundary = uniq[counts == 1]
        if len(boundary) == 0:
            raise NonConformingMeshError("mesh has no boundary facets")

        # Watertightness: the boundary facets must form a closed surface.
        if d == 1:
            if len(boundary) != 2:
                raise NonConformingMeshError(
                    f"1D mesh must have exactly 2 boundary points, "
                    f"found {len(boundary)}"
                )
        else:
            if d == 2:
                ridges = boundary.ravel()  # endpoints of boundary edges
            else:
                ridges = np.sort(
                    np.concatenate(
                        [boundary[:, [0, 1]], boundary[:, [0, 2]],
                         boundary[:, [1, 2]]]
                    ),
                    axis=1,
                )
            _, rcounts = np.unique(ridges, axis=0, return_counts=True)
            if not np.all(rcounts == 2):
                raise NonConformingMeshError(
                    "boundary is not watertight: a boundary ridge is shared "
                    f"by {int(rcounts[rcounts != 2][0])} boundary facets"
                )

        flags = np.zeros(len(self.vertices), dtype=bool)
        flags[boundary.ravel()] = True
        interior = np.full(len(self.vertices), -1, dtype=np.int64)
        interior[~flags] = np.arange(int((~flags).sum()))

        self.boundary_facets = boundary
        self.boundary_vertex_flags = flags
        self.interior_index = interior

    # -- basic queries ---------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_interior(self) -> int:
        return int((~self.boundary_vertex_flags).sum())

    @property
    def domain_volume(self) -> float:
        return float(self.volumes.sum())

    @cached_property
    def h_domain(self) -> float:
        """Domain diameter; attained at boundary vertices for polytopes."""
        b = self.vertices[self.boundary_vertex_flags]
        diff = b[:, None, :] - b[None, :, :]
        return float(np.sqrt((diff**2).sum(axis=2)).max())

    def centroids(self) -> np.ndarray:
        return self.vertices[self.elements].mean(axis=1)

    def edge_matrices(self) -> np.ndarray:
        """Per-element matrix of edge vectors v_i - v_0, shape (n, d, d)."""
        return np.swapaxes(
            self.vertices[self.elements[:, 1:]] - self.vertices[self.elements[:, :1]],
            1, 2,
        )

    @cached_property
    def vertex_boundary_distance(self) -> np.ndarray:
        return _boundary_distance_batch(self, self.vertices)

    def __repr__(self):
        return (
            f"SimplicialMesh(dim={self.dim}, vertices={self.n_vertices}, "
            f"elements={self.n_elements}, interior={self.n_interior})"
        )


@dataclass(frozen=True)
class ElementGeometry:
    """Per-element geometry, stored as arrays indexed by element.

    jacobians map the unit-volume reference simplex onto each element, so
    |det jacobians[k]| equals volumes[k].  d_k is the sampled maximum
    distance from the element to the domain boundary (vertices plus
    centroid; underestimates the true maximum by at most the element
    diameter).  patch_ids[k] lists the interior row indices of element k's
    vertices, -1 for boundary vertices.
    """

    jacobians: np.ndarray  # (n, d, d)
    volumes: np.ndarray    # (n,)
    d_k: np.ndarray        # (n,)
    patch_ids: np.ndarray  # (n, d+1), interior row index or -1


@dataclass(frozen=True)
class MeshMetrics:
    """Global mesh quantities used by the conditioning bounds."""

    patch_volumes: np.ndarray  # (n_interior,) total volume of each vertex patch
    p_min: int                 # min number of elements in a vertex patch
    k_min_volume: float
    k_avg_volume: float
    h_domain: float
    sigma_h: float | None = None  # sum |K| det(D_K)^(-1/2), needs a field


# -- generators ----------------------------------------------------------


def _normalize_domain(dim: int, domain) -> np.ndarray:
    if domain is None:
        return np.array([[0.0, 1.0]] * dim)
    box = np.array(domain, dtype=float)
    if dim == 1 and box.shape == (2,):
        box = box[None, :]
    if box.shape != (dim, 2) or not np.all(box[:, 1] > box[:, 0]):
        raise MeshError(f"domain must be {dim} (lo, hi) pairs with hi > lo")
    return box


def _mesh_from_axis_nodes(dim: int, axes: list[np.ndarray]) -> SimplicialMesh:
    """Tensor-product grid triangulated into simplices.

    2D cells split along the (v00, v11) diagonal; 3D cells split into six
    tetrahedra along the main diagonal (one per axis permutation), which is
    conforming for any tensor grid.
    """
    if dim == 1:
        nodes = axes[0]
        elems = np.stack([np.arange(len(nodes) - 1), np.arange(1, len(nodes))], axis=1)
        return SimplicialMesh(1, nodes, elems)

    shape = [len(a) for a in axes]
    grids = np.meshgrid(*axes, indexing="ij")
    verts = np.stack([g.ravel() for g in grids], axis=1)

    def vid(*idx):
        out = idx[0]
        for k in range(1, dim):
            out = out * shape[k] + idx[k]
        return out

    elems = []
    if dim == 2:
        nx, ny = shape[0] - 1, shape[1] - 1
        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        ix, iy = ix.ravel(), iy.ravel()
        v00 = vid(ix, iy)
        v10 = vid(ix + 1, iy)
        v01 = vid(ix, iy + 1)
        v11 = vid(ix + 1, iy + 1)
        elems = np.concatenate(
            [
                np.stack([v00, v10, v11], axis=1),
                np.stack([v00, v11, v01], axis=1),
            ]
        )
    else:
        nx, ny, nz = shape[0] - 1, shape[1] - 1, shape[2] - 1
        ix, iy, iz = np.meshgrid(
            np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij"
        )
        ix, iy, iz = ix.ravel(), iy.ravel(), iz.ravel()
        base = np.stack([ix, iy, iz], axis=1)
        tets = []
        for perm in itertools.permutations(range(3)):
            steps = np.zeros((4, 3), dtype=np.int64)
            for s, axis in enumerate(perm):
                steps[s + 1] = steps[s]
                steps[s + 1, axis] += 1
            corners = [
                vid(*(base + step[None, :]).T) for step in steps
            ]
            tets.append(np.stack(corners, axis=1))
        elems = np.concatenate(tets)
    return SimplicialMesh(dim, verts, elems)


def generate_uniform(dim: int, n_per_axis: int, domain=None) -> SimplicialMesh:
    """Uniform mesh of an axis-aligned box.

    1D: equal segments; 2D: each grid cell split into two congruent right
    triangles; 3D: each cell split into six tetrahedra.
    """
    if dim not in (1, 2, 3):
        raise MeshError(f"dim must be 1, 2 or 3, got {dim}")
    if n_per_axis < 1:
        raise MeshError("n_per_axis must be >= 1")
    box = _normalize_domain(dim, domain)
    axes = [np.linspace(lo, hi, n_per_axis + 1) for lo, hi in box]
    return _mesh_from_axis_nodes(dim, axes)


def generate_chebyshev_1d(n: int) -> SimplicialMesh:
    """Unit-interval mesh with interior nodes clustered at both endpoints,
    x_j = (1 - cos(pi (2j - 1) / (2 (n - 1)))) / 2 for j = 1..n-1."""
    if n < 2:
        raise MeshError("n must be >= 2")
    j = np.arange(1, n)
    xi = np.pi * (2 * j - 1) / (2 * (n - 1))
    nodes = np.concatenate([[0.0], (1.0 - np.cos(xi)) / 2.0, [1.0]])
    return _mesh_from_axis_nodes(1, [nodes])


def generate_power2_1d(n: int) -> SimplicialMesh:
    """Unit-interval mesh graded geometrically towards x = 0, interior
    nodes x_j = 2^j / 2^n for j = 1..n-1."""
    if n < 2:
        raise MeshError("n must be >= 2")
    if n > 52:
        raise MeshError("n > 52 underflows the smallest element width")
    j = np.arange(1, n)
    nodes = np.concatenate([[0.0], 2.0**j / 2.0**n, [1.0]])
    return _mesh_from_axis_nodes(1, [nodes])


def generate_boundary_layer(dim: int, n_core_per_axis: int, aspect: float) -> SimplicialMesh:
    """Unit square/cube with a uniform core and one graded layer of thin
    cells of thickness (core spacing)/aspect along the whole boundary.

    The grid is a tensor product of identical 1D ladders, so the layer-core
    transition stays conforming.  aspect must be 1 (plain uniform mesh) or
    >= 2; values in between would make the transition cells the most
    stretched ones, breaking the max-aspect contract.
    """
    if dim not in (2, 3):
        raise MeshError("boundary layer meshes are 2D or 3D")
    if n_core_per_axis < 2:
        raise MeshError("n_core_per_axis must be >= 2")
    if aspect < 1:
        raise MeshError("aspect must be >= 1")
    h = 1.0 / (n_core_per_axis - 1)
    if aspect == 1:
        axis = np.linspace(0.0, 1.0, n_core_per_axis)
    else:
        if aspect < 2:
            raise MeshError(
                "aspect in (1, 2) produces degenerate transition cells; "
                "use aspect == 1 or aspect >= 2"
            )
        delta = h / aspect
        core = np.linspace(0.0, 1.0, n_core_per_axis)[1:-1]
        axis = np.concatenate([[0.0, delta], core, [1.0 - delta, 1.0]])
        if np.any(np.diff(axis) <= 0):
            raise MeshError("degenerate transition cells (zero width)")
    return _mesh_from_axis_nodes(dim, [axis.copy() for _ in range(dim)])


# -- geometric queries ---------------------------------------------------


def _point_segment_distance(points, a, b):
    """Min distance from points (m, 2) to segments a->b ((s, 2) each)."""
    ab = b - a  # (s, 2)
    denom = (ab**2).sum(axis=1)  # (s,)
    w = points[:, None, :] - a[None, :, :]  # (m, s, 2)
    t = (w * ab[None, :, :]).sum(axis=2) / denom[None, :]
    t = np.clip(t, 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    return np.sqrt(((points[:, None, :] - closest) ** 2).sum(axis=2))


def _point_triangle_distance(points, a, b, c):
    """Min distance from points (m, 3) to triangles (a, b, c) ((t, 3) each)."""
    e0 = b - a
    e1 = c - a
    d00 = (e0 * e0).sum(axis=1)
    d01 = (e0 * e1).sum(axis=1)
    d11 = (e1 * e1).sum(axis=1)
    denom = d00 * d11 - d01**2
    w = points[:, None, :] - a[None, :, :]  # (m, t, 3)
    wp0 = (w * e0[None]).sum(axis=2)
    wp1 = (w * e1[None]).sum(axis=2)
    u = (d11 * wp0 - d01 * wp1) / denom
    v = (d00 * wp1 - d01 * wp0) / denom
    inside = (u >= 0) & (v >= 0) & (u + v <= 1)
    proj = a[None] + u[..., None] * e0[None] + v[..., None] * e1[None]
    d_in = np.sqrt(((points[:, None, :] - proj) ** 2).sum(axis=2))

    d_edge = np.minimum(
        _point_segment_distance3(points, a, b),
        np.minimum(
            _point_segment_distance3(points, a, c),
            _point_segment_distance3(points, b, c),
        ),
    )
    return np.where(inside, d_in, d_edge)


def _point_segment_distance3(points, a, b):
    ab = b - a
    denom = (ab**2).sum(axis=1)
    w = points[:, None, :] - a[None, :, :]
    t = np.clip((w * ab[None]).sum(axis=2) / denom[None, :], 0.0, 1.0)
    closest = a[None] + t[..., None] * ab[None]
    return np.sqrt(((points[:, None, :] - closest) ** 2).sum(axis=2))


def _boundary_distance_batch(mesh: SimplicialMesh, points: np.ndarray) -> np.ndarray:
    """Distance to the boundary for points assumed inside the closed domain."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    bf = mesh.boundary_facets
    out = np.empty(len(points))
    if mesh.dim == 1:
        bpts = mesh.vertices[bf[:, 0], 0]
        return np.abs(points[:, 0:1] - bpts[None, :]).min(axis=1)

    chunk = max(1, 2_000_000 // max(1, len(bf)))
    if mesh.dim == 2:
        a = mesh.vertices[bf[:, 0]]
        b = mesh.vertices[bf[:, 1]]
        for s in range(0, len(points), chunk):
            out[s:s + chunk] = _point_segment_distance(points[s:s + chunk], a, b).min(axis=1)
    else:
        a = mesh.vertices[bf[:, 0]]
        b = mesh.vertices[bf[:, 1]]
        c = mesh.vertices[bf[:, 2]]
        for s in range(0, len(points), chunk):
            out[s:s + chunk] = _point_triangle_distance(points[s:s + chunk], a, b, c).min(axis=1)
    return out


def _contains_point(mesh: SimplicialMesh, point: np.ndarray) -> bool:
    E = mesh.edge_matrices()
    rhs = point[None, :] - mesh.vertices[mesh.elements[:, 0]]
    lam = np.linalg.solve(E, rhs[:, :, None])[:, :, 0]
    tol = 1e-12 * max(1.0, mesh.h_domain)
    ok = np.all(lam >= -tol, axis=1) & (lam.sum(axis=1) <= 1 + tol)
    return bool(ok.any())


def distance_to_boundary(mesh: SimplicialMesh, point) -> float:
    """Exact distance from a point of the closed domain to its boundary.

    Raises PointOutsideDomainError when no element contains the point.
    """
    point = np.asarray(point, dtype=float).reshape(-1)
    if point.shape != (mesh.dim,):
        raise MeshError(f"point must have {mesh.dim} coordinates")
    if not _contains_point(mesh, point):
        raise PointOutsideDomainError(f"point {point.tolist()} is outside the domain")
    return float(_boundary_distance_batch(mesh, point[None, :])[0])


def _element_d_k_array(mesh: SimplicialMesh) -> np.ndarray:
    """Sampled max boundary distance per element (vertices + centroid)."""
    dv = mesh.vertex_boundary_distance
    vert_max = dv[mesh.elements].max(axis=1)
    dc = _boundary_distance_batch(mesh, mesh.centroids())
    return np.maximum(vert_max, dc)


def element_d_k(mesh: SimplicialMesh, element_id: int) -> float:
    """Max distance from element to the boundary, sampled at the element's
    vertices and centroid (a lower approximation of the true max, off by at
    most the element diameter)."""
    if not 0 <= element_id < mesh.n_elements:
        raise MeshError(f"element id {element_id} out of range")
    dv = mesh.vertex_boundary_distance[mesh.elements[element_id]].max()
    centroid = mesh.vertices[mesh.elements[element_id]].mean(axis=0)
    dc = _boundary_distance_batch(mesh, centroid[None, :])[0]
    return float(max(dv, dc))


def compute_metrics(mesh: SimplicialMesh, field=None) -> tuple[MeshMetrics, ElementGeometry]:
    """Geometry arrays and global metrics; sigma_h only when a diffusion
    field is supplied."""
    d = mesh.dim
    scale = math.factorial(d) ** (1.0 / d)  # unit-volume reference simplex
    jac = mesh.edge_matrices() / scale
    patch_ids = mesh.interior_index[mesh.elements]
    geometry = ElementGeometry(
        jacobians=jac,
        volumes=mesh.volumes.copy(),
        d_k=_element_d_k_array(mesh),
        patch_ids=patch_ids,
    )

    n_i = mesh.n_interior
    patch_volumes = np.zeros(n_i)
    patch_counts = np.zeros(n_i, dtype=np.int64)
    mask = patch_ids >= 0
    rows = patch_ids[mask]
    vols = np.broadcast_to(mesh.volumes[:, None], patch_ids.shape)[mask]
    np.add.at(patch_volumes, rows, vols)
    np.add.at(patch_counts, rows, 1)

    sigma_h = None
    if field is not None:
        from .assembly import average_diffusion_all

        dk_mats = average_diffusion_all(mesh, field)
        sigma_h = float((mesh.volumes / np.sqrt(np.linalg.det(dk_mats))).sum())

    metrics = MeshMetrics(
        patch_volumes=patch_volumes,
        p_min=int(patch_counts.min()) if n_i else 0,
        k_min_volume=float(mesh.volumes.min()),
        k_avg_volume=mesh.domain_volume / mesh.n_elements,
        h_domain=mesh.h_domain,
        sigma_h=sigma_h,
    )
    return metrics, geometry


def max_aspect_ratio(mesh: SimplicialMesh) -> float:
    """Max over elements of (longest edge / shortest edge)."""
    verts = mesh.vertices[mesh.elements]  # (n, d+1, coords)
    pairs = list(itertools.combinations(range(mesh.dim + 1), 2))
    lengths = np.stack(
        [np.linalg.norm(verts[:, i] - verts[:, j], axis=1) for i, j in pairs],
        axis=1,
    )
    ratios = lengths.max(axis=1) / lengths.min(axis=1)
    return float(ratios.max())


# -- file formats ----------------------------------------------------------

NATIVE_JSON_VERSION = 1


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def export_mesh(mesh: SimplicialMesh, path, fmt: str = "native_json") -> None:
    """Write a mesh to disk; coordinates carry 17 significant digits."""
    path = Path(path)
    if fmt == "native_json":
        lines = ["{"]
        lines.append(f'  "dim": {mesh.dim},')
        lines.append(f'  "version": {NATIVE_JSON_VERSION},')
        vrows = ",\n".join(
            "    [" + ", ".join(_format_float(c) for c in v) + "]"
            for v in mesh.vertices
        )
        lines.append('  "vertices": [\n' + vrows + "\n  ],")
        erows = ",\n".join(
            "    [" + ", ".join(str(int(i)) for i in e) + "]"
            for e in mesh.elements
        )
        lines.append('  "elements": [\n' + erows + "\n  ]")
        lines.append("}")
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "triangle_node_ele":
        base = path.with_suffix("") if path.suffix in (".node", ".ele") else path
        with open(base.with_suffix(".node"), "w") as f:
            f.write(f"{mesh.n_vertices} {mesh.dim} 0 1\n")
            for i, v in enumerate(mesh.vertices):
                coords = " ".join(_format_float(c) for c in v)
                f.write(f"{i + 1} {coords} {int(mesh.boundary_vertex_flags[i])}\n")
        with open(base.with_suffix(".ele"), "w") as f:
            f.write(f"{mesh.n_elements} {mesh.dim + 1} 0\n")
            for i, e in enumerate(mesh.elements):
                f.write(f"{i + 1} " + " ".join(str(int(v) + 1) for v in e) + "\n")
    else:
        raise MeshError(f"unknown mesh format {fmt!r}")


def import_mesh(path, fmt: str = "native_json") -> SimplicialMesh:
    """Read a mesh; boundary flags are recomputed from facet incidence, not
    trusted from the file."""
    path = Path(path)
    if fmt == "native_json":
        return _import_native_json(path)
    if fmt == "triangle_node_ele":
        return _import_triangle(path)
    raise MeshError(f"unknown mesh format {fmt!r}")


def _import_native_json(path: Path) -> SimplicialMesh:
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(path, exc.lineno, exc.msg) from exc
    for key in ("dim", "vertices", "elements"):
        if key not in data:
            raise MeshFormatError(path, None, f"missing key {key!r}")
    if data.get("version", NATIVE_JSON_VERSION) != NATIVE_JSON_VERSION:
        raise MeshFormatError(path, None, f"unsupported version {data['version']}")
    return SimplicialMesh(int(data["dim"]), data["vertices"], data["elements"])


def _read_rows(path: Path):
    rows = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.split("#", 1)[0].strip()
            if stripped:
                rows.append((lineno, stripped.split()))
    return rows


def _import_triangle(path: Path) -> SimplicialMesh:
    base = path.with_suffix("") if path.suffix in (".node", ".ele") else path
    node_path = base.with_suffix(".node")
    ele_path = base.with_suffix(".ele")

    rows = _read_rows(node_path)
    if not rows:
        raise MeshFormatError(node_path, None, "empty .node file")
    lineno, header = rows[0]
    try:
        n_nodes, dim = int(header[0]), int(header[1])
    except (ValueError, IndexError):
        raise MeshFormatError(node_path, lineno, "bad .node header") from None
    if len(rows) - 1 != n_nodes:
        raise MeshFormatError(
            node_path, lineno, f"expected {n_nodes} node rows, found {len(rows) - 1}"
        )
    ids = np.empty(n_nodes, dtype=np.int64)
    coords = np.empty((n_nodes, dim))
    for k, (lineno, parts) in enumerate(rows[1:]):
        try:
            ids[k] = int(parts[0])
            coords[k] = [float(p) for p in parts[1:1 + dim]]
        except (ValueError, IndexError):
            raise MeshFormatError(node_path, lineno, "bad node row") from None
    one_based = ids.min() == 1

    rows = _read_rows(ele_path)
    if not rows:
        raise MeshFormatError(ele_path, None, "empty .ele file")
    lineno, header = rows[0]
    try:
        n_ele = int(header[0])
        per_ele = int(header[1])
    except (ValueError, IndexError):
        raise MeshFormatError(ele_path, lineno, "bad .ele header") from None
    if per_ele != dim + 1:
        raise MeshFormatError(
            ele_path, lineno, f"expected {dim + 1} vertices per element, got {per_ele}"
        )
    if len(rows) - 1 != n_ele:
        raise MeshFormatError(
            ele_path, lineno, f"expected {n_ele} element rows, found {len(rows) - 1}"
        )
    elements = np.empty((n_ele, per_ele), dtype=np.int64)
    for k, (lineno, parts) in enumerate(rows[1:]):
        try:
            elements[k] = [int(p) for p in parts[1:1 + per_ele]]
        except (ValueError, IndexError):
            raise MeshFormatError(ele_path, lineno, "bad element row") from None
    # Node ids may be 1-based and in arbitrary order; remap to row order.
    id_to_row = {int(ids[r]): r for r in range(n_nodes)}
    if len(id_to_row) != n_nodes:
        raise MeshFormatError(node_path, None, "duplicate node ids")
    try:
        elements = np.vectorize(id_to_row.__getitem__)(elements)
    except KeyError as exc:
        raise MeshFormatError(ele_path, None, f"unknown node id {exc.args[0]}") from None
    return SimplicialMesh(dim, coords, elements)
