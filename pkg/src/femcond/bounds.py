"""A-priori bounds on the extreme eigenvalues and condition numbers of the
stiffness matrix and its Jacobi-scaled form.

Four bound families are evaluated, identified by stable string ids:

    new.lambda_min.A    new.lambda_min.SAS    new.kappa.A    new.kappa.SAS
    prior.kappa.A       prior.kappa.SAS
    fried.lambda_min
    conjectured.kappa.SAS                      (2D only)

The "new" family weights every element by its distance to the domain
boundary; the "prior" family replaces that distance by the domain diameter;
"fried" is the classical density-based lower bound; "conjectured" is a
sharper 2D candidate suggested by the aspect-ratio experiments.  All raw
values omit the unknown generic constant; `calibrate` fits one constant per
(dimension, bound id) from exact spectra on a reference family, min-ratio
for lower bounds and max-ratio for upper bounds, so calibrated bounds remain
valid on the whole calibration series by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .assembly import (
    DensityFunction,
    DiffusionField,
    SparseSymmetric,
    average_diffusion_all,
)
from .mesh import ElementGeometry, MeshMetrics, SimplicialMesh, compute_metrics
from .spectra import SpectralResult, condition_report

__all__ = [
    "AnisotropyMetrics",
    "BoundReport",
    "Calibration",
    "compute_beta",
    "bound_lambda_min_B",
    "bound_lambda_rho",
    "bound_lambda_min_A",
    "bound_lambda_min_SAS",
    "bound_lambda_max",
    "bound_kappa",
    "bound_kappa_prior",
    "bound_lambda_min_fried",
    "bound_kappa_sas_conjectured",
    "kappa_bounds_1d",
    "evaluate_raw_bounds",
    "calibrate",
    "build_report",
    "BOUND_IDS",
    "LOWER_BOUND_IDS",
    "UPPER_BOUND_IDS",
    "DEFAULT_P",
]

DEFAULT_P = 2.9

LOWER_BOUND_IDS = ("new.lambda_min.A", "new.lambda_min.SAS", "fried.lambda_min")
UPPER_BOUND_IDS = (
    "new.kappa.A",
    "new.kappa.SAS",
    "prior.kappa.A",
    "prior.kappa.SAS",
    "conjectured.kappa.SAS",
)
BOUND_IDS = LOWER_BOUND_IDS + UPPER_BOUND_IDS


def _resolve_p(dim: int, p: float | None) -> float | None:
    if dim < 3:
        return None
    if p is None:
        p = DEFAULT_P
    if not (1.0 < p < dim / (dim - 2)):
        raise ValueError(f"p must lie in (1, {dim / (dim - 2)}) for dim {dim}, got {p}")
    return p


def _geometry(mesh, geometry: ElementGeometry | None) -> ElementGeometry:
    return geometry if geometry is not None else compute_metrics(mesh)[1]


def _metrics_and_geometry(mesh, metrics, geometry):
    if metrics is None or geometry is None:
        m, g = compute_metrics(mesh)
        return metrics or m, geometry or g
    return metrics, geometry


# -- anisotropy ------------------------------------------------------------


@dataclass(frozen=True)
class AnisotropyMetrics:
    """Per-element stretching of the mesh in the inverse-diffusion metric.

    beta_k is the spectral norm of inv(F) D_K inv(F)^T divided by d_min,
    where F maps the unit-volume reference simplex to the element; gamma_h
    normalizes its maximum by the volume-weighted total.
    """

    beta_k: np.ndarray
    gamma_h: float
    p: float | None = None

    def __post_init__(self):
        if not np.all(self.beta_k > 0):
            raise ValueError("beta values must be positive")
        self.beta_k.setflags(write=False)


def _sym_eigmax(mats: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of symmetric (n, d, d) matrices, closed form for
    d <= 3 (cross-checked against LAPACK in the tests)."""
    d = mats.shape[-1]
    if d == 1:
        return mats[:, 0, 0].copy()
    if d == 2:
        a, b, c = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 1]
        half = 0.5 * (a + c)
        return half + np.sqrt((0.5 * (a - c)) ** 2 + b**2)
    a = mats
    p1 = a[:, 0, 1] ** 2 + a[:, 0, 2] ** 2 + a[:, 1, 2] ** 2
    q = np.trace(a, axis1=1, axis2=2) / 3.0
    p2 = (
        (a[:, 0, 0] - q) ** 2
        + (a[:, 1, 1] - q) ** 2
        + (a[:, 2, 2] - q) ** 2
        + 2.0 * p1
    )
    pp = np.sqrt(np.maximum(p2 / 6.0, 0.0))
    out = np.empty(len(a))
    diag_like = pp <= 0
    out[diag_like] = np.max(
        np.stack([a[diag_like, 0, 0], a[diag_like, 1, 1], a[diag_like, 2, 2]], axis=1),
        axis=1,
    )
    rest = ~diag_like
    if rest.any():
        b = (a[rest] - q[rest, None, None] * np.eye(3)) / pp[rest, None, None]
        r = np.clip(np.linalg.det(b) / 2.0, -1.0, 1.0)
        phi = np.arccos(r) / 3.0
        out[rest] = q[rest] + 2.0 * pp[rest] * np.cos(phi)
    return out


def compute_beta(
    mesh: SimplicialMesh,
    field: DiffusionField,
    p: float | None = None,
    *,
    geometry: ElementGeometry | None = None,
    element_averages: np.ndarray | None = None,
) -> AnisotropyMetrics:
    """Per-element anisotropy factors and their normalized maximum."""
    geometry = _geometry(mesh, geometry)
    dk = element_averages if element_averages is not None else average_diffusion_all(mesh, field)
    finv = np.linalg.inv(geometry.jacobians)
    m = finv @ dk @ np.swapaxes(finv, 1, 2)
    m = 0.5 * (m + np.swapaxes(m, 1, 2))
    beta = _sym_eigmax(m) / field.d_min
    gamma_h = float(beta.max() / (geometry.volumes @ beta))
    return AnisotropyMetrics(beta_k=beta, gamma_h=gamma_h, p=_resolve_p(mesh.dim, p))


# -- constant-free pieces ----------------------------------------------------


def _patch_weighted_sums(geometry: ElementGeometry, weights: np.ndarray, n_interior: int) -> np.ndarray:
    out = np.zeros(n_interior)
    mask = geometry.patch_ids >= 0
    rows = geometry.patch_ids[mask]
    vals = np.broadcast_to(weights[:, None], geometry.patch_ids.shape)[mask]
    np.add.at(out, rows, vals)
    return out


def bound_lambda_min_B(
    mesh: SimplicialMesh,
    rho: DensityFunction,
    *,
    geometry: ElementGeometry | None = None,
) -> float:
    """Constant-free lower bound on the smallest eigenvalue of the weighted
    mass matrix: the smallest weighted patch volume over (d+1)(d+2)."""
    geometry = _geometry(mesh, geometry)
    if mesh.n_interior == 0:
        raise ValueError("mesh has no interior vertices")
    wsums = _patch_weighted_sums(geometry, rho.rho_k * geometry.volumes, mesh.n_interior)
    d = mesh.dim
    return float(wsums.min() / ((d + 1) * (d + 2)))


def bound_lambda_max(a: SparseSymmetric, dim: int) -> tuple[float, float]:
    """Constant-free sandwich for the largest stiffness eigenvalue:
    (max diagonal, (d+1) * max diagonal)."""
    top = float(a.diagonal.max())
    if top <= 0:
        raise ValueError("diagonal must be positive")
    return top, (dim + 1) * top


def bound_lambda_rho(
    mesh: SimplicialMesh,
    rho: DensityFunction,
    p: float | None = None,
    *,
    geometry: ElementGeometry | None = None,
) -> float:
    """Lower bound (without the generic constant) on the smallest eigenvalue
    of the Dirichlet Laplacian weighted by the density rho."""
    geometry = _geometry(mesh, geometry)
    d = mesh.dim
    p = _resolve_p(d, p)
    k_rho = rho.rho_k * geometry.volumes
    d_k = geometry.d_k
    if d == 1:
        return float(1.0 / (k_rho @ d_k))
    if d == 2:
        s = k_rho @ np.log1p(d_k * rho.rho_max) ** 2
        return float((1.0 + s) ** -0.5)
    q = p / (p - 1.0)
    expo = q * (d - (d - 2) * p) / (d + 2 * p)
    s = np.sum(k_rho**q * geometry.volumes ** (-1.0 / (p - 1.0)) * d_k**expo)
    pref = (d / (d - 2) - p) ** (d / (d + 2 * p))
    return float(pref * s ** (-1.0 / q))


# Volume-nonuniformity factors of the condition-number bounds.  The factor
# for kappa(A) is the reciprocal of the one in the lambda_min(A) bound, and
# likewise for the scaled system, so the two directions share one code path.


def _case_factor_A(
    dim: int,
    p: float | None,
    volumes: np.ndarray,
    d_k: np.ndarray,
    k_min: float,
    k_avg: float,
) -> float:
    n = len(volumes)
    if dim == 1:
        return float(d_k.sum() / n)
    if dim == 2:
        s = np.log1p((k_avg / k_min) * d_k) ** 2
        return float(math.sqrt(1.0 + s.sum() / n))
    q = p / (p - 1.0)
    expo = q * (dim - (dim - 2) * p) / (dim + 2 * p)
    s = np.sum((k_avg / volumes) ** (1.0 / (p - 1.0)) * d_k**expo) / n
    pref = (dim / (dim - 2) - p) ** (dim / (dim + 2 * p))
    return float(s ** (1.0 / q) / pref)


def _case_factor_SAS(
    dim: int,
    p: float | None,
    volumes: np.ndarray,
    d_k: np.ndarray,
    beta: np.ndarray,
    gamma_h: float,
) -> float:
    n = len(volumes)
    vb = volumes * beta
    if dim == 1:
        return float(vb @ d_k / n**2)
    if dim == 2:
        mean_vb = vb.sum() / n
        logs = 1.0 + np.log1p(d_k * gamma_h) ** 2
        return float(math.sqrt(mean_vb) * math.sqrt(vb @ logs / n))
    q = p / (p - 1.0)
    expo = q * (dim - (dim - 2) * p) / (dim + 2 * p)
    s = np.sum(volumes * beta**q * d_k**expo) / n ** (2 * p / (dim * (p - 1.0)))
    pref = (dim / (dim - 2) - p) ** (dim / (dim + 2 * p))
    return float(s ** (1.0 / q) / pref)


def bound_lambda_min_A(
    mesh: SimplicialMesh,
    field: DiffusionField,
    p: float | None = None,
    *,
    geometry: ElementGeometry | None = None,
    metrics: MeshMetrics | None = None,
) -> float:
    """Distance-weighted lower bound on the smallest stiffness eigenvalue
    (without the generic constant)."""
    metrics, geometry = _metrics_and_geometry(mesh, metrics, geometry)
    p = _resolve_p(mesh.dim, p)
    n = mesh.n_elements
    case = _case_factor_A(
        mesh.dim, p, geometry.volumes, geometry.d_k,
        metrics.k_min_volume, metrics.k_avg_volume,
    )
    return field.d_min / n / case


def bound_lambda_min_SAS(
    mesh: SimplicialMesh,
    field: DiffusionField,
    p: float | None = None,
    *,
    geometry: ElementGeometry | None = None,
    beta: AnisotropyMetrics | None = None,
) -> float:
    """Distance-weighted lower bound on the smallest eigenvalue of the
    Jacobi-scaled stiffness matrix (without the generic constant)."""
    geometry = _geometry(mesh, geometry)
    p = _resolve_p(mesh.dim, p)
    if beta is None:
        beta = compute_beta(mesh, field, geometry=geometry)
    n = mesh.n_elements
    case = _case_factor_SAS(
        mesh.dim, p, geometry.volumes, geometry.d_k, beta.beta_k, beta.gamma_h
    )
    return n ** (-2.0 / mesh.dim) / case


def bound_kappa(
    mesh: SimplicialMesh,
    field: DiffusionField,
    p: float | None = None,
    *,
    geometry: ElementGeometry | None = None,
    metrics: MeshMetrics | None = None,
    beta: AnisotropyMetrics | None = None,
) -> tuple[float, float]:
    """Distance-weighted upper bounds (without the generic constant) on the
    condition numbers of the stiffness matrix and of its Jacobi-scaled form."""
    metrics, geometry = _metrics_and_geometry(mesh, metrics, geometry)
    p = _resolve_p(mesh.dim, p)
    if beta is None:
        beta = compute_beta(mesh, field, geometry=geometry)
    d = mesh.dim
    n = mesh.n_elements
    if mesh.n_interior == 0:
        raise ValueError("mesh has no interior vertices")
    patch_vb = _patch_weighted_sums(geometry, geometry.volumes * beta.beta_k, mesh.n_interior)
    case_a = _case_factor_A(
        d, p, geometry.volumes, geometry.d_k, metrics.k_min_volume, metrics.k_avg_volume
    )
    kappa_a = n ** (2.0 / d) * (n ** ((d - 2.0) / d) * patch_vb.max()) * case_a
    case_sas = _case_factor_SAS(d, p, geometry.volumes, geometry.d_k, beta.beta_k, beta.gamma_h)
    kappa_sas = n ** (2.0 / d) * case_sas
    return float(kappa_a), float(kappa_sas)


def bound_kappa_prior(
    mesh: SimplicialMesh,
    field: DiffusionField,
    *,
    geometry: ElementGeometry | None = None,
    metrics: MeshMetrics | None = None,
    beta: AnisotropyMetrics | None = None,
) -> tuple[float, float]:
    """Earlier condition-number bounds that ignore the element-to-boundary
    distance (without the generic constant)."""
    metrics, geometry = _metrics_and_geometry(mesh, metrics, geometry)
    if beta is None:
        beta = compute_beta(mesh, field, geometry=geometry)
    d = mesh.dim
    n = mesh.n_elements
    if mesh.n_interior == 0:
        raise ValueError("mesh has no interior vertices")
    vb = geometry.volumes * beta.beta_k
    patch_vb = _patch_weighted_sums(geometry, vb, mesh.n_interior)
    ratio = metrics.k_avg_volume / geometry.volumes

    if d == 1:
        case_a = 1.0
        case_sas = vb.sum() / n**2
    elif d == 2:
        case_a = 1.0 + math.log(metrics.k_avg_volume / metrics.k_min_volume)
        case_sas = (vb.sum() / n) * (1.0 + abs(math.log(beta.gamma_h)))
    else:
        case_a = float((np.sum(ratio ** ((d - 2.0) / 2.0)) / n) ** (2.0 / d))
        case_sas = float(
            (np.sum(geometry.volumes * beta.beta_k ** (d / 2.0)) / n) ** (2.0 / d)
        )
    kappa_a = n ** (2.0 / d) * (n ** ((d - 2.0) / d) * patch_vb.max()) * case_a
    kappa_sas = n ** (2.0 / d) * case_sas
    return float(kappa_a), float(kappa_sas)


def bound_lambda_min_fried(
    mesh: SimplicialMesh,
    field: DiffusionField,
    *,
    metrics: MeshMetrics | None = None,
) -> float:
    """Classical lower bound on the smallest stiffness eigenvalue driven by
    the smallest element volume (without the generic constant)."""
    if metrics is None:
        metrics = compute_metrics(mesh)[0]
    d = mesh.dim
    n = mesh.n_elements
    ratio = metrics.k_avg_volume / metrics.k_min_volume
    if d == 1:
        case = 1.0
    elif d == 2:
        case = 1.0 / (1.0 + math.log(ratio))
    else:
        case = ratio ** (2.0 / d - 1.0)
    return field.d_min / n * case


def bound_kappa_sas_conjectured(
    mesh: SimplicialMesh,
    field: DiffusionField,
    *,
    geometry: ElementGeometry | None = None,
    beta: AnisotropyMetrics | None = None,
) -> float:
    """Candidate sharper 2D bound on the scaled condition number, with the
    boundary distance entering through log(1 + d_K / |K|).  Reported as
    conjectured in all outputs."""
    if mesh.dim != 2:
        raise ValueError("the conjectured bound is 2D only")
    geometry = _geometry(mesh, geometry)
    if beta is None:
        beta = compute_beta(mesh, field, geometry=geometry)
    return float(
        np.sum(geometry.volumes * beta.beta_k * np.log1p(geometry.d_k / geometry.volumes))
    )


def kappa_bounds_1d(mesh: SimplicialMesh, field: DiffusionField,
                    *, geometry: ElementGeometry | None = None) -> dict[str, float]:
    """Specialized 1D formulas (identity-diffusion shape): the general
    evaluators must reproduce these exactly.

    new:   kappa(A) <= sum d_K * max_j sum_{K in patch} 1/|K|,
           kappa(SAS) <= sum d_K / |K|
    prior: kappa(A) <= N * max_j sum_{K in patch} 1/|K|,
           kappa(SAS) <= sum 1/|K|
    """
    if mesh.dim != 1:
        raise ValueError("specialized formulas are 1D only")
    metrics, geometry = _metrics_and_geometry(mesh, None, geometry)
    beta = compute_beta(mesh, field, geometry=geometry)
    inv_vol_patch = _patch_weighted_sums(
        geometry, geometry.volumes * beta.beta_k, mesh.n_interior
    ).max()
    vb = geometry.volumes * beta.beta_k
    return {
        "new.kappa.A": float(geometry.d_k.sum() * inv_vol_patch),
        "new.kappa.SAS": float(vb @ geometry.d_k),
        "prior.kappa.A": float(mesh.n_elements * inv_vol_patch),
        "prior.kappa.SAS": float(vb.sum()),
    }


def evaluate_raw_bounds(
    mesh: SimplicialMesh,
    field: DiffusionField,
    p: float | None = None,
    *,
    geometry: ElementGeometry | None = None,
    metrics: MeshMetrics | None = None,
) -> dict[str, float]:
    """All raw (constant-free) bound values keyed by stable bound id.

    The conjectured id maps to NaN outside 2D.
    """
    metrics, geometry = _metrics_and_geometry(mesh, metrics, geometry)
    beta = compute_beta(mesh, field, geometry=geometry)
    kappa_a, kappa_sas = bound_kappa(
        mesh, field, p, geometry=geometry, metrics=metrics, beta=beta
    )
    prior_a, prior_sas = bound_kappa_prior(
        mesh, field, geometry=geometry, metrics=metrics, beta=beta
    )
    out = {
        "new.lambda_min.A": bound_lambda_min_A(
            mesh, field, p, geometry=geometry, metrics=metrics
        ),
        "new.lambda_min.SAS": bound_lambda_min_SAS(
            mesh, field, p, geometry=geometry, beta=beta
        ),
        "new.kappa.A": kappa_a,
        "new.kappa.SAS": kappa_sas,
        "prior.kappa.A": prior_a,
        "prior.kappa.SAS": prior_sas,
        "fried.lambda_min": bound_lambda_min_fried(mesh, field, metrics=metrics),
        "conjectured.kappa.SAS": (
            bound_kappa_sas_conjectured(mesh, field, geometry=geometry, beta=beta)
            if mesh.dim == 2
            else float("nan")
        ),
    }
    return out


# -- calibration -------------------------------------------------------------


@dataclass(frozen=True)
class Calibration:
    """One fitted constant per bound id for a fixed dimension."""

    dim: int
    constants: Mapping[str, float]

    def constant(self, bound_id: str) -> float:
        return self.constants[bound_id]

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": 1,
                "dim": self.dim,
                "constants": {k: format(v, ".17g") for k, v in sorted(self.constants.items())},
            },
            indent=2,
        ) + "\n"

    @staticmethod
    def from_json(text: str) -> "Calibration":
        data = json.loads(text)
        return Calibration(
            dim=int(data["dim"]),
            constants={k: float(v) for k, v in data["constants"].items()},
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @staticmethod
    def load(path) -> "Calibration":
        return Calibration.from_json(Path(path).read_text())


def calibrate(
    series: Sequence[tuple[SimplicialMesh, DiffusionField, tuple[SpectralResult, SpectralResult]]],
    p: float | None = None,
) -> Calibration:
    """Fit the generic constants from exact spectra on a reference family.

    Lower bounds get the min ratio exact/raw, upper bounds the max ratio, so
    calibrated values stay on the correct side of the exact ones for every
    member of the series.
    """
    if not series:
        raise ValueError("calibration series is empty")
    dims = {mesh.dim for mesh, _, _ in series}
    if len(dims) != 1:
        raise ValueError("calibration series mixes dimensions")
    dim = dims.pop()

    ratios: dict[str, list[float]] = {bid: [] for bid in BOUND_IDS}
    for mesh, field, (exact_a, exact_sas) in series:
        raw = evaluate_raw_bounds(mesh, field, p)
        exact = {
            "new.lambda_min.A": exact_a.lambda_min,
            "new.lambda_min.SAS": exact_sas.lambda_min,
            "fried.lambda_min": exact_a.lambda_min,
            "new.kappa.A": exact_a.kappa,
            "new.kappa.SAS": exact_sas.kappa,
            "prior.kappa.A": exact_a.kappa,
            "prior.kappa.SAS": exact_sas.kappa,
            "conjectured.kappa.SAS": exact_sas.kappa,
        }
        for bid in BOUND_IDS:
            if math.isnan(raw[bid]):
                continue
            ratios[bid].append(exact[bid] / raw[bid])

    constants = {}
    for bid in LOWER_BOUND_IDS:
        if ratios[bid]:
            constants[bid] = min(ratios[bid])
    for bid in UPPER_BOUND_IDS:
        if ratios[bid]:
            constants[bid] = max(ratios[bid])
    return Calibration(dim=dim, constants=constants)


# -- full report --------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """Exact spectra plus every bound value for one mesh/diffusion instance.

    Raw bounds omit the generic constant; calibrated values are raw values
    scaled by the fitted constants when a calibration is attached.
    """

    dim: int
    n_elements: int
    n_interior: int
    p_used: float | None
    domain_volume: float
    exact_A: SpectralResult
    exact_SAS: SpectralResult
    lower_lambda_min_A: float
    lower_lambda_min_SAS: float
    lambda_max_lower: float
    upper_lambda_max_A: float
    kappa_A_new: float
    kappa_SAS_new: float
    kappa_A_prior: float
    kappa_SAS_prior: float
    lambda_min_fried: float
    kappa_SAS_conjectured: float
    calibration: Calibration | None = None

    def raw_bounds(self) -> dict[str, float]:
        return {
            "new.lambda_min.A": self.lower_lambda_min_A,
            "new.lambda_min.SAS": self.lower_lambda_min_SAS,
            "new.kappa.A": self.kappa_A_new,
            "new.kappa.SAS": self.kappa_SAS_new,
            "prior.kappa.A": self.kappa_A_prior,
            "prior.kappa.SAS": self.kappa_SAS_prior,
            "fried.lambda_min": self.lambda_min_fried,
            "conjectured.kappa.SAS": self.kappa_SAS_conjectured,
        }

    def calibrated_bounds(self) -> dict[str, float] | None:
        if self.calibration is None:
            return None
        raw = self.raw_bounds()
        return {
            bid: raw[bid] * self.calibration.constants[bid]
            for bid in BOUND_IDS
            if bid in self.calibration.constants
        }

    def to_row(self) -> dict[str, float]:
        """Flat numeric row with stable column names (CSV order)."""
        row: dict[str, float] = {
            "dim": self.dim,
            "n_elements": self.n_elements,
            "n_interior": self.n_interior,
            "p": self.p_used if self.p_used is not None else float("nan"),
            "domain_volume": self.domain_volume,
            "exact.lambda_min.A": self.exact_A.lambda_min,
            "exact.lambda_max.A": self.exact_A.lambda_max,
            "exact.kappa.A": self.exact_A.kappa,
            "exact.lambda_min.SAS": self.exact_SAS.lambda_min,
            "exact.lambda_max.SAS": self.exact_SAS.lambda_max,
            "exact.kappa.SAS": self.exact_SAS.kappa,
            "diag.lambda_max.lower": self.lambda_max_lower,
            "diag.lambda_max.upper": self.upper_lambda_max_A,
        }
        for bid, value in self.raw_bounds().items():
            row[bid] = value
        cal = self.calibrated_bounds()
        if cal is not None:
            for bid in BOUND_IDS:
                row[f"cal.{bid}"] = cal.get(bid, float("nan"))
        return row

    def to_json_dict(self) -> dict:
        data = {
            "dim": self.dim,
            "n_elements": self.n_elements,
            "n_interior": self.n_interior,
            "p": self.p_used,
            "domain_volume": self.domain_volume,
            "nonunit_domain": abs(self.domain_volume - 1.0) > 1e-9,
            "exact": {
                "A": {
                    "lambda_min": self.exact_A.lambda_min,
                    "lambda_max": self.exact_A.lambda_max,
                    "kappa": self.exact_A.kappa,
                    "method": self.exact_A.method,
                    "residual": self.exact_A.residual,
                    "converged": self.exact_A.converged,
                },
                "SAS": {
                    "lambda_min": self.exact_SAS.lambda_min,
                    "lambda_max": self.exact_SAS.lambda_max,
                    "kappa": self.exact_SAS.kappa,
                    "method": self.exact_SAS.method,
                    "residual": self.exact_SAS.residual,
                    "converged": self.exact_SAS.converged,
                },
            },
            "lambda_max_sandwich": [self.lambda_max_lower, self.upper_lambda_max_A],
            "bounds_raw": self.raw_bounds(),
        }
        cal = self.calibrated_bounds()
        if cal is not None:
            data["bounds_calibrated"] = cal
        return data


def build_report(
    mesh: SimplicialMesh,
    field: DiffusionField,
    p: float | None = None,
    tol: float = 1e-8,
    *,
    calibration: Calibration | None = None,
    dense_cutoff: int | None = None,
    seed: int = 0,
) -> BoundReport:
    """Assemble, solve, and evaluate every bound for one instance."""
    from .assembly import assemble_stiffness
    from .spectra import DENSE_CUTOFF

    metrics, geometry = compute_metrics(mesh)
    p = _resolve_p(mesh.dim, p)
    cutoff = DENSE_CUTOFF if dense_cutoff is None else dense_cutoff
    exact_a, exact_sas = condition_report(mesh, field, tol, dense_cutoff=cutoff, seed=seed)
    a = assemble_stiffness(mesh, field)
    lam_lo, lam_hi = bound_lambda_max(a, mesh.dim)
    raw = evaluate_raw_bounds(mesh, field, p, geometry=geometry, metrics=metrics)
    if calibration is not None and calibration.dim != mesh.dim:
        raise ValueError(
            f"calibration is for dimension {calibration.dim}, mesh is {mesh.dim}D"
        )
    return BoundReport(
        dim=mesh.dim,
        n_elements=mesh.n_elements,
        n_interior=mesh.n_interior,
        p_used=p,
        domain_volume=mesh.domain_volume,
        exact_A=exact_a,
        exact_SAS=exact_sas,
        lower_lambda_min_A=raw["new.lambda_min.A"],
        lower_lambda_min_SAS=raw["new.lambda_min.SAS"],
        lambda_max_lower=lam_lo,
        upper_lambda_max_A=lam_hi,
        kappa_A_new=raw["new.kappa.A"],
        kappa_SAS_new=raw["new.kappa.SAS"],
        kappa_A_prior=raw["prior.kappa.A"],
        kappa_SAS_prior=raw["prior.kappa.SAS"],
        lambda_min_fried=raw["fried.lambda_min"],
        kappa_SAS_conjectured=raw["conjectured.kappa.SAS"],
        calibration=calibration,
    )
