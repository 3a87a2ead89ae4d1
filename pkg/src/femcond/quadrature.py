"""Quadrature on reference simplices via collapsed-coordinate Gauss products.

The standard simplex here is {x in R^d : x_i >= 0, sum x_i <= 1} with
volume 1/d!.  Rules are built by mapping a tensor Gauss-Legendre grid on
[0,1]^d through the collapsing map

    x_1 = u_1,  x_2 = u_2 (1 - u_1),  x_3 = u_3 (1 - u_1)(1 - u_2),

whose Jacobian is a polynomial, so exactness for a given total degree is
obtained by taking enough points per axis.  This avoids hard-coded rule
tables; exactness is verified against closed-form monomial integrals in
the test suite.
"""

from __future__ import annotations

import math

import numpy as np


def gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def simplex_rule(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (m, dim) and weights (m,) on the standard simplex.

    Exact for polynomials of total degree <= `degree`; weights sum to the
    simplex volume 1/dim!.
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    # A total-degree-k integrand picks up at most (dim - 1) extra powers per
    # axis from the collapsing Jacobian; n-point Gauss is exact to 2n - 1.
    n = max(1, math.ceil((degree + dim) / 2))
    t, w1 = gauss_legendre_01(n)
    if dim == 1:
        return t[:, None].copy(), w1.copy()

    grids = np.meshgrid(*([t] * dim), indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=1)  # (n^dim, dim)
    wgrids = np.meshgrid(*([w1] * dim), indexing="ij")
    w = np.ones(u.shape[0])
    for g in wgrids:
        w = w * g.ravel()

    pts = np.empty_like(u)
    shrink = np.ones(u.shape[0])
    jac = np.ones(u.shape[0])
    for k in range(dim):
        pts[:, k] = u[:, k] * shrink
        shrink = shrink * (1.0 - u[:, k])
        jac = jac * (1.0 - u[:, k]) ** (dim - 1 - k)
    return pts, w * jac


def simplex_average_rule(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Like simplex_rule but with weights normalized to sum to 1.

    Suitable for computing averages (1/|K|) * integral_K f of a function
    mapped onto an arbitrary simplex, independent of its volume.
    """
    pts, w = simplex_rule(dim, degree)
    return pts, w * math.factorial(dim)
