"""Second-order finite-difference Hessians on the C^n = R^{2n} identification.

The complex Hessian of a real function u is

    u_{z_i zbar_j} = 1/4 (d_{x_i x_j} + d_{y_i y_j}) u
                   + i/4 (d_{x_i y_j} - d_{y_i x_j}) u,

so its trace equals a quarter of the real Laplacian.  All derivatives
are second-order central differences; pointwise operations require the
node to lie in the inside mask, which guarantees a full stencil.
"""

from __future__ import annotations

import numpy as np

from .grid import GridField

__all__ = [
    "complex_hessian",
    "real_hessian",
    "complex_hessian_at",
    "real_hessian_at",
    "hermitian_defect",
    "neg_hessian_spectrum_fields",
    "complex_hessian_fields",
    "laplacian_field",
    "gradient_norm_sq_field",
]


def _check_node(u: GridField, node: tuple[int, ...]) -> None:
    if len(node) != 2 * u.spec.n:
        raise ValueError(f"node must have {2 * u.spec.n} indices, got {len(node)}")
    if not u.spec.is_inside(node):
        raise ValueError(f"node {node} is outside the inside mask")


def _shift(node: tuple[int, ...], axis: int, step: int) -> tuple[int, ...]:
    out = list(node)
    out[axis] += step
    return tuple(out)


def _d2(u: np.ndarray, node: tuple[int, ...], axis: int, h: float) -> float:
    up = u[_shift(node, axis, 1)]
    dn = u[_shift(node, axis, -1)]
    return (up - 2.0 * u[node] + dn) / h**2


def _d2_mixed(u: np.ndarray, node: tuple[int, ...], a: int, b: int, h: float) -> float:
    pp = u[_shift(_shift(node, a, 1), b, 1)]
    pm = u[_shift(_shift(node, a, 1), b, -1)]
    mp = u[_shift(_shift(node, a, -1), b, 1)]
    mm = u[_shift(_shift(node, a, -1), b, -1)]
    return (pp - pm - mp + mm) / (4.0 * h**2)


def _d2_pair(u: np.ndarray, node: tuple[int, ...], a: int, b: int, h: float) -> float:
    if a == b:
        return _d2(u, node, a, h)
    return _d2_mixed(u, node, a, b, h)


def complex_hessian(u: GridField, node: tuple[int, ...]) -> np.ndarray:
    """u_{z_i zbar_j} at a node, as an n x n complex matrix.

    Every entry (including the conjugate pairs) is evaluated from its own
    stencil, so the Hermitian-symmetry invariant is a genuine check on
    the discretization rather than a construction artifact.
    """
    _check_node(u, node)
    n, h, vals = u.spec.n, u.spec.h, u.values
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            xi, yi = 2 * i, 2 * i + 1
            xj, yj = 2 * j, 2 * j + 1
            re = _d2_pair(vals, node, xi, xj, h) + _d2_pair(vals, node, yi, yj, h)
            im = _d2_pair(vals, node, xi, yj, h) - _d2_pair(vals, node, yi, xj, h)
            out[i, j] = 0.25 * (re + 1j * im)
    return out


def real_hessian(u: GridField, node: tuple[int, ...]) -> np.ndarray:
    """Full 2n x 2n real Hessian at a node (axis order x1, y1, x2, y2)."""
    _check_node(u, node)
    d, h, vals = 2 * u.spec.n, u.spec.h, u.values
    out = np.empty((d, d))
    for a in range(d):
        for b in range(a, d):
            out[a, b] = out[b, a] = _d2_pair(vals, node, a, b, h)
    return out


def hermitian_defect(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat - mat.conj().T)))


def _call_at(fn, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(fn(*[pts[:, k] for k in range(pts.shape[1])]), dtype=float)
    return np.broadcast_to(vals, (pts.shape[0],))


def _d2_at(fn, pts: np.ndarray, center: np.ndarray, a: int, b: int,
           h: float) -> np.ndarray:
    if a == b:
        up = pts.copy()
        up[:, a] += h
        dn = pts.copy()
        dn[:, a] -= h
        return (_call_at(fn, up) - 2.0 * center + _call_at(fn, dn)) / h**2
    pp = pts.copy()
    pp[:, a] += h
    pp[:, b] += h
    pm = pts.copy()
    pm[:, a] += h
    pm[:, b] -= h
    mp = pts.copy()
    mp[:, a] -= h
    mp[:, b] += h
    mm = pts.copy()
    mm[:, a] -= h
    mm[:, b] -= h
    return (_call_at(fn, pp) - _call_at(fn, pm) - _call_at(fn, mp)
            + _call_at(fn, mm)) / (4.0 * h**2)


def complex_hessian_at(fn, points: np.ndarray, h: float) -> np.ndarray:
    """u_{z_i zbar_j} at arbitrary points, stencils fed by the callable.

    points has shape (m, 2n) in the (x_1, y_1, ..., x_n, y_n) order.
    Same second-order stencils as the grid version, but the function is
    evaluated at shifted points directly, so spacings whose full grid
    would not fit in memory cost nothing extra.  Returns (m, n, n).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] % 2:
        raise ValueError("points must have shape (m, 2n)")
    n = pts.shape[1] // 2
    center = _call_at(fn, pts)
    out = np.empty((pts.shape[0], n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            xi, yi = 2 * i, 2 * i + 1
            xj, yj = 2 * j, 2 * j + 1
            re = (_d2_at(fn, pts, center, xi, xj, h)
                  + _d2_at(fn, pts, center, yi, yj, h))
            im = (_d2_at(fn, pts, center, xi, yj, h)
                  - _d2_at(fn, pts, center, yi, xj, h))
            out[:, i, j] = 0.25 * (re + 1j * im)
    return out


def real_hessian_at(fn, points: np.ndarray, h: float) -> np.ndarray:
    """Full real Hessian at arbitrary points; returns (m, 2n, 2n)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] % 2:
        raise ValueError("points must have shape (m, 2n)")
    d = pts.shape[1]
    center = _call_at(fn, pts)
    out = np.empty((pts.shape[0], d, d))
    for a in range(d):
        for b in range(a, d):
            val = _d2_at(fn, pts, center, a, b, h)
            out[:, a, b] = val
            out[:, b, a] = val
    return out


def _d2_field(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second difference along one axis; edge slices are NaN."""
    out = np.full(values.shape, np.nan)
    lo = [slice(1, -1) if k == axis else slice(None) for k in range(values.ndim)]
    up = [slice(2, None) if k == axis else slice(None) for k in range(values.ndim)]
    dn = [slice(0, -2) if k == axis else slice(None) for k in range(values.ndim)]
    out[tuple(lo)] = (values[tuple(up)] - 2.0 * values[tuple(lo)] + values[tuple(dn)]) / h**2
    return out


def _d2_mixed_field(values: np.ndarray, a: int, b: int, h: float) -> np.ndarray:
    out = np.full(values.shape, np.nan)

    def sl(sa: slice, sb: slice) -> tuple[slice, ...]:
        return tuple(
            sa if k == a else (sb if k == b else slice(None)) for k in range(values.ndim)
        )

    up, dn, mid = slice(2, None), slice(0, -2), slice(1, -1)
    out[sl(mid, mid)] = (
        values[sl(up, up)] - values[sl(up, dn)] - values[sl(dn, up)] + values[sl(dn, dn)]
    ) / (4.0 * h**2)
    return out


def _d1_field(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.full(values.shape, np.nan)
    lo = [slice(1, -1) if k == axis else slice(None) for k in range(values.ndim)]
    up = [slice(2, None) if k == axis else slice(None) for k in range(values.ndim)]
    dn = [slice(0, -2) if k == axis else slice(None) for k in range(values.ndim)]
    out[tuple(lo)] = (values[tuple(up)] - values[tuple(dn)]) / (2.0 * h)
    return out


def laplacian_field(u: GridField) -> np.ndarray:
    """Real Laplacian over all 2n axes; NaN where the stencil leaves the box."""
    out = _d2_field(u.values, 0, u.spec.h)
    for axis in range(1, 2 * u.spec.n):
        out += _d2_field(u.values, axis, u.spec.h)
    return out


def gradient_norm_sq_field(u: GridField) -> np.ndarray:
    """|grad u|^2 over the 2n real coordinates (central differences)."""
    out = _d1_field(u.values, 0, u.spec.h) ** 2
    for axis in range(1, 2 * u.spec.n):
        out += _d1_field(u.values, axis, u.spec.h) ** 2
    return out


def neg_hessian_spectrum_fields(u: GridField) -> tuple[np.ndarray, np.ndarray]:
    """(lambda_min, det) of -complex_hessian(u) at every node, vectorized.

    Entries are NaN on the one-node rim where the stencil leaves the box;
    the rim never intersects the inside mask.  For n = 2 the eigenvalues
    of the 2x2 Hermitian matrix are computed in closed form.
    """
    spec, vals, h = u.spec, u.values, u.spec.h
    if spec.n == 1:
        lam = -0.25 * (_d2_field(vals, 0, h) + _d2_field(vals, 1, h))
        return lam, lam.copy()
    # n = 2: -H = [[a, c], [conj(c), b]] with a, b real.
    a = -0.25 * (_d2_field(vals, 0, h) + _d2_field(vals, 1, h))
    b = -0.25 * (_d2_field(vals, 2, h) + _d2_field(vals, 3, h))
    re = -0.25 * (_d2_mixed_field(vals, 0, 2, h) + _d2_mixed_field(vals, 1, 3, h))
    im = -0.25 * (_d2_mixed_field(vals, 0, 3, h) - _d2_mixed_field(vals, 1, 2, h))
    csq = re**2 + im**2
    det = a * b - csq
    lam_min = 0.5 * (a + b) - np.sqrt(0.25 * (a - b) ** 2 + csq)
    return lam_min, det


def complex_hessian_fields(u: GridField) -> np.ndarray:
    """Full complex Hessian at every node, shape grid_shape + (n, n).

    Same stencils as neg_hessian_spectrum_fields but without the sign
    flip; NaN on the one-node rim.
    """
    spec, vals, h = u.spec, u.values, u.spec.h
    out = np.empty(spec.shape + (spec.n, spec.n), dtype=complex)
    if spec.n == 1:
        out[..., 0, 0] = 0.25 * (_d2_field(vals, 0, h) + _d2_field(vals, 1, h))
        return out
    out[..., 0, 0] = 0.25 * (_d2_field(vals, 0, h) + _d2_field(vals, 1, h))
    out[..., 1, 1] = 0.25 * (_d2_field(vals, 2, h) + _d2_field(vals, 3, h))
    re = 0.25 * (_d2_mixed_field(vals, 0, 2, h) + _d2_mixed_field(vals, 1, 3, h))
    im = 0.25 * (_d2_mixed_field(vals, 0, 3, h) - _d2_mixed_field(vals, 1, 2, h))
    out[..., 0, 1] = re + 1j * im
    out[..., 1, 0] = re - 1j * im
    return out
