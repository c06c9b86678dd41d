"""Exact radial reduction of the complex Hessian.

For u(z) = f(r) with r = |z| the complex Hessian is

    u_{z_i zbar_j} = (f'/(2r)) delta_{ij}
                   + (f''/(4 r^2) - f'/(4 r^3)) zbar_i z_j,

whose eigenvalues are

    lambda_tan = f'(r) / (2r)          (multiplicity n - 1),
    lambda_rad = (f''(r) + f'(r)/r)/4  (multiplicity 1),

with the common limit f''(0)/2 at r = 0.  Hence
det(complex Hessian) = lambda_tan^{n-1} * lambda_rad, and the total
Monge-Ampere mass has the divergence form

    integral det dV = sphere_area(n) * f'(1)^n / (n * 2^{n+1}),

used as an independent cross-check on the quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridField, GridSpec, sphere_area

__all__ = [
    "RadialProfile",
    "radial_hessian_eigs",
    "radial_det",
    "ball_integral_radial",
    "cumulative_moment_integral",
]


@dataclass(frozen=True)
class RadialProfile:
    """Samples f(r_k) on the uniform radius grid r_k = k/(m-1), r in [0, 1]."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.n not in (1, 2):
            raise ValueError(f"complex dimension must be 1 or 2, got {self.n}")
        if self.values.ndim != 1 or self.values.size < 64:
            raise ValueError("profile needs at least 64 samples on [0, 1]")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile samples must be finite")

    @property
    def radii(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.values.size)

    @property
    def dr(self) -> float:
        return 1.0 / (self.values.size - 1)

    @property
    def boundary_value(self) -> float:
        return float(self.values[-1])

    def derivative(self) -> np.ndarray:
        """f' by central differences, one-sided second order at the ends."""
        return np.gradient(self.values, self.dr, edge_order=2)

    def second_derivative(self) -> np.ndarray:
        f, dr = self.values, self.dr
        out = np.empty_like(f)
        out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dr**2
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dr**2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / dr**2
        return out

    def to_grid(self, spec: GridSpec) -> GridField:
        """Interpolate f(|z|) onto the grid, linear extension past r = 1.

        The extension only feeds stencils of band nodes; nothing inside
        the ball depends on it.
        """
        if spec.n != self.n:
            raise ValueError("dimension mismatch between profile and grid")
        r = np.sqrt(spec.radius_sq)
        vals = np.interp(r, self.radii, self.values)
        slope = (self.values[-1] - self.values[-2]) / self.dr
        outside = r > 1.0
        vals = np.where(outside, self.values[-1] + slope * (r - 1.0), vals)
        return GridField(spec, vals)

    @staticmethod
    def from_grid(u: GridField, num_samples: int | None = None) -> "RadialProfile":
        """Read samples back along the positive x_1 axis."""
        spec = u.spec
        half = spec.resolution // 2
        center = (half,) * (2 * spec.n)
        idx = [list(center) for _ in range(half + 1)]
        for k in range(half + 1):
            idx[k][0] = half + k
        axis_vals = np.array([u.values[tuple(i)] for i in idx])
        axis_r = spec.h * np.arange(half + 1)
        m = num_samples or max(64, half + 1)
        r_out = np.linspace(0.0, 1.0, m)
        return RadialProfile(spec.n, np.interp(r_out, axis_r, axis_vals))

    @staticmethod
    def from_function(n: int, fn, num_samples: int = 1025) -> "RadialProfile":
        r = np.linspace(0.0, 1.0, num_samples)
        return RadialProfile(n, np.asarray(fn(r), dtype=float))


def radial_hessian_eigs(p: RadialProfile, r: float | None = None
                        ) -> tuple[np.ndarray, np.ndarray]:
    """(lambda_tan, lambda_rad) arrays on the profile grid, or at one radius.

    At r = 0 both eigenvalues take the analytic limit f''(0)/2.
    """
    fp = p.derivative()
    fpp = p.second_derivative()
    radii = p.radii
    lam_tan = np.empty_like(fp)
    lam_rad = np.empty_like(fp)
    lam_tan[1:] = fp[1:] / (2.0 * radii[1:])
    lam_rad[1:] = 0.25 * (fpp[1:] + fp[1:] / radii[1:])
    lam_tan[0] = lam_rad[0] = 0.5 * fpp[0]
    if r is None:
        return lam_tan, lam_rad
    return (
        np.interp(r, radii, lam_tan),
        np.interp(r, radii, lam_rad),
    )


def radial_det(p: RadialProfile) -> np.ndarray:
    """det of the complex Hessian along the radius: lam_tan^{n-1} * lam_rad."""
    lam_tan, lam_rad = radial_hessian_eigs(p)
    return lam_tan ** (p.n - 1) * lam_rad


def ball_integral_radial(values: np.ndarray, n: int) -> float:
    """integral over B_1 of g(|z|) dV for g piecewise linear on the radius grid.

    Computes sphere_area(n) * int_0^1 g(r) r^{2n-1} dr with the monomial
    moments of each panel integrated exactly, so constants and linear
    data incur no quadrature error at all.
    """
    values = np.asarray(values, dtype=float)
    r = np.linspace(0.0, 1.0, values.size)
    q = 2 * n - 1
    r0, r1 = r[:-1], r[1:]
    p0, p1 = values[:-1], values[1:]
    slope = (p1 - p0) / (r1 - r0)
    m1 = (r1 ** (q + 1) - r0 ** (q + 1)) / (q + 1)
    m2 = (r1 ** (q + 2) - r0 ** (q + 2)) / (q + 2)
    panel = p0 * m1 + slope * (m2 - r0 * m1)
    return float(sphere_area(n) * np.sum(panel))


def cumulative_moment_integral(values: np.ndarray, q: int) -> np.ndarray:
    """I_k = int_0^{r_k} g(rho) rho^q d rho for g piecewise linear on [0, 1]."""
    values = np.asarray(values, dtype=float)
    r = np.linspace(0.0, 1.0, values.size)
    r0, r1 = r[:-1], r[1:]
    p0, p1 = values[:-1], values[1:]
    slope = (p1 - p0) / (r1 - r0)
    m1 = (r1 ** (q + 1) - r0 ** (q + 1)) / (q + 1)
    m2 = (r1 ** (q + 2) - r0 ** (q + 2)) / (q + 2)
    panel = p0 * m1 + slope * (m2 - r0 * m1)
    out = np.empty(values.size)
    out[0] = 0.0
    np.cumsum(panel, out=out[1:])
    return out
