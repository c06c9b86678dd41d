"""Grids on a box around the closed unit ball of C^n viewed as R^{2n}.

Conventions used throughout the package:

* A point z = (z_1, ..., z_n) in C^n is identified with
  (x_1, y_1, ..., x_n, y_n) in R^{2n} via z_k = x_k + i*y_k.  Array axis
  2k holds x_{k+1} and axis 2k+1 holds y_{k+1}.
* Nodes sit at integer multiples of the spacing h, so the origin is a
  node and the node set is symmetric under coordinate sign flips.
* dV is Lebesgue measure on R^{2n}.  No 2^n or (2*pi)^n factors are
  inserted anywhere: vol(B_1) = pi for n = 1 and pi^2/2 for n = 2.
* The inside mask is {|z| < 1 - h}.  Every inside node has a full
  central-difference stencil.  Boundary data is read from the band
  {1 - h <= |z| <= 1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "GridSpec",
    "GridField",
    "unit_ball_volume",
    "sphere_area",
    "integrate_ball",
    "sup_interior",
    "sup_boundary",
    "field_scale",
]


def unit_ball_volume(n: int) -> float:
    """Lebesgue volume of the unit ball of C^n = R^{2n}: pi^n / n!."""
    return math.pi ** n / math.factorial(n)


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{2n-1} in R^{2n}: 2 pi^n / (n-1)!."""
    return 2.0 * math.pi ** n / math.factorial(n - 1)


# Number of quadrature subsamples per real axis used to estimate the
# overlap of a boundary cell with the unit ball.
_SUBSAMPLES_PER_AXIS = 4


@dataclass(frozen=True)
class GridSpec:
    """Uniform node-centered grid on the box [-half_width, half_width]^{2n}.

    ``resolution`` counts cells per real axis, so there are
    ``resolution + 1`` nodes per axis.  When ``half_width`` is omitted it
    is chosen as 1 + 4h, which makes every node of the closed unit ball
    sit at least four cells away from the box edge (full stencils, no
    one-sided differences anywhere).
    """

    n: int
    resolution: int
    half_width: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.n not in (1, 2):
            raise ValueError(f"complex dimension must be 1 or 2, got {self.n}")
        if self.resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {self.resolution}")
        if self.resolution % 2 != 0:
            raise ValueError("resolution must be even (keeps the origin on a node)")
        if self.half_width == 0.0:
            # half_width = 1 + 4h together with h = 2*half_width/resolution
            # gives h = 2/(resolution - 8).
            h = 2.0 / (self.resolution - 8)
            object.__setattr__(self, "half_width", 1.0 + 4.0 * h)
        else:
            h = 2.0 * self.half_width / self.resolution
            if self.half_width < 1.0 + 2.0 * h:
                raise ValueError(
                    "half_width leaves less than two cells of margin around the ball"
                )

    @property
    def h(self) -> float:
        """Grid spacing; always 2*half_width/resolution > 0."""
        return 2.0 * self.half_width / self.resolution

    @property
    def nodes_per_axis(self) -> int:
        return self.resolution + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.nodes_per_axis,) * (2 * self.n)

    @property
    def cell_volume(self) -> float:
        return self.h ** (2 * self.n)

    def axis(self) -> np.ndarray:
        """Node coordinates along one real axis: k*h for k in [-res/2, res/2]."""
        half = self.resolution // 2
        return self.h * np.arange(-half, half + 1, dtype=float)

    def node_coords(self, node: tuple[int, ...]) -> np.ndarray:
        ax = self.axis()
        return np.array([ax[i] for i in node])

    def axis_views(self) -> list[np.ndarray]:
        """One broadcastable coordinate array per real axis."""
        ax = self.axis()
        d = 2 * self.n
        out = []
        for axis_index in range(d):
            view = [np.newaxis] * d
            view[axis_index] = slice(None)
            out.append(ax[tuple(view)])
        return out

    @cached_property
    def radius_sq(self) -> np.ndarray:
        """|z|^2 at every node, as a full array (built lazily, cached)."""
        ax2 = self.axis() ** 2
        out = np.zeros(self.shape)
        for axis_index in range(2 * self.n):
            view = [np.newaxis] * (2 * self.n)
            view[axis_index] = slice(None)
            out = out + ax2[tuple(view)]
        return out

    def node_radius_sq(self, node: tuple[int, ...]) -> float:
        """|z|^2 at a single node without touching the full array."""
        ax = self.axis()
        return float(sum(ax[i] ** 2 for i in node))

    @cached_property
    def inside_mask(self) -> np.ndarray:
        """Nodes with |z| < 1 - h."""
        return self.radius_sq < (1.0 - self.h) ** 2

    @cached_property
    def band_mask(self) -> np.ndarray:
        """Boundary-band nodes with 1 - h <= |z| <= 1."""
        r2 = self.radius_sq
        return ((1.0 - self.h) ** 2 <= r2) & (r2 <= 1.0)

    def is_inside(self, node: tuple[int, ...]) -> bool:
        return self.node_radius_sq(node) < (1.0 - self.h) ** 2

    @cached_property
    def ball_weights(self) -> np.ndarray:
        """Per-node quadrature weight: the fraction of the node's cell
        inside the unit ball.

        Cells that clearly lie inside (or outside) get weight 1 (or 0);
        cells straddling the sphere are subsampled with a
        4^{2n}-point midpoint rule.
        """
        d = 2 * self.n
        r = np.sqrt(self.radius_sq)
        reach = 0.5 * self.h * math.sqrt(d)  # half cell diagonal
        weights = np.zeros(self.shape)
        weights[r <= 1.0 - reach] = 1.0
        straddle = (r > 1.0 - reach) & (r < 1.0 + reach)
        idx = np.nonzero(straddle)
        if idx[0].size:
            ax = self.axis()
            centers = np.stack([ax[i] for i in idx], axis=1)  # (m, d)
            m = _SUBSAMPLES_PER_AXIS
            offs_1d = self.h * (np.arange(m) + 0.5 - m / 2.0) / m
            grids = np.meshgrid(*([offs_1d] * d), indexing="ij")
            offsets = np.stack([g.ravel() for g in grids], axis=1)  # (m^d, d)
            fracs = np.empty(idx[0].size)
            chunk = max(1, 50_000_000 // (offsets.shape[0] * d))
            for start in range(0, centers.shape[0], chunk):
                block = centers[start : start + chunk]  # (c, d)
                pts = block[:, None, :] + offsets[None, :, :]
                inside = np.einsum("cpd,cpd->cp", pts, pts) <= 1.0
                fracs[start : start + block.shape[0]] = inside.mean(axis=1)
            weights[idx] = fracs
        return weights


@dataclass(frozen=True)
class GridField:
    """Real scalar values attached to every node of a GridSpec."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.spec.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.spec.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite at every node")

    @staticmethod
    def from_function(spec: GridSpec, fn: Callable[..., np.ndarray]) -> "GridField":
        """Evaluate ``fn(x1, y1[, x2, y2])`` on broadcastable axis arrays."""
        values = np.asarray(fn(*spec.axis_views()), dtype=float)
        values = np.broadcast_to(values, spec.shape).copy()
        return GridField(spec, values)

    def __call__(self, node: tuple[int, ...]) -> float:
        return float(self.values[node])


def integrate_ball(u: GridField | np.ndarray, spec: GridSpec | None = None,
                   mask: np.ndarray | None = None) -> float:
    """Midpoint-rule integral of a node field over the unit ball.

    Interior cells carry weight 1; cells straddling the sphere carry
    their sampled overlap fraction.  Nodes excluded by ``mask`` (and all
    nodes outside the ball) contribute zero.
    """
    if isinstance(u, GridField):
        spec = u.spec
        values = u.values
    else:
        if spec is None:
            raise ValueError("spec required when integrating a bare array")
        values = np.asarray(u, dtype=float)
    w = spec.ball_weights
    if mask is not None:
        w = np.where(mask, w, 0.0)
    contrib = np.where(w > 0.0, values, 0.0) * w
    return float(np.sum(contrib) * spec.cell_volume)


def sup_interior(u: GridField) -> float:
    """Maximum of u over the inside mask {|z| < 1 - h}."""
    m = u.spec.inside_mask
    if not m.any():
        raise ValueError("inside mask is empty")
    return float(u.values[m].max())


def sup_boundary(u: GridField) -> float:
    """Maximum of u over the boundary band {1 - h <= |z| <= 1}."""
    m = u.spec.band_mask
    if not m.any():
        raise ValueError("boundary band is empty")
    return float(u.values[m].max())


def field_scale(u: GridField | np.ndarray) -> float:
    """Scale factor used in tolerance budgets: max(1, |u|_inf)."""
    values = u.values if isinstance(u, GridField) else np.asarray(u)
    return max(1.0, float(np.max(np.abs(values))))
