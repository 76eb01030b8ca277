"""Independent finite-difference oracle for Neumann Poisson problems on
rectangles.

Cell-centered five-point Laplacian with ghost closure: homogeneous reflection
plus the Neumann datum entering the right-hand side as a face flux.  The pure
Neumann system is singular (constants); it is solved by conjugate gradients
restricted to the mean-zero complement, with the projection applied every
iteration rather than pinning a node.  The gauge (additive constant) is
applied as a post-shift.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from . import geometry
from .errors import CompatibilityError, ConvergenceError, DomainError
from .measure import SampledFunction, distribution

_EDGES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class RectGrid:
    """Uniform cell-centered grid on a coordinate rectangle."""

    x_interval: Tuple[float, float]
    y_interval: Tuple[float, float]
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise DomainError("need at least 8 cells per direction")
        if self.x_interval[1] <= self.x_interval[0] or self.y_interval[1] <= self.y_interval[0]:
            raise DomainError("intervals must have positive length")

    @property
    def hx(self) -> float:
        return (self.x_interval[1] - self.x_interval[0]) / self.nx

    @property
    def hy(self) -> float:
        return (self.y_interval[1] - self.y_interval[0]) / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def measure(self) -> float:
        return (self.x_interval[1] - self.x_interval[0]) * (
            self.y_interval[1] - self.y_interval[0]
        )

    @property
    def perimeter(self) -> float:
        return 2.0 * (
            self.x_interval[1]
            - self.x_interval[0]
            + self.y_interval[1]
            - self.y_interval[0]
        )

    def centers(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = self.x_interval[0] + (np.arange(self.nx) + 0.5) * self.hx
        ys = self.y_interval[0] + (np.arange(self.ny) + 0.5) * self.hy
        return xs, ys

    def centers_mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        xs, ys = self.centers()
        return np.meshgrid(xs, ys)


class Gauge(enum.Enum):
    MEAN_ZERO_INTERIOR = "mean_zero_interior"
    MEAN_ZERO_TRACE = "mean_zero_trace"


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    """A gauged solution field with its residual diagnostics."""

    grid: RectGrid
    values: np.ndarray  # shape (ny, nx)
    gauge: Gauge
    neumann: Dict[str, float]
    residual_inf: float
    iterations: int

    def mean(self) -> float:
        return float(np.mean(self.values))

    def trace_integral(self) -> float:
        """Boundary trace integral, faces extrapolated with the Neumann data."""
        grid, u, c = self.grid, self.values, self.neumann
        hx, hy = grid.hx, grid.hy
        total = float(np.sum(u[:, 0] + 0.5 * hx * c["left"]) * hy)
        total += float(np.sum(u[:, -1] + 0.5 * hx * c["right"]) * hy)
        total += float(np.sum(u[0, :] + 0.5 * hy * c["bottom"]) * hx)
        total += float(np.sum(u[-1, :] + 0.5 * hy * c["top"]) * hx)
        return total

    def as_sampled_function(self) -> SampledFunction:
        vals = self.values.ravel()
        return SampledFunction(vals, np.full(vals.size, self.grid.cell_area))

    def distribution(self):
        return distribution(self.as_sampled_function())


def _normalize_neumann(c) -> Dict[str, float]:
    if isinstance(c, dict):
        missing = set(_EDGES) - set(c)
        if missing:
            raise DomainError(f"missing Neumann data for edges {sorted(missing)}")
        return {edge: float(c[edge]) for edge in _EDGES}
    return {edge: float(c) for edge in _EDGES}


def _apply_operator(u: np.ndarray, hx2: float, hy2: float) -> np.ndarray:
    out = np.zeros_like(u)
    out[:, 1:-1] += (2.0 * u[:, 1:-1] - u[:, :-2] - u[:, 2:]) / hx2
    out[:, 0] += (u[:, 0] - u[:, 1]) / hx2
    out[:, -1] += (u[:, -1] - u[:, -2]) / hx2
    out[1:-1, :] += (2.0 * u[1:-1, :] - u[:-2, :] - u[2:, :]) / hy2
    out[0, :] += (u[0, :] - u[1, :]) / hy2
    out[-1, :] += (u[-1, :] - u[-2, :]) / hy2
    return out


def _cg_mean_zero(
    b: np.ndarray, hx2: float, hy2: float, cap: int, rtol: float
) -> Tuple[np.ndarray, int]:
    """Conjugate gradients on the mean-zero complement of the singular
    Neumann operator; the projection is applied every iteration."""
    x = np.zeros_like(b)
    r = b.copy()
    d = r.copy()
    rs = float(np.sum(r * r))
    b_norm2 = math.sqrt(rs) + 1e-300
    iterations = 0
    for iterations in range(1, cap + 1):
        ad = _apply_operator(d, hx2, hy2)
        ad -= np.mean(ad)
        denom = float(np.sum(d * ad))
        if denom <= 0.0:
            break
        alpha = rs / denom
        x += alpha * d
        r -= alpha * ad
        rs_new = float(np.sum(r * r))
        if math.sqrt(rs_new) <= rtol * b_norm2:
            break
        d = r + (rs_new / rs) * d
        rs = rs_new
    x -= np.mean(x)
    return x, iterations


def assemble_and_solve(
    grid: RectGrid,
    f,
    c,
    gauge: Gauge = Gauge.MEAN_ZERO_INTERIOR,
    rtol: float = 5e-14,
) -> DiscreteSolution:
    """Solve the discrete Neumann Poisson problem on the grid.

    ``f`` is the load at cell centers (shape (ny, nx)); ``c`` the Neumann
    datum, a constant or per-edge dict.  Raises
    :class:`~talenti_neumann.errors.CompatibilityError` when the discrete
    load/flux balance is violated and
    :class:`~talenti_neumann.errors.ConvergenceError` when conjugate
    gradients stall before reaching the residual target.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.ny, grid.nx):
        raise DomainError(f"load shape {f.shape} != grid shape {(grid.ny, grid.nx)}")
    neumann = _normalize_neumann(c)
    hx, hy = grid.hx, grid.hy

    b = f.copy()
    b[:, 0] += neumann["left"] / hx
    b[:, -1] += neumann["right"] / hx
    b[0, :] += neumann["bottom"] / hy
    b[-1, :] += neumann["top"] / hy

    # discrete load/flux balance (the solvability condition)
    balance = float(np.sum(b)) * grid.cell_area
    scale = float(np.sum(np.abs(f))) * grid.cell_area + sum(
        abs(v) for v in neumann.values()
    ) * grid.perimeter / 4.0 + 1e-30
    if abs(balance) > 1e-8 * scale:
        raise CompatibilityError(abs(balance) / scale)

    hx2, hy2 = hx * hx, hy * hy
    b -= np.mean(b)  # project the roundoff part of b off the null space
    b_inf = float(np.max(np.abs(b))) + 1e-300
    cap = 20 * (grid.nx + grid.ny)

    # plain CG stagnates near eps*||A||*||x||; iterative refinement on the
    # true residual pushes the defect below the 1e-10 * ||b||_inf target
    x = np.zeros_like(b)
    iterations = 0
    residual = b_inf
    for _refine in range(4):
        defect = b - _apply_operator(x, hx2, hy2)
        defect -= np.mean(defect)
        residual = float(np.max(np.abs(defect)))
        if residual <= 1e-10 * b_inf:
            break
        delta, used = _cg_mean_zero(defect, hx2, hy2, cap, rtol)
        iterations += used
        x += delta
        x -= np.mean(x)
    else:
        defect = b - _apply_operator(x, hx2, hy2)
        residual = float(np.max(np.abs(defect)))
    if residual > 1e-10 * b_inf:
        raise ConvergenceError(
            f"CG residual {residual:.3e} > 1e-10 * ||b||_inf after {iterations} iterations"
        )

    sol = DiscreteSolution(grid, x, gauge, neumann, residual, iterations)
    if gauge is Gauge.MEAN_ZERO_TRACE:
        shift = -sol.trace_integral() / grid.perimeter
    else:
        shift = -sol.mean()
    return DiscreteSolution(grid, x + shift, gauge, neumann, residual, iterations)


def l1_norm(sol: DiscreteSolution) -> float:
    """sum |u| * cell measure."""
    return float(np.sum(np.abs(sol.values))) * sol.grid.cell_area


def grid_for_rectangle(x_interval, y_interval, resolution: int) -> RectGrid:
    """Grid with roughly square cells; the longer side gets ``resolution``."""
    nx, ny = geometry.aspect_grid_counts(x_interval, y_interval, resolution)
    return RectGrid(tuple(x_interval), tuple(y_interval), nx, ny)


def solve_rectangle_case(
    case: geometry.ExampleCase,
    resolution: int = 512,
    gauge: Gauge = Gauge.MEAN_ZERO_TRACE,
) -> Tuple[DiscreteSolution, np.ndarray]:
    """FD solution of a rectangle catalog case, plus the closed form sampled
    at the same cell centers (for cross-validation)."""
    rect = case.rectangle
    grid = grid_for_rectangle(rect.x_interval, rect.y_interval, resolution)
    _, _, uu, ff, _ = geometry.rect_cell_fields(case, grid.nx, grid.ny)
    sol = assemble_and_solve(grid, ff, rect.c, gauge)
    return sol, uu


def manufactured_convergence(sizes=(32, 64, 128)) -> Tuple[float, list]:
    """Max-norm errors against u = cos(pi x) cos(pi y) on the unit square and
    the fitted convergence slope in h."""
    errors = []
    hs = []
    for m in sizes:
        grid = RectGrid((0.0, 1.0), (0.0, 1.0), m, m)
        X, Y = grid.centers_mesh()
        f = 2.0 * math.pi**2 * np.cos(math.pi * X) * np.cos(math.pi * Y)
        sol = assemble_and_solve(grid, f, 0.0, Gauge.MEAN_ZERO_INTERIOR)
        exact = np.cos(math.pi * X) * np.cos(math.pi * Y)
        exact = exact - np.mean(exact)
        errors.append(float(np.max(np.abs(sol.values - exact))))
        hs.append(1.0 / m)
    slope = float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
    return slope, errors
