"""Step-function measure theory: sampled functions, distribution functions,
decreasing rearrangements and the Hardy-Littlewood pairing.

Functions are represented as weighted cells (value, measure).  All operations
here are exact for this representation: distribution functions and
rearrangements are computed breakpoint-by-breakpoint, never by sampling.
Values that agree to 1e-14 relative are merged into a single plateau to avoid
spurious breakpoints from floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import DomainError

_MERGE_RTOL = 1e-14
_MEASURE_RTOL = 1e-12


def _as_float_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 1:
        raise DomainError("expected a one-dimensional array of reals")
    return arr


@dataclass(frozen=True)
class SampledFunction:
    """A measurable function as (value, cell-measure) pairs.

    Parameters
    ----------
    values, measures:
        Per-cell value and non-negative Lebesgue measure.
    total_measure:
        Measure of the underlying domain; defaults to ``sum(measures)`` and
        must agree with it to 1e-12 relative.
    """

    values: np.ndarray
    measures: np.ndarray
    total_measure: float = None  # type: ignore[assignment]

    def __post_init__(self):
        values = _as_float_array(self.values)
        measures = _as_float_array(self.measures)
        if values.size == 0:
            raise DomainError("a sampled function needs at least one cell")
        if values.shape != measures.shape:
            raise DomainError("values and measures must have equal length")
        if np.any(measures < 0.0):
            raise DomainError("cell measures must be non-negative")
        total = float(np.sum(measures))
        declared = self.total_measure
        if declared is None:
            declared = total
        elif abs(declared - total) > _MEASURE_RTOL * max(abs(declared), total, 1e-300):
            raise DomainError(
                f"declared total measure {declared} != sum of cell measures {total}"
            )
        if declared <= 0.0:
            raise DomainError("total measure must be positive")
        for arr in (values, measures):
            arr.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "total_measure", float(declared))

    @classmethod
    def from_cells(cls, cells: Iterable[Tuple[float, float]]) -> "SampledFunction":
        cells = list(cells)
        return cls(np.array([v for v, _ in cells]), np.array([m for _, m in cells]))

    @property
    def cells(self):
        return list(zip(self.values.tolist(), self.measures.tolist()))

    def integral_abs_power(self, p: float) -> float:
        """Direct evaluation of  sum |value|**p * measure."""
        return float(np.sum(np.abs(self.values) ** p * self.measures))

    def scaled(self, factor: float) -> "SampledFunction":
        return SampledFunction(self.values * factor, self.measures, self.total_measure)


def _grouped_abs_levels(values: np.ndarray, measures: np.ndarray):
    """Distinct |values| (noise-merged, ascending) with aggregated measures."""
    av = np.abs(values)
    order = np.argsort(av, kind="stable")
    sv = av[order]
    sm = measures[order]
    levels = []
    masses = []
    for v, m in zip(sv, sm):
        if levels and abs(v - levels[-1]) <= _MERGE_RTOL * max(abs(v), abs(levels[-1])):
            masses[-1] += m
        else:
            levels.append(float(v))
            masses.append(float(m))
    return np.array(levels), np.array(masses)


@dataclass(frozen=True)
class DistributionCurve:
    """Right-continuous non-increasing t -> |{|g| > t}| with exact breakpoints.

    ``plateau_measures[j]`` is the value of the curve on
    ``[breakpoints[j], breakpoints[j+1])``; for ``t`` below the first
    breakpoint the curve equals ``total_measure``, beyond the last it is 0.
    """

    breakpoints: np.ndarray
    plateau_measures: np.ndarray
    total_measure: float

    def __post_init__(self):
        bp = _as_float_array(self.breakpoints)
        pm = _as_float_array(self.plateau_measures)
        if bp.size == 0 or bp.size != pm.size:
            raise DomainError("breakpoints and plateau_measures must match and be non-empty")
        if np.any(np.diff(bp) <= 0.0):
            raise DomainError("breakpoints must be strictly increasing")
        if np.any(np.diff(pm) > 1e-12 * max(1.0, float(pm[0]))):
            raise DomainError("plateau measures must be non-increasing")
        if pm[0] > self.total_measure * (1.0 + _MEASURE_RTOL):
            raise DomainError("curve exceeds total measure")
        for arr in (bp, pm):
            arr.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "plateau_measures", pm)
        object.__setattr__(self, "total_measure", float(self.total_measure))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t_arr, side="right") - 1
        below = idx < 0
        idx = np.clip(idx, 0, len(self.plateau_measures) - 1)
        out = self.plateau_measures[idx]
        out = np.where(below, self.total_measure, out)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    @property
    def support_max(self) -> float:
        """Largest t with positive measure (the last breakpoint)."""
        return float(self.breakpoints[-1])

    def lorentz_t_integral(self, p: float, q: float) -> float:
        """Exact  integral of t**(q-1) * mu(t)**(q/p) dt  over (0, inf)."""
        ratio = q / p
        acc = 0.0
        lo = 0.0
        if self.breakpoints[0] > 0.0:
            acc += self.total_measure**ratio * self.breakpoints[0] ** q / q
            lo = self.breakpoints[0]
        for j in range(len(self.breakpoints)):
            hi = self.breakpoints[j + 1] if j + 1 < len(self.breakpoints) else None
            mu = self.plateau_measures[j]
            if hi is None or mu == 0.0:
                break
            acc += mu**ratio * (hi**q - self.breakpoints[j] ** q) / q
        return acc

    def weak_sup(self, p: float) -> float:
        """Exact  sup_t t**p * mu(t)  (approached at plateau right endpoints)."""
        best = 0.0
        if self.breakpoints[0] > 0.0:
            best = self.total_measure * self.breakpoints[0] ** p
        for j in range(len(self.breakpoints) - 1):
            best = max(best, self.plateau_measures[j] * self.breakpoints[j + 1] ** p)
        return best

    def integral(self) -> float:
        """Exact layer-cake integral of the curve over (0, inf)."""
        return self.lorentz_t_integral(1.0, 1.0)


@dataclass(frozen=True)
class StepRearrangement:
    """Non-increasing step function on [0, domain_length] equimeasurable with
    its source: values with their widths, widths summing to the domain length."""

    values: np.ndarray
    widths: np.ndarray
    domain_length: float

    def __post_init__(self):
        values = _as_float_array(self.values)
        widths = _as_float_array(self.widths)
        if values.size == 0 or values.shape != widths.shape:
            raise DomainError("values and widths must match and be non-empty")
        if np.any(values < 0.0):
            raise DomainError("rearranged values must be non-negative")
        if np.any(np.diff(values) > 0.0):
            raise DomainError("rearranged values must be non-increasing")
        if np.any(widths < 0.0):
            raise DomainError("widths must be non-negative")
        total = float(np.sum(widths))
        if abs(total - self.domain_length) > _MEASURE_RTOL * max(total, self.domain_length):
            raise DomainError("widths must sum to the domain length")
        cum = np.concatenate([[0.0], np.cumsum(widths)])
        cumint = np.concatenate([[0.0], np.cumsum(values * widths)])
        for arr in (values, widths, cum, cumint):
            arr.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "domain_length", float(self.domain_length))
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_cumint", cumint)

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        idx = np.searchsorted(self._cum[1:-1], s_arr, side="right")
        out = self.values[np.clip(idx, 0, len(self.values) - 1)]
        return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out

    def distribution(self) -> DistributionCurve:
        return distribution(SampledFunction(self.values, self.widths))

    def total_integral(self) -> float:
        return float(self._cumint[-1])


def distribution(f: SampledFunction | StepRearrangement) -> DistributionCurve:
    """Exact distribution function of |f|; breakpoints are the distinct
    absolute values of f."""
    if isinstance(f, StepRearrangement):
        values, measures = f.values, f.widths
        total = f.domain_length
    else:
        values, measures = f.values, f.measures
        total = f.total_measure
    levels, masses = _grouped_abs_levels(values, measures)
    # plateau j = mass strictly above level j
    suffix = np.concatenate([np.cumsum(masses[::-1])[::-1], [0.0]])
    return DistributionCurve(levels, suffix[1:], total)


def decreasing_rearrangement(f: SampledFunction) -> StepRearrangement:
    """Decreasing rearrangement of |f| as a step function on [0, |domain|]."""
    levels, masses = _grouped_abs_levels(f.values, f.measures)
    return StepRearrangement(levels[::-1], masses[::-1], f.total_measure)


def partial_integral(r: StepRearrangement, w: float) -> float:
    """Exact  integral of r(s) ds over [0, w]  (piecewise linear in w)."""
    length = r.domain_length
    if w < -1e-9 * length or w > length * (1.0 + 1e-9):
        raise DomainError(f"upper limit {w} outside [0, {length}]")
    w = min(max(w, 0.0), length)
    cum = r._cum
    idx = int(np.searchsorted(cum, w, side="right")) - 1
    idx = min(idx, len(r.values) - 1)
    return float(r._cumint[idx] + r.values[idx] * (w - cum[idx]))


def step_sup_distance(c1: DistributionCurve, c2: DistributionCurve) -> float:
    """Exact sup-norm distance between two step distribution curves."""
    ts = np.unique(np.concatenate([c1.breakpoints, c2.breakpoints, [0.0]]))
    probes = np.concatenate([ts, 0.5 * (ts[:-1] + ts[1:])])
    return float(np.max(np.abs(c1(probes) - c2(probes))))


def hardy_littlewood_pairing(h: SampledFunction, g: SampledFunction) -> Tuple[float, float]:
    """Both sides of the Hardy-Littlewood inequality for paired cells.

    Returns ``(lhs, rhs)`` with ``lhs = sum h*g*measure`` and
    ``rhs = integral of h*(s) g*(s) ds`` computed exactly from the step
    rearrangements.  The contract ``lhs <= rhs + 1e-12 |rhs|`` holds for
    every valid pair.
    """
    if h.values.shape != g.values.shape or not np.allclose(
        h.measures, g.measures, rtol=1e-12, atol=0.0
    ):
        raise DomainError("h and g must share one cell decomposition")
    lhs = float(np.sum(h.values * g.values * h.measures))
    hs = decreasing_rearrangement(h)
    gs = decreasing_rearrangement(g)
    grid = np.unique(np.concatenate([hs._cum, gs._cum]))
    rhs = 0.0
    for a, b in zip(grid[:-1], grid[1:]):
        mid = 0.5 * (a + b)
        rhs += hs(mid) * gs(mid) * (b - a)
    return lhs, float(rhs)
