"""Exact solver for the Schwarz-symmetrized Neumann problem on the ball.

The symmetrized source enters as a decreasing step rearrangement f* on
[0, |ball|].  Integrating the radial form of the Poisson equation once gives

    v'(r) = -(1 / (n w_n r**(n-1))) * integral of f*(s) ds over [0, w_n r**n],

so on each plateau of f* the profile is  alpha + beta r**2 + gamma Psi_n(r)
with Psi_2 = log r and Psi_n = r**(2-n)/(2-n); the solver stores those
coefficients exactly and the profile is C^1 across plateau radii by
construction.  The additive constant of the pure Neumann problem is pinned by
a normalization condition on the boundary trace supplied by the caller.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PositivityError
from .exactint import PowerLogSum, gauss_legendre_integral, weak_sup_by_scan
from .measure import StepRearrangement, partial_integral

_COMPAT_TOL = 1e-10


def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_area(n: int, radius: float) -> float:
    """Surface measure of the sphere of given radius in R^n."""
    return n * unit_ball_volume(n) * radius ** (n - 1)


def gamma_n(n: int, exponent_sign: int = +1) -> float:
    """Isoperimetric constant n**2 * w_n**(sign * 2/n).

    The positive sign is the normalization that closes the fundamental
    level-set identity (see :func:`resolve_gamma_normalization`, which checks
    both candidates numerically rather than assuming either).
    """
    if exponent_sign not in (+1, -1):
        raise DomainError("exponent_sign must be +1 or -1")
    return n * n * unit_ball_volume(n) ** (exponent_sign * 2.0 / n)


class NormalizationCondition(enum.Enum):
    """How the additive constant of the symmetrized solution is pinned.

    TRACE_INTEGRAL:  the boundary trace integral of v equals the given datum.
    TRACE_SQUARED:   the boundary integral of v**2 equals the given datum.
    """

    TRACE_INTEGRAL = 1
    TRACE_SQUARED = 2

    @classmethod
    def from_flag(cls, flag) -> "NormalizationCondition":
        if isinstance(flag, cls):
            return flag
        return cls(int(flag))


def c_star_of(f_star: StepRearrangement, n: int, radius: float) -> float:
    """Neumann datum forced by compatibility on the ball:
    -(integral of f*) / (surface area)."""
    if radius <= 0.0:
        raise DomainError("radius must be positive")
    measure = unit_ball_volume(n) * radius**n
    if abs(measure - f_star.domain_length) > 1e-12 * max(measure, f_star.domain_length):
        raise DomainError("rearrangement length does not match the ball measure")
    if measure == 0.0:
        raise DomainError("zero-measure ball")
    return -f_star.total_integral() / sphere_area(n, radius)


@dataclass(frozen=True)
class SymmetrizedProblem:
    """Poisson problem on the ball with rearranged source and constant Neumann
    datum fixed by compatibility."""

    n: int
    radius: float
    f_star: StepRearrangement
    c_star: float

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("dimension must be >= 2")
        if self.radius <= 0.0:
            raise DomainError("radius must be positive")
        measure = self.ball_measure
        if abs(measure - self.f_star.domain_length) > 1e-12 * max(
            measure, self.f_star.domain_length
        ):
            raise DomainError("|ball| must equal the rearrangement's domain length")
        load = self.f_star.total_integral()
        residual = abs(self.c_star * sphere_area(self.n, self.radius) + load)
        if residual > _COMPAT_TOL * max(1.0, load):
            raise DomainError(
                f"incompatible Neumann datum: residual {residual:.3e}"
            )

    @property
    def ball_measure(self) -> float:
        return unit_ball_volume(self.n) * self.radius**self.n

    @classmethod
    def from_rearrangement(cls, f_star: StepRearrangement, n: int) -> "SymmetrizedProblem":
        radius = (f_star.domain_length / unit_ball_volume(n)) ** (1.0 / n)
        return cls(n, radius, f_star, c_star_of(f_star, n, radius))


def radial_derivative(prob: SymmetrizedProblem, r: float) -> float:
    """v'(r), exact: -(1/(n w_n r^(n-1))) * partial integral of f* up to w_n r^n."""
    if r <= 0.0:
        raise DomainError("r must be positive (the limit value at 0 is 0)")
    if r > prob.radius * (1.0 + 1e-12):
        raise DomainError("r beyond the ball radius")
    r = min(r, prob.radius)
    omega = unit_ball_volume(prob.n)
    return -partial_integral(prob.f_star, omega * r**prob.n) / (
        prob.n * omega * r ** (prob.n - 1)
    )


@dataclass(frozen=True)
class RadialSegment:
    """Profile piece v(r) = const + quad*r**2 + psi*Psi_n(r) on [r_lo, r_hi]."""

    r_lo: float
    r_hi: float
    const: float
    quad: float
    psi: float

    def psi_value(self, n: int, r: float) -> float:
        if self.psi == 0.0:
            return 0.0
        if n == 2:
            return self.psi * math.log(r)
        return self.psi * r ** (2 - n) / (2 - n)

    def value(self, n: int, r: float) -> float:
        return self.const + self.quad * r * r + self.psi_value(n, r)

    def derivative(self, n: int, r: float) -> float:
        return 2.0 * self.quad * r + self.psi * r ** (1 - n)

    def profile_series(self, n: int) -> PowerLogSum:
        s = PowerLogSum.term(self.const, 0.0, 0)
        s.add_term(self.quad, 2.0, 0)
        if self.psi != 0.0:
            if n == 2:
                s.add_term(self.psi, 0.0, 1)
            else:
                s.add_term(self.psi / (2 - n), float(2 - n), 0)
        return s

    def neg_derivative_series(self, n: int) -> PowerLogSum:
        s = PowerLogSum.term(-2.0 * self.quad, 1.0, 0)
        s.add_term(-self.psi, float(1 - n), 0)
        return s


class RadialSolution:
    """Radial non-increasing solution of the symmetrized problem.

    Attributes
    ----------
    problem:
        The underlying :class:`SymmetrizedProblem`.
    v_m:
        Boundary value, which is also the minimum of the profile.
    segments:
        Closed-form pieces aligned with the plateaus of f*.
    """

    def __init__(self, problem: SymmetrizedProblem, v_m: float, segments: Sequence[RadialSegment]):
        self.problem = problem
        self.v_m = float(v_m)
        self.segments = tuple(segments)

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def radius(self) -> float:
        return self.problem.radius

    @property
    def v_max(self) -> float:
        return self.segments[0].value(self.n, 0.0)

    def value(self, r: float) -> float:
        if r < 0.0 or r > self.radius * (1.0 + 1e-12):
            raise DomainError("r outside [0, radius]")
        r = min(r, self.radius)
        return self._segment_at(r).value(self.n, r) if r > 0.0 else self.v_max

    def derivative(self, r: float) -> float:
        if r <= 0.0 or r > self.radius * (1.0 + 1e-12):
            raise DomainError("r must lie in (0, radius]")
        r = min(r, self.radius)
        return self._segment_at(r).derivative(self.n, r)

    def profile(self, r):
        """Vectorized profile values (convenience for exports)."""
        return np.array([self.value(float(x)) for x in np.atleast_1d(r)])

    def _segment_at(self, r: float) -> RadialSegment:
        for seg in self.segments:
            if r <= seg.r_hi or seg is self.segments[-1]:
                return seg
        raise AssertionError

    def invert(self, t: float) -> float:
        """Radius with v(r) = t, for t in [v_m, v_max]; exact on quadratic or
        purely logarithmic pieces, Brent iteration (1e-14 relative) otherwise."""
        if t < self.v_m - 1e-12 or t > self.v_max * (1.0 + 1e-12):
            raise DomainError("level outside the profile range")
        t = min(max(t, self.v_m), self.v_max)
        n = self.n
        for seg in self.segments:
            v_lo = seg.value(n, seg.r_lo) if seg.r_lo > 0.0 else self.v_max
            v_hi = seg.value(n, seg.r_hi)
            if t > v_lo or t < v_hi - 1e-12 * max(1.0, abs(v_hi)):
                continue
            t_clamped = min(max(t, v_hi), v_lo)
            if seg.psi == 0.0:
                if seg.quad == 0.0:
                    return seg.r_hi  # constant piece: report its outer radius
                rr = (t_clamped - seg.const) / seg.quad
                return math.sqrt(max(rr, 0.0))
            if seg.quad == 0.0:
                if n == 2:
                    return math.exp((t_clamped - seg.const) / seg.psi)
                base = (t_clamped - seg.const) * (2 - n) / seg.psi
                return base ** (1.0 / (2 - n))
            lo = max(seg.r_lo, 1e-300)
            return float(
                brentq(
                    lambda r: seg.value(n, r) - t_clamped,
                    lo,
                    seg.r_hi,
                    xtol=1e-15,
                    rtol=8.9e-16,
                )
            )
        return self.radius if t <= self.v_m else 0.0

    # -- exact integrals ---------------------------------------------------

    def ball_integral_power(self, k: int) -> float:
        """Exact integral of v**k over the ball (v >= 0 assumed)."""
        n = self.n
        surf = PowerLogSum.term(n * unit_ball_volume(n), n - 1.0, 0)
        total = 0.0
        for seg in self.segments:
            series = seg.profile_series(n).int_pow(k) * surf
            total += series.integral(seg.r_lo, seg.r_hi)
        return total

    def lorentz_t_integral(self, p: float, q: float) -> float:
        """Integral of t**(q-1) phi(t)**(q/p) dt; exact when q is an integer,
        per-segment Gauss-Legendre (analytic integrand) otherwise."""
        n = self.n
        omega = unit_ball_volume(n)
        ratio = q / p
        acc = 0.0
        if self.v_m > 0.0:
            acc += (self.problem.ball_measure**ratio) * self.v_m**q / q
        radial_power = PowerLogSum.term(omega**ratio, n * ratio, 0)
        q_int = int(round(q))
        exact_q = abs(q - q_int) < 1e-12 and q_int >= 1
        for seg in self.segments:
            if exact_q:
                series = (
                    seg.profile_series(n).int_pow(q_int - 1)
                    * radial_power
                    * seg.neg_derivative_series(n)
                )
                acc += series.integral(seg.r_lo, seg.r_hi)
            else:
                def integrand(r, seg=seg):
                    v = seg.value(n, r)
                    return (
                        v ** (q - 1.0)
                        * (omega * r**n) ** ratio
                        * (-seg.derivative(n, r))
                    )

                acc += gauss_legendre_integral(integrand, seg.r_lo, seg.r_hi, n=128)
        return acc

    def weak_sup(self, p: float) -> float:
        """sup_t t**p phi(t) (numeric scan; no closed form off the plateaus)."""
        curve = phi_curve(self)
        return weak_sup_by_scan(curve, self.v_max, p)


def solve(
    prob: SymmetrizedProblem,
    cond: NormalizationCondition,
    boundary_data: float,
) -> RadialSolution:
    """Solve the symmetrized problem with its additive constant pinned.

    ``boundary_data`` carries the weighted boundary trace integral that the
    symmetrized solution must match: under TRACE_INTEGRAL the boundary value
    is ``boundary_data / surface``, under TRACE_SQUARED it is the non-negative
    square root of ``boundary_data / surface``.
    """
    cond = NormalizationCondition.from_flag(cond)
    n, radius, f_star = prob.n, prob.radius, prob.f_star
    if f_star.total_integral() <= 0.0:
        raise PositivityError("total load must be positive")
    surface = sphere_area(n, radius)
    if cond is NormalizationCondition.TRACE_INTEGRAL:
        v_m = boundary_data / surface
    else:
        if boundary_data < 0.0:
            raise PositivityError(
                "negative squared-trace datum: positivity hypothesis violated"
            )
        v_m = math.sqrt(boundary_data / surface)

    omega = unit_ball_volume(n)
    cum = np.concatenate([[0.0], np.cumsum(f_star.widths)])
    radii = (cum / omega) ** (1.0 / n)
    radii[-1] = radius  # guard against roundoff in the outermost radius

    segments: List[RadialSegment] = []
    for k in range(len(f_star.values)):
        r_lo, r_hi = float(radii[k]), float(radii[k + 1])
        if r_hi <= r_lo:
            continue
        f_k = float(f_star.values[k])
        head = partial_integral(f_star, float(cum[k]))
        d_k = (head - f_k * float(cum[k])) / (n * omega)
        segments.append(RadialSegment(r_lo, r_hi, 0.0, -f_k / (2.0 * n), -d_k))

    # pin constants from the boundary inwards (continuity at plateau radii)
    fixed: List[RadialSegment] = []
    target = v_m
    r_match = radius
    for seg in reversed(segments):
        const = target - seg.value(n, r_match)  # seg.const is 0 here
        pinned = RadialSegment(seg.r_lo, seg.r_hi, const, seg.quad, seg.psi)
        fixed.append(pinned)
        r_match = seg.r_lo
        target = pinned.value(n, r_match) if r_match > 0.0 else pinned.const
    fixed.reverse()
    return RadialSolution(prob, v_m, fixed)


class RadialDistributionCurve:
    """Level-measure curve of a radial solution: phi(t) = w_n r(t)**n.

    Exact on the plateau t <= v_m; between profile breakpoints the radius is
    recovered by exact inversion or Brent iteration.  Lorentz integrals defer
    to the solution's per-segment closed forms.
    """

    def __init__(self, sol: RadialSolution):
        if sol.v_m < -1e-12:
            raise DomainError("curve requires a non-negative profile")
        self.solution = sol
        self.total_measure = sol.problem.ball_measure
        self.support_max = sol.v_max

    def __call__(self, t):
        if np.ndim(t) > 0:
            return np.array([self(float(x)) for x in np.asarray(t)])
        t = float(t)
        sol = self.solution
        if t < sol.v_m:
            return self.total_measure
        if t >= sol.v_max:
            return 0.0
        r = sol.invert(t)
        return unit_ball_volume(sol.n) * r**sol.n

    def derivative(self, t: float) -> float:
        """phi'(t), analytic through the inverse profile (chain rule)."""
        sol = self.solution
        if t < sol.v_m or t >= sol.v_max:
            return 0.0
        r = sol.invert(t)
        dv = sol.derivative(r)
        return sphere_area(sol.n, r) / dv

    def lorentz_t_integral(self, p: float, q: float) -> float:
        return self.solution.lorentz_t_integral(p, q)

    def weak_sup(self, p: float) -> float:
        return self.solution.weak_sup(p)

    def integral(self) -> float:
        return self.lorentz_t_integral(1.0, 1.0)


def phi_curve(sol: RadialSolution) -> RadialDistributionCurve:
    """Distribution curve of the radial solution (requires v_m >= 0)."""
    return RadialDistributionCurve(sol)


def default_identity_grid(sol: RadialSolution, points: int = 120) -> np.ndarray:
    """t-grid for identity checks: interior of (v_m, v_max) plus the plateau
    band, excluding a 1e-9 neighbourhood of profile breakpoints."""
    pad = 1e-7 * max(1.0, sol.v_max)
    ts = np.linspace(sol.v_m + pad, sol.v_max - pad, points)
    if sol.v_m > pad * 10.0:
        ts = np.concatenate([np.linspace(pad, sol.v_m - pad, max(points // 6, 8)), ts])
    breaks = [seg.value(sol.n, seg.r_hi) for seg in sol.segments]
    keep = np.ones(ts.shape, dtype=bool)
    for b in breaks + [sol.v_m, sol.v_max]:
        keep &= np.abs(ts - b) > 1e-9 * max(1.0, abs(b))
    return ts[keep]


def check_fundamental_identity(
    sol: RadialSolution,
    t_grid: Sequence[float] | None = None,
    exponent_sign: int = +1,
) -> float:
    """Max relative residual of the level-set identity

        gamma_n phi(t)**((2n-2)/n)
            = (-phi'(t) - (1/c*) * |outer boundary of {v > t}|)
              * integral of f*(s) ds over [0, phi(t)]

    with phi' computed analytically from the profile.  The boundary term is
    the full sphere area for t < v_m and zero above.
    """
    if sol.v_m < -1e-12:
        raise DomainError("identity check requires a non-negative profile")
    if t_grid is None:
        t_grid = default_identity_grid(sol)
    n = sol.n
    gam = gamma_n(n, exponent_sign)
    curve = phi_curve(sol)
    f_star = sol.problem.f_star
    c_star = sol.problem.c_star
    surface = sphere_area(n, sol.radius)
    worst = 0.0
    for t in np.asarray(t_grid, dtype=float):
        if t >= sol.v_max:
            continue  # both sides vanish
        phi = curve(t)
        lhs = gam * phi ** ((2.0 * n - 2.0) / n)
        boundary = surface if t < sol.v_m else 0.0
        rhs = (-curve.derivative(t) - boundary / c_star) * partial_integral(f_star, phi)
        denom = max(abs(lhs), abs(rhs), 1e-300)
        worst = max(worst, abs(lhs - rhs) / denom)
    return worst


@dataclass(frozen=True)
class GammaResolution:
    """Outcome of testing both candidate normalizations of gamma_n."""

    residual_positive: float
    residual_negative: float
    exponent_sign: int

    @property
    def resolved_gamma_description(self) -> str:
        sign = "+" if self.exponent_sign > 0 else "-"
        return f"n**2 * w_n**({sign}2/n)"


def resolve_gamma_normalization(
    sol: RadialSolution, t_grid: Sequence[float] | None = None
) -> GammaResolution:
    """Evaluate the identity residual under both candidate exponents of the
    unit-ball volume factor and report which one closes the identity."""
    res_pos = check_fundamental_identity(sol, t_grid, exponent_sign=+1)
    res_neg = check_fundamental_identity(sol, t_grid, exponent_sign=-1)
    sign = +1 if res_pos <= res_neg else -1
    return GammaResolution(res_pos, res_neg, sign)
