"""Exact one-dimensional integration helpers.

Radial profiles and their powers only ever produce integrands that are finite
sums of terms ``c * r**alpha * log(r)**k``; boundary traces of the rectangle
cases are piecewise polynomials.  Both families admit exact antiderivatives,
which keeps norm comparisons free of quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DomainError

_KEY_DECIMALS = 12


def power_integral(alpha: float, a: float, b: float) -> float:
    """Exact integral of r**alpha over [a, b], 0 <= a <= b."""
    if b < a:
        raise DomainError(f"inverted interval [{a}, {b}]")
    if alpha == -1.0:
        if a <= 0.0:
            raise DomainError("r**-1 is not integrable down to 0")
        return math.log(b / a)
    e = alpha + 1.0
    lo = 0.0 if (a == 0.0 and e > 0.0) else a**e
    return (b**e - lo) / e


def _powlog_antiderivative(alpha: float, k: int, r: float) -> float:
    # Antiderivative of r**alpha * log(r)**k, alpha != -1:
    #   r**(alpha+1) * sum_{j=0..k} (-1)**(k-j) k!/j! * log(r)**j / (alpha+1)**(k-j+1)
    if r == 0.0:
        return 0.0
    e = alpha + 1.0
    lg = math.log(r)
    acc = 0.0
    term = 1.0 / e  # k!/j! / e**(k-j+1) for j = k
    for j in range(k, -1, -1):
        acc += ((-1.0) ** (k - j)) * term * lg**j
        term *= (j) / e  # step j -> j-1: multiply by j/e
    return r**e * acc


def power_log_integral(alpha: float, k: int, a: float, b: float) -> float:
    """Exact integral of r**alpha * log(r)**k over [a, b]."""
    if k < 0:
        raise DomainError("log power must be non-negative")
    if k == 0:
        return power_integral(alpha, a, b)
    if b < a:
        raise DomainError(f"inverted interval [{a}, {b}]")
    if alpha == -1.0:
        if a <= 0.0:
            raise DomainError("log(r)**k / r is not integrable down to 0")
        return (math.log(b) ** (k + 1) - math.log(a) ** (k + 1)) / (k + 1)
    if a == 0.0 and alpha + 1.0 <= 0.0:
        raise DomainError("integrand not integrable down to 0")
    return _powlog_antiderivative(alpha, k, b) - _powlog_antiderivative(alpha, k, a)


class PowerLogSum:
    """A finite sum  sum_i c_i * r**alpha_i * log(r)**k_i  with exact algebra.

    Terms are keyed by (alpha rounded to 12 decimals, k); multiplication is a
    convolution of keys, integration defers to :func:`power_log_integral`.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[float, int], float] | None = None):
        self.terms: Dict[Tuple[float, int], float] = dict(terms or {})

    @staticmethod
    def _key(alpha: float, k: int) -> Tuple[float, int]:
        return (round(float(alpha), _KEY_DECIMALS), int(k))

    @classmethod
    def term(cls, coef: float, alpha: float = 0.0, k: int = 0) -> "PowerLogSum":
        if coef == 0.0:
            return cls()
        return cls({cls._key(alpha, k): float(coef)})

    def add_term(self, coef: float, alpha: float = 0.0, k: int = 0) -> None:
        if coef == 0.0:
            return
        key = self._key(alpha, k)
        self.terms[key] = self.terms.get(key, 0.0) + float(coef)

    def __add__(self, other: "PowerLogSum") -> "PowerLogSum":
        out = PowerLogSum(self.terms)
        for (alpha, k), c in other.terms.items():
            out.add_term(c, alpha, k)
        return out

    def __mul__(self, other: "PowerLogSum") -> "PowerLogSum":
        out = PowerLogSum()
        for (a1, k1), c1 in self.terms.items():
            for (a2, k2), c2 in other.terms.items():
                out.add_term(c1 * c2, a1 + a2, k1 + k2)
        return out

    def scale(self, factor: float) -> "PowerLogSum":
        return PowerLogSum({key: c * factor for key, c in self.terms.items()})

    def shift_power(self, delta_alpha: float) -> "PowerLogSum":
        return PowerLogSum({self._key(a + delta_alpha, k): c for (a, k), c in self.terms.items()})

    def int_pow(self, exponent: int) -> "PowerLogSum":
        if exponent < 0:
            raise DomainError("only non-negative integer powers are exact")
        out = PowerLogSum.term(1.0)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __call__(self, r: float) -> float:
        acc = 0.0
        lg = math.log(r) if r > 0.0 else None
        for (alpha, k), c in self.terms.items():
            if r == 0.0:
                if alpha > 0.0 or (alpha == 0.0 and k == 0):
                    acc += c if alpha == 0.0 else 0.0
                continue
            val = c * r**alpha
            if k:
                val *= lg**k
            acc += val
        return acc

    def integral(self, a: float, b: float) -> float:
        return sum(c * power_log_integral(alpha, k, a, b) for (alpha, k), c in self.terms.items())


def gauss_legendre_integral(f, a: float, b: float, n: int = 80) -> float:
    """Fixed-order Gauss-Legendre quadrature on [a, b] (smooth integrands)."""
    nodes, weights = _leggauss_cached(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.sum(weights * np.asarray([f(mid + half * x) for x in nodes])))


_LEGGAUSS_CACHE: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}


def _leggauss_cached(n: int) -> Tuple[np.ndarray, np.ndarray]:
    if n not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEGGAUSS_CACHE[n]


def weak_sup_by_scan(
    mu, t_max: float, p: float, samples: int = 4096, refine: int = 80
) -> float:
    """sup over t > 0 of t**p * mu(t): dense scan plus golden-section refinement.

    Used for continuous level curves where the supremum has no closed form;
    the result is accurate to roughly 1e-10 relative for smooth curves.
    """
    if t_max <= 0.0:
        return 0.0
    ts = np.linspace(0.0, t_max, samples)
    vals = np.array([t**p * mu(t) for t in ts])
    j = int(np.argmax(vals))
    a = ts[max(j - 1, 0)]
    b = ts[min(j + 1, samples - 1)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(refine):
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        if c**p * mu(c) < d**p * mu(d):
            a = c
        else:
            b = d
    t_best = 0.5 * (a + b)
    return max(float(vals[j]), t_best**p * mu(t_best))


@dataclass(frozen=True)
class PolyPiece:
    lo: float
    hi: float
    coeffs: Tuple[float, ...]  # ascending powers

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def integral(self, a: float, b: float) -> float:
        acc = 0.0
        for i, c in enumerate(self.coeffs):
            acc += c * (b ** (i + 1) - a ** (i + 1)) / (i + 1)
        return acc


class PiecewisePoly1D:
    """Piecewise polynomial on contiguous intervals, with exact integrals."""

    def __init__(self, pieces: Sequence[PolyPiece]):
        pieces = sorted(pieces, key=lambda p: p.lo)
        for left, right in zip(pieces, pieces[1:]):
            if abs(left.hi - right.lo) > 1e-12 * max(1.0, abs(left.hi)):
                raise DomainError("pieces must tile a contiguous interval")
        self.pieces: List[PolyPiece] = list(pieces)
        self.lo = pieces[0].lo
        self.hi = pieces[-1].hi

    def __call__(self, x: float) -> float:
        if x < self.lo - 1e-12 or x > self.hi + 1e-12:
            raise DomainError(f"{x} outside [{self.lo}, {self.hi}]")
        for piece in self.pieces:
            if x <= piece.hi or piece is self.pieces[-1]:
                return piece(x)
        raise AssertionError

    def shift(self, constant: float) -> "PiecewisePoly1D":
        return PiecewisePoly1D(
            [
                PolyPiece(p.lo, p.hi, (p.coeffs[0] + constant,) + p.coeffs[1:])
                for p in self.pieces
            ]
        )

    def power(self, k: int) -> "PiecewisePoly1D":
        out = []
        for p in self.pieces:
            poly = np.polynomial.Polynomial(p.coeffs) ** k
            out.append(PolyPiece(p.lo, p.hi, tuple(poly.coef)))
        return PiecewisePoly1D(out)

    def integral(self) -> float:
        return sum(p.integral(p.lo, p.hi) for p in self.pieces)

    def abs_integral(self) -> float:
        """Exact integral of the absolute value (splits pieces at real roots)."""
        total = 0.0
        for p in self.pieces:
            poly = np.polynomial.Polynomial(p.coeffs)
            cuts = [p.lo, p.hi]
            if len(p.coeffs) > 1:
                for root in poly.roots():
                    if abs(root.imag) < 1e-12 and p.lo < root.real < p.hi:
                        cuts.append(float(root.real))
            cuts = sorted(set(cuts))
            for a, b in zip(cuts, cuts[1:]):
                seg = p.integral(a, b)
                mid_val = p(0.5 * (a + b))
                total += seg if mid_val >= 0.0 else -seg
        return total
