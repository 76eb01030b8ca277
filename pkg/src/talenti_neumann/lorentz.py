"""Lorentz quasi-norms computed from distribution curves.

For finite q,

    ||g||_{p,q} = p**(1/q) * ( integral of t**(q-1) |{|g|>t}|**(q/p) dt )**(1/q),

and for q = infinity the value is ``sup_t t**p |{|g|>t}|`` -- deliberately
*without* the 1/p-th root, matching the definition this package verifies as
printed.  The q = infinity value is therefore homogeneous of degree p under
scaling of g, not degree 1; callers wanting the conventional weak norm should
raise the result to 1/p themselves.

Any curve object exposing ``lorentz_t_integral(p, q)`` (and ``weak_sup(p)``
for q = infinity) can be measured: exact plateau integration for step curves,
exact radial-segment integration for symmetrized solutions, adaptive
quadrature for closed-form level curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class LorentzIndex:
    """Exponent pair (p, q); q may be ``math.inf``."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0.0) or not math.isfinite(self.p):
            raise DomainError("p must be finite and positive")
        if not (self.q > 0.0):
            raise DomainError("q must be positive (or infinity)")


def lorentz_norm(d, idx: LorentzIndex) -> float:
    """Lorentz quasi-norm of the function behind the distribution curve ``d``."""
    if not isinstance(idx, LorentzIndex):
        idx = LorentzIndex(*idx)
    if math.isinf(idx.q):
        return float(d.weak_sup(idx.p))
    integral = d.lorentz_t_integral(idx.p, idx.q)
    if integral == 0.0:
        return 0.0
    return float(idx.p ** (1.0 / idx.q) * integral ** (1.0 / idx.q))


def lp_norm(d, p: float) -> float:
    """L^p norm via the layer-cake identity; equals ``lorentz_norm(d, (p, p))``."""
    return lorentz_norm(d, LorentzIndex(p, p))
