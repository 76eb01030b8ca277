"""Comparison reports and deterministic CSV export.

All CSV output uses fixed headers and ``%.17g`` formatting with no
timestamps, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np


@dataclass
class NormEntry:
    """One Lorentz-norm comparison ||u|| vs ||v||."""

    family: str  # "p,1" | "2p,2" | "p,p"
    p: float
    q: float
    lhs: float
    rhs: float
    tol: float
    guaranteed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tol

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class ConstantCheck:
    """Expected-vs-computed reference constant."""

    label: str
    expected: float
    computed: float
    rtol: float = 1e-9

    @property
    def rel_err(self) -> float:
        scale = max(abs(self.expected), abs(self.computed), 1e-300)
        return abs(self.expected - self.computed) / scale

    @property
    def passed(self) -> bool:
        return self.rel_err <= self.rtol

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class ComparisonReport:
    """Per-case verdicts: norm comparisons, pointwise check, identity
    residuals and reference-constant recovery."""

    case_id: str
    parameters: Dict[str, float]
    condition: Optional[str]
    pipeline: str
    entries: List[NormEntry] = field(default_factory=list)
    pointwise: Optional[Dict[str, float]] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    constants: List[ConstantCheck] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def guaranteed_passed(self) -> bool:
        ok = all(e.passed for e in self.entries if e.guaranteed)
        if self.pointwise is not None:
            ok = ok and self.pointwise["max_mu_minus_phi"] <= self.pointwise["tol"]
        return ok

    @property
    def constants_passed(self) -> bool:
        return all(c.passed for c in self.constants)

    @property
    def passed(self) -> bool:
        return self.guaranteed_passed and self.constants_passed

    def format_text(self) -> str:
        lines = []
        params = ", ".join(f"{k}={v:g}" for k, v in self.parameters.items())
        lines.append(f"case {self.case_id} ({params}) pipeline={self.pipeline}")
        if self.condition is not None:
            lines.append(f"  normalization: {self.condition}")
        if self.entries:
            lines.append("  norm comparisons (lhs=||u||, rhs=||v||):")
            lines.append(
                "    family      p        q        lhs            rhs            margin      verdict"
            )
            for e in self.entries:
                star = "" if e.guaranteed else " (not guaranteed)"
                lines.append(
                    f"    {e.family:<8} {e.p:<8.5g} {e.q:<8.5g} {e.lhs:<14.10g} "
                    f"{e.rhs:<14.10g} {e.margin:< 12.3e} {e.verdict}{star}"
                )
        if self.pointwise is not None:
            verdict = (
                "pass"
                if self.pointwise["max_mu_minus_phi"] <= self.pointwise["tol"]
                else "fail"
            )
            lines.append(
                f"  pointwise sup(mu - phi) = {self.pointwise['max_mu_minus_phi']:.3e} "
                f"(tol {self.pointwise['tol']:.1e}) {verdict}"
            )
        for key, value in self.residuals.items():
            lines.append(f"  residual {key}: {value:.3e}")
        if self.constants:
            lines.append("  reference constants:")
            for c in self.constants:
                lines.append(
                    f"    {c.label:<28} expected {c.expected:< .12g} "
                    f"computed {c.computed:< .12g} rel_err {c.rel_err:.2e} {c.verdict}"
                )
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append(f"  overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _write_csv(path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    columns = [np.asarray(col, dtype=float) for col in columns]
    length = len(columns[0])
    if any(len(col) != length for col in columns):
        raise ValueError("CSV columns must have equal length")
    with open(path, "w", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for i in range(length):
            handle.write(",".join(f"{col[i]:.17g}" for col in columns) + "\n")


def write_curves_csv(path, t, mu, phi) -> None:
    _write_csv(path, ("t", "mu", "phi"), (t, mu, phi))


def write_rearranged_csv(path, s, u_star, v_star) -> None:
    _write_csv(path, ("s", "u_star", "v_star"), (s, u_star, v_star))


def write_profile_csv(path, r, v, dv) -> None:
    _write_csv(path, ("r", "v", "dv"), (r, v, dv))


def write_distribution_csv(path, curve, points: int = 0) -> None:
    """Single-curve export with columns (t, measure).

    With ``points == 0`` the exact breakpoints are written; otherwise a
    uniform t-grid of that size.
    """
    if points:
        ts = np.linspace(0.0, curve.support_max, points)
    else:
        ts = np.asarray(curve.breakpoints, dtype=float)
    _write_csv(path, ("t", "measure"), (ts, np.asarray([curve(t) for t in ts])))
