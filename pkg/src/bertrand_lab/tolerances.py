"""Numerical thresholds that turn exact geometric conditions into decisions."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    reg: float = 1e-9  # |gamma'| <= reg * scale means singular
    deg: float = 1e-9  # |gamma' x gamma''| <= deg * scale^2 means degenerate
    zero: float = 1e-7  # max|f| < zero * scale means f vanishes identically
    fit: float = 1e-6  # least-squares residual budget, times sqrt(n)
    line: float = 1e-5  # line coincidence of mates
    nonzero: float = 1e-9  # max|lambda| > nonzero * scale means lambda is not identically 0
    frame: float = 1e-5  # gamma'.nu_i orthogonality, relative to scale
    unit: float = 1e-12  # Delta membership

    def scaled(self, factor: float) -> "Tolerances":
        """All thresholds multiplied by ``factor`` (``unit`` excepted)."""
        if not factor > 0:
            raise ValueError("tolerance scale must be positive")
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self) if f.name != "unit"})


DEFAULT = Tolerances()
