"""Zero locations and Riemann-hypothesis verdicts for rational L-functions in u = q^-s."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import poly as P
from .lfunctions import EVEN, ODD, CohomDatum, ConstantFamily, ExplicitLocal
from .zeta_recover import RationalFunctionT


def strip_parameters(parity: str | int) -> tuple[float, float, float]:
    """(strip_lo, strip_hi, line); an integer selects the classical weight-w strip."""
    if parity == EVEN:
        return 0.0, 1.0, 0.5
    if parity == ODD:
        return 0.5, 1.5, 1.0
    if isinstance(parity, int) and not isinstance(parity, bool) and parity >= 0:
        w = parity
        return w / 2, w / 2 + 1, (w + 1) / 2
    raise ValueError(f"unknown parity {parity!r}")


@dataclass
class RHVerdict:
    parity: str | int
    strip: tuple[float, float]
    line: float
    zeros: list[tuple[float, float]]
    in_strip: list[bool]
    on_line: list[bool]
    tol: float
    overall: str
    poles: list[tuple[float, float]] = field(default_factory=list)
    period: float = math.inf
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.overall != "fail"

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "strip": list(self.strip),
            "line": self.line,
            "period": self.period,
            "zeros": [{"re": re, "im": im, "in_strip": a, "on_line": b}
                      for (re, im), a, b in zip(self.zeros, self.in_strip, self.on_line)],
            "poles": [{"re": re, "im": im} for re, im in self.poles],
            "verdict": self.overall,
            "tol": self.tol,
            "note": self.note,
        }


def _s_of_u(u0: complex, q: int) -> tuple[float, float]:
    logq = math.log(q)
    period = 2 * math.pi / logq
    re = -math.log(abs(u0)) / logq
    im = (-cmath.phase(u0) / logq) % period
    if period - im < 1e-12 * period:
        im = 0.0
    return re, im


def zeros_from_rational(L: RationalFunctionT, q: int, parity: str | int, tol: float = 1e-9) -> RHVerdict:
    """Zeros (numerator roots) of L(q^-s) in one fundamental strip, with a verdict.

    A zero counts as in the strip when strip_lo < Re(s) < strip_hi and as on
    the line when |Re(s) - line| <= tol. No zero in the strip gives a vacuous pass.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    if not P.trim(L.num):
        raise ValueError("zero numerator has no zero set")
    lo, hi, line = strip_parameters(parity)
    zeros = [_s_of_u(u, q) for u in P.roots(L.num)]
    zeros.sort()
    poles = sorted(_s_of_u(u, q) for u in P.roots(L.den))
    in_strip = [lo < re < hi for re, _ in zeros]
    on_line = [inside and abs(re - line) <= tol for (re, _), inside in zip(zeros, in_strip)]
    if not any(in_strip):
        overall = "vacuous"
    elif all(o for o, i in zip(on_line, in_strip) if i):
        overall = "pass"
    else:
        overall = "fail"
    outside = sum(1 for i in in_strip if not i)
    note = f"{outside} zero(s) outside the strip" if outside else ""
    return RHVerdict(parity, (lo, hi), line, zeros, in_strip, on_line, tol, overall, poles,
                     2 * math.pi / math.log(q), note)


def shift_rational(L: RationalFunctionT, q: int, c: int) -> RationalFunctionT:
    """L(s + c) for integer c, i.e. u -> q^-c u."""
    f = Fraction(1, q**c) if c >= 0 else Fraction(q ** (-c))
    return RationalFunctionT(tuple(P.scale_variable(list(L.num), f)), tuple(P.scale_variable(list(L.den), f)))


@dataclass
class EigenvalueVerdict:
    parity: str
    overall: str
    max_deviation: float
    tol: float
    eigenvalues: list[complex]

    @property
    def passed(self) -> bool:
        return self.overall == "pass"

    def to_json(self) -> dict:
        return {"parity": self.parity, "verdict": self.overall, "max_deviation": self.max_deviation,
                "tol": self.tol, "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues]}


def eigenvalue_rh(datum: CohomDatum, tol: float = 1e-9) -> EigenvalueVerdict:
    """|lambda| = 1 (even) or sqrt(q) (odd) for every constant-family eigenvalue."""
    if not datum.is_function_field:
        raise ValueError("eigenvalue verdicts need a constant family over F_q(t)")
    target = 1.0 if datum.parity == EVEN else math.sqrt(datum.q)
    eig: list[complex] = []
    for src in datum.sources:
        if isinstance(src, ExplicitLocal) or not isinstance(src, ConstantFamily):
            raise ValueError("eigenvalue verdicts need constant-family sources only")
        eig.extend(src.eigenvalues)
    worst = max((abs(abs(z) - target) / target for z in eig), default=0.0)
    return EigenvalueVerdict(datum.parity, "pass" if worst <= tol else "fail", worst, tol, eig)
