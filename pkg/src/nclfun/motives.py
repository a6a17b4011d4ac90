"""Noncommutative motives as direct sums of parity-graded atoms.

Only the L-function data is modeled: a motive is a pair of CohomDatum
(even, odd) over a common base, plus a record of how it was built.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import poly as P
from .field_arith import Place
from .lfunctions import (
    EVEN,
    ODD,
    ArtinAtom,
    CohomDatum,
    ConstantFamily,
    ExcludedPlace,
    ExplicitLocal,
    local_factor,
    num_from_json,
    places_in,
    tate_twist_assemble,
    zeta_source,
)
from .ntheory import divisors
from .zeta_recover import WeightBlock

IDENTITY_TOL = 1e-9


class BaseMismatch(ValueError):
    pass


class CannotSplit(ValueError):
    """Not enough unit eigenvalues to split off the requested zeta factors."""


class ExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class NCMotive:
    q: int | None
    even: CohomDatum
    odd: CohomDatum
    provenance: tuple = ()

    def __post_init__(self):
        if self.even.q != self.q or self.odd.q != self.q:
            raise BaseMismatch("even and odd data must share the motive's base")
        if self.even.parity != EVEN or self.odd.parity != ODD:
            raise ValueError("even/odd data have the wrong parity labels")

    @classmethod
    def empty(cls, q: int | None) -> "NCMotive":
        return cls(q, CohomDatum(EVEN, q), CohomDatum(ODD, q), ("empty",))

    @property
    def base_name(self) -> str:
        return self.even.base_name

    def datum(self, parity: str) -> CohomDatum:
        return self.even if parity == EVEN else self.odd

    def local(self, parity: str, place: Place) -> list:
        return local_factor(self.datum(parity), place)

    def to_json(self) -> dict:
        return {"q": self.q, "even": self.even.to_json(), "odd": self.odd.to_json(),
                "provenance": list(self.provenance)}

    @classmethod
    def from_json(cls, data: dict) -> "NCMotive":
        if "even" in data:
            q = data.get("q")
            return cls(q, CohomDatum.from_json(data["even"]), CohomDatum.from_json(data["odd"]),
                       _tuplify(data.get("provenance", ())))
        return motive_from_spec(data)


def _tuplify(x):
    return tuple(_tuplify(v) for v in x) if isinstance(x, list | tuple) else x


def _check_base(m1: NCMotive, m2: NCMotive) -> None:
    if m1.q != m2.q:
        raise BaseMismatch(f"cannot combine motives over {m1.base_name} and {m2.base_name}")


def _union(d1: CohomDatum, d2: CohomDatum) -> CohomDatum:
    return CohomDatum(d1.parity, d1.q, d1.sources + d2.sources, d1.excluded_places | d2.excluded_places)


def direct_sum(m1: NCMotive, m2: NCMotive) -> NCMotive:
    """Atom union; every local factor of the sum is the product of the summands' factors."""
    _check_base(m1, m2)
    return NCMotive(m1.q, _union(m1.even, m2.even), _union(m1.odd, m2.odd), ("sum", m1.provenance, m2.provenance))


def gluing(mX: NCMotive, mY: NCMotive) -> NCMotive:
    """Gluing along a bimodule; the bimodule does not change the L-functions."""
    _check_base(mX, mY)
    return NCMotive(mX.q, _union(mX.even, mY.even), _union(mX.odd, mY.odd), ("glue", mX.provenance, mY.provenance))


def zeta_motive(q: int | None, copies: int = 1) -> NCMotive:
    if copies < 0:
        raise ValueError("copies must be >= 0")
    even = CohomDatum(EVEN, q, tuple(zeta_source(q, f"zeta{i}") for i in range(copies)))
    return NCMotive(q, even, CohomDatum(ODD, q), ("zeta", copies))


def variety_motive(blocks: Sequence[WeightBlock], q: int, name: str = "variety") -> NCMotive:
    even, odd = tate_twist_assemble(blocks, q)
    return NCMotive(q, even, odd, (name,))


def path_algebra_atom(vertices: int, q: int | None = None) -> NCMotive:
    """Acyclic quiver with ``vertices`` vertices: semisimple quotient k^vertices."""
    if vertices < 1:
        raise ValueError("a quiver needs at least one vertex")
    m = zeta_motive(q, vertices)
    return NCMotive(q, m.even, m.odd, ("path", vertices))


def group_algebra_atom(n: int) -> NCMotive:
    """Q[Z/n] = prod over d | n of Q(zeta_d)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    even = CohomDatum(EVEN, None, tuple(ArtinAtom(d, f"Q(zeta_{d})") for d in divisors(n)))
    return NCMotive(None, even, CohomDatum(ODD, None), ("group", n))


# --- CY summand --------------------------------------------------------------------------


def _is_zeta_source(src) -> bool:
    if isinstance(src, ConstantFamily):
        return src.beta == 1 and abs(complex(src.charpoly[1]) + 1) <= IDENTITY_TOL
    return isinstance(src, ArtinAtom) and src.d == 1


def _divide_unit(cp: tuple) -> tuple | None:
    """cp / (1 - x) if 1 is a reciprocal root (exactly, or within tolerance for floats)."""
    quo, rem = P.divmod_poly(list(cp), [1, -1])
    if not rem:
        return tuple(quo)
    if not P.exact(cp) and max(abs(complex(c)) for c in rem) <= IDENTITY_TOL:
        return tuple(quo)
    return None


def split_zeta(datum: CohomDatum, k: int) -> CohomDatum:
    """Remove k unit eigenvalues: whole zeta-like sources first, then factors 1 - x."""
    sources = list(datum.sources)
    order = sorted(range(len(sources)), key=lambda i: (sources[i].label, i))
    remaining = k
    drop = set()
    for i in order:
        if remaining and _is_zeta_source(sources[i]):
            drop.add(i)
            remaining -= 1
    kept = [s for i, s in enumerate(sources) if i not in drop]
    for pos in sorted(range(len(kept)), key=lambda i: (kept[i].label, i)):
        src = kept[pos]
        while remaining and isinstance(src, ConstantFamily) and src.beta:
            quo = _divide_unit(src.charpoly)
            if quo is None:
                break
            src = ConstantFamily(src.q, quo, src.mu, src.label)
            remaining -= 1
        kept[pos] = src
    if remaining:
        raise CannotSplit(f"only {k - remaining} unit eigenvalue(s) available, need {k}")
    kept = [s for s in kept if not (isinstance(s, ConstantFamily) and s.beta == 0)]
    return datum.with_sources(kept)


def cy_summand(mX: NCMotive, n: int, deg: int, check_degree: int = 3) -> NCMotive:
    """The Calabi-Yau-type summand of a degree-deg hypersurface in P^n.

    Removes n - deg + 1 zeta factors from the even part and checks
    L_even(mX) = L_even(result) * zeta^(n-deg+1) at every place of degree
    <= check_degree.
    """
    if deg < 1 or deg > n + 1:
        raise ValueError("need 1 <= deg <= n + 1")
    k = n - deg + 1
    even = split_zeta(mX.even, k) if k else mX.even
    out = NCMotive(mX.q, even, mX.odd, ("cy", n, deg, mX.provenance))
    zeta_k = P.power([1, -1], k)
    for pl in places_in(mX.q, 0, check_degree):
        if mX.even.is_excluded(pl):
            continue
        lhs = local_factor(mX.even, pl)
        rhs = P.mul(local_factor(out.even, pl), zeta_k)
        if _residual(lhs, rhs) > IDENTITY_TOL:
            raise CannotSplit(f"split does not factor at {pl}")  # pragma: no cover
    return out


def _residual(a: Sequence, b: Sequence) -> float:
    d = P.sub(list(a), list(b))
    return max((abs(complex(c)) for c in d), default=0.0)


# --- HPD ----------------------------------------------------------------------------------


@dataclass
class IdentityReport:
    passed: bool
    max_residual: float
    places_checked: int
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail", "max_residual": self.max_residual,
                "places_checked": self.places_checked, "failures": self.failures}


def compare_local(pairs: Iterable[tuple[str, Sequence, Sequence]], place: Place, tol: float,
                  report: IdentityReport) -> None:
    for parity, lhs, rhs in pairs:
        r = _residual(lhs, rhs)
        report.max_residual = max(report.max_residual, r)
        if r > tol:
            report.passed = False
            report.failures.append({"place": place.to_text(), "parity": parity, "residual": r})


def hpd_check(mXL: NCMotive, mYL: NCMotive, a: int, b: int, B: int, tol: float = IDENTITY_TOL) -> IdentityReport:
    """L_even(X_L) zeta^b = zeta^a L_even(Y_L) and L_odd(X_L) = L_odd(Y_L) at places up to B."""
    _check_base(mXL, mYL)
    za, zb = P.power([1, -1], a), P.power([1, -1], b)
    report = IdentityReport(True, 0.0, 0)
    for pl in places_in(mXL.q, 0, B):
        try:
            pairs = [
                (EVEN, P.mul(mXL.local(EVEN, pl), zb), P.mul(za, mYL.local(EVEN, pl))),
                (ODD, mXL.local(ODD, pl), mYL.local(ODD, pl)),
            ]
        except ExcludedPlace:
            continue
        report.places_checked += 1
        compare_local(pairs, pl, tol, report)
    return report


# --- spec files ---------------------------------------------------------------------------


def motive_from_spec(data: dict) -> NCMotive:
    """Motive/datum spec JSON: {q?, atoms: [...], excluded_places?: [...]}."""
    q = data.get("q")
    excluded = frozenset(data.get("excluded_places", ()))
    m = NCMotive.empty(q)
    for i, atom in enumerate(data.get("atoms", ())):
        if "constant_family" in atom:
            cf = atom["constant_family"]
            cq = int(cf.get("q", q))
            if q is not None and cq != q:
                raise BaseMismatch(f"atom {i} lives over F_{cq}, motive over F_{q}")
            blocks = [WeightBlock.from_charpoly(int(b["w"]), [Fraction(c) for c in b["charpoly"]])
                      for b in cf["blocks"]]
            part = variety_motive(blocks, cq, atom.get("label", f"atom{i}"))
        elif "explicit_local" in atom:
            el = atom["explicit_local"]
            parity = el.get("parity", EVEN)
            src = ExplicitLocal(tuple((t, tuple(num_from_json(c) for c in cs))
                                      for t, cs in zip(el["places"], el["polys"])), atom.get("label", f"atom{i}"))
            datum = CohomDatum(parity, q, (src,))
            part = NCMotive(q, datum if parity == EVEN else CohomDatum(EVEN, q),
                            datum if parity == ODD else CohomDatum(ODD, q), ("explicit",))
        elif "artin" in atom:
            art = atom["artin"]
            if art.get("kind", "cyclotomic") != "cyclotomic":
                raise ValueError("only cyclotomic Artin atoms are supported")
            part = NCMotive(None, CohomDatum(EVEN, None, (ArtinAtom(int(art["d"]), atom.get("label", f"atom{i}")),)),
                            CohomDatum(ODD, None), ("artin", int(art["d"])))
        else:
            raise ValueError(f"atom {i}: expected constant_family, explicit_local or artin")
        m = direct_sum(m, part)
    if excluded:
        m = NCMotive(q, CohomDatum(EVEN, q, m.even.sources, excluded),
                     CohomDatum(ODD, q, m.odd.sources, excluded), m.provenance)
    return m


def load_motive(path: str | Path) -> NCMotive:
    return NCMotive.from_json(json.loads(Path(path).read_text()))


# --- expression language ---------------------------------------------------------------------

_TOKEN = re.compile(r'\s*(?:(\()|(\))|"([^"]*)"|([^\s()"]+))')


def _tokenize(text: str) -> list:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            out.append("(")
        elif m.group(2):
            out.append(")")
        elif m.group(3) is not None:
            out.append(("str", m.group(3)))
        else:
            out.append(m.group(4))
    return out


def parse_expression(text: str):
    """Parse into nested lists; strings become ("str", value) tuples."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExpressionError("empty expression")

    def read(i):
        tok = tokens[i]
        if tok == "(":
            items, i = [], i + 1
            while i < len(tokens) and tokens[i] != ")":
                item, i = read(i)
                items.append(item)
            if i >= len(tokens):
                raise ExpressionError("missing ')'")
            return items, i + 1
        if tok == ")":
            raise ExpressionError("unexpected ')'")
        return tok, i + 1

    tree, end = read(0)
    if end != len(tokens):
        raise ExpressionError("trailing tokens after expression")
    return tree


def _int(tok, what: str) -> int:
    try:
        return int(tok)
    except (TypeError, ValueError):
        raise ExpressionError(f"{what} must be an integer, got {tok!r}") from None


def evaluate_expression(text: str, q: int | None, base_dir: str | Path = ".") -> NCMotive:
    """Evaluate a motive expression over F_q(t) (q given) or Q (q None).

    Grammar (prefix, parenthesized):
      (sum m1 m2 ...) | (glue m1 m2) | (cy m n deg) | (zeta k [copies])
      | (path n) | (group n) | (load "spec.json")
    """
    base_dir = Path(base_dir)

    def ev(node) -> NCMotive:
        if not isinstance(node, list) or not node:
            raise ExpressionError(f"expected a parenthesized form, got {node!r}")
        head, args = node[0], node[1:]
        if head == "sum":
            if len(args) < 2:
                raise ExpressionError("sum needs at least two operands")
            out = ev(args[0])
            for a in args[1:]:
                out = direct_sum(out, ev(a))
            return out
        if head == "glue":
            if len(args) != 2:
                raise ExpressionError("glue takes two operands")
            return gluing(ev(args[0]), ev(args[1]))
        if head == "cy":
            if len(args) != 3:
                raise ExpressionError("cy takes a motive, n and deg")
            return cy_summand(ev(args[0]), _int(args[1], "n"), _int(args[2], "deg"))
        if head == "zeta":
            if not args or args[0] != "k" or len(args) > 2:
                raise ExpressionError("zeta takes the base-field symbol k and an optional copy count")
            return zeta_motive(q, _int(args[1], "copies") if len(args) == 2 else 1)
        if head == "path":
            if len(args) != 1:
                raise ExpressionError("path takes a vertex count")
            return path_algebra_atom(_int(args[0], "vertices"), q)
        if head == "group":
            if len(args) != 1:
                raise ExpressionError("group takes n")
            if q is not None:
                raise ExpressionError("group algebras are supported over Q only")
            return group_algebra_atom(_int(args[0], "n"))
        if head == "load":
            if len(args) != 1 or not (isinstance(args[0], tuple) and args[0][0] == "str"):
                raise ExpressionError('load takes one quoted path')
            m = load_motive(base_dir / args[0][1])
            if m.q != q:
                raise BaseMismatch(f"loaded motive lives over {m.base_name}")
            return m
        raise ExpressionError(f"unknown form {head!r}")

    return ev(parse_expression(text))


def local_identity(m1: NCMotive, m2: NCMotive, B: int, tol: float = IDENTITY_TOL) -> IdentityReport:
    """L_even and L_odd of m1 and m2 agree place by place up to B."""
    _check_base(m1, m2)
    report = IdentityReport(True, 0.0, 0)
    for pl in places_in(m1.q, 0, B):
        try:
            pairs = [(par, m1.local(par, pl), m2.local(par, pl)) for par in (EVEN, ODD)]
        except ExcludedPlace:
            continue
        report.places_checked += 1
        compare_local(pairs, pl, tol, report)
    return report
