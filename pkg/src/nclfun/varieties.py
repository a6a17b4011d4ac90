"""Variety spec files and the counts -> zeta -> weight blocks pipeline.

Spec JSON (one of):
  {"kind": "hypersurface", "q": 5, "n": 2, "equation": "y^2*z - x^3 - x*z^2 - z^3"}
  {"kind": "weierstrass", "q": 5, "a": [a1, a2, a3, a4, a6]}
  {"kind": "projective_space", "q": 2, "n": 1}
Optional keys: "betti" (list, weights 0..2dim), "B" (number of counts).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .counting import (
    DEFAULT_BUDGET,
    CountCache,
    CountVector,
    HypersurfaceSpec,
    count_projective_space,
    fermat,
    hypersurface_counts,
    smoothness_probe,
    weierstrass_counts,
)
from .field_arith import field_of_order
from .zeta_recover import (
    RationalFunctionT,
    WeightBlock,
    hypersurface_betti,
    rational_reconstruct,
    reconstruct_zeta,
    weight_split,
    zeta_from_counts,
)


@dataclass(frozen=True)
class VarietySpec:
    kind: str
    q: int
    data: tuple  # kind-specific payload, hashable
    betti: tuple[int, ...] | None = None

    @classmethod
    def from_json(cls, raw: dict) -> "VarietySpec":
        try:
            kind = raw["kind"]
            q = int(raw["q"])
            field_of_order(q)
            betti = tuple(int(b) for b in raw["betti"]) if "betti" in raw else None
            if kind == "hypersurface":
                spec = HypersurfaceSpec.parse(field_of_order(q), int(raw["n"]), raw["equation"])
                return cls(kind, q, (spec,), betti)
            if kind == "weierstrass":
                a = tuple(int(c) for c in raw["a"])
                if len(a) != 5:
                    raise ValueError("weierstrass needs five coefficients a1, a2, a3, a4, a6")
                return cls(kind, q, a, betti or (1, 2, 1))
            if kind == "projective_space":
                n = int(raw["n"])
                return cls(kind, q, (n,), betti or tuple(1 if w % 2 == 0 else 0 for w in range(2 * n + 1)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed variety spec: missing or bad field {exc}") from exc
        raise ValueError(f"unknown variety kind {kind!r}")

    @classmethod
    def load(cls, path: str | Path) -> "VarietySpec":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json(raw)

    @classmethod
    def fermat(cls, q: int, n: int, d: int) -> "VarietySpec":
        return cls("hypersurface", q, (fermat(field_of_order(q), n, d),))

    def canonical(self) -> dict:
        if self.kind == "hypersurface":
            return self.data[0].canonical()
        F = field_of_order(self.q)
        base = {"kind": self.kind, "p": F.p, "e": F.e}
        if self.kind == "weierstrass":
            base["a"] = list(self.data)
        else:
            base["n"] = self.data[0]
        return base

    def counts(self, B: int, budget: int = DEFAULT_BUDGET, cache: CountCache | None = None,
               workers: int = 1) -> CountVector:
        if cache is not None:
            hit = cache.get(self.canonical(), B)
            if hit is not None:
                return hit
        F = field_of_order(self.q)
        if self.kind == "hypersurface":
            vec = hypersurface_counts(self.data[0], B, budget, workers)
        elif self.kind == "weierstrass":
            vec = weierstrass_counts(self.data, F, B, budget)
        else:
            vec = CountVector(self.q, tuple(count_projective_space(self.q, self.data[0], m) for m in range(1, B + 1)))
        if cache is not None:
            cache.put(self.canonical(), vec)
        return vec

    def resolved_betti(self, budget: int = DEFAULT_BUDGET) -> tuple[int, ...] | None:
        """Declared Betti numbers, or those of a smooth hypersurface, else None."""
        if self.betti is not None:
            return self.betti
        if self.kind == "hypersurface":
            spec = self.data[0]
            if smoothness_probe(spec, 1, budget):
                return tuple(hypersurface_betti(spec.n, spec.degree))
        return None

    def counts_needed(self, betti: Sequence[int] | None, max_total_degree: int = 6) -> int:
        if betti is None:
            return 2 * max_total_degree + 1
        return max(sum(betti) - 2, 1)


@dataclass
class ZetaReport:
    counts: CountVector
    zeta: RationalFunctionT
    blocks: list[WeightBlock]
    betti: tuple[int, ...] | None


def zeta_pipeline(spec: VarietySpec, B: int | None = None, budget: int = DEFAULT_BUDGET,
                  cache: CountCache | None = None, tol: float = 1e-6, workers: int = 1,
                  max_total_degree: int = 6) -> ZetaReport:
    """Counts, reconstructed Z(T) and weight blocks for a variety spec."""
    betti = spec.resolved_betti(budget)
    need = spec.counts_needed(betti, max_total_degree)
    B = max(B or 0, need)
    counts = spec.counts(B, budget, cache, workers)
    if betti is not None:
        z = reconstruct_zeta(counts.counts, spec.q, betti)
    else:
        z = rational_reconstruct(zeta_from_counts(counts.counts), (B - 1) // 2)
    # round trip against every available count
    if zeta_from_counts(counts.counts).coeffs != z.series(counts.B).coeffs:
        raise ValueError("reconstructed zeta function does not reproduce the counts")
    return ZetaReport(counts, z, weight_split(z, spec.q, tol), betti)
