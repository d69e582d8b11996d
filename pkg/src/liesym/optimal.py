"""One-dimensional optimal systems for the 3-dimensional Heisenberg pattern.

The only algebra handled is ``[v2, v3] = kappa*v1`` (kappa != 0) with every
other bracket zero.  Its adjoint orbits on lines are

* ``v3 + alpha*v2`` for every rational ``alpha`` (when the v3 component is nonzero),
* ``v2`` (v3 component zero, v2 component nonzero),
* ``v1`` (only the central direction left).

``alpha`` is a genuine orbit invariant: no adjoint map touches the v2 or v3
components, so the finer family is kept and ``coarse`` only collapses it to
its sign for display.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import LieAlgebra, adjoint, format_combination
from .linalg import matvec


class UnsupportedAlgebra(ValueError):
    pass


@dataclass(frozen=True)
class OrbitWitness:
    """Adjoint steps ``(i, eps)`` applied in order, then an overall scaling."""

    steps: tuple
    scale: Fraction

    def replay(self, L: LieAlgebra, vec: Sequence) -> list[Fraction]:
        out = [Fraction(c) for c in vec]
        for i, eps in self.steps:
            out = matvec(adjoint(L, i, eps).at(eps), out)
        return [self.scale * c for c in out]

    def to_dict(self) -> dict:
        return {"steps": [[f"v{i + 1}", str(e)] for i, e in self.steps], "scale": str(self.scale)}


def heisenberg_constant(L: LieAlgebra) -> Fraction:
    """``kappa`` with ``[v2, v3] = kappa*v1``; raises if the pattern does not match."""
    if L.dim != 3:
        raise UnsupportedAlgebra("only 3-dimensional algebras are supported")
    c = L.structure
    for i in range(3):
        for j in range(3):
            expected = [Fraction(0)] * 3
            if (i, j) == (1, 2):
                continue
            if (i, j) == (2, 1):
                continue
            if list(c[i][j]) != expected:
                raise UnsupportedAlgebra("bracket structure does not match [v2, v3] = kappa*v1")
    kappa = c[1][2][0]
    if kappa == 0 or c[1][2][1] or c[1][2][2]:
        raise UnsupportedAlgebra("bracket structure does not match [v2, v3] = kappa*v1")
    return kappa


def normalize_1d(L: LieAlgebra, V: Sequence) -> tuple[list[Fraction], OrbitWitness]:
    """Canonical representative of the line through ``V`` and a witness for it."""
    kappa = heisenberg_constant(L)
    a1, a2, a3 = (Fraction(c) for c in V)
    if a1 == a2 == a3 == 0:
        raise ValueError("zero vector spans no subalgebra")
    if a3 != 0:
        # Ad(exp(eps v2)) v3 = v3 - eps*kappa*v1
        eps = a1 / (kappa * a3)
        steps = ((1, eps),) if eps else ()
        witness = OrbitWitness(steps, 1 / a3)
    elif a2 != 0:
        # Ad(exp(eps v3)) v2 = v2 + eps*kappa*v1
        eps = -a1 / (kappa * a2)
        steps = ((2, eps),) if eps else ()
        witness = OrbitWitness(steps, 1 / a2)
    else:
        witness = OrbitWitness((), 1 / a1)
    rep = witness.replay(L, (a1, a2, a3))
    return rep, witness


def coarse(rep: Sequence) -> list[Fraction]:
    """Collapse ``v3 + alpha*v2`` to ``v3 + sign(alpha)*v2``."""
    a1, a2, a3 = rep
    if a3 == 1 and a2:
        return [a1, Fraction(1 if a2 > 0 else -1), a3]
    return list(rep)


def equivalent_1d(L: LieAlgebra, V: Sequence, W: Sequence):
    """``(True, witness)`` mapping V's line onto W's, else ``(False, None)``."""
    rv, wv = normalize_1d(L, V)
    rw, ww = normalize_1d(L, W)
    if rv != rw:
        return False, None
    # V -> rep, then rep -> W by inverting W's witness
    inverse_steps = tuple((i, -e) for i, e in reversed(ww.steps))
    steps = wv.steps + inverse_steps
    combined = OrbitWitness(steps, wv.scale / ww.scale)
    return True, combined


@dataclass(frozen=True)
class Family:
    """Representatives ``base + alpha*direction`` for every rational alpha."""

    base: tuple
    direction: tuple
    label: str = ""

    def member(self, alpha) -> list[Fraction]:
        alpha = Fraction(alpha)
        return [Fraction(b) + alpha * Fraction(d) for b, d in zip(self.base, self.direction)]

    def contains(self, rep: Sequence) -> bool:
        diff = [Fraction(r) - Fraction(b) for r, b in zip(rep, self.base)]
        k = next((n for n, d in enumerate(self.direction) if d != 0), None)
        if k is None:
            return all(x == 0 for x in diff)
        alpha = diff[k] / Fraction(self.direction[k])
        return diff == [alpha * Fraction(d) for d in self.direction]


@dataclass
class OptimalReport:
    samples: int
    duplicates: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    witness_failures: int = 0
    strata: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.duplicates and not self.uncovered and not self.witness_failures

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "duplicates": self.duplicates,
            "uncovered": self.uncovered,
            "warnings": self.warnings,
            "witness_failures": self.witness_failures,
            "strata": self.strata,
        }


def _random_rational(rng: random.Random, nonzero: bool) -> Fraction:
    while True:
        q = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        if q or not nonzero:
            return q


def sample_vectors(count: int, seed: int = 42) -> list[list[Fraction]]:
    """Random nonzero vectors drawn evenly from the three orbit-type strata."""
    rng = random.Random(seed)
    out = []
    for n in range(count):
        stratum = n % 3
        a1 = _random_rational(rng, nonzero=stratum == 2)
        a2 = _random_rational(rng, nonzero=stratum == 1)
        a3 = _random_rational(rng, nonzero=True) if stratum == 0 else Fraction(0)
        if stratum == 2:
            a2 = Fraction(0)
        out.append([a1, a2, a3])
    rng.shuffle(out)
    return out


def _is_canonical(L: LieAlgebra, rep: Sequence) -> bool:
    return normalize_1d(L, rep)[0] == [Fraction(c) for c in rep]


def verify_optimal_system(L: LieAlgebra, reps: Sequence, samples: int = 200, seed: int = 42) -> OptimalReport:
    """Check a proposed list of fixed vectors and ``Family`` entries.

    Fixed vectors are compared pairwise after normalization; families must
    consist of canonical forms.  Coverage is tested on seeded random vectors
    and every canonical form not matched by any entry is reported once.
    """
    if not reps:
        raise ValueError("empty list of representatives")
    fixed, families = [], []
    for r in reps:
        if isinstance(r, Family):
            for alpha in (0, 1, Fraction(-3, 2)):
                if not _is_canonical(L, r.member(alpha)):
                    raise ValueError(f"family {r.label or r.base} is not made of canonical forms")
            families.append(r)
        else:
            fixed.append([Fraction(c) for c in r])

    report = OptimalReport(samples=samples)
    canon_fixed = [normalize_1d(L, v)[0] for v in fixed]
    for a in range(len(fixed)):
        for b in range(a + 1, len(fixed)):
            if canon_fixed[a] == canon_fixed[b]:
                report.duplicates.append([format_combination(fixed[a], L.names), format_combination(fixed[b], L.names)])
        for fam in families:
            if fam.contains(canon_fixed[a]):
                report.duplicates.append([format_combination(fixed[a], L.names), fam.label or "family"])

    uncovered: dict = {}
    for vec in sample_vectors(samples, seed):
        rep, witness = normalize_1d(L, vec)
        if witness.replay(L, vec) != rep:
            report.witness_failures += 1
        kind = "v3+alpha*v2" if rep[2] else ("v2" if rep[1] else "v1")
        report.strata[kind] = report.strata.get(kind, 0) + 1
        covered = rep in canon_fixed or any(f.contains(rep) for f in families)
        if not covered:
            label = kind if kind != "v3+alpha*v2" else format_combination(rep, L.names)
            uncovered[label] = uncovered.get(label, 0) + 1
    for label, count in sorted(uncovered.items()):
        report.uncovered.append(label)
        report.warnings.append(f"orbit of {label} is not represented in the list ({count} samples)")
    for a, b in report.duplicates:
        report.warnings.append(f"{a} and {b} are adjoint-equivalent")
    return report
