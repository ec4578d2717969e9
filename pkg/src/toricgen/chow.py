"""Intersection numbers on smooth complete toric varieties, computed from the fan.

Every pairing is evaluated by torus localization: a sum over maximal cones
(the fixed points) of rational functions in the dual-basis characters, each
evaluated at an integer point drawn from a seeded generator. Two different
points must give the same integer, which makes accidental degeneracies
visible instead of silent.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import InvariantViolation, MalformedFanError, ParameterError, SizeError
from .fan import Cone, Fan

DEFAULT_SEEDS = (1, 2)
POINT_BOUND = 2**20
MAX_RESAMPLES = 32


def dual_basis(vectors: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Rows m_i with <m_i, w_j> = delta_ij for a unimodular basis w_1..w_n.

    Integer Gauss-Jordan using only unimodular row operations (Euclid steps),
    so nothing leaves Z; a pivot other than +-1 means the cone is not smooth.
    """
    n = len(vectors)
    # row i of [A | I], where the columns of A are the basis vectors
    a = [[vectors[j][i] for j in range(n)] + [int(i == k) for k in range(n)] for i in range(n)]
    for col in range(n):
        while True:
            rows = [r for r in range(col, n) if a[r][col] != 0]
            if not rows:
                raise MalformedFanError("cone rays are linearly dependent")
            piv = min(rows, key=lambda r: abs(a[r][col]))
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            done = True
            for r in range(col + 1, n):
                if a[r][col]:
                    q = a[r][col] // p
                    a[r] = [x - q * y for x, y in zip(a[r], a[col])]
                    if a[r][col]:
                        done = False
            if done:
                break
        if abs(a[col][col]) != 1:
            raise MalformedFanError("cone is not unimodular; dual basis is not integral")
        if a[col][col] == -1:
            a[col] = [-x for x in a[col]]
    for col in range(n - 1, -1, -1):
        for r in range(col):
            f = a[r][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [tuple(row[n:]) for row in a]


@lru_cache(maxsize=64)
def dual_bases(fan: Fan) -> tuple[tuple[tuple[int, ...], ...], ...]:
    out = []
    for cone in fan.max_cones:
        if len(cone) != fan.dim:
            raise MalformedFanError(f"maximal cone {cone} is not full-dimensional")
        out.append(tuple(dual_basis(fan.cone_rays(cone))))
    return tuple(out)


@dataclass(frozen=True)
class DivisorMonomial:
    """Product of toric divisor classes; ``exponents`` maps ray index -> multiplicity."""

    exponents: tuple[tuple[int, int], ...]

    def __init__(self, exponents: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = dict(exponents)
        for k, e in items.items():
            if e <= 0:
                raise ParameterError(f"exponent of ray {k} must be positive, got {e}")
        object.__setattr__(self, "exponents", tuple(sorted(items.items())))

    @classmethod
    def of(cls, *rays: int) -> "DivisorMonomial":
        """Monomial from a list of factors, repeats allowed: ``of(0, 0, 1)``."""
        counts: dict[int, int] = {}
        for r in rays:
            counts[r] = counts.get(r, 0) + 1
        return cls(counts)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exponents)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.exponents)


@dataclass(frozen=True)
class PairingResult:
    value: int
    evaluation_seed: int

    def __int__(self) -> int:
        return self.value


class Localization:
    """Per-fan, per-seed table of fixed-point weights.

    For each maximal cone with rays w_1..w_n and dual basis m_1..m_n, the
    divisor of w_i restricts to the character m_i and every other divisor
    restricts to 0; the tangent Euler class is the product of the m_i.
    Characters are evaluated at the generic point ``xi``.
    """

    def __init__(self, fan: Fan, seed: int):
        self.fan = fan
        self.seed = seed
        rng = random.Random(seed)
        duals = dual_bases(fan)
        for _ in range(MAX_RESAMPLES):
            xi = [rng.randint(1, POINT_BOUND) for _ in range(fan.dim)]
            weights = [tuple(sum(mi * x for mi, x in zip(m, xi)) for m in dual) for dual in duals]
            if all(w != 0 for ws in weights for w in ws):
                break
        else:
            raise InvariantViolation(f"no generic point found after {MAX_RESAMPLES} draws")
        self.xi = tuple(xi)
        self.weights: list[dict[int, int]] = [dict(zip(cone, ws)) for cone, ws in zip(fan.max_cones, weights)]
        self.euler = []
        for ws in weights:
            e = 1
            for w in ws:
                e *= w
            self.euler.append(e)

    def _total(self, numerators: Iterable[int]) -> int:
        total = sum((Fraction(num, den) for num, den in zip(numerators, self.euler) if num), Fraction(0))
        if total.denominator != 1:
            raise InvariantViolation(f"localization sum {total} is not an integer; fan {self.fan.label!r} is malformed")
        return int(total)

    def pair(self, mono: DivisorMonomial) -> int:
        nums = []
        for wt in self.weights:
            num = 1
            for k, e in mono.exponents:
                w = wt.get(k)
                if w is None:
                    num = 0
                    break
                num *= w**e
            nums.append(num)
        return self._total(nums)

    def power_sum(self, power: int) -> int:
        """Pairing of sum_k D_k**power."""
        return self._total(sum(w**power for w in wt.values()) for wt in self.weights)

    def elementary(self, degree: int) -> int:
        """Pairing of the degree-th elementary symmetric polynomial in all ray divisors."""
        nums = []
        for wt in self.weights:
            # e_k over all rays; rays off the cone contribute weight 0
            e = [1] + [0] * degree
            for k in range(self.fan.n_rays):
                w = wt.get(k, 0)
                if w:
                    for j in range(degree, 0, -1):
                        e[j] += e[j - 1] * w
            nums.append(e[degree])
        return self._total(nums)


@lru_cache(maxsize=64)
def localization(fan: Fan, seed: int) -> Localization:
    return Localization(fan, seed)


def _agree(fn, fan: Fan, seeds) -> tuple[int, int]:
    values = [(fn(localization(fan, s)), s) for s in seeds]
    if len({v for v, _ in values}) != 1:
        raise InvariantViolation(f"seed-dependent pairing on {fan.label!r}: {values}")
    return values[0]


def intersection_number(fan: Fan, mono: DivisorMonomial, seeds=DEFAULT_SEEDS) -> PairingResult:
    if mono.degree != fan.dim:
        raise ParameterError(f"monomial has degree {mono.degree}, fan dimension is {fan.dim}")
    if mono.support and (mono.support[0] < 0 or mono.support[-1] >= fan.n_rays):
        raise ParameterError("monomial references rays outside the fan")
    value, seed = _agree(lambda loc: loc.pair(mono), fan, seeds)
    return PairingResult(value, seed)


def milnor_genus(fan: Fan, seeds=DEFAULT_SEEDS) -> int:
    """s_n as the pairing of sum over rays of D_k**n."""
    return _agree(lambda loc: loc.power_sum(fan.dim), fan, seeds)[0]


def euler_characteristic(fan: Fan, seeds=DEFAULT_SEEDS) -> int:
    """Top Chern number: pairing of the degree-n part of prod_k (1 + D_k)."""
    return _agree(lambda loc: loc.elementary(fan.dim), fan, seeds)[0]


# --- presentation ------------------------------------------------------------


@dataclass(frozen=True)
class CohomologyPresentation:
    generators: tuple[str, ...]
    linear_relations: tuple[tuple[int, ...], ...]
    sr_generators: tuple[Cone, ...]

    def __str__(self) -> str:
        def linear(coeffs):
            terms = []
            for c, g in zip(coeffs, self.generators):
                if c == 0:
                    continue
                sign = "-" if c < 0 else "+"
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                terms.append(f"{sign} {mag}{g}")
            s = " ".join(terms) or "0"
            return s[2:] if s.startswith("+ ") else s

        lines = [f"Z[{', '.join(self.generators)}] / (L + J)", "L:"]
        lines += [f"  {linear(t)}" for t in self.linear_relations]
        lines.append("J:")
        lines += ["  " + "*".join(self.generators[i] for i in s) for s in self.sr_generators]
        return "\n".join(lines)


def minimal_nonfaces(fan: Fan, max_faces: int = 10**6) -> list[Cone]:
    """Minimal ray subsets spanning no cone, by level-wise search over faces."""
    cone_sets = [frozenset(c) for c in fan.max_cones]

    def is_face(s) -> bool:
        return any(s <= c for c in cone_sets)

    out: list[Cone] = []
    level: set[Cone] = set()
    for i in range(fan.n_rays):
        if is_face({i}):
            level.add((i,))
        else:
            out.append((i,))
    seen = len(level)
    while level:
        nxt: set[Cone] = set()
        for f in sorted(level):
            for j in range(f[-1] + 1, fan.n_rays):
                cand = f + (j,)
                # every codimension-one subset must already be a face
                if any(cand[:i] + cand[i + 1 :] not in level for i in range(len(cand))):
                    continue
                if is_face(frozenset(cand)):
                    nxt.add(cand)
                else:
                    out.append(cand)
        seen += len(nxt)
        if seen > max_faces:
            raise SizeError(f"more than {max_faces} faces; raise max_faces to continue")
        level = nxt
    return sorted(out, key=lambda c: (len(c), c))


def cohomology_presentation(fan: Fan, names: list[str] | None = None, max_faces: int = 10**6) -> CohomologyPresentation:
    names = names or [f"D{i}" for i in range(fan.n_rays)]
    if len(names) != fan.n_rays:
        raise ParameterError("one name per ray required")
    theta = tuple(tuple(r[i] for r in fan.rays) for i in range(fan.dim))
    return CohomologyPresentation(tuple(names), theta, tuple(minimal_nonfaces(fan, max_faces)))
