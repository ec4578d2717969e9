"""Complete regular fans in Z^n: construction, certification, star subdivision, JSON."""
from __future__ import annotations

import itertools
import json
import math
import os
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidConeError, InvariantViolation, MalformedFanError, ParameterError

DEFAULT_MAX_DIM = int(os.environ.get("TORICGEN_MAX_DIM", "64"))

Vector = tuple[int, ...]
Cone = tuple[int, ...]


class SubdivisionWarning(UserWarning):
    pass


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    a = [list(r) for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise MalformedFanError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def primitive(v: Iterable[int]) -> tuple[Vector, int]:
    v = tuple(v)
    g = math.gcd(*v) if v else 0
    if g in (0, 1):
        return v, g
    return tuple(x // g for x in v), g


@dataclass(frozen=True)
class FamilyParams:
    n: int
    eps: int
    a: int
    b: int

    def __post_init__(self):
        if self.n < 3:
            raise ParameterError(f"family needs n >= 3, got n={self.n}")
        if not 2 <= self.eps <= self.n - 1:
            raise ParameterError(f"eps must lie in [2, n-1] = [2, {self.n - 1}], got {self.eps}")


@dataclass(frozen=True)
class Fan:
    """A simplicial fan given by primitive rays and maximal cones (index tuples).

    Construction checks structure only; regularity and completeness are
    certified by :func:`is_regular` and :func:`facet_pairing_complete`.
    """

    dim: int
    rays: tuple[Vector, ...]
    max_cones: tuple[Cone, ...]
    label: str = ""
    _cone_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)
        if self.dim < 1:
            raise MalformedFanError(f"dimension must be positive, got {self.dim}")
        for r in rays:
            if len(r) != self.dim:
                raise MalformedFanError(f"ray {r} has length {len(r)}, expected {self.dim}")
            if math.gcd(*r) != 1:
                raise MalformedFanError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise MalformedFanError("duplicate rays")
        m = len(rays)
        for c in cones:
            if len(set(c)) != len(c) or not c:
                raise MalformedFanError(f"cone {c} is empty or repeats a ray")
            if c[0] < 0 or c[-1] >= m:
                raise MalformedFanError(f"cone {c} references a missing ray")
        if len(set(cones)) != len(cones):
            raise MalformedFanError("duplicate maximal cones")
        object.__setattr__(self, "_cone_set", frozenset(cones))

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def cone_rays(self, cone: Iterable[int]) -> list[Vector]:
        return [self.rays[i] for i in cone]

    def contains_face(self, face: Iterable[int]) -> bool:
        """True iff the ray subset spans a cone of the fan (lies in some maximal cone)."""
        s = set(face)
        return any(s.issubset(c) for c in self.max_cones)

    def cones_containing(self, face: Iterable[int]) -> list[Cone]:
        s = set(face)
        return [c for c in self.max_cones if s.issubset(c)]

    def ray_index(self, ray: Sequence[int]) -> int:
        return self.rays.index(tuple(ray))

    def transformed(self, matrix: Sequence[Sequence[int]], label: str | None = None) -> "Fan":
        """Image of the fan under the linear map ``ray -> matrix @ ray``."""
        rays = [tuple(sum(row[j] * r[j] for j in range(self.dim)) for row in matrix) for r in self.rays]
        return Fan(self.dim, tuple(rays), self.max_cones, self.label if label is None else label)

    def to_json(self) -> dict:
        return fan_to_json(self)


# --- certification -----------------------------------------------------------


@dataclass
class RegularityReport:
    determinants: list[tuple[Cone, int]]

    @property
    def passed(self) -> bool:
        return all(abs(d) == 1 for _, d in self.determinants)

    @property
    def failures(self) -> list[tuple[Cone, int]]:
        return [(c, d) for c, d in self.determinants if abs(d) != 1]

    def __bool__(self) -> bool:
        return self.passed


def is_regular(fan: Fan) -> RegularityReport:
    dets = []
    for c in fan.max_cones:
        if len(c) != fan.dim:
            raise MalformedFanError(f"maximal cone {c} has {len(c)} rays in dimension {fan.dim}")
        dets.append((c, int_det(fan.cone_rays(c))))
    return RegularityReport(dets)


def _facet_counts(fan: Fan) -> dict[Cone, list[Cone]]:
    seen: dict[Cone, list[Cone]] = defaultdict(list)
    for c in fan.max_cones:
        for i in range(len(c)):
            seen[c[:i] + c[i + 1 :]].append(c)
    return seen


def facet_pairing_complete(fan: Fan) -> tuple[bool, list[Cone]]:
    """Every facet of every maximal cone must lie in exactly two maximal cones.

    Returns the verdict and the offending facets.
    """
    bad = [f for f, owners in _facet_counts(fan).items() if len(owners) != 2]
    return not bad, sorted(bad)


def is_connected(fan: Fan) -> bool:
    """Maximal cones sharing a facet form a connected graph."""
    if not fan.max_cones:
        return False
    adj: dict[Cone, set[Cone]] = defaultdict(set)
    for owners in _facet_counts(fan).values():
        for x, y in itertools.combinations(owners, 2):
            adj[x].add(y)
            adj[y].add(x)
    start = fan.max_cones[0]
    seen, stack = {start}, [start]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(fan.max_cones)


def is_complete(fan: Fan) -> bool:
    """Combinatorial completeness certificate: facet pairing plus connectivity.

    Sound for the simplicial fans built here; a certificate, not a proof,
    for arbitrary input.
    """
    ok, _ = facet_pairing_complete(fan)
    return ok and is_connected(fan)


def check_smooth_complete(fan: Fan) -> None:
    """Raise InvariantViolation unless the fan is regular and certified complete."""
    reg = is_regular(fan)
    if not reg:
        raise InvariantViolation(f"fan {fan.label!r} is not regular: {reg.failures[:3]}")
    if not is_complete(fan):
        _, bad = facet_pairing_complete(fan)
        raise InvariantViolation(f"fan {fan.label!r} fails the completeness certificate: {bad[:3]}")


# --- constructions -----------------------------------------------------------


def _e(n: int, k: int) -> Vector:
    # k is 1-based
    return tuple(1 if i == k - 1 else 0 for i in range(n))


def family_ray_indices(params: FamilyParams) -> dict[str, list[int]]:
    """Indices of the U, V and W ray blocks inside :func:`build_family_fan`."""
    n, eps = params.n, params.eps
    nu = n - eps + 1
    return {
        "U": list(range(0, nu)),
        "V": list(range(nu, nu + eps)),
        "W": [nu + eps, nu + eps + 1],
    }


def build_family_fan(params: FamilyParams, *, max_dim: int = DEFAULT_MAX_DIM) -> Fan:
    n, eps, a, b = params.n, params.eps, params.a, params.b
    if n > max_dim:
        raise ParameterError(f"dimension {n} exceeds the materialization bound {max_dim}")
    k = n - eps
    U = [_e(n, i) for i in range(1, k + 1)]
    U.append(tuple([-1] * k + [0] * eps))
    V = [_e(n, k + i) for i in range(1, eps)]
    v_last = [0] * n
    v_last[k - 1] = a
    for i in range(k, n - 1):
        v_last[i] = -1
    V.append(tuple(v_last))
    w2 = [0] * n
    w2[n - 2] = b
    w2[n - 1] = -1
    W = [_e(n, n), tuple(w2)]

    idx = family_ray_indices(params)
    cones = [
        tuple(sorted(cu + cv + (cw,)))
        for cu in itertools.combinations(idx["U"], k)
        for cv in itertools.combinations(idx["V"], eps - 1)
        for cw in idx["W"]
    ]
    return Fan(n, tuple(U + V + W), tuple(cones), f"Y(n={n},eps={eps},a={a},b={b})")


def projective_space_fan(n: int) -> Fan:
    if n < 1:
        raise ParameterError(f"projective space needs n >= 1, got {n}")
    rays = [_e(n, i) for i in range(1, n + 1)] + [tuple([-1] * n)]
    cones = list(itertools.combinations(range(n + 1), n))
    return Fan(n, tuple(rays), tuple(cones), f"CP^{n}")


def edge_cone(params: FamilyParams) -> Cone:
    """The (n-1)-cone spanned by u_1..u_{n-eps} and v_1..v_{eps-1}."""
    idx = family_ray_indices(params)
    return tuple(idx["U"][:-1] + idx["V"][:-1])


def star_subdivide(fan: Fan, sigma: Iterable[int], *, check: bool = True) -> Fan:
    """Blow up the orbit closure of ``sigma`` by star subdivision.

    Adds the ray sum(rays of sigma) and replaces each maximal cone containing
    sigma by the cones obtained swapping one ray of sigma for the new ray.
    """
    sigma = tuple(sorted(set(sigma)))
    if not sigma or sigma[0] < 0 or sigma[-1] >= fan.n_rays:
        raise InvalidConeError(f"cone {sigma} references rays outside the fan")
    containing = fan.cones_containing(sigma)
    if not containing:
        raise InvalidConeError(f"{sigma} is not a face of any maximal cone")
    if len(sigma) == 1:
        warnings.warn("star subdivision at a single ray is the identity", SubdivisionWarning, stacklevel=2)
        return fan

    new_ray, g = primitive(map(sum, zip(*fan.cone_rays(sigma))))
    label = f"Bl[{','.join(map(str, sigma))}]({fan.label})"
    if g > 1:
        warnings.warn(f"subdivision ray had content {g}; normalized", SubdivisionWarning, stacklevel=2)
        label += f"[gcd {g}]"
    if new_ray in fan.rays:
        raise InvariantViolation(f"subdivision ray {new_ray} already present")
    x = fan.n_rays
    hit = set(containing)
    cones = [c for c in fan.max_cones if c not in hit]
    for tau in containing:
        for s in sigma:
            cones.append(tuple(sorted([i for i in tau if i != s] + [x])))
    out = Fan(fan.dim, fan.rays + (new_ray,), tuple(cones), label)
    if check and not is_regular(out):
        raise InvariantViolation(f"star subdivision of {fan.label!r} at {sigma} is not regular")
    return out


# --- JSON --------------------------------------------------------------------

_INT64 = 2**63


def encode_int(x: int) -> int | str:
    return x if -_INT64 <= x < _INT64 else str(x)


def decode_int(x) -> int:
    if isinstance(x, bool):
        raise MalformedFanError("boolean where an integer was expected")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return int(x)
    raise MalformedFanError(f"expected integer, got {x!r}")


def fan_to_json(fan: Fan) -> dict:
    return {
        "dim": fan.dim,
        "label": fan.label,
        "rays": [[encode_int(x) for x in r] for r in fan.rays],
        "max_cones": [list(c) for c in fan.max_cones],
    }


def fan_from_json(data: dict) -> Fan:
    try:
        return Fan(
            int(data["dim"]),
            tuple(tuple(decode_int(x) for x in r) for r in data["rays"]),
            tuple(tuple(int(i) for i in c) for c in data["max_cones"]),
            str(data.get("label", "")),
        )
    except KeyError as exc:
        raise MalformedFanError(f"fan JSON missing key {exc}") from None


def dumps(fan: Fan) -> str:
    return json.dumps(fan_to_json(fan))


def loads(text: str) -> Fan:
    return fan_from_json(json.loads(text))
