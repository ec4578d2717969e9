"""Closed-form Milnor genera for the two-bundle family and its blow-ups."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import HypothesisError, ParameterError
from .fan import FamilyParams
from .numtheory import binomial_mod, prime_power


def _check_range(n: int, eps: int) -> None:
    if n < 3:
        raise ParameterError(f"n must be >= 3, got {n}")
    if not 2 <= eps <= n - 1:
        raise ParameterError(f"eps must lie in [2, {n - 1}], got {eps}")


def R(n: int, eps: int) -> int:
    """n - eps + (-1)**eps * C(n-1, eps)."""
    _check_range(n, eps)
    c = math.comb(n - 1, eps)
    return n - eps + (c if eps % 2 == 0 else -c)


def R_mod(n: int, eps: int, m: int) -> int:
    """R(n, eps) mod m, without ever forming the full binomial."""
    _check_range(n, eps)
    c = binomial_mod(n - 1, eps, m)
    return (n - eps + (c if eps % 2 == 0 else -c)) % m


def family_genus(params: FamilyParams) -> int:
    return params.a**params.eps * params.b * R(params.n, params.eps)


def edge_blowup_genus(params: FamilyParams) -> int:
    """Genus after blowing up the surface of the cone u_1..u_{n-eps}, v_1..v_{eps-1}.

    Only established for odd n; even n is refused.
    """
    if params.n % 2 == 0:
        raise HypothesisError(f"edge blow-up formula holds for odd n only, got n={params.n}")
    return family_genus(params) + 2 * params.b


def projective_space_genus(n: int) -> int:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return n + 1


def point_blowup_delta(n: int) -> int:
    """Change of s_n when blowing up a point."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return -(n + 1) if n % 2 == 0 else -(n - 1)


@dataclass(frozen=True)
class GeneratorTarget:
    magnitude: int
    prime_power_base: tuple[int, int] | None = None

    def to_json(self) -> dict:
        return {
            "magnitude": self.magnitude,
            "prime_power_base": list(self.prime_power_base) if self.prime_power_base else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GeneratorTarget":
        base = data.get("prime_power_base")
        return cls(int(data["magnitude"]), tuple(base) if base else None)


def generator_target(n: int) -> GeneratorTarget:
    """|s_n| required of a polynomial generator in dimension n: p if n+1 = p**m, else 1."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    pp = prime_power(n + 1)
    if pp is None:
        return GeneratorTarget(1)
    return GeneratorTarget(pp[0], pp)
