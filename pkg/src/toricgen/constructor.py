"""Certified recipes for toric varieties with generator-valued Milnor genus."""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field

from . import genus
from .chow import milnor_genus
from .errors import ConjectureFailure, InvariantViolation, ParameterError, SizeError
from .fan import (
    DEFAULT_MAX_DIM,
    FamilyParams,
    Fan,
    build_family_fan,
    check_smooth_complete,
    decode_int,
    edge_cone,
    encode_int,
    projective_space_fan,
    star_subdivide,
)
from .genus import GeneratorTarget, generator_target, point_blowup_delta
from .numtheory import odd_lemma_m, odd_part_radical, prime_power
from .sweep import eps_search_order, is_witness

DEFAULT_CONE_CAP = int(os.environ.get("TORICGEN_CONE_CAP", "100000"))

TAGS = ("CPn", "Thm3.1", "Thm3.4", "Thm4.1", "Thm4.4", "Conj5.1")
SITE_RULE = "point blow-ups at lexicographically first original maximal cones"


@dataclass(frozen=True)
class ConstructionPlan:
    n: int
    family: FamilyParams | None  # None: projective space
    edge_blowup: bool
    point_blowups: int
    base_genus: int
    final_genus: int
    target: GeneratorTarget
    theorem_tag: str
    label: str = ""

    @property
    def base_kind(self) -> str:
        return "ProjectiveSpace" if self.family is None else "Family"

    def to_json(self) -> dict:
        if self.family is None:
            base = {"kind": "ProjectiveSpace", "n": self.n}
        else:
            f = self.family
            base = {"kind": "Family", "n": f.n, "eps": f.eps, "a": encode_int(f.a), "b": encode_int(f.b)}
        return {
            "n": self.n,
            "base": base,
            "edge_blowup": self.edge_blowup,
            "point_blowups": str(self.point_blowups),
            "base_genus": str(self.base_genus),
            "final_genus": str(self.final_genus),
            "target": self.target.to_json(),
            "theorem_tag": self.theorem_tag,
            "label": self.label,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionPlan":
        base = data["base"]
        if base["kind"] == "ProjectiveSpace":
            family = None
        elif base["kind"] == "Family":
            family = FamilyParams(int(base["n"]), int(base["eps"]), decode_int(base["a"]), decode_int(base["b"]))
        else:
            raise ParameterError(f"unknown base kind {base['kind']!r}")
        return cls(
            n=int(data["n"]),
            family=family,
            edge_blowup=bool(data["edge_blowup"]),
            point_blowups=decode_int(data["point_blowups"]),
            base_genus=decode_int(data["base_genus"]),
            final_genus=decode_int(data["final_genus"]),
            target=GeneratorTarget.from_json(data["target"]),
            theorem_tag=str(data["theorem_tag"]),
            label=str(data.get("label", "")),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _least_signed(residue: int, modulus: int, sign: int) -> int:
    """Representative of ``residue`` mod ``modulus`` of the given sign, smallest in absolute value."""
    r = residue % modulus
    if sign > 0:
        return r if r else modulus
    return r - modulus


def _plan(n, family, edge, base_genus, target, tag) -> ConstructionPlan:
    delta = point_blowup_delta(n)
    if delta == 0:
        k = 0
    else:
        k, rem = divmod(base_genus - target.magnitude, -delta)
        assert rem == 0 and k >= 0, (n, base_genus, target)
    base = "CP^%d" % n if family is None else f"Y(n={family.n},eps={family.eps},a={family.a},b={family.b})"
    if edge:
        base = f"Bl_edge {base}"
    label = f"{base} + {k} {SITE_RULE}" if k else base
    return ConstructionPlan(n, family, edge, k, base_genus, base_genus + k * delta, target, tag, label)


def _prime_power_family(n: int, p: int, e: int) -> FamilyParams:
    """Y(n, eps, 1, b) with genus = p mod p**e, for n + 1 = p**e, e >= 2.

    eps = p**(e-1) is tried first. Any eps with p || R_n(eps) works: b is the
    inverse of R/p modulo p**(e-1), signed like R. When R = -p mod p**e this
    is b = -1. For p = 3, e >= 4 that congruence fails, but p || R still holds.
    """
    q = p ** (e - 1)
    for eps in itertools.chain([q], (x for x in range(2, n) if x != q)):
        r = genus.R(n, eps)
        if r % p or (r // p) % p == 0:
            continue
        b = _least_signed(pow(r // p, -1, q), q, 1 if r > 0 else -1)
        return FamilyParams(n, eps, 1, b)
    raise ConjectureFailure(f"no eps with R_{n}(eps) exactly divisible by {p}")


def construct(n: int, *, prefer_projective_space: bool = False) -> ConstructionPlan:
    """Recipe for a smooth projective toric variety whose genus is the generator target.

    Dispatches on n: projective space for n <= 2, the family itself when n+1
    is a prime or a power of two, the family plus point blow-ups when n+1 is
    an odd prime power, the edge blow-up route for the remaining odd n, and
    the coprime-epsilon search for the remaining even n.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    target = generator_target(n)

    if n <= 2:
        return _plan(n, None, False, genus.projective_space_genus(n), target, "CPn")

    if n % 2 == 1:
        if (n + 1) & n == 0:
            fp = FamilyParams(n, n - 1, 1, 1)
            return _plan(n, fp, False, genus.family_genus(fp), target, "Thm4.1")
        m = odd_lemma_m(n)
        eps = 2**m
        a = odd_part_radical(n - 1)
        c = a**eps * genus.R(n, eps) + 2
        b = _least_signed(pow(c, -1, n - 1), n - 1, 1 if c > 0 else -1)
        fp = FamilyParams(n, eps, a, b)
        base_genus = genus.edge_blowup_genus(fp)
        assert base_genus == b * c
        return _plan(n, fp, True, base_genus, target, "Thm4.4")

    pp = prime_power(n + 1)
    if pp is not None:
        p, e = pp
        if e == 1:
            if prefer_projective_space:
                return _plan(n, None, False, genus.projective_space_genus(n), target, "CPn")
            fp = FamilyParams(n, n - 2, 1, 1)
            return _plan(n, fp, False, genus.family_genus(fp), target, "Thm3.1")
        fp = _prime_power_family(n, p, e)
        return _plan(n, fp, False, genus.family_genus(fp), target, "Thm3.4")

    for eps in eps_search_order(n):
        if is_witness(n, eps):
            r = genus.R(n, eps)
            b = _least_signed(pow(r, -1, n + 1), n + 1, 1 if r > 0 else -1)
            fp = FamilyParams(n, eps, 1, b)
            return _plan(n, fp, False, genus.family_genus(fp), target, "Conj5.1")
    raise ConjectureFailure(f"no eps in [2, {n - 1}] with gcd(R_n(eps), {n + 1}) = 1")


# --- materialization ---------------------------------------------------------


def predicted_cone_count(plan: ConstructionPlan) -> int:
    n = plan.n
    if plan.family is None:
        count = n + 1
    else:
        f = plan.family
        count = (n - f.eps + 1) * f.eps * 2
        if plan.edge_blowup:
            # the edge cone lies in exactly two maximal cones, each split into n-1
            count += 2 * (n - 2)
    return count + plan.point_blowups * (n - 1)


def blow_up_points(fan: Fan, k: int) -> Fan:
    """Blow up k torus-fixed points, always at the lexicographically first
    maximal cone not created by an earlier point blow-up. Checks the result."""
    created: set[tuple[int, ...]] = set()
    for _ in range(k):
        candidates = [c for c in fan.max_cones if c not in created]
        site = min(candidates) if candidates else min(fan.max_cones)
        fan = star_subdivide(fan, site, check=False)
        x = fan.n_rays - 1
        created.update(c for c in fan.max_cones if x in c)
    check_smooth_complete(fan)
    return fan


def materialize(plan: ConstructionPlan, cone_cap: int = DEFAULT_CONE_CAP, *, max_dim: int = DEFAULT_MAX_DIM) -> Fan:
    """Build the fan of the plan's variety, blow-ups included."""
    total = predicted_cone_count(plan)
    if total > cone_cap:
        raise SizeError(f"plan needs {total} maximal cones, cap is {cone_cap}")
    if plan.n > max_dim:
        raise SizeError(f"dimension {plan.n} exceeds the materialization bound {max_dim}")
    if plan.family is None:
        fan = projective_space_fan(plan.n)
    else:
        fan = build_family_fan(plan.family, max_dim=max_dim)
        if plan.edge_blowup:
            fan = star_subdivide(fan, edge_cone(plan.family))
    fan = blow_up_points(fan, plan.point_blowups)
    if len(fan.max_cones) != total:
        raise InvariantViolation(f"cone bookkeeping mismatch: {len(fan.max_cones)} != {total}")
    if plan.point_blowups:
        fan = Fan(fan.dim, fan.rays, fan.max_cones, plan.label)
    return fan


# --- verification ------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class PlanReport:
    plan: ConstructionPlan
    checks: list[Check] = field(default_factory=list)
    engine_genus: int | None = None
    fan: Fan | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(ok), detail))

    def render(self) -> str:
        lines = [f"plan n={self.plan.n} [{self.plan.theorem_tag}] {self.plan.label}"]
        for c in self.checks:
            lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
        lines += [f"  note: {x}" for x in self.notes]
        lines.append("verdict: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def expected_base_genus(plan: ConstructionPlan) -> int:
    if plan.family is None:
        return genus.projective_space_genus(plan.n)
    if plan.edge_blowup:
        return genus.edge_blowup_genus(plan.family)
    return genus.family_genus(plan.family)


def verify_plan(plan: ConstructionPlan, use_engine: bool = False, cone_cap: int = DEFAULT_CONE_CAP) -> PlanReport:
    """Re-derive every number in the plan; never raises on a failed check."""
    rep = PlanReport(plan)
    n = plan.n
    target = generator_target(n)
    rep.add("target", plan.target == target, f"expected magnitude {target.magnitude}, plan has {plan.target.magnitude}")
    if plan.theorem_tag not in TAGS:
        rep.add("tag", False, f"unknown theorem tag {plan.theorem_tag!r}")
    if plan.family is not None and plan.family.n != n:
        rep.add("dimension", False, f"family dimension {plan.family.n} != plan dimension {n}")
        return rep
    try:
        base = expected_base_genus(plan)
    except ParameterError as exc:
        rep.add("base_genus", False, str(exc))
        return rep
    rep.add("base_genus", base == plan.base_genus, f"formula gives {base}, plan has {plan.base_genus}")
    rep.add("positivity", plan.base_genus >= target.magnitude, f"base genus {plan.base_genus} >= {target.magnitude}")

    delta = point_blowup_delta(n)
    step = -delta
    if step == 0:
        rep.add("congruence", plan.point_blowups == 0 and plan.base_genus == plan.final_genus,
                "no point blow-ups possible in dimension 1")
    else:
        want_k, rem = divmod(plan.base_genus - target.magnitude, step)
        rep.add(
            "congruence",
            rem == 0 and want_k == plan.point_blowups,
            f"base genus {plan.base_genus} = {target.magnitude} + {want_k}*{step} + {rem} (mod {step} residue {rem}); "
            f"plan has K = {plan.point_blowups}",
        )
    rep.add(
        "blowup_arithmetic",
        plan.base_genus + plan.point_blowups * delta == plan.final_genus,
        f"{plan.base_genus} + {plan.point_blowups}*({delta}) = {plan.base_genus + plan.point_blowups * delta}, "
        f"plan final genus {plan.final_genus}",
    )
    rep.add("final_genus", plan.final_genus == target.magnitude, f"final {plan.final_genus}, target {target.magnitude}")

    if use_engine:
        try:
            fan = materialize(plan, cone_cap)
        except SizeError as exc:
            rep.notes.append(f"engine skipped: {exc}")
        else:
            rep.fan = fan
            rep.engine_genus = milnor_genus(fan)
            rep.add("engine", rep.engine_genus == plan.final_genus,
                    f"fan-level genus {rep.engine_genus}, plan final genus {plan.final_genus}")
    else:
        rep.notes.append("formulas only")
    rep.notes.append("projectivity asserted structurally (blow-ups of torus orbits preserve it)")
    return rep
