"""Command line interface.

Exit codes: 0 success, 1 verification or oracle failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import chow, constructor, fan as fanmod, genus, sweep as sweepmod
from .errors import ConjectureFailure, InvalidConeError, MalformedFanError, ParameterError, SizeError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("toricgen")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _family(args) -> fanmod.FamilyParams:
    missing = [k for k in ("n", "eps", "a", "b") if getattr(args, k) is None]
    if missing:
        raise ParameterError("missing family parameter(s): " + ", ".join("--" + k for k in missing))
    return fanmod.FamilyParams(args.n, args.eps, args.a, args.b)


def _verdicts(f: fanmod.Fan) -> bool:
    reg = fanmod.is_regular(f)
    paired, bad = fanmod.facet_pairing_complete(f)
    connected = fanmod.is_connected(f)
    print(f"rays: {f.n_rays}  maximal cones: {len(f.max_cones)}  label: {f.label}")
    print(f"regular: {'yes' if reg else 'NO'}" + ("" if reg else f" (bad cones: {reg.failures[:5]})"))
    print(f"facet pairing: {'yes' if paired else 'NO'}" + ("" if paired else f" ({len(bad)} unpaired facets)"))
    print(f"adjacency connected: {'yes' if connected else 'NO'}")
    return bool(reg) and paired and connected


def cmd_fan(args) -> int:
    params = _family(args)
    cones = (params.n - params.eps + 1) * params.eps * 2
    if args.edge_blowup:
        cones += 2 * (params.n - 2)
    cones += args.point_blowups * (params.n - 1)
    if cones > args.cap:
        raise SizeError(f"fan would have {cones} maximal cones, cap is {args.cap}")
    f = fanmod.build_family_fan(params, max_dim=args.max_dim)
    if args.edge_blowup:
        f = fanmod.star_subdivide(f, fanmod.edge_cone(params))
    if args.point_blowups:
        f = constructor.blow_up_points(f, args.point_blowups)
    _write(args.out, fanmod.dumps(f))
    if args.out in (None, "-"):
        # JSON went to stdout; keep the verdicts out of it
        stdout, sys.stdout = sys.stdout, sys.stderr
        try:
            ok = _verdicts(f)
        finally:
            sys.stdout = stdout
    else:
        ok = _verdicts(f)
        print(f"wrote {args.out}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_genus(args) -> int:
    values = {}
    if args.fan:
        with open(args.fan) as fh:
            f = fanmod.loads(fh.read())
        if args.engine or not args.closed_form:
            fanmod.check_smooth_complete(f)
            values["engine"] = chow.milnor_genus(f)
    elif args.engine:
        raise ParameterError("--engine needs --fan")
    if args.closed_form:
        params = _family(args)
        g = genus.edge_blowup_genus(params) if args.edge_blowup else genus.family_genus(params)
        values["closed_form"] = g + args.point_blowups * genus.point_blowup_delta(params.n)
    if not values:
        raise ParameterError("nothing to compute: give --fan and/or --closed-form")
    for k, v in values.items():
        print(f"{k}: {v}")
    if len(set(values.values())) > 1:
        print("DISAGREEMENT between engine and closed form", file=sys.stderr)
        return EXIT_FAIL
    if len(values) > 1:
        print("agreement: yes")
    return EXIT_OK


def cmd_construct(args) -> int:
    plan = constructor.construct(args.n, prefer_projective_space=args.projective_space)
    use_engine = args.verify_engine or args.materialize
    rep = constructor.verify_plan(plan, use_engine=use_engine, cone_cap=args.cap)
    if args.materialize and rep.fan is None:
        # materialization was requested explicitly, so a size refusal is an error
        constructor.materialize(plan, args.cap)
    print(rep.render())
    if args.out:
        _write(args.out, plan.dumps())
        print(f"wrote {args.out}")
    else:
        print(plan.dumps())
    if args.fan_out and rep.fan is not None:
        _write(args.fan_out, fanmod.dumps(rep.fan))
        print(f"wrote {args.fan_out}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    mode = "full_count" if args.full_count else "witness_only"
    records, summary = sweepmod.sweep(
        args.max,
        mode,
        args.jobs,
        min_n=args.min,
        checkpoint=args.checkpoint,
        checkpoint_every=args.checkpoint_every,
    )
    csv_text = sweepmod.records_to_csv(records, timing=not args.no_timing)
    if args.out:
        _write(args.out, csv_text)
    summary_text = json.dumps(summary.to_json(), indent=2)
    if args.summary:
        _write(args.summary, summary_text)
    print(summary_text, file=sys.stderr if not args.out else sys.stdout)
    if summary.counterexample:
        print(f"COUNTEREXAMPLE(S): {summary.counterexamples}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    cap_default = int(os.environ.get("TORICGEN_CONE_CAP", constructor.DEFAULT_CONE_CAP))
    p = argparse.ArgumentParser(prog="toricgen", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def family_flags(sp, required):
        sp.add_argument("--n", type=int, required=required)
        sp.add_argument("--eps", type=int, required=required)
        sp.add_argument("--a", type=int, required=required)
        sp.add_argument("--b", type=int, required=required)
        sp.add_argument("--edge-blowup", action="store_true", help="blow up the u_1..u_{n-eps}, v_1..v_{eps-1} cone")
        sp.add_argument("--point-blowups", type=int, default=0, metavar="K")

    sp = sub.add_parser("fan", help="build a family fan (optionally blown up) and certify it")
    family_flags(sp, True)
    sp.add_argument("--out", help="fan JSON path (default: stdout)")
    sp.add_argument("--cap", type=int, default=cap_default, help="maximal-cone cap")
    sp.add_argument("--max-dim", type=int, default=fanmod.DEFAULT_MAX_DIM)
    sp.set_defaults(func=cmd_fan)

    sp = sub.add_parser("genus", help="Milnor genus from a fan and/or the closed form")
    sp.add_argument("--fan", help="fan JSON")
    sp.add_argument("--engine", action="store_true", help="evaluate on the fan by localization")
    sp.add_argument("--closed-form", action="store_true")
    family_flags(sp, False)
    sp.set_defaults(func=cmd_genus)

    sp = sub.add_parser("construct", help="generator recipe for dimension n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--verify-engine", action="store_true", help="check the genus on the materialized fan when under the cap")
    sp.add_argument("--materialize", action="store_true", help="build the fan; error if over the cap")
    sp.add_argument("--cap", type=int, default=cap_default)
    sp.add_argument("--projective-space", action="store_true", help="use CP^n when n+1 is prime")
    sp.add_argument("--out", help="plan JSON path (default: stdout)")
    sp.add_argument("--fan-out", help="where to write the materialized fan")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("sweep", help="coprime-eps search over even dimensions")
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--min", type=int, default=2)
    sp.add_argument("--full-count", action="store_true", help="count every valid eps, not just the first")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--checkpoint", help="JSON-lines progress file; rerun to resume")
    sp.add_argument("--checkpoint-every", type=int, default=1000, metavar="N")
    sp.add_argument("--out", help="CSV path")
    sp.add_argument("--summary", help="summary JSON path")
    sp.add_argument("--no-timing", action="store_true", help="leave elapsed_ms empty for byte-reproducible CSV")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParameterError, SizeError, MalformedFanError, InvalidConeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConjectureFailure as exc:
        print(f"conjecture failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
