"""Command line: ``cstar-comp verify|extract-shift|index|limitset|crossed|report``.

Exit status: 0 when every mandatory check passes, 1 on a check failure,
2 on a configuration or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def set_threads(n: int) -> None:
    # only effective before numpy is first imported; the entry point imports it lazily
    for v in THREAD_VARS:
        os.environ[v] = str(n)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cstar-comp", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="flat key = value run configuration")
    p.add_argument("--threads", type=int, default=1, help="BLAS threads (1 gives byte-identical reports)")
    p.add_argument("--out", help="output directory (CSTAR_COMP_OUT overrides)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="all",
                   choices=["identities", "shift", "intertwiner", "lott", "emerson", "crossed", "all"])
    v.add_argument("--space", action="append", help="restrict the identities suite to a space (h2, a2:n)")
    v.add_argument("--group", default=None, help="'default' or a file of transforms")
    v.add_argument("--trunc", type=int, help="Fourier truncation (lott) / probe size (intertwiner)")
    v.add_argument("--n", type=int, help="kernel exponent for the intertwiner suite")

    e = sub.add_parser("extract-shift", help="recover S (h2) or T^n (a2:n) from composition operators")
    e.add_argument("--space", default="h2")
    e.add_argument("--group", default="default")
    e.add_argument("--radius", type=float, default=0.99)
    e.add_argument("--trunc", type=int, default=256)

    i = sub.add_parser("index", help="index of the lift of [z]")
    i.add_argument("--picture", choices=["hardy", "emerson"], default="hardy")
    i.add_argument("--radius", type=int, default=4, help="word-ball radius for the Emerson picture")

    ls = sub.add_parser("limitset", help="limit-set sample as SVG and CSV")
    ls.add_argument("--group", default="default", help="default, elementary, rotation or a file of transforms")
    ls.add_argument("--max-len", type=int, default=8)
    ls.add_argument("--radius", type=float, default=0.99)

    c = sub.add_parser("crossed", help="crossed-product arithmetic on text files")
    c.add_argument("--op", choices=["multiply", "star"], required=True)
    c.add_argument("--lhs", required=True)
    c.add_argument("--rhs")

    sub.add_parser("report", help="summarize the reports in the output directory")
    return p


def load_group(spec: str | None):
    from .fuchsian import FuchsianGroup, default_group
    from .mobius import parse_transforms, rotation

    if spec in (None, "default"):
        return default_group()
    if spec == "elementary":
        return FuchsianGroup([default_group().generators[0]])
    if spec == "rotation":
        return FuchsianGroup([rotation(2 * math.pi / 5)])
    if not os.path.exists(spec):
        raise ValueError(f"group file {spec} does not exist")
    with open(spec) as fh:
        return FuchsianGroup(parse_transforms(fh))


def _config(args):
    from .config import RunConfig, parse_config

    cfg = parse_config(args.config) if args.config else RunConfig()
    if args.out:
        cfg = cfg.with_overrides(output_dir=args.out)
    return cfg


def cmd_verify(args, cfg) -> int:
    from .config import output_dir
    from .suites import run_suite

    kw = {}
    if args.space:
        kw["spaces"] = tuple(args.space)
    if args.trunc:
        kw["fourier_trunc"] = args.trunc
    if args.n:
        kw["intertwiner_n"] = args.n
    if args.group and args.group != "default":
        kw["group"] = tuple(g.to_text() for g in load_group(args.group).generators)
    cfg = cfg.with_overrides(**kw)
    reports = run_suite(args.suite, cfg)
    ok = True
    for rep in reports:
        rep.write(output_dir(cfg))
        failed = [r.name for r in rep.records if r.mandatory and not r.passed]
        print(f"{rep.suite}: {'PASS' if rep.passed else 'FAIL'} ({len(rep.records)} checks)"
              + (f" failing: {', '.join(failed)}" if failed else ""))
        ok &= rep.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_extract_shift(args, cfg) -> int:
    from . import shift_recovery as SR
    from .rkhs import SpaceSpec, weighted

    space = SpaceSpec.parse(args.space)
    G = load_group(args.group)
    table = []
    system = None
    for r in sorted(set(SR.RADII) | {args.radius}):
        if space.n == 1:
            _, s = SR.recover_shift_hardy(G, args.trunc, r, cfg.window)
        else:
            _, s = SR.recover_Tn(weighted(space.n, args.trunc), G, r, cfg.window)
        table.append([r, s.residual])
        if r == args.radius:
            system = s
    out = {"space": space.label(), "radius_floor": args.radius, "trunc": args.trunc,
           "system": system.to_json(), "residual_table": table}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_index(args, cfg) -> int:
    from . import extensions as E

    if args.picture == "hardy":
        print(E.index_of_symbol_lift_hardy())
    else:
        print(E.emerson_lift(cfg.fuchsian_group(), args.radius)[1])
    return EXIT_OK


def limitset_svg(sample, size: int = 400) -> str:
    c = size / 2
    R = 0.45 * size
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
             f'<circle cx="{c}" cy="{c}" r="{R}" fill="none" stroke="#888" stroke-width="1"/>']
    for ang in sorted(sample.angles()):
        x = c + R * math.cos(ang)
        y = c - R * math.sin(ang)
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2" fill="#b22"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_limitset(args, cfg) -> int:
    from .config import output_dir
    from .fuchsian import clusters, limit_set_sample

    G = load_group(args.group)
    S = limit_set_sample(G, args.max_len, args.radius)
    if len(S) == 0:
        print(f"warning: no orbit point reaches radius {args.radius}; empty limit-set sample", file=sys.stderr)
    d = output_dir(cfg)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "limitset.svg"), "w") as fh:
        fh.write(limitset_svg(S))
    with open(os.path.join(d, "limitset.csv"), "w") as fh:
        fh.write(S.to_csv())
    print(f"points: {len(S)} clusters: {len(clusters(S))}")
    return EXIT_OK


def cmd_crossed(args, cfg) -> int:
    from .crossed import CrossedElement

    G = cfg.fuchsian_group()
    with open(args.lhs) as fh:
        x = CrossedElement.from_text(fh.read(), G)
    if args.op == "star":
        res = x.star()
    else:
        if not args.rhs:
            raise ValueError("--rhs is required for multiply")
        with open(args.rhs) as fh:
            res = x * CrossedElement.from_text(fh.read(), G)
    sys.stdout.write(res.to_text())
    return EXIT_OK


def cmd_report(args, cfg) -> int:
    from .config import output_dir
    from .suites import SUITES

    d = output_dir(cfg)
    rows, ok = [], True
    for s in SUITES:
        path = os.path.join(d, f"{s}.json")
        if not os.path.exists(path):
            continue
        with open(path) as fh:
            rep = json.load(fh)
        n_fail = sum(1 for c in rep["checks"] if c["mandatory"] and not c["passed"])
        rows.append({"suite": s, "passed": rep["passed"], "checks": len(rep["checks"]), "failed": n_fail,
                     "config_hash": rep["config_hash"]})
        ok &= rep["passed"]
    if not rows:
        print(f"no reports in {d}", file=sys.stderr)
        return EXIT_CONFIG
    for r in rows:
        print(f"{r['suite']:<12} {'PASS' if r['passed'] else 'FAIL'} {r['checks']:>3} checks {r['failed']} failed")
    with open(os.path.join(d, "summary.json"), "w") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "extract-shift": cmd_extract_shift, "index": cmd_index,
            "limitset": cmd_limitset, "crossed": cmd_crossed, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    set_threads(args.threads)
    from .config import ConfigError

    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
