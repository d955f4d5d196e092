"""Command-line front end: ``qcf <verb> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .data_files import appendix_code, appendix_code_path, expand_orbits, group_to_json, load_group_file, resolve_group
from .geometry import Code, CodeFormatError, format_code, gaussian_binomial, read_code_file
from .groups import MatrixGroup, closed, fingerprint, orbit_space
from .km import add_closeness, build_model, make_subproblems, read_lp, to_lp
from .solver import SolveConfig, SolveResult, Status, parse_duration, solve, solve_portfolio

EXIT_OK, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2

log = logging.getLogger("qcf")


def _group(spec: str) -> MatrixGroup:
    return resolve_group(spec).closure()


def _read_code(path: str, fmt: str, group: MatrixGroup | None = None) -> Code:
    """Read a code file; with a group, rows are orbit representatives and get expanded."""
    words = read_code_file(path, fmt)
    code = Code.from_words(words)
    if group is not None and len(code):
        os_ = orbit_space(code.n, code.k, group)
        keys = set(code.keys)
        if any(key not in keys for w in code for key in os_.orbits[os_.orbit_of[w.key][0]]):
            code = Code(tuple(expand_orbits(list(code), group)))
    return code


def _config(args) -> SolveConfig:
    return SolveConfig(
        kappa=args.kappa,
        target=args.target,
        mode=getattr(args, "mode", "optimize"),
        budget=parse_duration(args.budget),
        threads=args.threads,
        deterministic=args.deterministic,
        bound_mode=getattr(args, "bound", "counting"),
    )


def _emit(obj, args) -> None:
    if args.json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        for k, v in obj.items():
            print(f"{k}: {v}")


def _solve_exit(res: SolveResult) -> int:
    return EXIT_BUDGET if res.status == Status.TIMED_OUT else EXIT_OK


# ------------------------------------------------------------------- verbs


def cmd_gauss(args) -> int:
    print(gaussian_binomial(args.n, args.k, args.q))
    return EXIT_OK


def cmd_decode(args) -> int:
    words = read_code_file(args.path, args.format)
    code = Code.from_words(words)
    out = args.to
    if out == "keys":
        sys.stdout.write("".join(f"{w.key:#x}\n" for w in code.words))
    else:
        sys.stdout.write(format_code(words, out))
    return EXIT_OK


def cmd_verify_code(args) -> int:
    from .verify import APPENDIX_EXPECT, verify_code

    expect = {}
    if args.path is None:
        group = _group(args.group or "G_4_6")
        code = appendix_code()
        expect = dict(APPENDIX_EXPECT)
    else:
        group = _group(args.group) if args.group else None
        code = _read_code(args.path, args.format, group)
        if Path(args.path).resolve() == appendix_code_path().resolve() and args.group in (None, "G_4_6"):
            expect = dict(APPENDIX_EXPECT) if group is not None else {}
    if args.expect:
        expect.update(json.loads(args.expect))
    rep = verify_code(code, group, expect, aut_budget=parse_duration(args.budget))
    print(rep.to_json() if args.json else rep.text())
    return rep.exit_code()


def cmd_group_info(args) -> int:
    rec = resolve_group(args.group)
    g = closed(rec.group())
    info = {"name": rec.name, "order": g.order, "stated_order": rec.stated_order, "stated_type": rec.stated_type}
    if g.order <= 64:
        fp = fingerprint(g)
        info["type"] = str(fp)
        info["fingerprint"] = fp.fingerprint()
    info["generators"] = [m.to_lists() for m in rec.generators]
    _emit(info, args)
    return EXIT_OK


def cmd_orbits(args) -> int:
    g = _group(args.group)
    os_ = orbit_space(args.n, args.k, g)
    _emit({"group": args.group, "k": args.k, "orbits": len(os_.orbits), "type": os_.type_string}, args)
    return EXIT_OK


def _model(args):
    return build_model(7, 3, 4, _group(args.group), lam=args.lam, prune=not args.no_prune)


def cmd_km_build(args) -> int:
    m = _model(args)
    _emit(
        {
            "group": args.group,
            "variables": m.num_vars,
            "rows": len(m.rows),
            "variable_type": m.var_type(),
            "pruned_type": m.pruned_type(),
            "lambda": m.lam,
        },
        args,
    )
    return EXIT_OK


def cmd_export_lp(args) -> int:
    text = to_lp(_model(args))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _summary(model, res: SolveResult) -> dict:
    out = res.to_json()
    if res.selection and model.orbits is None:
        out["representatives"] = [hex(model.var_keys[j]) for j in res.selection]
    elif res.selection:
        code = model.decode(res.selection)
        out["code_size"] = len(code)
        out["min_distance"] = code.min_distance()
    return out


def cmd_solve(args) -> int:
    if bool(args.model) == bool(args.group):
        raise SystemExit("give exactly one of --model or --group")
    cfg = _config(args)
    if args.model:
        model = read_lp(args.model)
        res = solve(model, cfg)
    else:
        g = _group(args.group)
        model = build_model(7, 3, 4, g, lam=args.lam)
        if args.portfolio:
            from .normalizer import normalizer_of_cyclic

            if len(g.generators) != 1:
                raise SystemExit("--portfolio needs a cyclic group given by one generator")
            norm = normalizer_of_cyclic(g.generators[0]).group
            res = solve_portfolio(model, make_subproblems(model, g, norm.generators), cfg)
        else:
            res = solve(model, cfg)
    out = _summary(model, res)
    if args.output and res.selection and model.orbits is not None:
        Path(args.output).write_text(format_code(model.decode(res.selection).words))
    _emit(out, args)
    return _solve_exit(res)


def cmd_normalizer(args) -> int:
    from .normalizer import normalizer_of_cyclic

    rec = resolve_group(args.group)
    if len(rec.generators) != 1:
        raise SystemExit("normalizer expects a cyclic group given by one generator")
    nr = normalizer_of_cyclic(rec.generators[0])
    for k, cnt in sorted(nr.slices.items()):
        log.info("slice k=%d: %d solutions", k, cnt)
    if args.output:
        Path(args.output).write_text(group_to_json(nr.group, f"N({rec.name})", order=nr.group.order) + "\n")
    _emit(
        {
            "group": rec.name,
            "order": nr.group.order,
            "centralizer_dim": nr.centralizer_dim,
            "slices": {str(k): v for k, v in sorted(nr.slices.items())},
        },
        args,
    )
    return EXIT_OK


def _groups_in(path: str) -> list[MatrixGroup]:
    p = Path(path)
    files = sorted(p.glob("*.json")) if p.is_dir() else [p]
    out = []
    for f in files:
        rec = load_group_file(f)
        out.append(rec.closure().with_name(rec.name))
    return out


def cmd_ladder(args) -> int:
    from .normalizer import LadderInput, drop_containing, ladder_search, normalizer_in, normalizer_of_cyclic

    ts = _groups_in(args.t_classes)
    if not ts:
        raise SystemExit(f"no group files in {args.t_classes}")
    ambient = _group(args.ambient) if args.ambient else None
    pairs = []
    for t in ts:
        if ambient is not None:
            pairs.append((t, normalizer_in(t, ambient)))
        elif len(t.generators) == 1:
            pairs.append((t, normalizer_of_cyclic(t.generators[0]).group))
        else:
            raise SystemExit(f"{t.name}: normalizers in GL are implemented for cyclic groups only")
    res = ladder_search(LadderInput(pairs, ts[0].order, args.u, ambient=ambient))
    for line in res.log:
        log.info(line)
    groups = res.groups
    if args.exclude:
        groups = drop_containing(groups, _groups_in(args.exclude))
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for i, g in enumerate(groups, 1):
            (out / f"G_{args.u}_{i}.json").write_text(group_to_json(g, f"G_{args.u}_{i}", order=g.order) + "\n")
    _emit(
        {
            "u": args.u,
            "classes_lower": res.lower,
            "classes_upper": res.upper,
            "kept": len(groups),
            "types": [str(fingerprint(g)) if g.order <= 64 else f"order {g.order}" for g in groups],
        },
        args,
    )
    return EXIT_OK


def cmd_aut(args) -> int:
    from .automorphisms import SearchBudgetExceeded, automorphism_search

    code = appendix_code() if args.path is None else _read_code(args.path, args.format)
    try:
        res = automorphism_search(code, budget=parse_duration(args.budget))
    except SearchBudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    info = {"order": res.order, "orbit_lengths": res.orbit_lengths, "generators": [m.to_lists() for m in res.group.generators]}
    if res.order <= 64:
        info["type"] = str(fingerprint(res.group))
    _emit(info, args)
    return EXIT_OK


def cmd_improve(args) -> int:
    g = _group(args.group)
    code = appendix_code() if args.code is None else _read_code(args.code, args.format, g)
    model = build_model(7, 3, 4, g, lam=args.lam)
    if args.c > len(code):
        log.warning("c = %d exceeds the %d reference codewords; the model is infeasible", args.c, len(code))
    res = solve(add_closeness(model, code, args.c), _config(args))
    out = _summary(model, res)
    out["reference_size"] = len(code)
    out["improved"] = res.objective > len(code)
    if args.output and res.selection:
        Path(args.output).write_text(format_code(model.decode(res.selection).words))
    _emit(out, args)
    return _solve_exit(res)


def cmd_battery(args) -> int:
    from .verify import run_battery

    rep = run_battery(fast=args.fast, long=args.long, echo=None if args.json else print)
    if args.json:
        print(rep.to_json())
    else:
        s = rep.summary
        print(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped")
    return rep.exit_code()


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcf", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, solver=False, code=False, model=False):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if code:
            sp.add_argument("--format", default="auto", choices=["auto", "appendix", "json"], help="code file format")
        if model:
            sp.add_argument("--lambda", dest="lam", type=int, default=1)
        if solver:
            sp.add_argument("--kappa", type=int, default=328)
            sp.add_argument("--target", type=int)
            sp.add_argument("--mode", choices=["optimize", "decide"], default="optimize")
            sp.add_argument("--bound", choices=["counting", "refined"], default="counting")
            sp.add_argument("--budget", default="48h", help="time budget, e.g. 90s, 10m, 48h")
            sp.add_argument("--threads", type=int, default=1)
            sp.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True)
            sp.add_argument("-o", "--output", help="write the decoded code here")

    sp = sub.add_parser("gauss", help="Gaussian binomial coefficient")
    sp.add_argument("n", type=int)
    sp.add_argument("k", type=int)
    sp.add_argument("--q", type=int, default=2)
    sp.set_defaults(func=cmd_gauss)

    sp = sub.add_parser("decode", help="decode a code file")
    sp.add_argument("path")
    sp.add_argument("--format", default="auto", choices=["auto", "appendix", "json"])
    sp.add_argument("--to", default="json", choices=["appendix", "json", "keys"])
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("verify-code", help="check size, distance, orbit type, hyperplane count, |Aut|")
    sp.add_argument("path", nargs="?", help="code file (default: bundled witness)")
    sp.add_argument("--group", help="prescribed group; file rows are then orbit representatives")
    sp.add_argument("--expect", help='JSON dict of expected values, e.g. \'{"size": 333}\'')
    sp.add_argument("--budget", default="10m")
    common(sp, code=True)
    sp.set_defaults(func=cmd_verify_code)

    sp = sub.add_parser("group-info", help="order and type of a group")
    sp.add_argument("group")
    common(sp)
    sp.set_defaults(func=cmd_group_info)

    sp = sub.add_parser("orbits", help="orbit type on k-subspaces")
    sp.add_argument("--group", required=True)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--n", type=int, default=7)
    common(sp)
    sp.set_defaults(func=cmd_orbits)

    for verb, fn in (("km-build", cmd_km_build), ("export-lp", cmd_export_lp)):
        sp = sub.add_parser(verb, help="orbit-incidence model" if verb == "km-build" else "write the model as an LP file")
        sp.add_argument("--group", required=True)
        sp.add_argument("--no-prune", action="store_true")
        if verb == "export-lp":
            sp.add_argument("-o", "--output")
        common(sp, model=True)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("solve", help="branch and bound on a model")
    sp.add_argument("--model", help="LP file written by export-lp")
    sp.add_argument("--group")
    sp.add_argument("--portfolio", action="store_true", help="split by normalizer subproblems")
    common(sp, solver=True, model=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("normalizer", help="normalizer of a cyclic group")
    sp.add_argument("--group", required=True)
    sp.add_argument("-o", "--output", help="write the normalizer as a group file")
    common(sp)
    sp.set_defaults(func=cmd_normalizer)

    sp = sub.add_parser("ladder", help="extend order-t classes to order u")
    sp.add_argument("--t-classes", required=True, help="directory of group files (or one file)")
    sp.add_argument("--u", type=int, required=True)
    sp.add_argument("--ambient", help="fuse up to conjugacy in this group instead of GL(7,2)")
    sp.add_argument("--exclude", help="group files whose conjugates must not be contained")
    sp.add_argument("-o", "--output", help="directory for the resulting group files")
    common(sp)
    sp.set_defaults(func=cmd_ladder)

    sp = sub.add_parser("aut", help="automorphism group of a code")
    sp.add_argument("path", nargs="?", help="code file (default: bundled witness)")
    sp.add_argument("--budget", default="10m")
    common(sp, code=True)
    sp.set_defaults(func=cmd_aut)

    sp = sub.add_parser("improve", help="search near a reference code")
    sp.add_argument("--code", help="reference code (default: bundled witness)")
    sp.add_argument("--group", required=True)
    sp.add_argument("--c", type=int, required=True, help="minimum number of reference words kept")
    common(sp, solver=True, code=True, model=True)
    sp.set_defaults(func=cmd_improve)

    sp = sub.add_parser("verify-paper", help="run the reproduction battery")
    sp.add_argument("--fast", action="store_true", help="skip the slower solver checks")
    sp.add_argument("--long", action="store_true", help="also prove optimality for the order-31 model")
    common(sp)
    sp.set_defaults(func=cmd_battery)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (CodeFormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
