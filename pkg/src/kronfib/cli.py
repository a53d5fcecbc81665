"""Command-line front end.

Exit codes: 0 success, 1 experiment verdict "fail", 2 usage or domain error,
3 unreadable or malformed input file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import bundles, harness
from . import kronrep as kr
from .decomp import decompose
from .linalg import DEFAULT_PRIME, FieldSpec
from .sequence import fib_table

DEFAULT_SEED = 1729

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BAD_FILE = 3


class _InputError(Exception):
    pass


def _field(args) -> FieldSpec:
    if args.field == "q":
        return FieldSpec.rationals()
    return FieldSpec.fp(args.prime)


def _emit(text: str, path: str | None = None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _kv(pairs) -> str:
    return "\n".join(f"{k}={v}" for k, v in pairs)


def _b(v: bool) -> str:
    return "true" if v else "false"


def _read_rep(path: str) -> kr.KroneckerRep:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return kr.rep_from_json(text)
    except kr.RepFormatError as exc:
        raise _InputError(f"{path}: {exc}") from None


# ---------------------------------------------------------------- commands

def cmd_seq(args) -> int:
    table = fib_table(args.w, args.k)
    if args.format == "json":
        _emit(json.dumps({"w": args.w, "values": [str(v) for v in table.values]},
                         separators=(",", ":")))
    elif args.format == "csv":
        _emit(_csv([{"k": k, "value": v} for k, v in enumerate(table.values)]))
    else:
        _emit(" ".join(str(v) for v in table.values))
    return EXIT_OK


def _preset_from_args(args) -> bundles.PairPreset:
    wanted = {
        "steiner": ("N", "d"),
        "omega_target": ("N", "p"),
        "omega_source": ("N", "p"),
        "p2_symq": ("p", "r", "d"),
    }[args.preset]
    params = {}
    for key in wanted:
        value = getattr(args, key)
        if value is None:
            raise ValueError(f"--{key} is required for preset {args.preset}")
        params[key] = value
    return bundles.make_preset(args.preset, **params)


def classification_dict(c: bundles.Classification) -> dict:
    pr = c.preset
    d = {
        "preset": pr.label(),
        "w": pr.w,
        "rkE": pr.rkE,
        "rkF": pr.rkF,
        "flags": {"basic": pr.flags.basic, "R": pr.flags.R},
        "s": c.shape.s,
        "t": c.shape.t,
        "q": c.q,
        "admissible": c.admissible,
        "simple": c.simple,
        "decomposition": None,
        "stability": c.verdict.value,
        "exceptional_stable": c.exceptional_stable,
    }
    if c.decomposition is not None:
        dec = c.decomposition
        d["decomposition"] = {"k": dec.k, "n": dec.n, "m": dec.m, "label": dec.label()}
    if pr.name == "steiner":
        d["exceptional_range"] = bundles.exceptional_range(pr.N, pr.param("d"))
    hom_fc, hom_ec = bundles.cokernel_hom_dims(pr, c.shape)
    d["hom_F_C"] = hom_fc
    d["hom_E_C"] = hom_ec
    d["notes"] = list(c.notes)
    return d


def cmd_classify(args) -> int:
    preset = _preset_from_args(args)
    c = bundles.classify(preset, (args.s, args.t))
    d = classification_dict(c)
    if args.format == "json":
        _emit(json.dumps(d, separators=(",", ":")))
        return EXIT_OK
    flat = []
    for k, v in d.items():
        if k == "flags":
            flat += [("basic", _b(v["basic"])), ("R", _b(v["R"]))]
        elif k == "decomposition":
            flat.append((k, "none" if v is None else v["label"]))
        elif k == "notes":
            flat += [("note", n) for n in v]
        else:
            flat.append((k, _b(v) if isinstance(v, bool) else v))
    if args.format == "csv":
        _emit(_csv([{k: v for k, v in flat if k != "note"}]))
    else:
        _emit(_kv(flat))
    return EXIT_OK


def cmd_gen(args) -> int:
    field = _field(args)
    if args.canonical:
        for key in ("k", "n", "m"):
            if getattr(args, key) is None:
                raise ValueError(f"--{key} is required with --canonical")
        X = kr.canonical_rep(args.w, args.k, args.n, args.m, field, args.seed)
    else:
        if args.s is None or args.t is None:
            raise ValueError("--s and --t are required (or use --canonical)")
        X = kr.random_rep(args.w, (args.s, args.t), field, args.seed)
    _emit(kr.rep_to_json(X), args.output)
    return EXIT_OK


def cmd_hom(args) -> int:
    X, Y = _read_rep(args.source), _read_rep(args.target)
    h, e = kr.hom_ext(X, Y)
    chi = kr.euler_form(X.w, X.shape, Y.shape)
    if args.format == "json":
        _emit(json.dumps({"hom": h, "ext": e, "euler": chi}, separators=(",", ":")))
    elif args.format == "csv":
        _emit(_csv([{"hom": h, "ext": e, "euler": chi}]))
    else:
        _emit(f"hom={h} ext={e} euler={chi}")
    return EXIT_OK


def cmd_iso(args) -> int:
    X, Y = _read_rep(args.first), _read_rep(args.second)
    verdict = kr.is_isomorphic(X, Y, args.trials, args.seed)
    if args.format == "json":
        _emit(json.dumps({"isomorphic": verdict, "trials": args.trials}, separators=(",", ":")))
    elif args.format == "csv":
        _emit(_csv([{"isomorphic": _b(verdict), "trials": args.trials}]))
    else:
        _emit(f"isomorphic={_b(verdict)} trials={args.trials}")
    return EXIT_OK


def _run_experiment(args) -> harness.ExperimentReport:
    field = _field(args)
    common = {"field": field, "seed": args.seed, "workers": args.workers}
    if args.name == "kac":
        return harness.kac_experiment(args.w, args.s_max, args.t_max, args.trials or 20, **common)
    if args.name == "hom_table":
        return harness.hom_table_experiment(args.w, args.k_max, args.trials or 10, **common)
    w_values = tuple(int(x) for x in args.w_values.split(","))
    return harness.euler_experiment(w_values, args.dim_cap, args.pairs, **common)


def cmd_experiment(args) -> int:
    report = _run_experiment(args)
    if args.output:
        _emit(report.to_json(), args.output)
    if args.format == "json":
        if not args.output:
            _emit(report.to_json())
    elif args.format == "csv":
        _emit(_csv(report.summary_rows()))
    else:
        failed = report.failures()
        lines = [("experiment", report.name), ("seed", report.seed),
                 ("cells", len(report.cells)), ("failed", len(failed)),
                 ("verdict", report.verdict), ("wall_time", f"{report.wall_time:.3f}")]
        for c in failed:
            lines.append(("failed_cell", f"{c.label} {c.check} passes={c.passes}/{c.trials}"))
        _emit(_kv(lines))
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kronfib",
        description="Fibonacci sequences, Kronecker representations and cokernel bundles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    def field_opts(p):
        p.add_argument("--field", choices=("fp", "q"), default="fp")
        p.add_argument("--prime", type=int, default=DEFAULT_PRIME)

    def seed_opt(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"master seed (default {DEFAULT_SEED})")

    p = sub.add_parser("seq", help="print a_0 .. a_K")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    fmt(p)
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("classify", help="classify a shape for a preset pair (E, F)")
    p.add_argument("--preset", choices=bundles.PRESET_KINDS, required=True)
    for key in ("N", "d", "p", "r"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    fmt(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gen", help="write a random or canonical representation as JSON")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--s", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--canonical", action="store_true")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("-o", "--output")
    field_opts(p)
    seed_opt(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("hom", help="dimensions of Hom and Ext^1 between two rep files")
    p.add_argument("source")
    p.add_argument("target")
    fmt(p)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("iso", help="randomized isomorphism test (true is certain)")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--trials", type=int, default=5)
    seed_opt(p)
    fmt(p)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("experiment", help="run a seeded experiment and report")
    p.add_argument("name", choices=sorted(harness.EXPERIMENTS))
    p.add_argument("--w", type=int, default=3)
    p.add_argument("--s-max", type=int, default=6)
    p.add_argument("--t-max", type=int, default=14)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--trials", type=int, help="per cell (default 20 for kac, 10 for hom_table)")
    p.add_argument("--w-values", default="3,4,5")
    p.add_argument("--dim-cap", type=int, default=8)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", help="write the JSON report here")
    field_opts(p)
    seed_opt(p)
    fmt(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    except (ValueError, TypeError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
