"""borelsd command line.

Exit codes: 0 success, 1 mathematical mismatch, 2 input error, 3 cap or timeout.
Settings resolve as flag, then BORELSD_<NAME> environment variable, then default.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .borel import (
    borel_conditions,
    chain_report,
    regularity_family,
    regularity_via_chain,
    regularity_via_decomposition,
)
from .errors import FamilyError, HypothesisError, IdealError, InfeasibleError
from .family import (
    DEFAULT_TRIAL_BUDGET,
    BorelFamily,
    build_ideals,
    family_from_dict,
    question_search,
    random_family,
    reduced,
    run_campaign,
    run_families,
)
from .monomial import MonomialIdeal, format_monomial, ideal_from_dict, parse_ideal
from .sdepth import (
    DEFAULT_BOX_CAP,
    IDEAL,
    QUOTIENT,
    char_poset,
    decomposition_from_partition,
    decomposition_report,
    sdepth_exact,
    verify_decomposition,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
FORMATS = ("json", "text", "csv")


@dataclass(frozen=True)
class CommandConfig:
    command: str
    inputs: tuple[str, ...]
    output: Optional[str]
    format: str
    box_cap: int
    time_budget: Optional[float]
    seed: int
    workers: int
    syntax: str
    nvars: Optional[int]

    def __post_init__(self):
        if self.box_cap <= 0:
            raise IdealError(f"box cap must be positive, got {self.box_cap}")
        if self.time_budget is not None and self.time_budget <= 0:
            raise IdealError(f"time budget must be positive, got {self.time_budget}")
        if self.workers < 1:
            raise IdealError(f"workers must be at least 1, got {self.workers}")
        if self.format not in FORMATS:
            raise IdealError(f"unknown format {self.format!r}")


def _setting(args, name: str, cast, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    env = os.environ.get("BORELSD_" + name.upper())
    if env is not None and env != "":
        try:
            return cast(env)
        except ValueError as exc:
            raise IdealError(f"bad BORELSD_{name.upper()}={env!r}") from exc
    return default


def resolve_config(args) -> CommandConfig:
    workers = _setting(args, "workers", int, 1)
    if args.canonical or args.command == "reproduce":
        workers = 1
    inputs = tuple(x for x in (args.input or []) if x)
    return CommandConfig(
        command=args.command,
        inputs=inputs,
        output=args.output,
        format=_setting(args, "format", str, "json"),
        box_cap=_setting(args, "box_cap", int, DEFAULT_BOX_CAP),
        time_budget=_setting(args, "time_budget", float, None),
        seed=_setting(args, "seed", int, 0),
        workers=workers,
        syntax=_setting(args, "syntax", str, "auto"),
        nvars=args.nvars,
    )


# -- input ----------------------------------------------------------------------

def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise IdealError(f"cannot read {path}: {exc}") from exc


def load_input(path: str, syntax: str = "auto", nvars: Optional[int] = None):
    """Ideal or family from a file; JSON vs human syntax by extension unless forced."""
    text = _read_text(path)
    if syntax == "auto":
        if path == "-":
            syntax = "json" if text.lstrip().startswith("{") else "human"
        else:
            syntax = "json" if path.endswith(".json") else "human"
    if syntax == "human":
        return parse_ideal(text, nvars)
    if syntax != "json":
        raise IdealError(f"unknown syntax {syntax!r}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IdealError(f"malformed JSON in {path}: {exc}") from exc
    if isinstance(data, dict) and "levels" in data:
        return family_from_dict(data)
    return ideal_from_dict(data)


def _ideal(obj) -> MonomialIdeal:
    return build_ideals(obj)[0] if isinstance(obj, BorelFamily) else obj


def _one_input(cfg: CommandConfig):
    if len(cfg.inputs) != 1:
        raise IdealError(f"{cfg.command} needs exactly one --input")
    return load_input(cfg.inputs[0], cfg.syntax, cfg.nvars)


# -- output ---------------------------------------------------------------------

def _table_text(header: list[str], rows: list[list]) -> str:
    cells = [header] + [["-" if v is None else str(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _table_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([["" if v is None else v for v in r] for r in rows])
    return buf.getvalue()


def _emit(cfg: CommandConfig, doc: dict, header: list[str], rows: list[list], summary: str = "") -> None:
    if cfg.format == "json":
        text = json.dumps(doc, indent=1) + "\n"
    elif cfg.format == "csv":
        text = _table_csv(header, rows)
    else:
        text = (summary + "\n" if summary else "") + _table_text(header, rows)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------

def cmd_borel_check(cfg: CommandConfig) -> int:
    I = _ideal(_one_input(cfg))
    conds = borel_conditions(I)
    borel = all(c.holds for c in conds)
    doc = {
        "n": I.n,
        "gens": [list(g) for g in I.gens],
        "borel_type": borel,
        "conditions": [
            {"j": c.j, "holds": c.holds,
             "sat_by_variable": [list(g) for g in c.sat_by_variable.gens],
             "sat_by_prefix": [list(g) for g in c.sat_by_prefix.gens]}
            for c in conds
        ],
    }
    rows = [[c.j, c.holds, str(c.sat_by_variable), str(c.sat_by_prefix)] for c in conds]
    _emit(cfg, doc, ["j", "holds", "sat_by_variable", "sat_by_prefix"], rows,
          f"{I}: {'Borel type' if borel else 'not Borel type'}")
    return EXIT_OK if borel else EXIT_MISMATCH


def _regularity_routes(obj) -> dict:
    I = _ideal(obj)
    routes = {"chain": regularity_via_chain(I), "decomposition": regularity_via_decomposition(I)}
    if isinstance(obj, BorelFamily):
        tail = reduced(obj)
        if tail.monotone:
            routes["family"] = regularity_family(tail, 0)
    return routes


def cmd_chain(cfg: CommandConfig) -> int:
    obj = _one_input(cfg)
    doc = chain_report(_ideal(obj))
    routes = _regularity_routes(obj)
    doc["regularity"] = routes
    doc["regularity_agree"] = len(set(routes.values())) == 1
    rows = [[lv["i"], lv["n_i"], lv["s_value"], lv["depth_S_mod_I"], lv["depth_I"],
             "; ".join(format_monomial(tuple(g)) for g in lv["gens_I"])] for lv in doc["levels"]]
    summary = "regularity " + ", ".join(f"{k}={v}" for k, v in routes.items())
    _emit(cfg, doc, ["i", "n_i", "s_value", "depth_S_mod_I", "depth_I", "gens"], rows, summary)
    return EXIT_OK if doc["regularity_agree"] else EXIT_MISMATCH


def cmd_reg(cfg: CommandConfig) -> int:
    routes = _regularity_routes(_one_input(cfg))
    agree = len(set(routes.values())) == 1
    doc = {"regularity": routes, "agree": agree}
    _emit(cfg, doc, ["route", "regularity"], [[k, v] for k, v in routes.items()])
    return EXIT_OK if agree else EXIT_MISMATCH


def cmd_sdepth(cfg: CommandConfig, quotient: bool, decomp: bool, verify: bool) -> int:
    I = _ideal(_one_input(cfg))
    mode = QUOTIENT if quotient else IDEAL
    P = char_poset(I, mode, box_cap=cfg.box_cap)
    value, part = sdepth_exact(P, time_budget=cfg.time_budget, workers=cfg.workers)
    D = decomposition_from_partition(P, part)
    check = verify_decomposition(I, D) if verify else None
    doc = decomposition_report(I, mode, value, part, check)
    if decomp:
        doc["spaces"] = [{"c": list(c), "Z": sorted(Z)} for c, Z in D.spaces]
    rows = [[iv["c"], iv["d"], iv["Z"]] for iv in doc["intervals"]]
    summary = f"sdepth = {value} ({mode}, g = {list(P.g)})"
    if check is not None:
        summary += f", verified up to degree {check.degree_cap}: {check.ok}"
    _emit(cfg, doc, ["c", "d", "Z"], rows, summary)
    return EXIT_MISMATCH if check is not None and not check.ok else EXIT_OK


def _report_out(cfg: CommandConfig, report) -> None:
    text = {"json": report.to_json, "csv": report.to_csv, "text": report.to_text}[cfg.format]()
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _campaign_failed(rows) -> bool:
    return any(
        r.lower_ok is False or r.upper_ok is False or r.quotient_ok is False
        or r.regularity_ok is False or r.certified is False or not r.chain_is_subsequence
        for r in rows
    )


def cmd_family(cfg: CommandConfig, args) -> int:
    budget = cfg.time_budget or DEFAULT_TRIAL_BUDGET
    if args.action == "gen":
        F = random_family(args.n, args.m, args.max_exp, not args.non_monotone, cfg.seed)
        text = json.dumps(F.to_dict()) + "\n"
        if cfg.output:
            Path(cfg.output).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.action == "run":
        if cfg.inputs:
            families = []
            for path in cfg.inputs:
                obj = load_input(path, "json")
                if not isinstance(obj, BorelFamily):
                    raise FamilyError(f"{path} is not a family document")
                families.append(obj)
            report = run_families(families, {"kind": "files", "inputs": list(cfg.inputs), "seed": cfg.seed},
                                  budget, cfg.box_cap, cfg.workers)
        else:
            report = run_campaign(args.count, args.max_n, args.max_m, args.max_exp, cfg.seed,
                                  budget, cfg.box_cap, cfg.workers)
        _report_out(cfg, report)
        # the bounds are only claimed for monotone families
        return EXIT_MISMATCH if _campaign_failed([r for r in report.rows if r.monotone]) else EXIT_OK
    report = question_search(args.max_n, args.max_m, args.max_exp, args.trials, cfg.seed,
                             budget, args.witness_dir, cfg.box_cap, cfg.workers, strict=args.strict)
    _report_out(cfg, report)
    return EXIT_OK


def cmd_reproduce(cfg: CommandConfig) -> int:
    from .reproduce import reference_checks

    checks = reference_checks(cfg.box_cap, cfg.time_budget)
    doc = {"version": __version__, "all_ok": all(c.ok for c in checks),
           "checks": [c.to_dict() for c in checks]}
    rows = [["pass" if c.ok else "FAIL", c.name, json.dumps(c.expected), json.dumps(c.got)] for c in checks]
    _emit(cfg, doc, ["result", "check", "expected", "got"], rows)
    return EXIT_OK if doc["all_ok"] else EXIT_MISMATCH


# -- parser ---------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", "--input", action="append", help="input file (repeatable; '-' for stdin)")
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.add_argument("--format", choices=FORMATS, help="json (default), text or csv")
    p.add_argument("--box-cap", type=int, dest="box_cap", help=f"largest poset box (default {DEFAULT_BOX_CAP})")
    p.add_argument("--time-budget", type=float, dest="time_budget", help="seconds per instance")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="solver processes (default 1)")
    p.add_argument("--canonical", action="store_true", help="single-threaded deterministic search")
    p.add_argument("--syntax", choices=("auto", "json", "human"), help="input syntax (default: by extension)")
    p.add_argument("--nvars", type=int, help="number of variables for human-syntax input")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="borelsd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("borel-check", help="test (I : x_j^inf) = (I : (x1..xj)^inf) for every j"))
    _common(sub.add_parser("chain", help="sequential chain, s-values, depths and regularity"))
    _common(sub.add_parser("reg", help="regularity by every applicable route"))

    p = sub.add_parser("sdepth", help="exact Stanley depth with a witness decomposition")
    _common(p)
    p.add_argument("--quotient", action="store_true", help="work with S/I instead of I")
    p.add_argument("--decomp", action="store_true", help="list the Stanley spaces")
    p.add_argument("--verify", action="store_true", help="check the decomposition monomial by monomial")
    p = sub.add_parser("sdepth-quotient", help="same as sdepth --quotient")
    _common(p)
    p.add_argument("--decomp", action="store_true")
    p.add_argument("--verify", action="store_true")
    p = sub.add_parser("decomp", help="same as sdepth --decomp")
    _common(p)
    p.add_argument("--quotient", action="store_true")
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("family", help="generate families and run bound experiments")
    fam = p.add_subparsers(dest="action", required=True)
    g = fam.add_parser("gen", help="one random family")
    _common(g)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--max-exp", type=int, default=3, dest="max_exp")
    g.add_argument("--non-monotone", action="store_true", dest="non_monotone",
                   help="do not enforce a_ij >= a_{i+1,j}")
    r = fam.add_parser("run", help="exact invariants per level, from files or a seeded campaign")
    _common(r)
    r.add_argument("--count", type=int, default=200)
    r.add_argument("--max-n", type=int, default=5, dest="max_n")
    r.add_argument("--max-m", type=int, default=2, dest="max_m")
    r.add_argument("--max-exp", type=int, default=3, dest="max_exp")
    q = fam.add_parser("question", help="bounds on non-monotone families, with witness files")
    _common(q)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--max-n", type=int, default=5, dest="max_n")
    q.add_argument("--max-m", type=int, default=2, dest="max_m")
    q.add_argument("--max-exp", type=int, default=3, dest="max_exp")
    q.add_argument("--witness-dir", default="witnesses", dest="witness_dir")
    q.add_argument("--strict", action="store_true",
                   help="only families still non-monotone after dropping redundant components")

    _common(sub.add_parser("reproduce", help="recompute the known reference values"))
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "borel-check":
            return cmd_borel_check(cfg)
        if args.command == "chain":
            return cmd_chain(cfg)
        if args.command == "reg":
            return cmd_reg(cfg)
        if args.command in ("sdepth", "sdepth-quotient", "decomp"):
            return cmd_sdepth(
                cfg,
                quotient=args.command == "sdepth-quotient" or getattr(args, "quotient", False),
                decomp=args.command == "decomp" or getattr(args, "decomp", False),
                verify=getattr(args, "verify", False),
            )
        if args.command == "family":
            return cmd_family(cfg, args)
        return cmd_reproduce(cfg)
    except InfeasibleError as exc:
        _error("infeasible", str(exc))
        return EXIT_CAP
    except (IdealError, FamilyError, HypothesisError) as exc:
        _error("input", str(exc))
        return EXIT_INPUT


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
