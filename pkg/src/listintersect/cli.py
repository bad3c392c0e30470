"""Command-line front end.

Every subcommand prints one JSON document to stdout (a plain-text table with
``--pretty``).  Parameters can come from flags or from a JSON ``--config``
file whose keys are the long flag names with dashes replaced by
underscores; flags win over the file, and unknown keys are rejected.

Exit codes: 0 success, 1 a ``reproduce`` cell outside tolerance, 2 invalid
input, 3 file I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional

from . import reproduce as repro
from .correlation import corrected_tail
from .design import DesignRequest, bonferroni_alpha, optimize_design, sensitivity_curve_csv
from .errors import ValidationError
from .lists import intersect_concordance, intersect_discovery, read_candidate_list, read_ranked_list
from .montecarlo import AltSimResult, SimConfig, simulate
from .null_model import expected_null, fdr_estimate, set_pvalue
from .params import ALT_I, ALT_II, AlternativeSpec, EnsembleParams, ModuleModel, TestParams

EXIT_OK, EXIT_TOLERANCE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3

NAMED_ALTERNATIVES = {"I": ALT_I, "II": ALT_II}


class CLIError(ValidationError):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _add_ensemble(p: argparse.ArgumentParser) -> None:
    p.add_argument("--studies", type=int, help="number of studies N")
    p.add_argument("--genes", type=int, help="genes per study T")


def _add_test(p: argparse.ArgumentParser, with_m: bool = True) -> None:
    p.add_argument("--r", type=int, help="rank threshold")
    p.add_argument("--n", type=int, help="recapture rate")
    if with_m:
        p.add_argument("--m", type=int, help="candidate list size (concordance test)")


def _add_correlation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corr-module-size", type=int, help="size of correlated gene modules")
    p.add_argument("--corr-rho", type=float, help="within-module correlation (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="listintersect", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with default parameter values")
    common.add_argument("--pretty", action="store_true", default=None, help="human-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("null", parents=[common], help="null expectation, p-value and FDR estimate")
    _add_ensemble(p)
    _add_test(p)
    p.add_argument("--observed", type=int, help="observed set size")
    _add_correlation(p)

    p = sub.add_parser("design", parents=[common], help="optimal (n, r) under an FDR budget")
    _add_ensemble(p)
    p.add_argument("--alt", action="append", help="alternative: I, II or 'tp=25,mu=3,label=X' "
                                                 "(repeatable)")
    p.add_argument("--q", type=float, help="FDR budget")
    p.add_argument("--alpha", type=float, help="family-wise significance level")
    p.add_argument("--strict", action="store_true", default=None,
                   help="fail if some alternative has no feasible design")
    p.add_argument("--curve-csv", type=Path, help="write the sensitivity curve here")

    p = sub.add_parser("test", parents=[common], help="discovery or concordance test on list files")
    p.add_argument("lists", nargs="*", type=Path, help="ranked-list TSV files, one per study")
    p.add_argument("--genes", type=int, help="genes per study T")
    _add_test(p, with_m=False)
    p.add_argument("--candidates", type=Path, help="candidate-list file (concordance test)")
    p.add_argument("--mc-reps", type=_positive_int, help="add a simulated p-value")
    p.add_argument("--seed", type=int)
    _add_correlation(p)

    p = sub.add_parser("simulate", parents=[common], help="simulated distribution of the set size")
    _add_ensemble(p)
    _add_test(p)
    p.add_argument("--reps", type=_positive_int, help="replications")
    p.add_argument("--seed", type=int)
    p.add_argument("--alt", help="alternative (I, II or 'tp=...,mu=...')")
    _add_correlation(p)
    p.add_argument("--observed", type=int, help="also report P(count >= observed)")
    p.add_argument("--workers", type=_positive_int, help="threads (default from environment)")
    p.add_argument("--histogram-csv", type=Path, help="write the histogram here")

    p = sub.add_parser("reproduce", parents=[common], help="compare with the published tables")
    p.add_argument("--table", choices=repro.TABLES, help="which table")
    p.add_argument("--mc-reps", type=_positive_int, help="also rerun the simulated column of table 4")

    return parser


DEFAULTS = {
    "null": {"m": None, "corr_module_size": None, "corr_rho": 1.0},
    "design": {"alt": ["I", "II"], "q": 0.01, "alpha": 0.05, "strict": False, "curve_csv": None},
    "test": {"candidates": None, "mc_reps": None, "seed": 0, "corr_module_size": None,
             "corr_rho": 1.0},
    "simulate": {"m": None, "reps": 100_000, "seed": 0, "alt": None, "corr_module_size": None,
                 "corr_rho": 1.0, "observed": None, "workers": None, "histogram_csv": None},
    "reproduce": {"mc_reps": None},
}
SKIP = {"command", "config"}


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge flags over the config file over the built-in defaults."""
    keys = [k for k in vars(args) if k not in SKIP]
    file_values: dict[str, Any] = {}
    if args.config is not None:
        try:
            file_values = json.loads(args.config.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CLIError(f"config {args.config}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise CLIError("config must be a JSON object")
        unknown = sorted(set(file_values) - set(keys))
        if unknown:
            raise CLIError(f"unknown config keys for '{args.command}': {unknown}")
    cfg = dict(DEFAULTS[args.command])
    cfg.setdefault("pretty", False)
    cfg.update(file_values)
    for k in keys:
        v = getattr(args, k)
        if v is not None and not (k == "lists" and v == []):
            cfg[k] = v
    for k in keys:
        cfg.setdefault(k, None)
    missing = [k for k in _required(args.command) if cfg.get(k) is None]
    if missing:
        raise CLIError(f"missing required parameters: {', '.join('--' + k.replace('_', '-') for k in missing)}")
    return cfg


def _required(command: str) -> list[str]:
    return {
        "null": ["studies", "genes", "r", "n", "observed"],
        "design": ["studies", "genes"],
        "test": ["genes", "r", "n"],
        "simulate": ["studies", "genes", "r", "n"],
        "reproduce": ["table"],
    }[command]


def _alternative(value) -> AlternativeSpec:
    if isinstance(value, dict):
        return AlternativeSpec.from_dict(value)
    if value in NAMED_ALTERNATIVES:
        return NAMED_ALTERNATIVES[value]
    return AlternativeSpec.parse(str(value))


def _correlation(cfg) -> Optional[ModuleModel]:
    if cfg.get("corr_module_size") is None:
        return None
    return ModuleModel(int(cfg["corr_module_size"]), float(cfg["corr_rho"]))


def _jsonable(cfg: dict) -> dict:
    return {k: (str(v) if isinstance(v, Path) else [str(x) for x in v] if k == "lists" else v)
            for k, v in cfg.items() if k != "pretty"}


def cmd_null(cfg) -> dict:
    e = EnsembleParams(cfg["studies"], cfg["genes"])
    t = TestParams(cfg["r"], cfg["n"], cfg["m"])
    t.validate_against(e)
    observed = cfg["observed"]
    s = expected_null(e, t)
    pv = set_pvalue(s, observed)
    out = {
        "kind": s.kind,
        "observed": observed,
        "expected_null": s.expected_count,
        "recapture_prob": s.recapture_prob,
        "p_poisson": pv.poisson_pvalue,
        "p_binomial": pv.binomial_pvalue,
        "fdr_hat": fdr_estimate(s, observed) if observed >= 1 else None,
        "flags": s.flags.to_dict(),
    }
    if observed < 1:
        out["fdr_hat_note"] = "undefined: no genes observed"
    model = _correlation(cfg)
    if model is not None:
        out["p_corrected"] = corrected_tail(e, t, model, observed).to_dict()
    return out


def cmd_design(cfg) -> dict:
    e = EnsembleParams(cfg["studies"], cfg["genes"])
    alts = cfg["alt"] if isinstance(cfg["alt"], list) else [cfg["alt"]]
    req = DesignRequest(e, tuple(_alternative(a) for a in alts), cfg["q"], cfg["alpha"])
    tables = optimize_design(req, strict=bool(cfg["strict"]))
    if cfg["curve_csv"]:
        Path(cfg["curve_csv"]).write_text(sensitivity_curve_csv(tables), encoding="utf-8")
    return {"per_set_alpha": bonferroni_alpha(req), "tables": [t.to_dict() for t in tables]}


def cmd_test(cfg) -> dict:
    paths = [Path(p) for p in cfg["lists"] or []]
    if not paths:
        raise CLIError("no ranked-list files given")
    studies = [read_ranked_list(p) for p in paths]
    e = EnsembleParams(len(studies), cfg["genes"])
    t = TestParams(cfg["r"], cfg["n"])
    kw = dict(mc_replications=cfg["mc_reps"], seed=cfg["seed"], correlation=_correlation(cfg))
    if cfg["candidates"]:
        report = intersect_concordance(studies, read_candidate_list(cfg["candidates"]), t, e, **kw)
    else:
        report = intersect_discovery(studies, t, e, **kw)
    return report.to_dict()


def cmd_simulate(cfg) -> dict:
    e = EnsembleParams(cfg["studies"], cfg["genes"])
    t = TestParams(cfg["r"], cfg["n"], cfg["m"])
    alt = _alternative(cfg["alt"]) if cfg["alt"] else None
    sim = SimConfig(e, t, alt, _correlation(cfg), cfg["reps"], cfg["seed"])
    result = simulate(sim, workers=cfg["workers"])
    dist = result.total if isinstance(result, AltSimResult) else result
    out = result.to_dict()
    if cfg["observed"] is not None:
        out["observed"] = cfg["observed"]
        out["p_empirical"] = dist.tail(cfg["observed"])
        out["p_empirical_se"] = dist.tail_se(cfg["observed"])
    if cfg["histogram_csv"]:
        Path(cfg["histogram_csv"]).write_text(dist.to_csv(), encoding="utf-8")
    return out


def cmd_reproduce(cfg) -> dict:
    cells = repro.reproduce(cfg["table"], cfg["mc_reps"])
    return {"table": cfg["table"], "all_within_tolerance": repro.all_ok(cells),
            "cells": [c.to_dict() for c in cells]}


COMMANDS = {"null": cmd_null, "design": cmd_design, "test": cmd_test,
            "simulate": cmd_simulate, "reproduce": cmd_reproduce}


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_pretty(command: str, out: dict) -> str:
    lines = []
    if command == "reproduce":
        lines.append(f"{'cell':<34} {'published':>12} {'computed':>14}  {'rule':<34} ok")
        for c in out["cells"]:
            ok = {True: "yes", False: "NO", None: "info"}[c["ok"]]
            lines.append(f"{c['label']:<34} {_fmt(c['published']):>12} {_fmt(c['computed']):>14}  "
                         f"{c['rule']:<34} {ok}")
        return "\n".join(lines)
    if command == "design":
        for t in out["tables"]:
            lines.append(f"alternative {t['alternative'].get('label') or '?'}  "
                         f"N={t['ensemble']['num_studies']}  q={t['fdr_budget']}")
            lines.append(f"  {'n':>3} {'r(n)':>6} {'ESns':>10} {'FDR':>10}")
            for row in t["rows"]:
                star = " *" if t["optimal"] and t["optimal"]["n"] == row["n"] else ""
                lines.append(f"  {row['n']:>3} {_fmt(row['r']):>6} {_fmt(row['esns']):>10} "
                             f"{_fmt(row['fdr']):>10}{star}")
        return "\n".join(lines)
    for k, v in out.items():
        if k == "members":
            lines.append("members:")
            lines.extend(f"  {m['gene_id']}\t{m['recapture_count']}\t{','.join(m['studies'])}" for m in v)
        elif k not in ("config", "recapture_counts", "histogram") and not isinstance(v, (dict, list)):
            lines.append(f"{k}: {_fmt(v)}")
        elif isinstance(v, dict) and k != "config":
            lines.append(f"{k}: {json.dumps(v)}")
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        out = COMMANDS[args.command](cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = {"command": args.command, "config": _jsonable(cfg), **out}
    if cfg.get("pretty"):
        print(render_pretty(args.command, out))
    else:
        print(json.dumps(out, indent=2))
    if args.command == "reproduce" and not out["all_within_tolerance"]:
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
