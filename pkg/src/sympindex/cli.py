"""Command-line front end.

Exit status: 0 on success, 2 when a scan or oracle comparison finds a
violation, 1 on malformed input or an unresolvable precision question.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, angles, decompose as _decompose_mod, oracles as _oracles_mod
from .decompose import CLUSTER_TOL, decompose
from .errors import SympIndexError
from .forms import EPS_SYM_BLOCKS, EPS_SYM_USER, realize_seed
from .io import InputError, dumps_csv, dumps_json, load_matrices, load_seeds
from .iteration import iteration_table, mean_index, mean_index_exact
from .oracles import PUSH_OFF, RANK_TOL, CrossingOracle, build_path, nullity_table
from .r8 import claim1_scan, enumerate_configs, lemma31_scan
from .sampling import random_seed

DEFAULT_TOLERANCES = {
    "eps_sym": EPS_SYM_BLOCKS,
    "eps_sym_input": EPS_SYM_USER,
    "rank_tol": RANK_TOL,
    "cluster_tol": CLUSTER_TOL,
    "float_guard": angles.FLOAT_GUARD,
    "angle_bits": angles._START_BITS,
    "push_off": PUSH_OFF,
}

ITERATE_COLUMNS = ["seed_id", "m", "i_maslov", "nullity", "i_viterbo", "good"]
ORACLE_COLUMNS = ["seed_id", "check", "m", "formula_value", "oracle_value", "agree"]
CONFIG_COLUMNS = ["r", "s", "r_star", "r_zero"]


def _parse_tol(items: list[str]) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or name not in tol:
            raise InputError(f"--tol expects NAME=VALUE with NAME in {sorted(tol)}, got {item!r}")
        try:
            val = float(value)
        except ValueError as exc:
            raise InputError(f"--tol {name}: {value!r} is not a number") from exc
        if not val > 0:
            raise InputError(f"--tol {name} must be positive")
        tol[name] = int(val) if name == "angle_bits" else val
    return tol


def _apply_tolerances(tol: dict) -> None:
    # the numerical modules read these globals at call time
    angles.FLOAT_GUARD = tol["float_guard"]
    angles._START_BITS = tol["angle_bits"]
    _oracles_mod.PUSH_OFF = tol["push_off"]
    _decompose_mod.RANK_TOL = tol["rank_tol"]


def _workers() -> int:
    env = os.environ.get("SYMPINDEX_WORKERS")
    return max(1, int(env)) if env else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# commands; each returns (report dict, csv rows, csv columns, text lines, status)

def cmd_enumerate(args, tol):
    rows = [dict(zip(CONFIG_COLUMNS, c)) for c in enumerate_configs()]
    text = [f"r={c['r']} s={c['s']} r*={c['r_star']} r0={c['r_zero']}" for c in rows]
    return {"configs": rows, "count": len(rows)}, rows, CONFIG_COLUMNS, text, 0


def _seeds(args) -> list:
    if args.input:
        return load_seeds(args.input)
    rng = np.random.default_rng(args.rng_seed)
    return [random_seed(rng, label=f"random{k}") for k in range(args.count)]


def cmd_iterate(args, tol):
    rows, text = [], []
    for seed in _seeds(args):
        for res in iteration_table(seed, args.m_max):
            rows.append({"seed_id": seed.label, **res.to_json()})
    for row in rows:
        text.append(
            f"{row['seed_id']} m={row['m']} i={row['i_maslov']} nu={row['nullity']} "
            f"viterbo={row['i_viterbo']} good={str(row['good']).lower()}"
        )
    return {"rows": rows}, rows, ITERATE_COLUMNS, text, 0


def cmd_mean(args, tol):
    from .oracles import mean_index_limit

    rows, text = [], []
    m_lim = max(args.m_max, 1000)
    for seed in _seeds(args):
        exact = mean_index_exact(seed)
        value = mean_index(seed)
        limit = mean_index_limit(seed, m_lim)
        row = {
            "seed_id": seed.label,
            "mean_index": value,
            "mean_index_exact": exact.to_expr() if hasattr(exact, "to_expr") else repr(exact),
            "m": m_lim,
            "limit_estimate": limit,
            "deviation": abs(limit - value),
            "bound": (2 * seed.n + 2) / m_lim,
        }
        rows.append(row)
        text.append(f"{seed.label} mean={row['mean_index_exact']} (~{value:.12g}) i(m)/m at m={m_lim}: {limit:.12g}")
    cols = ["seed_id", "mean_index", "mean_index_exact", "m", "limit_estimate", "deviation", "bound"]
    return {"rows": rows}, rows, cols, text, 0


def cmd_decompose(args, tol):
    if not args.input:
        raise InputError("decompose needs an input matrix file")
    results, text = [], []
    for k, mat in enumerate(load_matrices(args.input, tol=tol["eps_sym_input"])):
        dec = decompose(mat, tol=tol["cluster_tol"], require_characteristic=args.characteristic)
        out = {"matrix": k, **dec.to_json()}
        results.append(out)
        counts = dec.counts.counts_dict()
        text.append(
            f"matrix {k}: " + " ".join(f"{key}={v}" for key, v in counts.items() if v)
            + f" floquet={dec.spectrum.floquet_type}"
        )
    return {"decompositions": results}, [], [], text, 0


def cmd_oracle(args, tol):
    seeds = _seeds(args)
    oracle = CrossingOracle()
    rows, text, bad = [], [], 0
    for seed in seeds:
        mat = realize_seed(seed)
        from .iteration import iterate_index_array, iterate_nullity_array

        nul_formula = iterate_nullity_array(seed, args.m_max)
        nul_oracle = nullity_table(mat, args.m_max, rel_tol=tol["rank_tol"])
        idx_formula = iterate_index_array(seed, args.m_max)
        idx_oracle = oracle.indices(build_path(seed, periods=args.m_max))
        for name, f_arr, o_arr in (("nullity", nul_formula, nul_oracle), ("index", idx_formula, idx_oracle)):
            for m in range(1, args.m_max + 1):
                agree = int(f_arr[m - 1]) == int(o_arr[m - 1])
                bad += not agree
                rows.append({
                    "seed_id": seed.label,
                    "check": name,
                    "m": m,
                    "formula_value": int(f_arr[m - 1]),
                    "oracle_value": int(o_arr[m - 1]),
                    "agree": agree,
                })
        text.append(
            f"{seed.label}: nullity {'ok' if np.array_equal(nul_formula, nul_oracle) else 'MISMATCH'}, "
            f"index {'ok' if np.array_equal(idx_formula, idx_oracle) else 'MISMATCH'}"
        )
    report = {"rows": rows, "calibration_offset": oracle.offset, "disagreements": bad}
    return report, rows, ORACLE_COLUMNS, text, 2 if bad else 0


def _scan_text(rep: dict) -> list[str]:
    lines = [f"claim: {rep['claim']}", f"holds: {str(rep['holds']).lower()}",
             f"points scanned: {rep['points_scanned']}", f"violations: {len(rep['violations'])}"]
    if rep["witnesses"]:
        lines.append(f"witnesses: {len(rep['witnesses'])}")
    for name, chk in rep["checks"].items():
        lines.append(f"  [{'pass' if chk['passed'] else 'FAIL'}] {name}")
    for fam in rep.get("families", []):
        lines.append(f"  family {fam['label']}: i(y)={fam['i_viterbo']} good values {fam['good_index_values']}")
    lines += [f"note: {n}" for n in rep["notes"]]
    return lines


def cmd_scan_lemma31(args, tol):
    rep = lemma31_scan(
        i_range=(args.i_min, args.i_max),
        m_max=args.m_max,
        angle_samples=args.angle_samples,
        enforce_hypothesis=args.enforce,
        rng_seed=args.rng_seed,
        workers=_workers(),
    )
    out = rep.to_json(include_timing=args.timing)
    rows = out["violations"] if args.enforce else out["witnesses"]
    cols = ["blocks", "i_viterbo", "tuple", "m", "index"] if args.enforce else [
        "blocks", "i_viterbo", "tuples", "points", "example_tuple", "first_m"]
    return out, rows, cols, _scan_text(out), 0 if rep.holds else 2


def cmd_scan_claim1(args, tol):
    rep = claim1_scan(m_max=args.m_max)
    out = rep.to_json(include_timing=args.timing)
    cols = ["label", "blocks", "i_viterbo", "turn_sum", "good_index_values", "fractional_sum_values", "outcome"]
    return out, out["families"], cols, _scan_text(out), 0 if rep.holds else 2


COMMANDS = {
    "enumerate": (cmd_enumerate, None),
    "iterate": (cmd_iterate, 10),
    "mean": (cmd_mean, 100_000),
    "decompose": (cmd_decompose, None),
    "oracle": (cmd_oracle, 20),
    "scan-lemma31": (cmd_scan_lemma31, 1000),
    "scan-claim1": (cmd_scan_claim1, 10_000),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sympindex", description="Index iteration tools for symplectic paths.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, m_default) in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?", help="seed or matrix JSON file")
        p.add_argument("--m-max", type=int, default=m_default or 1)
        p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        p.add_argument("--rng-seed", type=int, default=0)
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="include wall-clock runtime (not reproducible)")
        if name in ("iterate", "mean", "oracle"):
            p.add_argument("--count", type=int, default=5, help="random seeds when no input file is given")
        if name == "decompose":
            p.add_argument("--general", dest="characteristic", action="store_false",
                           help="accept any eigenvalue-1 structure, not only a single N1(1,1)")
        if name == "scan-lemma31":
            g = p.add_mutually_exclusive_group()
            g.add_argument("--enforce", dest="enforce", action="store_true", default=True)
            g.add_argument("--relax", dest="enforce", action="store_false")
            p.add_argument("--i-min", type=int, default=-15)
            p.add_argument("--i-max", type=int, default=15)
            p.add_argument("--angle-samples", type=int, default=100)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.m_max < 1:
            raise InputError("--m-max must be at least 1")
        tol = _parse_tol(args.tol)
        _apply_tolerances(tol)
        func, _ = COMMANDS[args.command]
        result, rows, cols, text, status = func(args, tol)
    except (SympIndexError, OSError) as exc:
        print(f"sympindex {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    finally:
        _apply_tolerances(DEFAULT_TOLERANCES)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "tol", "format", "output", "timing")}
    report = {
        "tool": "sympindex",
        "version": __version__,
        "command": args.command,
        "tolerances": tol,
        "parameters": params,
        "result": result,
    }
    if args.timing:
        report["runtime_s"] = round(time.perf_counter() - start, 3)
    if args.format == "json":
        payload = dumps_json(report)
    elif args.format == "csv":
        if not cols:
            print(f"sympindex {args.command}: no CSV layout for this command; use json or text", file=sys.stderr)
            return 1
        payload = dumps_csv(rows, cols)
    else:
        header = [f"sympindex {__version__} {args.command}",
                  "tolerances: " + " ".join(f"{k}={v}" for k, v in tol.items())]
        payload = "\n".join(header + text) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
