"""kisotropy command line: group data, pair reports, finite-group invariants, the catalog."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources

from . import groebner
from .catalog import ENTRIES, check_entry, entry, worked_entries, run_entry
from .characters import representation_ring
from .errors import BudgetExceeded, HypothesisRefusal, InconsistentVerdict, KIsotropyError
from .formality import borel_cohomology, equivariant_cohomology, st_battery
from .invariants import (coinvariant_dimension, cst_verdict, group_from_json, is_pseudoreflection_group,
                         molien_series)
from .ktheory import (assemble_ktheory, classify_pair, iota_image_comparison, iota_map,
                      ordinary_ktheory)
from .lie import build_group, pair_from_descriptor

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_BUDGET, EXIT_REFUSED = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def default_cache_dir():
    return os.environ.get("KISOTROPY_CACHE_DIR") or os.path.join(
        os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache"), "kisotropy")


# ---------------------------------------------------------------------------
# input resolution

def _data_file(*parts):
    ref = resources.files("kisotropy").joinpath("data", *parts)
    return ref if ref.is_file() else None


def _load_json(path):
    if os.path.exists(path):
        with open(path) as fh:
            text = fh.read()
    else:
        ref = _data_file(path) or _data_file("pairs", path)
        if ref is None:
            raise InputError(f"no such file: {path}")
        text = ref.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def load_pair(ref):
    if ref.startswith("catalog:"):
        try:
            return entry(ref).pair()
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    return pair_from_descriptor(_load_json(ref))


def load_group(ref):
    if ref.endswith(".json"):
        return build_group(_load_json(ref))
    return build_group(ref)


# ---------------------------------------------------------------------------
# reports

def group_info(G):
    free, torsion, free_rank = G.pi1()
    rep = representation_ring(G)
    borel = borel_cohomology(G)
    return {
        "group": G.label,
        "rank": G.rank,
        "weyl_order": G.weyl_order,
        "pi1": {"free_abelian": free, "free_rank": free_rank, "torsion": torsion},
        "fundamental_characters": {n: {"highest_weight": list(ch.highest_weight or []), "dimension": ch.dimension}
                                   for n, ch in zip(rep.names, rep.characters)},
        "representation_ring": rep.ring.to_json(),
        "borel_degrees": borel.degrees,
    }


def _series_block(series):
    return {"factored": series.factored(), "truncated": series.truncated(12)}


def cmd_group(args):
    return group_info(load_group(args.group)), EXIT_OK


def cmd_pair(args):
    pair = load_pair(args.pair)
    what = args.what
    if what == "ktheory":
        hyp = classify_pair(pair, args.budget)
        if not hyp.covered:
            if not args.allow_uncovered:
                raise HypothesisRefusal(hyp.reason, hyp)
            return {"pair": pair.label, "status": "not_covered", "classification": hyp.to_json()}, EXIT_OK
        out = assemble_ktheory(pair, args.budget, hyp).to_json()
        try:
            out["ordinary"] = ordinary_ktheory(pair, args.budget, hyp).to_json()
        except HypothesisRefusal:
            pass
        return out, EXIT_OK
    if what == "classify":
        return classify_pair(pair, args.budget).to_json(), EXIT_OK
    if what == "formality":
        rep = st_battery(pair)
        return rep.to_json(), EXIT_OK
    if what == "cohomology":
        out = equivariant_cohomology(pair).to_json()
        return out, EXIT_OK
    if what == "iota":
        io = iota_map(pair)
        cmp_ = iota_image_comparison(pair, args.window)
        return {"pair": pair.label, "weyl": [[list(r) for r in w] for w in io.weyl],
                "comparison": cmp_.to_json()}, EXIT_OK
    raise InputError(f"unknown pair command {what}")


def cmd_invariants(args):
    G = group_from_json(_load_json(args.file))
    if args.what == "molien":
        mol = molien_series(G)
        out = mol.to_json()
        out.update(_series_block(mol.series))
        return {"group": G.label, "order": G.order, "molien": out}, EXIT_OK
    if args.what == "cst":
        return {"group": G.label, "order": G.order, "cst": cst_verdict(G).to_json()}, EXIT_OK
    res = coinvariant_dimension(G)
    out = res.to_json()
    rel = {"equal": "=", "greater": ">", "less": "<"}.get(res.comparison)
    out["statement"] = f"{res.dimension} {rel} {res.group_order}" if rel else "infinite"
    out["reflection_group"] = is_pseudoreflection_group(G).is_reflection_group
    return {"group": G.label, "order": G.order, "coinvariants": out}, EXIT_OK


def cmd_catalog(args):
    if args.what == "list":
        return {"entries": [{"name": e.name, "pair": e.descriptor["label"], "source": e.source}
                            for e in worked_entries()],
                "auxiliary": [e.name for e in ENTRIES if e.auxiliary]}, EXIT_OK
    if args.all:
        chosen = ENTRIES
    elif args.name:
        try:
            chosen = [entry(args.name)]
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    else:
        raise InputError("catalog run needs an entry name or --all")
    results = []
    for e in chosen:
        res = run_entry(e, args.budget, args.window)
        rows = check_entry(e, res)
        item = {"name": e.name, "passed": all(r[3] for r in rows),
                "checks": [{"path": p, "expected": x, "actual": a, "ok": ok, "tag": t}
                           for p, x, a, ok, t in rows]}
        if "iota" in res:
            item["iota_witness"] = res["iota"]["witness"]
        if not args.all:
            item["result"] = res
        results.append(item)
    return {"entries": results, "all_passed": all(r["passed"] for r in results)}, EXIT_OK


# ---------------------------------------------------------------------------
# output

def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


def render_text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or (isinstance(x, list) and
                                       all(not isinstance(y, (dict, list)) for y in x)) for x in v)


def _scalar(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def emit(obj, fmt, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(obj, indent=2, default=_jsonable) + "\n")
    else:
        stream.write("\n".join(render_text(obj)) + "\n")


# ---------------------------------------------------------------------------
# argument parsing

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="text")
    common.add_argument("--budget", type=int, default=None, help="Groebner reduction budget")
    common.add_argument("--no-cache", action="store_true", help="bypass the on-disk Groebner cache")
    common.add_argument("--allow-uncovered", action="store_true",
                        help="report the classification instead of refusing")
    common.add_argument("--window", type=int, default=3, help="exponent window for iota comparisons")

    p = argparse.ArgumentParser(prog="kisotropy", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group").add_subparsers(dest="what", required=True)
    gi = g.add_parser("info", parents=[common])
    gi.add_argument("group", help="group name such as SU(3), T2, PSU(3), or a JSON descriptor file")
    gi.set_defaults(func=cmd_group)

    pr = sub.add_parser("pair").add_subparsers(dest="what", required=True)
    for what in ("ktheory", "formality", "classify", "cohomology", "iota"):
        sp = pr.add_parser(what, parents=[common])
        sp.add_argument("pair", help="catalog:NAME or a pair descriptor file")
        sp.set_defaults(func=cmd_pair)

    inv = sub.add_parser("invariants").add_subparsers(dest="what", required=True)
    for what in ("molien", "cst", "coinvariants"):
        sp = inv.add_parser(what, parents=[common])
        sp.add_argument("file", help="matrix group JSON file")
        sp.set_defaults(func=cmd_invariants)

    cat = sub.add_parser("catalog").add_subparsers(dest="what", required=True)
    cat.add_parser("list", parents=[common]).set_defaults(func=cmd_catalog)
    run = cat.add_parser("run", parents=[common])
    run.add_argument("name", nargs="?")
    run.add_argument("--all", action="store_true")
    run.set_defaults(func=cmd_catalog)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.no_cache:
        os.environ.pop("KISOTROPY_CACHE_DIR", None)
    else:
        os.environ["KISOTROPY_CACHE_DIR"] = default_cache_dir()
    if args.budget is not None:
        groebner.set_default_budget(args.budget)
    try:
        obj, code = args.func(args)
    except HypothesisRefusal as exc:
        report = exc.report.to_json() if hasattr(exc.report, "to_json") else exc.report
        emit({"status": "refused", "reason": exc.reason, "classification": report}, args.format)
        return EXIT_REFUSED
    except BudgetExceeded as exc:
        emit({"status": "budget_exceeded", "error": str(exc), "diagnostics": exc.diagnostics}, args.format,
             sys.stderr)
        return EXIT_BUDGET
    except InconsistentVerdict as exc:
        print(f"kisotropy: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, KIsotropyError, ValueError) as exc:
        print(f"kisotropy: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    emit(obj, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
