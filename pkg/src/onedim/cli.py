"""Command line interface: ``onedim <group> <command> ...``.

Exit codes: 0 for a result or verdict, 1 for input errors, 2 when the run
certifies a failure (an induced P4, a violated relation).

Configuration precedence: built-in defaults, then ``--config`` file, then
individual flags.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import catalog
from .config import DEFAULT, RunConfig, Tolerances
from .diffeo import commutator, diffeo_from_json
from .dynamics import (analyze_support, derivative_variation, fixed_set, periodic_points,
                       rotation_number, sup_displacement)
from .errors import OneDimError
from .graphs import GraphError, P4Witness, SimplicialGraph, build_cotree, find_induced_p4
from .io import DIGITS, dumps, load_json, write_csv
from .obstruction import (analyze_p4_action, commutator_region, compute_envelopes, detect_chains,
                          envelope_invariance, two_jumps)
from .raag import (ActionAssignment, RaagPresentation, check_action, format_word, power_subgroup,
                   reduce_in_raag)
from .verdict import (SurfaceSignature, braid_verdict, complexity, group_catalog_verdict,
                      mod_verdict)

log = logging.getLogger("onedim")

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 1, 2


class InputError(Exception):
    pass


BUILTINS = {
    "chain": lambda cfg: catalog.chain_action(),
    "shrinking": lambda cfg: catalog.shrinking_candidate(),
    "two-config": lambda cfg: catalog.two_configuration_action(),
    "nested": lambda cfg: catalog.nested_action(),
    "shared-abelian": lambda cfg: catalog.shared_abelian_action(),
    "broken": lambda cfg: catalog.broken_relation_action(),
    "abelian": lambda cfg: catalog.abelian_action(),
    "abelian-circle": lambda cfg: catalog.abelian_action(catalog.Manifold.CIRCLE),
    "circle-triple": lambda cfg: catalog.circle_triple_action(),
    "random": lambda cfg: catalog.random_candidate(np.random.default_rng(cfg.seed)),
}


# ---------------------------------------------------------------------------
# loading


def _read(path) -> object:
    try:
        return load_json(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def load_action(src: str, cfg: RunConfig) -> ActionAssignment:
    if src.startswith("builtin:"):
        name = src.split(":", 1)[1]
        if name not in BUILTINS:
            raise InputError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
        if name == "random":
            log.info("random candidate with seed %d", cfg.seed)
        return BUILTINS[name](cfg)
    return ActionAssignment.from_json(_read(src))


def load_diffeo(src: str):
    return diffeo_from_json(_read(src))


def load_graph(src: str) -> SimplicialGraph:
    if src == "builtin:p4":
        return catalog.p4_presentation().graph
    data = _read(src)
    if isinstance(data, dict) and "presentation" in data:
        data = data["presentation"]
    return SimplicialGraph.from_json(data)


def build_config(args) -> RunConfig:
    cfg = DEFAULT
    if args.config:
        try:
            cfg = RunConfig.from_file(args.config)
        except FileNotFoundError:
            raise InputError(f"no such config file: {args.config}") from None
        except (ValueError, TypeError) as exc:
            raise InputError(f"bad config file: {exc}") from None
    over = {name: getattr(args, name) for name in Tolerances.__dataclass_fields__}
    for name in ("grid", "period_cap", "budget", "samples", "seed"):
        over[name] = getattr(args, name)
    try:
        return cfg.with_overrides(**over)
    except ValueError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_graph(args, cfg):
    g = load_graph(args.file)
    res = build_cotree(g)
    if args.command == "p4-witness":
        w = find_induced_p4(g)
        out = {"p4": None if w is None else w.to_json()}
        return out, EXIT_CERT if w is not None else EXIT_OK
    if isinstance(res, P4Witness):
        return {"cograph": False, "witness": res.to_json()}, EXIT_CERT
    if args.command == "cotree":
        return {"cotree": res.to_json()}, EXIT_OK
    return {"cograph": True, "cotree": res.to_json()}, EXIT_OK


def cmd_dyn(args, cfg):
    f = load_diffeo(args.files[0])
    if args.command == "commutator":
        if len(args.files) != 2:
            raise InputError("commutator needs two diffeo files")
        g = load_diffeo(args.files[1])
        h = commutator(f, g)
        sup = analyze_support(h, cfg)
        return {"displacement": sup_displacement(h, cfg), "support": sup.support,
                "exact": sup.exact, "warnings": list(sup.warnings)}, EXIT_OK
    if len(args.files) != 1:
        raise InputError(f"{args.command} takes one diffeo file")
    if args.command == "rot":
        return {"rotation_number": rotation_number(f, cfg)}, EXIT_OK
    if args.command == "fix":
        return {"fixed_set": fixed_set(f, cfg)}, EXIT_OK
    if args.command == "supp":
        sup = analyze_support(f, cfg)
        return {"support": sup.support, "exact": sup.exact, "warnings": list(sup.warnings)}, EXIT_OK
    if args.command == "var":
        return {"variation": derivative_variation(f, cfg)}, EXIT_OK
    if args.command == "periodic":
        return {"periodic": periodic_points(f, cfg.period_cap, cfg)}, EXIT_OK
    raise InputError(f"unknown dyn command {args.command}")


def cmd_raag(args, cfg):
    if args.command == "check":
        a = load_action(args.target, cfg)
        rep = check_action(a, cfg)
        return rep, EXIT_OK if rep["relations_hold"] else EXIT_CERT
    p = RaagPresentation(load_graph(args.graph))
    if args.command == "reduce":
        r = reduce_in_raag(args.target, p)
        return {"word": format_word(r.word), "trivial": r.trivial, "length": r.length}, EXIT_OK
    if args.command == "power":
        w = power_subgroup(p, args.n, args.target)
        return {"word": format_word(w), "n": args.n}, EXIT_OK
    raise InputError(f"unknown raag command {args.command}")


def _two_jumps_rows(args, cfg):
    if args.family:
        if args.family == "symmetric":
            fam = catalog.symmetric_family()
        else:
            fam = catalog.asymmetric_family(args.ratio)
        for h, f, g, y in fam:
            rep = two_jumps(f, g, [y], cfg)
            yield h, rep
        return
    if len(args.files) != 3:
        raise InputError("two-jumps needs --family or three files: f, g and a configs list")
    f, g = load_diffeo(args.files[0]), load_diffeo(args.files[1])
    configs = _read(args.files[2])
    if not isinstance(configs, list):
        raise InputError("configs file must hold a list of y values or [y, [lo, hi]] pairs")
    yield None, two_jumps(f, g, configs, cfg)


def cmd_obstruct(args, cfg):
    if args.command == "jfg":
        if len(args.files) != 2:
            raise InputError("jfg needs two diffeo files")
        return {"J": commutator_region(load_diffeo(args.files[0]), load_diffeo(args.files[1]), cfg)}, EXIT_OK
    if args.command == "two-jumps":
        out, rows = [], []
        for h, rep in _two_jumps_rows(args, cfg):
            entry = rep.to_json()
            if h is not None:
                entry["h"] = h
                rows += [(h, w.product, w.bound) for w in rep.witnesses]
            else:
                rows += [(w.length, w.product, w.bound) for w in rep.witnesses]
            out.append(entry)
        if args.csv:
            write_csv(args.csv, ["h", "product", "bound"], rows, args.digits)
        return {"two_jumps": out, "min_product": min((r[1] for r in rows), default=None)}, EXIT_OK
    if len(args.files) != 1:
        raise InputError(f"{args.command} takes one action (file or builtin:NAME)")
    a = load_action(args.files[0], cfg)
    if args.command == "chains":
        return {"chains": detect_chains(a, cfg=cfg)}, EXIT_OK
    if args.command == "envelopes":
        rep = compute_envelopes(a, cfg=cfg)
        return {"envelopes": rep, "invariance": envelope_invariance(a, rep, cfg=cfg)}, EXIT_OK
    if args.command == "p4":
        v = analyze_p4_action(a, cfg, swap=args.swap)
        return v, EXIT_CERT if v.verdict == "RELATIONS-FAIL" else EXIT_OK
    if args.command == "export":
        return a, EXIT_OK
    raise InputError(f"unknown obstruct command {args.command}")


def cmd_verdict(args, cfg):
    vals = args.params
    try:
        nums = [int(v) for v in vals]
    except ValueError:
        nums = None
    if args.kind == "surface":
        if nums is None or len(nums) != 3:
            raise InputError("verdict surface needs three integers: g n b")
        s = SurfaceSignature(*nums)
        v = mod_verdict(s)
        return {"surface": s.to_json(), "complexity": complexity(s), **v.to_json()}, EXIT_OK
    if args.kind == "braid":
        if nums is None or len(nums) != 1:
            raise InputError("verdict braid needs one integer n")
        return {"braid": nums[0], **braid_verdict(nums[0]).to_json()}, EXIT_OK
    if args.kind == "group":
        if not vals:
            raise InputError("verdict group needs a family name")
        fam, rest = vals[0].lower(), vals[1:]
        try:
            ints = [int(v) for v in rest]
        except ValueError:
            raise InputError("group parameters must be integers") from None
        if fam in ("autfn", "outfn", "aut", "out") and len(ints) == 1:
            v = group_catalog_verdict(fam, n=ints[0])
            params = {"n": ints[0]}
        elif fam == "torelli" and len(ints) == 1:
            v = group_catalog_verdict(fam, genus=ints[0])
            params = {"genus": ints[0]}
        elif fam == "johnson" and len(ints) == 2:
            v = group_catalog_verdict(fam, k=ints[0], genus=ints[1])
            params = {"k": ints[0], "genus": ints[1]}
        else:
            raise InputError("usage: verdict group autfn|outfn N | torelli GENUS | johnson K GENUS")
        return {"group": fam, "params": params, **v.to_json()}, EXIT_OK
    raise InputError(f"unknown verdict kind {args.kind}")


# ---------------------------------------------------------------------------
# parser


def _global_flags(p: argparse.ArgumentParser, top: bool):
    # subparsers repeat the flags with SUPPRESS defaults so they work on either side
    d = None if top else argparse.SUPPRESS
    p.add_argument("--config", default=d, help="JSON config file (flat keys)")
    p.add_argument("--seed", type=int, default=d)
    for name in Tolerances.__dataclass_fields__:
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=d)
    p.add_argument("--grid", type=int, default=d)
    p.add_argument("--period-cap", dest="period_cap", type=int, default=d)
    p.add_argument("--budget", type=int, default=d)
    p.add_argument("--samples", type=int, default=d)
    p.add_argument("--digits", type=int, default=DIGITS if top else d,
                   help="significant digits in JSON output (0 = full precision)")
    p.add_argument("-v", "--verbose", action="store_true", default=False if top else d)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onedim", description=__doc__.splitlines()[0])
    _global_flags(p, True)
    groups = p.add_subparsers(dest="group", required=True)

    g = groups.add_parser("graph", help="cograph recognition")
    _global_flags(g, False)
    g.add_argument("command", choices=["analyze", "p4-witness", "cotree"])
    g.add_argument("file")
    g.set_defaults(func=cmd_graph)

    d = groups.add_parser("dyn", help="single-map dynamics")
    _global_flags(d, False)
    d.add_argument("command", choices=["rot", "fix", "supp", "var", "commutator", "periodic"])
    d.add_argument("files", nargs="+")
    d.set_defaults(func=cmd_dyn)

    r = groups.add_parser("raag", help="words and actions")
    _global_flags(r, False)
    r.add_argument("command", choices=["check", "reduce", "power"])
    r.add_argument("target", help="action file / builtin:NAME for check, a word otherwise")
    r.add_argument("--graph", default="builtin:p4", help="graph file or builtin:p4")
    r.add_argument("-N", "--n", dest="n", type=int, default=2)
    r.set_defaults(func=cmd_raag)

    o = groups.add_parser("obstruct", help="interval combinatorics and blow-up witnesses")
    _global_flags(o, False)
    o.add_argument("command", choices=["jfg", "chains", "envelopes", "two-jumps", "p4", "export"])
    o.add_argument("files", nargs="*")
    o.add_argument("--family", choices=["symmetric", "asymmetric"])
    o.add_argument("--ratio", type=float, default=2.0)
    o.add_argument("--csv", help="write (h, product, bound) rows here")
    o.add_argument("--swap", action="store_true", help="exchange the roles of the path ends")
    o.set_defaults(func=cmd_obstruct)

    v = groups.add_parser("verdict", help="lookup tables")
    _global_flags(v, False)
    v.add_argument("kind", choices=["surface", "braid", "group"])
    v.add_argument("params", nargs="*")
    v.set_defaults(func=cmd_verdict)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = build_config(args)
        out, code = args.func(args, cfg)
    except (InputError, OneDimError, GraphError, ValueError, KeyError, TypeError) as exc:
        print(dumps({"error": str(exc)}), file=sys.stdout)
        print(f"onedim: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(dumps(out, args.digits))
    return code


if __name__ == "__main__":
    sys.exit(main())
