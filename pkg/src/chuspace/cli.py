"""Command-line front end.

Exit codes: 0 success, 1 usage error (or a sweep with failures), 2 contract
violation (bad input files, broken preconditions), 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formats
from .chain import check_extensionality_preserved, colimit, mediate, thread_label
from .core import (DISCRETE_BUDGET, ENUMERATION_BUDGET, Alphabet, find_isomorphism, is_biextensional,
                   is_extensional, is_separable, is_strongly_finite, missing_column)
from .errors import ChuError, ContractViolation
from .finobj import classify
from .gallery import GENERATORS, demo_no_colimit_in_iC, generator_chain
from .morph import CATEGORIES, RESTRICTIONS, enumerate_morphisms, is_monic
from .sweeps import SUITE_ALIASES, SUITES, run_suite
from .universal import (amalgamate, embeds_somewhere, fraisse_build, validate_stage_chain,
                        verify_resolution)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit_dir(path) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _table(rows) -> str:
    rows = [(str(k), "-" if v is None else str(v)) for k, v in rows]
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _out(args, payload: dict, rows=None) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print(_table(rows if rows is not None else payload.items()))


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    s = formats.load_space(args.space)
    v = missing_column(s, min(args.budget, DISCRETE_BUDGET))
    payload = {
        "objects": len(s.objects), "attributes": len(s.attributes),
        "extensional": is_extensional(s), "separable": is_separable(s),
        "biextensional": is_biextensional(s), "discrete": v is None,
        "strongly_finite": is_strongly_finite(s),
        "missing_function": None if v is None else list(v),
    }
    _out(args, payload)
    return 0


def cmd_iso(args) -> int:
    s1, s2 = formats.load_space(args.first), formats.load_space(args.second)
    m = find_isomorphism(s1, s2)
    payload = {"isomorphic": m is not None,
               "forward": None if m is None else m.forward_labels(),
               "backward": None if m is None else m.backward_labels()}
    if args.emit and m is not None:
        formats.write_text(_emit_dir(args.emit) / "iso.chumorph", formats.emit_morphism(m))
    _out(args, payload)
    return 0


def cmd_morphisms(args) -> int:
    s, t = formats.load_space(args.source), formats.load_space(args.target)
    ms = list(enumerate_morphisms(s, t, args.restrict, args.budget))
    out = _emit_dir(args.emit)
    if out is not None:
        for k, m in enumerate(ms, start=1):
            formats.write_text(out / f"m{k}.chumorph", formats.emit_morphism(m))
    payload = {"count": len(ms), "restrict": args.restrict,
               "morphisms": [{"forward": m.forward_labels(), "backward": m.backward_labels()} for m in ms]}
    if args.json:
        _out(args, payload)
    else:
        print(f"{len(ms)} morphisms ({args.restrict})")
        for m in ms:
            fwd = " ".join(f"{k}->{v}" for k, v in m.forward_labels().items())
            bwd = " ".join(f"{k}->{v}" for k, v in m.backward_labels().items())
            print(f"forward [{fwd}]  backward [{bwd}]")
    return 0


def cmd_monic(args) -> int:
    m = formats.load_morphism(args.morphism)
    v = is_monic(m, args.category)
    payload = v.to_dict()
    out = _emit_dir(args.emit)
    if out is not None and v.witness is not None:
        w = v.witness
        formats.write_text(out / "witness_space.chu", formats.emit_space(w.test_space))
        for k, p in enumerate(w.pair, start=1):
            formats.write_text(out / f"witness_{k}.chumorph",
                               formats.emit_morphism(p, source_ref="witness_space.chu"))
        payload["witness_dir"] = str(out)
    if v.witness is not None:
        payload["witness_kind"] = v.witness.kind
    _out(args, payload)
    return 0


def _load_chain(args):
    chain = formats.load_chain(args.chain)
    if chain.kind == "generated" and args.window is not None:
        chain = generator_chain(chain.rule_id, args.window)
    return chain


def cmd_colimit(args) -> int:
    chain = _load_chain(args)
    res = colimit(chain, args.depth, args.budget)
    out = _emit_dir(args.emit)
    if out is not None:
        formats.write_text(out / "colimit.chu", formats.emit_space(res.space))
        for i, inj in enumerate(res.injections, start=1):
            formats.write_text(out / f"injection_{i}.chumorph",
                               formats.emit_morphism(inj, target_ref="colimit.chu"))
    payload = {
        "depth": res.depth, "exact": res.exact, "stabilized": res.stabilized, "windowed": res.windowed,
        "objects": list(res.space.objects), "thread_count": res.thread_count,
        "threads": [thread_label(res.chain, t) for t in res.threads],
        "extensional": check_extensionality_preserved(res),
    }
    if args.json:
        payload["space"] = formats.space_to_json(res.space)
    _out(args, payload)
    return 0


def cmd_mediate(args) -> int:
    chain = _load_chain(args)
    apex = formats.load_space(args.apex)
    legs = [formats.load_morphism(p) for p in args.legs]
    depth = args.depth or len(legs)
    res = colimit(chain, depth, args.budget)
    m = mediate(res, apex, legs)
    payload = {"exists": m is not None,
               "forward": None if m is None else m.forward_labels(),
               "backward": None if m is None else m.backward_labels()}
    if args.emit and m is not None:
        out = _emit_dir(args.emit)
        formats.write_text(out / "colimit.chu", formats.emit_space(res.space))
        formats.write_text(out / "mediating.chumorph", formats.emit_morphism(m, source_ref="colimit.chu"))
    _out(args, payload)
    return 0


def cmd_classify(args) -> int:
    s = formats.load_space(args.space)
    rep = classify(s, min(args.budget, DISCRETE_BUDGET))
    _out(args, rep.to_dict())
    return 0


def cmd_amalgamate(args) -> int:
    base, left, right = (formats.load_space(p) for p in (args.base, args.left, args.right))
    m1, m2 = formats.load_morphism(args.into_left), formats.load_morphism(args.into_right)
    if m1.source != base or m2.source != base or m1.target != left or m2.target != right:
        raise ContractViolation("morphism files do not match the given base/left/right spaces")
    sq = amalgamate(base, m1, m2)
    out = _emit_dir(args.emit)
    if out is not None:
        formats.write_text(out / "apex.chu", formats.emit_space(sq.apex))
        formats.write_text(out / "from_left.chumorph", formats.emit_morphism(sq.from_left, target_ref="apex.chu"))
        formats.write_text(out / "from_right.chumorph", formats.emit_morphism(sq.from_right, target_ref="apex.chu"))
    payload = {"objects": list(sq.apex.objects), "attributes": list(sq.apex.attributes),
               "commutes": sq.commutes(), "apex_extensional": is_extensional(sq.apex)}
    if args.json:
        payload["apex"] = formats.space_to_json(sq.apex)
    _out(args, payload)
    return 0


def cmd_fraisse(args) -> int:
    alphabet = Alphabet.parse(args.sigma)
    state = fraisse_build(alphabet, args.max_objects, args.max_attributes, args.steps, args.budget)
    out = _emit_dir(args.emit)
    if out is not None:
        for n, st in enumerate(state.stages, start=1):
            formats.write_text(out / f"U{n}.chu", formats.emit_space(st))
        (out / "log.json").write_text(json.dumps(state.log_dicts(), indent=1), encoding="utf-8")
    embedded = sum(embeds_somewhere(state, G) is not None for G in state.catalog)
    payload = {
        "steps": state.steps, "stages": len(state.stages),
        "last_stage_shape": list(state.stages[-1].shape),
        "stages_added": sum(r.added_stage for r in state.log),
        "catalog_size": len(state.catalog), "catalog_embedded": embedded,
        "resolutions_verified": sum(verify_resolution(state, r) for r in state.log),
        "chain_problems": validate_stage_chain(state),
    }
    _out(args, payload)
    return 0


def cmd_gallery(args) -> int:
    window = args.window if args.window is not None else 4
    if args.id == "demo-no-colimit":
        rep = demo_no_colimit_in_iC(window)
        _out(args, rep.to_dict())
        return 0
    chain = generator_chain(args.id, window)
    depth = chain.max_length
    out = _emit_dir(args.emit)
    if out is not None:
        formats.write_text(out / "chain.chuchain", formats.emit_chain(chain, depth))
        params = {"window": window}
        formats.write_text(out / "chain.chugen", formats.emit_generator(args.id, params))
        for i in range(1, depth + 1):
            formats.write_text(out / f"stage_{i}.chu", formats.emit_space(chain.stage(i)))
    payload = {"id": args.id, "category": chain.category, "window": window, "stages": depth,
               "windowed": chain.windowed,
               "stage_shapes": [list(chain.stage(i).shape) for i in range(1, depth + 1)]}
    _out(args, payload)
    return 0


def cmd_sweep(args) -> int:
    alphabet = Alphabet.parse(args.sigma)
    res = run_suite(args.suite, alphabet, args.max_objects, args.max_attributes, args.seed, args.limit)
    payload = res.to_dict()
    if args.json:
        _out(args, payload)
    else:
        print(f"{res.suite}: {res.checked} checks, {res.failures} failures ({res.elapsed:.2f}s)")
        for d in res.details:
            print(f"  {d}")
    return 0 if res.ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=ENUMERATION_BUDGET)
    common.add_argument("--window", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--emit", metavar="DIR", help="write result files into DIR")

    p = _Parser(prog="chuspace", description="Chu spaces: morphisms, monics, chain colimits, finiteness.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", parents=[common], help="predicate table for a space")
    s.add_argument("space")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("iso", parents=[common], help="find an isomorphism between two spaces")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(fn=cmd_iso)

    s = sub.add_parser("morphisms", parents=[common], help="enumerate morphisms")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--restrict", choices=RESTRICTIONS, default="all")
    s.set_defaults(fn=cmd_morphisms)

    s = sub.add_parser("monic", parents=[common], help="monicity verdict with refutation witness")
    s.add_argument("morphism")
    s.add_argument("--category", choices=CATEGORIES, default="C")
    s.set_defaults(fn=cmd_monic)

    s = sub.add_parser("colimit", parents=[common], help="colimit of a chain file")
    s.add_argument("chain")
    s.set_defaults(fn=cmd_colimit)

    s = sub.add_parser("mediate", parents=[common], help="mediating morphism into another cocone")
    s.add_argument("chain")
    s.add_argument("apex")
    s.add_argument("legs", nargs="+")
    s.set_defaults(fn=cmd_mediate)

    s = sub.add_parser("classify", parents=[common], help="finiteness in iC, iE, iB")
    s.add_argument("space")
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("amalgamate", parents=[common], help="complete a cospan of iC-monics")
    s.add_argument("base")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("into_left")
    s.add_argument("into_right")
    s.set_defaults(fn=cmd_amalgamate)

    s = sub.add_parser("fraisse", parents=[common], help="build approximants of the universal object")
    s.add_argument("--sigma", default="0,1")
    s.add_argument("--max-objects", type=int, default=2)
    s.add_argument("--max-attributes", type=int, default=3)
    s.add_argument("--steps", type=int, default=50)
    s.set_defaults(fn=cmd_fraisse)

    s = sub.add_parser("gallery", parents=[common], help="named chains and the no-colimit demo")
    s.add_argument("id", choices=GENERATORS + ("demo-no-colimit",))
    s.set_defaults(fn=cmd_gallery)

    s = sub.add_parser("sweep", parents=[common], help="exhaustive agreement suites")
    s.add_argument("--sigma", default="0,1")
    s.add_argument("--max-objects", type=int, default=2)
    s.add_argument("--max-attributes", type=int, default=2)
    s.add_argument("--suite", choices=SUITES + tuple(SUITE_ALIASES), required=True)
    s.add_argument("--limit", type=int, help="sample at most this many cases where supported")
    s.set_defaults(fn=cmd_sweep)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help exits 0
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.fn(args)
    except ChuError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
