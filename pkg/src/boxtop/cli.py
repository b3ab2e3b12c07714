"""Command-line interface.

Machine-readable results (certificates, witnesses) go to stdout as JSON;
human-readable summaries go to stderr.  Exit codes: 0 success, 1 a checked
property failed, 2 bad input, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, kernels
from .acceptance import run_all
from .config import ENUM_LIMIT_ENV, RunConfig
from .covers import certify_b_refinement, is_antichain, is_dense, refines
from .cube import CubeFamily, dumps
from .errors import BoxtopError, InputError, PropertyFailure, ResourceError
from .generators import random_dense_family, random_family, random_tail_cover
from .metrisable import BaseFamily, MetrisabilityWitness, sikorski_refine
from .refine import disjointify, prefix_ladder_refine
from .singular import SingularParams, regular_prefix_cover, singular_disjoint_cover, verify_singular_cover
from .tailbox import TOP, IntervalBox, RudinTrace, TailBoxCover, rudin_refine, verify_box_refinement

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None


def _fmt(path: str | None, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "json" if path and path.endswith(".json") else "text"


def _load_family(path: str, fmt: str | None = None, dim: int | None = None,
                 budget: int | None = None) -> CubeFamily:
    text = _read(path)
    if _fmt(path, fmt) == "json":
        fam = CubeFamily.from_json(text)
        if budget is not None:
            fam = CubeFamily(fam.dim, fam.cubes, budget)
        return fam
    return CubeFamily.from_text(text, dim=dim, support_budget=budget)


def _dump_family(fam: CubeFamily, path: str | None, fmt: str | None = None) -> None:
    _write(path, fam.to_json() if _fmt(path, fmt) == "json" else fam.to_text())


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# -- subcommands ---------------------------------------------------------------

def cmd_check(args) -> int:
    R = _load_family(args.family, args.format, args.dim, args.budget)
    if args.cover is not None:
        S = _load_family(args.cover, args.format, args.dim, args.budget)
    else:
        S = None
    props = args.property or (["dense", "antichain", "refines"] if S is not None else ["dense", "antichain"])
    if "refines" in props and S is None:
        raise InputError("checking refines needs --cover")
    if S is not None and not args.property:
        cert = certify_b_refinement(S, R, args.mode, check_union=not args.no_union)
        _emit(cert.to_json_obj())
        _info(f"check: dense={cert.dense_ok} antichain={cert.antichain_ok} refines={cert.refines_ok} "
              f"union={cert.union_preserved_ok}")
        return EXIT_OK if cert.ok else EXIT_PROPERTY
    out: dict = {}
    witnesses: dict = {}
    if "dense" in props:
        ok, p = is_dense(R, args.mode)
        out["dense_ok"] = ok
        if not ok:
            witnesses["dense"] = str(p)
    if "antichain" in props:
        ok, pair = is_antichain(R)
        out["antichain_ok"] = ok
        if not ok:
            witnesses["antichain"] = [pair[0].pattern, pair[1].pattern]
    if "refines" in props:
        ok, r = refines(S, R)
        out["refines_ok"] = ok
        if not ok:
            witnesses["refines"] = r.pattern
    out["witnesses"] = witnesses
    _emit(out)
    _info("check: " + " ".join(f"{k[:-3]}={v}" for k, v in out.items() if k.endswith("_ok")))
    return EXIT_OK if not witnesses else EXIT_PROPERTY


def _refine_cubes(args) -> int:
    S = _load_family(args.input, args.format, args.dim, args.budget)
    if args.algo == "ladder":
        R = prefix_ladder_refine(S, args.order)
    else:
        R = disjointify(S, coalesce=args.coalesce)
    _dump_family(R, args.output, args.out_format or args.format)
    cert = certify_b_refinement(S, R, args.mode, check_union=True)
    if args.cert:
        _write(args.cert, cert.to_json())
    _emit(cert.to_json_obj())
    _info(f"refine --algo {args.algo}: {len(S)} cubes -> {len(R)} cubes, certificate "
          f"{'all true' if cert.ok else 'FAILED'}")
    return EXIT_OK if cert.ok else EXIT_PROPERTY


def _refine_rudin(args) -> int:
    O = TailBoxCover.from_json(_read(args.input))
    trace = RudinTrace(0, [])
    R = rudin_refine(O, trace)
    _write(args.output, dumps({"coords": list(O.coords), "boxes": [b.to_json_obj() for b in R]}))
    cert = verify_box_refinement(O, R).to_json_obj()
    cert["stats"] = {"input_size": len(O.boxes), "output_size": len(R),
                     "iterations": trace.iterations, "ranks": trace.ranks}
    if args.cert:
        _write(args.cert, dumps(cert))
    _emit(cert)
    ok = cert["disjoint_ok"] and cert["covers_ok"] and cert["refines_ok"]
    _info(f"refine --algo rudin: {len(O.boxes)} boxes -> {len(R)} boxes in {trace.iterations} iterations")
    return EXIT_OK if ok else EXIT_PROPERTY


def _refine_sikorski(args) -> int:
    if args.cover is None:
        raise InputError("refine --algo sikorski needs --cover")
    W = MetrisabilityWitness.from_json_obj(_load_json(args.input))
    O = BaseFamily.from_json_obj(_load_json(args.cover))
    cells = sikorski_refine(W, O)
    result = BaseFamily(W.points, cells)
    _write(args.output, dumps(result.to_json_obj()))
    seen: set = set()
    disjoint = True
    for c in cells:
        disjoint &= not (c & seen)
        seen |= c
    refines_ok = all(any(c <= o for o in O.sets) for c in cells)
    cert = {"disjoint_ok": disjoint, "covers_ok": seen == set(W.points), "refines_ok": refines_ok,
            "stats": {"points": len(W.points), "levels": W.levels,
                      "input_size": len(O.sets), "output_size": len(cells)}}
    if args.cert:
        _write(args.cert, dumps(cert))
    _emit(cert)
    _info(f"refine --algo sikorski: {len(O.sets)} sets -> {len(cells)} cells")
    return EXIT_OK if disjoint and cert["covers_ok"] and refines_ok else EXIT_PROPERTY


def cmd_refine(args) -> int:
    if args.algo in ("ladder", "disjointify"):
        return _refine_cubes(args)
    if args.algo == "rudin":
        return _refine_rudin(args)
    return _refine_sikorski(args)


def cmd_gen(args) -> int:
    cfg = RunConfig(seed=args.seed)
    if args.kind == "random-dense":
        fam = random_dense_family(cfg.rng("random-dense", args.dim, args.n, args.budget),
                                  args.dim, args.n, args.budget, args.min_support)
        _dump_family(fam, args.output, args.format)
        _info(f"gen random-dense: {len(fam)} cubes over {fam.dim} coordinates")
        return EXIT_OK
    if args.kind == "random-cover":
        if args.coords:
            O = random_tail_cover(cfg.rng("random-cover", *args.coords, args.n), args.coords, args.n)
            _write(args.output, O.to_json())
            _info(f"gen random-cover: {len(O.boxes)} boxes over coordinates {list(O.coords)}")
            return EXIT_OK
        fam = random_family(cfg.rng("random-cover", args.dim, args.n, args.budget),
                            args.dim, args.n, args.budget, args.min_support)
        _dump_family(fam, args.output, args.format)
        _info(f"gen random-cover: {len(fam)} cubes over {fam.dim} coordinates")
        return EXIT_OK
    if args.kind == "prefix":
        fam = regular_prefix_cover(args.theta, args.dim)
        _dump_family(fam, args.output, args.format)
        _info(f"gen prefix: {len(fam)} cubes")
        return EXIT_OK
    # singular
    if not args.ladder:
        raise InputError("gen singular needs --ladder")
    if args.partition == "auto":
        P = SingularParams.auto(args.theta, args.ladder, args.dim)
    else:
        mapping = _load_json(args.partition)
        if not isinstance(mapping, dict):
            raise InputError("partition file must map prefixes to ladder indices")
        P = SingularParams.from_mapping(args.theta, args.ladder, args.dim, mapping)
    fam = singular_disjoint_cover(P)
    _dump_family(fam, args.output, args.format)
    rep = verify_singular_cover(P, fam)
    cert = {"params": P.to_json_obj(), **rep.to_json_obj()}
    if args.cert:
        _write(args.cert, dumps(cert))
    if args.output not in (None, "-"):
        _emit(cert)
    _info(f"gen singular: {len(fam)} cubes, disjoint={rep.disjoint_ok} covers={rep.covers_ok}")
    return EXIT_OK if rep.ok else EXIT_PROPERTY


def cmd_convert(args) -> int:
    src = _fmt(args.input, args.format)
    dst = args.to or ("text" if src == "json" else "json")
    fam = _load_family(args.input, src, args.dim)
    _dump_family(fam, args.output, dst)
    _info(f"convert: {len(fam)} cubes, {src} -> {dst}")
    return EXIT_OK


def _roundtrip_checks(seed: int) -> list[tuple[str, bool]]:
    """Write, read and rewrite every file format; bytes must not change."""
    from .generators import random_nested_witness
    from .metrisable import Ultrametric, ultrametric_to_witness
    from .generators import random_ultrametric

    cfg = RunConfig(seed=seed)
    rng = cfg.rng("roundtrip")
    fam = random_dense_family(rng, 6, 8, budget=4)
    pts, d = random_ultrametric(rng, 6)
    W = random_nested_witness(rng, list(range(5)), 3)
    samples = {
        "family text": (fam.to_text(), lambda t: CubeFamily.from_text(t).to_text()),
        "family json": (fam.to_json(), lambda t: CubeFamily.from_json(t).to_json()),
        "witness json": (W.to_json(),
                         lambda t: MetrisabilityWitness.from_json_obj(json.loads(t)).to_json()),
        "ultrametric json": (Ultrametric(pts, d).to_json(),
                             lambda t: Ultrametric.from_json_obj(json.loads(t)).to_json()),
        "witness from ultrametric": (ultrametric_to_witness(Ultrametric(pts, d)).to_json(),
                                     lambda t: MetrisabilityWitness.from_json_obj(json.loads(t)).to_json()),
        "tail cover json": (random_tail_cover(rng, [2, 3], 3).to_json(),
                            lambda t: TailBoxCover.from_json(t).to_json()),
        "base json": (dumps(BaseFamily([0, 1, 2], [{0, 1}, {2}]).to_json_obj()),
                      lambda t: dumps(BaseFamily.from_json_obj(json.loads(t)).to_json_obj())),
    }
    out = []
    with tempfile.TemporaryDirectory() as tmp:
        for name, (text, again) in samples.items():
            path = Path(tmp) / "sample"
            path.write_text(text)
            out.append((name, again(path.read_text()) == text))
    # text -> json -> text through the converter's code path
    out.append(("text/json conversion",
                CubeFamily.from_json(CubeFamily.from_text(fam.to_text()).to_json()).to_text() == fam.to_text()))
    box = IntervalBox.from_json_obj([{"t": "S", "v": 1}, {"t": "T", "a": 0}])
    out.append(("box json", box.to_json_obj() == [{"t": "S", "v": 1}, {"t": "T", "a": 0}]))
    return out


def cmd_selftest(args) -> int:
    _info(f"boxtop {__version__}, kernel backend: {kernels.BACKEND}")
    ok = True
    for res in run_all(scale=args.scale, seed=args.seed):
        _info(res.line())
        ok &= res.passed
    for name, passed in _roundtrip_checks(args.seed):
        _info(f"[{'PASS' if passed else 'FAIL'}] round trip: {name}")
        ok &= passed
    _emit({"selftest_ok": ok, "scale": args.scale, "backend": kernels.BACKEND})
    return EXIT_OK if ok else EXIT_PROPERTY


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxtop", description="Cube covers, refinements and witnesses.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--enum-limit", type=int, help=f"enumeration limit (overrides {ENUM_LIMIT_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    def family_opts(sp):
        sp.add_argument("--format", choices=["text", "json"], help="input format (default: by extension)")
        sp.add_argument("--dim", type=int, help="dimension, needed for empty text families")
        sp.add_argument("--budget", type=int, help="support budget to enforce on the input")
        sp.add_argument("--mode", choices=["auto", "exhaustive", "symbolic"], default="auto",
                        help="density check (default: auto)")

    c = sub.add_parser("check", help="check density, antichain and refinement properties")
    c.add_argument("family", help="family to check (R)")
    c.add_argument("--cover", help="family that R should refine (S)")
    c.add_argument("-p", "--property", action="append", choices=["dense", "antichain", "refines"],
                   help="property to check; repeatable (default: full certificate when --cover is given)")
    c.add_argument("--no-union", action="store_true", help="skip the union comparison")
    family_opts(c)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("refine", help="compute a disjoint refinement with a certificate")
    r.add_argument("input")
    r.add_argument("--algo", choices=["ladder", "disjointify", "rudin", "sikorski"], default="disjointify")
    r.add_argument("-o", "--output", required=True, help="output file ('-' for stdout)")
    r.add_argument("--out-format", choices=["text", "json"])
    r.add_argument("--order", type=_int_list, help="coordinate order for --algo ladder, e.g. 2,0,1")
    r.add_argument("--coalesce", action="store_true", help="merge sibling cubes after disjointify")
    r.add_argument("--cover", help="open cover JSON for --algo sikorski")
    r.add_argument("--cert", help="also write the certificate to this file")
    family_opts(r)
    r.set_defaults(func=cmd_refine)

    g = sub.add_parser("gen", help="generate families and covers")
    g.add_argument("kind", choices=["random-dense", "random-cover", "singular", "prefix"])
    g.add_argument("--lambda", "--dim", dest="dim", type=int, default=8, help="dimension")
    g.add_argument("--n", type=int, default=16, help="number of random cubes or boxes")
    g.add_argument("--budget", type=int, help="support budget")
    g.add_argument("--min-support", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--coords", type=_int_list, help="tail-coordinate sizes (random-cover only)")
    g.add_argument("--theta", type=int, default=1)
    g.add_argument("--ladder", type=_int_list)
    g.add_argument("--partition", default="auto", help="'auto' or a JSON file mapping prefixes to indices")
    g.add_argument("-o", "--output", help="output file (default: stdout)")
    g.add_argument("--format", choices=["text", "json"])
    g.add_argument("--cert", help="certificate file (singular only)")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("convert", help="convert a family between text and JSON")
    v.add_argument("input")
    v.add_argument("-o", "--output", required=True)
    v.add_argument("--to", choices=["text", "json"])
    v.add_argument("--format", choices=["text", "json"], help="input format (default: by extension)")
    v.add_argument("--dim", type=int)
    v.set_defaults(func=cmd_convert)

    s = sub.add_parser("selftest", help="run the property suites at reduced counts")
    s.add_argument("--scale", type=float, default=0.05, help="fraction of the full instance counts")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def _witness_json(w):
    if w is None or isinstance(w, (str, int)):
        return w
    if isinstance(w, tuple):
        return ["T" if v == TOP else _witness_json(v) for v in w]
    return str(w)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    saved = os.environ.get(ENUM_LIMIT_ENV)
    if args.enum_limit is not None:
        os.environ[ENUM_LIMIT_ENV] = str(args.enum_limit)
    try:
        return args.func(args)
    except PropertyFailure as e:
        _emit({"error": type(e).__name__, "message": str(e), "witness": _witness_json(e.witness)})
        _info(f"error: {e}")
        return EXIT_PROPERTY
    except ResourceError as e:
        _info(f"resource limit: {e}")
        return EXIT_RESOURCE
    except (InputError, BoxtopError) as e:
        _info(f"input error: {e}")
        return EXIT_INPUT
    finally:
        if saved is None:
            os.environ.pop(ENUM_LIMIT_ENV, None)
        else:
            os.environ[ENUM_LIMIT_ENV] = saved


if __name__ == "__main__":
    sys.exit(main())
