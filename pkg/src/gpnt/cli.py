"""Command-line workbench.

Exit status: 0 when everything checked passes, 1 for unusable input,
2 for a mathematical failure (cover not eps-good for the requested eps, a
failed identity, or a violated bound).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
import time
from typing import Sequence

from . import io as docs
from .complexes import INF, InconsistentBirths
from .cover import CoverComplexes, CoverFiltration, critical_scales, index_set
from .generators import FLAVORS, RandomParams, gen_e1, gen_random, gen_tight
from .interleaving import InterleavingConfig, NotEpsGood, verify_gpnt_identities
from .metrics import TheoremViolation, bottleneck, bound_check
from .persistence import PersistenceDiagram, goodness, persistence

EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 1, 2

log = logging.getLogger("gpnt")


class InputError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, float):
        if x == INF:
            return "inf"
        return int(x) if x.is_integer() else x
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _int_list(text: str) -> list[int]:
    try:
        out = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError("need at least one nonnegative integer")
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_cover(path: str) -> tuple[CoverFiltration, bytes]:
    raw = _read(path)
    return docs.parse_cover(raw), raw


def _diagram_rows(d: PersistenceDiagram) -> list[dict]:
    return [{"dim": k, "birth": b, "death": e} for k, b, e in d.bars]


# -- subcommands -------------------------------------------------------------


def cmd_goodness(args) -> tuple[dict, bool]:
    cover, raw = _load_cover(args.file)
    rep = goodness(cover, args.dim, threads=args.threads)
    return {"input": docs.digest(raw), "goodness": rep.to_dict()}, True


def cmd_diagram(args) -> tuple[dict, bool]:
    cover, raw = _load_cover(args.file)
    top = max(args.dim)
    cc = CoverComplexes(cover, top + 1)
    target = args.target
    result: dict = {"input": docs.digest(raw), "target": target}
    if target == "space":
        dgm = persistence(cc.space, args.reduced)
    elif target == "nerve":
        dgm = persistence(cc.nerve, args.reduced)
    elif target == "flag":
        dgm = persistence(cc.flag, args.reduced)
    elif target == "blowup":
        dgm = persistence(cc.blowup, args.reduced)
    elif target == "shifted-nerve":
        eps = goodness(cc, top).epsilon_star
        if eps == INF:
            raise InputError("epsilonStar is infinite; the shifted nerve is undefined")
        shift = (top + 1) * eps / 2
        result["shift"] = shift
        dgm = persistence(cc.nerve, args.reduced).shift(shift)
    else:
        if not args.v:
            raise InputError("--v is required for target intersection")
        v = index_set(args.v)
        if v not in cover.index_sets:
            raise InputError(f"U_{list(v)} is empty at every scale")
        dgm = persistence(cc.intersection(v, augmented=args.reduced), args.reduced)
        result["v"] = list(v)
    dgm = dgm.restrict(args.dim)
    result["diagram"] = _diagram_rows(dgm)
    result["_dgm"] = dgm
    return result, True


def cmd_bound(args) -> tuple[dict, bool]:
    cover, raw = _load_cover(args.file)
    cc = CoverComplexes(cover, max(args.dim) + 1)
    reports = []
    for k in args.dim:
        reports.append(bound_check(cc, k, reduced=args.reduced, strict=False))
    # a violated inequality only counts when epsilonStar is finite
    ok = all(r.blowup_agrees and (r.epsilon_star == INF or (r.verdict and r.shifted_verdict)) for r in reports)
    out = {"input": docs.digest(raw), "bounds": [r.to_dict() for r in reports],
           "allDims": {"maxDB": max(r.dB for r in reports), "verdict": all(r.verdict for r in reports)}}
    if not ok:
        out["error"] = "TheoremViolation"
    return out, ok


def cmd_interleave(args) -> tuple[dict, bool]:
    cover, raw = _load_cover(args.file)
    K = args.dim
    cc = CoverComplexes(cover, K + 1)
    eps_star = goodness(cc, K, threads=args.threads).epsilon_star
    eps = args.eps if args.eps is not None else eps_star
    if eps == INF:
        raise InputError("epsilonStar is infinite; pass --eps to attempt a construction anyway")
    cfg = InterleavingConfig(K, eps, tuple(args.scales or ()))
    out = {"input": docs.digest(raw), "epsilonStar": eps_star, "epsilon": eps, "t": cfg.t,
           "criticalScales": critical_scales(cover)}
    if not args.verify:
        return out, True
    rep = verify_gpnt_identities(cover, cfg, cc)
    out["verification"] = rep.to_dict()
    if rep.failure is not None:
        out["error"] = "NotEpsGood"
    return out, rep.ok


def _load_diagram(path: str) -> PersistenceDiagram:
    raw = _read(path).decode("utf-8")
    try:
        if raw.lstrip().startswith(("{", "[")):
            doc = json.loads(raw)
            if isinstance(doc, dict) and isinstance(doc.get("result"), dict):
                doc = doc["result"]  # a full `gpnt diagram` report
            rows = doc.get("diagram", doc.get("bars")) if isinstance(doc, dict) else doc
        else:
            rows = list(csv.DictReader(_io.StringIO(raw)))
        bars = tuple((int(r["dim"]), float(r["birth"]), float(r["death"])) for r in rows)
        return PersistenceDiagram(bars)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: not a diagram ({exc})") from None


def cmd_bottleneck(args) -> tuple[dict, bool]:
    a, b = _load_diagram(args.a), _load_diagram(args.b)
    return {"dim": args.dim, "bottleneck": bottleneck(a, b, args.dim)}, True


def cmd_gen(args) -> bytes:
    if args.kind == "tight":
        return docs.emit_cover(gen_tight(args.n))
    if args.kind == "e1":
        return docs.emit_cover(gen_e1())
    p = RandomParams(args.vertices, args.elements, args.scales, args.delay, args.fill)
    return docs.emit_cover(gen_random(args.seed, args.flavor, p), p.vertices)


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gpnt", description="Nerve approximation workbench.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("file", nargs="?", default="-", help="cover document ('-' or omitted for stdin)")
        p.add_argument("--threads", type=int, default=1)
        return p

    p = with_file(sub.add_parser("goodness", help="exact epsilonStar and its witnesses"))
    p.add_argument("--dim", type=int, default=1, help="largest homology dimension checked")
    p.set_defaults(run=cmd_goodness)

    p = with_file(sub.add_parser("diagram", help="persistence diagram of one filtration"))
    p.add_argument("--target", required=True,
                   choices=["space", "nerve", "flag", "blowup", "shifted-nerve", "intersection"])
    p.add_argument("--v", type=_int_list, help="index set for --target intersection, e.g. 0,1")
    p.add_argument("--dim", type=_int_list, default=[0, 1])
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--csv", action="store_true", help="write the diagram as CSV")
    p.set_defaults(run=cmd_diagram)

    p = with_file(sub.add_parser("bound", help="bottleneck bound between space and nerve"))
    p.add_argument("--dim", type=_int_list, default=[0, 1])
    p.add_argument("--reduced", action="store_true")
    p.set_defaults(run=cmd_bound)

    p = with_file(sub.add_parser("interleave", help="construct and verify the interleaving maps"))
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--scales", type=_float_list)
    p.set_defaults(run=cmd_interleave)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two diagram files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(run=cmd_bottleneck)

    p = sub.add_parser("gen", help="write a fixture cover document")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("tight")
    g.add_argument("--n", type=int, required=True)
    gsub.add_parser("e1")
    g = gsub.add_parser("random")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--flavor", choices=FLAVORS, default="good")
    g.add_argument("--vertices", type=int, default=RandomParams.vertices)
    g.add_argument("--elements", type=int, default=RandomParams.elements)
    g.add_argument("--scales", type=int, default=RandomParams.scales)
    g.add_argument("--delay", type=int, default=RandomParams.delay)
    g.add_argument("--fill", type=float, default=RandomParams.fill)
    p.set_defaults(run=None)
    return ap


def _emit(report: dict, out) -> None:
    out.write(json.dumps(_jsonable(report), indent=2) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    out = sys.stdout
    if args.command == "gen":
        try:
            out.write(cmd_gen(args).decode("utf-8"))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK

    started = time.perf_counter()
    params = {k: v for k, v in vars(args).items() if k not in ("run", "verbose", "command")}
    report: dict = {"command": args.command, "params": params}
    try:
        result, ok = args.run(args)
        code = EXIT_OK if ok else EXIT_MATH
    except (docs.ParseError, InconsistentBirths, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotEpsGood as exc:
        result, code = {"error": "NotEpsGood", "witness": exc.to_dict(), "message": str(exc)}, EXIT_MATH
    except TheoremViolation as exc:
        result, code = {"error": "TheoremViolation", "message": str(exc)}, EXIT_MATH

    dgm = result.pop("_dgm", None)
    if getattr(args, "csv", False) and dgm is not None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["dim", "birth", "death"])
        for k, b, e in dgm.bars:
            w.writerow([k, docs.format_decimal(b), "inf" if e == INF else docs.format_decimal(e)])
        return code
    report["result"] = result
    report["pass"] = code == EXIT_OK
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    _emit(report, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
