"""Command-line interface: ``abelcurves <command> [options]``.

Exit codes: 0 success, 1 error, 2 certification left unknown words.
Defaults for the shared budget flags may be set through ABEL_DEPTH,
ABEL_ORDER, ABEL_MAX_WORD, ABEL_TOL, ABEL_WORKERS, ABEL_SEED and ABEL_OUT.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import abel, certify, deform, pipeline, signature, smoothing, topology
from .exact import q, q_str
from .paths import PathError, PlanarPath

CAPS = {"depth": 12, "order": 12, "max_word": 8}
EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2

log = logging.getLogger("abelcurves")


class ConfigError(ValueError):
    pass


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    depth: int = 4
    order: int = 8
    max_word: int = 4
    tol: float = 1e-30
    out: str | None = None
    workers: int = 1
    seed: int = 0

    def validate(self) -> None:
        for name, cap in CAPS.items():
            val = getattr(self, name)
            if not 1 <= val <= cap:
                raise ConfigError(f"{name} = {val} outside 1..{cap}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")


def _env(name: str, default, kind=int):
    raw = os.environ.get("ABEL_" + name)
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"ABEL_{name}={raw!r}: {exc}") from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def read_path(path: str) -> PlanarPath:
    data = _load_json(path)
    try:
        if isinstance(data, dict) and "vertices" in data:
            raise InputError(f"{path}: expected a path file, got a curve file")
        return PlanarPath.from_json(data)
    except (KeyError, TypeError, ValueError, PathError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{path}: malformed path ({type(exc).__name__}: {exc})") from exc


def read_curve(path: str) -> topology.CurveGraph:
    data = _load_json(path)
    try:
        return topology.build_graph(data)
    except topology.CurveError as exc:
        raise InputError(f"{path}: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(cfg: RunConfig, obj, name: str = "output.json") -> None:
    text = obj if isinstance(obj, str) else dumps(obj)
    if cfg.out is None:
        sys.stdout.write(text)
        return
    out = Path(cfg.out)
    if out.suffix == "":
        out.mkdir(parents=True, exist_ok=True)
        out = out / name
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)


# -- commands ------------------------------------------------------------------

def cmd_signature(cfg: RunConfig, args) -> int:
    sig = signature.path_signature(read_path(args.path), cfg.depth)
    emit(cfg, sig.to_json(), "signature.json")
    return EXIT_OK


def cmd_jet(cfg: RunConfig, args) -> int:
    path = read_path(args.path)
    jet = signature.return_map_jet(signature.path_signature(path, cfg.order), cfg.order)
    emit(cfg, jet.to_json(), "jet.json")
    return EXIT_OK


def cmd_ode_check(cfg: RunConfig, args) -> int:
    path = read_path(args.path)
    grid = [float(x) for x in args.grid.split(",")]
    report = abel.convergence_report(path, cfg.order, grid, tol=cfg.tol)
    emit(cfg, report.to_csv(), "convergence.csv")
    sys.stderr.write(dumps(report.summary()))
    return EXIT_OK


def cmd_closed_form(cfg: RunConfig, args) -> int:
    pairs = []
    for text in args.pair:
        a, b = (float(q(x)) for x in text.split(","))
        pairs.append((a, b))
    value = abel.closed_form_P(*pairs[0], args.r) if len(pairs) == 1 else abel.compose_closed_forms(pairs, args.r)
    emit(cfg, {"pairs": [list(p) for p in pairs], "r": args.r, "value": value, "exact": False}, "closed_form.json")
    return EXIT_OK


def cmd_area(cfg: RunConfig, args) -> int:
    value = certify.area_obstruction(read_path(args.path))
    emit(cfg, {"area": q_str(value), "exact": True}, "area.json")
    return EXIT_OK


def cmd_certify(cfg: RunConfig, args) -> int:
    g = read_curve(args.curve)
    if args.word is not None:
        word = topology.parse_word_text(args.word)
        if any(abs(x) > g.rank for x in word):
            raise ConfigError(f"word {args.word!r} uses generators beyond g{g.rank}")
        cert = certify.certify_word(g, word, cfg.order)
        emit(cfg, cert.to_json(), "certificate.json")
        return EXIT_UNKNOWN if cert.outcome == certify.UNKNOWN else EXIT_OK
    if cfg.order < 3:
        raise ConfigError("curve certification needs N >= 3 (c1 and c2 vanish on closed loops)")
    report = certify.certify_curve(g, cfg.max_word, cfg.order, workers=cfg.workers)
    emit(cfg, report.to_json(), "report.json")
    return EXIT_OK if report.certified else EXIT_UNKNOWN


def cmd_rectangularize(cfg: RunConfig, args) -> int:
    g = read_curve(args.curve)
    if deform.has_horizontal_edge(g) and not g.is_rectangular():
        g, _ = deform.rotate_generic(g)
    if any(deform.needs_reduction(g, v) for v in g.vertices):
        g = deform.degree_reduce(g, q(args.epsilon))
    rect, tris = deform.rectangularize(g)
    emit(cfg, {"curve": topology.graph_to_json(rect), "triangles": [t.to_json() for t in tris], "rank": rect.rank}, "rectangular.json")
    return EXIT_OK


def _family(g: topology.CurveGraph, args):
    if args.family == "triangle":
        if g.is_rectangular():
            corners = [v for v in g.vertices if v != g.basepoint and g.degree(v) == 2 and v in smoothing.smoothable_corners(g)]
            return deform.TriangleFamily(g, deform.corner_triangles(g, corners))
        rect, tris = deform.rectangularize(g)
        return deform.TriangleFamily(rect, tris)
    if args.family == "smoothing":
        return smoothing.SmoothingFamily(g)
    if args.family == "perturb":
        a, b, c, d = (q(x) for x in args.matrix.split(","))
        return deform.PerturbationFamily(g, [[a, b], [c, d]])
    raise ConfigError(f"unknown family {args.family!r}")


def cmd_deform(cfg: RunConfig, args) -> int:
    g = read_curve(args.curve)
    fam = _family(g, args)
    words = topology.enumerate_words(fam.rank, cfg.max_word)
    fits = []
    for w in words:
        fit = deform.fit_family(fam, w, cfg.order)
        fits.append({
            "word": topology.word_text(w),
            "polys": [[q_str(c) if isinstance(c, Fraction) else float(c) for c in p.coeffs] for p in fit.polys],
            "max_residual": max(fit.residuals),
            "exact": fit.exact,
        })
    bad = deform.bad_set(fam, words, cfg.order)
    lo, hi = fam.domain
    toward = hi if args.family == "triangle" else (lo if args.family == "smoothing" else Fraction(0))
    targets = [q(x) for x in args.targets.split(",")] if args.targets else []
    picked = deform.pick_parameters(bad, targets, toward) if targets else []
    emit(cfg, {
        "family": args.family,
        "domain": [q_str(lo), q_str(hi)],
        "coefficients": fits,
        "bad_set": bad.to_json(),
        "picked": [q_str(t) for t in picked],
    }, "deform.json")
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig, args) -> int:
    g = read_curve(args.curve)
    sched = pipeline.Schedule(count=args.count, max_len=cfg.max_word, order=cfg.order,
                              epsilon=q(args.epsilon), smoothing=not args.no_smoothing, workers=cfg.workers)
    result = pipeline.approximate_universal(g, sched)
    manifest = result.manifest()
    if cfg.out is not None and Path(cfg.out).suffix == "":
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for e, entry in zip(result.emitted, manifest["curves"]):
            name = f"curve_{e.index:02d}.json"
            (out / name).write_text(dumps(pipeline.curve_file(e)))
            entry["file"] = name
        (out / "manifest.json").write_text(dumps(manifest))
    else:
        emit(cfg, manifest, "manifest.json")
    ok = all(e.report.certified for e in result.emitted)
    return EXIT_OK if ok else EXIT_UNKNOWN


COMMANDS = {
    "signature": cmd_signature,
    "jet": cmd_jet,
    "ode-check": cmd_ode_check,
    "closed-form": cmd_closed_form,
    "area": cmd_area,
    "certify": cmd_certify,
    "rectangularize": cmd_rectangularize,
    "deform": cmd_deform,
    "pipeline": cmd_pipeline,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not the 'unknown' exit code."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-K", "--depth", type=int, default=_env("DEPTH", 4), help="signature depth (<= 12)")
    common.add_argument("-N", "--order", "--N", type=int, default=_env("ORDER", 8), help="jet order (<= 12)")
    common.add_argument("-L", "--max-word", "--L", dest="max_word", type=int, default=_env("MAX_WORD", 4), help="max word length (<= 8)")
    common.add_argument("--tol", type=float, default=_env("TOL", 1e-30, float), help="ODE local error tolerance")
    common.add_argument("--out", default=_env("OUT", None, str), help="output file, or directory for multi-file output")
    common.add_argument("--workers", type=int, default=_env("WORKERS", 1), help="parallel worker processes")
    common.add_argument("--seed", type=int, default=_env("SEED", 0), help="random seed (recorded; all commands are deterministic)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="abelcurves", description="Signatures, Abel return-map jets and curve universality certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("signature", "jet", "area"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("path", help="path file (JSON)")
    p = sub.add_parser("ode-check", parents=[common])
    p.add_argument("path")
    p.add_argument("--grid", default="0.02,0.04,0.06,0.08,0.1", help="comma-separated initial values r")
    p = sub.add_parser("closed-form", parents=[common])
    p.add_argument("--pair", action="append", required=True, help="a,b (repeat to compose; the last pair acts first; write --pair=-1,0 for negatives)")
    p.add_argument("--r", type=float, required=True)
    p = sub.add_parser("certify", parents=[common])
    p.add_argument("--curve", required=True)
    p.add_argument("--word", default=None, help='single word, e.g. "g1 g2 g1- g2-"')
    p = sub.add_parser("rectangularize", parents=[common])
    p.add_argument("--curve", required=True)
    p.add_argument("--epsilon", default="1/20")
    p = sub.add_parser("deform", parents=[common])
    p.add_argument("--curve", required=True)
    p.add_argument("--family", choices=["triangle", "smoothing", "perturb"], default="triangle")
    p.add_argument("--matrix", default="1,0,0,1", help="a,b,c,d of a linear F for the perturb family")
    p.add_argument("--targets", default="", help="comma-separated parameters to nudge out of the bad set")
    p = sub.add_parser("pipeline", parents=[common])
    p.add_argument("--curve", required=True)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--epsilon", default="1/20")
    p.add_argument("--no-smoothing", action="store_true")
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(args.command, depth=args.depth, order=args.order, max_word=args.max_word, tol=args.tol,
                    out=args.out, workers=args.workers, seed=args.seed)
    try:
        cfg.validate()
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
