"""Command line front end.

Subcommands: double-points, trace, verify, plot, report.  Exit codes: 0 on
success; 1 for usage or config problems; 2 when the genericity screen
fails even after the quadratic retry schedule; 3 when no acceptable loop
or braid could be produced; 4 when the braid fails its band-form
certification.
"""

from __future__ import annotations

import argparse
import json
import sys

from .braids import BandRepresentation, BraidWord, alexander_of_closure, require_band_match
from .config import load_config, parse_config
from .errors import (
    BlockStructureFailure,
    BranchKnotError,
    ConstructionFailure,
    DoublePointOnLoop,
    GenericityFailure,
    LiftAmbiguity,
    NotAKnot,
    ParseError,
    StrandMismatch,
    TangencyDetected,
    TemplateMismatch,
    ValidationError,
    ZeroFiber,
)
from .pipeline import (
    build_report,
    resolve_double_points,
    run_pipeline,
    serialize_report,
    write_artifacts,
)

USAGE_EXIT = 1
GENERICITY_EXIT = 2
GEOMETRY_EXIT = 3
CERTIFICATION_EXIT = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="branchknot",
        description="Braid and band form of the knot cut out by a perturbed "
        "branched disk in four-space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("double-points", parents=[], help="solve for the double points")
    p.add_argument("config", help="run configuration file")
    p.add_argument("--json", action="store_true", help="machine readable output")
    p.set_defaults(func=cmd_double_points)

    p = sub.add_parser("trace", help="trace the braid word along the loop")
    p.add_argument("config")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser(
        "verify",
        help="certify the band form; takes a config to run, or a stored "
        "report.json to recheck",
    )
    p.add_argument("config")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render the disk and braid figures")
    p.add_argument("config")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("report", help="write the full report, tables and figures")
    p.add_argument("config")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--no-figures", action="store_true", help="skip the SVG files")
    p.set_defaults(func=cmd_report)
    return parser


def cmd_double_points(args) -> int:
    cfg = load_config(args.config)
    dps, report, params, retries = resolve_double_points(
        cfg.model, cfg.params, cfg.solver
    )
    if args.json:
        payload = {
            "gamma_used": f"{complex(params.gamma)!r}",
            "gamma_retries": retries,
            "count": len(dps),
            "double_points": [
                {
                    "pairing": dp.pairing.k,
                    "w1": [dp.w1.real, dp.w1.imag],
                    "w2": [dp.w2.real, dp.w2.imag],
                    "base_point": [complex(dp.image.z1).real, complex(dp.image.z1).imag],
                    "sign": dp.sign,
                    "residual": dp.residual,
                }
                for dp in dps
            ],
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
        return 0
    print(f"{len(dps)} double point(s)  (quadratic retries: {retries})")
    print(f"{'idx':>3} {'k':>2} {'w1':>28} {'base point':>28} {'sign':>4}")
    for i, dp in enumerate(dps):
        z1 = complex(dp.image.z1)
        print(
            f"{i:>3} {dp.pairing.k:>2} "
            f"{dp.w1.real:>13.6g}{dp.w1.imag:>+13.6g}i "
            f"{z1.real:>13.6g}{z1.imag:>+13.6g}i "
            f"{dp.sign:>+4d}"
        )
    return 0


def cmd_trace(args) -> int:
    cfg = load_config(args.config)
    result = run_pipeline(cfg)
    if args.json:
        payload = build_report(result)
        print(json.dumps({"braid": payload["braid"], "loop": payload["loop"]},
                         sort_keys=True, indent=2))
        return 0
    word = result.traced.word
    print(f"strands:   {result.traced.strand_count}")
    print(f"word:      {word.to_text()}")
    print(f"letters:   {len(word.letters)}")
    print(f"closure:   {word.closure_components()} component(s)")
    print(f"loop rho:  {result.loop.rho:.6g}  (shrinks: {result.rho_retries})")
    return 0


def cmd_verify(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return _verify_stored_report(text)
    cfg = parse_config(text)
    result = run_pipeline(cfg)
    word = result.traced.word
    n = result.traced.strand_count
    print(f"double points:        {len(result.double_points)}")
    print(f"braid word:           {word.to_text()}")
    print(f"band form:            even={list(result.band.even_block)} "
          f"odd={list(result.band.odd_block)} bands={len(result.band.bands)} "
          f"sign={result.band.sign:+d}")
    print("band certification:   OK (expansion matches traced word)")
    print(f"exponent sum:         {result.exponent_sum} "
          f"= {result.band.sign}*({n}-1) + 2*{sum(p.eps for p in result.structure.bands)}")
    print(f"euler characteristic: {result.euler_characteristic}")
    print(f"genus:                {result.genus}")
    if result.alexander is not None:
        sym = "symmetric" if result.alexander.is_symmetric() else "NOT symmetric"
        print(f"alexander:            {result.alexander}  ({sym})")
    else:
        print(f"closure:              {word.closure_components()} components (link)")
    return 0


def _verify_stored_report(text: str) -> int:
    """Recheck the invariants of an already-written report.json.

    Data inconsistencies (fields that disagree with the stored word) are
    ValidationError; a band form that fails to reproduce the word is
    TemplateMismatch, same as in a live run.
    """
    try:
        data = json.loads(text)
        braid = data["braid"]
        band = data["band_form"]
        n = int(braid["strands"])
        word = BraidWord.from_text(braid["word"], n)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"not a readable report: {exc}")

    def check(name: str, ok: bool) -> None:
        print(f"{name + ':':<22}{'OK' if ok else 'MISMATCH'}")
        if not ok:
            raise ValidationError(f"stored report is inconsistent: {name}")

    check("letters", [list(l) for l in word.letters] == braid["letters"])
    check("exponent sum", braid["exponent_sum"] == word.exponent_sum())
    components = word.closure_components()
    check("closure", braid["closure_components"] == components
          and braid["is_knot"] == (components == 1))

    rep = BandRepresentation(
        strands=n,
        sign=int(band["regime_sign"]),
        even_block=tuple(band["even_block"]),
        odd_block=tuple(band["odd_block"]),
        bands=tuple(
            (BraidWord.from_text(b["conjugator"], n), int(b["position"]), int(b["eps"]))
            for b in band["bands"]
        ),
    )
    check("euler characteristic",
          band["euler_characteristic"] == rep.euler_characteristic())
    check("genus", band["genus"] == str(rep.genus()))
    require_band_match(rep, word)
    print(f"{'band expansion:':<22}OK")
    identity = word.exponent_sum() == rep.sign * (n - 1) + 2 * sum(
        eps for _, _, eps in rep.bands
    )
    if not identity:
        raise TemplateMismatch("exponent sum violates the block/band writhe identity")
    print(f"{'writhe identity:':<22}OK")

    if "alexander" in data:
        poly = alexander_of_closure(word)
        stored = {int(e): int(c) for e, c in data["alexander"]["coefficients"].items()}
        check("alexander", stored == poly.coeffs and
              data["alexander"]["symmetric"] == poly.is_symmetric())
    return 0


def cmd_plot(args) -> int:
    cfg = load_config(args.config)
    result = run_pipeline(cfg)
    import os

    from . import plotting

    os.makedirs(args.out, exist_ok=True)
    fig = plotting.plot_disk(
        cfg.model, result.params_used,
        dps=list(result.double_points), loop=result.loop, solver=cfg.solver,
    )
    disk_path = os.path.join(args.out, "disk.svg")
    plotting.save_svg(fig, disk_path)
    fig = plotting.plot_braid(result.traced)
    braid_path = os.path.join(args.out, "braid.svg")
    plotting.save_svg(fig, braid_path)
    print(disk_path)
    print(braid_path)
    return 0


def cmd_report(args) -> int:
    cfg = load_config(args.config)
    result = run_pipeline(cfg)
    written = write_artifacts(result, args.out, figures=not args.no_figures)
    for name in written:
        print(name)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse --help exits 0; usage errors come through _Parser.error.
        return exc.code or 0
    try:
        return args.func(args)
    except (ParseError, ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"branchknot: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except GenericityFailure as exc:
        print(f"branchknot: {exc}", file=sys.stderr)
        return GENERICITY_EXIT
    except (
        ConstructionFailure,
        BlockStructureFailure,
        StrandMismatch,
        TangencyDetected,
        DoublePointOnLoop,
        LiftAmbiguity,
        ZeroFiber,
    ) as exc:
        print(f"branchknot: {exc}", file=sys.stderr)
        return GEOMETRY_EXIT
    except (TemplateMismatch, NotAKnot) as exc:
        print(f"branchknot: {exc}", file=sys.stderr)
        return CERTIFICATION_EXIT
    except BranchKnotError as exc:
        print(f"branchknot: {exc}", file=sys.stderr)
        return GEOMETRY_EXIT


if __name__ == "__main__":
    sys.exit(main())
