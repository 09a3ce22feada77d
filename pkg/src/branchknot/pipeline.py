"""End-to-end run: double points, loop, braid, band form, report.

Retry policy.  A failed genericity screen walks a deterministic schedule of
small quadratic coefficients and recomputes the double points; if every
entry fails, GenericityFailure propagates (exit code 2 at the command
line).  Geometric trouble while building, validating or tracing the loop
shrinks the base radius by 0.7 and starts the loop stage over, a few times,
before the last error propagates (exit code 3).  A band form that fails its
own certification is exit code 4.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .braids import BandRepresentation, alexander_of_closure, require_band_match
from .config import RunConfig, format_complex, format_height_terms
from .doublepoints import (
    DoublePoint,
    GenericityReport,
    check_genericity,
    find_double_points,
    gamma_retry_schedule,
)
from .errors import (
    BlockStructureFailure,
    ConstructionFailure,
    DoublePointOnLoop,
    GenericityFailure,
    LiftAmbiguity,
    StrandMismatch,
    TangencyDetected,
    TemplateMismatch,
)
from .laurent import LaurentPolynomial
from .locus import TripleCoincidence, find_triple_coincidences, sample_locus
from .loop import BaseLoop, LoopValidationReport, build_loop, parametrize_loop, validate_loop
from .surface import BranchedDiskModel, PerturbationParams
from .trace import BraidStructure, TracedBraid, extract_band_representation, trace_braid

MAX_RHO_SHRINKS = 6
RHO_SHRINK = 0.7


@dataclass(frozen=True)
class PipelineResult:
    """Everything a verified run produced."""

    config: RunConfig
    params_used: PerturbationParams
    gamma_retries: int
    double_points: tuple[DoublePoint, ...]
    genericity: GenericityReport
    triples: tuple[TripleCoincidence, ...]
    loop: BaseLoop
    validation: LoopValidationReport
    traced: TracedBraid
    band: BandRepresentation
    structure: BraidStructure
    rho_retries: int
    alexander: LaurentPolynomial | None
    is_knot: bool

    @property
    def exponent_sum(self) -> int:
        return self.traced.word.exponent_sum()

    @property
    def predicted_exponent_sum(self) -> int:
        n = self.traced.strand_count
        return self.structure.regime_sign * (n - 1) + 2 * sum(
            p.eps for p in self.structure.bands
        )

    @property
    def euler_characteristic(self) -> int:
        return self.band.euler_characteristic()

    @property
    def genus(self) -> Fraction:
        return self.band.genus()


def resolve_double_points(
    model: BranchedDiskModel,
    params: PerturbationParams,
    solver,
) -> tuple[tuple[DoublePoint, ...], GenericityReport, PerturbationParams, int]:
    """Double points behind a passed genericity screen, retrying gamma.

    Returns (points, report, params actually used, retry count) or raises
    GenericityFailure once the whole schedule is exhausted.
    """
    candidates = [params.gamma]
    candidates.extend(g for g in gamma_retry_schedule(params) if g != params.gamma)
    last = "no attempt made"
    for retry, gamma in enumerate(candidates):
        attempt = replace(params, gamma=gamma)
        try:
            dps = find_double_points(model, attempt, solver, strict=True)
        except GenericityFailure as exc:
            last = str(exc)
            continue
        report = check_genericity(model, attempt, dps, solver)
        if report.passed:
            return tuple(dps), report, attempt, retry
        last = report.describe()
    raise GenericityFailure(
        f"genericity screen failed for every quadratic offset tried: {last}"
    )


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    model = cfg.model
    dps, genericity, params, gamma_retries = resolve_double_points(
        model, cfg.params, cfg.solver
    )
    triples = tuple(find_triple_coincidences(model, params, cfg.solver))
    singular: list[complex] = []
    for k in range(1, model.branch_order // 2 + 1):
        singular.extend(
            sample_locus(model, params, k, resolution=64, cfg=cfg.solver).singular_candidates
        )

    rho = cfg.loop.rho
    last_error: Exception | None = None
    geometry_errors = (
        ConstructionFailure,
        BlockStructureFailure,
        StrandMismatch,
        TangencyDetected,
        DoublePointOnLoop,
        LiftAmbiguity,
    )
    for attempt in range(MAX_RHO_SHRINKS):
        loop_cfg = replace(cfg.loop, rho=rho)
        loop = None
        try:
            loop = build_loop(
                model, params, list(dps), loop_cfg, cfg.solver,
                triples=list(triples), singular=singular,
            )
            report = validate_loop(
                model, params, loop, loop_cfg, cfg.solver,
                triples=list(triples), singular=singular,
            )
            if not report.passed:
                raise ConstructionFailure(
                    "loop validation failed: " + "; ".join(report.failures[:4])
                )
            path = parametrize_loop(loop)
            traced = trace_braid(model, params, path, cfg.trace)
            band, structure = extract_band_representation(traced, loop)
        except geometry_errors as exc:
            last_error = exc
            current = loop.rho if loop is not None else _planned_rho(model, dps, loop_cfg)
            rho = RHO_SHRINK * current
            continue
        rho_retries = attempt
        break
    else:
        assert last_error is not None
        raise last_error

    require_band_match(band, traced.word)
    if traced.word.exponent_sum() != (
        structure.regime_sign * (traced.strand_count - 1)
        + 2 * sum(p.eps for p in structure.bands)
    ):
        raise TemplateMismatch(
            "exponent sum does not satisfy the block/band writhe identity"
        )
    is_knot = traced.word.is_knot_closure()
    alexander = alexander_of_closure(traced.word) if is_knot else None
    return PipelineResult(
        config=cfg,
        params_used=params,
        gamma_retries=gamma_retries,
        double_points=dps,
        genericity=genericity,
        triples=triples,
        loop=loop,
        validation=report,
        traced=traced,
        band=band,
        structure=structure,
        rho_retries=rho_retries,
        alexander=alexander,
        is_knot=is_knot,
    )


def _planned_rho(model, dps, loop_cfg) -> float:
    if loop_cfg.rho is not None:
        return loop_cfg.rho
    domain = model.r0**model.branch_order
    if dps:
        return min(
            loop_cfg.rho_frac_nearest * min(abs(dp.image.z1) for dp in dps),
            loop_cfg.rho_frac_domain * domain,
        )
    return loop_cfg.rho_frac_domain * domain


# -- serialization ----------------------------------------------------------


def _cpair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def build_report(result: PipelineResult) -> dict:
    """Plain-data report; json.dumps(build_report(r), sort_keys=True) is stable."""
    cfg = result.config
    word = result.traced.word
    band = result.band
    report = {
        "config": {
            "n": cfg.model.branch_order,
            "r0": cfg.model.r0,
            "h": format_height_terms(cfg.model.terms),
            "lambda": format_complex(cfg.params.lam),
            "mu": format_complex(cfg.params.mu),
            "gamma": format_complex(cfg.params.gamma),
        },
        "perturbation_used": {
            "lambda": format_complex(result.params_used.lam),
            "mu": format_complex(result.params_used.mu),
            "gamma": format_complex(result.params_used.gamma),
            "gamma_retries": result.gamma_retries,
        },
        "double_points": [
            {
                "pairing": dp.pairing.k,
                "w1": _cpair(dp.w1),
                "w2": _cpair(dp.w2),
                "base_point": _cpair(dp.image.z1),
                "height": _cpair(dp.image.z2),
                "sign": dp.sign,
                "residual": dp.residual,
                "transversality_margin": dp.transversality_margin,
            }
            for dp in result.double_points
        ],
        "genericity": {
            "passed": result.genericity.passed,
            "triples_checked": result.genericity.triples_checked,
        },
        "loop": {
            "rho": result.loop.rho,
            "start_angle": result.loop.base_angle,
            "rho_retries": result.rho_retries,
            "segments": len(result.loop.segments),
            "detours": [
                {
                    "double_point": det.dp_index,
                    "center": _cpair(det.center),
                    "radius": det.radius,
                    "tube_half_width": det.tube_half_width,
                }
                for det in result.loop.detours
            ],
        },
        "braid": {
            "strands": result.traced.strand_count,
            "word": word.to_text(),
            "letters": [[k, s] for k, s in word.letters],
            "exponent_sum": result.exponent_sum,
            "closure_components": word.closure_components(),
            "is_knot": result.is_knot,
        },
        "band_form": {
            "regime_sign": band.sign,
            "even_block": list(band.even_block),
            "odd_block": list(band.odd_block),
            "bands": [
                {
                    "conjugator": conj.to_text(),
                    "position": k,
                    "eps": eps,
                }
                for conj, k, eps in band.bands
            ],
            "euler_characteristic": result.euler_characteristic,
            "genus": str(result.genus),
            "exponent_sum_identity": result.exponent_sum == result.predicted_exponent_sum,
        },
    }
    if result.alexander is not None:
        poly = result.alexander
        report["alexander"] = {
            "coefficients": {str(e): c for e, c in sorted(poly.coeffs.items())},
            "text": str(poly),
            "symmetric": poly.is_symmetric(),
        }
    return report


def serialize_report(result: PipelineResult) -> str:
    return json.dumps(build_report(result), sort_keys=True, indent=2) + "\n"


def write_double_points_csv(dps, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(
        [
            "index", "pairing",
            "w1_re", "w1_im", "w2_re", "w2_im",
            "base_re", "base_im", "height_re", "height_im",
            "sign", "residual", "transversality_margin",
        ]
    )
    for i, dp in enumerate(dps):
        writer.writerow(
            [
                i, dp.pairing.k,
                repr(dp.w1.real), repr(dp.w1.imag),
                repr(dp.w2.real), repr(dp.w2.imag),
                repr(complex(dp.image.z1).real), repr(complex(dp.image.z1).imag),
                repr(complex(dp.image.z2).real), repr(complex(dp.image.z2).imag),
                dp.sign, repr(dp.residual), repr(dp.transversality_margin),
            ]
        )


def write_artifacts(result: PipelineResult, outdir, *, figures: bool = True) -> list[str]:
    """Write report.json, double_points.csv, braid_word.txt and figures.

    Returns the file names written, in order.
    """
    import os

    os.makedirs(outdir, exist_ok=True)
    written = []

    path = os.path.join(outdir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_report(result))
    written.append("report.json")

    path = os.path.join(outdir, "double_points.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_double_points_csv(result.double_points, fh)
    written.append("double_points.csv")

    path = os.path.join(outdir, "braid_word.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(result.traced.word.to_text() + "\n")
    written.append("braid_word.txt")

    if figures:
        from . import plotting

        fig = plotting.plot_disk(
            result.config.model, result.params_used,
            dps=list(result.double_points), loop=result.loop,
            solver=result.config.solver,
        )
        plotting.save_svg(fig, os.path.join(outdir, "disk.svg"))
        written.append("disk.svg")
        fig = plotting.plot_braid(result.traced)
        plotting.save_svg(fig, os.path.join(outdir, "braid.svg"))
        written.append("braid.svg")
    return written
