"""Building and validating the loop that the braid is read along.

The loop lives in the base plane.  Its skeleton is a counterclockwise
circle of radius rho around the branch point image; for every double point
a detour leaves the circle through a thin straight tube, runs once
counterclockwise around a small circle enclosing the projected double
point, and returns along the other side of the tube.  Traversing the whole
thing with the enclosed region on the left gives winding number one around
the origin and around every projected double point, and zero around the
triple coincidences the braid letters cannot survive.

The detour mouth (where the tube meets the small circle) must stay clear of
the two points where the crossing locus enters that circle.  A tube aimed
straight at the double point cannot guarantee this, since the locus often
runs radially through it; instead the arrival point on the circle is chosen
between the locus hits, preferring the side facing the base circle, and the
junction follows it.  Everything is retried over a deterministic schedule
of angular offsets until the validator is satisfied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .doublepoints import DoublePoint, SolverConfig, arg2pi
from .errors import ConstructionFailure, TangencyDetected, ValidationError
from .locus import (
    TripleCoincidence,
    coincidence_value,
    find_triple_coincidences,
    path_locus_intersections,
    sample_locus,
)
from .surface import BranchedDiskModel, PerturbationParams, lift_fiber, nearest_root

TWO_PI = 2 * math.pi


def _ccw_delta(a: float, b: float) -> float:
    """Counterclockwise angular distance from a to b, in [0, 2 pi)."""
    return (b - a) % TWO_PI


def _circ_dist(a: float, b: float) -> float:
    """Shortest circular distance between two angles."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _in_ccw_interval(x: float, start: float, width: float) -> bool:
    return _ccw_delta(start, x) <= width


@dataclass(frozen=True)
class ArcSegment:
    """Circular arc, positively (counterclockwise) swept when sweep > 0."""

    center: complex
    radius: float
    angle_start: float
    sweep: float
    kind: str                 # "base" or "detour"
    detour: int | None = None

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def point(self, t: float) -> complex:
        ang = self.angle_start + t * self.sweep
        return self.center + self.radius * complex(math.cos(ang), math.sin(ang))

    def unit_tangent(self, t: float) -> complex:
        ang = self.angle_start + t * self.sweep
        return 1j * complex(math.cos(ang), math.sin(ang)) * (1 if self.sweep >= 0 else -1)


@dataclass(frozen=True)
class LineSegment:
    """Straight tube side; kind is "tube_out" or "tube_in"."""

    start: complex
    end: complex
    kind: str
    detour: int

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, t: float) -> complex:
        return self.start + t * (self.end - self.start)

    def unit_tangent(self, t: float) -> complex:
        return (self.end - self.start) / self.length


Segment = ArcSegment | LineSegment


@dataclass(frozen=True)
class DetourSpec:
    """Geometry of one detour: target circle plus its access tube."""

    index: int
    dp_index: int
    center: complex
    radius: float
    tube_half_width: float
    junction_angle: float   # centerline foot on the base circle
    mouth_angle: float      # centerline arrival angle on the detour circle


@dataclass(frozen=True)
class LoopConfig:
    """Geometry defaults and retry budget of the loop builder."""

    rho: float | None = None          # base circle radius; None = derived
    rho_frac_nearest: float = 0.4     # fraction of min |p_i| when points exist
    rho_frac_domain: float = 0.3      # fraction of r0^N otherwise
    max_detour_radius: float | None = None  # default 0.1 * r0^N
    angle_step: float = 0.02          # junction/arrival retry step (radians)
    max_retries: int = 75
    clearance: float = 0.02           # base angular safety margin (radians)
    hit_samples: int = 512            # dense samples per segment when validating
    tol_grad: float = 1e-6
    tol_theta: float = 1e-10


@dataclass(frozen=True)
class BaseLoop:
    """A closed validated loop, stored as traversal-ordered segments."""

    rho: float
    base_angle: float                  # angle of the start point on the base circle
    detours: tuple[DetourSpec, ...]    # indexed by decreasing arg of the center
    segments: tuple[Segment, ...]
    double_points: tuple[DoublePoint, ...]

    @property
    def start_point(self) -> complex:
        return self.rho * complex(math.cos(self.base_angle), math.sin(self.base_angle))


class LoopPath:
    """Arc-length parametrization of a loop over theta in [0, 2 pi)."""

    def __init__(self, loop: BaseLoop):
        self.loop = loop
        self.lengths = [seg.length for seg in loop.segments]
        self.total_length = sum(self.lengths)
        cum = [0.0]
        for ln in self.lengths:
            cum.append(cum[-1] + ln)
        self.cumulative = cum
        self.corner_thetas = tuple(TWO_PI * s / self.total_length for s in cum[1:-1])

    def segment_at(self, theta: float) -> tuple[int, float]:
        """Segment index and local parameter t in [0, 1] at loop parameter theta."""
        s = (theta % TWO_PI) / TWO_PI * self.total_length
        lo, hi = 0, len(self.lengths)
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if self.cumulative[mid] <= s:
                lo = mid
            else:
                hi = mid
        t = (s - self.cumulative[lo]) / self.lengths[lo]
        return lo, min(max(t, 0.0), 1.0)

    def point(self, theta: float) -> complex:
        i, t = self.segment_at(theta)
        return self.loop.segments[i].point(t)

    def derivative(self, theta: float) -> complex:
        """dz/dtheta; piecewise smooth with corners at segment joints."""
        i, t = self.segment_at(theta)
        return self.loop.segments[i].unit_tangent(t) * self.total_length / TWO_PI

    def __call__(self, theta: float) -> complex:
        return self.point(theta)


def parametrize_loop(loop: BaseLoop) -> LoopPath:
    """Constant-speed parametrization; corner parameters are on the path object."""
    return LoopPath(loop)


# -- crossing inventory helpers --------------------------------------------


@dataclass(frozen=True)
class CircleHit:
    """A locus crossing on a circle, recorded by circle angle."""

    angle: float
    sheet_low: int
    sheet_high: int
    slope: float


def circle_locus_hits(
    model: BranchedDiskModel,
    params: PerturbationParams,
    center: complex,
    radius: float,
    *,
    samples: int = 720,
    tol_theta: float = 1e-10,
    tol_grad: float = 1e-6,
) -> list[CircleHit]:
    """All sheet-pair coincidences on a circle, as certified angles."""
    n = model.branch_order

    def path(phi: float) -> complex:
        return center + radius * complex(math.cos(phi), math.sin(phi))

    roots = lift_fiber(path(0.0), n)
    hits: list[CircleHit] = []
    for j in range(n):
        for jp in range(j + 1, n):
            found = path_locus_intersections(
                model,
                params,
                path,
                (0.0, TWO_PI),
                roots[j],
                jp - j,
                samples=samples,
                tol_theta=tol_theta,
                tol_grad=tol_grad,
            )
            hits.extend(
                CircleHit(angle=h.theta % TWO_PI, sheet_low=j, sheet_high=jp, slope=h.slope)
                for h in found
            )
    hits.sort(key=lambda h: h.angle)
    return hits


def _cluster_angles(angles: list[float], gap: float) -> list[tuple[float, float]]:
    """Group circle angles into clusters; returns (start, width) intervals.

    Angles closer than `gap` (circularly) end up in one cluster.
    """
    if not angles:
        return []
    arr = sorted(a % TWO_PI for a in angles)
    # Find the largest circular gap and cut there.
    gaps = [(_ccw_delta(arr[i], arr[(i + 1) % len(arr)]), i) for i in range(len(arr))]
    cut = max(gaps)[1]
    ordered = arr[cut + 1 :] + arr[: cut + 1]
    clusters: list[list[float]] = [[ordered[0]]]
    for a in ordered[1:]:
        if _ccw_delta(clusters[-1][-1], a) <= gap:
            clusters[-1].append(a)
        else:
            clusters.append([a])
    return [(c[0], _ccw_delta(c[0], c[-1])) for c in clusters]


# -- builder ----------------------------------------------------------------


def _point_segment_distance(q: complex, a: complex, b: complex) -> float:
    d = b - a
    ln = abs(d)
    if ln == 0:
        return abs(q - a)
    t = ((q - a).real * d.real + (q - a).imag * d.imag) / (ln * ln)
    t = min(max(t, 0.0), 1.0)
    return abs(q - (a + t * d))


def _segment_segment_distance(a1: complex, b1: complex, a2: complex, b2: complex) -> float:
    def orient(p, q, r):
        return (q - p).real * (r - p).imag - (q - p).imag * (r - p).real

    if (
        orient(a1, b1, a2) * orient(a1, b1, b2) < 0
        and orient(a2, b2, a1) * orient(a2, b2, b1) < 0
    ):
        return 0.0
    return min(
        _point_segment_distance(a2, a1, b1),
        _point_segment_distance(b2, a1, b1),
        _point_segment_distance(a1, a2, b2),
        _point_segment_distance(b1, a2, b2),
    )


@dataclass
class _TubeGeometry:
    """Resolved endpoints of one detour's tube and both mouth intervals."""

    spec: DetourSpec
    p_out: complex   # junction of the outbound side on the base circle
    p_in: complex    # junction of the inbound side
    m_out: complex   # mouth point of the outbound side on the detour circle
    m_in: complex    # mouth point of the inbound side
    base_interval: tuple[float, float]    # (start angle, width) removed from C_rho
    mouth_interval: tuple[float, float]   # (start angle, width) skipped on the circle


def _solve_tube(
    rho: float, spec: DetourSpec
) -> _TubeGeometry | None:
    """Intersect the two offset tube sides with both circles.

    Returns None when the slanted sides miss a circle or the tube would be
    degenerate; callers then move on to the next candidate geometry.
    """
    p, r, tau = spec.center, spec.radius, spec.tube_half_width
    z_a = rho * complex(math.cos(spec.junction_angle), math.sin(spec.junction_angle))
    z_m = p + r * complex(math.cos(spec.mouth_angle), math.sin(spec.mouth_angle))
    chord = z_m - z_a
    if abs(chord) < 4 * tau:
        return None
    d = chord / abs(chord)
    ends: dict[int, tuple[complex, complex]] = {}
    for side in (1, -1):
        a_off = z_a + side * tau * 1j * d
        # Exit crossing with the base circle (largest root of the quadratic).
        b0 = (np.conj(d) * a_off).real
        c0 = abs(a_off) ** 2 - rho * rho
        disc0 = b0 * b0 - c0
        if disc0 <= 0:
            return None
        t_start = -b0 + math.sqrt(disc0)
        # Near crossing with the detour circle (smallest root).
        rel = a_off - p
        b1 = (np.conj(d) * rel).real
        c1 = abs(rel) ** 2 - r * r
        disc1 = b1 * b1 - c1
        if disc1 <= 0:
            return None
        t_end = -b1 - math.sqrt(disc1)
        if t_end <= t_start + 2 * tau:
            return None
        ends[side] = (a_off + t_start * d, a_off + t_end * d)
    ang_plus = arg2pi(ends[1][0])
    ang_minus = arg2pi(ends[-1][0])
    if _ccw_delta(ang_plus, ang_minus) < math.pi:
        start_side, end_side = 1, -1
    else:
        start_side, end_side = -1, 1
    p_out, m_out = ends[start_side]
    p_in, m_in = ends[end_side]
    base_start = arg2pi(p_out)
    base_width = _ccw_delta(base_start, arg2pi(p_in))
    mouth_start = arg2pi(m_in - p)
    mouth_width = _ccw_delta(mouth_start, arg2pi(m_out - p))
    if base_width >= math.pi or mouth_width >= math.pi:
        return None
    return _TubeGeometry(
        spec=spec,
        p_out=p_out,
        p_in=p_in,
        m_out=m_out,
        m_in=m_in,
        base_interval=(base_start, base_width),
        mouth_interval=(mouth_start, mouth_width),
    )


def _forbidden_points(
    dps: list[DoublePoint],
    triples: list[TripleCoincidence],
    singular: list[complex],
) -> list[complex]:
    pts = [dp.image.z1 for dp in dps]
    pts.extend(t.image_z for t in triples)
    pts.extend(singular)
    return pts


def _tube_clear_of_points(
    geom: _TubeGeometry, points: list[complex], margin: float, skip: complex | None
) -> bool:
    tau = geom.spec.tube_half_width
    for q in points:
        if skip is not None and abs(q - skip) < 1e-15:
            continue
        d = min(
            _point_segment_distance(q, geom.p_out, geom.m_out),
            _point_segment_distance(q, geom.p_in, geom.m_in),
        )
        if d <= 2 * tau + margin:
            return False
    return True


def _tubes_disjoint(g1: _TubeGeometry, g2: _TubeGeometry, margin: float) -> bool:
    pairs = [
        (g1.p_out, g1.m_out),
        (g1.p_in, g1.m_in),
    ]
    others = [
        (g2.p_out, g2.m_out),
        (g2.p_in, g2.m_in),
    ]
    need = g1.spec.tube_half_width + g2.spec.tube_half_width + margin
    for a, b in pairs:
        for c, e in others:
            if _segment_segment_distance(a, b, c, e) < need:
                return False
        # Keep each side clear of the other detour disk as well.
        if _point_segment_distance(g2.spec.center, a, b) < g2.spec.radius + need:
            return False
    for c, e in others:
        if _point_segment_distance(g1.spec.center, c, e) < g1.spec.radius + need:
            return False
    return True


def build_loop(
    model: BranchedDiskModel,
    params: PerturbationParams,
    dps: list[DoublePoint],
    cfg: LoopConfig | None = None,
    solver_cfg: SolverConfig | None = None,
    *,
    triples: list[TripleCoincidence] | None = None,
    singular: list[complex] | None = None,
) -> BaseLoop:
    """Construct a loop that validate_loop accepts, or raise ConstructionFailure.

    Detours are indexed by decreasing argument of the projected double
    points.  All choices (arrival points, junction angles, start point) are
    deterministic, with a bounded retry schedule of angular offsets.
    """
    if cfg is None:
        cfg = LoopConfig()
    if solver_cfg is None:
        solver_cfg = SolverConfig()
    n = model.branch_order
    domain_radius = model.r0**n

    centers = [dp.image.z1 for dp in dps]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) <= solver_cfg.tol_dedupe:
                raise ValidationError(
                    "projected double points are not separated; "
                    "run the genericity screen first"
                )

    if cfg.rho is not None:
        rho = cfg.rho
    elif centers:
        rho = min(cfg.rho_frac_nearest * min(abs(c) for c in centers),
                  cfg.rho_frac_domain * domain_radius)
    else:
        rho = cfg.rho_frac_domain * domain_radius
    if centers and rho >= 0.5 * min(abs(c) for c in centers):
        raise ConstructionFailure(
            f"base radius {rho:.3g} is not below half the nearest projected "
            "double point; pick a smaller rho"
        )

    if triples is None:
        triples = find_triple_coincidences(model, params, solver_cfg)
    if singular is None:
        singular = []
        for k in range(1, n // 2 + 1):
            singular.extend(
                sample_locus(model, params, k, resolution=64, cfg=solver_cfg).singular_candidates
            )
    forbidden = _forbidden_points(dps, triples, singular)

    try:
        base_hits = circle_locus_hits(
            model, params, 0.0, rho,
            samples=max(cfg.hit_samples, 720),
            tol_theta=cfg.tol_theta, tol_grad=cfg.tol_grad,
        )
    except TangencyDetected as exc:
        raise ConstructionFailure(f"base circle tangent to the crossing locus: {exc}")
    base_hit_angles = [h.angle for h in base_hits]
    hit_clusters = _cluster_angles(base_hit_angles, gap=0.15)

    order = sorted(range(len(dps)), key=lambda i: -arg2pi(centers[i]))
    geoms: list[_TubeGeometry] = []
    for det_index, dp_index in enumerate(order):
        p = centers[dp_index]
        other_features = [q for q in forbidden if abs(q - p) > 1e-15]
        gap_features = min((abs(q - p) for q in other_features), default=math.inf)
        cap = cfg.max_detour_radius if cfg.max_detour_radius is not None else 0.1 * domain_radius
        r_i = min(0.25 * gap_features, 0.25 * (abs(p) - rho), 0.2 * abs(p), cap)
        if r_i <= 0:
            raise ConstructionFailure(f"no room for a detour circle around {p:.4g}")
        placed = None
        for shrink in range(4):
            radius = r_i * 0.5**shrink
            tau = min(radius / 4, 0.4 * rho)
            try:
                ring_hits = circle_locus_hits(
                    model, params, p, radius,
                    samples=cfg.hit_samples,
                    tol_theta=cfg.tol_theta, tol_grad=cfg.tol_grad,
                )
            except TangencyDetected:
                continue
            hit_angles = sorted(h.angle for h in ring_hits)
            if hit_angles:
                mids = [
                    (hit_angles[i] + 0.5 * _ccw_delta(hit_angles[i], hit_angles[(i + 1) % len(hit_angles)]))
                    % TWO_PI
                    for i in range(len(hit_angles))
                ]
            else:
                mids = [arg2pi(-p)]
            # Prefer arrivals facing the base circle (shorter, non-wrapping tube).
            toward = arg2pi(-p)
            mids.sort(key=lambda a: _circ_dist(a, toward))
            mouth_half = math.asin(min(tau / radius, 1.0))
            placed = _try_place_detour(
                model, params, rho, p, radius, tau, mids, hit_angles, mouth_half,
                det_index, dp_index, cfg, geoms, forbidden, hit_clusters,
            )
            if placed is not None:
                break
        if placed is None:
            raise ConstructionFailure(
                f"could not place a clean detour around {p:.4g} "
                f"(radius {r_i:.3g}, {len(geoms)} already placed)"
            )
        geoms.append(placed)

    base_angle = _choose_start_angle(geoms, base_hit_angles, cfg)
    segments = _assemble(rho, base_angle, geoms)
    return BaseLoop(
        rho=rho,
        base_angle=base_angle,
        detours=tuple(g.spec for g in geoms),
        segments=segments,
        double_points=tuple(dps),
    )


def _try_place_detour(
    model, params, rho, p, radius, tau, mouth_candidates, hit_angles, mouth_half,
    det_index, dp_index, cfg: LoopConfig, geoms, forbidden, hit_clusters,
) -> _TubeGeometry | None:
    clear_needed = mouth_half + 0.3 * mouth_half + cfg.clearance
    offsets = [0.0]
    for j in range(1, cfg.max_retries + 1):
        offsets.extend((j * cfg.angle_step, -j * cfg.angle_step))
    # The junction is free to slide away from "right under the mouth"; a
    # slanted tube is what clears a locus branch that runs radially through
    # the double point.
    junction_offsets = [0.0]
    for j in range(1, 13):
        junction_offsets.extend((0.05 * j, -0.05 * j))
    for off in offsets:
        for cand in mouth_candidates:
            psi = (cand + off) % TWO_PI
            if any(_circ_dist(psi, h) < clear_needed for h in hit_angles):
                continue
            under_mouth = arg2pi(p + radius * complex(math.cos(psi), math.sin(psi)))
            for joff in junction_offsets:
                spec = DetourSpec(
                    index=det_index,
                    dp_index=dp_index,
                    center=p,
                    radius=radius,
                    tube_half_width=tau,
                    junction_angle=(under_mouth + joff) % TWO_PI,
                    mouth_angle=psi,
                )
                geom = _solve_tube(rho, spec)
                if geom is None:
                    continue
                if not _detour_constraints_ok(
                    geom, hit_angles, hit_clusters, cfg, geoms, forbidden, p
                ):
                    continue
                return geom
    return None


def _detour_constraints_ok(
    geom: _TubeGeometry, hit_angles, hit_clusters, cfg: LoopConfig, geoms, forbidden, p
) -> bool:
    mouth_start, mouth_width = geom.mouth_interval
    pad = 0.25 * mouth_width + cfg.clearance
    for h in hit_angles:
        if _in_ccw_interval(h, (mouth_start - pad) % TWO_PI, mouth_width + 2 * pad):
            return False
    base_start, base_width = geom.base_interval
    pad_b = 0.25 * base_width + cfg.clearance
    for start, width in hit_clusters:
        lo = (start - pad_b) % TWO_PI
        if _in_ccw_interval(base_start, lo, width + 2 * pad_b) or _in_ccw_interval(
            (base_start + base_width) % TWO_PI, lo, width + 2 * pad_b
        ):
            return False
        # Also reject a mouth that swallows the whole cluster.
        if _in_ccw_interval(start, base_start, base_width):
            return False
    for other in geoms:
        o_start, o_width = other.base_interval
        sep = cfg.clearance
        if _in_ccw_interval(base_start, (o_start - sep) % TWO_PI, o_width + 2 * sep):
            return False
        if _in_ccw_interval(o_start, (base_start - sep) % TWO_PI, base_width + 2 * sep):
            return False
        if not _tubes_disjoint(geom, other, margin=0.5 * geom.spec.tube_half_width):
            return False
    if not _tube_clear_of_points(geom, forbidden, margin=geom.spec.tube_half_width, skip=p):
        return False
    return True


def _choose_start_angle(geoms: list[_TubeGeometry], hit_angles: list[float], cfg) -> float:
    blocked: list[tuple[float, float]] = [g.base_interval for g in geoms]
    blocked.extend((h - cfg.clearance, 2 * cfg.clearance) for h in hit_angles)

    def clearance(a: float) -> float:
        best = math.inf
        for start, width in blocked:
            if _in_ccw_interval(a, start % TWO_PI, width):
                return -1.0
            best = min(
                best,
                _circ_dist(a, start % TWO_PI),
                _circ_dist(a, (start + width) % TWO_PI),
            )
        return best

    candidates = [i * TWO_PI / 720 for i in range(720)]
    best = max(candidates, key=clearance)
    if clearance(best) <= 0:
        raise ConstructionFailure("no free start point on the base circle")
    return best


def _assemble(rho: float, base_angle: float, geoms: list[_TubeGeometry]) -> tuple[Segment, ...]:
    """Stitch base arcs, tubes and detour arcs in counterclockwise order."""
    ordered = sorted(geoms, key=lambda g: _ccw_delta(base_angle, g.base_interval[0]))
    segments: list[Segment] = []
    current = base_angle
    for g in ordered:
        start, width = g.base_interval
        arc = _ccw_delta(current, start)
        segments.append(
            ArcSegment(center=0.0, radius=rho, angle_start=current, sweep=arc, kind="base")
        )
        det = g.spec.index
        segments.append(LineSegment(g.p_out, g.m_out, kind="tube_out", detour=det))
        a0 = arg2pi(g.m_out - g.spec.center)
        a1 = arg2pi(g.m_in - g.spec.center)
        sweep = _ccw_delta(a0, a1)
        segments.append(
            ArcSegment(
                center=g.spec.center,
                radius=g.spec.radius,
                angle_start=a0,
                sweep=sweep,
                kind="detour",
                detour=det,
            )
        )
        segments.append(LineSegment(g.m_in, g.p_in, kind="tube_in", detour=det))
        current = (start + width) % TWO_PI
    segments.append(
        ArcSegment(
            center=0.0,
            radius=rho,
            angle_start=current,
            sweep=_ccw_delta(current, base_angle) or TWO_PI,
            kind="base",
        )
    )
    return tuple(segments)


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class SegmentHit:
    """One certified locus crossing somewhere on the loop."""

    segment: int
    theta_local: float    # parameter within the segment, in [0, 1]
    sheet_low: int
    sheet_high: int
    slope: float


@dataclass(frozen=True)
class LoopValidationReport:
    """Everything the tracer needs to trust the loop."""

    transversal_hits: tuple[SegmentHit, ...]
    region_checks: dict
    tube_checks: tuple[dict, ...]
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _winding_number(points: np.ndarray, q: complex) -> int:
    rel = points - q
    ang = np.unwrap(np.angle(rel))
    return round((ang[-1] - ang[0]) / TWO_PI)


def validate_loop(
    model: BranchedDiskModel,
    params: PerturbationParams,
    loop: BaseLoop,
    cfg: LoopConfig | None = None,
    solver_cfg: SolverConfig | None = None,
    *,
    triples: list[TripleCoincidence] | None = None,
    singular: list[complex] | None = None,
) -> LoopValidationReport:
    """Certify the loop: transversal locus crossings, winding numbers, and
    clean detours (two circle hits outside the mouth, locus-free junctions,
    no special points swallowed by a tube)."""
    if cfg is None:
        cfg = LoopConfig()
    if solver_cfg is None:
        solver_cfg = SolverConfig()
    n = model.branch_order
    failures: list[str] = []
    if triples is None:
        triples = find_triple_coincidences(model, params, solver_cfg)
    if singular is None:
        singular = []
        for k in range(1, n // 2 + 1):
            singular.extend(
                sample_locus(model, params, k, resolution=64, cfg=solver_cfg).singular_candidates
            )

    # Continuous strand lifts along the loop, segment by segment.
    start_z = loop.segments[0].point(0.0)
    lifts = lift_fiber(start_z, n)
    on_locus = any(
        abs(float(coincidence_value(model, params, k, w))) < 1e-12
        for k in range(1, n)
        for w in lifts
    )
    if on_locus:
        failures.append("start point sits on the crossing locus")

    hits: list[SegmentHit] = []
    seg_lifts = list(lifts)
    for si, seg in enumerate(loop.segments):
        samples = max(64, int(cfg.hit_samples * seg.length
                              / max(sum(s.length for s in loop.segments), 1e-300)) * 4)
        for j in range(n):
            for jp in range(j + 1, n):
                try:
                    found = path_locus_intersections(
                        model,
                        params,
                        seg.point,
                        (0.0, 1.0),
                        seg_lifts[j],
                        jp - j,
                        samples=samples,
                        tol_theta=cfg.tol_theta,
                        tol_grad=cfg.tol_grad,
                    )
                except TangencyDetected as exc:
                    failures.append(f"segment {si}: {exc}")
                    found = []
                hits.extend(
                    SegmentHit(si, h.theta, j, jp, h.slope) for h in found
                )
        step = max(16, samples)
        w_next = []
        for j in range(n):
            w = seg_lifts[j]
            for i in range(1, step + 1):
                w = nearest_root(seg.point(i / step), n, w)
            w_next.append(w)
        seg_lifts = w_next

    # Winding one around the origin permutes the fiber; the lifts must land
    # back on the start fiber in some order for the braid closure to make
    # sense at all.
    if not _is_fiber_permutation(lifts, seg_lifts):
        failures.append("strand lifts do not return to the start fiber")

    dense = _dense_polyline(loop)
    region_checks = {
        "winding_origin": _winding_number(dense, 0.0) == 1,
        "closes": abs(loop.segments[-1].point(1.0) - start_z) < 1e-9 * max(1.0, loop.rho),
    }
    if not region_checks["closes"]:
        failures.append("loop does not close")
    if not region_checks["winding_origin"]:
        failures.append("winding number around the origin is not 1")
    for i, dp in enumerate(loop.double_points):
        if _winding_number(dense, dp.image.z1) != 1:
            failures.append(f"winding number around projected double point {i} is not 1")
            region_checks[f"winding_dp_{i}"] = False
        else:
            region_checks[f"winding_dp_{i}"] = True
    for t in triples:
        if _winding_number(dense, t.image_z) != 0:
            failures.append(
                f"loop encircles a triple coincidence at {t.image_z:.4g}"
            )

    tube_checks = []
    for det in loop.detours:
        check = {"two_hits": True, "hits_outside_mouth": True,
                 "junction_clear": True, "tube_clear": True}
        arc_idx = _detour_arc_index(loop, det.index)
        arc: ArcSegment = loop.segments[arc_idx]  # type: ignore[assignment]
        ring = [h for h in hits if h.segment == arc_idx]
        if len(ring) != 2:
            check["two_hits"] = False
            failures.append(
                f"detour {det.index}: {len(ring)} locus hits on the circle arc, want 2"
            )
        # The traversed arc already excludes the mouth, so hits on it are
        # outside the mouth by construction; verify the full circle has no
        # extra crossing hiding inside the mouth.
        try:
            full = circle_locus_hits(
                model, params, det.center, det.radius,
                samples=cfg.hit_samples, tol_theta=cfg.tol_theta, tol_grad=cfg.tol_grad,
            )
            if len(full) != 2:
                check["two_hits"] = False
                failures.append(
                    f"detour {det.index}: full circle meets the locus "
                    f"{len(full)} times, want 2"
                )
            mouth_start = (arc.angle_start + arc.sweep) % TWO_PI
            mouth_width = TWO_PI - arc.sweep
            for h in full:
                if _in_ccw_interval(h.angle, mouth_start, mouth_width):
                    check["hits_outside_mouth"] = False
                    failures.append(
                        f"detour {det.index}: locus crossing inside the tube mouth"
                    )
        except TangencyDetected as exc:
            check["two_hits"] = False
            failures.append(f"detour {det.index}: {exc}")
        tube_checks.append(check)

    # Junction arcs removed from the base circle must be locus-free, and no
    # special point may sit inside a tube.  The removed arcs are never
    # traversed, so this needs hits on the full base circle.
    try:
        full_base = circle_locus_hits(
            model, params, 0.0, loop.rho,
            samples=max(cfg.hit_samples, 720),
            tol_theta=cfg.tol_theta, tol_grad=cfg.tol_grad,
        )
    except TangencyDetected as exc:
        full_base = []
        failures.append(f"base circle: {exc}")
    special = _forbidden_points(list(loop.double_points), triples, singular)
    for det in loop.detours:
        g = _tube_geom_from_loop(loop, det)
        check = tube_checks[det.index]
        start, width = g.base_interval
        for h in full_base:
            if _in_ccw_interval(h.angle, start, width):
                check["junction_clear"] = False
                failures.append(
                    f"detour {det.index}: locus crossing inside the base junction arc"
                )
        if not _tube_clear_of_points(g, special, margin=0.0, skip=det.center):
            check["tube_clear"] = False
            failures.append(f"detour {det.index}: special point inside the tube")

    return LoopValidationReport(
        transversal_hits=tuple(hits),
        region_checks=region_checks,
        tube_checks=tuple(tube_checks),
        failures=tuple(failures),
    )


def _is_fiber_permutation(start: list[complex], end: list[complex]) -> bool:
    used = set()
    for w in end:
        best = min(range(len(start)), key=lambda i: abs(start[i] - w))
        if best in used or abs(start[best] - w) > 1e-6 * max(abs(w), 1.0):
            return False
        used.add(best)
    return True


def _detour_arc_index(loop: BaseLoop, det_index: int) -> int:
    for i, seg in enumerate(loop.segments):
        if isinstance(seg, ArcSegment) and seg.kind == "detour" and seg.detour == det_index:
            return i
    raise ValidationError(f"loop has no detour arc with index {det_index}")


def _tube_geom_from_loop(loop: BaseLoop, det: DetourSpec) -> _TubeGeometry:
    out_seg = next(
        s for s in loop.segments
        if isinstance(s, LineSegment) and s.kind == "tube_out" and s.detour == det.index
    )
    in_seg = next(
        s for s in loop.segments
        if isinstance(s, LineSegment) and s.kind == "tube_in" and s.detour == det.index
    )
    base_start = arg2pi(out_seg.start)
    base_width = _ccw_delta(base_start, arg2pi(in_seg.end))
    mouth_start = arg2pi(in_seg.start - det.center)
    mouth_width = _ccw_delta(mouth_start, arg2pi(out_seg.end - det.center))
    return _TubeGeometry(
        spec=det,
        p_out=out_seg.start,
        p_in=in_seg.end,
        m_out=out_seg.end,
        m_in=in_seg.start,
        base_interval=(base_start, base_width),
        mouth_interval=(mouth_start, mouth_width),
    )


def _dense_polyline(loop: BaseLoop, per_segment: int = 256) -> np.ndarray:
    pts = []
    for seg in loop.segments:
        samples = max(32, int(per_segment * min(1.0, seg.length / max(loop.rho, 1e-300))))
        for i in range(samples):
            pts.append(seg.point(i / samples))
    pts.append(loop.segments[0].point(0.0))
    return np.asarray(pts, dtype=complex)
