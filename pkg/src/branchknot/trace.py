"""Tracing the strand braid along a validated loop.

Over every loop point the fiber of the degree-N base covering carries N
strands; ordering them by the real part of the height coordinate turns the
traversal into a braid word.  A letter is emitted whenever two adjacent
strands exchange order; its sign compares the depth (imaginary part) order
with which strand is climbing, so a positive letter means the strand coming
from the left passes in front.

The second half of the module reads the structure off the finished word:
base-circle letters must form one odd and one even cluster with a common
regime sign, and every detour must contribute a conjugated double letter
(tube out, two equal crossings on the small circle, tube back in reverse).
Anything else raises BlockStructureFailure, which callers treat as a hint
to shrink the base circle and retrace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .braids import BandRepresentation, BraidWord
from .errors import (
    BlockStructureFailure,
    DoublePointOnLoop,
    LiftAmbiguity,
    StrandMismatch,
    TangencyDetected,
)
from .loop import BaseLoop, LoopPath
from .surface import (
    BranchedDiskModel,
    PerturbationParams,
    eval_height_coord,
    height_coord_wirtinger,
    lift_fiber,
    nearest_root,
)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class TraceConfig:
    """Step counts and separation tolerances for the braid tracer."""

    min_steps: int = 4096
    min_steps_per_segment: int = 64
    tol_gap: float = 1e-9          # heights closer than this count as touching
    guard_factor: float = 10.0     # suspicion threshold, in units of tol_gap
    max_lift_step_frac: float = 0.1
    tol_theta: float = 1e-10       # crossing parameters certified to this width
    max_depth: int = 60

    @property
    def guard_band(self) -> float:
        return self.guard_factor * self.tol_gap

    def halved(self) -> "TraceConfig":
        """Same trace at half the tolerances and twice the steps; a correct
        word must come out unchanged."""
        return replace(
            self,
            min_steps=2 * self.min_steps,
            tol_gap=0.5 * self.tol_gap,
            tol_theta=0.5 * self.tol_theta,
        )


@dataclass(frozen=True)
class CrossingEvent:
    """One certified strand exchange along the loop."""

    theta: float
    k: int                # 1-based position of the exchange
    sign: int
    strand_low: int       # strand label at position k just before
    strand_high: int      # strand label at position k+1 just before
    provenance: str       # "base", "tube_out", "detour" or "tube_in"
    detour: int | None
    segment: int
    depth_gap: float      # depth separation at the crossing
    slope_gap: float      # relative height speed at the crossing

    @property
    def letter(self) -> tuple[int, int]:
        return (self.k, self.sign)


@dataclass(frozen=True)
class TracedBraid:
    strand_count: int
    word: BraidWord
    events: tuple[CrossingEvent, ...]
    start_order: tuple[int, ...]      # strand labels by position at theta = 0
    root_monodromy: tuple[int, ...]   # start-root index each strand returns to


class _Tracer:
    def __init__(self, model, params, path: LoopPath, cfg: TraceConfig):
        self.model = model
        self.params = params
        self.path = path
        self.cfg = cfg
        self.n = model.branch_order

    # -- fiber bookkeeping --------------------------------------------------

    def _lift(self, theta: float, theta_ref: float, ws_ref: list[complex], depth: int = 0):
        z = self.path.point(theta)
        scale = max(abs(z), 1e-300) ** (1.0 / self.n)
        cap = self.cfg.max_lift_step_frac * scale
        ws = [nearest_root(z, self.n, w) for w in ws_ref]
        moved = max(abs(a - b) for a, b in zip(ws, ws_ref))
        distinct = all(
            abs(ws[i] - ws[j]) > 1e-9 * scale
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )
        if moved <= cap and distinct:
            return ws
        if depth >= 48:
            raise LiftAmbiguity(
                f"fiber tracking lost between theta={theta_ref:.6f} and {theta:.6f}"
            )
        mid = 0.5 * (theta + theta_ref)
        wm = self._lift(mid, theta_ref, ws_ref, depth + 1)
        return self._lift(theta, mid, wm, depth + 1)

    def _heights(self, ws) -> list[float]:
        return [
            complex(eval_height_coord(self.model, self.params, w)).real for w in ws
        ]

    def _order(self, ws) -> tuple[int, ...]:
        hs = self._heights(ws)
        return tuple(sorted(range(self.n), key=lambda j: hs[j]))

    def _min_gap(self, ws) -> float:
        hs = sorted(self._heights(ws))
        return min(b - a for a, b in zip(hs, hs[1:]))

    # -- crossing detection -------------------------------------------------

    def run(self) -> TracedBraid:
        path = self.path
        n = self.n
        thetas = self._grid()
        ws = list(lift_fiber(path.point(0.0), n))
        if self._min_gap(ws) <= self.cfg.guard_band:
            raise StrandMismatch("strand heights are not separated at the start point")
        start_ws = list(ws)
        order0 = self._order(ws)
        events: list[CrossingEvent] = []
        t_prev = 0.0
        for t in thetas[1:]:
            w_new = self._lift(t, t_prev, ws)
            self._resolve(t_prev, ws, t, w_new, events, depth=0)
            ws, t_prev = w_new, t

        monodromy = self._match_roots(start_ws, ws)
        word = BraidWord(n, tuple(e.letter for e in events))
        self._check_monodromy(word, order0, monodromy)
        return TracedBraid(
            strand_count=n,
            word=word,
            events=tuple(events),
            start_order=order0,
            root_monodromy=monodromy,
        )

    def _grid(self) -> list[float]:
        cfg = self.cfg
        thetas = [0.0]
        bounds = [0.0, *self.path.corner_thetas, TWO_PI]
        for a, b in zip(bounds, bounds[1:]):
            frac = (b - a) / TWO_PI
            steps = max(cfg.min_steps_per_segment, math.ceil(cfg.min_steps * frac))
            thetas.extend(a + (b - a) * i / steps for i in range(1, steps + 1))
        return thetas

    def _resolve(self, ta, wa, tb, wb, out: list[CrossingEvent], depth: int):
        oa = self._order(wa)
        ob = self._order(wb)
        if tb - ta <= self.cfg.tol_theta:
            if oa == ob:
                return
            swaps = _disjoint_adjacent_swaps(oa, ob)
            if swaps is None:
                raise StrandMismatch(
                    f"overlapping strand exchanges near theta={ta:.9f}; "
                    "three strands meet at one height"
                )
            t_star = 0.5 * (ta + tb)
            w_star = self._lift(t_star, ta, wa)
            for k in swaps:
                out.append(self._make_event(t_star, w_star, k, oa))
            return
        if depth >= self.cfg.max_depth:
            if oa == ob:
                return
            raise StrandMismatch(
                f"could not isolate strand exchanges near theta={ta:.9f}"
            )
        suspicious = (
            self._min_gap(wa) <= self.cfg.guard_band
            or self._min_gap(wb) <= self.cfg.guard_band
        )
        if oa == ob and depth >= 1 and not suspicious:
            return
        tm = 0.5 * (ta + tb)
        wm = self._lift(tm, ta, wa)
        if oa == ob and self._order(wm) == oa:
            return
        self._resolve(ta, wa, tm, wm, out, depth + 1)
        self._resolve(tm, wm, tb, wb, out, depth + 1)

    def _make_event(self, t_star, w_star, k, order_before) -> CrossingEvent:
        a = order_before[k - 1]
        b = order_before[k]
        za = complex(eval_height_coord(self.model, self.params, w_star[a]))
        zb = complex(eval_height_coord(self.model, self.params, w_star[b]))
        depth_gap = zb.imag - za.imag
        if abs(depth_gap) <= self.cfg.tol_gap:
            raise DoublePointOnLoop(
                f"strands {a} and {b} meet in all four coordinates at "
                f"theta={t_star:.9f}; the loop runs through a double point"
            )
        dz = self.path.derivative(t_star)
        slopes = []
        for j in (a, b):
            w = w_star[j]
            wprime = dz / (self.n * w ** (self.n - 1))
            gw, gwc = height_coord_wirtinger(self.model, self.params, w)
            slopes.append((gw * wprime + gwc * wprime.conjugate()).real)
        slope_gap = slopes[0] - slopes[1]
        scale = max(1.0, abs(slopes[0]), abs(slopes[1]))
        if abs(slope_gap) <= 1e-12 * scale:
            raise TangencyDetected(
                f"strand heights touch tangentially at theta={t_star:.9f}"
            )
        sign = 1 if depth_gap * slope_gap > 0 else -1
        seg_idx, _ = self.path.segment_at(t_star)
        seg = self.path.loop.segments[seg_idx]
        provenance = seg.kind
        detour = seg.detour
        return CrossingEvent(
            theta=t_star,
            k=k,
            sign=sign,
            strand_low=a,
            strand_high=b,
            provenance=provenance,
            detour=detour,
            segment=seg_idx,
            depth_gap=depth_gap,
            slope_gap=slope_gap,
        )

    # -- closure ------------------------------------------------------------

    def _match_roots(self, start_ws, end_ws) -> tuple[int, ...]:
        scale = max(abs(w) for w in start_ws)
        tau = []
        for w in end_ws:
            best = min(range(self.n), key=lambda i: abs(start_ws[i] - w))
            if abs(start_ws[best] - w) > 1e-6 * max(scale, 1e-300):
                raise StrandMismatch("strands do not return to the start fiber")
            tau.append(best)
        if len(set(tau)) != self.n:
            raise StrandMismatch("two strands land on the same start root")
        return tuple(tau)

    def _check_monodromy(self, word, order0, tau):
        pos0 = [0] * self.n
        for i, j in enumerate(order0):
            pos0[j] = i + 1
        perm = word.permutation()
        for j in range(self.n):
            if perm[pos0[j] - 1] != pos0[tau[j]]:
                raise StrandMismatch(
                    "braid word permutation disagrees with the fiber monodromy"
                )


def trace_braid(
    model: BranchedDiskModel,
    params: PerturbationParams,
    path: LoopPath,
    cfg: TraceConfig | None = None,
) -> TracedBraid:
    """Follow all strand heights around the loop and emit the braid word.

    Raises StrandMismatch when crossings cannot be isolated or the word's
    permutation disagrees with the fiber monodromy, DoublePointOnLoop when
    two strands coincide in all four coordinates, and TangencyDetected on a
    non-transversal height meeting.
    """
    if cfg is None:
        cfg = TraceConfig()
    return _Tracer(model, params, path, cfg).run()


def _disjoint_adjacent_swaps(oa, ob) -> list[int] | None:
    """Positions k where (k, k+1) swap, if the orders differ by disjoint
    adjacent transpositions only; None otherwise."""
    n = len(oa)
    pos_b = {j: i for i, j in enumerate(ob)}
    pi = [pos_b[oa[i]] for i in range(n)]
    swaps = []
    i = 0
    while i < n:
        if pi[i] == i:
            i += 1
        elif i + 1 < n and pi[i] == i + 1 and pi[i + 1] == i:
            swaps.append(i + 1)  # 1-based generator index
            i += 2
        else:
            return None
    return swaps


# -- structure extraction ---------------------------------------------------


@dataclass(frozen=True)
class BandPiece:
    """One detour read off the trace: conjugator, core letter and sign."""

    detour: int
    dp_index: int
    position: int
    eps: int
    conjugator: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class BraidStructure:
    """The traced word sorted into blocks and bands."""

    regime_sign: int
    even_letters: tuple[int, ...]
    odd_letters: tuple[int, ...]
    bands: tuple[BandPiece, ...]
    rotation: int     # how many letters the word was rotated for canonical form


def _group_items(traced: TracedBraid, loop: BaseLoop):
    """Cyclic item list: ("letter", (k, sign)) and ("band", BandPiece)."""
    items = []
    events = list(traced.events)
    i = 0
    while i < len(events):
        ev = events[i]
        if ev.provenance == "base":
            items.append(("letter", ev.letter))
            i += 1
            continue
        det = ev.detour
        run = []
        while i < len(events) and events[i].detour == det and events[i].provenance != "base":
            run.append(events[i])
            i += 1
        stages = [e.provenance for e in run]
        outs = [e for e in run if e.provenance == "tube_out"]
        rings = [e for e in run if e.provenance == "detour"]
        ins = [e for e in run if e.provenance == "tube_in"]
        if stages != ["tube_out"] * len(outs) + ["detour"] * len(rings) + ["tube_in"] * len(ins):
            raise BlockStructureFailure(
                f"detour {det}: crossing stages out of order: {stages}"
            )
        if len(rings) != 2 or rings[0].k != rings[1].k or rings[0].sign != rings[1].sign:
            raise BlockStructureFailure(
                f"detour {det}: expected a double crossing on the small circle, "
                f"got {[(e.k, e.sign) for e in rings]}"
            )
        want_ins = [(e.k, -e.sign) for e in reversed(outs)]
        got_ins = [(e.k, e.sign) for e in ins]
        if want_ins != got_ins:
            raise BlockStructureFailure(
                f"detour {det}: tube return word {got_ins} is not the reversed "
                f"inverse of the tube entry word {[(e.k, e.sign) for e in outs]}"
            )
        spec = loop.detours[det]
        piece = BandPiece(
            detour=det,
            dp_index=spec.dp_index,
            position=rings[0].k,
            eps=rings[0].sign,
            conjugator=tuple(e.letter for e in outs),
        )
        items.append(("band", piece))
    return items


def classify_events(traced: TracedBraid, loop: BaseLoop) -> BraidStructure:
    """Check the cluster/band shape of the traced word and dissect it.

    Raises BlockStructureFailure whenever the base letters do not form one
    odd and one even cluster of uniform sign, a detour contributes anything
    but a conjugated double letter, or a band sign disagrees with the
    recorded double point sign.
    """
    n = traced.strand_count
    items = _group_items(traced, loop)
    base_letters = [it[1] for it in items if it[0] == "letter"]
    if sorted(k for k, _ in base_letters) != list(range(1, n)):
        raise BlockStructureFailure(
            "base circle letters are not exactly sigma_1..sigma_(N-1): "
            f"{sorted(k for k, _ in base_letters)}"
        )
    signs = {s for _, s in base_letters}
    if len(signs) != 1:
        raise BlockStructureFailure("base circle letters mix signs")
    regime_sign = signs.pop()

    parities = [k % 2 for k, _ in base_letters]
    runs = 0
    m = len(parities)
    for i in range(m):
        if parities[i] != parities[(i - 1) % m]:
            runs += 1
    if runs > 2:
        raise BlockStructureFailure(
            "base circle letters split into more than two parity clusters"
        )

    for it in items:
        if it[0] != "band":
            continue
        piece: BandPiece = it[1]
        dp = loop.double_points[piece.dp_index]
        if dp.sign is not None and dp.sign != piece.eps:
            raise BlockStructureFailure(
                f"band around double point {piece.dp_index} has sign {piece.eps}, "
                f"but the intersection sign is {dp.sign}"
            )

    rotation, even_letters, odd_letters, bands = _canonicalize(items, n)
    return BraidStructure(
        regime_sign=regime_sign,
        even_letters=even_letters,
        odd_letters=odd_letters,
        bands=bands,
        rotation=rotation,
    )


def _canonicalize(items, n):
    """Rotate to the start of the even cluster and push bands to the end."""
    letter_positions = [i for i, it in enumerate(items) if it[0] == "letter"]
    if not letter_positions:
        raise BlockStructureFailure("trace produced no base circle letters")

    def parity_at(i):
        return items[i][1][0] % 2

    start = None
    m = len(letter_positions)
    for idx in range(m):
        i = letter_positions[idx]
        prev = letter_positions[(idx - 1) % m]
        if parity_at(i) == 0 and parity_at(prev) == 1:
            start = i
            break
    if start is None:
        # Single-parity base block (two strands, or all letters odd).
        start = letter_positions[0]

    rotated = items[start:] + items[:start]
    evens: list[int] = []
    odds: list[int] = []
    raw_bands: list[tuple[int, BandPiece]] = []
    base_seq: list[tuple[int, int]] = []
    for i, it in enumerate(rotated):
        if it[0] == "letter":
            base_seq.append(it[1])
            (evens if it[1][0] % 2 == 0 else odds).append(it[1][0])
        else:
            raw_bands.append((len(base_seq), it[1]))
    if evens and odds:
        first_odd = next(i for i, (k, _) in enumerate(base_seq) if k % 2 == 1)
        if any(k % 2 == 0 for k, _ in base_seq[first_odd:]):
            raise BlockStructureFailure(
                "rotated base letters do not fall into an even block "
                "followed by an odd block"
            )

    bands = []
    for skipped, piece in raw_bands:
        # Base letters appearing after the band must be conjugated into it
        # so the blocks can close up in front.
        tail = base_seq[skipped:]
        prefix = tuple((k, -s) for k, s in reversed(tail))
        bands.append(replace(piece, conjugator=prefix + piece.conjugator))
    return (start, tuple(evens), tuple(odds), tuple(bands))


def band_representation_from_structure(
    structure: BraidStructure, strands: int
) -> BandRepresentation:
    return BandRepresentation(
        strands=strands,
        sign=structure.regime_sign,
        even_block=structure.even_letters,
        odd_block=structure.odd_letters,
        bands=tuple(
            (BraidWord(strands, piece.conjugator), piece.position, piece.eps)
            for piece in structure.bands
        ),
    )


def extract_band_representation(
    traced: TracedBraid, loop: BaseLoop
) -> tuple[BandRepresentation, BraidStructure]:
    """Classify the traced word and return its band form.

    The expansion of the returned representation reproduces the traced word
    up to rotation, free reduction and distant-letter commutation; callers
    can certify that with require_band_match against the rotated word.
    """
    structure = classify_events(traced, loop)
    rep = band_representation_from_structure(structure, traced.strand_count)
    return rep, structure
