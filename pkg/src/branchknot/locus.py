"""The crossing locus: where two sheets agree in everything but depth.

Dropping the depth coordinate, sheets w and nu^k w collide exactly where

    a_k(w) = Re G_k(w) = 0.

The image of these curves in the base plane is the locus the braid tracer
must cross transversally: every crossing of it by the traced loop is one
letter of the braid word.  This module samples the locus (marching squares
over a polar grid), finds the isolated points where three sheets meet in
height (joint zeros of two coincidence functions), flags candidate singular
points of the locus, and certifies where a given path crosses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .doublepoints import (
    SheetPairing,
    SolverConfig,
    arg2pi,
    pair_mismatch,
    pair_mismatch_wirtinger,
)
from .errors import LiftAmbiguity, TangencyDetected
from .surface import BranchedDiskModel, PerturbationParams, nearest_root


def coincidence_value(model: BranchedDiskModel, params: PerturbationParams, k: int, w):
    """a_k(w): height difference between sheet w and sheet nu^k w."""
    return np.real(pair_mismatch(model, params, k, w))


def coincidence_gradient(model: BranchedDiskModel, params: PerturbationParams, k: int, w):
    """Real gradient (da/dx, da/dy) of the coincidence function at w."""
    gw, gwc = pair_mismatch_wirtinger(model, params, k, w)
    gx = gw + gwc
    gy = 1j * (gw - gwc)
    return np.real(gx), np.real(gy)


@dataclass(frozen=True)
class TripleCoincidence:
    """A parameter where two coincidence functions vanish together.

    Over its base image three sheets share one height, so the loop must
    stay clear: a braid crossing there would not be a simple transposition.
    """

    w: complex
    k: int
    l: int
    image_z: complex


@dataclass(frozen=True)
class LocusSample:
    """Sampled picture of the crossing locus in the base plane."""

    k: int
    polylines: tuple[np.ndarray, ...]          # complex z-polylines
    singular_candidates: tuple[complex, ...]   # base points where the locus may cross itself


def find_triple_coincidences(
    model: BranchedDiskModel,
    params: PerturbationParams,
    cfg: SolverConfig | None = None,
) -> list[TripleCoincidence]:
    """Joint zeros of (a_k, a_l) for every pair k < l, away from the origin.

    Multistart Newton on the 2x2 real system; for N = 2 there is nothing to
    intersect and the list is empty.
    """
    if cfg is None:
        cfg = SolverConfig()
    n = model.branch_order
    if n < 3:
        return []
    radii = np.linspace(model.r0 / cfg.grid_radii, 0.98 * model.r0, cfg.grid_radii)
    angles = np.linspace(0.0, 2 * math.pi, cfg.grid_angles, endpoint=False)
    rr, aa = np.meshgrid(radii, angles)
    seeds = (rr * np.exp(1j * aa)).ravel()
    out: list[TripleCoincidence] = []
    for k in range(1, n):
        for l in range(k + 1, n):
            w = seeds.copy()
            for _ in range(cfg.newton_max_iter):
                fk = coincidence_value(model, params, k, w)
                fl = coincidence_value(model, params, l, w)
                gkx, gky = coincidence_gradient(model, params, k, w)
                glx, gly = coincidence_gradient(model, params, l, w)
                det = gkx * gly - gky * glx
                reg = 1e-14 * (np.abs(gkx) + np.abs(gky) + np.abs(glx) + np.abs(gly)) ** 2
                det = np.where(np.abs(det) < reg + 1e-300, det + reg + 1e-300, det)
                dx = (-fk * gly + fl * gky) / det
                dy = (-fl * gkx + fk * glx) / det
                step = dx + 1j * dy
                mag = np.abs(step)
                cap = 0.25 * model.r0
                w = w + step * np.where(mag > cap, cap / (mag + 1e-300), 1.0)
            fk = np.abs(coincidence_value(model, params, k, w))
            fl = np.abs(coincidence_value(model, params, l, w))
            keep = (fk < cfg.tol_residual) & (fl < cfg.tol_residual) & np.isfinite(w)
            keep &= (np.abs(w) > cfg.exclusion(model)) & (np.abs(w) < model.r0)
            kept: list[complex] = []
            for root in w[keep]:
                root = complex(root)
                if any(abs(root - u) < cfg.tol_dedupe for u in kept):
                    continue
                kept.append(root)
            out.extend(
                TripleCoincidence(w=root, k=k, l=l, image_z=root**n)
                for root in kept
            )
    out.sort(key=lambda t: (t.k, t.l, arg2pi(t.w), abs(t.w)))
    return out


# -- marching squares over a polar grid ------------------------------------


def _cell_segments(corners, values, center_value):
    """Zero-level segments inside one grid cell.

    corners / values run counterclockwise: SW, SE, NE, NW.  Returns pairs of
    interpolated boundary points; the ambiguous double-saddle case is split
    using the sign at the cell center.
    """

    def lerp(p, q, vp, vq):
        t = vp / (vp - vq)
        return p + t * (q - p)

    pts = []
    for a, b in ((0, 1), (1, 2), (2, 3), (3, 0)):
        va, vb = values[a], values[b]
        if (va > 0) != (vb > 0):
            pts.append((a, lerp(corners[a], corners[b], va, vb)))
    if len(pts) == 2:
        return [(pts[0][1], pts[1][1])]
    if len(pts) == 4:
        # Saddle: connect crossings so the center sign stays consistent.
        if (center_value > 0) == (values[0] > 0):
            return [(pts[0][1], pts[3][1]), (pts[1][1], pts[2][1])]
        return [(pts[0][1], pts[1][1]), (pts[2][1], pts[3][1])]
    return []


def sample_locus(
    model: BranchedDiskModel,
    params: PerturbationParams,
    k: int,
    resolution: int = 192,
    cfg: SolverConfig | None = None,
) -> LocusSample:
    """Marching-squares sample of {a_k = 0}, pushed to the base plane.

    The grid is polar in w (radius x angle, angle wrapping), so the branch
    point is excluded by construction; the segments are chained into
    polylines and mapped through w -> w^N.
    """
    if cfg is None:
        cfg = SolverConfig()
    n = model.branch_order
    r_lo = max(cfg.exclusion(model) * 10, model.r0 / resolution)
    radii = np.linspace(r_lo, model.r0, resolution)
    angles = np.linspace(0.0, 2 * math.pi, 2 * resolution, endpoint=False)
    rr, aa = np.meshgrid(radii, angles, indexing="ij")
    grid_w = rr * np.exp(1j * aa)
    vals = coincidence_value(model, params, k, grid_w)

    na = len(angles)
    segments = []
    for i in range(len(radii) - 1):
        for j in range(na):
            j2 = (j + 1) % na
            values = (vals[i, j], vals[i, j2], vals[i + 1, j2], vals[i + 1, j])
            if all(v > 0 for v in values) or all(v <= 0 for v in values):
                continue
            # Interpolation is chordal in w, which also keeps the angle-wrap
            # cell (j2 == 0) consistent without special casing.
            corners = (grid_w[i, j], grid_w[i, j2], grid_w[i + 1, j2], grid_w[i + 1, j])
            center = 0.5 * (radii[i] + radii[i + 1]) * np.exp(
                1j * (angles[j] + math.pi / na)
            )
            cval = float(coincidence_value(model, params, k, center))
            segments.extend(_cell_segments(corners, values, cval))

    polylines = _chain_segments(segments)
    pushed = tuple(np.asarray(line, dtype=complex) ** n for line in polylines)
    singular = _singular_candidates(model, params, k, cfg)
    return LocusSample(k=k, polylines=pushed, singular_candidates=tuple(singular))


def _chain_segments(segments, snap: float = 1e-9) -> list[list[complex]]:
    """Greedy chaining of segments sharing endpoints (up to snapping)."""

    def key(z: complex):
        return (round(z.real / snap), round(z.imag / snap))

    adj: dict[tuple[int, int], list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        adj.setdefault(key(a), []).append(idx)
        adj.setdefault(key(b), []).append(idx)
    used = [False] * len(segments)
    chains: list[list[complex]] = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        for grow_end in (True, False):
            while True:
                tip = chain[-1] if grow_end else chain[0]
                nxt = None
                for idx in adj.get(key(tip), []):
                    if not used[idx]:
                        nxt = idx
                        break
                if nxt is None:
                    break
                used[nxt] = True
                p, q = segments[nxt]
                far = q if key(p) == key(tip) else p
                if grow_end:
                    chain.append(far)
                else:
                    chain.insert(0, far)
        chains.append(chain)
    return chains


def _singular_candidates(model, params, k, cfg: SolverConfig) -> list[complex]:
    """Base points where the locus may cross itself.

    A self-crossing of {a_k = 0} is a zero of a_k where the gradient also
    vanishes, so candidates are found by Newton on the gradient (Hessian by
    central differences) and filtered to the zero level.  Grid thresholds
    alone cannot see these points at practical resolutions.
    """
    coarse_r = np.linspace(model.r0 / 12, 0.95 * model.r0, 12)
    coarse_a = np.linspace(0.0, 2 * math.pi, 24, endpoint=False)
    rr, aa = np.meshgrid(coarse_r, coarse_a)
    w = (rr * np.exp(1j * aa)).ravel()
    delta = 1e-6 * model.r0
    for _ in range(40):
        gx, gy = coincidence_gradient(model, params, k, w)
        gpx = coincidence_gradient(model, params, k, w + delta)
        gpy = coincidence_gradient(model, params, k, w + 1j * delta)
        gxx, gyx = (gpx[0] - gx) / delta, (gpx[1] - gy) / delta
        gxy, gyy = (gpy[0] - gx) / delta, (gpy[1] - gy) / delta
        det = gxx * gyy - gxy * gyx
        tiny = np.abs(det) < 1e-30
        det = np.where(tiny, 1.0, det)
        dx = (-gx * gyy + gy * gxy) / det
        dy = (-gy * gxx + gx * gyx) / det
        step = np.where(tiny, 0.0, dx + 1j * dy)
        mag = np.abs(step)
        cap = 0.2 * model.r0
        w = w + step * np.where(mag > cap, cap / (mag + 1e-300), 1.0)
    gx, gy = coincidence_gradient(model, params, k, w)
    grad_norm = np.hypot(gx, gy)
    level = np.abs(coincidence_value(model, params, k, w))
    scale = max(abs(params.lam), abs(params.mu), 1e-6)
    keep = (grad_norm < 1e-8 * scale) & (level < 1e-8 * scale) & np.isfinite(w)
    keep &= (np.abs(w) > cfg.exclusion(model)) & (np.abs(w) < model.r0)
    kept: list[complex] = []
    for root in w[keep]:
        root = complex(root)
        if any(abs(root - u) < 100 * cfg.tol_dedupe for u in kept):
            continue
        kept.append(root)
    return sorted((r ** model.branch_order for r in kept), key=lambda z: (arg2pi(z), abs(z)))


# -- crossings of a path with the locus ------------------------------------


@dataclass(frozen=True)
class LocusHit:
    """One certified transversal crossing of the locus by a path."""

    theta: float
    k: int
    slope: float  # d/dtheta of the tracked coincidence value at the crossing


def path_locus_intersections(
    model: BranchedDiskModel,
    params: PerturbationParams,
    path: Callable[[float], complex],
    theta_range: tuple[float, float],
    lift0: complex,
    k: int,
    *,
    samples: int = 512,
    tol_theta: float = 1e-10,
    tol_grad: float = 1e-6,
) -> list[LocusHit]:
    """Crossing parameters of a_k along a path, tracked on one lifted strand.

    The lift starts at lift0 (an N-th root of path(theta_start)) and is
    continued by nearest-root matching over a dense sample; sign changes of
    the tracked coincidence value are bisected to tol_theta and certified
    transversal via their slope, raising TangencyDetected otherwise.
    """
    n = model.branch_order
    t0, t1 = theta_range

    def track(theta_from: float, w_from: complex, theta_to: float, parts: int = 1) -> complex:
        w = w_from
        for i in range(1, parts + 1):
            t = theta_from + (theta_to - theta_from) * i / parts
            z = path(t)
            w_next = nearest_root(z, n, w)
            spacing = 2.0 * abs(w_next) * math.sin(math.pi / n)
            if abs(w_next - w) > 0.45 * spacing:
                if parts >= 64:
                    raise LiftAmbiguity(
                        f"lift jumped {abs(w_next - w):.3g} against spacing {spacing:.3g}"
                    )
                return track(theta_from + (theta_to - theta_from) * (i - 1) / parts,
                             w, theta_to, parts * 4)
            w = w_next
        return w

    thetas = np.linspace(t0, t1, samples + 1)
    lifts = [lift0]
    for i in range(samples):
        lifts.append(track(thetas[i], lifts[i], thetas[i + 1]))
    # An exact zero at a sample point is counted as negative so the crossing
    # is detected exactly once, in the interval where the value turns positive.
    values = [
        float(coincidence_value(model, params, k, w)) or -1e-300 for w in lifts
    ]

    hits: list[LocusHit] = []
    for i in range(samples):
        va, vb = values[i], values[i + 1]
        if (va > 0) == (vb > 0):
            continue
        lo, hi = thetas[i], thetas[i + 1]
        wlo = lifts[i]
        vlo = va
        while hi - lo > tol_theta:
            mid = 0.5 * (lo + hi)
            wmid = track(lo, wlo, mid)
            vmid = float(coincidence_value(model, params, k, wmid))
            if vmid == 0.0 or (vmid > 0) == (vlo > 0):
                lo, wlo, vlo = mid, wmid, vmid if vmid != 0.0 else vlo
            else:
                hi = mid
        theta_star = 0.5 * (lo + hi)
        delta = math.sqrt(tol_theta) * max(1.0, abs(t1 - t0))
        w_star = track(lo, wlo, theta_star)
        w_m = track(theta_star, w_star, max(theta_star - delta, t0))
        w_p = track(theta_star, w_star, min(theta_star + delta, t1))
        span = min(theta_star + delta, t1) - max(theta_star - delta, t0)
        slope = (
            float(coincidence_value(model, params, k, w_p))
            - float(coincidence_value(model, params, k, w_m))
        ) / span
        if abs(slope) <= tol_grad:
            raise TangencyDetected(
                f"crossing at theta={theta_star:.6g} has slope {slope:.3g} "
                f"below transversality tolerance {tol_grad:g}"
            )
        hits.append(LocusHit(theta=theta_star, k=k, slope=slope))
    return hits
