"""Locating the self-intersections of the perturbed disk.

Two parameters w1 != w2 hit the same point of R^4 exactly when w2 = nu^k w1
for some sheet shift k (nu = exp(2 pi i / N)) and the mismatch

    G_k(w) = z2(w) - z2(nu^k w)

vanishes.  G_k is real-analytic but not holomorphic as soon as mu or a
conjugate monomial is present, so roots are found with a damped Newton
iteration on the underlying 2-real-equation system, started from a polar
grid of seeds and deduplicated into unordered sheet pairs.

The intersection sign of a double point is the sign of the 4x4 determinant
of the two tangent frames; its absolute value is kept as a transversality
margin.  A second, independent route to the same sign goes through the
shared direction of the two tangent planes after dropping the depth
coordinate; the two must agree and tests rely on that.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenericityFailure, PreconditionViolated, ValidationError
from .surface import (
    BranchedDiskModel,
    PerturbationParams,
    Point4,
    eval_F,
    eval_height_coord,
    height_coord_wirtinger,
    jacobian_F,
)


def arg2pi(z: complex) -> float:
    """Argument normalized to [0, 2 pi)."""
    return cmath.phase(z) % (2 * math.pi)


@dataclass(frozen=True)
class SheetPairing:
    """Sheet shift k on an N-sheeted cover; pairs w with nu^k w."""

    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValidationError(f"sheet shift k={self.k} outside 1..{self.n - 1}")

    @property
    def nu(self) -> complex:
        return cmath.exp(2j * math.pi * self.k / self.n)


@dataclass
class DoublePoint:
    """A transverse self-intersection, stored as an unordered parameter pair.

    The representative (w1, k) is canonical: k <= N - k, and for k == N/2
    the element of {w1, -w1} with smaller argument in [0, 2 pi) is kept.
    """

    w1: complex
    w2: complex
    pairing: SheetPairing
    image: Point4
    sign: int
    residual: float
    transversality_margin: float


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the multistart Newton solver."""

    grid_radii: int = 24            # radial seed count
    grid_angles: int = 48           # angular seed count
    newton_max_iter: int = 50
    tol_residual: float = 1e-10     # |F(w1) - F(w2)| acceptance
    tol_dedupe: float = 1e-6        # root clustering radius
    tol_transverse: float = 1e-12   # minimum |det| of the 4x4 frame matrix
    exclusion_radius: float | None = None  # default 1e-4 * r0

    def exclusion(self, model: BranchedDiskModel) -> float:
        if self.exclusion_radius is not None:
            return self.exclusion_radius
        return 1e-4 * model.r0


def pair_mismatch(model: BranchedDiskModel, params: PerturbationParams, k: int, w):
    """G_k(w) = z2(w) - z2(nu^k w); zero exactly at a sheet coincidence."""
    nu = SheetPairing(model.branch_order, k).nu
    return eval_height_coord(model, params, w) - eval_height_coord(model, params, nu * w)


def pair_mismatch_wirtinger(model: BranchedDiskModel, params: PerturbationParams, k: int, w):
    """Wirtinger derivatives (G_w, G_wbar) of the mismatch at w."""
    nu = SheetPairing(model.branch_order, k).nu
    d1, d1c = height_coord_wirtinger(model, params, w)
    d2, d2c = height_coord_wirtinger(model, params, nu * w)
    return d1 - nu * d2, d1c - np.conj(nu) * d2c


def _newton_sweep(model, params, k, seeds, cfg: SolverConfig) -> np.ndarray:
    """Vectorized Newton on G_k from an array of seeds; returns survivors."""
    w = np.asarray(seeds, dtype=complex).copy()
    for _ in range(cfg.newton_max_iter):
        g = pair_mismatch(model, params, k, w)
        gw, gwc = pair_mismatch_wirtinger(model, params, k, w)
        # Real 2x2 Jacobian from the Wirtinger pair.
        gx = gw + gwc
        gy = 1j * (gw - gwc)
        j11, j21 = gx.real, gx.imag
        j12, j22 = gy.real, gy.imag
        r1, r2 = -g.real, -g.imag
        # Tikhonov-regularized normal equations: exact Newton when J is
        # well conditioned, a least-squares step when it degenerates.
        a = j11 * j11 + j21 * j21
        b = j11 * j12 + j21 * j22
        d = j12 * j12 + j22 * j22
        eps = 1e-14 * (a + d) + 1e-300
        det = (a + eps) * (d + eps) - b * b
        t1 = j11 * r1 + j21 * r2
        t2 = j12 * r1 + j22 * r2
        dx = ((d + eps) * t1 - b * t2) / det
        dy = (-b * t1 + (a + eps) * t2) / det
        step = dx + 1j * dy
        # Damp huge steps so far-out seeds do not explode.
        mag = np.abs(step)
        cap = 0.5 * model.r0
        scale = np.where(mag > cap, cap / (mag + 1e-300), 1.0)
        w = w + step * scale
    g = pair_mismatch(model, params, k, w)
    keep = (np.abs(g) < cfg.tol_residual) & np.isfinite(w)
    radius = np.abs(w)
    keep &= (radius > cfg.exclusion(model)) & (radius < model.r0)
    return w[keep]


def _canonical_rep(w: complex, n: int, k: int) -> complex:
    """Canonical element of the pair {w, nu^k w} (only ambiguous at k = N/2)."""
    if 2 * k != n:
        return w
    other = SheetPairing(n, k).nu * w
    return w if arg2pi(w) <= arg2pi(other) else other


def _seed_grid(model: BranchedDiskModel, cfg: SolverConfig) -> np.ndarray:
    radii = np.linspace(model.r0 / cfg.grid_radii, 0.98 * model.r0, cfg.grid_radii)
    angles = np.linspace(0.0, 2 * math.pi, cfg.grid_angles, endpoint=False)
    rr, aa = np.meshgrid(radii, angles)
    return (rr * np.exp(1j * aa)).ravel()


def find_double_points(
    model: BranchedDiskModel,
    params: PerturbationParams,
    cfg: SolverConfig | None = None,
    *,
    strict: bool = True,
    stats: dict | None = None,
) -> list[DoublePoint]:
    """All double points of the perturbed disk, as canonical unordered pairs.

    Solves G_k for every k <= N/2 by multistart Newton, deduplicates, and
    attaches intersection signs.  With strict=True (the default) a root that
    fails the transversality margin raises GenericityFailure, which callers
    treat as "retry with a different gamma"; with strict=False degenerate
    points are returned anyway so that a genericity report can show them.
    """
    if cfg is None:
        cfg = SolverConfig()
    n = model.branch_order
    seeds = _seed_grid(model, cfg)
    found: list[DoublePoint] = []
    dropped = 0
    for k in range(1, n // 2 + 1):
        roots = _newton_sweep(model, params, k, seeds, cfg)
        dropped += len(seeds) - len(roots)
        reps = [_canonical_rep(w, n, k) for w in roots]
        order = sorted(
            range(len(reps)),
            key=lambda i: abs(pair_mismatch(model, params, k, reps[i])),
        )
        kept: list[complex] = []
        for i in order:
            w = reps[i]
            if any(abs(w - u) < cfg.tol_dedupe for u in kept):
                continue
            kept.append(w)
        nu = SheetPairing(n, k).nu
        for w1 in kept:
            w2 = nu * w1
            p1, p2 = eval_F(model, params, w1), eval_F(model, params, w2)
            residual = math.hypot(abs(p1.z1 - p2.z1), abs(p1.z2 - p2.z2))
            dp = DoublePoint(
                w1=w1,
                w2=w2,
                pairing=SheetPairing(n, k),
                image=p1,
                sign=0,
                residual=residual,
                transversality_margin=0.0,
            )
            try:
                double_point_sign(model, params, dp, tol_transverse=cfg.tol_transverse)
            except GenericityFailure:
                if strict:
                    raise
            found.append(dp)
    if stats is not None:
        stats["seeds"] = len(seeds) * (n // 2)
        stats["nonconverged"] = dropped
    found.sort(key=lambda d: (d.pairing.k, arg2pi(d.w1), abs(d.w1)))
    return found


def double_point_sign(
    model: BranchedDiskModel,
    params: PerturbationParams,
    dp: DoublePoint,
    tol_transverse: float = 1e-12,
) -> int:
    """Intersection sign: sign of det of the two tangent frames side by side.

    Also writes the |det| transversality margin back onto the point.
    Raises GenericityFailure when the margin is at or below tolerance,
    which is the signal to retry with a perturbed gamma.
    """
    j1 = jacobian_F(model, params, dp.w1)
    j2 = jacobian_F(model, params, dp.w2)
    det = float(np.linalg.det(np.hstack([j1, j2])))
    dp.transversality_margin = abs(det)
    dp.sign = 1 if det > 0 else -1
    if abs(det) <= tol_transverse:
        raise GenericityFailure(
            f"intersection at w1={dp.w1:.6g} has |det|={abs(det):.3g}, "
            "not transverse within tolerance"
        )
    return dp.sign


def sign_from_projected_tangents(
    model: BranchedDiskModel, params: PerturbationParams, dp: DoublePoint
) -> int:
    """Independent sign route via the shared direction of the two planes.

    Dropping the depth coordinate, the two tangent planes meet along a line.
    Lift a positive base frame (u, iu) through each tangent plane and read
    off the height slope beta of the second frame vector and the depth slope
    gamma of the shared vector; the sign is -sign((beta - beta')(gamma -
    gamma')).  Equals the determinant sign; kept separate as a cross-check.
    """
    j1 = jacobian_F(model, params, dp.w1)
    j2 = jacobian_F(model, params, dp.w2)
    n1 = np.cross(j1[:3, 0], j1[:3, 1])
    n2 = np.cross(j2[:3, 0], j2[:3, 1])
    shared = np.cross(n1, n2)
    if np.linalg.norm(shared) < 1e-14:
        raise GenericityFailure("projected tangent planes do not meet along a line")
    u = complex(shared[0], shared[1])
    if abs(u) < 1e-14:
        raise GenericityFailure("shared direction projects to a point in the base")
    v = 1j * u

    def lift(j: np.ndarray, target: complex) -> np.ndarray:
        top = j[:2, :]
        coeff = np.linalg.solve(top, np.array([target.real, target.imag]))
        return j @ coeff

    u0, v0 = lift(j1, u), lift(j1, v)
    u1, v1 = lift(j2, u), lift(j2, v)
    beta, beta_p = v0[2], v1[2]
    gam, gam_p = u0[3], u1[3]
    value = -(beta - beta_p) * (gam - gam_p)
    if value == 0:
        raise GenericityFailure("degenerate projected-tangent sign")
    return 1 if value > 0 else -1


def holomorphic_oracle(
    model: BranchedDiskModel,
    params: PerturbationParams,
    k: int,
    cfg: SolverConfig | None = None,
) -> list[complex]:
    """Roots of G_k via companion-matrix eigenvalues (holomorphic case only).

    With mu = gamma = 0 and h a polynomial in w alone, G_k(w) / w is an
    ordinary polynomial with nonzero constant term lam (1 - nu^k); its roots
    inside the domain ring are exactly the nonzero coincidence parameters.
    Serves as the independent oracle for the Newton solver.
    """
    if params.mu != 0 or params.gamma != 0 or not model.holomorphic:
        raise PreconditionViolated("oracle needs mu = gamma = 0 and holomorphic h")
    if cfg is None:
        cfg = SolverConfig()
    n = model.branch_order
    nu = SheetPairing(n, k).nu
    top = max((t.deg_w for t in model.terms), default=1)
    # Coefficients of G_k(w) / w by ascending degree.
    coeffs = np.zeros(top, dtype=complex)
    coeffs[0] = params.lam * (1 - nu)
    for t in model.terms:
        coeffs[t.deg_w - 1] += t.coeff * (1 - nu**t.deg_w)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) == 1:
        return []
    roots = np.roots(coeffs[::-1])
    # Eigenvalue roots are backward stable but can land ~1e-8 away from the
    # true root when alternate coefficients cancel (the antipodal pairing at
    # even N); polishing against the explicit polynomial restores full
    # precision at simple roots.
    dcoeffs = coeffs[1:] * np.arange(1, len(coeffs))
    for _ in range(3):
        vals = np.polyval(coeffs[::-1], roots)
        derivs = np.polyval(dcoeffs[::-1], roots)
        ok = np.abs(derivs) > 1e-300
        roots[ok] -= vals[ok] / derivs[ok]
    lo, hi = cfg.exclusion(model), model.r0
    return sorted(
        (complex(r) for r in roots if lo < abs(r) < hi),
        key=lambda z: (arg2pi(z), abs(z)),
    )


def oracle_pairs(
    model: BranchedDiskModel,
    params: PerturbationParams,
    cfg: SolverConfig | None = None,
) -> list[tuple[int, complex]]:
    """Canonical (k, w1) pairs predicted by the holomorphic oracle."""
    if cfg is None:
        cfg = SolverConfig()
    n = model.branch_order
    pairs: list[tuple[int, complex]] = []
    for k in range(1, n // 2 + 1):
        reps = [_canonical_rep(w, n, k) for w in holomorphic_oracle(model, params, k, cfg)]
        kept: list[complex] = []
        for w in sorted(reps, key=lambda z: (arg2pi(z), abs(z))):
            if any(abs(w - u) < cfg.tol_dedupe for u in kept):
                continue
            kept.append(w)
        pairs.extend((k, w) for w in kept)
    return pairs


@dataclass(frozen=True)
class GenericityReport:
    """Outcome of the post-solve genericity screen."""

    margin_failures: tuple[int, ...]        # indices of points below margin
    image_collisions: tuple[tuple[int, int], ...]  # base-image coincidences
    triple_collisions: tuple[int, ...]      # points too close to a triple coincidence
    triples_checked: bool

    @property
    def passed(self) -> bool:
        return not (self.margin_failures or self.image_collisions or self.triple_collisions)

    def describe(self) -> str:
        if self.passed:
            return "generic: margins, image separation and triple avoidance all pass"
        bits = []
        if self.margin_failures:
            bits.append(f"margin failures at {list(self.margin_failures)}")
        if self.image_collisions:
            bits.append(f"coincident base images {list(self.image_collisions)}")
        if self.triple_collisions:
            bits.append(f"points near triple coincidences {list(self.triple_collisions)}")
        return "; ".join(bits)


def check_genericity(
    model: BranchedDiskModel,
    params: PerturbationParams,
    points: list[DoublePoint],
    cfg: SolverConfig | None = None,
    triples=None,
) -> GenericityReport:
    """Screen solved double points for the degeneracies the tracer cannot survive.

    (a) every transversality margin clears tolerance, (b) base-plane images
    are pairwise separated (a collision means an actual triple point of the
    disk), (c) no double point sits on a triple coincidence of the crossing
    locus.  Triples are computed on demand when not supplied.
    """
    if cfg is None:
        cfg = SolverConfig()
    margin_failures = tuple(
        i for i, p in enumerate(points) if p.transversality_margin <= cfg.tol_transverse
    )
    collisions = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if abs(points[i].image.z1 - points[j].image.z1) <= cfg.tol_dedupe:
                collisions.append((i, j))
    if triples is None:
        if model.branch_order >= 3:
            from .locus import find_triple_coincidences

            triples = find_triple_coincidences(model, params, cfg)
        else:
            triples = []  # a 2-sheeted cover has no triple coincidences
    near_triples = tuple(
        i
        for i, p in enumerate(points)
        if any(abs(p.image.z1 - t.image_z) <= cfg.tol_dedupe for t in triples)
    )
    return GenericityReport(
        margin_failures=margin_failures,
        image_collisions=tuple(collisions),
        triple_collisions=near_triples,
        triples_checked=True,
    )


def gamma_retry_schedule(params: PerturbationParams) -> list[complex]:
    """Deterministic gamma values to try when genericity fails.

    Seven spokes of a shrinking spiral, bounded by the allowed quadratic
    budget 0.01 * max(|lam|, |mu|).
    """
    base = 0.01 * max(abs(params.lam), abs(params.mu))
    return [
        base * cmath.exp(2j * math.pi * j / 7) * 2.0**-j
        for j in range(7)
    ]
