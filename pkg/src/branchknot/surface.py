"""The perturbed branched disk and its differential.

The object of study is a disk in C^2 = R^4 parametrized over |w| <= r0 by

    F(w) = (w^N, h(w) + lam * w + mu * conj(w) + Re(gamma * w^2))

where h is a finite sum of monomials c * w^a * conj(w)^b, every term of
total degree a + b >= N + 1.  The first coordinate is an N-sheeted branched
cover of the base plane; the second separates the sheets.  The linear terms
unfold the branch point, and the small quadratic real term gamma is kept in
reserve to break accidental coincidences.

Conventions used throughout the package: the base plane is the image of the
first coordinate; "height" means Re of the second coordinate (third real
coordinate) and "depth" means Im of it (fourth real coordinate).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroFiber


@dataclass(frozen=True)
class Monomial:
    """One term coeff * w^deg_w * conj(w)^deg_conj of the higher-order part."""

    coeff: complex
    deg_w: int
    deg_conj: int = 0

    def __post_init__(self):
        if self.coeff == 0:
            raise ValidationError("monomial coefficient must be nonzero")
        if self.deg_w < 0 or self.deg_conj < 0:
            raise ValidationError("monomial exponents must be nonnegative")

    @property
    def total_degree(self) -> int:
        return self.deg_w + self.deg_conj

    @property
    def holomorphic(self) -> bool:
        return self.deg_conj == 0


@dataclass(frozen=True)
class BranchedDiskModel:
    """Branch order N, higher-order terms h, and the domain radius r0."""

    branch_order: int
    terms: tuple[Monomial, ...] = ()
    r0: float = 1.0

    def __post_init__(self):
        n = self.branch_order
        if n < 2:
            raise ValidationError(f"branch order must be >= 2, got {n}")
        if not self.r0 > 0:
            raise ValidationError("domain radius r0 must be positive")
        object.__setattr__(self, "terms", tuple(self.terms))
        seen: set[tuple[int, int]] = set()
        for t in self.terms:
            if t.total_degree < n + 1:
                raise ValidationError(
                    f"term w^{t.deg_w} conj(w)^{t.deg_conj} has total degree "
                    f"{t.total_degree} < {n + 1}; h must vanish to order N+1"
                )
            key = (t.deg_w, t.deg_conj)
            if key in seen:
                raise ValidationError(f"duplicate monomial exponents {key}")
            seen.add(key)

    @property
    def holomorphic(self) -> bool:
        return all(t.holomorphic for t in self.terms)


@dataclass(frozen=True)
class PerturbationParams:
    """Unfolding parameters (lam, mu) and the reserve quadratic term gamma."""

    lam: complex = 0.0
    mu: complex = 0.0
    gamma: complex = 0.0

    def __post_init__(self):
        if self.lam == 0 and self.mu == 0:
            raise ValidationError("at least one of lam, mu must be nonzero")
        bound = 0.01 * max(abs(self.lam), abs(self.mu))
        if abs(self.gamma) > bound * (1 + 1e-12):
            raise ValidationError(
                f"|gamma| = {abs(self.gamma):.3g} exceeds the allowed "
                f"0.01 * max(|lam|, |mu|) = {bound:.3g}"
            )


@dataclass(frozen=True)
class Point4:
    """A point of R^4 written as two complex coordinates."""

    z1: complex
    z2: complex


def eval_h(model: BranchedDiskModel, w):
    """Value of the higher-order part h at w (scalar or ndarray)."""
    total = 0j if np.isscalar(w) else np.zeros_like(np.asarray(w, dtype=complex))
    wc = np.conj(w)
    for t in model.terms:
        total = total + t.coeff * w**t.deg_w * wc**t.deg_conj
    return total


def eval_h_wirtinger(model: BranchedDiskModel, w):
    """Wirtinger derivatives (dh/dw, dh/dconj(w)) at w."""
    wc = np.conj(w)
    dw = 0j if np.isscalar(w) else np.zeros_like(np.asarray(w, dtype=complex))
    dwc = 0j if np.isscalar(w) else np.zeros_like(np.asarray(w, dtype=complex))
    for t in model.terms:
        if t.deg_w:
            dw = dw + t.coeff * t.deg_w * w ** (t.deg_w - 1) * wc**t.deg_conj
        if t.deg_conj:
            dwc = dwc + t.coeff * t.deg_conj * w**t.deg_w * wc ** (t.deg_conj - 1)
    return dw, dwc


def eval_height_coord(model: BranchedDiskModel, params: PerturbationParams, w):
    """Second complex coordinate z2 of the perturbed disk at w.

    Note the quadratic term enters through its real part only, so it moves
    the height and never the depth.
    """
    wc = np.conj(w)
    return (
        eval_h(model, w)
        + params.lam * w
        + params.mu * wc
        + np.real(params.gamma * w * w)
    )


def height_coord_wirtinger(model: BranchedDiskModel, params: PerturbationParams, w):
    """Wirtinger derivatives of z2.  Re(gamma w^2) = (gamma w^2 + conj) / 2."""
    dw, dwc = eval_h_wirtinger(model, w)
    dw = dw + params.lam + params.gamma * w
    dwc = dwc + params.mu + np.conj(params.gamma) * np.conj(w)
    return dw, dwc


def eval_F(model: BranchedDiskModel, params: PerturbationParams, w: complex) -> Point4:
    """The full map F(w) = (w^N, z2(w))."""
    return Point4(w**model.branch_order, eval_height_coord(model, params, w))


def jacobian_F(model: BranchedDiskModel, params: PerturbationParams, w: complex) -> np.ndarray:
    """Real 4x2 Jacobian of F at w, columns d/dx and d/dy.

    Built from Wirtinger derivatives: for a complex-valued g(w, conj w),
    dg/dx = g_w + g_wc and dg/dy = i (g_w - g_wc).
    """
    n = model.branch_order
    z1_w = n * w ** (n - 1)
    z2_w, z2_wc = height_coord_wirtinger(model, params, w)
    col_x = (z1_w, z2_w + z2_wc)
    col_y = (1j * z1_w, 1j * (z2_w - z2_wc))
    out = np.empty((4, 2))
    for col, (dz1, dz2) in enumerate((col_x, col_y)):
        out[0, col] = dz1.real
        out[1, col] = dz1.imag
        out[2, col] = dz2.real
        out[3, col] = dz2.imag
    return out


def project_base(p: Point4) -> complex:
    """Projection to the base plane (first complex coordinate)."""
    return p.z1


def project_real3(p: Point4) -> tuple[float, float, float]:
    """Projection to R^3 dropping the depth coordinate."""
    return (p.z1.real, p.z1.imag, p.z2.real)


def lift_fiber(z: complex, n: int) -> list[complex]:
    """The n distinct n-th roots of z != 0, sorted by argument in [0, 2 pi).

    Successive roots differ by the factor exp(2 pi i / n), so index j mod n
    is the sheet label used everywhere in the tracing code.
    """
    if z == 0:
        raise ZeroFiber("fiber over the branch point is not a set of n points")
    r = abs(z) ** (1.0 / n)
    base = cmath.phase(z) % (2 * cmath.pi)
    return [r * cmath.exp(1j * (base + 2 * cmath.pi * j) / n) for j in range(n)]


def nearest_root(z: complex, n: int, w_ref: complex) -> complex:
    """The n-th root of z closest to the reference lift w_ref.

    Used for continuous tracking of a single lift along a path in the base
    plane; callers keep steps well under the root spacing so the choice is
    unambiguous.
    """
    return min(lift_fiber(z, n), key=lambda w: abs(w - w_ref))
