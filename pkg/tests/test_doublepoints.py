"""Double point solver, sign routes, oracle, and the genericity screen."""

import cmath
import math

import pytest

from branchknot import (
    BranchedDiskModel,
    Monomial,
    PerturbationParams,
    SolverConfig,
    check_genericity,
    find_double_points,
    gamma_retry_schedule,
    holomorphic_oracle,
    oracle_pairs,
)
from branchknot.doublepoints import (
    arg2pi,
    double_point_sign,
    pair_mismatch,
    sign_from_projected_tangents,
)
from branchknot.errors import GenericityFailure, PreconditionViolated
from branchknot.pipeline import resolve_double_points

TREFOIL = BranchedDiskModel(branch_order=2, terms=(Monomial(1.0, 3, 0),))
LAM = PerturbationParams(lam=0.1)


def test_arg2pi_range():
    assert arg2pi(1.0) == 0.0
    assert arg2pi(1j) == pytest.approx(math.pi / 2)
    assert arg2pi(-1.0) == pytest.approx(math.pi)
    assert arg2pi(-1j) == pytest.approx(3 * math.pi / 2)
    assert 0 <= arg2pi(1 - 1e-9j) < 2 * math.pi


def test_trefoil_double_point_frozen():
    # z2(w) - z2(-w) = 2 w^3 + 0.2 w has the nonzero roots +-i sqrt(0.1);
    # they form a single canonical pair with image base point -0.1.
    dps = find_double_points(TREFOIL, LAM)
    assert len(dps) == 1
    dp = dps[0]
    assert dp.pairing.k == 1
    assert dp.w1 == pytest.approx(1j * math.sqrt(0.1), abs=1e-10)
    assert dp.w2 == pytest.approx(-1j * math.sqrt(0.1), abs=1e-10)
    assert complex(dp.image.z1) == pytest.approx(-0.1, abs=1e-12)
    assert complex(dp.image.z2) == pytest.approx(0.0, abs=1e-12)
    assert dp.sign == 1
    assert dp.residual < 1e-10
    assert dp.transversality_margin > 1e-6


def test_trefoil_antiholomorphic_regime():
    # With z2 = w^3 + mu*conj(w) the coincidence equation 2w^3 = -2mu*conj(w)
    # forces |w| = sqrt(|mu|) and 4*arg(w) = pi (mod 2pi): four roots, two
    # canonical pairs.  At that radius the cubic term still dominates the
    # conjugate-linear one (|G_w| = 6|w|^2 > |mu| = |G_wbar|), so both
    # intersections stay positive.
    dps = find_double_points(TREFOIL, PerturbationParams(mu=0.1))
    assert len(dps) == 2
    r = math.sqrt(0.1)
    for dp, angle in zip(dps, (math.pi / 4, 3 * math.pi / 4)):
        assert abs(dp.w1) == pytest.approx(r, abs=1e-10)
        assert arg2pi(dp.w1) == pytest.approx(angle, abs=1e-10)
        assert dp.sign == 1
        assert dp.residual < 1e-10


def test_double_point_residual_is_zero_mismatch():
    dps = find_double_points(TREFOIL, LAM)
    dp = dps[0]
    assert abs(pair_mismatch(TREFOIL, LAM, dp.pairing.k, dp.w1)) < 1e-10


def test_unknot_regime_has_no_double_points():
    for n in (2, 3, 4, 5):
        model = BranchedDiskModel(branch_order=n)
        assert find_double_points(model, LAM) == []


def test_torus_counts():
    # h = w^M at branch order N gives (N-1)(M-1)/2 canonical double points.
    for n, m in ((2, 3), (2, 5), (2, 7), (3, 5)):
        model = BranchedDiskModel(branch_order=n, terms=(Monomial(1.0, m, 0),))
        dps = find_double_points(model, LAM)
        assert len(dps) == (n - 1) * (m - 1) // 2
        assert all(dp.sign == 1 for dp in dps)


def test_solver_matches_oracle():
    for n, m in ((2, 3), (2, 5), (3, 5)):
        model = BranchedDiskModel(branch_order=n, terms=(Monomial(1.0, m, 0),))
        dps = find_double_points(model, LAM)
        expected = oracle_pairs(model, LAM)
        assert len(dps) == len(expected)
        for dp, (k, w) in zip(dps, expected):
            assert dp.pairing.k == k
            assert dp.w1 == pytest.approx(w, abs=1e-8)


def test_oracle_rejects_nonholomorphic_input():
    mixed = BranchedDiskModel(branch_order=2, terms=(Monomial(1.0, 2, 1),))
    with pytest.raises(PreconditionViolated):
        holomorphic_oracle(mixed, LAM, 1)
    with pytest.raises(PreconditionViolated):
        holomorphic_oracle(TREFOIL, PerturbationParams(lam=0.1, mu=0.01), 1)


def test_both_sign_routes_agree():
    # The 4x4 determinant and the projected-tangent construction are
    # independent derivations of the same intersection sign.
    cases = [
        (TREFOIL, LAM),
        (TREFOIL, PerturbationParams(mu=0.1)),
        (BranchedDiskModel(branch_order=2, terms=(Monomial(1.0, 5, 0),)), LAM),
        (BranchedDiskModel(branch_order=3, terms=(Monomial(1.0, 5, 0),)), LAM),
    ]
    for model, params in cases:
        for dp in find_double_points(model, params):
            s_det = double_point_sign(model, params, dp)
            s_proj = sign_from_projected_tangents(model, params, dp)
            assert s_det == s_proj


def test_degenerate_balanced_regime_fails_genericity():
    # With h = 0 and |lam| = |mu| the perturbation drops rank along a whole
    # line of non-transverse self-intersections; the pipeline-level resolver
    # must give up with GenericityFailure even after walking the whole
    # quadratic retry schedule.  (A dominant cubic term would rescue this.)
    model = BranchedDiskModel(branch_order=2)
    params = PerturbationParams(lam=0.1, mu=0.1)
    with pytest.raises(GenericityFailure):
        resolve_double_points(model, params, SolverConfig())


def test_gamma_retry_schedule_shape():
    params = PerturbationParams(lam=0.1)
    sched = gamma_retry_schedule(params)
    assert len(sched) == 7
    budget = 0.01 * 0.1
    assert abs(sched[0]) == pytest.approx(budget)
    for a, b in zip(sched, sched[1:]):
        assert abs(b) == pytest.approx(abs(a) / 2)
        assert abs(b) <= budget
    # Distinct spiral directions.
    args = {round(cmath.phase(g), 6) for g in sched}
    assert len(args) == 7


def test_check_genericity_passes_on_clean_case():
    dps = find_double_points(TREFOIL, LAM)
    report = check_genericity(TREFOIL, LAM, dps)
    assert report.passed
    assert report.triples_checked
    assert "generic" in report.describe()


def test_check_genericity_flags_triple_point():
    # h = w^4 at branch order 3 with gamma = 0: the three cube roots of
    # -lam all map to the same point of C^2, a genuine triple point.  The
    # screen must flag it rather than let the loop builder walk into it.
    model = BranchedDiskModel(branch_order=3, terms=(Monomial(1.0, 4, 0),))
    dps = find_double_points(model, LAM, strict=False)
    report = check_genericity(model, LAM, dps)
    assert not report.passed
    # The quadratic retry schedule then resolves it within a few tries.
    dps, report, used, retries = resolve_double_points(model, LAM, SolverConfig())
    assert report.passed
    assert 1 <= retries <= 7
    assert used.gamma != 0
    assert len(dps) == 3
