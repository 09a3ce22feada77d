"""Acceptance suite: seven criteria, one test (one pass/fail line) each.

1. unknot regime: blocks only, uniform sign, trivial closure, within budget
2. torus suite: counts, oracle roots, exponent sum, Alexander form, genus
3. writhe identity on every run
4. detour crossings carry the double point sign; tube words cancel
5. braid permutation equals fiber monodromy and is a full cycle
6. solver vs companion-matrix oracle on random holomorphic perturbations
7. invariant property suites (Alexander symmetry, Burau, Jacobian, stability)
"""

import random

import numpy as np
import pytest

from branchknot import (
    BraidWord,
    BranchedDiskModel,
    LaurentPolynomial,
    Monomial,
    PerturbationParams,
    SolverConfig,
    cyclically_equal,
)
from branchknot.braids import reduced_burau
from branchknot.doublepoints import find_double_points, oracle_pairs
from branchknot.loop import parametrize_loop
from branchknot.pipeline import resolve_double_points
from branchknot.surface import eval_F, jacobian_F
from branchknot.trace import trace_braid

from conftest import TORUS_CASES, UNKNOT_ORDERS, torus_config


def test_criterion_1_unknot_regime(unknot_run):
    for n in UNKNOT_ORDERS:
        for regime, sign in (("lam", 1), ("mu", -1)):
            run = unknot_run(n, regime)
            res = run.result
            assert res.double_points == ()
            word = res.traced.word
            assert all(s == sign for _, s in word.letters)
            evens = tuple((k, sign) for k in range(2, n, 2))
            odds = tuple((k, sign) for k in range(1, n, 2))
            assert cyclically_equal(word, BraidWord(n, evens + odds))
            assert word.closure_components() == 1
            assert res.alexander == LaurentPolynomial.one()
            assert run.elapsed < 10.0, f"N={n} {regime}: {run.elapsed:.1f}s"


def test_criterion_2_torus_suite(torus_run):
    one = LaurentPolynomial.one()

    def closed_form(n, m):
        numer = (one - LaurentPolynomial.t(1)) * (one - LaurentPolynomial.t(n * m))
        denom = (one - LaurentPolynomial.t(n)) * (one - LaurentPolynomial.t(m))
        return numer.divide_exact(denom).normalize_unit()

    for n, m in TORUS_CASES:
        run = torus_run(n, m)
        res = run.result
        expected_count = (n - 1) * (m - 1) // 2

        # (a) count, signs, and root positions against the companion matrix
        assert len(res.double_points) == expected_count
        assert all(dp.sign == 1 for dp in res.double_points)
        cfg = torus_config(n, m)
        dps = find_double_points(cfg.model, cfg.params, cfg.solver, strict=False)
        want = oracle_pairs(cfg.model, cfg.params, cfg.solver)
        assert len(dps) == len(want) == expected_count
        for dp, (k, w) in zip(dps, want):
            assert dp.pairing.k == k
            assert abs(dp.w1 - w) < 1e-8

        # (b) exponent sum
        assert res.exponent_sum == m * (n - 1)

        # (c) Alexander polynomial, exact integer coefficients
        assert res.alexander == closed_form(n, m)

        # (d) genus of the banded surface
        assert res.genus == expected_count

        assert run.elapsed < 60.0, f"({n},{m}): {run.elapsed:.1f}s"


def test_criterion_3_writhe_identity(all_runs):
    for label, run in all_runs:
        res = run.result
        n = res.traced.strand_count
        eps_total = sum(eps for _, _, eps in res.band.bands)
        assert res.exponent_sum == res.band.sign * (n - 1) + 2 * eps_total, label


def test_criterion_4_detour_crossings(all_runs):
    checked = 0
    for label, run in all_runs:
        res = run.result
        for det in res.loop.detours:
            dp_sign = res.double_points[det.dp_index].sign
            events = [e for e in res.traced.events if e.detour == det.index]
            rings = [e for e in events if e.provenance == "detour"]
            assert len(rings) == 2, label
            assert all(e.sign == dp_sign for e in rings), label
            outs = [e for e in events if e.provenance == "tube_out"]
            ins = [e for e in events if e.provenance == "tube_in"]
            assert [(e.k, e.sign) for e in ins] == [
                (e.k, -e.sign) for e in reversed(outs)
            ], label
            checked += 1
    assert checked == sum((n - 1) * (m - 1) // 2 for n, m in TORUS_CASES)


def test_criterion_5_monodromy(all_runs):
    for label, run in all_runs:
        traced = run.result.traced
        n = traced.strand_count
        tau = traced.root_monodromy
        assert sorted(tau) == list(range(n)), label
        j, length = 0, 0
        while length == 0 or j != 0:
            j = tau[j]
            length += 1
        assert length == n, f"{label}: monodromy is not a single {n}-cycle"
        pos0 = [0] * n
        for i, root in enumerate(traced.start_order):
            pos0[root] = i + 1
        perm = traced.word.permutation()
        for root in range(n):
            assert perm[pos0[root] - 1] == pos0[tau[root]], label


def test_criterion_6_oracle_equivalence_stress():
    rng = random.Random(20260823)

    def hausdorff(a, b):
        def dist(p, q):
            return abs(p[1] - q[1]) if p[0] == q[0] else float("inf")

        if not a or not b:
            return 0.0 if a == b else float("inf")
        return max(
            max(min(dist(p, q) for q in b) for p in a),
            max(min(dist(p, q) for p in a) for q in b),
        )

    for draw in range(20):
        n = (2, 3, 4, 5)[draw % 4]
        terms = tuple(
            Monomial(complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)), a, 0)
            for a in range(n + 1, n + 5)
        )
        model = BranchedDiskModel(branch_order=n, terms=terms)
        params = PerturbationParams(lam=0.1)
        cfg = SolverConfig()
        dps = find_double_points(model, params, cfg, strict=False)
        got = [(dp.pairing.k, dp.w1) for dp in dps]
        assert hausdorff(got, oracle_pairs(model, params, cfg)) < 1e-8, f"draw {draw}"
        _, report, _, retries = resolve_double_points(model, params, cfg)
        assert report.passed and retries <= 7, f"draw {draw}"


def test_criterion_7_invariant_suites(all_runs):
    # Alexander symmetry on every knot closure produced.
    for label, run in all_runs:
        res = run.result
        assert res.is_knot, label
        assert res.alexander is not None and res.alexander.is_symmetric(), label

    # Burau is a homomorphism: 200 random word pairs.
    rng = random.Random(4051)

    def random_word(n):
        return BraidWord(
            n,
            tuple(
                (rng.randint(1, n - 1), rng.choice((-1, 1)))
                for _ in range(rng.randint(1, 8))
            ),
        )

    def mat_mul(a, b):
        size = len(a)
        return [
            [
                sum(
                    (a[i][k] * b[k][j] for k in range(size)),
                    LaurentPolynomial.zero(),
                )
                for j in range(size)
            ]
            for i in range(size)
        ]

    for _ in range(200):
        n = rng.randint(2, 5)
        a, b = random_word(n), random_word(n)
        assert mat_mul(reduced_burau(a), reduced_burau(b)) == reduced_burau(a * b)

    # Jacobian against central differences at 100 random points.
    model = BranchedDiskModel(
        branch_order=2,
        terms=(Monomial(0.35 - 0.2j, 3, 1), Monomial(-0.15 + 0.3j, 4, 0)),
    )
    params = PerturbationParams(lam=0.1, mu=0.03j, gamma=5e-4 - 2e-4j)

    def as_vec(p):
        return np.array([p.z1.real, p.z1.imag, p.z2.real, p.z2.imag])

    for _ in range(100):
        w = rng.uniform(0.05, 0.85) * np.exp(2j * np.pi * rng.random())
        eps = 1e-7
        jac = jacobian_F(model, params, w)
        fd = np.column_stack([
            (as_vec(eval_F(model, params, w + d)) - as_vec(eval_F(model, params, w - d)))
            / (2 * eps)
            for d in (eps, 1j * eps)
        ])
        rel = np.linalg.norm(fd - jac) / max(np.linalg.norm(jac), 1.0)
        assert rel < 1e-6, f"w={w}"

    # Trace stability: half tolerances, double steps, identical words.
    for label, run in all_runs:
        res = run.result
        path = parametrize_loop(res.loop)
        retraced = trace_braid(
            res.config.model, res.params_used, path, res.config.trace.halved()
        )
        assert retraced.word.letters == res.traced.word.letters, label
