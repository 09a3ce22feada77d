"""Crossing locus sampling, triple coincidences, and path intersections."""

import math

import numpy as np
import pytest

from branchknot import (
    BranchedDiskModel,
    Monomial,
    PerturbationParams,
    SolverConfig,
    find_triple_coincidences,
    lift_fiber,
    sample_locus,
)
from branchknot.locus import coincidence_value, path_locus_intersections
from branchknot.loop import circle_locus_hits

TREFOIL = BranchedDiskModel(branch_order=2, terms=(Monomial(1.0, 3, 0),))
LAM = PerturbationParams(lam=0.1)


def test_coincidence_value_zero_on_known_locus():
    # For the trefoil model the k=1 coincidence equation in the w-plane is
    # Re(2 w^3 + 0.2 w) = 0, satisfied on the imaginary axis.
    for t in (0.1, 0.2, 0.3):
        assert coincidence_value(TREFOIL, LAM, 1, 1j * t) == pytest.approx(0.0, abs=1e-15)
    assert abs(coincidence_value(TREFOIL, LAM, 1, 0.3 + 0j)) > 1e-3


def test_two_sheets_have_no_triples():
    assert find_triple_coincidences(TREFOIL, LAM, SolverConfig()) == []


def test_triple_coincidences_of_the_unperturbed_34_case():
    # h = w^4 over three sheets with gamma = 0: the cube roots of -lam are
    # honest triple coincidences, all mapping to the same base point.
    model = BranchedDiskModel(branch_order=3, terms=(Monomial(1.0, 4, 0),))
    triples = find_triple_coincidences(model, LAM, SolverConfig())
    assert len(triples) == 3
    for t in triples:
        assert t.w ** 3 == pytest.approx(-0.1, abs=1e-8)
        assert abs(t.image_z - triples[0].image_z) < 1e-8
    # A small quadratic offset only moves these height coincidences; what it
    # removes is the full four-coordinate collision (see the genericity
    # tests), so the count stays at three.
    gamma = PerturbationParams(lam=0.1, gamma=0.001)
    split = find_triple_coincidences(model, gamma, SolverConfig())
    assert len(split) == 3
    for t in split:
        assert min(abs(t.image_z - u.image_z) for u in triples) < 0.01


def test_sample_locus_follows_the_zero_set():
    # Polylines live in the base plane; lift each vertex and check the
    # height difference of the paired sheets nearly vanishes there.
    sample = sample_locus(TREFOIL, LAM, 1, resolution=96, cfg=SolverConfig())
    assert sample.polylines
    count = 0
    for line in sample.polylines:
        for z in line:
            if abs(z) < 1e-6:
                continue  # the branch point itself is on every sheet
            ws = lift_fiber(complex(z), 2)
            residual = min(abs(coincidence_value(TREFOIL, LAM, 1, w)) for w in ws)
            assert residual < 2e-3
            count += 1
    assert count > 50


def test_circle_hits_match_path_intersections():
    # Cross a circle against the locus twice: once with the dedicated circle
    # solver, once by tracking one lift along the parametrized path.
    rho = 0.04
    hits = circle_locus_hits(TREFOIL, LAM, 0.0, rho, samples=720)
    assert len(hits) == 3

    def path(theta):
        return rho * complex(math.cos(theta), math.sin(theta))

    lift0 = lift_fiber(path(0.0), 2)[0]
    crossings = path_locus_intersections(
        TREFOIL, LAM, path, (0.0, 2 * math.pi), lift0, 1, samples=1024
    )
    got = sorted(c.theta % (2 * math.pi) for c in crossings)
    want = sorted(h.angle for h in hits)
    assert len(got) == len(want)
    for a, b in zip(got, want):
        assert a == pytest.approx(b, abs=1e-6)
