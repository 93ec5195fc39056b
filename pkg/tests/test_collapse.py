import random

import pytest

from stratmorse.collapse import find_collapse, free_face_pairs, replay, restrict_certificate
from stratmorse.complex import closure, complex_from_facets
from stratmorse.errors import InputError, InvalidPair
from stratmorse.homology import cw_relative_homology
from stratmorse.models import CollapseCertificate, FreeFacePair
from stratmorse.morse import halo, validate_sdmf
from stratmorse.stratification import check_frontier, compute_strata, trivial_levels
from tests.conftest import monotone_random_levels, random_complex, random_forman_values


def test_free_face_pairs_of_solid_triangle(solid_triangle):
    pairs = free_face_pairs(solid_triangle, solid_triangle.all_cells)

    assert [(p.sigma, p.tau) for p in pairs] == [
        ("a.b.c", "a.b"), ("a.b.c", "a.c"), ("a.b.c", "b.c"),
    ]


def test_free_face_pairs_of_hollow_triangle(hollow_triangle):
    pairs = free_face_pairs(hollow_triangle.complex, hollow_triangle.complex.all_cells)

    assert pairs == []


def test_free_face_pairs_need_a_subcomplex(disc):
    with pytest.raises(InputError):
        free_face_pairs(disc.complex, {"F"})


def test_solid_triangle_collapses_to_a_vertex(solid_triangle):
    outcome = find_collapse(solid_triangle, solid_triangle.all_cells, {"a"})

    assert outcome.status == "collapse"
    assert len(outcome.certificate.pairs) == 3
    assert replay(solid_triangle, solid_triangle.all_cells, outcome.certificate) == {"a"}


def test_hollow_triangle_does_not_collapse(hollow_triangle):
    c = hollow_triangle.complex

    outcome = find_collapse(c, c.all_cells, {"a"})

    assert outcome.status == "no-collapse"


def test_odd_difference_is_rejected_immediately(solid_triangle):
    outcome = find_collapse(solid_triangle, solid_triangle.all_cells, {"a", "b"})

    assert outcome.status == "no-collapse"
    assert outcome.nodes == 0


def test_budget_exhaustion_is_not_a_no():
    tetra = complex_from_facets([["a", "b", "c", "d"]])

    outcome = find_collapse(tetra, tetra.all_cells, {"a"}, budget=1)

    assert outcome.status == "budget-exhausted"
    assert outcome.certificate is None


def test_filtered_collapse_stays_inside_strata(disc):
    c = disc.complex
    strat = compute_strata(c, disc.levels)

    # F is alone in its stratum, so nothing can be paired with it
    outcome = find_collapse(c, c.all_cells, closure(c, {"ab", "bc"}), strat=strat)
    assert outcome.status == "no-collapse"

    one_level = compute_strata(c, trivial_levels(c))
    outcome = find_collapse(c, c.all_cells, closure(c, {"ab", "bc"}), strat=one_level)
    assert outcome.status == "collapse"
    assert outcome.certificate.filtered


def test_replay_rejects_a_pair_that_is_not_free(disc):
    c = disc.complex
    cert = CollapseCertificate(pairs=[FreeFacePair(sigma="ab", tau="a")])

    with pytest.raises(InvalidPair) as exc_info:
        replay(c, c.all_cells, cert)

    assert exc_info.value.index == 0
    assert "cofaces" in exc_info.value.reason


def test_replay_rejects_missing_and_non_facet_pairs(disc):
    c = disc.complex
    twice = CollapseCertificate(pairs=[
        FreeFacePair(sigma="F", tau="ab"), FreeFacePair(sigma="F", tau="bc"),
    ])
    with pytest.raises(InvalidPair, match="pair 1"):
        replay(c, c.all_cells, twice)

    skip = CollapseCertificate(pairs=[FreeFacePair(sigma="F", tau="a")])
    with pytest.raises(InvalidPair, match="codimension-one"):
        replay(c, c.all_cells, skip)


def test_replay_rejects_cross_stratum_pair_when_filtered(disc):
    c = disc.complex
    strat = compute_strata(c, disc.levels)
    cert = CollapseCertificate(pairs=[FreeFacePair(sigma="F", tau="ab")], filtered=True)

    with pytest.raises(InvalidPair, match="strata"):
        replay(c, c.all_cells, cert, strat)


def test_restrict_certificate_drops_higher_levels(disc):
    strat = compute_strata(disc.complex, disc.levels)
    cert = CollapseCertificate(pairs=[
        FreeFacePair(sigma="F", tau="ab"), FreeFacePair(sigma="ca", tau="c"),
    ])

    restricted = restrict_certificate(cert, strat, 0)

    assert [(p.sigma, p.tau) for p in restricted.pairs] == [("ca", "c")]


def test_certified_collapses_have_trivial_relative_homology(random_instances):
    checked = 0
    for c, _ in random_instances(60, max_cells=12, seed=3):
        vertex = min(cell for cell in c.cells if c.cells[cell] == 0)
        outcome = find_collapse(c, c.all_cells, {vertex})
        if outcome.status != "collapse":
            continue
        assert (len(c.cells) - 1) % 2 == 0
        assert cw_relative_homology(c, c.all_cells, {vertex}).is_zero
        checked += 1
    assert checked > 0


def test_restricted_certificates_replay_inside_each_level():
    rng = random.Random(61)
    checked = 0
    for _ in range(60):
        c = random_complex(rng, max_cells=20)
        f = random_forman_values(rng, c)
        strat = compute_strata(c, monotone_random_levels(rng, c))
        if not check_frontier(c, strat).ok:
            continue

        report = validate_sdmf(c, strat, f)
        for record in report.records:
            if record.certificate is None:
                continue
            source = c.faces(record.cell)
            shadow = halo(c, f, record.cell).shadow
            for level in range(3):
                inside = {cell for cell in c.cells if strat.levels[cell] <= level}
                restricted = restrict_certificate(record.certificate, strat, level)
                assert replay(c, source & inside, restricted, strat) == shadow & inside
            checked += 1
    assert checked > 0
