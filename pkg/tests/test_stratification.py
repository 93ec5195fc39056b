import random

import pytest

from stratmorse.complex import closure, complex_from_facets
from stratmorse.errors import InputError, PreconditionError, StratificationError
from stratmorse.stratification import (
    check_convexity,
    check_frontier,
    check_stratum_frontier,
    compute_strata,
    induced_stratification,
    skeletal_levels,
    stratum_order,
    trivial_levels,
)
from tests.conftest import connected_subsets, monotone_random_levels, random_complex


def test_skeletal_levels_give_singleton_strata(fig1):
    c = fig1.complex
    strat = compute_strata(c, skeletal_levels(c))

    assert len(strat.strata) == len(c.cells)
    assert all(len(s.cells) == 1 for s in strat.strata)
    assert check_frontier(c, strat).ok


def test_disc_has_two_strata(disc):
    strat = compute_strata(disc.complex, disc.levels)

    assert [(s.id, s.level, sorted(s.cells)) for s in strat.strata] == [
        ("0:a", 0, ["a", "ab", "b", "bc", "c", "ca"]),
        ("1:F", 1, ["F"]),
    ]
    assert strat.cell_to_stratum["ca"] == "0:a"


def test_trivial_levels_on_connected_complex_give_one_stratum(disc):
    strat = compute_strata(disc.complex, trivial_levels(disc.complex))

    assert len(strat.strata) == 1
    assert stratum_order(disc.complex, strat).relation == {("0:F", "0:F")}


def test_non_monotone_levels_name_a_covering_pair(disc):
    levels = dict(disc.levels, a=2)

    with pytest.raises(StratificationError) as exc_info:
        compute_strata(disc.complex, levels)

    parent, child = exc_info.value.witness
    assert child == "a"
    assert parent in {"ab", "ca"}


def test_missing_level_is_an_input_error(disc):
    levels = dict(disc.levels)
    del levels["F"]

    with pytest.raises(InputError, match="no level"):
        compute_strata(disc.complex, levels)


def test_disc_frontier_and_order(disc):
    c = disc.complex
    strat = compute_strata(c, disc.levels)

    assert check_frontier(c, strat).ok
    order = stratum_order(c, strat)
    assert order.less("0:a", "1:F")
    assert not order.leq("1:F", "0:a")


def test_square_fails_frontier_but_stays_convex(square_frontier_fail):
    c = square_frontier_fail.complex
    strat = compute_strata(c, square_frontier_fail.levels)

    assert [sorted(s.cells) for s in strat.strata] == [
        ["a", "b", "c", "d", "e2", "e3", "e4"],
        ["e1"],
    ]
    report = check_frontier(c, strat)
    assert not report.ok
    assert report.violations[0].cell == "e1"
    assert report.violations[0].missing == ["c", "d", "e2", "e3", "e4"]
    assert check_convexity(c, strat).ok

    with pytest.raises(PreconditionError):
        stratum_order(c, strat)


def test_skeletal_order_is_face_order(fig1):
    c = fig1.complex
    strat = compute_strata(c, skeletal_levels(c))
    order = stratum_order(c, strat)

    for lower, upper in order.relation:
        (low_cell,) = strat.stratum(lower).cells
        (high_cell,) = strat.stratum(upper).cells
        assert c.leq(low_cell, high_cell)
    assert order.less("0:v", "1:e1")
    assert not order.leq("0:w1", "1:e2")


def test_induced_stratification(fig1, disc):
    c = fig1.complex
    skeletal = compute_strata(c, skeletal_levels(c))
    local = induced_stratification(c, skeletal, closure(c, {"e1"}))
    assert sorted(sorted(s.cells) for s in local.strata) == [["e1"], ["v"], ["w1"]]

    strat = compute_strata(disc.complex, disc.levels)
    circle = {"a", "b", "c", "ab", "bc", "ca"}
    assert len(induced_stratification(disc.complex, strat, circle).strata) == 1

    same = induced_stratification(disc.complex, strat, disc.complex.all_cells)
    assert same.strata == strat.strata

    with pytest.raises(InputError):
        induced_stratification(disc.complex, strat, {"ab"})


def test_stratum_level_form_is_weaker_than_singleton_form():
    # two triangles sharing an edge; the shared edge and both 2-cells form one stratum
    c = complex_from_facets([["x", "y", "z"], ["w", "y", "z"]])
    levels = {cell: 0 for cell in c.cells}
    levels.update({"x.y.z": 1, "w.y.z": 1, "y.z": 1})
    strat = compute_strata(c, levels)

    assert check_stratum_frontier(c, strat).ok
    assert not check_frontier(c, strat).ok


def _brute_force_frontier(c, strat) -> bool:
    by_level: dict[int, set[str]] = {}
    for cell, level in strat.levels.items():
        by_level.setdefault(level, set()).add(cell)
    for level, cells in by_level.items():
        for s in connected_subsets(c, cells):
            cl = closure(c, s)
            for t in strat.strata:
                if t.level != level and t.cells & cl and not t.cells <= cl:
                    return False
    return True


def test_singleton_frontier_agrees_with_brute_force():
    rng = random.Random(11)
    checked = 0
    while checked < 60:
        c = random_complex(rng, max_cells=12)
        if len(c.cells) > 12:
            continue
        strat = compute_strata(c, monotone_random_levels(rng, c))
        assert check_frontier(c, strat).ok == _brute_force_frontier(c, strat)
        checked += 1


def test_frontier_valid_strata_are_convex_and_partially_ordered():
    rng = random.Random(5)
    for _ in range(80):
        c = random_complex(rng, max_cells=20)
        strat = compute_strata(c, monotone_random_levels(rng, c))
        if not check_frontier(c, strat).ok:
            continue
        assert check_convexity(c, strat).ok
        relation = stratum_order(c, strat).relation
        for a, b in relation:
            for b2, d in relation:
                if b == b2:
                    assert (a, d) in relation
