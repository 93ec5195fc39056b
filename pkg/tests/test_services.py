from fractions import Fraction

import pytest

from stratmorse.cwx import CwxDocument, load_fixture, parse
from stratmorse.errors import InputError, PreconditionError
from stratmorse.services import MorseService, render


def test_validate_report(disc):
    """Test the validate report on the solid triangle"""
    report = MorseService.validate(disc)

    assert report.status == "ok"
    assert report.lines[0] == "cells 7 dimension 2 euler 1"
    assert report.lines[-1] == "verdict pass"


def test_strata_report(disc):
    report = MorseService.strata(disc)

    assert report.lines == [
        "stratum 0:a level 0 cells a ab b bc c ca",
        "stratum 1:F level 1 cells F",
        "order 0:a < 1:F",
        "frontier pass",
    ]
    assert report.exit_code == 0


def test_strata_report_names_frontier_violation(square_frontier_fail):
    report = MorseService.strata(square_frontier_fail)

    assert report.status == "failed"
    assert "frontier-violation cell e1 stratum 0:a missing c d e2 e3 e4" in report.lines
    assert report.exit_code == 1


def test_stratification_defaults_to_skeletal(hollow_triangle):
    strat = MorseService.stratification(hollow_triangle)

    assert len(strat.strata) == 6


def test_halo_report(fig1):
    report = MorseService.halo(fig1, "e1")

    assert report.lines == [
        "cell e1 value 1",
        "halo v",
        "augmented e1 v",
        "shadow w1",
    ]


def test_values_are_required(square_frontier_fail):
    with pytest.raises(InputError, match="no value lines"):
        MorseService.halo(square_frontier_fail, "a")


def test_check_morse_statuses(disc, disc_bad):
    assert MorseService.check_morse(disc).status == "ok"

    bad = MorseService.check_morse(disc_bad)
    assert bad.status == "failed"
    assert any(line.startswith("  failure halo-membership") for line in bad.lines)

    assert MorseService.check_morse(disc, budget=0).exit_code == 3


def test_check_morse_tiebreak_prints_the_new_values(disc):
    tied = CwxDocument(complex=disc.complex, levels=disc.levels, values=dict(disc.values, b=Fraction(0)))

    with pytest.raises(InputError, match="share"):
        MorseService.check_morse(tied)

    report = MorseService.check_morse(tied, tiebreak=True)
    assert report.lines[0] == "value F 2.5"
    assert "value b 0.1" in report.lines


def test_sweep_report(disc):
    report = MorseService.sweep(disc)

    assert "event ca value 1.5 window 1.25 1.75 regular-collapse" in report.lines
    assert "  certificate (ca,c)" in report.lines
    assert report.lines[-1] == "summary attachments dim0=2 dim2=1 collapses 1 violations 0"
    assert report.status == "ok"


def test_delta_report(fig1):
    report = MorseService.delta(fig1, "0.95", "1.5")

    assert report.lines == ["interval 0.95 1.5", "delta e1 v"]
    with pytest.raises(InputError):
        MorseService.delta(fig1, "one", "2")


def test_subdivide_report(fig1):
    report = MorseService.subdivide(fig1)

    produced = parse("\n".join(report.lines))
    stored = load_fixture("fig1_sd")
    assert produced.complex == stored.complex
    assert produced.values == stored.values
    assert produced.levels == stored.levels


def test_lowerlink_report(fig1):
    report = MorseService.lowerlink(fig1, "v")

    assert report.lines == [
        "cell v value 3",
        "simplex [e1] value 1",
        "simplex [e2] value 2",
        "horizontal -",
        "vertical [e1] [e2]",
    ]


def test_theorem_c_report(fig1, disc):
    report = MorseService.theorem_c(fig1, "v")
    assert report.status == "ok"
    assert "H -" in report.lines
    assert "V [e1] [e2]" in report.lines

    with pytest.raises(PreconditionError):
        MorseService.theorem_c(disc, "ca")

    pushout = MorseService.theorem_c(disc, "ca", pushout_only=True)
    assert pushout.lines[1] == "lower-link [a]"
    assert pushout.status == "ok"


def test_conley_report(disc, cyclic_mvf):
    report = MorseService.conley(disc)

    assert "multivector 0:a index betti [1, 1] torsion [[], []]" in report.lines
    assert "ordering 0:a 1:F" in report.lines
    assert "total-ranks [1, 1, 1] euler 1" in report.lines

    cyclic = MorseService.conley(cyclic_mvf)
    assert cyclic.status == "failed"
    assert cyclic.lines[-1].startswith("cycle ")


def test_homology_report(disc):
    absolute = MorseService.homology(disc)
    assert absolute.lines == [
        "relative-to -",
        "H0 rank 1 torsion []",
        "H1 rank 0 torsion []",
        "H2 rank 0 torsion []",
    ]

    relative = MorseService.homology(disc, ["ab"])
    assert relative.lines[0] == "relative-to a ab b"
    assert relative.data["homology"].is_zero


def test_render_modes(disc):
    report = MorseService.strata(disc)

    assert render(report).splitlines() == report.lines
    tree = render(report, json_like=True).splitlines()
    assert tree[:3] == ["command: strata", "status: ok", "data:"]
    assert any(line.strip() == "id: 1:F" for line in tree)
