import random

import pytest

from stratmorse.complex import closure, complex_from_facets, euler_characteristic
from stratmorse.errors import InputError
from stratmorse.homology import (
    chain_complex_of_pair,
    cw_relative_homology,
    relative_homology,
    smith_normal_form,
)
from stratmorse.subdivision import barycentric_subdivide, restrict_subdivision
from tests.conftest import random_complex

# six-vertex triangulation of the real projective plane
PROJECTIVE_PLANE = [
    ["v1", "v2", "v3"], ["v1", "v3", "v4"], ["v1", "v4", "v5"], ["v1", "v5", "v6"],
    ["v1", "v2", "v6"], ["v2", "v3", "v5"], ["v2", "v4", "v5"], ["v2", "v4", "v6"],
    ["v3", "v4", "v6"], ["v3", "v5", "v6"],
]


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[1, 0], [0, 1]], [1, 1]),
        ([[2]], [2]),
        ([[2, 4], [6, 8]], [2, 4]),
        ([[0, 0], [0, 0]], []),
        ([[-3, 0, 0]], [3]),
    ],
)
def test_smith_normal_form(rows, expected):
    assert smith_normal_form(rows) == expected


def test_point_and_solid_triangle(solid_triangle):
    point = complex_from_facets([["p"]])

    assert cw_relative_homology(point, point.all_cells).betti == [1]
    assert cw_relative_homology(solid_triangle, solid_triangle.all_cells).betti == [1, 0, 0]


def test_hollow_triangle_is_a_circle(hollow_triangle):
    c = hollow_triangle.complex

    h = cw_relative_homology(c, c.all_cells)

    assert h.betti == [1, 1]
    assert h.torsion == [[], []]


def test_interval_relative_to_its_endpoints():
    edge = complex_from_facets([["a", "b"]])

    h = cw_relative_homology(edge, edge.all_cells, {"a", "b"})

    assert h.betti == [0, 1]


def test_disc_relative_to_its_boundary(disc):
    c = disc.complex

    h = cw_relative_homology(c, c.all_cells, {"a", "b", "c", "ab", "bc", "ca"})

    assert h.betti == [0, 0, 1]


def test_pair_with_itself_is_zero(disc):
    c = disc.complex

    assert cw_relative_homology(c, c.all_cells, c.all_cells).is_zero


def test_projective_plane_has_two_torsion():
    rp2 = complex_from_facets(PROJECTIVE_PLANE)

    h = cw_relative_homology(rp2, rp2.all_cells)

    assert h.betti == [1, 0, 0]
    assert h.torsion == [[], [2], []]


def test_pair_must_be_subcomplexes(disc):
    c = disc.complex

    with pytest.raises(InputError, match="subcomplexes"):
        cw_relative_homology(c, c.all_cells, {"ab"})
    with pytest.raises(InputError, match="small"):
        cw_relative_homology(c, {"a"}, {"b"})


def test_boundary_of_boundary_vanishes(solid_triangle):
    sd = barycentric_subdivide(solid_triangle)

    boundaries = chain_complex_of_pair(sd, sd.simplices)

    assert len(boundaries) == 3
    assert boundaries[0].shape == (0, 7)
    assert (boundaries[1] * boundaries[2]).to_Matrix().is_zero_matrix


def test_relative_homology_on_subdivision_chains(disc):
    sd = barycentric_subdivide(disc.complex)
    circle = restrict_subdivision(sd, {"a", "b", "c", "ab", "bc", "ca"})

    assert relative_homology(sd, circle).betti == [1, 1]
    with pytest.raises(InputError, match="not a subcomplex"):
        relative_homology(sd, {("a", "ab")})


def test_euler_characteristic_of_random_pairs():
    rng = random.Random(53)
    for _ in range(40):
        c = random_complex(rng, max_cells=20)
        cells = sorted(c.cells)
        small = closure(c, rng.sample(cells, rng.randint(0, min(3, len(cells)))))

        absolute = cw_relative_homology(c, c.all_cells)
        relative = cw_relative_homology(c, c.all_cells, small)

        assert absolute.euler() == euler_characteristic(c)
        inside = sum((-1) ** c.cells[cell] for cell in small)
        assert relative.euler() == euler_characteristic(c) - inside
