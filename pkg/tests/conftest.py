import random
from fractions import Fraction
from importlib import resources
from itertools import combinations
from unittest.mock import patch

import pytest

from stratmorse.complex import Complex, complex_from_facets, connected_components
from stratmorse.cwx import FIXTURE_PACKAGE, load_fixture
from stratmorse.stratification import compute_strata, skeletal_levels


@pytest.fixture
def fig1():
    return load_fixture("fig1")


@pytest.fixture
def disc():
    return load_fixture("disc")


@pytest.fixture
def disc_ca5():
    return load_fixture("disc_ca5")


@pytest.fixture
def disc_bad():
    return load_fixture("disc_bad")


@pytest.fixture
def hollow_triangle():
    return load_fixture("hollow_triangle")


@pytest.fixture
def square_frontier_fail():
    return load_fixture("square_frontier_fail")


@pytest.fixture
def cyclic_mvf():
    return load_fixture("cyclic_mvf")


@pytest.fixture
def solid_triangle():
    """The solid triangle as a simplicial complex (cells a, b, c, a.b, a.c, b.c, a.b.c)"""
    return complex_from_facets([["a", "b", "c"]])


def random_complex(rng: random.Random, max_cells: int = 30) -> Complex:
    """Random simplicial complex on up to six vertices, trimmed to max_cells"""
    vertices = [f"v{i}" for i in range(rng.randint(2, 6))]
    facets: list[tuple[str, ...]] = []
    cells = 0
    for _ in range(rng.randint(1, 6)):
        size = rng.randint(1, min(4, len(vertices)))
        facet = tuple(sorted(rng.sample(vertices, size)))
        extra = 2 ** size - 1
        if cells + extra > max_cells:
            break
        facets.append(facet)
        cells += extra
    if not facets:
        facets.append((vertices[0],))
    c = complex_from_facets(facets)
    if len(c.cells) > max_cells:
        return complex_from_facets(facets[:1])
    return c


def random_values(rng: random.Random, c: Complex) -> dict[str, Fraction]:
    """Random injective rationals with finite decimal expansions"""
    numerators = rng.sample(range(1, 10 * len(c.cells) + 10), len(c.cells))
    return {cell: Fraction(n, 10) for cell, n in zip(sorted(c.cells), numerators)}


def random_forman_values(rng: random.Random, c: Complex, pairs: int = 3) -> dict[str, Fraction]:
    """Injective values whose gradient pairs are a few disjoint codimension-one pairs.

    Cells start at 10·dim plus a jitter drawn without replacement per
    dimension. A chosen σ is lowered just below its highest-valued facet τ;
    τ and σ are then blocked for further pairs, and so are the other
    cofaces of τ.
    """
    by_dim: dict[int, list[str]] = {}
    for cell in sorted(c.cells):
        by_dim.setdefault(c.cells[cell], []).append(cell)
    f: dict[str, Fraction] = {}
    for dim, cells in sorted(by_dim.items()):
        jitters = rng.sample(range(1, 900), len(cells))
        f.update({cell: Fraction(10 * dim) + Fraction(j, 1000) for cell, j in zip(cells, jitters)})
    used: set[str] = set()
    candidates = sorted(cell for cell in c.cells if c.cells[cell] > 0)
    rng.shuffle(candidates)
    for sigma in candidates:
        if pairs == 0:
            break
        facets = sorted(c.boundary(sigma), key=lambda cell: f[cell])
        tau = facets[-1]
        blocked = {sigma, tau} | c.coboundary(tau)
        if blocked & used:
            continue
        second = f[facets[-2]] if len(facets) > 1 else f[tau] - 1
        lowered = f[tau] - (f[tau] - second) / 2
        if lowered in f.values():
            continue
        f[sigma] = lowered
        used |= blocked
        pairs -= 1
    return f


def monotone_random_levels(rng: random.Random, c: Complex) -> dict[str, int]:
    levels: dict[str, int] = {}
    for cell in sorted(c.cells, key=lambda x: (c.cells[x], x)):
        below = max((levels[face] for face in c.boundary(cell)), default=0)
        levels[cell] = max(below, rng.randint(0, 2))
    return levels


def connected_subsets(c: Complex, cells):
    """Every nonempty zigzag-connected subset of cells (exponential; tests only)"""
    cells = sorted(cells)
    for size in range(1, len(cells) + 1):
        for subset in combinations(cells, size):
            if len(connected_components(c, subset)) == 1:
                yield frozenset(subset)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def random_instances():
    """Seeded (complex, values) pairs; the count is the first argument"""

    def factory(count: int, max_cells: int = 30, seed: int = 7):
        local = random.Random(seed)
        for _ in range(count):
            c = random_complex(local, max_cells)
            yield c, random_values(local, c)

    return factory


@pytest.fixture
def skeletal():
    def factory(c: Complex):
        return compute_strata(c, skeletal_levels(c))

    return factory


@pytest.fixture
def fixture_path():
    """Filesystem path of a shipped cwx fixture"""

    def factory(name: str) -> str:
        return str(resources.files(FIXTURE_PACKAGE).joinpath(f"{name}.cwx"))

    return factory


@pytest.fixture
def mock_service():
    """Mock MorseService as seen by the CLI"""
    with patch("stratmorse.main.MorseService") as mock:
        yield mock
