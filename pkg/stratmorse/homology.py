"""Integer homology of simplicial pairs inside a barycentric subdivision.

Homology of cell sets is always computed on the subdivision, never from
CW incidence numbers. A chain is its own vertex order, so deleting its
i-th entry contributes the sign (-1)^i.
"""
from __future__ import annotations

import logging
from typing import Iterable, Sequence, Union

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from stratmorse.complex import Complex, is_subcomplex
from stratmorse.errors import InputError, InvariantViolation
from stratmorse.models import Chain, GradedHomology
from stratmorse.subdivision import SdComplex, enumerate_chains
from stratmorse.utils import chain_token

logger = logging.getLogger(__name__)

IntegerMatrix = DomainMatrix


def _check_face_closed(simplices: frozenset[Chain], label: str) -> None:
    for chain in simplices:
        for i in range(len(chain)):
            face = chain[:i] + chain[i + 1:]
            if face and face not in simplices:
                raise InputError(f"{label} is not a subcomplex: {chain_token(face)} is missing")


def integer_matrix(rows: Sequence[Sequence[int]], shape: tuple[int, int]) -> IntegerMatrix:
    return DomainMatrix([[ZZ(v) for v in row] for row in rows], shape, ZZ)


def chain_complex_of_pair(
    sd: SdComplex,
    big: Iterable[Chain],
    small: Iterable[Chain] = (),
) -> list[IntegerMatrix]:
    """Boundary matrices of C(big)/C(small); entry k is ∂_k : C_k → C_{k-1}.

    Entry 0 is the zero map out of C_0. Bases are the simplices of each
    degree sorted as tuples.
    """
    big, small = frozenset(big), frozenset(small)
    if not big <= sd.simplices:
        raise InputError("pair contains chains that are not simplices of the subdivision")
    if not small <= big:
        raise InputError("relative pair needs small ⊆ big")
    _check_face_closed(big, "big")
    _check_face_closed(small, "small")

    top = max((len(chain) - 1 for chain in big), default=0)
    basis: list[list[Chain]] = [[] for _ in range(top + 1)]
    for chain in sorted(big - small):
        basis[len(chain) - 1].append(chain)
    index = [{chain: i for i, chain in enumerate(cells)} for cells in basis]

    boundaries = [integer_matrix([], (0, len(basis[0])))]
    for k in range(1, top + 1):
        rows = [[0] * len(basis[k]) for _ in basis[k - 1]]
        for col, chain in enumerate(basis[k]):
            for i in range(len(chain)):
                face = chain[:i] + chain[i + 1:]
                row = index[k - 1].get(face)
                if row is not None:
                    rows[row][col] += (-1) ** i
        boundaries.append(integer_matrix(rows, (len(basis[k - 1]), len(basis[k]))))

    for k in range(1, top):
        lower, upper = boundaries[k], boundaries[k + 1]
        if 0 in lower.shape or 0 in upper.shape:
            continue
        if not (lower * upper).to_Matrix().is_zero_matrix:
            raise InvariantViolation(f"boundary of boundary is nonzero in degree {k + 1}")
    return boundaries


def smith_normal_form(m: Union[IntegerMatrix, Sequence[Sequence[int]]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix, in divisibility order"""
    if not isinstance(m, DomainMatrix):
        rows = [list(row) for row in m]
        m = integer_matrix(rows, (len(rows), len(rows[0]) if rows else 0))
    if 0 in m.shape:
        return []
    factors = [abs(int(v)) for v in invariant_factors(m)]
    return sorted(v for v in factors if v)


def relative_homology(
    sd: SdComplex,
    big: Iterable[Chain],
    small: Iterable[Chain] = (),
) -> GradedHomology:
    """H_k(big, small; ℤ) for k = 0..dim big"""
    big, small = frozenset(big), frozenset(small)
    boundaries = chain_complex_of_pair(sd, big, small)
    invariants = [smith_normal_form(d) for d in boundaries]
    sizes = [d.shape[1] for d in boundaries]

    betti, torsion = [], []
    for k in range(len(boundaries)):
        above = invariants[k + 1] if k + 1 < len(boundaries) else []
        betti.append(sizes[k] - len(invariants[k]) - len(above))
        torsion.append([v for v in above if v > 1])

    homology = GradedHomology(betti=betti, torsion=torsion)
    logger.debug("relative homology over %d chains: betti %s", len(big - small), betti)
    return homology


def cw_relative_homology(c: Complex, big: Iterable[str], small: Iterable[str] = ()) -> GradedHomology:
    """H_*(K, L; ℤ) for subcomplexes L ⊆ K of a CW complex, through Sd(K)"""
    big, small = frozenset(big), frozenset(small)
    if not (is_subcomplex(c, big) and is_subcomplex(c, small)):
        raise InputError("relative homology needs a pair of subcomplexes")
    if not small <= big:
        raise InputError("relative pair needs small ⊆ big")

    chains = enumerate_chains(c, big)
    sd = SdComplex(base=c, simplices=chains)
    return relative_homology(sd, chains, frozenset(x for x in chains if set(x) <= small))
