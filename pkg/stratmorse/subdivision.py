"""Barycentric subdivision, upper envelope, lower links and the H ⋆ V splitting.

A simplex of Sd(X) is a strictly ascending chain of cells, stored as a
tuple ordered by the face order of the base complex.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict

from stratmorse.complex import Complex, validate_complex
from stratmorse.config import settings
from stratmorse.errors import InputError, InvariantViolation, PreconditionError
from stratmorse.models import Chain, PushoutReport, Stratification, TheoremCReport
from stratmorse.morse import choose_epsilon, lower_star, upper_closure
from stratmorse.stratification import check_stratum_frontier, compute_strata, stratum_order
from stratmorse.utils import chain_token

logger = logging.getLogger(__name__)

ChainSet = frozenset[Chain]
EnvelopeMap = Mapping[Chain, Fraction]
LinkType = Literal["begin", "end", "middle"]


class SdComplex(BaseModel):
    """Sd(X) with its last-cell map and the stratification it inherits"""

    model_config = ConfigDict(frozen=True)

    base: Complex
    simplices: frozenset[Chain]
    stratification: Optional[Stratification] = None

    def last_cell(self, chain: Chain) -> str:
        return chain[-1]

    def inherited_level(self, chain: Chain) -> int:
        return self.stratification.levels[chain[-1]]

    def stratum_of(self, chain: Chain) -> str:
        """Sd(S) is identified with S through the last cell"""
        return self.stratification.cell_to_stratum[chain[-1]]

    def vertex(self, cell: str) -> Chain:
        self.base.require({cell})
        return (cell,)


def is_chain(c: Complex, chain: Iterable[str]) -> bool:
    chain = tuple(chain)
    return bool(chain) and all(c.less(a, b) for a, b in zip(chain, chain[1:]))


def canonical_chain(c: Complex, cells: Iterable[str]) -> Chain:
    """Sort cells by dimension; the result is a chain iff they are pairwise comparable"""
    return tuple(sorted(cells, key=lambda cell: (c.cells[cell], cell)))


def enumerate_chains(c: Complex, cells: Optional[Iterable[str]] = None) -> frozenset[Chain]:
    """Every strictly ascending chain of the face poset, or of the subposet on cells"""
    cells = c.all_cells if cells is None else frozenset(cells)
    c.require(cells)
    memo: dict[str, list[Chain]] = {}

    def starting_at(cell: str) -> list[Chain]:
        if cell not in memo:
            chains = [(cell,)]
            for upper in sorted((c.cofaces(cell) & cells) - {cell}):
                chains.extend((cell,) + tail for tail in starting_at(upper))
            memo[cell] = chains
        return memo[cell]

    return frozenset(chain for cell in cells for chain in starting_at(cell))


def as_complex(sd: SdComplex) -> Complex:
    """Sd(X) as a face poset on chain tokens"""
    cells = {chain_token(chain): len(chain) - 1 for chain in sd.simplices}
    covering = frozenset(
        (chain_token(chain), chain_token(chain[:i] + chain[i + 1:]))
        for chain in sd.simplices if len(chain) > 1
        for i in range(len(chain))
    )
    return Complex(cells=cells, covering=covering)


def barycentric_subdivide(
    c: Complex,
    strat: Optional[Stratification] = None,
    verify: Optional[bool] = None,
) -> SdComplex:
    """Materialise Sd(X); strata are carried over through the last-cell map"""
    if len(c.cells) > settings.subdivision_max_cells:
        raise InputError(
            f"refusing to subdivide {len(c.cells)} cells "
            f"(SUBDIVISION_MAX_CELLS={settings.subdivision_max_cells})"
        )
    sd = SdComplex(base=c, simplices=enumerate_chains(c), stratification=strat)
    logger.info("subdivided %d cells into %d simplices", len(c.cells), len(sd.simplices))

    verify = settings.verify_subdivision if verify is None else verify
    if verify:
        _verify_subdivision(sd)
    return sd


def _verify_subdivision(sd: SdComplex) -> None:
    sd_complex = as_complex(sd)
    report = validate_complex(sd_complex)
    if not report.ok:
        raise InvariantViolation(f"subdivision is not regular: {report.violations[0].detail}")
    if sd.stratification is None:
        return

    levels = {chain_token(chain): sd.inherited_level(chain) for chain in sd.simplices}
    inherited = compute_strata(sd_complex, levels)
    expected: dict[str, set[str]] = {}
    for chain in sd.simplices:
        expected.setdefault(sd.stratum_of(chain), set()).add(chain_token(chain))
    if sorted(map(sorted, expected.values())) != sorted(sorted(s.cells) for s in inherited.strata):
        raise InvariantViolation("inherited strata are not the strata of the subdivision")
    if not check_stratum_frontier(sd_complex, inherited).ok:
        raise InvariantViolation("inherited stratification fails the frontier axiom")


def restrict_subdivision(sd: SdComplex, cells: Iterable[str]) -> ChainSet:
    """Sd(K) for a subcomplex K: chains whose cells all lie in K"""
    cells = frozenset(cells)
    return frozenset(chain for chain in sd.simplices if set(chain) <= cells)


def upper_envelope(sd: SdComplex, f: Mapping[str, Fraction]) -> dict[Chain, Fraction]:
    """Û f(ξ) = max of f over the chain"""
    missing = sorted(set(sd.base.cells) - set(f))
    if missing:
        raise InputError(f"no value for cell(s): {', '.join(missing)}")

    env = {chain: max(f[cell] for cell in chain) for chain in sd.simplices}
    for chain in sd.simplices:
        for i in range(len(chain)):
            face = chain[:i] + chain[i + 1:]
            if face and env[face] > env[chain]:
                raise InvariantViolation(f"envelope decreases from {chain_token(face)} to {chain_token(chain)}")
    return env


def envelope_sublevel(
    sd: SdComplex,
    env: EnvelopeMap,
    threshold: Fraction,
    strict: bool = False,
) -> ChainSet:
    """Û f≤t (or Û f<t); always a subcomplex of Sd(X)"""
    if strict:
        level = frozenset(chain for chain in sd.simplices if env[chain] < threshold)
    else:
        level = frozenset(chain for chain in sd.simplices if env[chain] <= threshold)
    for chain in level:
        for i in range(len(chain)):
            face = chain[:i] + chain[i + 1:]
            if face and face not in level:
                raise InvariantViolation(f"sublevelset misses face {chain_token(face)}")
    return level


def link_type(sd: SdComplex, sigma: str, chain: Chain) -> Optional[LinkType]:
    """Where σ fits into the chain, or None if the chain is not in lk[σ]"""
    c = sd.base
    if sigma in chain or not all(c.comparable(sigma, cell) for cell in chain):
        return None
    if c.less(sigma, chain[0]):
        return "begin"
    if c.less(chain[-1], sigma):
        return "end"
    return "middle"


def link_of_vertex(sd: SdComplex, sigma: str) -> ChainSet:
    """lk[σ]: chains that σ can be inserted into"""
    sd.base.require({sigma})
    return frozenset(
        chain for chain in sd.simplices if link_type(sd, sigma, chain) is not None
    )


def lower_link(sd: SdComplex, env: EnvelopeMap, sigma: str) -> ChainSet:
    """lk[σ] ∩ Û f<f(σ)"""
    value = env[sd.vertex(sigma)]
    return frozenset(chain for chain in link_of_vertex(sd, sigma) if env[chain] < value)


def hv_split(sd: SdComplex, env: EnvelopeMap, sigma: str) -> tuple[ChainSet, ChainSet]:
    """Horizontal part (chains ending below σ) and vertical part (chains starting above σ)"""
    link = lower_link(sd, env, sigma)
    horizontal = frozenset(chain for chain in link if link_type(sd, sigma, chain) == "end")
    vertical = frozenset(chain for chain in link if link_type(sd, sigma, chain) == "begin")

    if horizontal & vertical:
        raise InvariantViolation(f"horizontal and vertical parts of [{sigma}] intersect")
    if join(sd, horizontal, vertical) != link:
        raise InvariantViolation(f"lower link of [{sigma}] is not the join of its H and V parts")
    return horizontal, vertical


def join(sd: SdComplex, k_part: Iterable[Chain], v_part: Iterable[Chain]) -> ChainSet:
    """K ⋆ L inside Sd(X): K, L and every union of a K-chain with an L-chain"""
    k_part, v_part = frozenset(k_part), frozenset(v_part)
    out = set(k_part) | set(v_part)
    for xi in k_part:
        for eta in v_part:
            merged = canonical_chain(sd.base, set(xi) | set(eta))
            if len(merged) != len(xi) + len(eta) or not is_chain(sd.base, merged):
                raise InputError(
                    f"{chain_token(xi)} and {chain_token(eta)} do not span a simplex"
                )
            out.add(merged)
    return frozenset(out)


def cone(sd: SdComplex, sigma: str, part: Iterable[Chain]) -> ChainSet:
    """[σ] ⋆ part"""
    return join(sd, {sd.vertex(sigma)}, part)


def _window(sd: SdComplex, env: EnvelopeMap, sigma: str):
    sd.base.require({sigma})
    values = {cell: env[(cell,)] for cell in sd.base.cells}
    value = values[sigma]
    eps = choose_epsilon(values, value)
    below = envelope_sublevel(sd, env, value - eps)
    above = envelope_sublevel(sd, env, value + eps)
    return values, eps, below, above


def pushout_check(sd: SdComplex, env: EnvelopeMap, sigma: str) -> PushoutReport:
    """Û f≤c+ε = Û f≤c−ε ∪ [σ] ⋆ L, glued along L; holds for every cell"""
    _, eps, below, above = _window(sd, env, sigma)
    link = lower_link(sd, env, sigma)
    coned = cone(sd, sigma, link)

    witnesses = []
    union_ok = above == below | coned
    if not union_ok:
        witnesses += [f"union: {chain_token(x)}" for x in sorted(above ^ (below | coned))]
    intersection_ok = below & coned == link
    if not intersection_ok:
        witnesses += [f"intersection: {chain_token(x)}" for x in sorted((below & coned) ^ link)]

    return PushoutReport(
        cell=sigma,
        epsilon=str(eps),
        lower_link=link,
        union_ok=union_ok,
        intersection_ok=intersection_ok,
        witnesses=witnesses,
    )


def theorem_c_check(
    sd: SdComplex,
    env: EnvelopeMap,
    strat: Stratification,
    sigma: str,
) -> TheoremCReport:
    """Tangential/normal splitting of the local Morse data at a critical cell.

    Checks exactly: (i) Û f≤c+ε = Û f≤c−ε ∪ ([σ]⋆H)⋆V, (ii) the two meet in
    H⋆V, (iii) [σ]⋆H lies in strata ≤ Sd(S), (iv) V lies in strata > Sd(S).
    """
    c = sd.base
    values, eps, below, above = _window(sd, env, sigma)
    stratum = strat.stratum_of(sigma)
    if (upper_closure(c, values, sigma) | lower_star(c, values, sigma)) & stratum.cells:
        raise PreconditionError(f"{sigma} is not critical in stratum {stratum.id}")

    order = stratum_order(c, strat)
    horizontal, vertical = hv_split(sd, env, sigma)
    tangential = cone(sd, sigma, horizontal)
    local = join(sd, tangential, vertical)
    glue = join(sd, horizontal, vertical)

    witnesses = []
    union_ok = above == below | local
    if not union_ok:
        witnesses += [f"union: {chain_token(x)}" for x in sorted(above ^ (below | local))]
    intersection_ok = below & local == glue
    if not intersection_ok:
        witnesses += [f"intersection: {chain_token(x)}" for x in sorted((below & local) ^ glue)]

    bad_h = sorted(x for x in tangential if not order.leq(strat.cell_to_stratum[x[-1]], stratum.id))
    bad_v = sorted(x for x in vertical if not order.less(stratum.id, strat.cell_to_stratum[x[-1]]))
    witnesses += [f"horizontal stratum: {chain_token(x)}" for x in bad_h]
    witnesses += [f"vertical stratum: {chain_token(x)}" for x in bad_v]

    report = TheoremCReport(
        cell=sigma,
        epsilon=str(eps),
        horizontal=horizontal,
        vertical=vertical,
        union_ok=union_ok,
        intersection_ok=intersection_ok,
        horizontal_strata_ok=not bad_h,
        vertical_strata_ok=not bad_v,
        witnesses=witnesses,
    )
    if not report.ok:
        logger.warning("tangential/normal splitting fails at %s", sigma)
    return report
