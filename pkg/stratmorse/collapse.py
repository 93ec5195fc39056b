"""Free-face pairs, certificate replay and a certificate-producing collapse search."""
from __future__ import annotations

import logging
from typing import Iterable, Optional

from stratmorse.complex import Complex, CellSet, is_subcomplex
from stratmorse.config import settings
from stratmorse.errors import InputError, InvalidPair
from stratmorse.models import CollapseCertificate, CollapseOutcome, FreeFacePair, Stratification

logger = logging.getLogger(__name__)


def _pair_order(c: Complex, pair: FreeFacePair) -> tuple:
    # maximal dimension first, then tokens
    return (-c.cells[pair.sigma], pair.sigma, pair.tau)


def free_face_pairs(
    c: Complex,
    k: Iterable[str],
    strat: Optional[Stratification] = None,
) -> list[FreeFacePair]:
    """All (σ, τ) with st(τ) ∩ k = {σ, τ}.

    With a stratification, pairs carry the stratum of σ as a witness.
    """
    k = frozenset(k)
    if not is_subcomplex(c, k):
        raise InputError("free-face pairs are only defined inside a subcomplex")
    return _free_pairs(c, k, strat)


def _free_pairs(c: Complex, k: CellSet, strat: Optional[Stratification]) -> list[FreeFacePair]:
    pairs = []
    for tau in k:
        upper = c.cofaces(tau) & k
        if len(upper) != 2:
            continue
        (sigma,) = upper - {tau}
        if c.cells[sigma] != c.cells[tau] + 1:
            continue
        stratum = strat.cell_to_stratum.get(sigma) if strat is not None else None
        pairs.append(FreeFacePair(sigma=sigma, tau=tau, stratum=stratum))
    return sorted(pairs, key=lambda p: _pair_order(c, p))


def replay(
    c: Complex,
    k: Iterable[str],
    cert: CollapseCertificate,
    strat: Optional[Stratification] = None,
) -> CellSet:
    """Perform the certificate's elementary collapses from k and return the result"""
    current = set(k)
    if not is_subcomplex(c, current):
        raise InputError("replay must start from a subcomplex")
    if cert.filtered and strat is None:
        raise InputError("a filtered certificate needs a stratification to replay")

    for index, pair in enumerate(cert.pairs):
        sigma, tau = pair.sigma, pair.tau
        c.require({sigma, tau})
        if sigma not in current or tau not in current:
            raise InvalidPair(index, f"({sigma}, {tau}) is no longer present")
        if c.cells[sigma] != c.cells[tau] + 1 or not c.less(tau, sigma):
            raise InvalidPair(index, f"{tau} is not a codimension-one face of {sigma}")
        upper = c.cofaces(tau) & current
        if upper != {sigma, tau}:
            raise InvalidPair(
                index, f"{tau} has cofaces {sorted(upper - {tau})} in the current complex"
            )
        if cert.filtered:
            sigma_stratum = strat.cell_to_stratum[sigma]
            tau_stratum = strat.cell_to_stratum[tau]
            if sigma_stratum != tau_stratum:
                raise InvalidPair(
                    index, f"{sigma} and {tau} lie in strata {sigma_stratum} and {tau_stratum}"
                )
        current -= {sigma, tau}

    return frozenset(current)


class _CollapseSearch:
    """Depth-first search over free pairs inside k − l, with backtracking"""

    def __init__(self, c: Complex, target: CellSet, strat: Optional[Stratification], budget: int):
        self.c = c
        self.target = target
        self.strat = strat
        self.budget = budget
        self.nodes = 0
        self.dead: set[CellSet] = set()

    def candidates(self, current: CellSet) -> list[FreeFacePair]:
        pairs = []
        for pair in _free_pairs(self.c, current, self.strat):
            if pair.sigma in self.target or pair.tau in self.target:
                continue
            if self.strat is not None and (
                self.strat.cell_to_stratum[pair.sigma] != self.strat.cell_to_stratum[pair.tau]
            ):
                continue
            pairs.append(pair)
        return pairs

    def run(self, current: CellSet, path: list[FreeFacePair]) -> Optional[list[FreeFacePair]]:
        if current == self.target:
            return list(path)
        if current in self.dead:
            return None
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExhausted

        for pair in self.candidates(current):
            path.append(pair)
            found = self.run(current - {pair.sigma, pair.tau}, path)
            if found is not None:
                return found
            path.pop()

        self.dead.add(current)
        return None


class _BudgetExhausted(Exception):
    pass


def find_collapse(
    c: Complex,
    k: Iterable[str],
    l: Iterable[str],
    strat: Optional[Stratification] = None,
    budget: Optional[int] = None,
) -> CollapseOutcome:
    """Search for a certificate of k ↘ l (k ↝ l when strat is given).

    NoCollapse is only reported after the search space is exhausted;
    running out of nodes is a separate, inconclusive outcome.
    """
    k, l = frozenset(k), frozenset(l)
    if not (is_subcomplex(c, k) and is_subcomplex(c, l)):
        raise InputError("collapse endpoints must be subcomplexes")
    if not l <= k:
        raise InputError("target of a collapse must lie inside the source")
    budget = settings.collapse_budget if budget is None else budget

    filtered = strat is not None
    if (len(k) - len(l)) % 2:
        return CollapseOutcome(status="no-collapse")

    search = _CollapseSearch(c, l, strat, budget)
    try:
        pairs = search.run(k, [])
    except _BudgetExhausted:
        logger.info("collapse search stopped after %d nodes", search.nodes)
        return CollapseOutcome(status="budget-exhausted", nodes=search.nodes)

    logger.debug("collapse search visited %d nodes", search.nodes)
    if pairs is None:
        return CollapseOutcome(status="no-collapse", nodes=search.nodes)
    return CollapseOutcome(
        status="collapse",
        certificate=CollapseCertificate(pairs=pairs, filtered=filtered),
        nodes=search.nodes,
    )


def restrict_certificate(
    cert: CollapseCertificate,
    strat: Stratification,
    level: int,
) -> CollapseCertificate:
    """Keep only the pairs living at or below the given level"""
    kept = [
        pair for pair in cert.pairs
        if strat.levels[pair.sigma] <= level
    ]
    return CollapseCertificate(pairs=kept, filtered=cert.filtered)
