"""Decodable-set calculus for a receiver at a fixed rate tuple.

A sender subset S is decodable at receiver l when every sub-sum of
rates inside S clears its multiple-access bound:

    R_T <= I(X_T; Y_l | X_{S \\ T}, Q)   for all T subset of S.

Decodable sets are closed under union, so a unique maximal decodable
set exists; every rate sum over senders outside it strictly exceeds the
residual mutual information, certifying why those messages are lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import ConsistencyError, UsageError
from .probability import JointDistribution
from .regions import DEFAULT_TOL, mi_from_table, output_entropy_table


@dataclass(frozen=True)
class DecodabilityReport:
    senders: frozenset[int]
    decodable: bool
    violated: Optional[tuple[frozenset[int], float, float]]  # (T, lhs, rhs)


@dataclass(frozen=True)
class MaximalDecodableSet:
    s_star: frozenset[int]
    all_decodable: tuple[frozenset[int], ...]


def _lex_subsets(senders):
    """All subsets ordered lexicographically by sorted element tuple."""
    elems = sorted(senders)
    subs = [combo for r in range(len(elems) + 1)
            for combo in combinations(elems, r)]
    return sorted(subs)


def is_decodable(joint: JointDistribution, rates, receiver: int, senders,
                 tol: float = DEFAULT_TOL, K: int | None = None) -> DecodabilityReport:
    """Check all 2^|S| constraints; report the first violation found.

    The empty set is vacuously decodable.  Violations are searched in
    lexicographic order of the subset's sorted elements.
    """
    rates = np.asarray(rates, dtype=float)
    if K is None:
        K = len(rates)
    senders = frozenset(senders)
    if not senders <= set(range(K)):
        raise UsageError(f"sender set {set(senders)} outside 0..{K - 1}")
    h = output_entropy_table(joint, receiver, K)
    s_mask = sum(1 << k for k in senders)
    for combo in _lex_subsets(senders):
        if not combo:
            continue
        t_mask = sum(1 << k for k in combo)
        lhs = float(rates[list(combo)].sum())
        rhs = mi_from_table(h, t_mask, s_mask & ~t_mask)
        if lhs > rhs + tol:
            return DecodabilityReport(senders, False, (frozenset(combo), lhs, rhs))
    return DecodabilityReport(senders, True, None)


def maximal_decodable_set(joint: JointDistribution, rates, receiver: int,
                          tol: float = DEFAULT_TOL,
                          K: int | None = None) -> MaximalDecodableSet:
    """Enumerate all decodable sets and return their union.

    Union closure guarantees the union is itself decodable; if the
    floating check disagrees, the tolerance is too tight for this
    instance and we fail loudly rather than return a wrong maximizer.
    """
    rates = np.asarray(rates, dtype=float)
    if K is None:
        K = len(rates)
    found = []
    for mask in range(1 << K):
        senders = frozenset(k for k in range(K) if mask >> k & 1)
        if is_decodable(joint, rates, receiver, senders, tol, K).decodable:
            found.append(senders)
    union = frozenset().union(*found) if found else frozenset()
    if not is_decodable(joint, rates, receiver, union, tol, K).decodable:
        raise ConsistencyError(
            "union of decodable sets is not decodable; tolerance trouble")
    return MaximalDecodableSet(union, tuple(found))


def check_prop2_certificate(joint: JointDistribution, rates, receiver: int,
                            s_star, tol: float = DEFAULT_TOL,
                            K: int | None = None):
    """Certify that rates outside the maximal decodable set are too large.

    For every nonempty U in the complement of s_star the sum rate must
    exceed I(X_U; Y_l | X_{s_star}, Q); returns (all_hold, pairs) where
    pairs lists (U, lhs, rhs) for reporting.
    """
    rates = np.asarray(rates, dtype=float)
    if K is None:
        K = len(rates)
    s_star = frozenset(s_star)
    h = output_entropy_table(joint, receiver, K)
    s_mask = sum(1 << k for k in s_star)
    complement = [k for k in range(K) if k not in s_star]
    ok = True
    pairs = []
    for combo in _lex_subsets(complement):
        if not combo:
            continue
        u_mask = sum(1 << k for k in combo)
        lhs = float(rates[list(combo)].sum())
        rhs = mi_from_table(h, u_mask, s_mask)
        pairs.append((frozenset(combo), lhs, rhs))
        if not lhs > rhs - tol:
            ok = False
    return ok, pairs
