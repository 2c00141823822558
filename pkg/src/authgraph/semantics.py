"""Rights and chain semantics over authorization states.

A rooted delegation chain is a path of TT edges starting at the SOA; the plain
form ignores negatives, the active form additionally drops every TT edge whose
pair carries an FF.  A positive authorization is active when its own pair is
not blocked and its grantor holds an active chain.  Access follows either from
an active chain or from an unblocked TF edge out of a principal with one.

All queries run a fresh worklist reachability pass over the state's adjacency
index; results are never cached across states.  Each pass is O(V+E), and one
pass answers the query for every principal at once, which the revocation
engine exploits.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .errors import MissingAuthorizationError, UnknownPrincipalError
from .model import AuthorizationState, PositiveKind, Principal


def _bfs(
    adjacency: Mapping[Principal, tuple[Principal, ...]],
    start: Principal,
    avoid: Principal | None = None,
) -> frozenset[Principal]:
    if start == avoid:
        return frozenset()
    seen = {start}
    queue = deque((start,))
    while queue:
        p = queue.popleft()
        for q in adjacency.get(p, ()):
            if q != avoid and q not in seen:
                seen.add(q)
                queue.append(q)
    return frozenset(seen)


def reachable_plain(state: AuthorizationState) -> frozenset[Principal]:
    """Principals with a rooted delegation chain, negatives ignored."""
    return _bfs(state.chain_children, state.soa)


def reachable_active(state: AuthorizationState) -> frozenset[Principal]:
    """Principals with an active rooted delegation chain."""
    return _bfs(state.active_children, state.soa)


def reachable_active_avoiding(
    state: AuthorizationState, avoid: Principal
) -> frozenset[Principal]:
    """Active-chain reachability with one principal excised from the graph."""
    return _bfs(state.active_children, state.soa, avoid)


def _require_principal(state: AuthorizationState, p: Principal) -> None:
    if p not in state.principals:
        raise UnknownPrincipalError(f"{p!r} is not a principal of this state")


def rooted_chain_exists(state: AuthorizationState, p: Principal) -> bool:
    """True if a plain rooted delegation chain reaches p."""
    _require_principal(state, p)
    return p in reachable_plain(state)


def active_chain_exists(state: AuthorizationState, p: Principal) -> bool:
    """True if an active rooted delegation chain reaches p."""
    _require_principal(state, p)
    return p in reachable_active(state)


def has_delegation_right(state: AuthorizationState, p: Principal) -> bool:
    """Delegation right is exactly an active rooted delegation chain."""
    return active_chain_exists(state, p)


def has_access_right(state: AuthorizationState, p: Principal) -> bool:
    """Active chain, or an unblocked TF edge from a principal with one."""
    _require_principal(state, p)
    active = reachable_active(state)
    if p in active:
        return True
    blocked = state.negative_pairs
    for auth in state.positive:
        if (
            auth.grantee == p
            and auth.kind is PositiveKind.TF
            and auth.grantor in active
            and auth.pair not in blocked
        ):
            return True
    return False


def is_independent(state: AuthorizationState, j: Principal, i: Principal) -> bool:
    """True if j holds an active rooted chain that avoids i entirely.

    The SOA is independent of every principal, itself included; any other
    principal is trivially dependent on itself (no chain ending at j can
    avoid j).
    """
    _require_principal(state, j)
    _require_principal(state, i)
    if j == state.soa:
        return True
    return j in reachable_active_avoiding(state, i)


def is_auth_active(
    state: AuthorizationState, grantor: Principal, grantee: Principal
) -> bool:
    """Activity of the positive authorization on (grantor, grantee)."""
    if (grantor, grantee) not in state.positive_by_pair:
        raise MissingAuthorizationError(
            f"no positive authorization from {grantor!r} to {grantee!r}"
        )
    return (grantor, grantee) not in state.negative_pairs and grantor in reachable_active(
        state
    )


@dataclass(frozen=True)
class ConnectivityViolation:
    """An authorization whose grantor has no plain rooted delegation chain."""

    grantor: Principal
    grantee: Principal
    form: str  # "TT", "TF", or "FF"

    def __str__(self) -> str:
        return (
            f"{self.form} authorization {self.grantor} -> {self.grantee}: "
            f"grantor has no rooted delegation chain"
        )


def validate_connectivity(state: AuthorizationState) -> list[ConnectivityViolation]:
    """Every authorization's grantor must hold a plain rooted chain.

    Checked over plain chains deliberately: negatives suspend rights but do
    not excuse a structurally disconnected grantor.
    """
    reach = reachable_plain(state)
    violations = [
        ConnectivityViolation(auth.grantor, auth.grantee, auth.kind.value)
        for auth in state.positive
        if auth.grantor not in reach
    ]
    violations.extend(
        ConnectivityViolation(neg.grantor, neg.grantee, "FF")
        for neg in state.negative
        if neg.grantor not in reach
    )
    return violations


__all__ = [
    "ConnectivityViolation",
    "active_chain_exists",
    "has_access_right",
    "has_delegation_right",
    "is_auth_active",
    "is_independent",
    "reachable_active",
    "reachable_active_avoiding",
    "reachable_plain",
    "rooted_chain_exists",
    "validate_connectivity",
]
