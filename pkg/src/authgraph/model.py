"""Immutable value types for ownership-rooted authorization graphs.

A state is a set of principals with one distinguished source of authority
(SOA), a partial map of positive authorizations over ordered principal pairs,
and a set of negative authorizations over ordered pairs.  A positive
authorization is either TT (access plus the right to delegate further) or TF
(access only); a negative authorization FF blocks the positive authorization
on the same pair without deleting it.  All types here are plain immutable
values: operations build new states rather than mutating old ones, which keeps
timelines, undo, and the engine/oracle comparison trivially safe.

Positive and negative authorizations are stored as tuples sorted by
(grantor, grantee), so value equality of two states is equality of their
canonical forms.  The state time is a step counter; it is carried through
serialization but deliberately ignored by `states_equal`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ModelError

# Principals are bare non-empty strings; a dedicated wrapper type would buy
# nothing over validating at the state boundary.
Principal = str


class PositiveKind(Enum):
    """Kind of a positive authorization: TT delegates, TF grants access only."""

    TT = "TT"
    TF = "TF"

    @property
    def strength(self) -> int:
        return 2 if self is PositiveKind.TT else 1

    def covers(self, other: "PositiveKind") -> bool:
        """True if an edge of this kind conveys at least what `other` does."""
        return self.strength >= other.strength


class Scheme(Enum):
    """The eight revocation schemes: propagation x dominance x resilience."""

    WLD = "WLD"
    WGD = "WGD"
    SLD = "SLD"
    SGD = "SGD"
    WLN = "WLN"
    WGN = "WGN"
    SLN = "SLN"
    SGN = "SGN"

    @property
    def is_local(self) -> bool:
        return self in (Scheme.WLD, Scheme.SLD, Scheme.WLN, Scheme.SLN)

    @property
    def is_strong(self) -> bool:
        return self in (Scheme.SLD, Scheme.SGD, Scheme.SLN, Scheme.SGN)

    @property
    def is_delete(self) -> bool:
        return self in (Scheme.WLD, Scheme.WGD, Scheme.SLD, Scheme.SGD)


@dataclass(frozen=True)
class RevocationLabel:
    """Identity of the negative-revocation operation that issued an item.

    The root pair plus the sequence number (the state time at which the
    operation ran) identify the operation; undo removes everything still
    carrying its label.  When a reissue displaced existing unlabelled content
    on its pair (upgraded a TF edge, or cleared a standing FF), the displaced
    facts ride along so undo can restore them instead of deleting the slot.
    """

    root_grantor: Principal
    root_grantee: Principal
    sequence: int
    restores_kind: PositiveKind | None = None
    restores_blocked: bool = False

    def __post_init__(self) -> None:
        if not self.root_grantor or not self.root_grantee:
            raise ModelError("label root principals must be non-empty")
        if self.sequence < 0:
            raise ModelError("label sequence must be a natural number")

    @property
    def root(self) -> tuple[Principal, Principal]:
        return (self.root_grantor, self.root_grantee)


@dataclass(frozen=True)
class PositiveAuth:
    """A positive authorization from grantor to grantee."""

    grantor: Principal
    grantee: Principal
    kind: PositiveKind
    label: RevocationLabel | None = None

    def __post_init__(self) -> None:
        _check_pair(self.grantor, self.grantee)

    @property
    def pair(self) -> tuple[Principal, Principal]:
        return (self.grantor, self.grantee)


@dataclass(frozen=True)
class NegativeAuth:
    """A negative authorization (FF) from grantor to grantee."""

    grantor: Principal
    grantee: Principal
    label: RevocationLabel | None = None

    def __post_init__(self) -> None:
        _check_pair(self.grantor, self.grantee)

    @property
    def pair(self) -> tuple[Principal, Principal]:
        return (self.grantor, self.grantee)


def _check_pair(grantor: Principal, grantee: Principal) -> None:
    if not grantor or not grantee:
        raise ModelError("principal ids must be non-empty")
    if grantor == grantee:
        raise ModelError(f"self-authorization {grantor!r} -> {grantee!r} is not allowed")


@dataclass(frozen=True)
class AuthorizationState:
    """One authorization graph for a fixed (access type, object) pair."""

    soa: Principal
    principals: frozenset[Principal]
    positive: tuple[PositiveAuth, ...]
    negative: tuple[NegativeAuth, ...]
    time: int = 0

    def __post_init__(self) -> None:
        if not self.soa:
            raise ModelError("SOA id must be non-empty")
        if self.soa not in self.principals:
            raise ModelError(f"SOA {self.soa!r} is not among the principals")
        for p in self.principals:
            if not isinstance(p, str) or not p:
                raise ModelError("principal ids must be non-empty strings")
        seen_pos: set[tuple[Principal, Principal]] = set()
        for auth in self.positive:
            self._check_endpoints(auth.grantor, auth.grantee)
            if auth.pair in seen_pos:
                raise ModelError(f"duplicate positive authorization on {auth.pair}")
            seen_pos.add(auth.pair)
        seen_neg: set[tuple[Principal, Principal]] = set()
        for neg in self.negative:
            self._check_endpoints(neg.grantor, neg.grantee)
            if neg.pair in seen_neg:
                raise ModelError(f"duplicate negative authorization on {neg.pair}")
            seen_neg.add(neg.pair)
        if self.time < 0:
            raise ModelError("state time must be a natural number")
        object.__setattr__(self, "positive", tuple(sorted(self.positive, key=_pair_key)))
        object.__setattr__(self, "negative", tuple(sorted(self.negative, key=_pair_key)))

    def _check_endpoints(self, grantor: Principal, grantee: Principal) -> None:
        for p in (grantor, grantee):
            if p not in self.principals:
                raise ModelError(f"authorization endpoint {p!r} is not a principal")

    # Derived indexes.  States are immutable, so caching per instance is safe;
    # nothing is ever reused across distinct states.

    @cached_property
    def positive_by_pair(self) -> Mapping[tuple[Principal, Principal], PositiveAuth]:
        return {auth.pair: auth for auth in self.positive}

    @cached_property
    def negative_pairs(self) -> frozenset[tuple[Principal, Principal]]:
        return frozenset(neg.pair for neg in self.negative)

    @cached_property
    def negative_by_pair(self) -> Mapping[tuple[Principal, Principal], NegativeAuth]:
        return {neg.pair: neg for neg in self.negative}

    @cached_property
    def chain_children(self) -> Mapping[Principal, tuple[Principal, ...]]:
        """TT successors per principal, negatives ignored (plain chain edges)."""
        out: dict[Principal, list[Principal]] = {}
        for auth in self.positive:
            if auth.kind is PositiveKind.TT:
                out.setdefault(auth.grantor, []).append(auth.grantee)
        return {p: tuple(children) for p, children in out.items()}

    @cached_property
    def active_children(self) -> Mapping[Principal, tuple[Principal, ...]]:
        """TT successors per principal with FF-blocked pairs removed."""
        blocked = self.negative_pairs
        out: dict[Principal, list[Principal]] = {}
        for auth in self.positive:
            if auth.kind is PositiveKind.TT and auth.pair not in blocked:
                out.setdefault(auth.grantor, []).append(auth.grantee)
        return {p: tuple(children) for p, children in out.items()}

    def replace_authorizations(
        self,
        positive: Iterable[PositiveAuth] | None = None,
        negative: Iterable[NegativeAuth] | None = None,
        time: int | None = None,
    ) -> "AuthorizationState":
        """Build a new state with the given edge sets; revalidates everything."""
        return AuthorizationState(
            soa=self.soa,
            principals=self.principals,
            positive=tuple(positive) if positive is not None else self.positive,
            negative=tuple(negative) if negative is not None else self.negative,
            time=self.time if time is None else time,
        )


def _pair_key(auth: PositiveAuth | NegativeAuth) -> tuple[Principal, Principal]:
    return (auth.grantor, auth.grantee)


def new_state(soa: Principal, principals: Iterable[Principal]) -> AuthorizationState:
    """Fresh state at time 0 with no authorizations."""
    members = frozenset(principals)
    if soa not in members:
        raise ModelError(f"SOA {soa!r} must be listed among the principals")
    return AuthorizationState(soa=soa, principals=members, positive=(), negative=())


def states_equal(a: AuthorizationState, b: AuthorizationState) -> bool:
    """Value equality on SOA, principals, and both edge sets; time is ignored."""
    return (
        a.soa == b.soa
        and a.principals == b.principals
        and a.positive == b.positive
        and a.negative == b.negative
    )


@dataclass(frozen=True)
class RevocationRequest:
    """A revocation of scheme `scheme` by `revoker` against `target`."""

    scheme: Scheme
    revoker: Principal
    target: Principal

    def __post_init__(self) -> None:
        _check_pair(self.revoker, self.target)


@dataclass(frozen=True)
class EngineConfig:
    """Behaviour switches shared by the engine and the oracle.

    sgd_descendant_dominance selects how the strong global schemes treat
    dominated edges: True applies the dominance rule at every principal the
    cascade reaches (the full descendant rule), False restricts it to the
    revocation target, turning SGD into WGD-plus-SLD's-target-rule.
    """

    sgd_descendant_dominance: bool = True


@dataclass(frozen=True)
class RevocationDelta:
    """Exact difference an operation made, as removed and added authorizations.

    An in-place change (kind upgrade, relabel) appears as a delete of the old
    value plus an issue of the new one.  Deleted items are always present in
    the pre-state; issued items are always present in the post-state.
    """

    deleted_positive: frozenset[PositiveAuth] = frozenset()
    deleted_negative: frozenset[NegativeAuth] = frozenset()
    issued_positive: frozenset[PositiveAuth] = frozenset()
    issued_negative: frozenset[NegativeAuth] = frozenset()

    def __post_init__(self) -> None:
        if self.deleted_positive & self.issued_positive:
            raise ModelError("delta issues and deletes the same positive value")
        if self.deleted_negative & self.issued_negative:
            raise ModelError("delta issues and deletes the same negative value")


# Operation records, used by timelines and trace files.


@dataclass(frozen=True)
class GrantOp:
    grantor: Principal
    grantee: Principal
    kind: PositiveKind


@dataclass(frozen=True)
class NegativeOp:
    grantor: Principal
    grantee: Principal


@dataclass(frozen=True)
class RevokeOp:
    scheme: Scheme
    revoker: Principal
    target: Principal


@dataclass(frozen=True)
class UndoOp:
    grantor: Principal
    grantee: Principal


Operation = GrantOp | NegativeOp | RevokeOp | UndoOp


@dataclass(frozen=True)
class TimelineStep:
    operation: Operation
    delta: RevocationDelta
    state: AuthorizationState


@dataclass(frozen=True)
class Timeline:
    """An initial state plus the ordered operations applied to it."""

    initial: AuthorizationState
    steps: tuple[TimelineStep, ...] = ()

    @property
    def current(self) -> AuthorizationState:
        return self.steps[-1].state if self.steps else self.initial

    def extended(self, step: TimelineStep) -> "Timeline":
        return replace(self, steps=self.steps + (step,))


__all__ = [
    "AuthorizationState",
    "EngineConfig",
    "GrantOp",
    "NegativeAuth",
    "NegativeOp",
    "Operation",
    "PositiveAuth",
    "PositiveKind",
    "Principal",
    "RevocationDelta",
    "RevocationLabel",
    "RevocationRequest",
    "RevokeOp",
    "Scheme",
    "Timeline",
    "TimelineStep",
    "UndoOp",
    "new_state",
    "states_equal",
]
