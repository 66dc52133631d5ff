"""Per-process state machines: one AGENT and one MAP_LEADER record per
configured id, with pure partial step functions over immutable state.

Partiality expresses refusal: a step function returns None when the process
does not enable the event in its current state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .events import (
    BeginMerge,
    ConfirmMerge,
    Done,
    EventLabel,
    MergeCancelled,
    MergeCompleted,
    MergeConfirmed,
    MergeMaps,
    RemoveReasoningAbout,
    ReplyLeader,
    RequestLeader,
    RequestMerge,
    Terminate,
    UpdateIdentified,
    UpdateIdentifiedSameGroup,
)
from .ids import AgentId, priority

# --------------------------------------------------------------------------
# Leader phases.
#
# The protocol phases named in the merge flow are AwaitRequest,
# AwaitReplyLeader, Confirming, Merging, Updating, Done and Terminated.  The
# remaining variants are micro-steps that keep every transition a
# single-event rendezvous: StartMerge sits between accepting a request and
# the internal begin_merge; AwaitVerdict separates sending confirm_merge
# from receiving the verdict; Refusing owes a remove_reasoning_about;
# Completing owes the merge_completed; Considering/BeingMerged/
# AwaitCompletion are the passive (other-leader) side of a merge;
# Terminating sits between done and terminate.
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class AwaitRequest:
    pass


@dataclass(frozen=True, slots=True)
class StartMerge:
    requesting_agent: AgentId
    queue: tuple


@dataclass(frozen=True, slots=True)
class AwaitReplyLeader:
    requesting_agent: AgentId
    current: Optional[AgentId]
    queue: tuple
    asked: frozenset


@dataclass(frozen=True, slots=True)
class Confirming:
    requesting_agent: AgentId
    other_agent: AgentId
    other_leader: AgentId
    queue: tuple
    asked: frozenset


@dataclass(frozen=True, slots=True)
class AwaitVerdict:
    requesting_agent: AgentId
    other_agent: AgentId
    other_leader: AgentId
    queue: tuple
    asked: frozenset


@dataclass(frozen=True, slots=True)
class Refusing:
    requesting_agent: AgentId
    other_agent: AgentId
    queue: tuple
    asked: frozenset


@dataclass(frozen=True, slots=True)
class Merging:
    other_leader: AgentId
    other_agent_set: frozenset


@dataclass(frozen=True, slots=True)
class Completing:
    other_leader: AgentId
    same_pending: tuple
    other_pending: tuple
    union_set: frozenset


@dataclass(frozen=True, slots=True)
class Updating:
    same_group_pending: tuple
    other_group_pending: tuple
    new_set: frozenset
    other_leader: AgentId


@dataclass(frozen=True, slots=True)
class Considering:
    req_leader: AgentId


@dataclass(frozen=True, slots=True)
class BeingMerged:
    req_leader: AgentId


@dataclass(frozen=True, slots=True)
class AwaitCompletion:
    req_leader: AgentId


@dataclass(frozen=True, slots=True)
class DonePhase:
    pass


@dataclass(frozen=True, slots=True)
class Terminating:
    pass


@dataclass(frozen=True, slots=True)
class Terminated:
    pass


AWAIT_REQUEST = AwaitRequest()

# Phases in which the leader has nothing in flight.
QUIESCENT_PHASES = (AwaitRequest, DonePhase, Terminating, Terminated)


class AgentProcState(NamedTuple):
    """One agent's knowledge: its leader, its group, and its obligations."""

    id: AgentId
    believed_leader: AgentId
    known_group: frozenset
    pending_leader_queries: frozenset
    has_outstanding_request: bool


class LeaderProcState(NamedTuple):
    """One map-leader process.

    `pending_cancels` holds requesting leaders whose confirm_merge arrived
    while this leader was busy or demoted; each is owed a merge_cancelled.
    """

    id: AgentId
    active: bool
    agent_set: frozenset
    phase: object
    pending_cancels: frozenset


def initial_agent(a: AgentId) -> AgentProcState:
    return AgentProcState(a, a, frozenset({a}), frozenset(), False)


def initial_leader(a: AgentId) -> LeaderProcState:
    return LeaderProcState(a, True, frozenset({a}), AWAIT_REQUEST, frozenset())


def agent_step(s: AgentProcState, e: EventLabel) -> Optional[AgentProcState]:
    """Successor of one agent process under `e`, or None when refused."""
    if isinstance(e, RequestLeader) and e.target_agent == s.id:
        return s._replace(pending_leader_queries=s.pending_leader_queries | {e.req_leader})
    if isinstance(e, ReplyLeader) and e.target_agent == s.id:
        # The reply payload is forced: an agent always reports its current
        # believed leader.
        if e.req_leader in s.pending_leader_queries and e.its_leader == s.believed_leader:
            return s._replace(pending_leader_queries=s.pending_leader_queries - {e.req_leader})
        return None
    if isinstance(e, UpdateIdentified) and e.agent == s.id:
        if s.id not in e.new_set:
            return None
        return s._replace(
            believed_leader=e.leader, known_group=e.new_set, has_outstanding_request=False
        )
    if isinstance(e, UpdateIdentifiedSameGroup) and e.agent == s.id:
        if s.id not in e.new_set:
            return None
        return s._replace(known_group=e.new_set, has_outstanding_request=False)
    if isinstance(e, RequestMerge) and e.agent == s.id:
        if (
            not s.has_outstanding_request
            and e.leader == s.believed_leader
            and e.merge_set
            and not (e.merge_set & s.known_group)
        ):
            return s._replace(has_outstanding_request=True)
        return None
    if isinstance(e, RemoveReasoningAbout) and e.req_agent == s.id:
        if s.has_outstanding_request:
            return s._replace(has_outstanding_request=False)
        return None
    return None


def _continue_queue(s: LeaderProcState, requesting_agent: AgentId, queue: tuple, asked: frozenset) -> LeaderProcState:
    """After a refused or dropped target: next target, or back to idle."""
    if queue:
        return s._replace(phase=AwaitReplyLeader(requesting_agent, None, queue, asked))
    return s._replace(phase=AWAIT_REQUEST)


def leader_step(
    s: LeaderProcState, e: EventLabel, full_set: frozenset, params
) -> Optional[LeaderProcState]:
    """Successor of one leader process under `e`, or None when refused.

    `full_set` is the whole agent universe (for the done check) and `params`
    carries the harness flag and the REQ1/REQ2 mutation hooks.
    """
    ph = s.phase

    if isinstance(e, RequestMerge) and e.leader == s.id:
        if (
            isinstance(ph, AwaitRequest)
            and s.active
            and e.agent in s.agent_set
            and e.merge_set
            and not (e.merge_set & s.agent_set)
        ):
            return s._replace(phase=StartMerge(e.agent, tuple(sorted(e.merge_set))))
        return None

    if isinstance(e, BeginMerge) and e.leader == s.id:
        if isinstance(ph, StartMerge):
            return s._replace(
                phase=AwaitReplyLeader(ph.requesting_agent, None, ph.queue, frozenset())
            )
        return None

    if isinstance(e, RequestLeader) and e.req_leader == s.id:
        if isinstance(ph, AwaitReplyLeader) and ph.current is None and ph.queue:
            t = ph.queue[0]
            if t == e.target_agent:
                return s._replace(
                    phase=AwaitReplyLeader(ph.requesting_agent, t, ph.queue[1:], ph.asked | {t})
                )
        return None

    if isinstance(e, ReplyLeader) and e.req_leader == s.id:
        if isinstance(ph, AwaitReplyLeader) and ph.current == e.target_agent:
            other = e.its_leader
            if other == s.id:
                # Target already absorbed into this map; drop it silently.
                return _continue_queue(s, ph.requesting_agent, ph.queue, ph.asked)
            if params.priority_guard and priority(s.id, other) != s.id:
                # REQ1: without priority the merge attempt ends here.
                return s._replace(
                    phase=Refusing(ph.requesting_agent, e.target_agent, ph.queue, ph.asked)
                )
            return s._replace(
                phase=Confirming(ph.requesting_agent, e.target_agent, other, ph.queue, ph.asked)
            )
        return None

    if isinstance(e, ConfirmMerge):
        if e.req_leader == s.id:
            if isinstance(ph, Confirming) and ph.other_leader == e.other_leader:
                return s._replace(
                    phase=AwaitVerdict(
                        ph.requesting_agent, ph.other_agent, ph.other_leader, ph.queue, ph.asked
                    )
                )
            return None
        if e.other_leader == s.id:
            # Passive side: an idle active leader will confirm; a busy or
            # demoted leader owes a cancellation (REQ2).
            if isinstance(ph, AwaitRequest) and (s.active or not params.active_guard):
                return s._replace(phase=Considering(e.req_leader))
            if e.req_leader in s.pending_cancels:
                return None
            return s._replace(pending_cancels=s.pending_cancels | {e.req_leader})
        return None

    if isinstance(e, MergeCancelled):
        if e.req_leader == s.id:
            if isinstance(ph, AwaitVerdict) and ph.other_leader == e.other_leader:
                return s._replace(
                    phase=Refusing(ph.requesting_agent, ph.other_agent, ph.queue, ph.asked)
                )
            return None
        if e.other_leader == s.id:
            if e.req_leader in s.pending_cancels:
                return s._replace(pending_cancels=s.pending_cancels - {e.req_leader})
            return None
        return None

    if isinstance(e, MergeConfirmed):
        if e.req_leader == s.id:
            if (
                isinstance(ph, AwaitVerdict)
                and ph.other_leader == e.other_leader
                and e.other_agent_set
                and not (e.other_agent_set & s.agent_set)
            ):
                return s._replace(phase=Merging(ph.other_leader, e.other_agent_set))
            return None
        if e.other_leader == s.id:
            if (
                isinstance(ph, Considering)
                and ph.req_leader == e.req_leader
                and e.other_agent_set == s.agent_set
            ):
                return s._replace(phase=BeingMerged(e.req_leader))
            return None
        return None

    if isinstance(e, MergeMaps):
        if e.req_leader == s.id:
            if isinstance(ph, Merging) and ph.other_leader == e.other_leader:
                union = s.agent_set | ph.other_agent_set
                return s._replace(
                    agent_set=union,
                    phase=Completing(
                        ph.other_leader,
                        tuple(sorted(s.agent_set)),
                        tuple(sorted(ph.other_agent_set)),
                        union,
                    ),
                )
            return None
        if e.other_leader == s.id:
            if isinstance(ph, BeingMerged) and ph.req_leader == e.req_leader:
                return s._replace(phase=AwaitCompletion(e.req_leader))
            return None
        return None

    if isinstance(e, MergeCompleted):
        if e.req_leader == s.id:
            if (
                isinstance(ph, Completing)
                and ph.other_leader == e.other_leader
                and ph.union_set == e.union_set
            ):
                return s._replace(
                    phase=Updating(ph.same_pending, ph.other_pending, ph.union_set, ph.other_leader)
                )
            return None
        if e.other_leader == s.id:
            # Losing its position as a map leader.
            if isinstance(ph, AwaitCompletion) and ph.req_leader == e.req_leader:
                return s._replace(active=False, agent_set=frozenset(), phase=AWAIT_REQUEST)
            return None
        return None

    if isinstance(e, UpdateIdentifiedSameGroup) and e.leader == s.id:
        if (
            isinstance(ph, Updating)
            and ph.same_group_pending
            and ph.same_group_pending[0] == e.agent
            and ph.new_set == e.new_set
        ):
            return _after_update(
                s, ph.same_group_pending[1:], ph.other_group_pending, ph, full_set, params
            )
        return None

    if isinstance(e, UpdateIdentified) and e.leader == s.id:
        if (
            isinstance(ph, Updating)
            and not ph.same_group_pending
            and ph.other_group_pending
            and ph.other_group_pending[0] == e.agent
            and ph.new_set == e.new_set
        ):
            return _after_update(s, (), ph.other_group_pending[1:], ph, full_set, params)
        return None

    if isinstance(e, RemoveReasoningAbout):
        if (
            isinstance(ph, Refusing)
            and ph.requesting_agent == e.req_agent
            and ph.other_agent == e.other_agent
        ):
            return _continue_queue(s, ph.requesting_agent, ph.queue, ph.asked)
        return None

    if isinstance(e, Done) and e.leader == s.id:
        if isinstance(ph, DonePhase):
            return s._replace(phase=Terminating())
        return None

    if isinstance(e, Terminate) and e.leader == s.id:
        if isinstance(ph, Terminating):
            return s._replace(phase=Terminated())
        return None

    return None


def _after_update(
    s: LeaderProcState, same_rest: tuple, other_rest: tuple, ph: Updating, full_set: frozenset, params
) -> LeaderProcState:
    if same_rest or other_rest:
        return s._replace(phase=Updating(same_rest, other_rest, ph.new_set, ph.other_leader))
    if params.harness and s.agent_set == full_set:
        return s._replace(phase=DonePhase())
    return s._replace(phase=AWAIT_REQUEST)


def leader_is_quiescent(s: LeaderProcState) -> bool:
    return isinstance(s.phase, QUIESCENT_PHASES)
