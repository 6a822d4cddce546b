"""Exhaustive truth over small state spaces, plus bounded and fast engines.

The exact engine enumerates every valid state of the model (with the
effective hypergraph already folded in), relates states a player cannot
tell apart by their identical views, and evaluates group knowledge as
truth at every state connected through any chain of such relations for
the group's members.  Chains run inside the enumerated space; since the
space holds exactly the valid compliant states, this matches evaluating
the operator at all compliant states related to the input.

Two further engines trade coverage for reach:

* the bounded engine explores only states with at most a given number of
  messages and reports three-valued verdicts; a refutation found there is
  genuine, a universal pass is only an Unknown unless the bound provably
  covers the whole space
* the fast engine handles positive formulas in telling mode without any
  enumeration by walking least indistinguishable states

Evaluation is deterministic; memo tables live in one evaluator and are
keyed by state index and subformula.
"""

from __future__ import annotations

import itertools
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import (
    InteractionModel,
    KnowcastError,
    Message,
    Mode,
    State,
    make_state,
    message_universe,
    restrict,
    validate_state,
)
from .formula import CK, And, Atom, Formula, Not, Or, classify

DEFAULT_CAP = 1 << 20


class CapExceededError(KnowcastError):
    def __init__(self, universe_size: int, estimate: int, cap: int):
        self.universe_size = universe_size
        self.estimate = estimate
        self.cap = cap
        super().__init__(
            "state space too large: universe of %d messages gives about %d "
            "candidate pairs, cap is %d" % (universe_size, estimate, cap))


class InvalidStateError(KnowcastError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("not a valid state: "
                         + "; ".join(v.detail for v in violations))


class StateNotInSpaceError(KnowcastError):
    pass


class BoundTooSmallError(KnowcastError):
    pass


class NotTellingError(KnowcastError):
    pass


class NotPositiveError(KnowcastError):
    pass


class Verdict3(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# State space
# ---------------------------------------------------------------------------


class StateSpace:
    """All valid states of a model in canonical order, with per-player
    signature buckets: two states sit in the same bucket for a player
    exactly when that player cannot tell them apart.
    """

    def __init__(self, model: InteractionModel, states: Sequence[State],
                 message_bound: Optional[int] = None, complete: bool = True):
        self.model = model
        self.states = tuple(states)
        self.message_bound = message_bound
        self.complete = complete
        self.index: Dict[State, int] = {s: i for i, s in enumerate(self.states)}
        n = len(self.states)
        self.bucket_of: List[List[int]] = []
        self.buckets: List[List[Tuple[int, ...]]] = []
        for player in range(len(model.players)):
            sig_ids: Dict[Tuple, int] = {}
            members: List[List[int]] = []
            of = [0] * n
            for idx, s in enumerate(self.states):
                sig = restrict(model, s, player)
                bid = sig_ids.get(sig)
                if bid is None:
                    bid = len(members)
                    sig_ids[sig] = bid
                    members.append([])
                members[bid].append(idx)
                of[idx] = bid
            self.bucket_of.append(of)
            self.buckets.append([tuple(b) for b in members])

    def __len__(self) -> int:
        return len(self.states)

    def index_of(self, s: State) -> int:
        try:
            return self.index[s]
        except KeyError:
            raise StateNotInSpaceError(
                "state %s is not in the enumerated space" % (self.model.state_label(s),)) from None


def _forwarding_ok(model: InteractionModel, msgs: Sequence[Message]) -> bool:
    # Every broadcast atom is true in any valuation paired with this set,
    # so the owner is always seeded.
    for atom in {m.atom for m in msgs}:
        knowers = {model.owner[atom]}
        mine = [m for m in msgs if m.atom == atom]
        changed = True
        while changed:
            changed = False
            for m in mine:
                if m.sender in knowers and not set(m.arc) <= knowers:
                    knowers |= set(m.arc)
                    changed = True
        if any(m.sender not in knowers for m in mine):
            return False
    return True


def _states_from_sets(model: InteractionModel, message_sets) -> List[State]:
    n_atoms = len(model.atoms)
    out = []
    for msgs in message_sets:
        facts = tuple(sorted({m.atom for m in msgs}))
        rest = [a for a in range(n_atoms) if a not in set(facts)]
        for k in range(len(rest) + 1):
            for extra in itertools.combinations(rest, k):
                val = tuple(sorted(facts + extra))
                out.append(State(val, msgs))
    out.sort()
    return out


def enumerate_states(model: InteractionModel, cap: int = DEFAULT_CAP) -> StateSpace:
    """Every valid state, canonically ordered.

    The candidate count (message subsets times valuations) is estimated
    up front and refused beyond the cap.
    """
    universe = message_universe(model)
    estimate = (2 ** len(universe)) * (2 ** len(model.atoms))
    if estimate > cap:
        raise CapExceededError(len(universe), estimate, cap)

    sets = []
    for k in range(len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            if model.mode is Mode.FORWARDING and not _forwarding_ok(model, combo):
                continue
            sets.append(combo)
    return StateSpace(model, _states_from_sets(model, sets))


def enumerate_states_bounded(model: InteractionModel, message_bound: int,
                             cap: int = DEFAULT_CAP) -> StateSpace:
    """The subspace of valid states carrying at most message_bound messages.

    Marked complete when the bound reaches the whole universe, in which
    case it equals the full space.
    """
    universe = message_universe(model)
    bound = min(message_bound, len(universe))
    estimate = sum(_ncr(len(universe), k) for k in range(bound + 1)) * (2 ** len(model.atoms))
    if estimate > cap:
        raise CapExceededError(len(universe), estimate, cap)

    sets = []
    for k in range(bound + 1):
        for combo in itertools.combinations(universe, k):
            if model.mode is Mode.FORWARDING and not _forwarding_ok(model, combo):
                continue
            sets.append(combo)
    return StateSpace(model, _states_from_sets(model, sets),
                      message_bound=message_bound,
                      complete=message_bound >= len(universe))


def _ncr(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


@lru_cache(maxsize=32)
def _space_cached(model: InteractionModel, cap: int) -> StateSpace:
    return enumerate_states(model, cap)


@lru_cache(maxsize=16)
def _bounded_space_cached(model: InteractionModel, bound: int, cap: int) -> StateSpace:
    return enumerate_states_bounded(model, bound, cap)


# ---------------------------------------------------------------------------
# Indistinguishability
# ---------------------------------------------------------------------------


def indist(model: InteractionModel, s: State, t: State, player: int) -> bool:
    """Whether one player's view of the two states is identical."""
    return restrict(model, s, player) == restrict(model, t, player)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _group_components(space: StateSpace, group: Tuple[int, ...]) -> Dict[int, Tuple[int, ...]]:
    uf = _UnionFind(len(space))
    for player in group:
        for bucket in space.buckets[player]:
            first = bucket[0]
            for other in bucket[1:]:
                uf.union(first, other)
    members: Dict[int, List[int]] = {}
    for idx in range(len(space)):
        members.setdefault(uf.find(idx), []).append(idx)
    out: Dict[int, Tuple[int, ...]] = {}
    for comp in members.values():
        block = tuple(comp)
        for idx in comp:
            out[idx] = block
    return out


def reachable(space: StateSpace, s: State, group: Iterable[int]) -> Tuple[int, ...]:
    """Indices of all states connected to s by view-sharing steps of the
    group's members, s included and in ascending order.
    """
    g = tuple(sorted(set(group)))
    return _group_components(space, g)[space.index_of(s)]


# ---------------------------------------------------------------------------
# Exact engine
# ---------------------------------------------------------------------------


class Evaluator:
    """Exact truth over one state space, memoized per (state, subformula)."""

    def __init__(self, model: InteractionModel, space: StateSpace):
        self.model = model
        self.space = space
        self._memo: Dict[Tuple[int, Formula], bool] = {}
        self._components: Dict[Tuple[int, ...], Dict[int, Tuple[int, ...]]] = {}

    def components(self, group: Tuple[int, ...]) -> Dict[int, Tuple[int, ...]]:
        comp = self._components.get(group)
        if comp is None:
            comp = _group_components(self.space, group)
            self._components[group] = comp
        return comp

    def holds(self, s: State, phi: Formula) -> bool:
        return self.holds_at(self.space.index_of(s), phi)

    def holds_at(self, idx: int, phi: Formula) -> bool:
        key = (idx, phi)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._eval(idx, phi)
        self._memo[key] = out
        return out

    def _eval(self, idx: int, phi: Formula) -> bool:
        if isinstance(phi, Atom):
            return phi.atom in self.space.states[idx].valuation
        if isinstance(phi, Not):
            return not self.holds_at(idx, phi.sub)
        if isinstance(phi, And):
            return self.holds_at(idx, phi.left) and self.holds_at(idx, phi.right)
        if isinstance(phi, Or):
            return self.holds_at(idx, phi.left) or self.holds_at(idx, phi.right)
        if isinstance(phi, CK):
            block = self.components(phi.group)[idx]
            return all(self.holds_at(t, phi.sub) for t in block)
        raise TypeError("not a formula: %r" % (phi,))

    # -- refutation witness ------------------------------------------------

    def refutation(self, s: State, phi: Formula):
        """For a false formula, locate the leftmost refuted knowledge
        operator reachable through false branches and return
        (operator, path) where path is ((player, state_index), ...) leading
        from s to a related state falsifying the operand.  None when the
        falsity is purely propositional.
        """
        idx = self.space.index_of(s)
        return self._refute(idx, phi)

    def _refute(self, idx: int, phi: Formula):
        if self.holds_at(idx, phi):
            return None
        if isinstance(phi, CK):
            return phi, self._refute_path(idx, phi)
        if isinstance(phi, And):
            for part in (phi.left, phi.right):
                if not self.holds_at(idx, part):
                    found = self._refute(idx, part)
                    if found is not None:
                        return found
            return None
        if isinstance(phi, Or):
            for part in (phi.left, phi.right):
                found = self._refute(idx, part)
                if found is not None:
                    return found
            return None
        return None

    def _refute_path(self, idx: int, phi: CK) -> Tuple[Tuple[int, int], ...]:
        # breadth-first over view-sharing steps, lowest player and state
        # first, to the nearest state falsifying the operand
        if not self.holds_at(idx, phi.sub):
            return ()
        prev: Dict[int, Tuple[int, int]] = {idx: (-1, -1)}
        frontier = [idx]
        while frontier:
            nxt: List[int] = []
            for cur in frontier:
                for player in phi.group:
                    bucket = self.space.buckets[player][self.space.bucket_of[player][cur]]
                    for t in bucket:
                        if t in prev:
                            continue
                        prev[t] = (player, cur)
                        if not self.holds_at(t, phi.sub):
                            path = []
                            node = t
                            while node != idx:
                                player_, parent = prev[node]
                                path.append((player_, node))
                                node = parent
                            return tuple(reversed(path))
                        nxt.append(t)
            frontier = nxt
        raise AssertionError("refuted operator has a refuting related state")


def holds(model: InteractionModel, s: State, phi: Formula,
          cap: int = DEFAULT_CAP, evaluator: Optional[Evaluator] = None) -> bool:
    """Exact truth of the formula at the state under the model's regime."""
    ev = evaluator if evaluator is not None else get_evaluator(model, cap)
    bad = validate_state(model, s.valuation, s.messages)
    if bad:
        raise InvalidStateError(bad)
    return ev.holds(make_state(s.valuation, s.messages), phi)


@lru_cache(maxsize=32)
def get_evaluator(model: InteractionModel, cap: int = DEFAULT_CAP) -> Evaluator:
    return Evaluator(model, _space_cached(model, cap))


# ---------------------------------------------------------------------------
# Bounded engine
# ---------------------------------------------------------------------------


class BoundedEvaluator:
    """Three-valued truth over the bounded subspace.

    A False on a knowledge operator comes from an explicit related state
    falsifying the operand, and relatedness inside the subspace is genuine
    relatedness, so False (and by duality True) verdicts are sound; a
    universal pass inside an incomplete subspace stays Unknown.
    """

    def __init__(self, model: InteractionModel, space: StateSpace):
        self.model = model
        self.space = space
        self._memo: Dict[Tuple[int, Formula], Verdict3] = {}
        self._components: Dict[Tuple[int, ...], Dict[int, Tuple[int, ...]]] = {}

    def components(self, group: Tuple[int, ...]) -> Dict[int, Tuple[int, ...]]:
        comp = self._components.get(group)
        if comp is None:
            comp = _group_components(self.space, group)
            self._components[group] = comp
        return comp

    def eval_at(self, idx: int, phi: Formula) -> Verdict3:
        key = (idx, phi)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._eval(idx, phi)
        self._memo[key] = out
        return out

    def _eval(self, idx: int, phi: Formula) -> Verdict3:
        if isinstance(phi, Atom):
            present = phi.atom in self.space.states[idx].valuation
            return Verdict3.TRUE if present else Verdict3.FALSE
        if isinstance(phi, Not):
            v = self.eval_at(idx, phi.sub)
            if v is Verdict3.UNKNOWN:
                return v
            return Verdict3.FALSE if v is Verdict3.TRUE else Verdict3.TRUE
        if isinstance(phi, And):
            l = self.eval_at(idx, phi.left)
            r = self.eval_at(idx, phi.right)
            if Verdict3.FALSE in (l, r):
                return Verdict3.FALSE
            if l is Verdict3.TRUE and r is Verdict3.TRUE:
                return Verdict3.TRUE
            return Verdict3.UNKNOWN
        if isinstance(phi, Or):
            l = self.eval_at(idx, phi.left)
            r = self.eval_at(idx, phi.right)
            if Verdict3.TRUE in (l, r):
                return Verdict3.TRUE
            if l is Verdict3.FALSE and r is Verdict3.FALSE:
                return Verdict3.FALSE
            return Verdict3.UNKNOWN
        if isinstance(phi, CK):
            block = self.components(phi.group)[idx]
            saw_unknown = False
            for t in block:
                v = self.eval_at(t, phi.sub)
                if v is Verdict3.FALSE:
                    return Verdict3.FALSE
                if v is Verdict3.UNKNOWN:
                    saw_unknown = True
            if saw_unknown or not self.space.complete:
                return Verdict3.UNKNOWN
            return Verdict3.TRUE
        raise TypeError("not a formula: %r" % (phi,))


def holds_bounded(model: InteractionModel, s: State, phi: Formula,
                  message_bound: int, cap: int = DEFAULT_CAP) -> Verdict3:
    """Three-valued truth using only states with at most the given number
    of messages.  The input state itself must fit under the bound.
    """
    s = make_state(s.valuation, s.messages)
    bad = validate_state(model, s.valuation, s.messages)
    if bad:
        raise InvalidStateError(bad)
    if len(s.messages) > message_bound:
        raise BoundTooSmallError(
            "state carries %d messages, bound is %d" % (len(s.messages), message_bound))
    space = _bounded_space_cached(model, message_bound, cap)
    ev = BoundedEvaluator(model, space)
    return ev.eval_at(space.index_of(s), phi)


# ---------------------------------------------------------------------------
# Fast engine for positive formulas in telling mode
# ---------------------------------------------------------------------------


def _least_view_state(model: InteractionModel, s: State, player: int) -> State:
    v, m = restrict(model, s, player)
    return make_state(set(v) | {msg.atom for msg in m}, m)


def holds_positive_fast(model: InteractionModel, s: State, phi: Formula) -> bool:
    """Exact truth for positive formulas in telling mode, no enumeration.

    A player's knowledge of a positive formula is decided at the single
    least state compatible with their view; positives only gain truth
    when states grow, so truth there settles truth at every compatible
    state.  Group knowledge closes the least-state step under all group
    members.
    """
    if model.mode is not Mode.TELLING:
        raise NotTellingError("fast engine only covers telling mode")
    if not classify(phi).positive:
        raise NotPositiveError("fast engine only covers negation-free formulas")
    bad = validate_state(model, s.valuation, s.messages)
    if bad:
        raise InvalidStateError(bad)
    memo: Dict[Tuple[State, Formula], bool] = {}
    return _fast_eval(model, make_state(s.valuation, s.messages), phi, memo)


def _fast_eval(model: InteractionModel, s: State, phi: Formula, memo) -> bool:
    key = (s, phi)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(phi, Atom):
        out = phi.atom in s.valuation
    elif isinstance(phi, And):
        out = (_fast_eval(model, s, phi.left, memo)
               and _fast_eval(model, s, phi.right, memo))
    elif isinstance(phi, Or):
        out = (_fast_eval(model, s, phi.left, memo)
               or _fast_eval(model, s, phi.right, memo))
    elif isinstance(phi, CK):
        seen = {s}
        stack = [s]
        while stack:
            cur = stack.pop()
            for player in phi.group:
                nxt = _least_view_state(model, cur, player)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        out = all(_fast_eval(model, t, phi.sub, memo) for t in sorted(seen))
    else:
        raise TypeError("unexpected node in a positive formula: %r" % (phi,))
    memo[key] = out
    return out
