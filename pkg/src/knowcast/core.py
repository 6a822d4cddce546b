"""Domain model: players, owned atoms, hyperarc audiences, broadcast messages.

A model fixes a finite set of players, a set of atomic facts partitioned
among them (each atom has exactly one owner), and a hypergraph whose arcs
are the audiences a broadcast can reach.  A state is a pair (valuation,
message set).  Two message regimes are supported:

* telling: a player may only broadcast atoms they own
* forwarding: a player may broadcast any atom, but every message in a
  state must be explainable by a chain that traces the atom back to its
  owner through earlier broadcasts

Indices are used throughout: players and atoms are small ints assigned in
declaration order, and all collections are kept as sorted tuples so that
every value has one canonical form and a total order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union


class KnowcastError(Exception):
    """Base for all errors raised by this package."""


class ModelError(KnowcastError):
    pass


class DuplicateNameError(ModelError):
    pass


class UnknownPlayerError(ModelError):
    pass


class UnknownAtomError(ModelError):
    pass


class EmptyHyperarcError(ModelError):
    pass


class StateError(KnowcastError):
    pass


class NotASubpairError(StateError):
    pass


class WithinInvalidError(StateError):
    def __init__(self, violations: Tuple["Violation", ...]):
        super().__init__("completion target is not a valid state: "
                         + "; ".join(v.detail for v in violations))
        self.violations = violations


class EmptyWordError(KnowcastError):
    pass


class Mode(Enum):
    TELLING = "telling"
    FORWARDING = "forwarding"


class Knowledge(Enum):
    COMMON = "common"
    UNKNOWN = "unknown"


# A hyperarc is a sorted, deduplicated tuple of player indices.
Arc = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class Message:
    """One broadcast: sender tells the audience arc that atom holds.

    The generated order is (sender, arc, atom) lexicographic, which is the
    global total order used for canonical message tuples everywhere.
    """

    sender: int
    arc: Arc
    atom: int


@dataclass(frozen=True, order=True)
class State:
    """A valuation plus a set of sent messages, both in canonical order."""

    valuation: Tuple[int, ...]
    messages: Tuple[Message, ...]

    @property
    def facts(self) -> Tuple[int, ...]:
        return tuple(sorted({m.atom for m in self.messages}))


def make_arc(members: Iterable[int]) -> Arc:
    arc = tuple(sorted(set(members)))
    if not arc:
        raise EmptyHyperarcError("hyperarc must name at least one player")
    return arc


def make_state(valuation: Iterable[int], messages: Iterable[Message]) -> State:
    return State(tuple(sorted(set(valuation))), tuple(sorted(set(messages))))


@dataclass(frozen=True)
class InteractionModel:
    """Players, atom ownership, declared hypergraph and the two regime flags.

    With knowledge = UNKNOWN the declared hypergraph is kept for display but
    evaluation runs over the complete hypergraph (every non-empty audience),
    which is what "the hypergraph is not commonly known" amounts to.
    """

    players: Tuple[str, ...]
    atoms: Tuple[str, ...]
    owner: Tuple[int, ...]
    hypergraph: Tuple[Arc, ...]
    mode: Mode
    knowledge: Knowledge

    @cached_property
    def player_index(self) -> Mapping[str, int]:
        return {name: i for i, name in enumerate(self.players)}

    @cached_property
    def atom_index(self) -> Mapping[str, int]:
        return {name: i for i, name in enumerate(self.atoms)}

    @cached_property
    def effective_hypergraph(self) -> Tuple[Arc, ...]:
        if self.knowledge is Knowledge.UNKNOWN:
            return complete_hypergraph(len(self.players))
        return self.hypergraph

    def atoms_of(self, player: int) -> Tuple[int, ...]:
        return tuple(a for a, o in enumerate(self.owner) if o == player)

    # ---- display helpers ------------------------------------------------

    def arc_label(self, arc: Arc) -> str:
        return "{" + ",".join(self.players[i] for i in arc) + "}"

    def message_label(self, m: Message) -> str:
        return "%s -> %s : %s" % (self.players[m.sender],
                                  self.arc_label(m.arc),
                                  self.atoms[m.atom])

    def valuation_label(self, valuation: Iterable[int]) -> str:
        return "{" + ",".join(self.atoms[a] for a in sorted(set(valuation))) + "}"

    def state_label(self, s: State) -> str:
        msgs = ", ".join(self.message_label(m) for m in s.messages)
        return "V=%s M={%s}" % (self.valuation_label(s.valuation), msgs)


def complete_hypergraph(n_players: int) -> Tuple[Arc, ...]:
    """Every non-empty subset of players, in canonical arc order."""
    arcs = []
    for k in range(1, n_players + 1):
        arcs.extend(itertools.combinations(range(n_players), k))
    return tuple(sorted(arcs))


def build_model(players: Sequence[str],
                atom_owners: Union[Mapping[str, str], Iterable[Tuple[str, str]]],
                hyperarcs: Iterable[Iterable[str]],
                mode: Union[Mode, str] = Mode.TELLING,
                knowledge: Union[Knowledge, str] = Knowledge.COMMON) -> InteractionModel:
    """Validate names and assemble a model.

    ``atom_owners`` maps atom name to owner name (a mapping or an ordered
    iterable of pairs); declaration order fixes the indices.  Atom names
    must not collide with each other or with player names.
    """
    mode = Mode(mode) if not isinstance(mode, Mode) else mode
    knowledge = Knowledge(knowledge) if not isinstance(knowledge, Knowledge) else knowledge

    players = tuple(players)
    seen: set = set()
    for name in players:
        if name in seen:
            raise DuplicateNameError("duplicate player name: %r" % name)
        seen.add(name)
    pidx = {name: i for i, name in enumerate(players)}

    pairs = list(atom_owners.items()) if isinstance(atom_owners, Mapping) else list(atom_owners)
    atoms = []
    owner = []
    for atom_name, owner_name in pairs:
        if atom_name in seen:
            raise DuplicateNameError("duplicate name: %r" % atom_name)
        seen.add(atom_name)
        if owner_name not in pidx:
            raise UnknownPlayerError("atom %r owned by unknown player %r"
                                     % (atom_name, owner_name))
        atoms.append(atom_name)
        owner.append(pidx[owner_name])

    arcs = []
    for raw in hyperarcs:
        members = []
        for name in raw:
            if name not in pidx:
                raise UnknownPlayerError("hyperarc names unknown player %r" % name)
            members.append(pidx[name])
        arcs.append(make_arc(members))
    arcs = tuple(sorted(set(arcs)))

    return InteractionModel(players, tuple(atoms), tuple(owner), arcs, mode, knowledge)


def message_universe(model: InteractionModel) -> Tuple[Message, ...]:
    """All messages the regime admits, in the global total order.

    Telling restricts senders to atoms they own; forwarding admits any atom.
    The sender must belong to the audience arc, and arcs come from the
    effective hypergraph (complete when knowledge is UNKNOWN).
    """
    out = []
    for arc in model.effective_hypergraph:
        for sender in arc:
            if model.mode is Mode.TELLING:
                atoms = model.atoms_of(sender)
            else:
                atoms = range(len(model.atoms))
            for atom in atoms:
                out.append(Message(sender, arc, atom))
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# State structure: restriction, audiences of words, forwarding chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One reason a (valuation, messages) pair fails to be a state."""

    rule: str
    detail: str
    message: Optional[Message] = None
    atom: Optional[int] = None


def restrict(model: InteractionModel, s: State, player: int) -> Tuple[Tuple[int, ...], Tuple[Message, ...]]:
    """Player's view of a state: own true atoms plus messages they received."""
    own = set(model.atoms_of(player))
    v = tuple(a for a in s.valuation if a in own)
    m = tuple(msg for msg in s.messages if player in msg.arc)
    return v, m


def messages_to_word(s: State, word: Sequence[int]) -> Tuple[Message, ...]:
    """Messages whose audience includes every player occurring in the word."""
    if not word:
        raise EmptyWordError("word must name at least one player")
    group = set(word)
    return tuple(m for m in s.messages if group <= set(m.arc))


def leads_to(model: InteractionModel, m1: Message, m2: Message) -> bool:
    """Whether m2 can directly continue a chain after m1.

    Requires the same atom, that m2's sender does not own it, and that
    m2's sender was in m1's audience.
    """
    if m1.atom != m2.atom:
        return False
    if model.owner[m2.atom] == m2.sender:
        return False
    return m2.sender in m1.arc


def closure(model: InteractionModel, messages: Iterable[Message], m: Message) -> Tuple[Message, ...]:
    """Messages of the set reachable from m by chain steps, m included."""
    pool = sorted(set(messages))
    reached = {m}
    frontier = [m]
    while frontier:
        cur = frontier.pop()
        for nxt in pool:
            if nxt not in reached and leads_to(model, cur, nxt):
                reached.add(nxt)
                frontier.append(nxt)
    return tuple(sorted(reached & set(pool)))


def known_set(model: InteractionModel,
              valuation: Iterable[int],
              messages: Iterable[Message],
              atom: int) -> frozenset:
    """Players who can legitimately know the atom, as a least fixed point.

    The owner is seeded when the atom is true; each message about the atom
    whose sender is already in the set adds its whole audience.  A message
    (i, A, p) in M has an explanatory chain exactly when i lands in this
    set, which is the check validation uses.
    """
    if not 0 <= atom < len(model.atoms):
        raise UnknownAtomError("no atom with index %r" % (atom,))
    vset = set(valuation)
    relevant = [m for m in sorted(set(messages)) if m.atom == atom]
    knowers: set = set()
    if atom in vset:
        knowers.add(model.owner[atom])
    changed = True
    while changed:
        changed = False
        for m in relevant:
            if m.sender in knowers and not set(m.arc) <= knowers:
                knowers |= set(m.arc)
                changed = True
    return frozenset(knowers)


def find_explanation(model: InteractionModel,
                     valuation: Iterable[int],
                     messages: Iterable[Message],
                     target: Message) -> Optional[Tuple[Message, ...]]:
    """Shortest chain inside the message set ending at target, or None.

    A chain starts with the owner broadcasting a true atom and each later
    message is sent by someone from the previous audience who does not own
    the atom.  Ties among shortest chains break lexicographically, so the
    result is canonical.  Senders along a shortest chain are automatically
    pairwise distinct.
    """
    msgs = sorted(set(messages))
    if target not in msgs:
        return None
    p = target.atom
    vset = set(valuation)
    pool = [m for m in msgs if m.atom == p]
    starts = [m for m in pool if m.sender == model.owner[p] and p in vset]
    if not starts:
        return None

    best = {m: (m,) for m in starts}
    level = sorted(starts)
    while level:
        if target in best:
            break
        nxt: dict = {}
        for m in level:
            for m2 in pool:
                if m2 in best or not leads_to(model, m, m2):
                    continue
                cand = best[m] + (m2,)
                if m2 not in nxt or cand < nxt[m2]:
                    nxt[m2] = cand
        best.update(nxt)
        level = sorted(nxt)
    chain = best.get(target)
    if chain is not None:
        assert len({m.sender for m in chain}) == len(chain)
    return chain


def validate_state(model: InteractionModel,
                   valuation: Iterable[int],
                   messages: Iterable[Message]) -> Tuple[Violation, ...]:
    """All reasons the pair is not a state of the model; empty means valid.

    Checks membership of every message in the universe (split into the
    specific offending rule for diagnostics), that every broadcast atom is
    actually true, and, under forwarding, that every message is explainable.
    """
    vset = set(valuation)
    msgs = sorted(set(messages))
    out = []

    arcs = set(model.effective_hypergraph)
    n_players = len(model.players)
    n_atoms = len(model.atoms)
    for m in msgs:
        if (not 0 <= m.sender < n_players or not 0 <= m.atom < n_atoms
                or any(not 0 <= i < n_players for i in m.arc)
                or m.arc != make_arc(m.arc)):
            out.append(Violation("malformed", "message is not over this model", m))
            continue
        if m.sender not in m.arc:
            out.append(Violation(
                "sender-not-in-arc",
                "sender %s is outside the audience %s"
                % (model.players[m.sender], model.arc_label(m.arc)), m))
        if m.arc not in arcs:
            out.append(Violation(
                "unknown-arc",
                "audience %s is not a hyperarc of the model" % model.arc_label(m.arc), m))
        if model.mode is Mode.TELLING and model.owner[m.atom] != m.sender:
            out.append(Violation(
                "ownership",
                "sender %s does not own atom %s"
                % (model.players[m.sender], model.atoms[m.atom]), m))

    for a in sorted({m.atom for m in msgs if 0 <= m.atom < n_atoms}):
        if a not in vset:
            out.append(Violation(
                "untrue-fact",
                "atom %s is broadcast but not true" % model.atoms[a], atom=a))

    for a in sorted(vset):
        if not 0 <= a < n_atoms:
            out.append(Violation("malformed", "valuation names no such atom", atom=a))

    if model.mode is Mode.FORWARDING and not out:
        for m in msgs:
            if m.sender not in known_set(model, vset, msgs, m.atom):
                out.append(Violation(
                    "unexplained",
                    "no chain traces %s back to the owner of %s"
                    % (model.message_label(m), model.atoms[m.atom]), m))

    return tuple(out)


def _atom_messages_ok(model: InteractionModel, msgs: Sequence[Message], atom: int) -> bool:
    # Explainability of one atom's messages, owner seeded: the completed
    # valuation always contains every broadcast atom.
    knowers = {model.owner[atom]}
    changed = True
    while changed:
        changed = False
        for m in msgs:
            if m.sender in knowers and not set(m.arc) <= knowers:
                knowers |= set(m.arc)
                changed = True
    return all(m.sender in knowers for m in msgs)


def completion(model: InteractionModel,
               partial: Union[State, Tuple[Iterable[int], Iterable[Message]]],
               within: State) -> State:
    """Least valid state between a partial pair and an enclosing state.

    Keeps the partial messages, adds as few messages of ``within`` as it
    takes to explain them all, and sets the valuation to the partial one
    plus the facts of the final message set.  Among minimum-cardinality
    additions the lexicographically first (per the global message order)
    is chosen, independently per atom, so the result is deterministic.
    A valid partial state comes back unchanged.
    """
    bad = validate_state(model, within.valuation, within.messages)
    if bad:
        raise WithinInvalidError(bad)
    if isinstance(partial, State):
        pv, pm = partial.valuation, partial.messages
    else:
        pv, pm = partial
    valuation = tuple(sorted(set(pv)))
    msgs = tuple(sorted(set(pm)))
    if not (set(valuation) <= set(within.valuation)
            and set(msgs) <= set(within.messages)):
        raise NotASubpairError("partial pair is not contained in the enclosing state")

    added: list = []
    if model.mode is Mode.FORWARDING:
        for atom in sorted({m.atom for m in msgs}):
            have = [m for m in msgs if m.atom == atom]
            if _atom_messages_ok(model, have, atom):
                continue
            pool = [m for m in within.messages
                    if m.atom == atom and m not in set(msgs)]
            found = None
            for size in range(1, len(pool) + 1):
                for combo in itertools.combinations(pool, size):
                    if _atom_messages_ok(model, have + list(combo), atom):
                        found = combo
                        break
                if found is not None:
                    break
            # within is valid, so the chain that explains each message there
            # is available as an addition; a completion always exists
            assert found is not None
            added.extend(found)

    final_msgs = tuple(sorted(set(msgs) | set(added)))
    final_val = tuple(sorted(set(valuation) | {m.atom for m in final_msgs}))
    return State(final_val, final_msgs)
