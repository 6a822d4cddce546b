"""Executable laws: general claims checked over many small instances.

Every law is a falsifiable statement about the semantics.  Theorem laws
quantify over a stream of models (the six bundled ones first, then seeded
random ones), states of their enumerated spaces, and formulas drawn from
exhaustive pools plus random deeper ones; a single violated instance turns
the report into a counterexample carrying a replayable witness.  The
NEG_* laws pin down instances where a tempting generalization is expected
to fail; they pass exactly when the documented failure shows up, and their
witness is that pinned instance.

Law runs are deterministic functions of (law, seed, budget): random draws
come from a generator seeded per law, and no wall clock data enters the
reports.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .builtin_models import BUILTIN_NAMES, builtin
from .core import (
    InteractionModel,
    Knowledge,
    KnowcastError,
    Mode,
    State,
    build_model,
    completion,
    make_state,
    message_universe,
    messages_to_word,
    restrict,
)
from .formula import (
    CK,
    And,
    Atom,
    Formula,
    K,
    Not,
    Or,
    classify,
    expand_word,
    facts_of,
    parse,
    render,
)
from .modelfile import parse_message_text, parse_model_text, write_model_text
from .semantics import (
    CapExceededError,
    Evaluator,
    Verdict3,
    get_evaluator,
    holds_bounded,
    indist,
)


class LawError(KnowcastError):
    pass


# fragment identifiers for formula generation
POSITIVE = "positive"
NONNESTED_POSITIVE = "nonnested_positive"
PROP_MONOTONE = "prop_monotone"
FULL = "full"
_FRAGMENTS = (POSITIVE, NONNESTED_POSITIVE, PROP_MONOTONE, FULL)

DEFAULT_RANDOM_BUDGET = 240
_PER_MODEL = 12
_LAW_CAP = 1 << 16
_MAX_UNIVERSE = 13


# ---------------------------------------------------------------------------
# Formula generation
# ---------------------------------------------------------------------------


def generate_formulas(fragment: str, atoms: Sequence[int], players: Sequence[int],
                      max_depth: int) -> List[Formula]:
    """All syntactically distinct formulas of the fragment up to the depth.

    Atoms count depth 0, every connective adds one.  The order is fixed:
    by depth layer, and inside a layer by construction (negations, then
    conjunction pairs, then disjunction pairs, then knowledge operators
    over groups listed smallest first).
    """
    if fragment not in _FRAGMENTS:
        raise LawError("unknown fragment %r" % fragment)
    if max_depth > 4:
        raise LawError("formula generation is meant for depth at most 4")
    atoms = tuple(dict.fromkeys(atoms))
    players = tuple(dict.fromkeys(players))
    groups: List[Tuple[int, ...]] = []
    for k in range(1, len(players) + 1):
        groups.extend(itertools.combinations(sorted(players), k))

    out: List[Formula] = [Atom(a) for a in atoms]
    seen = set(out)

    def add(f: Formula) -> None:
        if f not in seen:
            seen.add(f)
            out.append(f)

    for _ in range(max_depth):
        base = list(out)
        if fragment == FULL:
            for f in base:
                add(Not(f))
        for a in base:
            for b in base:
                add(And(a, b))
        for a in base:
            for b in base:
                add(Or(a, b))
        if fragment != PROP_MONOTONE:
            for g in groups:
                for f in base:
                    if fragment == NONNESTED_POSITIVE and not classify(f).propositional:
                        continue
                    add(CK(g, f))
    return out


@lru_cache(maxsize=64)
def _pool(fragment: str, natoms: int, nplayers: int) -> Tuple[Formula, ...]:
    return tuple(generate_formulas(fragment,
                                   range(min(natoms, 2)),
                                   range(min(nplayers, 3)),
                                   2))


def _random_formula(rng: random.Random, fragment: str, natoms: int,
                    nplayers: int, depth: int) -> Formula:
    if depth == 0:
        return Atom(rng.randrange(natoms))
    if fragment == PROP_MONOTONE:
        kinds = ("atom", "and", "or")
    elif fragment == FULL:
        kinds = ("atom", "not", "and", "or", "ck")
    else:
        kinds = ("atom", "and", "or", "ck")
    kind = rng.choice(kinds)
    if kind == "atom":
        return Atom(rng.randrange(natoms))
    if kind == "not":
        return Not(_random_formula(rng, fragment, natoms, nplayers, depth - 1))
    if kind == "ck":
        group = _pick_group(rng, nplayers)
        sub_fragment = PROP_MONOTONE if fragment == NONNESTED_POSITIVE else fragment
        return CK(group, _random_formula(rng, sub_fragment, natoms, nplayers, depth - 1))
    left = _random_formula(rng, fragment, natoms, nplayers, depth - 1)
    right = _random_formula(rng, fragment, natoms, nplayers, depth - 1)
    return And(left, right) if kind == "and" else Or(left, right)


def _pick_group(rng: random.Random, nplayers: int, min_size: int = 1) -> Tuple[int, ...]:
    size = rng.randint(min_size, nplayers)
    return tuple(sorted(rng.sample(range(nplayers), size)))


def _pick_formula(ctx: "_Ctx", rng: random.Random, fragment: str) -> Formula:
    natoms = len(ctx.model.atoms)
    nplayers = len(ctx.model.players)
    if rng.random() < 0.25:
        return _random_formula(rng, fragment, natoms, nplayers, 3)
    return rng.choice(_pool(fragment, natoms, nplayers))


# ---------------------------------------------------------------------------
# Model generation
# ---------------------------------------------------------------------------

_PLAYER_NAMES = ("a", "b", "c", "d")
_ATOM_NAMES = ("p", "q", "r")


def generate_models(seed: int, max_players: int = 4, max_atoms: int = 3,
                    mode: Mode = Mode.TELLING) -> Iterator[InteractionModel]:
    """Reproducible model stream: the six bundled models first (retold in
    the requested mode, knowledge common), then random ones sized to keep
    their state spaces enumerable.
    """
    mode = Mode(mode) if not isinstance(mode, Mode) else mode
    rng = random.Random("models:%d" % seed)
    for name in BUILTIN_NAMES:
        model, _ = builtin(name)
        yield replace(model, mode=mode, knowledge=Knowledge.COMMON)
    while True:
        yield _random_model(rng, max_players, max_atoms, mode)


def _random_model(rng: random.Random, max_players: int, max_atoms: int,
                  mode: Mode) -> InteractionModel:
    for _ in range(64):
        n = rng.randint(2, max_players)
        natoms = rng.randint(1, max_atoms if n < 4 else min(2, max_atoms))
        players = _PLAYER_NAMES[:n]
        owners = [(_ATOM_NAMES[a], players[rng.randrange(n)]) for a in range(natoms)]
        arcs = []
        for _ in range(rng.randint(1, 3)):
            size = min(rng.choice((1, 2, 2, 2, 3)), n)
            arcs.append(tuple(sorted(rng.sample(players, size))))
        model = build_model(players, owners, arcs, mode, Knowledge.COMMON)
        if len(message_universe(model)) <= _MAX_UNIVERSE:
            return model
    return build_model(("a", "b"), [("p", "a")], [("a", "b")], mode, Knowledge.COMMON)


# ---------------------------------------------------------------------------
# Observations: computed values that a witness can replay bit for bit
# ---------------------------------------------------------------------------


def _state_json(model: InteractionModel, s: State) -> dict:
    return {
        "valuation": [model.atoms[a] for a in s.valuation],
        "messages": [model.message_label(m) for m in s.messages],
    }


def _state_from_json(model: InteractionModel, obj: dict) -> State:
    val = [model.atom_index[a] for a in obj["valuation"]]
    msgs = [parse_message_text(model, t) for t in obj["messages"]]
    return make_state(val, msgs)


def _holds_obs(model: InteractionModel, evaluator: Evaluator, s: State,
               phi: Formula) -> Tuple[bool, dict]:
    value = evaluator.holds(s, phi)
    return value, {
        "kind": "holds",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "formula": render(model, phi),
        "value": value,
    }


def _bounded_obs(model: InteractionModel, s: State, phi: Formula,
                 bound: int) -> Tuple[str, dict]:
    value = holds_bounded(model, s, phi, bound).value
    return value, {
        "kind": "holds_bounded",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "bound": bound,
        "state": _state_json(model, s),
        "formula": render(model, phi),
        "value": value,
    }


def _group_broadcast_value(model: InteractionModel, s: State,
                           group: Tuple[int, ...], atoms: Optional[Iterable[int]]) -> bool:
    allowed = None if atoms is None else set(atoms)
    return any(set(group) <= set(m.arc) and (allowed is None or m.atom in allowed)
               for m in s.messages)


def _group_broadcast_obs(model: InteractionModel, s: State, group: Tuple[int, ...],
                         atoms: Optional[Iterable[int]]) -> Tuple[bool, dict]:
    value = _group_broadcast_value(model, s, group, atoms)
    return value, {
        "kind": "group_broadcast",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "group": [model.players[i] for i in group],
        "atoms": None if atoms is None else sorted(model.atoms[a] for a in atoms),
        "value": value,
    }


def _word_fact_obs(model: InteractionModel, s: State, word: Sequence[int],
                   atom: int) -> Tuple[bool, dict]:
    value = atom in {m.atom for m in messages_to_word(s, word)}
    return value, {
        "kind": "word_fact",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "word": [model.players[i] for i in word],
        "atom": model.atoms[atom],
        "value": value,
    }


def _player_fact_obs(model: InteractionModel, s: State, player: int,
                     atom: int) -> Tuple[bool, dict]:
    v, m = restrict(model, s, player)
    value = atom in set(v) | {msg.atom for msg in m}
    return value, {
        "kind": "player_fact",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "player": model.players[player],
        "atom": model.atoms[atom],
        "value": value,
    }


def _facts_overlap_obs(model: InteractionModel, s: State,
                       phi: Formula) -> Tuple[bool, dict]:
    value = bool(facts_of(phi) & set(s.valuation))
    return value, {
        "kind": "facts_overlap",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "formula": render(model, phi),
        "value": value,
    }


def _completion_indist_obs(model: InteractionModel, s: State,
                           player: int) -> Tuple[bool, dict]:
    c = completion(model, restrict(model, s, player), s)
    value = indist(model, s, c, player)
    return value, {
        "kind": "completion_indist",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "player": model.players[player],
        "value": value,
    }


def _subset_obs(model: InteractionModel, s: State, t: State) -> Tuple[bool, dict]:
    value = set(s.valuation) <= set(t.valuation) and set(s.messages) <= set(t.messages)
    return value, {
        "kind": "subset",
        "mode": model.mode.value,
        "knowledge": model.knowledge.value,
        "state": _state_json(model, s),
        "state2": _state_json(model, t),
        "value": value,
    }


def replay_witness(witness: dict) -> bool:
    """Recompute every observation of a witness; True when all values
    reproduce exactly.
    """
    base = parse_model_text(witness["model"]).model
    for obs in witness["observations"]:
        model = replace(base,
                        mode=Mode(obs["mode"]),
                        knowledge=Knowledge(obs["knowledge"]))
        s = _state_from_json(model, obs["state"])
        kind = obs["kind"]
        if kind == "holds":
            got = get_evaluator(model, _LAW_CAP).holds(s, parse(model, obs["formula"]))
        elif kind == "holds_bounded":
            got = holds_bounded(model, s, parse(model, obs["formula"]),
                                obs["bound"]).value
        elif kind == "group_broadcast":
            group = tuple(model.player_index[n] for n in obs["group"])
            atoms = None if obs["atoms"] is None else [model.atom_index[a] for a in obs["atoms"]]
            got = _group_broadcast_value(model, s, group, atoms)
        elif kind == "word_fact":
            word = [model.player_index[n] for n in obs["word"]]
            got = obs["atom"] in [model.atoms[a] for a in
                                  {m.atom for m in messages_to_word(s, word)}]
        elif kind == "player_fact":
            v, m = restrict(model, s, model.player_index[obs["player"]])
            got = model.atom_index[obs["atom"]] in set(v) | {msg.atom for msg in m}
        elif kind == "facts_overlap":
            got = bool(facts_of(parse(model, obs["formula"])) & set(s.valuation))
        elif kind == "completion_indist":
            player = model.player_index[obs["player"]]
            c = completion(model, restrict(model, s, player), s)
            got = indist(model, s, c, player)
        elif kind == "subset":
            t = _state_from_json(model, obs["state2"])
            got = (set(s.valuation) <= set(t.valuation)
                   and set(s.messages) <= set(t.messages))
        else:
            raise LawError("unknown observation kind %r" % kind)
        if got != obs["value"]:
            return False
    return True


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LawReport:
    law: str
    kind: str
    instances_checked: int
    skipped: int
    verdict: str                      # "all_pass" | "counterexample"
    expected_met: bool
    witness: Optional[dict]
    notes: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "kind": self.kind,
            "instances_checked": self.instances_checked,
            "skipped": self.skipped,
            "verdict": self.verdict,
            "expected_met": self.expected_met,
            "witness": self.witness,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class SuiteResult:
    seed: int
    budget: int
    reports: Tuple[LawReport, ...]

    @property
    def all_expected_met(self) -> bool:
        return all(r.expected_met for r in self.reports)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "budget": self.budget,
            "all_expected_met": self.all_expected_met,
            "laws": [r.to_json() for r in self.reports],
        }


# ---------------------------------------------------------------------------
# Sampling driver for the theorem laws
# ---------------------------------------------------------------------------


class _Ctx:
    """Evaluation context for one model of the stream.

    ``variant`` selects what the law actually quantifies over: the model
    as declared, the same model with the complete hypergraph (claims
    stated without a commonly known hypergraph), or the declared model
    plus a complete-hypergraph twin for comparison laws.
    """

    def __init__(self, base_model: InteractionModel, variant: str):
        self.base = base_model
        if variant == "complete":
            self.model = replace(base_model, knowledge=Knowledge.UNKNOWN)
        else:
            self.model = base_model
        self.evaluator = get_evaluator(self.model, _LAW_CAP)
        self.space = self.evaluator.space
        self.twin_model: Optional[InteractionModel] = None
        self.twin: Optional[Evaluator] = None
        if variant == "with_complete_twin":
            self.twin_model = replace(base_model, knowledge=Knowledge.UNKNOWN)
            self.twin = get_evaluator(self.twin_model, _LAW_CAP)

    def pick_state(self, rng: random.Random) -> State:
        return rng.choice(self.space.states)

    def holds_obs(self, s: State, phi: Formula) -> Tuple[bool, dict]:
        return _holds_obs(self.model, self.evaluator, s, phi)

    def twin_holds_obs(self, s: State, phi: Formula) -> Tuple[bool, dict]:
        assert self.twin is not None and self.twin_model is not None
        return _holds_obs(self.twin_model, self.twin, s, phi)


_SampleFn = Callable[[_Ctx, random.Random], Optional[Tuple[bool, List[dict], str]]]


@dataclass(frozen=True)
class _LawSpec:
    law: str
    kind: str
    description: str
    mode: Mode
    variant: str
    sample: Optional[_SampleFn] = None
    pinned: Optional[Callable[[], Tuple[int, bool, dict]]] = None


def _run_sampling(spec: _LawSpec, rng: random.Random, budget: int,
                  models: Optional[Iterable[InteractionModel]]) -> LawReport:
    checked = 0
    random_checked = 0
    skipped = 0
    if models is None:
        stream: Iterator[InteractionModel] = generate_models(
            _stream_seed(rng), mode=spec.mode)
        builtin_count = len(BUILTIN_NAMES)
    else:
        stream = iter(models)
        builtin_count = 0

    model_no = -1
    while True:
        model_no += 1
        is_builtin = model_no < builtin_count
        if not is_builtin and random_checked >= budget:
            break
        try:
            model = next(stream)
        except StopIteration:
            break
        try:
            ctx = _Ctx(model, spec.variant)
        except CapExceededError:
            skipped += 1
            continue
        for _ in range(_PER_MODEL):
            result = spec.sample(ctx, rng)
            if result is None:
                continue
            ok, observations, note = result
            checked += 1
            if not is_builtin:
                random_checked += 1
            if not ok:
                witness = {
                    "law": spec.law,
                    "model": write_model_text(ctx.base),
                    "note": note,
                    "observations": observations,
                }
                return LawReport(spec.law, spec.kind, checked, skipped,
                                 "counterexample", False, witness)
            if not is_builtin and random_checked >= budget:
                break
    return LawReport(spec.law, spec.kind, checked, skipped, "all_pass", True, None)


def _stream_seed(rng: random.Random) -> int:
    return rng.randrange(1 << 30)


def _run_pinned(spec: _LawSpec) -> LawReport:
    checked, found, witness = spec.pinned()
    verdict = "all_pass" if found else "counterexample"
    notes = ("passes when the documented counterexample to the tempting "
             "generalization is reproduced",)
    return LawReport(spec.law, spec.kind, checked, 0, verdict, found, witness, notes)


# ---------------------------------------------------------------------------
# Theorem law samplers
# ---------------------------------------------------------------------------


def _sample_mono(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    sups = [t for t in ctx.space.states
            if set(s.valuation) <= set(t.valuation)
            and set(s.messages) <= set(t.messages)]
    t = rng.choice(sups)
    phi = _pick_formula(ctx, rng, POSITIVE)
    v1, o1 = ctx.holds_obs(s, phi)
    v2, o2 = ctx.holds_obs(t, phi)
    _, o3 = _subset_obs(ctx.model, s, t)
    ok = (not v1) or v2
    return ok, [o3, o1, o2], "a positive formula true at a state stays true at larger states"


def _sample_h_irrelevant(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    phi = _pick_formula(ctx, rng, POSITIVE)
    v1, o1 = ctx.holds_obs(s, phi)
    v2, o2 = ctx.twin_holds_obs(s, phi)
    return v1 == v2, [o1, o2], ("positive formulas agree between the declared "
                                "and the complete hypergraph at compliant states")


def _sample_k_disj(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    i = rng.randrange(len(ctx.model.players))
    f1 = _pick_formula(ctx, rng, POSITIVE)
    f2 = _pick_formula(ctx, rng, POSITIVE)
    v, o = ctx.holds_obs(s, K(i, Or(f1, f2)))
    va, oa = ctx.holds_obs(s, K(i, f1))
    vb, ob = ctx.holds_obs(s, K(i, f2))
    return v == (va or vb), [o, oa, ob], \
        "individual knowledge distributes over disjunctions of positive formulas"


def _sample_ck_disj(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    group = _pick_group(rng, len(ctx.model.players))
    f1 = _pick_formula(ctx, rng, POSITIVE)
    f2 = _pick_formula(ctx, rng, POSITIVE)
    v, o = ctx.holds_obs(s, CK(group, Or(f1, f2)))
    va, oa = ctx.holds_obs(s, CK(group, f1))
    vb, ob = ctx.holds_obs(s, CK(group, f2))
    return v == (va or vb), [o, oa, ob], \
        "group knowledge distributes over disjunctions of positive formulas"


def _sample_chain_equiv(ctx: _Ctx, rng: random.Random):
    nplayers = len(ctx.model.players)
    if nplayers < 2:
        return None
    group = _pick_group(rng, nplayers, min_size=2)
    word = list(group)
    rng.shuffle(word)
    if rng.random() < 0.5:
        word.append(rng.choice(list(group)))
    atom = rng.randrange(len(ctx.model.atoms))
    s = ctx.pick_state(rng)
    v1, o1 = ctx.holds_obs(s, expand_word(word, Atom(atom)))
    v2, o2 = _word_fact_obs(ctx.model, s, word, atom)
    v3, o3 = ctx.holds_obs(s, CK(group, Atom(atom)))
    ok = v1 == v2 == v3
    return ok, [o1, o2, o3], ("knowledge along a word covering two or more "
                              "players, a message to the whole word, and group "
                              "knowledge of the fact all coincide")


def _words_covering(group: Tuple[int, ...], max_len: int):
    members = tuple(sorted(group))
    for length in range(len(members), max_len + 1):
        for word in itertools.product(members, repeat=length):
            if set(word) == set(members):
                yield word


def _sample_perm(ctx: _Ctx, rng: random.Random):
    group = _pick_group(rng, len(ctx.model.players))
    phi = _pick_formula(ctx, rng, POSITIVE)
    s = ctx.pick_state(rng)
    c, oc = ctx.holds_obs(s, CK(group, phi))
    note = ("group knowledge of a positive formula holds exactly when "
            "knowledge holds along some word covering the group")
    if c:
        v, o = ctx.holds_obs(s, expand_word(tuple(sorted(group)), phi))
        return v, [oc, o], note
    for word in _words_covering(group, len(group) + 1):
        v, o = ctx.holds_obs(s, expand_word(word, phi))
        if v:
            return False, [oc, o], note
    return True, [oc], note


def _sample_bcast_need(ctx: _Ctx, rng: random.Random):
    nplayers = len(ctx.model.players)
    if nplayers < 2:
        return None
    group = _pick_group(rng, nplayers, min_size=2)
    phi = _pick_formula(ctx, rng, POSITIVE)
    s = ctx.pick_state(rng)
    c, oc = ctx.holds_obs(s, CK(group, phi))
    if not c:
        return True, [oc], "vacuous"
    v, o = _group_broadcast_obs(ctx.model, s, group, facts_of(phi))
    return v, [oc, o], ("group knowledge of a positive formula needs a message "
                        "about one of its facts reaching the whole group")


def _sample_facts_nonempty(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    phi = _pick_formula(ctx, rng, POSITIVE)
    v, o = ctx.holds_obs(s, phi)
    if not v:
        return True, [o], "vacuous"
    v2, o2 = _facts_overlap_obs(ctx.model, s, phi)
    return v2, [o, o2], "a true positive formula mentions at least one true atom"


def _sample_ck_fact_iff(ctx: _Ctx, rng: random.Random):
    nplayers = len(ctx.model.players)
    if nplayers < 2:
        return None
    group = _pick_group(rng, nplayers, min_size=2)
    atom = rng.randrange(len(ctx.model.atoms))
    s = ctx.pick_state(rng)
    v1, o1 = ctx.holds_obs(s, CK(group, Atom(atom)))
    v2, o2 = _group_broadcast_obs(ctx.model, s, group, (atom,))
    return v1 == v2, [o1, o2], ("a group commonly knows a fact exactly when "
                                "some message about it reached the whole group")


def _sample_ki_fact_iff(ctx: _Ctx, rng: random.Random):
    player = rng.randrange(len(ctx.model.players))
    atom = rng.randrange(len(ctx.model.atoms))
    s = ctx.pick_state(rng)
    v1, o1 = ctx.holds_obs(s, K(player, Atom(atom)))
    v2, o2 = _player_fact_obs(ctx.model, s, player, atom)
    return v1 == v2, [o1, o2], ("a player knows a fact exactly when they own it "
                                "truly or received a message about it")


def _sample_ki_fact_h_irrelevant(ctx: _Ctx, rng: random.Random):
    player = rng.randrange(len(ctx.model.players))
    atom = rng.randrange(len(ctx.model.atoms))
    s = ctx.pick_state(rng)
    v1, o1 = ctx.holds_obs(s, K(player, Atom(atom)))
    v2, o2 = ctx.twin_holds_obs(s, K(player, Atom(atom)))
    return v1 == v2, [o1, o2], ("individual knowledge of a fact does not depend "
                                "on the hypergraph")


def _sample_completion_indist(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    player = rng.randrange(len(ctx.model.players))
    v, o = _completion_indist_obs(ctx.model, s, player)
    return v, [o], ("completing a player's view inside the state lands on a "
                    "state that player cannot tell from the original")


def _sample_ck_fact_disj(ctx: _Ctx, rng: random.Random):
    natoms = len(ctx.model.atoms)
    group = _pick_group(rng, len(ctx.model.players))
    count = rng.randint(1, natoms)
    atoms = sorted(rng.sample(range(natoms), count))
    s = ctx.pick_state(rng)
    disj: Formula = Atom(atoms[0])
    for a in atoms[1:]:
        disj = Or(disj, Atom(a))
    v, o = ctx.holds_obs(s, CK(group, disj))
    obs = [o]
    rhs = False
    for a in atoms:
        va, oa = ctx.holds_obs(s, CK(group, Atom(a)))
        obs.append(oa)
        rhs = rhs or va
    return v == rhs, obs, ("group knowledge distributes over disjunctions "
                           "of facts")


def _sample_nonnested_h_irrelevant(ctx: _Ctx, rng: random.Random):
    s = ctx.pick_state(rng)
    phi = _pick_formula(ctx, rng, NONNESTED_POSITIVE)
    v1, o1 = ctx.holds_obs(s, phi)
    v2, o2 = ctx.twin_holds_obs(s, phi)
    return v1 == v2, [o1, o2], ("positive formulas without nested knowledge "
                                "agree between the declared and the complete "
                                "hypergraph at compliant states")


def _sample_disj_prop(ctx: _Ctx, rng: random.Random):
    group = _pick_group(rng, len(ctx.model.players))
    f1 = _pick_formula(ctx, rng, PROP_MONOTONE)
    f2 = _pick_formula(ctx, rng, PROP_MONOTONE)
    s = ctx.pick_state(rng)
    v, o = ctx.holds_obs(s, CK(group, Or(f1, f2)))
    va, oa = ctx.holds_obs(s, CK(group, f1))
    vb, ob = ctx.holds_obs(s, CK(group, f2))
    return v == (va or vb), [o, oa, ob], \
        ("group knowledge distributes over disjunctions of negation-free "
         "propositional formulas")


# ---------------------------------------------------------------------------
# Pinned expected-failure laws
# ---------------------------------------------------------------------------


def _pinned_obs(model: InteractionModel, s: State, text: str,
                expected: bool) -> Tuple[bool, dict]:
    value, obs = _holds_obs(model, get_evaluator(model, _LAW_CAP), s,
                            parse(model, text))
    return value == expected, obs


def _neg_ex1():
    model, s = builtin("ex1")
    twin = replace(model, knowledge=Knowledge.UNKNOWN)
    checks = [
        _pinned_obs(model, s, "K{i} !K{j} p", True),
        _pinned_obs(model, s, "C{i,j,k} !K{j} p", True),
        _pinned_obs(twin, s, "K{i} !K{j} p", False),
    ]
    witness = {
        "law": "NEG_EX1",
        "model": write_model_text(model),
        "note": ("a negated knowledge claim holds under the declared "
                 "hypergraph yet fails under the complete one, so hypergraph "
                 "irrelevance does not extend beyond positive formulas"),
        "observations": [obs for _, obs in checks],
    }
    return len(checks), all(ok for ok, _ in checks), witness


def _neg_ex2():
    model, s = builtin("ex2")
    checks = [
        _pinned_obs(model, s, "K{i}(K{j} p | !(K{j} p | K{j} !p))", True),
        _pinned_obs(model, s, "K{i} K{j} p", False),
        _pinned_obs(model, s, "K{i} !(K{j} p | K{j} !p)", False),
    ]
    witness = {
        "law": "NEG_EX2",
        "model": write_model_text(model),
        "note": ("knowledge of a disjunction with a negated disjunct holds "
                 "while neither disjunct is known, so distribution over "
                 "disjunction needs negation-freeness"),
        "observations": [obs for _, obs in checks],
    }
    return len(checks), all(ok for ok, _ in checks), witness


def _neg_ex3():
    model, s = builtin("ex3")
    telling = replace(model, mode=Mode.TELLING)
    checks = [
        _pinned_obs(telling, s, "K{i} !K{k} p", True),
        _pinned_obs(model, s, "K{i} !K{k} p", False),
    ]
    witness = {
        "law": "NEG_EX3",
        "model": write_model_text(model),
        "note": ("the same state decides a negated knowledge claim "
                 "differently under telling and forwarding, so the regimes "
                 "genuinely differ"),
        "observations": [obs for _, obs in checks],
    }
    return len(checks), all(ok for ok, _ in checks), witness


def _neg_ex4():
    model, s = builtin("ex4")
    twin = replace(model, knowledge=Knowledge.UNKNOWN)
    ok1, obs1 = _pinned_obs(model, s, "K{i} K{k} p", True)
    value, obs2 = _bounded_obs(twin, s, parse(twin, "K{i} K{k} p"), 4)
    ok2 = value == Verdict3.FALSE.value
    ok3, obs3 = _pinned_obs(model, s, "C{i,k} p", False)
    ok4, obs4 = _pinned_obs(model, s, "K{k} K{i} p", False)
    witness = {
        "law": "NEG_EX4",
        "model": write_model_text(model),
        "note": ("under forwarding the declared hypergraph matters even for "
                 "positive nested knowledge, and knowledge along one word no "
                 "longer gives group knowledge: the reversed word fails"),
        "observations": [obs1, obs2, obs3, obs4],
    }
    return 4, ok1 and ok2 and ok3 and ok4, witness


def _neg_ex5():
    model, s = builtin("ex5")
    checks = [
        _pinned_obs(model, s, "K{i}(K{k} p | K{l} p)", True),
        _pinned_obs(model, s, "K{i} K{k} p", False),
        _pinned_obs(model, s, "K{i} K{l} p", False),
    ]
    witness = {
        "law": "NEG_EX5",
        "model": write_model_text(model),
        "note": ("a known disjunction of knowledge claims with neither "
                 "disjunct known: distribution fails once knowledge operators "
                 "nest under forwarding"),
        "observations": [obs for _, obs in checks],
    }
    return len(checks), all(ok for ok, _ in checks), witness


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

_THEOREM = "theorem"
_EXPECTED_FAILURE = "expected-failure"

_SPECS: Tuple[_LawSpec, ...] = (
    _LawSpec("T_MONO_TELLING", _THEOREM,
             "positive formulas persist when states grow (telling)",
             Mode.TELLING, "asis", _sample_mono),
    _LawSpec("T_H_IRRELEVANT", _THEOREM,
             "positive truth at compliant states ignores the hypergraph (telling)",
             Mode.TELLING, "with_complete_twin", _sample_h_irrelevant),
    _LawSpec("T_K_DISJ", _THEOREM,
             "individual knowledge distributes over positive disjunction (telling)",
             Mode.TELLING, "complete", _sample_k_disj),
    _LawSpec("T_CK_DISJ", _THEOREM,
             "group knowledge distributes over positive disjunction (telling)",
             Mode.TELLING, "complete", _sample_ck_disj),
    _LawSpec("T_CHAIN_EQUIV", _THEOREM,
             "word knowledge, a word-wide message, and group knowledge of a "
             "fact coincide (telling)",
             Mode.TELLING, "complete", _sample_chain_equiv),
    _LawSpec("T_PERM", _THEOREM,
             "group knowledge of positives equals knowledge along some "
             "covering word (telling)",
             Mode.TELLING, "complete", _sample_perm),
    _LawSpec("T_BCAST_NEED", _THEOREM,
             "group knowledge of positives needs a group-wide message about "
             "one of its facts (telling)",
             Mode.TELLING, "complete", _sample_bcast_need),
    _LawSpec("F_FACTS_NONEMPTY", _THEOREM,
             "true positive formulas mention a true atom (forwarding)",
             Mode.FORWARDING, "asis", _sample_facts_nonempty),
    _LawSpec("F_BCAST_NEED", _THEOREM,
             "group knowledge of positives needs a group-wide message about "
             "one of its facts (forwarding)",
             Mode.FORWARDING, "asis", _sample_bcast_need),
    _LawSpec("F_CK_FACT_IFF", _THEOREM,
             "group knowledge of a fact is exactly a group-wide message "
             "about it (forwarding)",
             Mode.FORWARDING, "asis", _sample_ck_fact_iff),
    _LawSpec("F_KI_FACT_IFF", _THEOREM,
             "individual knowledge of a fact is ownership or receipt "
             "(forwarding)",
             Mode.FORWARDING, "asis", _sample_ki_fact_iff),
    _LawSpec("F_KI_FACT_H_IRRELEVANT", _THEOREM,
             "individual knowledge of a fact ignores the hypergraph "
             "(forwarding)",
             Mode.FORWARDING, "with_complete_twin", _sample_ki_fact_h_irrelevant),
    _LawSpec("F_COMPLETION_INDIST", _THEOREM,
             "completing a view inside a state is invisible to the viewer "
             "(forwarding)",
             Mode.FORWARDING, "asis", _sample_completion_indist),
    _LawSpec("F_CK_FACT_DISJ", _THEOREM,
             "group knowledge distributes over disjunctions of facts "
             "(forwarding)",
             Mode.FORWARDING, "asis", _sample_ck_fact_disj),
    _LawSpec("F_MONO", _THEOREM,
             "positive formulas persist when states grow (forwarding)",
             Mode.FORWARDING, "asis", _sample_mono),
    _LawSpec("F_NONNESTED_H_IRRELEVANT", _THEOREM,
             "positive non-nested truth at compliant states ignores the "
             "hypergraph (forwarding)",
             Mode.FORWARDING, "with_complete_twin", _sample_nonnested_h_irrelevant),
    _LawSpec("F_DISJ_PROP", _THEOREM,
             "group knowledge distributes over disjunction of negation-free "
             "propositional formulas (forwarding)",
             Mode.FORWARDING, "asis", _sample_disj_prop),
    _LawSpec("NEG_EX1", _EXPECTED_FAILURE,
             "hypergraph irrelevance fails with negation (telling)",
             Mode.TELLING, "asis", pinned=_neg_ex1),
    _LawSpec("NEG_EX2", _EXPECTED_FAILURE,
             "knowledge does not distribute once negation appears (telling)",
             Mode.TELLING, "asis", pinned=_neg_ex2),
    _LawSpec("NEG_EX3", _EXPECTED_FAILURE,
             "telling and forwarding disagree on a negated claim",
             Mode.FORWARDING, "asis", pinned=_neg_ex3),
    _LawSpec("NEG_EX4", _EXPECTED_FAILURE,
             "hypergraph relevance and word asymmetry under forwarding",
             Mode.FORWARDING, "asis", pinned=_neg_ex4),
    _LawSpec("NEG_EX5", _EXPECTED_FAILURE,
             "knowledge does not distribute over known disjunctions of "
             "knowledge (forwarding)",
             Mode.FORWARDING, "asis", pinned=_neg_ex5),
)

LAWS: Dict[str, _LawSpec] = {spec.law: spec for spec in _SPECS}
LAW_IDS: Tuple[str, ...] = tuple(spec.law for spec in _SPECS)


def check_law(law: str, instance_budget: Optional[int] = None, seed: int = 7,
              models: Optional[Iterable[InteractionModel]] = None) -> LawReport:
    """Check one law; deterministic in (law, seed, budget).

    ``models`` substitutes the model stream, mainly for tests; the budget
    then caps instances over the given models.
    """
    if law not in LAWS:
        raise LawError("unknown law %r (see LAW_IDS)" % law)
    spec = LAWS[law]
    budget = DEFAULT_RANDOM_BUDGET if instance_budget is None else instance_budget
    if spec.pinned is not None:
        return _run_pinned(spec)
    rng = random.Random("%s:%d" % (spec.law, seed))
    return _run_sampling(spec, rng, budget, models)


def run_suite(laws: Optional[Sequence[str]] = None, seed: int = 7,
              instance_budget: Optional[int] = None) -> SuiteResult:
    """Check several laws (all by default) and collect the reports."""
    ids = LAW_IDS if laws is None else tuple(laws)
    for law in ids:
        if law not in LAWS:
            raise LawError("unknown law %r (see LAW_IDS)" % law)
    budget = DEFAULT_RANDOM_BUDGET if instance_budget is None else instance_budget
    reports = tuple(check_law(law, budget, seed) for law in ids)
    return SuiteResult(seed, budget, reports)
