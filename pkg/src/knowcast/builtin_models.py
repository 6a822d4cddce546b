"""Bundled demonstration models.

Six small instances exercise the interesting corners of the two regimes:
a single broadcast arc, a private side channel, a telling/forwarding
contrast, a four player relay line, and two five player relay shapes
that differ in whether the first hop reaches its audiences jointly or
separately.  Each entry is a model plus one distinguished state.
"""

from __future__ import annotations

from typing import Dict, Tuple

from .core import (
    InteractionModel,
    Knowledge,
    Message,
    Mode,
    State,
    build_model,
    make_state,
)

BUILTIN_NAMES: Tuple[str, ...] = ("ex1", "ex2", "ex3", "ex4", "ex5", "fig1a")


def _msg(model: InteractionModel, sender: str, arc: Tuple[str, ...], atom: str) -> Message:
    return Message(model.player_index[sender],
                   tuple(sorted(model.player_index[p] for p in arc)),
                   model.atom_index[atom])


def _ex1():
    # one broadcast arc over all three players, k owns the only atom,
    # nothing has been said
    model = build_model(
        players=("i", "j", "k"),
        atom_owners=[("p", "k")],
        hyperarcs=[("i", "j", "k")],
        mode=Mode.TELLING,
        knowledge=Knowledge.COMMON,
    )
    return model, make_state((), ())


def _ex2():
    # the audience structure is not commonly known; k told p to i only
    model = build_model(
        players=("i", "j", "k"),
        atom_owners=[("p", "k")],
        hyperarcs=[("i", "k")],
        mode=Mode.TELLING,
        knowledge=Knowledge.UNKNOWN,
    )
    state = make_state((model.atom_index["p"],), (_msg(model, "k", ("i", "k"), "p"),))
    return model, state


def _ex3():
    # i owns p and told j; whether j may pass it on is what separates
    # the two regimes on this instance
    model = build_model(
        players=("i", "j", "k"),
        atom_owners=[("p", "i")],
        hyperarcs=[("i", "j"), ("j", "k")],
        mode=Mode.FORWARDING,
        knowledge=Knowledge.COMMON,
    )
    state = make_state((model.atom_index["p"],), (_msg(model, "i", ("i", "j"), "p"),))
    return model, state


def _ex4():
    # relay line l - k - j - i; the fact travelled the whole line
    model = build_model(
        players=("l", "k", "j", "i"),
        atom_owners=[("p", "l")],
        hyperarcs=[("l", "k"), ("k", "j"), ("j", "i")],
        mode=Mode.FORWARDING,
        knowledge=Knowledge.COMMON,
    )
    state = make_state(
        (model.atom_index["p"],),
        (
            _msg(model, "l", ("l", "k"), "p"),
            _msg(model, "k", ("k", "j"), "p"),
            _msg(model, "j", ("j", "i"), "p"),
        ),
    )
    return model, state


def _ex5():
    # kite: n can start the relay through k or through l, both routes
    # merge at j before reaching i; here the k route was used
    model = build_model(
        players=("n", "k", "l", "j", "i"),
        atom_owners=[("p", "n")],
        hyperarcs=[("n", "k"), ("n", "l"), ("k", "j"), ("l", "j"), ("j", "i")],
        mode=Mode.FORWARDING,
        knowledge=Knowledge.COMMON,
    )
    state = make_state(
        (model.atom_index["p"],),
        (
            _msg(model, "n", ("n", "k"), "p"),
            _msg(model, "k", ("k", "j"), "p"),
            _msg(model, "j", ("j", "i"), "p"),
        ),
    )
    return model, state


def _fig1a():
    # like ex5 but the first hop is one joint broadcast to k and l
    # together, so both routes start informed
    model = build_model(
        players=("n", "k", "l", "j", "i"),
        atom_owners=[("p", "n")],
        hyperarcs=[("n", "k", "l"), ("k", "j"), ("l", "j"), ("j", "i")],
        mode=Mode.FORWARDING,
        knowledge=Knowledge.COMMON,
    )
    state = make_state(
        (model.atom_index["p"],),
        (
            _msg(model, "n", ("n", "k", "l"), "p"),
            _msg(model, "k", ("k", "j"), "p"),
            _msg(model, "j", ("j", "i"), "p"),
        ),
    )
    return model, state


_BUILDERS = {
    "ex1": _ex1,
    "ex2": _ex2,
    "ex3": _ex3,
    "ex4": _ex4,
    "ex5": _ex5,
    "fig1a": _fig1a,
}

_cache: Dict[str, Tuple[InteractionModel, State]] = {}


def builtin(name: str) -> Tuple[InteractionModel, State]:
    """The named bundled model and its distinguished state."""
    if name not in _BUILDERS:
        raise KeyError("no bundled model named %r (have: %s)"
                       % (name, ", ".join(BUILTIN_NAMES)))
    if name not in _cache:
        _cache[name] = _BUILDERS[name]()
    return _cache[name]
