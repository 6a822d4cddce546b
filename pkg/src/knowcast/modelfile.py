"""Line-oriented model files.

A file declares the model and one state::

    players: i j k l
    atoms: p@l q@k
    hypergraph: {l,k} {k,j} {j,i}
    mode: forwarding            # telling | forwarding
    knowledge: common           # common | unknown
    valuation: p
    message: l -> {l,k} : p

Everything from '#' to the end of a line is a comment.  Each section
appears at most once except ``message``, which carries one message per
line.  ``players`` and ``mode`` are required; a missing ``knowledge``
means common, and missing ``atoms``, ``hypergraph``, ``valuation`` and
``message`` lines all mean empty.  Files written by :func:`write_model_text`
parse back to the identical model and state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .core import (
    InteractionModel,
    KnowcastError,
    Message,
    State,
    build_model,
    make_state,
)


class ModelFileError(KnowcastError):
    def __init__(self, source: str, line: int, detail: str):
        self.source = source
        self.line = line
        self.detail = detail
        super().__init__("%s:%d: %s" % (source, line, detail))


@dataclass(frozen=True)
class ModelFile:
    model: InteractionModel
    state: State


_ARC = re.compile(r"\{([^{}]*)\}")
_MESSAGE = re.compile(
    r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*->\s*\{([^{}]*)\}\s*:\s*([A-Za-z][A-Za-z0-9_]*)\s*$")
_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def _split_names(payload: str, source: str, line: int) -> List[str]:
    names = payload.split()
    for n in names:
        if not _NAME.match(n):
            raise ModelFileError(source, line, "bad name %r" % n)
    return names


def parse_model_text(text: str, source: str = "<string>") -> ModelFile:
    sections: dict = {}
    message_lines: List[Tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ModelFileError(source, lineno, "expected 'section: content'")
        key, payload = line.split(":", 1)
        key = key.strip()
        if key == "message":
            message_lines.append((lineno, payload.strip()))
            continue
        if key not in ("players", "atoms", "hypergraph", "mode", "knowledge", "valuation"):
            raise ModelFileError(source, lineno, "unknown section %r" % key)
        if key in sections:
            raise ModelFileError(source, lineno, "duplicate section %r" % key)
        sections[key] = (lineno, payload.strip())

    if "players" not in sections:
        raise ModelFileError(source, 0, "missing required section 'players'")
    if "mode" not in sections:
        raise ModelFileError(source, 0, "missing required section 'mode'")

    lineno, payload = sections["players"]
    players = _split_names(payload, source, lineno)

    atom_owners: List[Tuple[str, str]] = []
    if "atoms" in sections:
        lineno, payload = sections["atoms"]
        for part in payload.split():
            if "@" not in part:
                raise ModelFileError(source, lineno, "atoms are written name@owner, got %r" % part)
            atom, owner = part.split("@", 1)
            if not _NAME.match(atom) or not _NAME.match(owner):
                raise ModelFileError(source, lineno, "bad atom declaration %r" % part)
            if owner not in players:
                raise ModelFileError(
                    source, lineno,
                    "atom %r owned by unknown player %r" % (atom, owner))
            atom_owners.append((atom, owner))

    hyperarcs: List[List[str]] = []
    if "hypergraph" in sections:
        lineno, payload = sections["hypergraph"]
        rest = payload
        while rest.strip():
            m = _ARC.match(rest.strip())
            if m is None:
                raise ModelFileError(source, lineno, "hyperarcs are written {a,b,...}")
            members = [p.strip() for p in m.group(1).split(",") if p.strip()]
            if not members:
                raise ModelFileError(source, lineno, "empty hyperarc")
            for name in members:
                if name not in players:
                    raise ModelFileError(
                        source, lineno, "hyperarc names unknown player %r" % name)
            hyperarcs.append(members)
            rest = rest.strip()[m.end():]

    lineno, payload = sections["mode"]
    if payload not in ("telling", "forwarding"):
        raise ModelFileError(source, lineno, "mode must be telling or forwarding")
    mode = payload

    knowledge = "common"
    if "knowledge" in sections:
        lineno, payload = sections["knowledge"]
        if payload not in ("common", "unknown"):
            raise ModelFileError(source, lineno, "knowledge must be common or unknown")
        knowledge = payload

    try:
        model = build_model(players, atom_owners, hyperarcs, mode, knowledge)
    except KnowcastError as err:
        raise ModelFileError(source, 0, str(err)) from err

    valuation: List[int] = []
    if "valuation" in sections:
        lineno, payload = sections["valuation"]
        for name in _split_names(payload, source, lineno):
            if name not in model.atom_index:
                raise ModelFileError(source, lineno, "valuation names unknown atom %r" % name)
            valuation.append(model.atom_index[name])

    messages: List[Message] = []
    for lineno, payload in message_lines:
        messages.append(_parse_message(model, payload, source, lineno))

    return ModelFile(model, make_state(valuation, messages))


def parse_model_file(path: str) -> ModelFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_text(fh.read(), source=path)


def parse_message_text(model: InteractionModel, text: str) -> Message:
    """One message in the file syntax, e.g. ``j -> {j,i} : p``."""
    return _parse_message(model, text, "<message>", 1)


def _parse_message(model: InteractionModel, payload: str, source: str, lineno: int) -> Message:
    m = _MESSAGE.match(payload)
    if m is None:
        raise ModelFileError(source, lineno, "messages are written sender -> {a,b} : atom")
    sender, members_raw, atom = m.group(1), m.group(2), m.group(3)
    if sender not in model.player_index:
        raise ModelFileError(source, lineno, "unknown player %r" % sender)
    members = []
    for name in members_raw.split(","):
        name = name.strip()
        if name not in model.player_index:
            raise ModelFileError(source, lineno, "unknown player %r" % name)
        members.append(model.player_index[name])
    if atom not in model.atom_index:
        raise ModelFileError(source, lineno, "unknown atom %r" % atom)
    if not members:
        raise ModelFileError(source, lineno, "empty audience")
    return Message(model.player_index[sender], tuple(sorted(set(members))), model.atom_index[atom])


def write_model_text(model: InteractionModel, state: Optional[State] = None) -> str:
    """Canonical file text for a model and, optionally, a state."""
    lines = []
    lines.append("players: " + " ".join(model.players))
    if model.atoms:
        lines.append("atoms: " + " ".join(
            "%s@%s" % (a, model.players[model.owner[i]])
            for i, a in enumerate(model.atoms)))
    if model.hypergraph:
        lines.append("hypergraph: " + " ".join(
            model.arc_label(arc) for arc in model.hypergraph))
    lines.append("mode: " + model.mode.value)
    lines.append("knowledge: " + model.knowledge.value)
    if state is not None:
        if state.valuation:
            lines.append("valuation: " + " ".join(
                model.atoms[a] for a in state.valuation))
        for m in state.messages:
            lines.append("message: " + model.message_label(m))
    return "\n".join(lines) + "\n"
