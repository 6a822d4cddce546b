"""Acceptance gate.

One test per numbered criterion, run in order.  Each prints a single
PASS or FAIL line so the verdicts survive into any captured log, and
each timed criterion measures from cold evaluator caches.  Nothing in
here may be weakened to pass: a red criterion is a finding.
"""

import itertools
import json
import subprocess
import sys
import time
from contextlib import contextmanager
from dataclasses import replace

import pytest

from knowcast.builtin_models import builtin
from knowcast.core import (
    Knowledge,
    Mode,
    build_model,
    known_set,
    message_universe,
    validate_state,
)
from knowcast.formula import parse
from knowcast.laws import LAW_IDS, POSITIVE, generate_formulas
from knowcast.modelfile import parse_model_file, write_model_text
from knowcast.semantics import (
    Verdict3,
    enumerate_states,
    enumerate_states_bounded,
    get_evaluator,
    holds,
    holds_bounded,
    holds_positive_fast,
)


@contextmanager
def criterion(number, limit_s=None):
    get_evaluator.cache_clear()
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print("criterion %d: FAIL" % number)
        raise
    elapsed = time.perf_counter() - start
    if limit_s is not None and elapsed > limit_s:
        print("criterion %d: FAIL (%.2fs over the %ds budget)"
              % (number, elapsed, limit_s))
        pytest.fail("criterion %d exceeded %ds: %.2fs"
                    % (number, limit_s, elapsed))
    print("criterion %d: PASS (%.2fs)" % (number, elapsed))


def test_criterion_1_private_fact_and_shared_silence(tmp_path):
    with criterion(1, limit_s=1.0):
        model, s = builtin("ex1")
        assert holds(model, s, parse(model, "K{i} !K{j} p"))
        assert holds(model, s, parse(model, "C{i,j,k} !K{j} p"))
        veiled = replace(model, knowledge=Knowledge.UNKNOWN)
        assert not holds(veiled, s, parse(veiled, "K{i} !K{j} p"))


def test_criterion_2_disjunctive_knowledge_without_either_disjunct():
    with criterion(2, limit_s=1.0):
        model, s = builtin("ex2")
        phi = parse(model, "K{i}(K{j} p | !(K{j} p | K{j} !p))")
        assert holds(model, s, phi)
        assert not holds(model, s, parse(model, "K{i} K{j} p"))
        assert not holds(model, s, parse(model, "K{i} !(K{j} p | K{j} !p)"))


def test_criterion_3_mode_flip_on_the_same_file(tmp_path):
    with criterion(3, limit_s=1.0):
        model, s = builtin("ex3")
        path = tmp_path / "flip.kc"
        path.write_text(write_model_text(model, s))
        loaded = parse_model_file(str(path))
        phi = "K{i} !K{k} p"
        telling = replace(loaded.model, mode=Mode.TELLING)
        assert holds(telling, loaded.state, parse(telling, phi))
        assert not holds(loaded.model, loaded.state, parse(loaded.model, phi))
        assert loaded.model.mode is Mode.FORWARDING


def test_criterion_4_relayed_knowledge_and_its_limits():
    with criterion(4, limit_s=5.0):
        model, s = builtin("ex4")
        assert holds(model, s, parse(model, "K{i} K{k} p"))
        assert not holds(model, s, parse(model, "C{i,k} p"))
        assert not holds(model, s, parse(model, "K{k} K{i} p"))
        veiled = replace(model, knowledge=Knowledge.UNKNOWN)
        refuted = holds_bounded(veiled, s, parse(veiled, "K{i} K{k} p"), 4)
        assert refuted is Verdict3.FALSE


def test_criterion_5_knowing_a_disjunction_of_routes():
    with criterion(5, limit_s=5.0):
        model, s = builtin("ex5")
        assert holds(model, s, parse(model, "K{i}(K{k} p | K{l} p)"))
        assert not holds(model, s, parse(model, "K{i} K{k} p"))
        assert not holds(model, s, parse(model, "K{i} K{l} p"))


def test_criterion_6_full_law_suite():
    with criterion(6, limit_s=600.0):
        proc = subprocess.run(
            [sys.executable, "-m", "knowcast", "laws", "--format", "json"],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        data = json.loads(proc.stdout)
        assert data["all_expected_met"]
        assert data["budget"] >= 200
        rows = {row["law"]: row for row in data["laws"]}
        assert list(rows) == list(LAW_IDS)
        theorems = [r for r in rows.values() if r["kind"] == "theorem"]
        pinned = [r for r in rows.values() if r["kind"] == "expected-failure"]
        assert len(theorems) == 17
        assert len(pinned) == 5
        for row in theorems:
            assert row["verdict"] == "all_pass", row["law"]
            assert row["expected_met"], row["law"]
            assert row["instances_checked"] >= 200, row["law"]
        for row in pinned:
            assert row["verdict"] == "all_pass", row["law"]
            assert row["expected_met"], row["law"]
            assert row["witness"] is not None, row["law"]


def _chain_exists(model, messages, target):
    """Sender-distinct relay back to the owner, by blunt recursion."""
    def grows(chain):
        head = chain[0]
        if head.sender == model.owner[head.atom]:
            return True
        used = {m.sender for m in chain}
        for m in messages:
            if (m.atom == head.atom and m.sender not in used
                    and head.sender in m.arc and m != head):
                if grows((m,) + chain):
                    return True
        return False
    return grows((target,))


def _oracle_knowers(model, valuation, messages, atom):
    vset = set(valuation)
    out = set()
    if atom in vset:
        out.add(model.owner[atom])
    for m in messages:
        if m.atom != atom:
            continue
        if atom in vset and _chain_exists(model, messages, m):
            out |= set(m.arc)
    return out


def test_criterion_7_engine_cross_checks():
    with criterion(7):
        mismatches = 0

        # leg 1: fixed-point audience vs explicit chain search, every
        # message set of up to 8 messages on hypergraphs of <= 3 arcs
        triangle = build_model(
            ("a", "b", "c"), [("p", "a"), ("q", "b")],
            [("a", "b"), ("b", "c"), ("a", "c")],
            Mode.FORWARDING, Knowledge.COMMON)
        for model in (builtin("ex3")[0], builtin("ex4")[0], triangle):
            assert len(model.hypergraph) <= 3
            universe = message_universe(model)
            atoms = range(len(model.atoms))
            full = tuple(atoms)
            for r in range(min(len(universe), 8) + 1):
                for msgs in itertools.combinations(universe, r):
                    for atom in atoms:
                        got = known_set(model, full, msgs, atom)
                        want = _oracle_knowers(model, full, msgs, atom)
                        if set(got) != want:
                            mismatches += 1

        # leg 2: fast positive engine vs the exact one, whole depth-3
        # positive pool on every builtin re-declared as telling
        pool3 = generate_formulas(POSITIVE, [0], [0, 1, 2], 3)
        pool2_cache = {}
        for name in ("ex1", "ex2", "ex3", "ex4", "ex5", "fig1a"):
            model, _ = builtin(name)
            telling = replace(model, mode=Mode.TELLING,
                              knowledge=Knowledge.COMMON)
            ev = get_evaluator(telling)
            players = range(len(telling.players))
            key = len(telling.players)
            if key not in pool2_cache:
                pool2_cache[key] = generate_formulas(POSITIVE, [0], players, 2)
            pools = [pool2_cache[key]]
            if key == 3:
                pools.append(pool3)
            for s in ev.space.states:
                for pool in pools:
                    for phi in pool:
                        if holds_positive_fast(telling, s, phi) != ev.holds(s, phi):
                            mismatches += 1

        # leg 3: every definite bounded verdict agrees with the exact one
        pool = generate_formulas(POSITIVE, [0], [0, 1, 2], 2)
        pool = pool + [parse(builtin("ex1")[0], "!K{j} p"),
                       parse(builtin("ex1")[0], "K{i} !K{j} p")]
        for name in ("ex1", "ex3", "ex4"):
            model, _ = builtin(name)
            ev = get_evaluator(model)
            for bound in range(len(message_universe(model)) + 1):
                for s in enumerate_states_bounded(model, bound).states:
                    for phi in pool:
                        verdict = holds_bounded(model, s, phi, bound)
                        if verdict is Verdict3.UNKNOWN:
                            continue
                        if (verdict is Verdict3.TRUE) != ev.holds(s, phi):
                            mismatches += 1

        assert mismatches == 0


def test_criterion_8_byte_identical_law_reports():
    with criterion(8):
        cmd = [sys.executable, "-m", "knowcast", "laws",
               "--seed", "7", "--format", "json"]
        first = subprocess.run(cmd, capture_output=True)
        second = subprocess.run(cmd, capture_output=True)
        assert first.returncode == 0 and second.returncode == 0
        assert first.stdout == second.stdout
        assert first.stdout.strip()
