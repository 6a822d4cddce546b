"""Law catalogue: generators, drivers, witnesses, determinism.

The formula-pool count is cross-checked against a string-based oracle
that builds the same fragment by gluing rendered strings and pushing
them back through the parser, which shares no code with the layered
generator.  The counterexample branch of the sampling driver cannot be
reached through any shipped law (they all hold), so a planted failing
sampler exercises it through the private seam.
"""

import itertools
import json
import random
from dataclasses import replace

import pytest

from knowcast.builtin_models import BUILTIN_NAMES, builtin
from knowcast.core import Knowledge, Mode, message_universe
from knowcast.formula import classify, parse, render
from knowcast.laws import (
    DEFAULT_RANDOM_BUDGET,
    FULL,
    LAW_IDS,
    LAWS,
    NONNESTED_POSITIVE,
    POSITIVE,
    PROP_MONOTONE,
    LawError,
    _LawSpec,
    _run_sampling,
    check_law,
    generate_formulas,
    generate_models,
    replay_witness,
    run_suite,
)
from knowcast.modelfile import write_model_text


# ---------------------------------------------------------------------------
# Formula generation
# ---------------------------------------------------------------------------


def oracle_positive_strings(model):
    """Depth-2 positive fragment rebuilt from strings.

    Layers glue parenthesized renders with the surface syntax and
    canonicalize through parse+render, so agreement with the structural
    generator is agreement of two independent constructions.
    """
    canon = lambda text: render(model, parse(model, text))
    groups = ("{i}", "{j}", "{i,j}")
    pool = {"p"}
    for _ in range(2):
        grown = set(pool)
        for a in pool:
            for b in pool:
                grown.add(canon("(%s) & (%s)" % (a, b)))
                grown.add(canon("(%s) | (%s)" % (a, b)))
        for g in groups:
            for a in pool:
                grown.add(canon("C%s (%s)" % (g, a)))
        pool = grown
    return pool


def test_positive_pool_matches_string_oracle():
    model, _ = builtin("ex1")
    pool = generate_formulas(POSITIVE, [0], [0, 1], 2)
    rendered = {render(model, phi) for phi in pool}
    assert len(rendered) == len(pool) == 91
    assert rendered == oracle_positive_strings(model)


def test_generated_formulas_sit_in_their_fragment():
    flag_of = {
        POSITIVE: "positive",
        NONNESTED_POSITIVE: "nonnested_positive",
        PROP_MONOTONE: "prop_monotone",
    }
    for fragment, flag in flag_of.items():
        pool = generate_formulas(fragment, [0, 1], [0, 1], 2)
        assert pool
        for phi in pool:
            assert getattr(classify(phi), flag), (fragment, phi)
    full = generate_formulas(FULL, [0], [0, 1], 2)
    assert any(not classify(phi).positive for phi in full)


def test_generated_formulas_are_deduplicated():
    for fragment in (POSITIVE, FULL):
        pool = generate_formulas(fragment, [0], [0, 1], 2)
        assert len(set(pool)) == len(pool)


def test_formula_generation_refuses_bad_arguments():
    with pytest.raises(LawError):
        generate_formulas(POSITIVE, [0], [0, 1], 5)
    with pytest.raises(LawError):
        generate_formulas("negative", [0], [0, 1], 2)


def test_pool_growth_is_monotone_in_depth():
    d1 = set(generate_formulas(POSITIVE, [0], [0, 1], 1))
    d2 = set(generate_formulas(POSITIVE, [0], [0, 1], 2))
    assert d1 < d2


# ---------------------------------------------------------------------------
# Model stream
# ---------------------------------------------------------------------------


def test_model_stream_starts_with_builtins():
    stream = generate_models(3, mode=Mode.FORWARDING)
    lead = [next(stream) for _ in range(len(BUILTIN_NAMES))]
    for name, model in zip(BUILTIN_NAMES, lead):
        want = replace(builtin(name)[0], mode=Mode.FORWARDING,
                       knowledge=Knowledge.COMMON)
        assert model == want


def test_model_stream_is_deterministic_and_bounded():
    a = generate_models(11, mode=Mode.TELLING)
    b = generate_models(11, mode=Mode.TELLING)
    for _ in range(30):
        ma, mb = next(a), next(b)
        assert ma == mb
        assert ma.mode is Mode.TELLING
        assert ma.knowledge is Knowledge.COMMON
        assert len(message_universe(ma)) <= 13


def test_model_streams_differ_across_seeds():
    a = [next(generate_models(1, mode=Mode.TELLING)) for _ in range(1)]
    sa = list(itertools.islice(generate_models(1, mode=Mode.TELLING), 12))
    sb = list(itertools.islice(generate_models(2, mode=Mode.TELLING), 12))
    assert sa[:6] == sb[:6]
    assert sa[6:] != sb[6:]
    assert a  # streams are restartable without shared state


# ---------------------------------------------------------------------------
# Catalogue shape
# ---------------------------------------------------------------------------


def test_catalogue_is_canonical():
    assert len(LAW_IDS) == 22
    assert sum(1 for l in LAW_IDS if l.startswith("T_")) == 7
    assert sum(1 for l in LAW_IDS if l.startswith("F_")) == 10
    assert sum(1 for l in LAW_IDS if l.startswith("NEG_")) == 5
    assert list(LAWS) == list(LAW_IDS)
    for law, spec in LAWS.items():
        assert spec.law == law
        assert spec.kind in ("theorem", "expected-failure")
        assert spec.description
        assert (spec.kind == "theorem") == (spec.sample is not None)
        assert (spec.kind == "expected-failure") == (spec.pinned is not None)


def test_unknown_law_is_rejected():
    with pytest.raises(LawError):
        check_law("T_NO_SUCH_LAW")
    with pytest.raises(LawError):
        run_suite(["F_FACTS_NONEMPTY", "bogus"])


# ---------------------------------------------------------------------------
# Pinned expected-failure laws
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("law,instances", [
    ("NEG_EX1", 3), ("NEG_EX2", 3), ("NEG_EX3", 2),
    ("NEG_EX4", 4), ("NEG_EX5", 3),
])
def test_expected_failure_laws_reproduce_their_contrast(law, instances):
    report = check_law(law)
    assert report.kind == "expected-failure"
    assert report.verdict == "all_pass"
    assert report.expected_met
    assert report.instances_checked == instances
    assert report.witness is not None
    assert len(report.witness["observations"]) == instances
    assert replay_witness(report.witness)


def test_witness_replay_detects_tampering():
    witness = check_law("NEG_EX4").witness
    broken = dict(witness)
    obs = [dict(o) for o in witness["observations"]]
    obs[0]["value"] = not obs[0]["value"]
    broken["observations"] = obs
    assert not replay_witness(broken)
    assert replay_witness(witness)


def test_witness_json_round_trip_replays():
    witness = check_law("NEG_EX1").witness
    again = json.loads(json.dumps(witness))
    assert replay_witness(again)


# ---------------------------------------------------------------------------
# Sampling driver
# ---------------------------------------------------------------------------


def test_theorem_law_smoke_small_budget():
    report = check_law("F_FACTS_NONEMPTY", instance_budget=24, seed=3)
    assert report.verdict == "all_pass"
    assert report.expected_met
    assert report.witness is None
    assert report.instances_checked >= 24


def test_check_law_is_deterministic():
    one = check_law("T_MONO_TELLING", instance_budget=36, seed=9)
    two = check_law("T_MONO_TELLING", instance_budget=36, seed=9)
    assert one.to_json() == two.to_json()
    other = check_law("T_MONO_TELLING", instance_budget=36, seed=10)
    assert other.verdict == "all_pass"


def test_explicit_model_override_is_used():
    model, _ = builtin("ex3")
    report = check_law("F_FACTS_NONEMPTY", instance_budget=6,
                       models=[model])
    assert report.verdict == "all_pass"
    assert report.instances_checked >= 1


def _planted_failure(ctx, rng):
    s = ctx.pick_state(rng)
    _, obs = ctx.holds_obs(s, parse(ctx.model, "p | !p"))
    # recorded observation is honest; the claimed pass/fail is not
    return (False, [obs], "planted failure for driver coverage")


def test_driver_counterexample_branch():
    spec = _LawSpec(law="T_PLANTED", kind="theorem", description="planted",
                    mode=Mode.FORWARDING, variant="asis",
                    sample=_planted_failure)
    model, _ = builtin("ex1")
    report = _run_sampling(spec, random.Random(0), 8, [model])
    assert report.verdict == "counterexample"
    assert not report.expected_met
    witness = report.witness
    assert witness is not None
    assert witness["law"] == "T_PLANTED"
    assert witness["model"] == write_model_text(model)
    assert witness["note"] == "planted failure for driver coverage"
    # the observations themselves were recorded faithfully
    assert replay_witness(witness)


def test_driver_budget_counts_random_instances_only():
    spec = LAWS["F_BCAST_NEED"]
    report = _run_sampling(spec, random.Random(5), 12, None)
    assert report.verdict == "all_pass"
    # six builtin models contribute beyond the random budget
    assert report.instances_checked > 12


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def test_run_suite_subset_and_order():
    picked = ["NEG_EX3", "T_MONO_TELLING", "NEG_EX1"]
    result = run_suite(picked, seed=4, instance_budget=12)
    assert [r.law for r in result.reports] == picked
    assert result.seed == 4
    assert result.budget == 12
    assert result.all_expected_met
    data = result.to_json()
    assert set(data) == {"seed", "budget", "all_expected_met", "laws"}
    assert [row["law"] for row in data["laws"]] == picked


def test_run_suite_defaults_to_whole_catalogue():
    result = run_suite(seed=2, instance_budget=2)
    assert [r.law for r in result.reports] == list(LAW_IDS)
    assert result.budget == 2
    assert DEFAULT_RANDOM_BUDGET == 240
