"""Model files and the command line.

CLI tests run the installed module in a subprocess so argument parsing,
exit codes and stream separation are exercised for real.  Exit codes:
0 true, 1 false, 2 bad input, 3 cap, 4 undecided.
"""

import json
import subprocess
import sys

import pytest

from knowcast.builtin_models import BUILTIN_NAMES, builtin
from knowcast.core import make_state
from knowcast.modelfile import (
    ModelFileError,
    parse_message_text,
    parse_model_text,
    write_model_text,
)

pytestmark = pytest.mark.filterwarnings("ignore::ResourceWarning")


def run_cli(*args, cwd=None):
    proc = subprocess.run(
        [sys.executable, "-m", "knowcast", *args],
        capture_output=True, text=True, cwd=cwd)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture(scope="module")
def kc_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("kc")
    code, out, err = run_cli("examples", "--dir", str(d))
    assert code == 0, err
    return d


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------


def test_round_trip_is_identity_for_builtins():
    for name in BUILTIN_NAMES:
        model, state = builtin(name)
        text = write_model_text(model, state)
        back = parse_model_text(text, source=name)
        assert back.model == model
        assert back.state == state
        assert write_model_text(back.model, back.state) == text


def test_omitted_state_sections_mean_the_empty_state():
    model, _ = builtin("ex2")
    text = write_model_text(model)
    assert "valuation" not in text and "message" not in text
    back = parse_model_text(text)
    assert back.model == model
    assert back.state == make_state((), ())


GOOD = """players: a b
atoms: p@a
hypergraph: {a,b}
mode: telling
knowledge: common
valuation: p
message: a -> {a,b} : p
"""


@pytest.mark.parametrize("mangle,line,needle", [
    (lambda t: t.replace("atoms:", "atom:"), 2, "unknown section"),
    (lambda t: t + "players: c\n", 8, "duplicate"),
    (lambda t: t.replace("p@a", "p@z"), 2, "unknown player"),
    (lambda t: t.replace("{a,b}", "{a,z}"), 3, "unknown player"),
    (lambda t: t.replace("mode: telling", "mode: shouting"), 4, "mode"),
    (lambda t: t.replace("a -> {a,b} : p", "a {a,b} p"), 7, "message"),
    (lambda t: t.replace("valuation: p", "valuation: q"), 6, "unknown atom"),
])
def test_parse_errors_carry_line_numbers(mangle, line, needle):
    with pytest.raises(ModelFileError) as err:
        parse_model_text(mangle(GOOD), source="bad.kc")
    assert err.value.source == "bad.kc"
    assert err.value.line == line
    assert needle in err.value.detail


def test_missing_required_sections_are_reported():
    with pytest.raises(ModelFileError) as err:
        parse_model_text("players: a b\natoms: p@a\n")
    assert "hypergraph" in err.value.detail or "mode" in err.value.detail


def test_message_text_resolves_names_without_membership_check():
    model, _ = builtin("ex1")
    # arcs outside the declared hypergraph still resolve; validation is
    # a separate concern
    msg = parse_message_text(model, "i -> {i,k} : p")
    assert model.players[msg.sender] == "i"
    with pytest.raises(ModelFileError):
        parse_message_text(model, "z -> {i,j} : p")
    with pytest.raises(ModelFileError):
        parse_message_text(model, "i -> {i,j} ; p")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def test_check_true_and_false_exits(kc_dir):
    code, out, _ = run_cli("check", str(kc_dir / "ex4.kc"), "K{i} K{k} p")
    assert (code, out.strip()) == (0, "true")
    code, out, _ = run_cli("check", str(kc_dir / "ex4.kc"), "C{i,k} p")
    assert (code, out.strip()) == (1, "false")


def test_check_bounded_unknown_exit(kc_dir):
    code, out, _ = run_cli("check", str(kc_dir / "ex4.kc"), "K{i} K{j} p",
                           "--knowledge", "unknown", "--bound", "3")
    assert code == 4
    assert out.strip() == "unknown"


def test_check_json_payload(kc_dir):
    code, out, _ = run_cli("check", str(kc_dir / "ex5.kc"),
                           "K{i}(K{k} p | K{l} p)", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "true"
    assert data["engine"] == "exact"
    assert data["bound"] is None
    assert data["formula"] == "K{i} (K{k} p | K{l} p)"
    assert data["mode"] == "forwarding"
    assert data["knowledge"] == "common"
    assert data["timings"]["total_s"] >= 0


def test_check_witness_path(kc_dir):
    code, out, _ = run_cli("check", str(kc_dir / "ex4.kc"), "C{i,k} p",
                           "--witness", "--format", "json")
    assert code == 1
    data = json.loads(out)
    witness = data["witness"]
    assert witness["operator"] == "C{k,i} p"
    assert witness["path"]
    for step in witness["path"]:
        assert step["player"] in ("i", "k")
        assert step["state"].startswith("V=")


def test_check_formula_from_file(kc_dir, tmp_path):
    phi = tmp_path / "phi.txt"
    phi.write_text("K{i} K{k} p\n")
    code, out, _ = run_cli("check", str(kc_dir / "ex4.kc"), "-f", str(phi))
    assert (code, out.strip()) == (0, "true")
    code, _, err = run_cli("check", str(kc_dir / "ex4.kc"), "p",
                           "-f", str(phi))
    assert code == 2


def test_check_mode_override_flips_ex3(kc_dir):
    path = str(kc_dir / "ex3.kc")
    code, _, _ = run_cli("check", path, "K{i} !K{k} p")
    assert code == 1
    code, _, _ = run_cli("check", path, "K{i} !K{k} p", "--mode", "telling")
    assert code == 0


def test_check_cap_exit_and_fast_fallback(kc_dir):
    code, _, err = run_cli("check", str(kc_dir / "ex4.kc"), "K{i} K{k} p",
                           "--max-states", "10")
    assert code == 3
    assert "cap" in err and "--max-states" in err
    # telling plus positive formula falls back to the fast engine instead
    code, out, _ = run_cli("check", str(kc_dir / "ex1.kc"), "K{j} p",
                           "--max-states", "2", "--format", "json")
    assert code == 1
    assert json.loads(out)["engine"] == "fast-positive"


def test_check_input_errors(kc_dir):
    code, _, err = run_cli("check", str(kc_dir / "nope.kc"), "p")
    assert code == 2
    code, _, err = run_cli("check", str(kc_dir / "ex1.kc"), "p & & q")
    assert code == 2
    assert "position" in err
    code, _, err = run_cli("check", str(kc_dir / "ex1.kc"), "K{z} p")
    assert code == 2


# ---------------------------------------------------------------------------
# states / validate / explain
# ---------------------------------------------------------------------------


def test_states_count_goldens(kc_dir):
    for name, count in (("ex1", 3), ("ex2", 17), ("ex4", 16)):
        code, out, _ = run_cli("states", str(kc_dir / ("%s.kc" % name)),
                               "--count")
        assert (code, out.strip()) == (0, str(count)), name


def test_states_listing_contains_the_file_state(kc_dir):
    code, out, _ = run_cli("states", str(kc_dir / "ex1.kc"))
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert "V={} M={}" in lines
    assert any("k -> {i,j,k} : p" in l for l in lines)


def test_validate_accepts_builtins_and_rejects_orphans(kc_dir, tmp_path):
    code, out, _ = run_cli("validate", str(kc_dir / "ex5.kc"))
    assert code == 0
    orphan = tmp_path / "orphan.kc"
    text = (kc_dir / "ex5.kc").read_text()
    orphan.write_text(text.replace("message: n -> {n,k} : p\n", ""))
    code, out, _ = run_cli("validate", str(orphan))
    assert code == 1
    assert "unexplained" in out
    assert "k -> {k,j} : p" in out


def test_explain_prints_the_relay_chain(kc_dir):
    code, out, _ = run_cli("explain", str(kc_dir / "ex5.kc"),
                           "-m", "j -> {j,i} : p")
    assert code == 0
    assert out.splitlines() == [
        "n -> {n,k} : p",
        "k -> {k,j} : p",
        "j -> {j,i} : p",
    ]


def test_explain_none_and_missing_message(kc_dir, tmp_path):
    orphan = tmp_path / "orphan2.kc"
    text = (kc_dir / "ex5.kc").read_text()
    orphan.write_text(text.replace("message: n -> {n,k} : p\n", ""))
    code, out, _ = run_cli("explain", str(orphan), "-m", "k -> {k,j} : p")
    assert code == 1
    assert out.strip() == "none"
    code, _, err = run_cli("explain", str(kc_dir / "ex5.kc"),
                           "-m", "l -> {l,j} : p")
    assert code == 2
    assert "not part of the state" in err


# ---------------------------------------------------------------------------
# examples / laws
# ---------------------------------------------------------------------------


def test_examples_listing_and_print(kc_dir):
    code, out, _ = run_cli("examples")
    assert code == 0
    assert out.split() == list(BUILTIN_NAMES)
    code, out, _ = run_cli("examples", "ex2")
    assert code == 0
    back = parse_model_text(out)
    assert (back.model, back.state) == builtin("ex2")


def test_examples_dir_files_parse_and_validate(kc_dir):
    files = sorted(p.name for p in kc_dir.glob("*.kc"))
    assert files == sorted("%s.kc" % n for n in BUILTIN_NAMES)
    for p in kc_dir.glob("*.kc"):
        code, _, _ = run_cli("validate", str(p))
        assert code == 0, p.name


def test_laws_list_is_the_catalogue():
    from knowcast.laws import LAW_IDS
    code, out, _ = run_cli("laws", "--list")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 22
    assert [l.split()[0] for l in lines] == list(LAW_IDS)


def test_laws_single_law_json_and_exit():
    code, out, _ = run_cli("laws", "NEG_EX3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["all_expected_met"] is True
    (row,) = data["laws"]
    assert row["law"] == "NEG_EX3"
    assert row["verdict"] == "all_pass"
    assert "timings" not in data


def test_laws_report_dir(tmp_path):
    out_dir = tmp_path / "report"
    code, out, _ = run_cli("laws", "NEG_EX1", "NEG_EX2",
                           "--report-dir", str(out_dir))
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["law_instances.png", "law_outcomes.png", "laws.csv"]
    header = (out_dir / "laws.csv").read_text().splitlines()[0]
    assert header.split(",")[:3] == ["law", "kind", "verdict"]


def test_unknown_subcommand_fails():
    code, _, err = run_cli("frobnicate")
    assert code == 2
