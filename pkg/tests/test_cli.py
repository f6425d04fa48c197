import csv
import io
import json

import pytest

from coopet.cli import main
from coopet.documents import serialize_game
from coopet.game import Game, random_monotone_game

from conftest import game_from_oracle, glove_oracle


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture
def glove_file(tmp_path):
    path = tmp_path / "glove.json"
    path.write_text(serialize_game(game_from_oracle(*glove_oracle())))
    return path


@pytest.fixture
def majority_file(tmp_path):
    code, text = run("generate", "weighted-majority", "--quota", 2, "--weights", "1,1,1")
    assert code == 0
    path = tmp_path / "maj.json"
    path.write_text(text)
    return path


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_compute_glove_banzhaf(glove_file):
    code, text = run("compute", "--game", glove_file, "--coalition", "2,3", "--preset", "banzhaf")
    assert code == 0
    row = json.loads(text)["rows"][0]
    assert (row["phi"], row["coop"], row["absolute"]) == ("1/2", "-1/2", "-1")


def test_compute_uniform_shapley_case_three(tmp_path):
    code, text = run("generate", "unanimity", "--n", 4, "--carrier", "1,2,3")
    path = write(tmp_path, "u.json", text)
    code, text = run("compute", "--game", path, "--coalition", "1,2,4", "--preset", "su")
    assert code == 0 and json.loads(text)["rows"][0]["coop"] == "1/3"


def test_compute_singletons(glove_file):
    code, text = run("compute", "--game", glove_file, "--size", 1)
    rows = json.loads(text)["rows"]
    assert len(rows) == 3
    assert all(r["coop"] == r["phi"] and r["absolute"] == "1" for r in rows)


def test_table_majority_csv(majority_file):
    code, text = run("table", "--game", majority_file, "--preset", "banzhaf", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 7
    assert next(r for r in rows if r["coalition"] == "1,2")["coop"] == "0"


def test_table_grand_unanimity(tmp_path):
    _, text = run("generate", "unanimity", "--n", 3, "--carrier", "1,2,3")
    path = write(tmp_path, "uN.json", text)
    for preset in ("so", "su"):
        _, out = run("table", "--game", path, "--preset", preset)
        for row in json.loads(out)["rows"]:
            assert row["coop"] == ("1" if row["s"] == 3 else f"1/{3 - row['s'] + 1}")
    # Banzhaf weighting gives 1 / 2**(n-s) instead
    _, out = run("table", "--game", path, "--preset", "banzhaf")
    assert [r["coop"] for r in json.loads(out)["rows"]] == ["1/4", "1/4", "1/2", "1/4", "1/2", "1/2", "1"]


def test_table_cap(tmp_path, monkeypatch, capsys):
    big = Game.from_values(17, [0] * (1 << 17))
    path = write(tmp_path, "big.json", serialize_game(big))
    code, text = run("table", "--game", path)
    assert code == 2 and text == ""
    assert "--max-n" in capsys.readouterr().err
    small = write(tmp_path, "small.json", serialize_game(random_monotone_game(3, 0)))
    monkeypatch.setenv("COOPET_MAX_N", "2")
    assert run("table", "--game", small)[0] == 2
    assert run("table", "--game", small, "--max-n", 3)[0] == 0


def test_table_jobs_identical(majority_file):
    a = run("table", "--game", majority_file, "--format", "csv", "--jobs", 1)
    b = run("table", "--game", majority_file, "--format", "csv", "--jobs", 3)
    assert a == b


def test_attitude_command(majority_file):
    code, text = run("attitude", "--game", majority_file, "--coalition", "1,2", "--opponent", "3")
    assert code == 0 and json.loads(text)["rows"][0]["attitude"] == "-1"


def test_classify_command(glove_file):
    code, text = run("classify", "--game", glove_file, "--coalition", "2,3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert rows[-1]["class"] == "fully-complementary"


def test_mobius_command(glove_file, tmp_path):
    code, text = run("mobius", "--game", glove_file)
    doc = json.loads(text)
    assert code == 0 and doc["reconstruction_ok"]
    assert {tuple(r["coalition"]): r["dividend"] for r in doc["rows"]} == {
        ("1", "2"): "1", ("1", "3"): "1", ("1", "2", "3"): "-1"}
    _, text = run("generate", "unanimity", "--n", 4, "--carrier", "2,4")
    code, text = run("mobius", "--game", write(tmp_path, "u.json", text))
    assert json.loads(text)["rows"] == [{"coalition": ["2", "4"], "dividend": "1"}]


def test_generate_is_deterministic():
    a = run("generate", "random-monotone", "--n", 4, "--seed", 7)
    assert a == run("generate", "random-monotone", "--n", 4, "--seed", 7)
    assert a != run("generate", "random-monotone", "--n", 4, "--seed", 8)


def test_generate_unanimity_document():
    _, text = run("generate", "unanimity", "--n", 3, "--carrier", "1,2")
    assert json.loads(text)["worth"] == ["0", "0", "0", "1", "0", "0", "0", "1"]


def test_check_axioms_small():
    code, text = run("check-axioms", "--trials", 4, "--battery-n", 3, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 10 and all(r["matches"] == "True" for r in rows)


def test_validate_flags_bad_family(glove_file, tmp_path):
    fam = write(tmp_path, "q.json", json.dumps({"format": "coopet/1", "family": "semivalue", "rows": [
        {"n": 3, "s": s, "q": ["1/5"] * (4 - s)} for s in (1, 2, 3)]}))
    code, text = run("validate", "--game", glove_file, "--external", f"custom:{fam}")
    assert code == 1
    assert run("validate", "--game", glove_file)[0] == 0


@pytest.mark.parametrize("argv", [
    ["compute", "--coalition", "1"],
    ["compute", "--game", "/nonexistent.json", "--coalition", "1"],
    ["generate", "weighted-majority", "--quota", 9, "--weights", "1,1"],
    ["generate", "weighted-majority", "--quota", 2, "--weights", "1,x"],
])
def test_input_errors(argv, capsys):
    code, text = run(*argv)
    assert code == 2 and text == ""
    assert capsys.readouterr().err.startswith("coopet:")


def test_input_errors_need_game(glove_file):
    assert run("compute", "--game", glove_file, "--coalition", "9")[0] == 2
    assert run("compute", "--game", glove_file)[0] == 2
    assert run("compute", "--game", glove_file, "--coalition", "1", "--internal", "bogus")[0] == 2


def test_bad_document(tmp_path):
    path = write(tmp_path, "bad.json", '{"players": ["a", "b"], "worth": [1, 0, 0, 0]}')
    assert run("compute", "--game", path, "--all")[0] == 2


def test_float_mode(glove_file):
    code, text = run("compute", "--game", glove_file, "--coalition", "2,3", "--preset", "banzhaf",
                     "--mode", "float")
    assert json.loads(text)["rows"][0]["coop"] == -0.5


def test_pretty_output(glove_file):
    code, text = run("table", "--game", glove_file, "--format", "pretty")
    assert code == 0 and text.startswith("# format: coopet/1")
