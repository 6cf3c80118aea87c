import json

import pytest

from wiretapnc.cli import EXIT_CAP, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound_text_and_json(capsys):
    code, out, _ = call(capsys, "bound", "--net", "fig4.net")
    assert code == EXIT_OK and out == "2\nwitness {1, 2, 3}\n"
    code, out, _ = call(capsys, "bound", "--net", "fig1.net", "--json")
    doc = json.loads(out)
    assert doc["cut_set_bound"] == "3"


def test_json_is_deterministic(capsys):
    first = call(capsys, "strat2", "--net", "fig6.net", "--json")[1]
    second = call(capsys, "strat2", "--net", "fig6.net", "--json")[1]
    assert first == second
    assert json.loads(first)["rate"] == "2"


def test_rates(capsys):
    assert call(capsys, "globalkey", "--net", "fig1.net")[1].strip() == "12/5"
    assert call(capsys, "strat1", "--net", "fig6.net", "--umode", "static")[1].strip() == "1"
    assert call(capsys, "strat2", "--net", "fig6.net", "--float")[1].strip() == "2.000000"


def test_fixture_and_file_input(capsys, tmp_path):
    code, out, _ = call(capsys, "fixture", "fig6", "--out", str(tmp_path))
    assert code == EXIT_OK
    path = tmp_path / "fig6.net"
    assert path.exists()
    assert call(capsys, "bound", "--net", str(path))[1].startswith("2\n")
    assert call(capsys, "fixture", "nope")[0] == EXIT_INPUT


def test_codegen_verify_oracle(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, text, _ = call(capsys, "codegen", "--net", "fig1.net", "--strategy", "1", "--out", str(out))
    assert code == EXIT_OK and "decodable=True secret=True" in text
    code, text, _ = call(capsys, "verify", "--net", "fig1.net", "--code", str(out))
    assert code == EXIT_OK and text.startswith("decodable True\nsecret True")
    code, text, _ = call(capsys, "oracle", "--code", str(out), "--links", "x1,x2", "--json")
    doc = json.loads(text)
    assert doc["independent"] and doc["mutual_information_symbols"] == "0"


def test_verify_shipped_code(capsys):
    code, text, _ = call(capsys, "verify", "--net", "fig4.net", "--code", "fig4.code.json", "--json")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["decodable"] and doc["secret"] and len(doc["sets"]) == 10


def test_prove_small(capsys, tmp_path):
    f = tmp_path / "pad.ent"
    f.write_text("vars X K Y\n@key H(K) <= 1\nH(X | Y,K) = 0\n@sec I(X; Y) = 0\nH(Y) <= 5\nmax H(X)\n")
    code, text, _ = call(capsys, "prove", "--sys", str(f))
    assert code == EXIT_OK and "(= 1 exact-verified)" in text
    code, text, _ = call(capsys, "prove", "--sys", str(f), "--drop", "sec", "--json")
    assert json.loads(text)["exact_optimum"] == "6"
    # without the key cap nothing bounds H(X)
    assert call(capsys, "prove", "--sys", str(f), "--drop", "key", "sec")[0] == EXIT_NUMERIC
    f.write_text("vars X Y\nH(Y) <= 1\nmax H(X)\n")
    assert call(capsys, "prove", "--sys", str(f))[0] == EXIT_NUMERIC
    f.write_text("vars X\nmax I(X;)\n")
    code, _, err = call(capsys, "prove", "--sys", str(f))
    assert code == EXIT_INPUT and "line 2" in err


def test_reduce_and_sweep(capsys, tmp_path):
    g = tmp_path / "k3.graph"
    g.write_text("vertex 1\nvertex 2\nvertex 3\nedge 1 2\nedge 2 3\nedge 1 3\n")
    code, text, _ = call(capsys, "reduce", "--graph", str(g), "--r", "2", "--json")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["k"] == 2 and len(doc["A2"]) == 6
    out = tmp_path / "k3.net"
    assert call(capsys, "reduce", "--graph", str(g), "--r", "2", "--out", str(out))[0] == EXIT_OK
    assert call(capsys, "bound", "--net", str(out))[1].startswith("2\n")
    assert call(capsys, "reduce", "--graph", str(g), "--r", "5")[0] == EXIT_INPUT
    code, text, _ = call(capsys, "sweep", "--max-vertices", "3", "--json")
    doc = json.loads(text)
    assert doc["clique_vs_lemma1_mismatches"] == 0 and doc["degree_fact_failures"] == 0


@pytest.mark.parametrize("argv,want", [
    (["bound"], EXIT_INPUT),
    (["bound", "--net", "missing.net"], EXIT_INPUT),
    (["nosuch"], EXIT_INPUT),
    (["bound", "--net", "fig4.net", "--cap", "3"], EXIT_CAP),
    (["bound", "--net", "fig4.net", "--parallel", "0"], EXIT_INPUT),
    (["codegen", "--net", "fig6.net", "--strategy", "search", "--field", "2", "--tries", "2"], EXIT_NUMERIC),
    (["codegen", "--net", "fig6.net", "--strategy", "search"], EXIT_INPUT),
])
def test_exit_codes(capsys, argv, want):
    assert call(capsys, *argv)[0] == want


def test_bad_network_text(capsys, tmp_path):
    f = tmp_path / "bad.net"
    f.write_text("node s\nlink e s d 1\n")
    code, _, err = call(capsys, "bound", "--net", str(f))
    assert code == EXIT_INPUT and err.startswith("error:")
