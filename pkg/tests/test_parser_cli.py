"""Expression grammar, printer round-trips, and the command line
interface with its exit codes and JSON schema."""

import json
import random
from fractions import Fraction

import pytest

from superw.cli import main, make_context
from superw.coeff import K, sc
from superw.parser import ParseError, parse_field


CTX = make_context("bcbg:2")


def test_grammar_examples():
    alg = CTX.alg
    e = parse_field("no(beta[1], d(gamma[1]))", CTX)
    assert e == alg.gen("beta", 1).wick(alg.gen("gamma", 1).derivative())
    e = parse_field("-(1/6)*no(J[0,0],J[0,0],J[0,0])", CTX)
    assert e.weight() == 3
    assert parse_field("one", CTX) == alg.one
    assert parse_field("d^2(b[1])", CTX) == alg.gen("b", 1).derivative().derivative()
    assert parse_field("2*b[1] - b[1]", CTX) == alg.gen("b", 1)
    assert parse_field("k*c[1]", CTX) == alg.gen("c", 1).scale(K)


def test_syntax_errors():
    with pytest.raises(ParseError):
        parse_field("no(b[1]", CTX)
    with pytest.raises(ParseError):
        parse_field("q[1]", CTX)
    with pytest.raises(ParseError):
        parse_field("b[1] c[1]", CTX)
    with pytest.raises(ParseError):
        parse_field("b[1]*c[1]", CTX)


def test_round_trip_randomized():
    alg = CTX.alg
    gens = [g.index for g in alg.gens]
    rng = random.Random(23)
    done = 0
    while done < 200:
        e = alg.zero
        for _ in range(rng.randint(1, 3)):
            letters = [(rng.choice(gens), rng.randint(0, 2)) for _ in range(rng.randint(1, 3))]
            c = sc(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
            e = e + alg.normal_form(letters).scale(c)
        if not e:
            continue
        assert parse_field(str(e), CTX) == e
        done += 1


def test_round_trip_other_contexts():
    for spec, texts in (
        ("swinf:2", ("J[0,0]", "no(J[+,0],J[-,0])", "d(J[1,1])")),
        ("M:2", ("dX[1]", "no(b[1],dY[2])", "d(dX[1])")),
        ("affine:2", ("X[1,2]", "no(X[1,1],X[2,2])")),
        ("gl22", ("E[1,3]", "no(E[1,2],E[2,3])")),
    ):
        ctx = make_context(spec)
        for t in texts:
            e = parse_field(t, ctx)
            assert parse_field(str(e), ctx) == e, f"{spec}: {t}"


def test_ope_command(capsys):
    assert main(["ope", "beta[1]", "gamma[1]", "--algebra", "bcbg:1"]) == 0
    assert capsys.readouterr().out.strip() == "(1) 1"
    assert main(["ope", "b[1]", "b[2]", "--algebra", "bcbg:2"]) == 0
    assert capsys.readouterr().out.strip() == "regular"


def test_ope_command_displayed_cubic(capsys):
    assert main(["ope", "J[-,1]", "J[+,1]", "--algebra", "bcbg:2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["poles"]["4"] == "2"
    assert set(data["poles"]) == {"4", "2", "1"}


def test_nproduct_command(capsys):
    assert main(["nproduct", "J[0,0]", "J[0,0]", "1", "--algebra", "bcbg:1"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_verify_command_json_schema(capsys):
    assert main(["verify", "gl11", "--n", "1", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert set(data) >= {"suite", "context", "checks", "version"}
    assert data["suite"] == "gl11"
    assert len(data["checks"]) == 7
    for c in data["checks"]:
        assert c["status"] in ("pass", "fail", "skipped")
        assert "id" in c


def test_verify_deterministic_under_jobs(capsys):
    assert main(["verify", "n2", "--jobs", "4", "--json"]) == 0
    a = json.loads(capsys.readouterr().out)
    assert main(["verify", "n2", "--jobs", "1", "--json"]) == 0
    b = json.loads(capsys.readouterr().out)
    assert [c["id"] for c in a["checks"]] == [c["id"] for c in b["checks"]]


def test_commutant_command(capsys):
    assert main(["commutant", "--n", "2", "--weight", "1", "--symbolic", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["dim"] == 2


def test_identify_command(capsys):
    assert main(["identify", "--check", "gl22remark"]) == 0
    out = capsys.readouterr().out
    assert "0 failed" in out


def test_exit_codes(capsys):
    assert main(["ope", "no(b[1]", "c[1]", "--algebra", "bcbg:1"]) == 2
    capsys.readouterr()
    assert main(["verify", "nosuchsuite"]) == 2
    capsys.readouterr()
    assert main(["relations", "--n", "1"]) == 0
    capsys.readouterr()


def test_invariants_command(capsys):
    assert main(["invariants", "--n", "1", "--weight", "3/2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["invariant_dim"] == data["weyl_span_dim"] == 4


def test_relations_command(capsys):
    assert main(["relations", "--n", "1", "--weight", "3/2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["dim"] == 1
    assert data["singular"] == [True]


def test_decouple_command(capsys):
    assert main(["decouple", "0", "1", "--n", "1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("j[0,1] =")


def test_cache_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SUPERW_CACHE_DIR", str(tmp_path))
    assert main(["verify", "gl11", "--n", "1"]) == 0
    capsys.readouterr()
    assert list(tmp_path.glob("*.json"))
    assert main(["verify", "gl11", "--n", "1"]) == 0
    assert "cached" in capsys.readouterr().out
