from __future__ import annotations

import json

import pytest

from fairshare.cli import main

BASE_EXAMPLE = {
    "agents": [
        {"entitlement": "2/5", "values": [2, 1, 1, 1, 0]},
        {"entitlement": "3/5", "values": [2, 1, 1, 1, 0]},
    ]
}

FIVE_UNITS = {
    "agents": [{"entitlement": "1/3", "values": [1, 1, 1, 1, 1]} for _ in range(3)]
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    doc = json.loads(out.out) if out.out.strip() else None
    return code, doc, out.err


def test_shares_base_example(tmp_path, capsys):
    path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    code, doc, _ = run_cli(capsys, ["shares", path, "--agent", "0"])
    assert code == 0
    shares = doc["agents"][0]["shares"]
    assert shares["proportional"] == "2"
    assert shares["tps"] == "2"
    assert shares["aps"]["value"] == 2
    assert shares["aps"]["certificate"]["budget"] == "2/5"
    assert shares["pessimistic"] == 1


def test_shares_extra_notions(tmp_path, capsys):
    path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    code, doc, _ = run_cli(
        capsys, ["shares", path, "--agent", "0", "--notions", "mms,wmms,unit-demand"]
    )
    assert code == 0
    shares = doc["agents"][0]["shares"]
    assert shares["mms"] == 2
    assert shares["unit-demand"] == 1
    assert "/" in shares["wmms"] or shares["wmms"].isdigit()


def test_shares_unknown_notion_is_input_error(tmp_path, capsys):
    path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    code, _, err = run_cli(capsys, ["shares", path, "--notions", "nonsense"])
    assert code == 2
    assert "notions" in err


def test_shares_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, err = run_cli(capsys, ["shares", str(path)])
    assert code == 2
    assert err.startswith("error:")
    code, _, _ = run_cli(capsys, ["shares", str(tmp_path / "missing.json")])
    assert code == 2


def test_shares_guard_exit(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FAIRSHARE_GUARD_LIMIT", "10")
    doc = {"agents": [{"entitlement": "1", "values": list(range(1, 13))}]}
    path = write(tmp_path, "big.json", doc)
    code, _, err = run_cli(capsys, ["shares", path, "--notions", "aps"])
    assert code == 3
    assert "size guard" in err


def test_allocate_bidding_five_units(tmp_path, capsys):
    path = write(tmp_path, "units.json", FIVE_UNITS)
    code, doc, _ = run_cli(capsys, ["allocate", path, "--method", "bidding", "--seed", "7"])
    assert code == 0
    assert doc["seed"] == 7
    assert doc["report"]["all_passed"] is True
    assert all(len(b) >= 1 for b in doc["allocation"])
    assert len(doc["transcript"]["rounds"]) <= 5


def test_allocate_two_agent(tmp_path, capsys):
    path = write(tmp_path, "two.json", BASE_EXAMPLE)
    code, doc, _ = run_cli(capsys, ["allocate", path, "--method", "two-agent"])
    assert code == 0
    assert doc["report"]["bounds"] == "two-agent-aps"
    assert doc["report"]["all_passed"] is True


def test_allocate_method_mismatch(tmp_path, capsys):
    unequal = write(tmp_path, "unequal.json", BASE_EXAMPLE)
    code, _, err = run_cli(capsys, ["allocate", unequal, "--method", "greedy-efx"])
    assert code == 4
    assert "equal entitlements" in err
    three = write(
        tmp_path,
        "three.json",
        {"agents": [{"entitlement": "1/3", "values": [1]} for _ in range(3)]},
    )
    code, _, err = run_cli(capsys, ["allocate", three, "--method", "two-agent"])
    assert code == 4


def test_allocate_greedy_efx(tmp_path, capsys):
    path = write(tmp_path, "units.json", FIVE_UNITS)
    code, doc, _ = run_cli(capsys, ["allocate", path, "--method", "greedy-efx"])
    assert code == 0
    assert doc["report"]["bounds"] == "equal-entitlements-gefx"
    assert doc["report"]["all_passed"] is True


def test_verify_ce_fixture(tmp_path, capsys):
    inst_path = write(
        tmp_path,
        "ce.json",
        {
            "agents": [
                {"entitlement": "2/5", "values": [1, 1, 1]},
                {"entitlement": "3/5", "values": [1, 1, 1]},
            ]
        },
    )
    alloc_path = write(tmp_path, "alloc.json", {"allocation": [[0], [1, 2]]})
    prices_path = write(tmp_path, "prices.json", {"prices": ["2/5", "3/10", "3/10"]})
    code, doc, _ = run_cli(capsys, ["verify", inst_path, alloc_path, "--ce", prices_path])
    assert code == 0
    assert doc["ce"] is True
    assert "bounds" not in doc
    code, doc, _ = run_cli(
        capsys,
        ["verify", inst_path, alloc_path, "--ce", prices_path, "--bounds", "arbitrary-entitlements"],
    )
    assert code == 0
    assert doc["ce"] is True
    assert doc["bounds"]["all_passed"] is True


def test_verify_corrupted_allocation(tmp_path, capsys):
    inst_path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    alloc_path = write(tmp_path, "alloc.json", [[0, 0], [1, 2, 3, 4]])
    code, _, err = run_cli(capsys, ["verify", inst_path, alloc_path])
    assert code == 2
    assert "allocated twice" in err


def test_verify_starved_agent(tmp_path, capsys):
    inst_path = write(
        tmp_path,
        "inst.json",
        {
            "agents": [
                {"entitlement": "1/2", "values": [5, 5]},
                {"entitlement": "1/2", "values": [5, 5]},
            ]
        },
    )
    alloc_path = write(tmp_path, "alloc.json", [[0, 1], []])
    code, doc, err = run_cli(capsys, ["verify", inst_path, alloc_path])
    assert code == 1
    assert "verification failed" in err
    assert doc["bounds"]["all_passed"] is False


def test_game_worst_case_sweep(tmp_path, capsys):
    inst_path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    code, doc, _ = run_cli(
        capsys, ["game", inst_path, "--strategies", "0=aps35:2", "--adversary", "worst"]
    )
    assert code == 0
    assert doc["min_value"] >= 2
    assert doc["pattern"] is not None
    assert doc["patterns_checked"] == 1 + 5 + 10
    assert doc["patterns_feasible"] >= 1


def test_game_single_pattern(tmp_path, capsys):
    inst_path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    code, doc, _ = run_cli(
        capsys, ["game", inst_path, "--focal", "0", "--adversary", "pattern:1,3"]
    )
    assert code == 0
    assert doc["pattern"] == [1, 3]
    assert isinstance(doc["value"], int)
    assert doc["transcript"]["rounds"]


def test_game_run_and_replay(tmp_path, capsys):
    inst_path = write(tmp_path, "units.json", FIVE_UNITS)
    out_path = str(tmp_path / "transcript.json")
    code, doc, _ = run_cli(
        capsys, ["game", inst_path, "--strategies", "0=tps,1=tps,2=tps", "--transcript", out_path]
    )
    assert code == 0
    first_alloc = doc["allocation"]
    code, doc, _ = run_cli(capsys, ["game", inst_path, "--replay", out_path])
    assert code == 0
    assert doc["replay"] == "ok"
    assert doc["allocation"] == first_alloc


def test_game_replay_rejects_foreign_transcript(tmp_path, capsys):
    units = write(tmp_path, "units.json", FIVE_UNITS)
    other = write(tmp_path, "other.json", BASE_EXAMPLE)
    out_path = str(tmp_path / "transcript.json")
    code, _, _ = run_cli(capsys, ["game", units, "--transcript", out_path])
    assert code == 0
    code, _, err = run_cli(capsys, ["game", other, "--replay", out_path])
    assert code == 2
    assert "transcript" in err


def test_game_strategy_spec_errors(tmp_path, capsys):
    inst_path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    for spec in ("0=bogus", "9=tps", "0=lemma34", "tps"):
        code, _, err = run_cli(capsys, ["game", inst_path, "--strategies", spec])
        assert code == 2
        assert "strategies" in err


def test_game_explicit_target_accepted(tmp_path, capsys):
    inst_path = write(tmp_path, "inst.json", BASE_EXAMPLE)
    code, doc, _ = run_cli(
        capsys, ["game", inst_path, "--strategies", "0=lemma34:1,1=aps35:2", "--tie-break", "avoid:0"]
    )
    assert code == 0
    assert doc["allocation"]


def test_cli_is_deterministic(tmp_path, capsys):
    inst_path = write(tmp_path, "units.json", FIVE_UNITS)
    argv = ["allocate", inst_path, "--method", "bidding"]
    code, doc1, _ = run_cli(capsys, argv)
    assert code == 0
    code, doc2, _ = run_cli(capsys, argv)
    assert doc1 == doc2


def test_cli_requires_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_bad_tie_break_is_input_error(tmp_path, capsys):
    inst_path = write(tmp_path, "units.json", FIVE_UNITS)
    code, _, err = run_cli(capsys, ["game", inst_path, "--tie-break", "highest"])
    assert code == 2
    assert "tie-break" in err
