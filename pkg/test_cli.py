#!/usr/bin/env python3
"""Tests for the command line runner."""
import json
import sys
import tempfile
from pathlib import Path

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

from budgets import BUDGET_PROFILES
from cli import ExperimentConfig, build_parser, config_from_args, main
from reports import load_json
from zoo import PRESET_NAMES, preset


def test_config_model():
    config = ExperimentConfig(command="check-fftp", group="f2", k=1, L=3, memory_budget="2K")
    assert config.memory_budget == 2000
    assert config.mode.value == "all-words"
    for kwargs in ({"command": "fill", "k": 1}, {"command": "check-lsp", "k": 1},
                   {"command": "bogus"}, {"command": "check-fftp", "k": -1, "L": 3}):
        try:
            ExperimentConfig(**kwargs)
        except ValueError:
            continue
        raise AssertionError(f"{kwargs} accepted")
    print("  ✓ Required parameters and ranges validated")


def test_parser_aliases():
    args = build_parser().parse_args(["check-lsp", "--group", "gersten", "--k", "1",
                                      "--max-loop-len", "24", "--family", "gersten-loop"])
    config = config_from_args(args)
    assert (config.L, config.family, config.basepoint) == (24, "gersten-loop", False)
    assert config_from_args(build_parser().parse_args(["ball", "--radius", "2"])).group == "wise"
    print("  ✓ --max-loop-len is --L")


def test_ball_command():
    assert main(["ball", "--group", "wise", "--radius", "0"]) == 0
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "ball.json"
        assert main(["ball", "--group", "f2", "--radius", "2", "--output", str(path)]) == 0
        data = json.loads(path.read_text())
    assert data["sphere_sizes"] == [1, 4, 12]
    print("  ✓ ball exits 0 and exports ball.json")


def test_error_exit_codes():
    assert main(["check-fftp", "--group", "f2", "--k", "1"]) == 1
    assert main(["ball", "--group", "nope", "--radius", "1"]) == 1
    assert main(["hnn-verify", "--group", "f2", "--R", "2"]) == 1
    assert main(["check-ac", "--group", "stallings", "--N", "4", "--C", "2"]) == 1
    assert main(["ball", "--group", "f2", "--radius", "4", "--memory-budget", "10"]) == 1
    print("  ✓ Configuration, group and budget errors exit 1")


def test_counterexample_exit_code():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "fftp.json"
        table = Path(tmp) / "fftp.csv"
        code = main(["check-fftp", "--group", "f2", "--k", "1", "--L", "3",
                     "--output", str(path), "--csv", str(table)])
        assert code == 2
        record = load_json(path)
        assert table.read_text(encoding="utf-8").startswith("property,group")
    assert record.outcome == "counterexample"
    assert record.witness == {"word": "aAA", "length": 3}
    assert record.group == "f2" and record.bound == {"R": 3}
    assert main(["check-ac", "--group", "f2", "--N", "2", "--C", "1"]) == 2
    assert main(["check-blsp", "--group", "f2", "--k", "2", "--L", "4"]) == 0
    print("  ✓ Counterexamples exit 2 and are written as JSON and CSV")


def test_payload_commands():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        assert main(["geodesics", "--group", "z2-gersten-base", "--word", "aa",
                     "--output", str(tmp / "geo.json")]) == 0
        geo = json.loads((tmp / "geo.json").read_text())
        assert main(["synchronize", "--group", "z2-gersten-base", "--word", "bBbBaaAA",
                     "--u", "aaAA", "--k", "1", "--output", str(tmp / "sync.json")]) == 0
        sync = json.loads((tmp / "sync.json").read_text())
    assert geo["geodesics"] == ["aa", "cd", "dc"] and geo["distance"] == 2
    assert sync["independent_check"] is True
    assert sync["phi"][0] == 0 and sync["phi"][-1] == 4
    print("  ✓ geodesics and synchronize payloads")


def test_multi_verdict_output():
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "hnn.json"
        code = main(["hnn-verify", "--group", "wise", "--R", "2", "--subgroup", "a",
                     "--radius", "2", "--output", str(out)])
        names = sorted(p.name for p in Path(tmp).iterdir())
    assert code == 0
    assert names == ["hnn.geodesics-stable-letter-reduced.json", "hnn.strip-equidistant.json",
                     "hnn.totally-geodesic.json"]
    print("  ✓ One JSON file per verdict")


def test_crosscheck_every_preset():
    for name in PRESET_NAMES:
        L = 3 if name == "stallings" else 4
        assert main(["crosscheck", "--group", name, "--L", str(L)]) == 0, name
    print(f"  ✓ Solver and ball tracing agree on {len(PRESET_NAMES)} presets")


def test_crosscheck_catches_eval_mismatch():
    solver = preset("f2").solver
    identity = solver.identity
    solver.eval = lambda w: identity
    try:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cross.json"
            code = main(["crosscheck", "--group", "f2", "--L", "2", "--output", str(path)])
            record = load_json(path)
    finally:
        del solver.eval
    assert code == 2
    assert record.witness == {"word": "a", "solver": True, "ball": False}
    print("  ✓ eval disagreeing with step is reported")


def test_profile_budgets_reach_searches():
    profile = BUDGET_PROFILES["f2"]
    saved = profile["search_states"]
    profile["search_states"] = 1
    try:
        assert main(["check-blsp", "--group", "f2", "--k", "1", "--L", "4"]) == 1
    finally:
        profile["search_states"] = saved
    assert main(["check-blsp", "--group", "f2", "--k", "1", "--L", "4"]) == 2
    print("  ✓ search_states from the f2 profile bounds the shortening search")


def test_fill_sample_uses_seed():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        args = ["fill", "--group", "z2-gersten-base", "--k", "1", "--L", "4", "--sample", "3"]
        assert main(args + ["--seed", "7", "--output", str(tmp / "a.json")]) == 0
        assert main(args + ["--seed", "7", "--output", str(tmp / "b.json")]) == 0
        first = json.loads((tmp / "a.json").read_text())
        second = json.loads((tmp / "b.json").read_text())
    assert first == second
    assert first["sample"] == 3 and first["seed"] == 7
    assert main(["fill", "--group", "f2", "--k", "1", "--L", "2", "--sample", "0"]) == 1
    print("  ✓ fill --sample is reproducible under --seed")


def test_other_commands():
    assert main(["fill", "--group", "z2-gersten-base", "--word", "abAB", "--k", "1"]) == 0
    assert main(["presets"]) == 0
    with tempfile.TemporaryDirectory() as tmp:
        assert main(["export-presets", "--output", tmp]) == 0
        assert len(list(Path(tmp).glob("*.pres"))) == len(PRESET_NAMES)
    print("  ✓ crosscheck, fill, presets and export-presets")


def main_tests():
    """Run all CLI tests."""
    print("=" * 70)
    print("CLI Tests")
    print("=" * 70)
    tests = [
        test_config_model,
        test_parser_aliases,
        test_ball_command,
        test_error_exit_codes,
        test_counterexample_exit_code,
        test_payload_commands,
        test_multi_verdict_output,
        test_crosscheck_every_preset,
        test_crosscheck_catches_eval_mismatch,
        test_profile_budgets_reach_searches,
        test_fill_sample_uses_seed,
        test_other_commands,
    ]
    failed = 0
    for test in tests:
        print(f"\n{test.__name__}...")
        try:
            test()
        except Exception as e:
            print(f"  ✗ FAILED: {e}")
            failed += 1
    print("\n" + "=" * 70)
    if failed:
        print(f"✗ {failed} test(s) failed")
        sys.exit(1)
    print("✓ All CLI tests passed!")


if __name__ == "__main__":
    main_tests()
