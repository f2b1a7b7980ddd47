#!/usr/bin/env python3
"""Tests for presets, witness words, lower bound searches and the library."""
import sys
import tempfile
from pathlib import Path

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

from budgets import BUDGET_PROFILES
from cayley import DistanceOracle
from library import PresentationLibrary, resolve_group
from presentation import BudgetExceeded, LemmaBoundViolation, PresentationError, UnknownPreset
from zoo import (
    PRESET_NAMES,
    PRESET_TEXTS,
    export_presets,
    family_loops,
    gersten_loop,
    lemma_bb_min_length,
    lemma_bb_search,
    lemma_bb_target,
    load_preset_text,
    octahedron_edges,
    octahedron_relators,
    preset,
    stallings_alpha,
    stallings_beta,
    stallings_gamma,
    table1_slice,
)

GROUPS = Path(__file__).parent / "groups"


def test_presets():
    sizes = {name: len(preset(name).alphabet) for name in PRESET_NAMES}
    assert sizes == {
        "f2": 4, "z2-wise-base": 8, "z2-gersten-base": 8, "f2c-bridson-base": 6,
        "wise": 12, "bridson": 12, "gersten": 12, "stallings": 24,
    }, sizes
    assert preset("wise") is preset("wise")
    assert preset("wise").notes
    try:
        preset("nope")
    except UnknownPreset as e:
        assert isinstance(e, KeyError)
        assert "available" in str(e)
    else:
        raise AssertionError("unknown preset loaded")
    print(f"  ✓ {len(PRESET_NAMES)} presets load and verify")


def test_octahedron():
    edges = octahedron_edges()
    assert len(edges) == 12 and edges[0] == "aC"
    relators = octahedron_relators()
    assert len(relators) == 16
    assert relators[0] == "aCcEeA"
    print("  ✓ 12 edges, two relators per face")


def test_bad_preset_text():
    try:
        load_preset_text("name bad\ngenerators a A\nrelator aa\nbackend free\n")
    except PresentationError as e:
        print(f"  ✓ Rejected: {e}")
    else:
        raise AssertionError("nontrivial relator accepted")


def test_stallings_witness():
    stallings = preset("stallings")
    solver = stallings.solver
    alpha, beta, gamma = stallings_alpha(2), stallings_beta(2), stallings_gamma()
    assert len(alpha) == len(beta) == 5
    assert len(gamma) == 2
    assert solver.is_identity(solver.eval(alpha + gamma + beta.inverse()))
    oracle = DistanceOracle(solver, 3)
    assert oracle.norm(solver.eval(alpha), cutoff=4) is None
    assert oracle.norm(solver.eval(beta), cutoff=4) is None
    assert oracle.distance(solver.eval(alpha), solver.eval(beta)) == 2
    print("  ✓ α and β are geodesics of length 5 at distance 2")


def test_lemma_bb():
    assert lemma_bb_min_length(1, "c") == 3
    assert lemma_bb_min_length(2, "c") == 6
    assert lemma_bb_min_length(2, "c", v="cE") == 6
    try:
        lemma_bb_min_length(1, "d")
    except LemmaBoundViolation as e:
        assert e.length < 3
        print(f"  ✓ n=1, z=d is reached by {e.word}")
    else:
        raise AssertionError("n=1, z=d met the bound")
    for bad in ((0, "c"), (1, "C"), (1, "cd")):
        try:
            lemma_bb_target(preset("stallings").solver, *bad)
        except ValueError:
            continue
        raise AssertionError(f"{bad} accepted")
    print("  ✓ Exact minima 3, 6 and 6")


def test_lemma_bb_budget():
    solver = preset("stallings").solver
    try:
        lemma_bb_search(solver, lemma_bb_target(solver, 2, "c"), max_expansions=5)
    except BudgetExceeded as e:
        assert e.explored == 6 and e.lower_bound >= 1
        print(f"  ✓ {e}")
    else:
        raise AssertionError("budget ignored")

    profile = BUDGET_PROFILES["stallings"]
    saved = profile["astar_expansions"]
    profile["astar_expansions"] = 5
    try:
        lemma_bb_min_length(2, "c")
    except BudgetExceeded as e:
        assert e.explored == 6
    else:
        raise AssertionError("stallings profile budget ignored")
    finally:
        profile["astar_expansions"] = saved
    print("  ✓ Default budget comes from the stallings profile")


def test_gersten_family():
    loops = family_loops("gersten-loop", "gersten", 1, 24)
    assert [len(w) for w in loops] == [24]
    assert loops[0] == gersten_loop(2)
    assert len(family_loops("gersten-loop", "gersten", 1, 40)) == 3
    for args in (("nope", "gersten", 1, 24), ("gersten-loop", "wise", 1, 24)):
        try:
            family_loops(*args)
        except ValueError:
            continue
        raise AssertionError(f"{args} accepted")
    try:
        gersten_loop(0)
    except ValueError:
        pass
    else:
        raise AssertionError("n=0 accepted")
    print("  ✓ gersten-loop family starts at n = k + 1")


def test_table1_slice():
    rows = table1_slice()
    assert len(rows) == 8
    assert all(row["expected"] in ("holds-up-to-bound", "counterexample", None) for row in rows)
    wise = table1_slice({"wise"})
    assert [row["command"] for row in wise] == ["hnn-verify", "check-blsp"]
    wise[0]["group"] = "changed"
    assert table1_slice({"wise"})[0]["group"] == "wise"
    print("  ✓ Desk-scale grid rows")


def test_export_presets():
    with tempfile.TemporaryDirectory() as tmp:
        written = export_presets(tmp)
        assert len(written) == len(PRESET_NAMES)
        for path in written:
            assert path.read_text(encoding="utf-8") == PRESET_TEXTS[path.stem]
    print("  ✓ Exported files match the canonical texts")


def test_library():
    library = PresentationLibrary(GROUPS)
    assert library.list_groups() == sorted(PRESET_NAMES)
    detailed = {row["name"]: row for row in library.list_groups_detailed()}
    assert detailed["stallings"]["letters"] == 24
    assert detailed["wise"]["backend"] == "hnn"

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        (tmp / "broken.pres").write_text("name broken\n", encoding="utf-8")
        (tmp / "tiny.pres").write_text("name tiny\ngenerators x X\nbackend free\n", encoding="utf-8")
        local = PresentationLibrary(tmp)
        assert local.list_groups() == ["tiny"]
        assert resolve_group("tiny", local).name == "tiny"
        assert resolve_group(str(tmp / "tiny.pres")).name == "tiny"
        assert PresentationLibrary(tmp / "missing").list_groups() == []

    assert resolve_group("wise") is preset("wise")
    try:
        resolve_group("nope")
    except UnknownPreset:
        pass
    else:
        raise AssertionError("unknown group resolved")
    print("  ✓ Discovery skips broken files; names, entries and paths resolve")


def main():
    """Run all zoo and library tests."""
    print("=" * 70)
    print("Group Zoo Tests")
    print("=" * 70)
    tests = [
        test_presets,
        test_octahedron,
        test_bad_preset_text,
        test_stallings_witness,
        test_lemma_bb,
        test_lemma_bb_budget,
        test_gersten_family,
        test_table1_slice,
        test_export_presets,
        test_library,
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
    print("✓ All group zoo tests passed!")


if __name__ == "__main__":
    main()
