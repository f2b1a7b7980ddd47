#!/usr/bin/env python3
"""Tests for pinches, strip equidistance, totally geodesic subgroups and strips."""
import sys
from pathlib import Path

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

from cayley import DistanceOracle, build_ball
from hnn import (
    Side,
    Strip,
    apply_phi,
    britton_reduce,
    check_strip_equidistant,
    check_totally_geodesic,
    find_pinch,
    hnn_shorten,
    on_coset,
    stable_letter_count,
    stable_reduced_geodesics,
    strip_side,
)
from presentation import AlphabetError, OracleError, RadiusShortfall, WorkbenchError
from properties import Outcome
from solvers import PinchDirection
from zoo import preset

WISE = preset("wise")
GERSTEN = preset("gersten")


def test_pinches():
    solver = WISE.solver
    pinch = find_pinch(solver, WISE.word("tdT"))
    assert (pinch.start, pinch.end, pinch.stable) == (0, 2, "t")
    assert pinch.direction == PinchDirection.STABLE_FIRST and pinch.exponent == 1
    assert find_pinch(solver, WISE.word("SaS")) is None
    assert str(britton_reduce(solver, WISE.word("SaasD"))) == "ddD"
    assert stable_letter_count(solver, WISE.word("SasTbt")) == 4
    try:
        find_pinch(solver, preset("stallings").word("aC"))
    except AlphabetError:
        pass
    else:
        raise AssertionError("foreign letters accepted")
    print("  ✓ Pinch search and Britton reduction")


def test_apply_phi():
    solver = WISE.solver
    assert str(apply_phi(solver, "s", WISE.word("aa"))) == "dd"
    assert str(apply_phi(solver, "s", WISE.word("D"), inverse=True)) == "A"
    assert str(apply_phi(solver, "t", WISE.word("B"))) == "D"
    try:
        apply_phi(solver, "s", WISE.word("b"))
    except OracleError:
        pass
    else:
        raise AssertionError("b is not in ⟨a⟩")
    print("  ✓ Associated isomorphisms on words")


def test_strip_equidistant():
    for group in (WISE, GERSTEN):
        base_oracle = DistanceOracle(group.solver.base, 3)
        verdict = check_strip_equidistant(group.solver, base_oracle, 6)
        assert verdict.holds, verdict.witness
        assert verdict.stats["elements"] == 4 * 6
        assert verdict.stats["slopes"]["s:forward"] == [1.0, 1.0]
    print("  ✓ Wise and Gersten associated subgroups are equidistant up to 6")


def test_strip_equidistant_full_subgroup():
    bridson = preset("bridson")
    base_oracle = DistanceOracle(bridson.solver.base, 1)
    verdict = check_strip_equidistant(bridson.solver, base_oracle, 1)
    assert verdict.outcome == Outcome.COUNTEREXAMPLE
    assert verdict.witness["stable"] == "g" and verdict.witness["element"] == "c"
    assert verdict.witness["length"] == 1
    try:
        check_strip_equidistant(bridson.solver, base_oracle, 2)
    except RadiusShortfall:
        pass
    else:
        raise AssertionError("full subgroup check ran past the base ball")
    print("  ✓ g sends c to a word of length 4")


def test_totally_geodesic():
    ball = build_ball(WISE.solver, 5)
    for y in ("a", "b", "d"):
        verdict = check_totally_geodesic(ball, [WISE.word(y)], 5)
        assert verdict.holds, (y, verdict.witness)
        assert verdict.stats["elements"] == 11
    gball = build_ball(GERSTEN.solver, 2)
    verdict = check_totally_geodesic(gball, [GERSTEN.word("a")], 2)
    assert verdict.outcome == Outcome.COUNTEREXAMPLE
    assert verdict.witness == {"element": "aa", "geodesic": "cd", "length": 2}
    print("  ✓ ⟨a⟩ is totally geodesic in G_W but a² = cd in G_G")


def test_hnn_shorten():
    solver = WISE.solver
    oracle = DistanceOracle(solver, 2)
    base_oracle = DistanceOracle(solver.base, 2)
    first = hnn_shorten(solver, oracle, base_oracle, WISE.word("SasD"), 1)
    assert str(first) == "dD"
    second = hnn_shorten(solver, oracle, base_oracle, first, 1)
    assert str(second) == ""
    assert hnn_shorten(solver, oracle, base_oracle, second, 1) is None
    try:
        hnn_shorten(solver, oracle, base_oracle, WISE.word("Sa"), 1)
    except WorkbenchError:
        pass
    else:
        raise AssertionError("non-loop shortened")
    print("  ✓ SasD -> dD -> empty")


def test_strip_sides():
    solver = WISE.solver
    ball = build_ball(solver, 2)
    strip = Strip(solver.identity, "a", "s")
    side = {w: strip_side(solver, ball, solver.eval(WISE.word(w)), strip) for w in ("", "s", "as", "b", "bs")}
    assert side == {"": Side.MINUS, "s": Side.PLUS, "as": Side.PLUS, "b": Side.MINUS, "bs": Side.MINUS}
    assert strip_side(solver, ball, solver.identity, strip, mark_on_strip=True) == Side.ON_STRIP
    assert strip_side(solver, ball, solver.eval(WISE.word("s")), strip, mark_on_strip=True) == Side.ON_STRIP
    assert strip_side(solver, ball, solver.eval(WISE.word("b")), strip, mark_on_strip=True) == Side.MINUS
    assert on_coset(solver, strip, solver.eval(WISE.word("aaa")))
    print("  ✓ Anchor is on the minus side, crossing s flips it")


def test_strip_errors():
    solver = WISE.solver
    ball = build_ball(solver, 1)
    for bad in (Strip(solver.identity, "b", "s"), Strip(solver.identity, "a", "a")):
        try:
            strip_side(solver, ball, solver.identity, bad)
        except OracleError:
            continue
        raise AssertionError(f"{bad} accepted")
    assert strip_side(solver, ball, solver.identity, Strip(solver.identity, "d", "S")) == Side.MINUS
    try:
        strip_side(solver, ball, solver.eval(WISE.word("aa")), Strip(solver.identity, "a", "s"))
    except RadiusShortfall:
        pass
    else:
        raise AssertionError("vertex outside the ball accepted")
    print("  ✓ Invalid strips and far vertices rejected")


def test_strip_sides_locally_consistent():
    solver = WISE.solver
    ball = build_ball(solver, 3)
    strip = Strip(solver.identity, "a", "s")
    edges = 0
    for v in ball.keys(2):
        here = strip_side(solver, ball, v, strip)
        for letter in solver.alphabet.letters:
            w = solver.step(v, letter)
            crosses = (letter == "s" and on_coset(solver, strip, v)) or \
                (letter == "S" and on_coset(solver, strip, w))
            there = strip_side(solver, ball, w, strip)
            assert (here != there) == crosses, (ball.path_to(v), letter)
            edges += 1
    print(f"  ✓ Sides flip exactly across strip edges ({edges} edges)")


def test_geodesics_are_stable_letter_reduced():
    assert stable_reduced_geodesics(WISE.solver, build_ball(WISE.solver, 3)) is None
    assert stable_reduced_geodesics(GERSTEN.solver, build_ball(GERSTEN.solver, 3)) is None
    print("  ✓ No shortlex geodesic in B(3) has a pinch")


def main():
    """Run all HNN tests."""
    print("=" * 70)
    print("HNN Tests")
    print("=" * 70)
    tests = [
        test_pinches,
        test_apply_phi,
        test_strip_equidistant,
        test_strip_equidistant_full_subgroup,
        test_totally_geodesic,
        test_hnn_shorten,
        test_strip_sides,
        test_strip_errors,
        test_strip_sides_locally_consistent,
        test_geodesics_are_stable_letter_reduced,
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
    print("✓ All HNN tests passed!")


if __name__ == "__main__":
    main()
