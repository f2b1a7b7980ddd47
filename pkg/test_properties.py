#!/usr/bin/env python3
"""Tests for the FFTP, LSP, BLSP and AC checkers and for filling."""
import sys
from pathlib import Path

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

import properties
from budgets import oracle_radius
from cayley import DistanceOracle, build_ball, neighborhood
from config import SEED
from fellow import positions
from presentation import BudgetExceeded, PremiseViolation, RadiusShortfall, ShorteningUnavailable, StuckLoop
from properties import (
    FftpMode,
    Outcome,
    blsp_to_ac_path,
    check_ac,
    check_ac_pair,
    check_blsp,
    check_fftp,
    check_lsp,
    dehn_upper_bound,
    enumerate_loops,
    fftp_shortening,
    fill,
    find_shortening,
    minimal_lsp_constant,
    restricted_distance,
    shorten_loop,
)
from zoo import gersten_loop, preset, stallings_alpha, stallings_beta, stallings_gamma

F2 = preset("f2")
F2_ORACLE = DistanceOracle(F2.solver, 3)
KING = preset("z2-gersten-base")
KING_ORACLE = DistanceOracle(KING.solver, 4)


def test_fftp_free_group():
    verdict = check_fftp(F2_ORACLE, 1, 3)
    assert verdict.outcome == Outcome.COUNTEREXAMPLE
    assert verdict.witness == {"word": "aAA", "length": 3}
    assert verdict.bound == {"R": 3}

    verdict = check_fftp(F2_ORACLE, 2, 4)
    assert verdict.holds, verdict.witness
    assert verdict.stats["non_geodesic"] > 0
    assert verdict.to_dict()["outcome"] == "holds-up-to-bound"

    prefix = check_fftp(F2_ORACLE, 2, 4, mode=FftpMode.GEODESIC_PREFIX)
    assert prefix.holds
    assert prefix.stats["words"] < verdict.stats["words"]
    print("  ✓ F2: aAA fails at k=1, k=2 holds up to length 4")


def test_fftp_shortening():
    assert str(fftp_shortening(F2_ORACLE, F2.word("aaA"), 1)) == "a"
    assert fftp_shortening(F2_ORACLE, F2.word("aAA"), 1) is None
    assert str(fftp_shortening(F2_ORACLE, F2.word("aAA"), 2)) == "A"
    assert fftp_shortening(F2_ORACLE, F2.word("ab"), 3) is None
    print("  ✓ Same-endpoint shortenings")


def test_fftp_king_lattice():
    verdict = check_fftp(KING_ORACLE, 1, 3)
    assert verdict.outcome == Outcome.COUNTEREXAMPLE
    assert verdict.witness == {"word": "cCC", "length": 3}
    assert check_fftp(KING_ORACLE, 2, 4).holds
    assert check_fftp(KING_ORACLE, 2, 6, mode=FftpMode.GEODESIC_PREFIX).holds
    print("  ✓ King lattice: cCC fails at k=1, k=2 holds")


def test_loop_shortening():
    loop = F2.word("abBA")
    assert shorten_loop(F2_ORACLE, loop, 1, basepoint=True) is None
    found = find_shortening(F2_ORACLE, loop, 1, basepoint=False)
    assert found is not None and len(found.word) == 0
    assert found.start == ("a",)
    assert str(shorten_loop(F2_ORACLE, F2.word("aAbB"), 1, basepoint=True)) == ""
    try:
        find_shortening(F2_ORACLE, F2.word("ab"), 1, basepoint=True)
    except PremiseViolation:
        pass
    else:
        raise AssertionError("non-loop accepted")
    print("  ✓ abBA: no basepoint shortening, empty loop at a otherwise")


def _brute_force_shortening(oracle, w, k, basepoint, candidates):
    """Try every shorter candidate loop from every allowed start."""
    solver = oracle.solver
    pw = positions(solver, w)
    starts = [pw[0]] if basepoint else oracle.ball.keys(k)
    for b in starts:
        for u in candidates:
            if len(u) >= len(w):
                break
            pu = positions(solver, u, b)
            if all(oracle.within(pw[t], pu[min(t, len(u))], k) for t in range(len(w) + 1)):
                return True
    return False


def test_shortening_search_is_complete():
    loops = list(enumerate_loops(KING_ORACLE, 4))
    candidates = [KING.word("")] + [w for w in loops if len(w) < 4]
    cases = 0
    for k in (1, 2):
        for basepoint in (True, False):
            for w in loops:
                layered = find_shortening(KING_ORACLE, w, k, basepoint) is not None
                expected = _brute_force_shortening(KING_ORACLE, w, k, basepoint, candidates)
                assert layered == expected, (str(w), k, basepoint)
                cases += 1
    print(f"  ✓ Layered search agrees with brute force on {cases} cases")


def test_enumerate_loops():
    loops = list(enumerate_loops(F2_ORACLE, 4))
    assert len(loops) == 4 + 28
    assert str(loops[0]) == "aA"
    assert all(F2.solver.is_identity(F2.solver.eval(w)) for w in loops)
    keys = [w.shortlex_key() for w in loops]
    assert keys == sorted(keys)
    print("  ✓ 32 loops of length <= 4 in shortlex order")


def test_lsp_and_blsp_free_group():
    lsp = check_lsp(F2_ORACLE, 1, 4)
    assert lsp.holds and lsp.stats["loops"] == 32
    blsp = check_blsp(F2_ORACLE, 1, 4)
    assert blsp.outcome == Outcome.COUNTEREXAMPLE
    assert blsp.witness["loop"] == "aaAA"
    assert blsp.property == "blsp"
    assert check_blsp(F2_ORACLE, 2, 6).holds
    assert minimal_lsp_constant(F2_ORACLE, F2.word("aaAA"), 3, basepoint=True) == 2
    assert minimal_lsp_constant(F2_ORACLE, F2.word("aaAA"), 3) == 1
    print("  ✓ LSP at k=1, BLSP only at k=2")


def test_gersten_not_lsp():
    gersten = preset("gersten")
    oracle = DistanceOracle(gersten.solver, oracle_radius("gersten"))
    loop = gersten_loop(2)
    assert len(loop) == 24
    assert gersten.solver.is_identity(gersten.solver.eval(loop))
    assert shorten_loop(oracle, loop, 1, basepoint=False) is None
    print("  ✓ gersten_loop(2) has no shortening at k=1")


def test_state_budget():
    try:
        check_blsp(F2_ORACLE, 1, 4, state_budget=1)
    except BudgetExceeded as e:
        assert e.explored > 1
    else:
        raise AssertionError("state budget ignored")
    print("  ✓ Shortening search stops at its state budget")


def test_lsp_given_family():
    loops = [F2.word("abBA"), F2.word("aaAA")]
    verdict = check_lsp(F2_ORACLE, 1, 4, basepoint=True, loops=loops, family="pair")
    assert verdict.witness["loop"] == "abBA"
    assert verdict.quantifier.startswith("family pair")
    try:
        check_lsp(F2_ORACLE, 1, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("max_length 0 accepted")
    print("  ✓ Explicit loop families")


def test_workers_are_deterministic():
    single = check_fftp(F2_ORACLE, 1, 3)
    threaded = check_fftp(F2_ORACLE, 1, 3, workers=3)
    assert single.witness == threaded.witness
    assert check_blsp(F2_ORACLE, 1, 4, workers=4).witness == check_blsp(F2_ORACLE, 1, 4).witness
    assert check_lsp(F2_ORACLE, 1, 4, workers=2).stats == check_lsp(F2_ORACLE, 1, 4).stats
    print("  ✓ Same verdicts and stats with worker threads")


def test_restricted_distance():
    ball = build_ball(KING.solver, 2)
    assert restricted_distance(ball, (1, 1), (-1, -1), 1) == 2
    assert restricted_distance(KING_ORACLE, (1, 1), (-1, -1), 1) == 2
    assert restricted_distance(ball, (2, 0), (-2, 0), 2, cutoff=3) is None
    assert restricted_distance(ball, (0, 0), (0, 0), 0) == 0
    try:
        restricted_distance(ball, (0, 0), (1, 0), 3)
    except RadiusShortfall:
        pass
    else:
        raise AssertionError("ball smaller than N accepted")
    print("  ✓ Distances inside B(N)")


def test_check_ac():
    ball = build_ball(F2.solver, 3)
    assert check_ac(ball, 2, 2).holds
    assert check_ac(ball, 2, 2, sphere_only=True).holds
    verdict = check_ac(ball, 2, 1)
    assert verdict.outcome == Outcome.COUNTEREXAMPLE
    assert verdict.witness["x"] == "" and verdict.witness["y"] == "aa"
    assert verdict.witness["restricted_distance"] == 2
    assert verdict.bound == {"N": 2, "C": 1}

    king = build_ball(KING.solver, 3)
    assert check_ac(king, 3, 2).holds
    print("  ✓ Almost convexity in F2 and the king lattice")


def test_stallings_pair():
    stallings = preset("stallings")
    oracle = DistanceOracle(stallings.solver, 3)
    solver = stallings.solver
    alpha, beta, gamma = stallings_alpha(2), stallings_beta(2), stallings_gamma()
    x, y = solver.eval(alpha), solver.eval(beta)
    assert solver.multiply(x, solver.eval(gamma)) == y
    assert oracle.distance(x, y) == 2
    assert restricted_distance(oracle, x, y, 5, cutoff=2) is None
    verdict = check_ac_pair(oracle, x, y, 5, 2)
    assert verdict.outcome == Outcome.COUNTEREXAMPLE
    print("  ✓ α and β are 2 apart but not joined inside B(5) within 2")


def test_fill_certificates():
    cert = fill(F2_ORACLE, F2.word("abBA"), 1)
    assert [str(w) for w in cert.loops] == ["abBA", ""]
    assert cert.area == 0 and cert.check_bounds(F2.solver)

    cert = fill(KING_ORACLE, KING.word("abAB"), 1)
    assert [len(w) for w in cert.loops] == [4, 0]
    assert cert.area == 2
    assert [str(r) for r in cert.relators] == ["AcB", "Cba"]
    assert cert.max_relator_length <= 4
    assert cert.check_bounds(KING.solver)
    try:
        fill(KING_ORACLE, KING.word("ab"), 1)
    except PremiseViolation:
        pass
    else:
        raise AssertionError("non-identity word filled")
    print("  ✓ Certificates with area and relator bounds")


def _fill_at_least_k(oracle, w, k_max):
    for k in range(1, k_max + 1):
        try:
            return k, fill(oracle, w, k)
        except StuckLoop:
            continue
    raise AssertionError(f"{w} has no certificate for k <= {k_max}")


def test_fill_short_loops():
    wise = preset("wise")
    wise_oracle = DistanceOracle(wise.solver, 3)
    filled = 0
    for w in enumerate_loops(wise_oracle, 4):
        k, cert = _fill_at_least_k(wise_oracle, w, 6)
        assert cert.check_bounds(wise.solver), (str(w), k)
        assert cert.area <= len(w) ** 2 and cert.max_relator_length <= 2 * k + 2
        filled += 1
    for w in enumerate_loops(KING_ORACLE, 5):
        k, cert = _fill_at_least_k(KING_ORACLE, w, 2)
        assert cert.check_bounds(KING.solver), (str(w), k)
        filled += 1
    print(f"  ✓ {filled} identity words filled within the quadratic bounds")


def test_fill_stuck():
    original = properties.find_shortening
    properties.find_shortening = lambda *args, **kwargs: None
    try:
        fill(F2_ORACLE, F2.word("aA"), 1)
    except StuckLoop as e:
        assert str(e.loop) == "aA" and e.k == 1
    else:
        raise AssertionError("fill ignored a missing shortening")
    finally:
        properties.find_shortening = original
    print("  ✓ Stuck loop reported")


def test_dehn_upper_bound():
    assert dehn_upper_bound(F2_ORACLE, 4, 2) == (0, None)
    area, witness = dehn_upper_bound(KING_ORACLE, 4, 1)
    assert 2 <= area <= 16
    assert witness is not None and len(witness) <= 4
    print(f"  ✓ King lattice loops up to length 4 fill with area <= {area}")


def test_dehn_upper_bound_sample():
    full, _ = dehn_upper_bound(KING_ORACLE, 4, 1)
    first = dehn_upper_bound(KING_ORACLE, 4, 1, sample=5, seed=SEED)
    assert first == dehn_upper_bound(KING_ORACLE, 4, 1, sample=5, seed=SEED)
    assert first[0] <= full
    assert first[1] is None or len(first[1]) <= 4
    assert dehn_upper_bound(KING_ORACLE, 4, 1, sample=100_000, seed=1)[0] == full
    print("  ✓ Seeded samples repeat; oversized samples fill everything")


def test_blsp_to_ac_path():
    wise = preset("wise")
    oracle = DistanceOracle(wise.solver, 2)
    solver = wise.solver
    w, u, gamma = wise.word("aa"), wise.word("aB"), wise.word("C")
    path = blsp_to_ac_path(oracle, w, u, gamma, 6)
    assert len(path) <= 6 * 6 + 2
    assert solver.eval(w + path) == solver.eval(u)
    key = solver.eval(w)
    for letter in path:
        key = solver.step(key, letter)
        assert oracle.norm(key, cutoff=2) is not None
    assert len(blsp_to_ac_path(oracle, w, w, wise.word(""), 6)) == 0
    try:
        blsp_to_ac_path(oracle, w, wise.word("a"), gamma, 6)
    except PremiseViolation:
        pass
    else:
        raise AssertionError("unequal lengths accepted")
    print(f"  ✓ Connector {path} stays in B(2)")


def test_blsp_to_ac_path_sphere_pairs():
    wise = preset("wise")
    solver = wise.solver
    oracle = DistanceOracle(solver, 3)
    ball = oracle.ball
    k = 6
    built = 0
    for N in (1, 2, 3):
        sphere = ball.sphere(N)
        members = set(sphere)
        for x in sphere:
            for y in neighborhood(solver, x, 2):
                if y not in members or ball.index_of(y) <= ball.index_of(x):
                    continue
                w, u = ball.path_to(x), ball.path_to(y)
                path = blsp_to_ac_path(oracle, w, u, oracle.geodesic(x, y), k)
                assert len(path) <= 6 * k + 2
                walk = positions(solver, path, x)
                assert walk[-1] == y
                assert all(p in ball and ball.distance(p) <= N for p in walk), (str(w), str(u))
                built += 1
    assert built > 0
    print(f"  ✓ {built} sphere pair connectors stay in B(N) for N <= 3")


def test_blsp_to_ac_path_without_shortening():
    wise = preset("wise")
    oracle = DistanceOracle(wise.solver, 2)
    original = properties.find_shortening
    properties.find_shortening = lambda *args, **kwargs: None
    try:
        blsp_to_ac_path(oracle, wise.word("aa"), wise.word("aB"), wise.word("C"), 6)
    except ShorteningUnavailable as e:
        print(f"  ✓ {e}")
    else:
        raise AssertionError("connector built without a shortening")
    finally:
        properties.find_shortening = original


def main():
    """Run all property checker tests."""
    print("=" * 70)
    print("Property Checker Tests")
    print("=" * 70)
    tests = [
        test_fftp_free_group,
        test_fftp_shortening,
        test_fftp_king_lattice,
        test_loop_shortening,
        test_shortening_search_is_complete,
        test_enumerate_loops,
        test_lsp_and_blsp_free_group,
        test_gersten_not_lsp,
        test_state_budget,
        test_lsp_given_family,
        test_workers_are_deterministic,
        test_restricted_distance,
        test_check_ac,
        test_stallings_pair,
        test_fill_certificates,
        test_fill_short_loops,
        test_fill_stuck,
        test_dehn_upper_bound,
        test_dehn_upper_bound_sample,
        test_blsp_to_ac_path,
        test_blsp_to_ac_path_sphere_pairs,
        test_blsp_to_ac_path_without_shortening,
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
    print("✓ All property checker tests passed!")


if __name__ == "__main__":
    main()
