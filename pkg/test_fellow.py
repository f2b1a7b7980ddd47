#!/usr/bin/env python3
"""Tests for fellow traveling and synchronization."""
import random
import sys
from pathlib import Path

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

from cayley import DistanceOracle
from config import SEED
from fellow import (
    Reparameterization,
    SyncCase,
    async_ft,
    frechet_constant,
    positions,
    sync_ft,
    sync_ft_independent,
    synchronize,
)
from presentation import PremiseViolation, invert
from zoo import preset

KING = preset("z2-gersten-base")
KING_ORACLE = DistanceOracle(KING.solver, 6)


def test_positions():
    w = KING.word("aab")
    assert positions(KING.solver, w) == [(0, 0), (1, 0), (2, 0), (2, 1)]
    assert positions(KING.solver, w, start=(5, 5))[-1] == (7, 6)
    print("  ✓ Path vertices")


def test_sync_ft_frozen_endpoint():
    report = sync_ft(KING_ORACLE, KING.word("ab"), KING.word("c"), 1)
    assert report and report.max_distance == 1 and report.constant == 2
    failed = sync_ft(KING_ORACLE, KING.word("aa"), KING.word("AA"), 1)
    assert not failed and failed.first_violation == 1
    assert sync_ft_independent(KING.solver, KING.word("ab"), KING.word("c"), 1)
    print("  ✓ Shorter path waits at its endpoint")


def test_reparameterization():
    phi = Reparameterization.identity(4, 2)
    assert phi.values == (0, 1, 2, 2, 2)
    assert phi(-1) == 0 and phi(9) == 2
    assert (phi.n, phi.m) == (4, 2)
    for bad in ((1, 2), (0, 2, 1), ()):
        try:
            Reparameterization(bad)
        except ValueError:
            continue
        raise AssertionError(f"{bad} accepted")
    print("  ✓ Monotone maps validated")


def test_async_regression_wise():
    wise = preset("wise")
    oracle = DistanceOracle(wise.solver, 2)
    w, u = wise.word("Sas"), wise.word("d")
    phi = async_ft(oracle, w, u, 1)
    assert phi is not None and phi.values == (0, 0, 1, 1)
    assert not sync_ft(oracle, w, u, 1)
    assert sync_ft(oracle, w, u, 2)
    assert frechet_constant(oracle, w, u, 3) == 1
    print("  ✓ Sas and d: asynchronous at 1, synchronous only at 2")


def test_synchronize_close():
    w, u = KING.word("aaAAbB"), KING.word("aaAA")
    phi = Reparameterization(tuple(min(t, 4) for t in range(7)))
    result = synchronize(KING_ORACLE, w, u, phi, 1)
    assert result.case == SyncCase.CLOSE
    assert str(result.word) == "aaAA" and result.constant == 4
    print("  ✓ Case 1 returns u")


def test_synchronize_lagging():
    w, u = KING.word("bBbBaaAA"), KING.word("aaAA")
    phi = Reparameterization((0, 0, 0, 0, 0, 1, 2, 3, 4))
    result = synchronize(KING_ORACLE, w, u, phi, 1)
    assert result.case == SyncCase.LAGGING
    assert (result.j, result.l) == (3, 0)
    assert str(result.word) == "bBaaAA"
    assert result.constant == 7
    assert sync_ft_independent(KING.solver, w, result.word, 6)
    print(f"  ✓ Case 2: {result.trace()}")


def test_synchronize_leading():
    w, u = KING.word("aaaAAAbBbB"), KING.word("bBbBaaAA")
    phi = Reparameterization((0, 5, 6, 6, 6, 7, 8, 8, 8, 8, 8))
    result = synchronize(KING_ORACLE, w, u, phi, 1)
    assert result.case == SyncCase.LEADING
    assert result.j == 3
    assert str(result.p1) == "A" and str(result.p2) == ""
    assert str(result.word) == "aaaAAA"
    assert result.constant == 7
    assert sync_ft_independent(KING.solver, w, result.word, 6)
    print(f"  ✓ Case 3: {result.trace()}")


def test_synchronize_premises():
    w, u = KING.word("aaAA"), KING.word("")
    phi = Reparameterization((0, 0, 0, 0, 0))
    for args, label in (
        ((w, KING.word("aaAAbB"), phi, 1), "u longer than w"),
        ((w, u, phi, 0), "k = 0"),
        ((w, u, Reparameterization((0, 0, 0)), 1), "φ of the wrong shape"),
        ((w, u, phi, 1), "asynchronous premise"),
    ):
        try:
            synchronize(KING_ORACLE, *args)
        except PremiseViolation:
            print(f"  ✓ Rejected: {label}")
            continue
        raise AssertionError(f"{label} accepted")


def _suite(rng: random.Random):
    letters = KING.alphabet.letters
    bases = []
    while len(bases) < 8:
        r = "".join(rng.choice(letters) for _ in range(rng.randint(1, 4)))
        if r not in bases:
            bases.append(r)
    for r in bases:
        rw = KING.word(r)
        for i in range(len(rw) + 1):
            for x in "abcd":
                for p in (1, 2):
                    detour = KING.word(x * p + x.upper() * p)
                    w = rw[:i] + detour + rw[i:] + invert(rw)
                    yield w, rw + invert(rw), p


def test_synchronize_generated_suite():
    rng = random.Random(SEED)
    counts = {case: 0 for case in SyncCase}
    total = 0
    for w, u, k in _suite(rng):
        phi = async_ft(KING_ORACLE, w, u, k)
        assert phi is not None, f"no coupling for {w} / {u} at {k}"
        result = synchronize(KING_ORACLE, w, u, phi, k)
        if result.case != SyncCase.CLOSE:
            assert len(result.word) < len(w)
        assert KING.solver.is_identity(KING.solver.eval(result.word))
        assert sync_ft_independent(KING.solver, w, result.word, result.constant - 1,
                                   start_u=result.start), f"{w}: {result.trace()}"
        counts[result.case] += 1
        total += 1
    assert total >= 100, total
    print(f"  ✓ {total} pairs synchronized: " + ", ".join(f"{c.name}={n}" for c, n in counts.items()))


def main():
    """Run all fellow traveler tests."""
    print("=" * 70)
    print("Fellow Traveler Tests")
    print("=" * 70)
    tests = [
        test_positions,
        test_sync_ft_frozen_endpoint,
        test_reparameterization,
        test_async_regression_wise,
        test_synchronize_close,
        test_synchronize_lagging,
        test_synchronize_leading,
        test_synchronize_premises,
        test_synchronize_generated_suite,
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
    print("✓ All fellow traveler tests passed!")


if __name__ == "__main__":
    main()
