"""Acceptance criteria 1-12, each with its wall-clock limit.

Run under pytest (a summary line per criterion is printed at the end) or
directly with ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE, CORPUS  # noqa: E402
from oracle import random_sentence, truth  # noqa: E402

from streamlogic import LaurentRational, decide, decide_full, eval_stream, parse  # noqa: E402
from streamlogic import circuits, streams  # noqa: E402
from streamlogic.errors import BudgetExceeded  # noqa: E402
from streamlogic.expand import bisim_formula  # noqa: E402
from streamlogic.streams import TruncSeries, abs_val, sqrt_prefix, ts_arith  # noqa: E402


def _slog(name: str):
    return parse((CORPUS / f"{name}.slog").read_text())


def _ints(ts: TruncSeries) -> list:
    return [int(c) if c.denominator == 1 else c for c in ts.coeffs]


# --- the criteria -----------------------------------------------------------


def crit_1():
    assert _ints(eval_stream("X/(1-X-X^2)", 7)) == [0, 1, 1, 2, 3, 5, 8]
    return 1.0


def crit_2():
    assert _ints(eval_stream("1/(1-X)", 5)) == [1] * 5
    assert _ints(eval_stream("1/(1-X)^2", 4)) == [1, 2, 3, 4]
    assert _ints(eval_stream("1/(1-3*X)", 4)) == [1, 3, 9, 27]
    return 1.0


def _catalan_fixpoint(n: int) -> list:
    # iterate f <- 1 + X*f^2 on plain integer prefixes until stable
    f = [0] * n
    while True:
        sq = [sum(f[i] * f[k - i] for i in range(k + 1)) for k in range(n)]
        g = [1] + sq[: n - 1]
        if g == f:
            return f
        f = g


def crit_3():
    want = _catalan_fixpoint(8)
    assert want == [1, 1, 2, 5, 14, 42, 132, 429]
    assert _ints(eval_stream("catalan", 8)) == want
    assert _ints(streams.catalan_check(8)) == want
    return 1.0


def crit_4():
    rng = random.Random(4)
    for _ in range(100):
        head = Fraction(rng.randint(1, 9), rng.randint(1, 9)) ** 2
        rest = [Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(19)]
        g = TruncSeries(0, (head, *rest))
        assert sqrt_prefix(ts_arith(g, g, "mul"), 20) == g
    return None


def crit_5():
    acc = circuits.parse_circuit((CORPUS / "accumulator.sc").read_text())
    t0 = time.perf_counter()
    assert str(circuits.transfer(acc)) == "1/(1-X)"
    assert time.perf_counter() - t0 < 10
    t0 = time.perf_counter()
    assert decide(circuits.encode_logic(acc, _slog("claim_ones"))) == "VALID"
    assert time.perf_counter() - t0 < 10
    t0 = time.perf_counter()
    assert decide(_slog("synthesis")) == "VALID"
    assert time.perf_counter() - t0 < 10
    return None


def crit_6():
    for k in range(1, 18):
        assert decide(_slog(f"axiom{k:02d}")) == "VALID", f"axiom {k}"
    assert decide(_slog("axiom09_series")) == "INVALID"
    return 60.0


def crit_7():
    rng = random.Random(20240)
    for _ in range(100):
        s = random_sentence(rng)
        got = decide(parse(s.text()))
        assert (got == "VALID") == truth(s), s.text()
    return 300.0


def crit_8():
    valid = ["0 < X", "X < 1", "X < 1/10", "X < 1/1000000", "X^2 < X"]
    for text in valid:
        t0 = time.perf_counter()
        assert decide(parse(text)) == "VALID", text
        assert time.perf_counter() - t0 < 1, text
    t0 = time.perf_counter()
    assert decide(parse("X = 0")) == "INVALID"
    assert time.perf_counter() - t0 < 1
    return None


def _random_lr(rng: random.Random) -> LaurentRational:
    num = [rng.randint(-4, 4) for _ in range(rng.randint(1, 4))]
    den = [rng.randint(-4, 4) for _ in range(rng.randint(1, 3))]
    if not any(den):
        den[0] = 1
    return LaurentRational(num, den) * LaurentRational.X(rng.randint(-3, 3))


def crit_9():
    rng = random.Random(9)
    zero = LaurentRational.const(0)
    for _ in range(1000):
        f, g = _random_lr(rng), _random_lr(rng)
        assert abs_val(f + g) <= max(abs_val(f), abs_val(g))
        assert abs_val(f * g) == abs_val(f) * abs_val(g)
        if f > zero and g > zero:
            assert f + g > zero and f * g > zero
    return None


def crit_10():
    assert decide(_slog("fibonacci")) == "VALID"
    assert decide(_slog("fibonacci_wrong")) == "INVALID"
    return 30.0


def crit_11():
    assert decide(bisim_formula(parse("x = y"))) == "VALID"
    assert decide(bisim_formula(parse("x = y + 1"))) == "INVALID"
    return 30.0


def crit_12():
    # The complexity bounds themselves are not reproduced.  Substitute:
    # the verdict does not depend on the budget once the budget suffices,
    # and an insufficient budget is reported, never turned into a verdict.
    for name in ["axiom17_cubic", "synthesis", "divides_between", "imaginary"]:
        f = _slog(name)
        d = decide_full(f)
        need = d.stats["polys"]
        assert need > 0, name
        verdicts = {decide(f, budget=b) for b in (need, 2 * need, 10 * need)}
        assert verdicts == {d.status}, name
        with pytest.raises(BudgetExceeded):
            decide(f, budget=need - 1)
    return None


CRITERIA = {n: globals()[f"crit_{n}"] for n in range(1, 13)}
NOTES = {12: "substitute for the unreproduced complexity bounds: budget determinism"}


def run_criterion(n: int) -> tuple[bool, float, str]:
    t0 = time.perf_counter()
    try:
        limit = CRITERIA[n]()
    except AssertionError as exc:
        return False, time.perf_counter() - t0, f"assertion failed: {exc}"
    secs = time.perf_counter() - t0
    if limit is not None and secs >= limit:
        return False, secs, f"over the {limit:g}s limit"
    return True, secs, NOTES.get(n, "")


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, secs, note = run_criterion(n)
    ACCEPTANCE[n] = (ok, secs, note)
    assert ok, note


if __name__ == "__main__":
    failed = 0
    for n in sorted(CRITERIA):
        ok, secs, note = run_criterion(n)
        failed += not ok
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({secs:.2f}s){'  ' + note if note else ''}")
    sys.exit(1 if failed else 0)
