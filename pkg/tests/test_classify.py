import itertools

import pytest

from corpusfuzz.exceptions import ValidationError
from corpusfuzz.harness import FailureClass, StageKind, StageResult, classify, digest

OK = StageResult(StageKind.OK, 0)
CRASH = StageResult(StageKind.CRASH, "SIGSEGV")
TIMEOUT = StageResult(StageKind.TIMEOUT, None)


def run_ok(text, status=0):
    return StageResult(StageKind.OK, status, digest(text.encode()))


# Outcome table for -O0 vs -O3 differential testing, as (-O0, -O3, counted as failure?)
OUTCOME_TABLE = [
    ("Compiler crashes", "Compiler crashes", False),
    ("Compiler crashes", "Compiler doesn't crash", True),
    ("Compiler doesn't crash", "Compiler crashes", True),
    ("Outputs are identical for different optimization", None, False),
    ("Outputs are different for different optimization", None, True),
]


def _outcome_case(low, high):
    if low == "Compiler crashes" and high == "Compiler crashes":
        return classify(CRASH, CRASH, None, None)
    if low == "Compiler crashes":
        return classify(CRASH, OK, None, run_ok("x"))
    if high == "Compiler crashes":
        return classify(OK, CRASH, run_ok("x"), None)
    if low.startswith("Outputs are identical"):
        return classify(OK, OK, run_ok("checksum = 1"), run_ok("checksum = 1"))
    return classify(OK, OK, run_ok("checksum = 1"), run_ok("checksum = 2"))


@pytest.mark.parametrize("low,high,failure", OUTCOME_TABLE)
def test_outcome_table_rows(low, high, failure):
    assert _outcome_case(low, high).is_differential_failure is failure


def test_named_examples():
    assert classify(CRASH, CRASH, None, None) is FailureClass.CRASH_BOTH
    assert classify(OK, OK, run_ok("a"), run_ok("a")) is FailureClass.PASS
    assert classify(OK, OK, run_ok("checksum = 1"), run_ok("checksum = 2")) is FailureClass.MISCOMPILATION


def test_exit_status_difference_is_miscompilation():
    assert classify(OK, OK, run_ok("a", 0), run_ok("a", 1)) is FailureClass.MISCOMPILATION


def test_crash_beats_timeout():
    assert classify(CRASH, TIMEOUT, None, None) is FailureClass.CRASH_O0_ONLY
    assert classify(TIMEOUT, CRASH, None, None) is FailureClass.CRASH_O3_ONLY


EXECS = [run_ok("a"), run_ok("b"), run_ok("a", 1), StageResult(StageKind.CRASH, "SIGSEGV"),
         StageResult(StageKind.TIMEOUT, None)]


def test_total_over_all_combinations():
    seen = set()
    compiles = [OK, CRASH, TIMEOUT]
    for cl, ch in itertools.product(compiles, compiles):
        lows = EXECS if cl.kind is StageKind.OK else [None]
        highs = EXECS if ch.kind is StageKind.OK else [None]
        for el, eh in itertools.product(lows, highs):
            fc = classify(cl, ch, el, eh)
            assert isinstance(fc, FailureClass)
            seen.add(fc)
    assert seen == set(FailureClass)


def test_execution_failure_is_inconclusive():
    assert classify(OK, OK, EXECS[3], run_ok("a")) is FailureClass.EXEC_INCONCLUSIVE
    assert classify(OK, OK, run_ok("a"), EXECS[4]) is FailureClass.EXEC_INCONCLUSIVE


def test_inconsistent_stage_set_rejected():
    with pytest.raises(ValidationError):
        classify(CRASH, OK, run_ok("a"), run_ok("a"))
    with pytest.raises(ValidationError):
        classify(OK, OK, None, run_ok("a"))


def test_differential_failure_set():
    assert {f for f in FailureClass if f.is_differential_failure} == {
        FailureClass.CRASH_O0_ONLY, FailureClass.CRASH_O3_ONLY, FailureClass.MISCOMPILATION}


def test_stage_result_roundtrip():
    s = StageResult(StageKind.CRASH, "SIGABRT", digest(b"x"), 0.1234567891, "boom")
    again = StageResult.from_dict(s.to_dict())
    assert again.kind is StageKind.CRASH and again.exit_status == "SIGABRT"
    assert again.wall_time == 0.123457
