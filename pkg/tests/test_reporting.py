import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpusfuzz.exceptions import ValidationError
from corpusfuzz.harness import FailureClass, StageKind, StageResult, TrialRecord
from corpusfuzz.planner import GeneratorConfig, Strategy
from corpusfuzz.reporting import (
    CampaignSummary,
    average_summaries,
    collect_failing_suite,
    compact_row,
    parse_machine,
    render_machine,
    render_table,
    report,
    tally,
)

OK = StageResult(StageKind.OK, 0)


def rec(i, fc, program="trial-%06d/program.c"):
    cfg = GeneratorConfig((True, False), None, 1000 + i, i, Strategy.SWARM)
    return TrialRecord(i, cfg, program % i if program else None, OK, OK, OK, OK, fc)


def fixture_stream():
    classes = ([FailureClass.CRASH_O0_ONLY] * 2 + [FailureClass.CRASH_BOTH]
               + [FailureClass.TIMEOUT_BOTH] * 3 + [FailureClass.MISCOMPILATION]
               + [FailureClass.PASS] * 5)
    return [rec(i, fc) for i, fc in enumerate(classes)]


def test_empty_stream():
    s = tally([])
    assert s == CampaignSummary()
    assert s.total == 0


def test_hand_tally_fixture():
    s = tally(fixture_stream(), "swarm")
    assert (s.c0, s.c3, s.c03, s.t0, s.t3, s.t03, s.mc, s.passes, s.total) == (2, 0, 1, 0, 0, 3, 1, 5, 12)
    s.check_partition()
    assert compact_row(s) == "C0=2 C3=0 C03=1 T0=0 T3=0 T03=3 MC=1"
    assert s.differential_failures == 3


def test_single_miscompilation_verdict():
    s = tally([rec(0, FailureClass.MISCOMPILATION)])
    assert s.mc == 1
    assert "found differential failures" in render_table([s])


def test_zero_table_has_header_and_zero_row():
    lines = render_table([CampaignSummary()]).splitlines()
    assert lines[0].startswith("| Setting") and "MC" in lines[0]
    assert lines[2].split("|")[-2].strip() == "0"
    assert "no differential failures" in render_table([CampaignSummary()])


def test_malformed_and_skipped_records():
    skipped = TrialRecord(5, rec(5, None).config, None, skip_reason="generator failed")
    lines = [rec(0, FailureClass.PASS).to_json(), skipped.to_json(), '{"schema": 1, "trial_in']
    s = tally(lines)
    assert (s.passes, s.skipped, s.total) == (1, 2, 3)
    s.check_partition()


def test_machine_roundtrip():
    s = tally(fixture_stream(), "kconfig-weighted")
    assert parse_machine(render_machine(s)) == s
    assert report(s, "machine") == render_machine(s)
    with pytest.raises(ValidationError):
        report(s, "xml")
    with pytest.raises(ValidationError):
        parse_machine(json.dumps({"format": "other"}))


@given(st.lists(st.sampled_from(list(FailureClass) + [None]), max_size=60))
def test_partition_law(classes):
    s = tally([rec(i, fc) for i, fc in enumerate(classes)])
    s.check_partition()
    assert parse_machine(render_machine(s)) == s


def test_average_rounds_half_up():
    a = CampaignSummary("swarm", mc=1, total=10, passes=9)
    b = CampaignSummary("swarm", mc=2, total=10, passes=8)
    avg = average_summaries([a, b])
    assert avg["mc"] == 2 and avg["passes"] == 9 and avg["runs"] == 2
    table = render_table([a, b], avg)
    assert "swarm (avg of 2)" in table


def _suite_setup(tmp_path, classes):
    root = tmp_path / "trials"
    records = []
    for i, fc in enumerate(classes):
        d = root / f"trial-{i:06d}"
        d.mkdir(parents=True)
        (d / "program.c").write_text(f"int main(void) {{ return {i}; }}\n")
        records.append(rec(i, fc))
    return root, records


def test_failing_suite_manifest(tmp_path, catalog):
    root, records = _suite_setup(tmp_path, [FailureClass.MISCOMPILATION, FailureClass.PASS,
                                            FailureClass.MISCOMPILATION, FailureClass.MISCOMPILATION])
    manifest = collect_failing_suite(records, tmp_path / "failing", root)
    assert [e["trial_index"] for e in manifest["entries"]] == [0, 2, 3]
    for e in manifest["entries"]:
        assert e["generator_seed"] == 1000 + e["trial_index"]
        assert e["config"]["decisions"] == "10"
        assert (tmp_path / "failing" / e["program"]).exists()


def test_failing_suite_flags_with_catalog(tmp_path):
    from corpusfuzz.features import FeatureCatalog, FeatureSpec
    cat = FeatureCatalog((FeatureSpec("volatiles", "--volatiles", "--no-volatiles", "kw_volatile"),
                          FeatureSpec("jumps", "--jumps", "--no-jumps", "jump_statement")))
    root, records = _suite_setup(tmp_path, [FailureClass.CRASH_O3_ONLY])
    manifest = collect_failing_suite(records, tmp_path / "failing", root, cat)
    assert manifest["entries"][0]["flags"] == ["--volatiles", "--no-jumps", "--seed", "1000"]


def test_all_pass_gives_empty_manifest(tmp_path):
    root, records = _suite_setup(tmp_path, [FailureClass.PASS] * 3)
    assert collect_failing_suite(records, tmp_path / "failing", root)["entries"] == []


def test_deleted_source_is_unrecoverable(tmp_path):
    root, records = _suite_setup(tmp_path, [FailureClass.MISCOMPILATION])
    (root / "trial-000000" / "program.c").unlink()
    entry = collect_failing_suite(records, tmp_path / "failing", root)["entries"][0]
    assert entry["status"] == "unrecoverable" and entry["program"] is None
