import pytest

from corpusfuzz.exceptions import ValidationError
from corpusfuzz.features import extract_features, extract_file
from corpusfuzz.harness import FailureClass, run_trial
from corpusfuzz.mock import mock_toolchain, scenario_path, write_synthetic_corpus
from corpusfuzz.mock.corpus import SNIPPETS, synthetic_program
from corpusfuzz.planner import GeneratorConfig, Strategy


@pytest.mark.parametrize("feature", sorted(SNIPPETS))
def test_each_snippet_counts_once(catalog, feature):
    v = extract_features(synthetic_program({feature: 3}), catalog)
    assert v.counts[catalog.index(feature)] == 3


def test_synthetic_corpus_is_rich_in_chosen_features(tmp_path, catalog):
    paths = write_synthetic_corpus(tmp_path, n_programs=10, seed=4)
    assert len(paths) == 10
    vol = [extract_file(p, catalog).counts[catalog.index("volatiles")] for p in paths]
    assert vol[0] == 2 and all(8 <= v <= 12 for v in vol[1:])
    again = write_synthetic_corpus(tmp_path / "again", n_programs=10, seed=4)
    assert [open(p).read() for p in paths] == [open(p).read() for p in again]


def test_unknown_scenario(tmp_path):
    with pytest.raises(ValidationError, match="unknown mock scenario"):
        scenario_path("nope")
    with pytest.raises(ValidationError, match="does not exist"):
        scenario_path(str(tmp_path / "missing.scn"))


def test_custom_scenario_file(tmp_path, catalog):
    scn = tmp_path / "custom.scn"
    scn.write_text("# the -O0 compile crashes whenever jumps are on\ncrash -O0 any jumps\n")
    cfg = GeneratorConfig(tuple(n == "jumps" for n in catalog.names), None, 5, 0, Strategy.SWARM)
    rec = run_trial(cfg, mock_toolchain(str(scn)), tmp_path / "w", catalog)
    assert rec.failure_class is FailureClass.CRASH_O0_ONLY


@pytest.mark.parametrize("on,expected", [
    (["bitfields", "packed-struct"], FailureClass.CRASH_O3_ONLY),
    (["builtins", "arrays", "pointers", "const-pointers"], FailureClass.EXEC_INCONCLUSIVE),
    (["volatiles", "unions"], FailureClass.MISCOMPILATION),
    ([], FailureClass.PASS),
])
def test_mixed_scenario(tmp_path, catalog, on, expected):
    cfg = GeneratorConfig(tuple(n in on for n in catalog.names), None, 8, 0, Strategy.SWARM)
    rec = run_trial(cfg, mock_toolchain("mixed"), tmp_path, catalog)
    assert rec.failure_class is expected
