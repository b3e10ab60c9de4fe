import numpy as np
import pytest

from sttc_microsim.benchmark import (
    TRAINING_CASES,
    load_cases,
    render_tables,
    run_benchmark,
)
from sttc_microsim.codes import GeneratorMatrix


def small_benchmark(model, sanity=False, seed=3):
    cases = load_cases()[:1]
    return run_benchmark(
        cases, model, n_opponents=3, gt_iterations=3, trials=10, seed=seed, sanity=sanity
    )


class TestCases:
    def test_bundled_file_has_seven_named_cases(self):
        cases = load_cases()
        assert [name for name, _ in cases] == [
            "Banarjee", "Ilhan", "Chen", "Inoue", "Yan", "Liao", "Hong",
        ]
        assert cases[6][1] == GeneratorMatrix.from_text("[0 2 2 3; 2 2 1 2]")

    def test_training_cases(self):
        assert TRAINING_CASES[0][1] == GeneratorMatrix.from_text("[0 0 2 1; 2 1 0 0]")
        assert TRAINING_CASES[1][1] == GeneratorMatrix.from_text("[2 0 1 3; 2 2 0 1]")

    def test_custom_file(self, tmp_path):
        path = tmp_path / "cases.txt"
        path.write_text("# comment\nOnly: [0 0 2 1; 2 1 0 0]\n")
        cases = load_cases(path)
        assert len(cases) == 1 and cases[0][0] == "Only"

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "cases.txt"
        path.write_text("no separator here\n")
        with pytest.raises(ValueError):
            load_cases(path)
        path.write_text("# nothing but comments\n")
        with pytest.raises(ValueError):
            load_cases(path)


class TestRunBenchmark:
    def test_report_shape_and_ranges(self, accept_all_model):
        report = small_benchmark(accept_all_model)
        assert len(report.cases) == 1
        case = report.cases[0]
        assert 0.0 <= case.accuracy_micro <= 1.0
        assert 0.0 <= case.accuracy_mlp <= 1.0
        assert case.accepted + case.exhausted == case.n_opponents
        assert case.mean_full_seconds > 0
        assert case.mean_mlp_seconds > 0
        assert report.settings["n_opponents"] == 3

    def test_improvements_recompute_from_their_columns(self, accept_all_model):
        report = run_benchmark(
            load_cases()[:2], accept_all_model, n_opponents=3, gt_iterations=3, trials=5, seed=5
        )
        for case in report.cases:
            if case.accuracy_micro > 0:
                want = (case.accuracy_mlp - case.accuracy_micro) / case.accuracy_micro * 100
                assert case.accuracy_improvement_pct == pytest.approx(want)
            want = (case.mean_full_seconds - case.mean_mlp_seconds) / case.mean_full_seconds * 100
            assert case.time_improvement_pct == pytest.approx(want)
        s = report.summary
        per_case = [c.accuracy_improvement_pct for c in report.cases if c.accuracy_improvement_pct is not None]
        assert s["accuracy_improvement_pct"] == pytest.approx(float(np.mean(per_case)))
        micro = [c.accuracy_micro for c in report.cases]
        assert s["accuracy_micro"]["mean"] == pytest.approx(float(np.mean(micro)))
        assert s["accuracy_micro"]["s"] == pytest.approx(float(np.std(micro, ddof=1)))
        assert s["accuracy_micro"]["s2"] == pytest.approx(float(np.var(micro, ddof=1)))

    def test_deterministic_excluding_timing(self, accept_all_model):
        from tests.conftest import scrub_timing

        a = small_benchmark(accept_all_model).to_dict()
        b = small_benchmark(accept_all_model).to_dict()
        assert scrub_timing(a) == scrub_timing(b)

    def test_sanity_mode_agrees_with_itself(self, accept_all_model):
        report = small_benchmark(accept_all_model, sanity=True)
        assert report.sanity["agreement"] == 1.0
        assert report.sanity["full_ties"] >= 0

    def test_exhausted_searches_counted(self, reject_all_model):
        report = run_benchmark(
            load_cases()[:1], reject_all_model, n_opponents=2, gt_iterations=2, trials=4, seed=6
        )
        case = report.cases[0]
        assert case.exhausted == 2
        assert case.mean_trials_used == 4.0
        assert case.mean_accepted_seconds is None


def test_render_tables_structure(accept_all_model):
    report = small_benchmark(accept_all_model)
    text = render_tables(report)
    assert "ACCURACY" in text and "WALL TIME" in text
    assert "MEAN" in text and "S^2" in text
    assert report.cases[0].name in text
