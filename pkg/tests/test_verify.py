import json

import numpy as np
import pytest

from tsallis_coherence import channels as ch
from tsallis_coherence import verify


@pytest.fixture(scope="module")
def small_run():
    return verify.run_all(trials=6, dims=(2, 3), seed=3)


def test_small_run_passes_every_hard_suite(small_run):
    failed = [s.name for s in small_run if not s.ok]
    assert failed == []
    names = {s.name for s in small_run}
    assert {"tq_sandwich_lower", "c3_strong_monotonicity", "alt_inequality", "oracle_cq",
            "unital_trace_inequality", "data_processing_census"} <= names
    assert len(names) == len(small_run)


def test_report_schema(small_run):
    rep = verify.report(small_run)
    assert rep["schema_version"] == 1
    assert rep["overall"] == "pass"
    for s in rep["suites"]:
        assert set(s) == {"name", "hard", "trials", "passes", "worst_margin", "counterexamples"}
    json.dumps(rep)


def test_zero_trials_is_vacuous():
    suites = verify.run_all(trials=0)
    assert all(s.trials == 0 and s.ok for s in suites)
    assert verify.report(suites)["overall"] == "pass"


def test_suites_are_order_independent():
    alone = verify.holder_step(20, seed=1)
    verify.deformed_log_sandwich(50, seed=1)
    again = verify.holder_step(20, seed=1)
    assert alone.to_dict() == again.to_dict()


def test_suite_result_bookkeeping():
    res = verify.SuiteResult("x")
    res.record(0.5, True)
    res.record(-1.0, False, note="bad")
    res.record_error(RuntimeError("boom"))
    assert (res.trials, res.passes, res.worst_margin) == (3, 1, -1.0)
    assert not res.ok
    assert res.counterexamples[0] == {"margin": -1.0, "note": "bad"}
    assert "RuntimeError: boom" in res.counterexamples[1]["error"]
    assert verify.SuiteResult("census", hard=False, trials=2).ok


def test_counterexample_dumps_are_capped():
    res = verify.SuiteResult("x")
    for _ in range(10):
        res.record(-1.0, False)
    assert len(res.counterexamples) == verify.MAX_DUMPS


def test_broken_channel_is_caught_by_name():
    def broken(d, n, rng):
        good = ch.random_incoherent_channel(d, n, rng=rng)
        return ch.KrausChannel(tuple(1.1 * k for k in good.kraus), validate=False)

    res = verify.channel_completeness(3, dims=(2,), factory=broken)
    assert res.passes == 0 and not res.ok
    assert "kraus" in res.counterexamples[0]


def test_axiom_crash_is_a_failed_trial():
    def exploding(d, n, rng):
        raise RuntimeError("no channel")

    suites = verify.axioms(2, dims=(2,), factory=exploding)
    for s in suites:
        assert (s.trials, s.passes) == (2, 0)
        assert "no channel" in s.counterexamples[0]["error"]


def test_strict_half_vs_geometric_gap_is_a_census():
    _, ge, strict = verify.half_vs_geometric(3)
    assert ge.hard and not strict.hard


def test_maximal_coherence_suite_counts_every_cell():
    res = verify.maximal_coherence(dims=(2, 3), qs=np.array([0.3, 0.7]))
    assert res.trials == 4 and res.ok
