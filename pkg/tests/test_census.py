from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beaverlab.census import (
    TRIMMED,
    VISITED,
    HaltingCensus,
    busy_beaver,
    cumulative_halting,
    fit_reference,
    fit_table,
    format_sig,
    halting_probability,
    output_census,
    run_census,
    scan_space,
    shard_bounds,
    simulate_block,
)
from beaverlab.io import load_fixture
from beaverlab.machines import decode_machine, machine_count, run, trim_output
from oracles import oracle_census, oracle_run


@pytest.mark.parametrize("n,budget", [(1, 1), (1, 5), (2, 6), (2, 9)])
def test_small_censuses_match_scalar_oracle(n, budget):
    census = run_census(n, budget)
    counts, nonhalting = oracle_census(n, budget)
    assert census.counts == dict(sorted(counts.items()))
    assert census.nonhalting == nonhalting
    assert census.total == machine_count(n)


def test_two_state_census_values():
    census = run_census(2, 6)
    assert census.counts == {1: 2000, 2: 800, 3: 160, 4: 56, 5: 8, 6: 20}
    assert census.nonhalting == 6956


@pytest.mark.parametrize("n", [1, 2, 3])
def test_step_one_count_is_analytic(n, census32):
    census = census32 if n == 3 else run_census(n)
    assert census.counts[1] == 2 * (4 * n + 2) ** (2 * n - 1)


def test_three_state_budget_fourteen_equals_reference_table():
    ref = load_fixture("fig4")
    census = run_census(3, 14)
    assert census.counts == ref.counts
    assert census.nonhalting == ref.undecided


def test_three_state_census_totals(census32):
    assert census32.total == 7_529_536
    assert census32.halting + census32.nonhalting == census32.total
    assert census32.max_time == 21


@settings(max_examples=200, deadline=None)
@given(st.integers(0, machine_count(3) - 1))
def test_sampled_three_state_machines_match_oracle(index):
    budget = 21
    block = simulate_block(3, budget, index, index + 1, outputs=True)
    t, ones, out = oracle_run(index, 3, budget)
    if t is None:
        assert block["steps"][0] == 0
    else:
        assert (int(block["steps"][0]), int(block["ones"][0])) == (t, ones)


def test_block_agrees_with_scalar_runs():
    block = simulate_block(2, 6, 0, 10_000, outputs=True)
    for i in range(0, 10_000, 37):
        r = run(decode_machine(i, 2), 6)
        assert int(block["steps"][i]) == (r.steps if r.halted else 0)
        if r.halted:
            assert int(block["ones"][i]) == r.ones


@pytest.mark.parametrize("shards", [2, 3, 7])
def test_shard_count_does_not_change_results(shards):
    one = scan_space(2, 8, 1, outputs=True, runtimes=True)
    many = scan_space(2, 8, shards, outputs=True, runtimes=True)
    assert one.counts == many.counts
    assert one.outputs == many.outputs
    assert np.array_equal(one.runtimes, many.runtimes)
    assert (one.step_champions, one.ones_champions) == (many.step_champions, many.ones_champions)


def test_shard_bounds_cover_range():
    for total, shards in ((10, 3), (7, 7), (5, 9)):
        bounds = shard_bounds(total, shards)
        assert bounds[0][0] == 0 and bounds[-1][1] == total
        assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))
    with pytest.raises(ValueError):
        shard_bounds(10, 0)


def test_cancelled_scan_is_partial():
    calls = iter([False, True])
    scan = scan_space(3, 21, should_stop=lambda: next(calls))
    census = HaltingCensus.from_scan(scan)
    assert census.partial and scan.stop < machine_count(3)
    with pytest.raises(ValueError):
        halting_probability(census, 1)


def test_busy_beaver_small():
    one = busy_beaver(1)
    assert (one.S_observed, one.Sigma_observed) == (1, 1)
    two = busy_beaver(2)
    assert (two.S_observed, two.Sigma_observed) == (6, 4)
    for i in two.step_champions:
        assert run(decode_machine(i, 2), 6).steps == 6


def test_halting_probability():
    census = run_census(2, 6)
    assert halting_probability(census, 1) == Fraction(1, 5)
    assert halting_probability(census, None) == Fraction(6956, 10_000)
    with pytest.raises(ValueError):
        halting_probability(census, 7)


def test_cumulative_halting_ends_at_one():
    curve = cumulative_halting(run_census(2, 6))
    assert curve[6] == 1
    assert list(curve.values()) == sorted(curve.values())


@pytest.mark.parametrize(
    "x,digits,text",
    [(Fraction(1, 5), 6, "0.200000"), (Fraction(78, 10_000), 2, "0.0078"), (Fraction(128, 7_529_536), 2, "0.000017"),
     (0, 3, "0"), (Fraction(2, 3), 3, "0.667")],
)
def test_format_sig(x, digits, text):
    assert format_sig(x, digits) == text


def test_fit_table(census32):
    rows = fit_table(census32)
    assert rows[0].t == 1 and rows[0].fit == fit_reference(1) == 100 * 2**13
    assert all(r.ratio == r.k_t / r.fit for r in rows)
    assert [r.t for r in rows] == sorted(census32.counts)


def test_output_rules(outputs32):
    visited, trimmed = outputs32[VISITED], outputs32[TRIMMED]
    assert visited.halting == trimmed.halting
    assert trimmed.distinct <= visited.distinct
    assert set(trimmed.outputs) == {trim_output(o) for o in visited.outputs}
    assert all(set(o) <= {"0", "1"} for o in visited.outputs)


def test_output_census_small_space_matches_oracle():
    got = output_census(2, 6)
    expected = {}
    for i in range(machine_count(2)):
        t, _, out = oracle_run(i, 2, 6)
        if t is not None:
            expected[out] = expected.get(out, 0) + 1
    assert got.outputs == expected
    assert output_census(2, 6, rule=TRIMMED).outputs.keys() == {trim_output(o) for o in expected}
    with pytest.raises(ValueError):
        output_census(2, 6, rule="raw")


def test_output_tracking_budget_limit():
    with pytest.raises(ValueError):
        simulate_block(2, 63, 0, 1, outputs=True)
