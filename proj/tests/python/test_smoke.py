"""Smoke tests for the python bindings: the main operations round-trip."""

import math

import pytest

import runbisect as rb


def test_taylor_kernels_match_libm():
    cfg = rb.TaylorConfig(50)
    for x in (0.0, 0.25, 1.0, -1.5, 2.0):
        assert abs(rb.taylor_sin(x, cfg) - math.sin(x)) < 1e-12
        assert abs(rb.taylor_cos(x, cfg) - math.cos(x)) < 1e-12


def test_evaluate_composes_the_sine_family():
    fn = rb.make_sin_of_cos(50)
    assert abs(rb.evaluate(fn, 1.0) - math.sin(math.cos(1.0))) < 1e-10
    two_x = rb.make_sin_two_x(50)
    assert abs(rb.evaluate(two_x, 2.0) - math.sin(4.0)) < 1e-10
    line = rb.make_linear_shift(0.3)
    assert rb.evaluate(line, 1.0) == 0.7


def test_function_parsing_and_names():
    fn = rb.make_function("sin-2x", 25)
    assert fn.name == "sin-2x"
    assert fn.taylor_terms == 25
    with pytest.raises(ValueError):
        rb.make_function("cosine")


def test_iteration_arithmetic():
    unit = rb.Interval(1.0, 2.0)
    assert rb.required_iterations(unit, 0.015625) == 6
    assert rb.required_iterations_pow2(unit, -6) == 6
    assert rb.required_iterations_pow2(unit, -2520) == 2520
    assert rb.rounds_required(6, 2) == 3
    assert rb.rounds_required(2520, 10) == 252
    assert rb.depth_for_threads(7) == 3


def test_serial_solve_reaches_the_known_cell():
    res = rb.bisect_serial(rb.make_sin_of_cos(), rb.Interval(1.0, 2.0),
                           epsilon_pow2=-6)
    assert res.root == 1.578125
    assert res.final_interval.a == 1.5625
    assert res.final_interval.b == 1.578125
    assert res.iterations_executed == 6
    assert res.evaluations == 8


def test_runahead_is_bit_identical_to_serial():
    fn = rb.make_sin_of_cos(50)
    iv = rb.Interval(1.0, 2.0)
    serial = rb.bisect_serial(fn, iv, iterations=9)
    for threads in (1, 3, 7):
        for mode in ("persistent", "per-round"):
            par = rb.bisect_runahead(fn, iv, threads, spawn_mode=mode,
                                     iterations=9)
            assert par.root == serial.root
            assert par.final_interval == serial.final_interval


def test_invalid_thread_count_names_the_neighbors():
    with pytest.raises(ValueError) as err:
        rb.bisect_runahead(rb.make_sin_of_cos(50), rb.Interval(1.0, 2.0), 4,
                           iterations=3)
    assert "3" in str(err.value)
    assert "7" in str(err.value)


def test_budget_kwargs_are_mutually_exclusive():
    with pytest.raises(ValueError):
        rb.bisect_serial(rb.make_sin_of_cos(50), rb.Interval(1.0, 2.0),
                         iterations=3, epsilon=0.5)


def test_bracket_failure_is_a_runtime_error():
    with pytest.raises(RuntimeError):
        rb.bisect_serial(rb.make_sin_of_cos(50), rb.Interval(2.0, 4.0),
                         iterations=3)


def test_quick_thread_sweep():
    rows = rb.sweep_threads(rb.make_linear_shift(0.3), rb.Interval(0.0, 1.0),
                            [1, 3], reps=2, warmups=0, iterations=6)
    assert [r.threads for r in rows] == [1, 3]
    assert rows[0].normalized_latency == 1.0
    assert rows[0].speedup == 1.0
    assert rows[1].root == rows[0].root
    assert rows[1].median_ns > 0


def test_csv_round_trip():
    rows = rb.sweep_threads(rb.make_sin_two_x(50), rb.Interval(2.0, 4.0),
                            [1], reps=2, warmups=0, iterations=3)
    text = rb.render_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == rb.CSV_HEADER
    fields = lines[1].split(",")
    assert len(fields) == 14
    assert fields[0] == "sin-2x"
    assert float(fields[11]) == rows[0].root
    assert float(fields[12]) == rows[0].final_a
    assert float(fields[13]) == rows[0].final_b


def test_format_real_survives_float_round_trip():
    for v in (0.1, 1.0 / 3.0, 1e-300, -0.0, 2.0):
        assert float(rb.format_real(v)) == v
