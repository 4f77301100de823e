import math

import pytest

import pevdr


def test_wrap_hour():
    assert pevdr.wrap_hour(-2) == 22
    assert pevdr.wrap_hour(0) == 24
    assert pevdr.wrap_hour(5) == 5
    assert pevdr.wrap_hour(25) == 1


def test_soc_at_arrival():
    assert pevdr.soc_at_arrival(6.0, 24.0) == pytest.approx(18.0)
    with pytest.raises(RuntimeError):
        pevdr.soc_at_arrival(30.0, 24.0)


def test_price_matrix_and_sigma():
    text = ",".join(["40"] * 24) + "\n" + ",".join(["60"] * 24) + "\n"
    m = pevdr.load_price_matrix(text, pevdr.MarketKind.RT)
    assert m.days == 2
    assert m.at(1, 24) == 60.0
    sigma = pevdr.hourly_std(m)
    assert all(s == pytest.approx(10.0) for s in sigma)


def test_threshold_gamma_constant_case():
    prev = [42.0] * 24
    sigma = [3.0] * 24
    gamma = pevdr.threshold_gamma(prev, [42.0] * 12, sigma, t=12, window_k=3)
    assert gamma == pytest.approx(42.0 * 4.0 / 3.0)


def test_solve_shaping_prefers_cheapest_slot():
    p = pevdr.PevProfile()
    p.arrival = 10
    p.departure = 12
    p.energy_need = 1.8
    p.power_limit = 1.8
    p.capacity = 24.0
    p.soc_at_arrival = pevdr.soc_at_arrival(1.8, 24.0)
    cost = [0.0] * 24
    cost[9], cost[10], cost[11] = 5.0, 1.0, 3.0
    schedule = pevdr.solve_shaping(p, cost, v2g=False)
    assert schedule[10] == pytest.approx(1.8)
    assert sum(schedule) == pytest.approx(1.8)


def test_settle_day_shortfall():
    purchase = [0.0] * 24
    realized = [500.0] * 24
    da = [40.0] * 24
    rt = [100.0] * 24
    ledger = pevdr.settle_day(purchase, realized, da, rt, sellback=True)
    assert ledger["total_cost"] == pytest.approx(1200.0)
    assert ledger["imbalance"][0] == pytest.approx(500.0)


def test_ideal_cost():
    assert pevdr.ideal_cost([1000.0] * 24, [48.95] * 24) == pytest.approx(24 * 48.95)


def test_run_day_report_ordering():
    s = pevdr.Scenario()
    s.n_users = 10
    s.synth_days = 8
    s.day_index = 7
    s.spike_day = 7
    report = pevdr.run_day_report(s)
    assert report.after_p1 is not None and report.after_p2 is not None
    assert report.ideal <= report.real_uncoordinated + 1e-6
    assert report.after_p2 <= report.after_p1 + 1e-6
    assert math.isfinite(report.ideal)
