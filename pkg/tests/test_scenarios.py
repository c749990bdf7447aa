import numpy as np
import pytest

from incongruity.core import MetricDef
from incongruity.errors import DomainError, SchemaError
from incongruity.scenarios import (DailyLog, ScaleReading, Sighting, itinerary_report,
                                   monotone_dependence_report, rank_theories, scales_report,
                                   witness_cross_incongruity)

TRAVEL = [[0, 15], [15, 0]]


def scales_oracle(readings, window, tol):
    devs = [max(0.0, abs(a.weight - b.weight) - tol)
            for a in readings if a.scale_id == 1
            for b in readings if b.scale_id == 2 and abs(a.time - b.time) <= window]
    return sorted(devs)


class TestScales:
    def test_within_tolerance(self):
        r = scales_report([ScaleReading(1, 0, 180.4), ScaleReading(2, 2, 181.0)])
        assert r["pairs"] == 1 and r["violating_pairs"][0]["deviation"] == 0.0

    def test_deviation_one(self):
        r = scales_report([ScaleReading(1, 0, 180.0), ScaleReading(2, 5, 182.0)], agg="max")
        assert r["incongruity"] == 1.0
        assert r["violating_pairs"][0]["deviation"] == 1.0

    def test_window_boundary(self):
        r = scales_report([ScaleReading(1, 0, 180.0), ScaleReading(2, 6, 190.0)])
        assert r["pairs"] == 0 and r["no_collisions"] and r["incongruity"] == 0.0

    def test_random_against_loops(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            rs = [ScaleReading(int(rng.integers(1, 3)), float(rng.integers(0, 60)),
                               float(rng.uniform(170, 175))) for _ in range(25)]
            devs = scales_oracle(rs, 5, 1)
            rep = scales_report(rs, agg="max")
            assert rep["pairs"] == len(devs)
            if devs:
                assert rep["incongruity"] == max(devs)
                rank = min(int(0.8 * len(devs)) + 1, len(devs))
                assert scales_report(rs)["incongruity"] == devs[rank - 1]
            assert [p["deviation"] for p in rep["violating_pairs"]] == sorted(devs, reverse=True)

    def test_time_shift(self):
        rng = np.random.default_rng(1)
        rs = [ScaleReading(1 + i % 2, float(rng.integers(0, 30)), float(rng.uniform(170, 173)))
              for i in range(12)]
        shifted = [ScaleReading(r.scale_id, r.time + 1e4, r.weight) for r in rs]
        a, b = scales_report(rs), scales_report(shifted)
        assert a["incongruity"] == b["incongruity"] and a["pairs"] == b["pairs"]

    def test_validation(self):
        with pytest.raises(SchemaError):
            ScaleReading(3, 0, 100)
        with pytest.raises(DomainError):
            ScaleReading(1, 0, -5)
        with pytest.raises(SchemaError):
            scales_report([], agg="median")


def monotone_oracle(log, gap, tol):
    pi1, pi2 = [], []
    for a in log:
        for b in log:
            if a is b:
                continue
            dev = max(0.0, abs(a.weight - b.weight) - tol)
            if a.calories < b.calories and a.weight > b.weight and abs(a.calories - b.calories) > gap:
                pi1.append(dev)
            if a.weight > b.weight and abs(a.calories - b.calories) < gap:
                pi2.append(dev)
    mean = lambda v: sum(v) / len(v) if v else 0.0
    return mean(pi1), mean(pi2)


class TestMonotone:
    def test_opposite_direction(self):
        r = monotone_dependence_report([DailyLog(1, 2000, 180), DailyLog(2, 2500, 178)])
        assert r["aspects"][0]["value"] == 1.0 and r["total"] == 1.0

    def test_same_intake(self):
        r = monotone_dependence_report([DailyLog(1, 2000, 180), DailyLog(2, 2050, 180.5)])
        assert r["aspects"][1]["value"] == 0.0 and r["aspects"][0]["no_collisions"]

    def test_increasing(self):
        log = [DailyLog(d, 1800 + 200 * d, 170 + d) for d in range(6)]
        assert monotone_dependence_report(log)["total"] == 0.0

    def test_non_monotone_mode(self):
        log = [DailyLog(1, 2000, 180), DailyLog(2, 2500, 178), DailyLog(3, 2020, 183)]
        r = monotone_dependence_report(log, monotone=False)
        assert len(r["aspects"]) == 1 and r["aspects"][0]["name"] == "same_intake"
        assert r["total"] == monotone_oracle(log, 100, 1)[1]

    def test_random_against_loops(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            log = [DailyLog(d, float(rng.integers(1500, 3000)), float(rng.uniform(170, 180)))
                   for d in range(15)]
            p1, p2 = monotone_oracle(log, 100, 1)
            r = monotone_dependence_report(log)
            assert (r["aspects"][0]["value"] or 0.0) == pytest.approx(p1, abs=1e-12)
            assert r["total"] == pytest.approx(p1 + p2, abs=1e-12)

    def test_too_short(self):
        with pytest.raises(DomainError):
            monotone_dependence_report([DailyLog(1, 2000, 180)])


def slack_oracle(theory, witnesses, table):
    s = [max(0.0, table[a.location][b.location] - abs(a.time - b.time))
         for a in theory for b in witnesses]
    return sum(s) / len(s) if s else 0.0


class TestItinerary:
    def test_slack_five(self):
        r = itinerary_report([Sighting("theory", 10, 1)], [Sighting("w1", 0, 0)], TRAVEL)
        assert r["total"] == 5.0 and r["slack"][0]["deviation"] == 5.0 and not r["feasible"]

    def test_boundary_feasible(self):
        r = itinerary_report([Sighting("theory", 10, 1)], [Sighting("w1", 0, 0)], [[0, 10], [10, 0]])
        assert r["total"] == 0.0 and r["feasible"]

    def test_identical(self):
        s = [Sighting("w", 0, 0), Sighting("w", 30, 1)]
        assert itinerary_report([Sighting("theory", x.time, x.location) for x in s], s, TRAVEL)["total"] == 0.0

    def test_nine_formulas_twenty_pairs(self):
        theory = [Sighting("theory", t, t // 10 % 2) for t in (0, 10, 20, 30)]
        wit = [Sighting(f"w{i}", 5 * i, i % 2) for i in range(5)]
        r = itinerary_report(theory, wit, TRAVEL)
        assert r["pairs"] == 20
        assert r["total"] == pytest.approx(slack_oracle(theory, wit, TRAVEL), abs=1e-12)

    def test_random_feasibility_iff_zero(self):
        rng = np.random.default_rng(3)
        table = [[0, 10, 25], [10, 0, 18], [25, 18, 0]]
        for _ in range(50):
            th = [Sighting("theory", float(rng.integers(0, 120)), int(rng.integers(0, 3))) for _ in range(3)]
            wi = [Sighting("w", float(rng.integers(0, 120)), int(rng.integers(0, 3))) for _ in range(4)]
            r = itinerary_report(th, wi, table)
            assert r["total"] == pytest.approx(slack_oracle(th, wi, table), abs=1e-12)
            assert (r["total"] == 0.0) == r["feasible"]
            shifted = itinerary_report([Sighting(s.who, s.time + 500, s.location) for s in th],
                                       [Sighting(s.who, s.time + 500, s.location) for s in wi], table)
            assert shifted["total"] == r["total"]

    def test_rank(self):
        wit = [Sighting("w", 0, 0)]
        rows = rank_theories({"a": [Sighting("theory:a", 5, 1)], "b": [Sighting("theory:b", 30, 1)]}, wit, TRAVEL)
        assert [r["theory"] for r in rows] == ["b", "a"] and rows[1]["total"] == 10.0

    def test_bad_location(self):
        with pytest.raises(DomainError):
            itinerary_report([Sighting("theory", 0, 5)], [Sighting("w", 0, 0)], TRAVEL)


class TestWitnesses:
    def test_consistent(self):
        wit = [Sighting("a", 0, 0), Sighting("b", 20, 1), Sighting("c", 40, 0)]
        assert all(r["score"] == 0.0 for r in witness_cross_incongruity(wit, TRAVEL))

    def test_teleporter(self):
        travel = MetricDef.travel_time([[0, 60], [60, 0]])
        wit = [Sighting("W1", 0, 0), Sighting("W2", 0, 0), Sighting("W3", 5, 1)]
        rows = witness_cross_incongruity(wit, travel)
        assert rows[0] == {"witness": "W3", "score": 55.0, "pairs": 2}
        assert [r["score"] for r in rows[1:]] == [27.5, 27.5]

    def test_symmetric(self):
        rows = witness_cross_incongruity([Sighting("a", 0, 0), Sighting("b", 5, 1)], TRAVEL)
        assert rows[0]["score"] == rows[1]["score"] == 10.0

    def test_single(self):
        with pytest.raises(DomainError):
            witness_cross_incongruity([Sighting("a", 0, 0)], TRAVEL)
