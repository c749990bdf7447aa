import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incongruity.aggregation import MEAN, TopKind, TotalAggregator
from incongruity.core import Formula, FormulaSet, MetricDef, Space, hyp, obs
from incongruity.errors import DomainError, SchemaError, UnsupportedTheoryError
from incongruity.learners.theories import erm_theory, kmeans_theory, ridge_theory
from incongruity.scenarios import itinerary_theory
from incongruity.theory import (RHO_Y, RHO_Y_SQUARED, TRAVEL_SLACK, AlwaysTrue, And, Aspect,
                                CoordEqual, DevKind, DeviationFn, ExplicitInstances,
                                IncongruityTheory, ModalityIs, Or, PairContext,
                                RegularizationTerm, XDistGt, XDistLeq, XEqual, XLess, YGreater,
                                aspect_deviations, build_full_model, colliding_pairs,
                                condition_from_dict, constant_hypothesis, hinge_above,
                                linear_hypothesis, log_rho_y, pointwise_condition,
                                total_incongruity)

rng = np.random.default_rng(11)


def data(m, n=1, seed=0):
    r = np.random.default_rng(seed)
    return r.normal(size=(m, n)), r.normal(size=m)


class TestConditions:
    def fs(self):
        return FormulaSet((Formula(obs(), (0.0, 1.0), 2.0), Formula(hyp(), (0.0, 3.0), 5.0),
                           Formula(obs(1), (4.0, 1.0), 1.0)), x_dim=2)

    def brute(self, cond, S):
        return np.array([[i != j and cond.holds(a, b, S.x_metric, S.y_metric)
                          for j, b in enumerate(S)] for i, a in enumerate(S)])

    @pytest.mark.parametrize("cond", [
        AlwaysTrue(), XEqual(), CoordEqual(1), CoordEqual(2), XDistLeq(2.0), XDistGt(2.0),
        YGreater(), ModalityIs(1, hyp()), ModalityIs(2, obs(1)),
        And((ModalityIs(1, hyp()), CoordEqual(1))), Or((XEqual(), YGreater())),
        pointwise_condition()], ids=lambda c: json.dumps(c.to_dict()))
    def test_mask_matches_pairwise(self, cond):
        S = self.fs()
        m = np.array(cond.mask(PairContext(S)), dtype=bool)
        np.fill_diagonal(m, False)
        assert (m == self.brute(cond, S)).all()
        assert (cond.mask(PairContext(S)) == cond.mask(PairContext(S))).all()

    def test_xless_scalar(self):
        S = FormulaSet.from_arrays([[1.0], [2.0]], [0.0, 0.0])
        assert XLess().holds(S[0], S[1], S.x_metric, S.y_metric)
        assert not XLess().holds(S[1], S[0], S.x_metric, S.y_metric)

    def test_coord_index_validated(self):
        with pytest.raises((SchemaError, DomainError)):
            CoordEqual(3).mask(PairContext(self.fs()))
        with pytest.raises((SchemaError, DomainError)):
            CoordEqual(0)

    def test_dict_round_trip(self):
        c = And((ModalityIs(1, hyp(2)), Or((XDistLeq(1.5), XLess()))))
        assert condition_from_dict(c.to_dict()) == c


class TestDeviation:
    def test_examples(self):
        assert hinge_above(1.0)(0.6) == 0.0
        assert TRAVEL_SLACK(15.0, 10.0) == 5.0
        assert RHO_Y_SQUARED(3.0) == 9.0
        assert log_rho_y()(0.0) == np.log(1e-12)

    def test_invalid(self):
        with pytest.raises(DomainError):
            hinge_above(-1)
        with pytest.raises(DomainError):
            log_rho_y(0)

    @pytest.mark.parametrize("dev", [RHO_Y, RHO_Y_SQUARED, hinge_above(1.0), log_rho_y(), TRAVEL_SLACK],
                             ids=lambda d: d.kind.value)
    def test_monotone(self, dev):
        a, b = np.sort(rng.uniform(0, 100, (2, 500)), axis=0)
        r2 = rng.uniform(0, 100, 500)
        assert (dev(a, r2) <= dev(b, r2)).all()
        assert (dev(r2, a) >= dev(r2, b)).all()

    def test_nonnegative_except_log(self):
        r = rng.uniform(0, 10, 200)
        for dev in (RHO_Y, RHO_Y_SQUARED, hinge_above(2), TRAVEL_SLACK):
            assert (dev(r, r[::-1]) >= 0).all()
        assert log_rho_y()(0.5) < 0


class TestFullModel:
    def test_pointwise_m3(self):
        X, y = data(3)
        S = FormulaSet.from_arrays(X, y)
        M = build_full_model(constant_hypothesis(0.0), S, erm_theory())
        assert M.n_hypothetical == 3 and len(M.formulas) == 6
        assert len(colliding_pairs(M, erm_theory().aspects[0])) == 3
        hx = sorted(f.x for f in M.formulas.hypothetical())
        assert hx == sorted(f.x for f in S)

    def test_duplicate_points_share_one_instance(self):
        S = FormulaSet.from_arrays([[1.0], [1.0], [2.0]], [0.0, 1.0, 0.0])
        M = build_full_model(constant_hypothesis(0.0), S, erm_theory())
        assert M.n_hypothetical == 2 and M.n_observations == 3

    def test_empty(self):
        S = FormulaSet((), x_dim=1)
        M = build_full_model(constant_hypothesis(1.0), S, erm_theory())
        assert len(M.formulas) == 0

    def test_itinerary_pairs(self):
        travel = MetricDef.travel_time([[0, 15], [15, 0]])
        T = itinerary_theory(travel)
        S = FormulaSet(tuple(Formula(obs(), (float(t),), float(t % 2)) for t in range(5)),
                       T.x_metric, T.y_metric, 1)
        h = ExplicitInstances(tuple(Formula(hyp(), (10.0 * k,), 0.0) for k in range(4)))
        M = build_full_model(h, S, T)
        assert len(M.formulas) == 9
        assert len(colliding_pairs(M, T.aspects[0])) == 20

    def test_always_true_both_orders(self):
        S = FormulaSet.from_arrays([[0.0], [1.0]], [0.0, 0.0])
        M = build_full_model(ExplicitInstances(), S, IncongruityTheory((Aspect(AlwaysTrue()),)))
        assert [(a.x, b.x) for a, b in colliding_pairs(M, Aspect(AlwaysTrue()))] == [((0.0,), (1.0,)), ((1.0,), (0.0,))]

    def test_kmeans_counts_each_pair_twice(self):
        T = kmeans_theory()
        h = ExplicitInstances(tuple(Formula(hyp(), (0.0,), v) for v in (1.0, 2.0, 4.0)))
        M = build_full_model(h, FormulaSet((), x_dim=1), T)
        assert len(colliding_pairs(M, T.aspects[0])) == 6

    def test_unsupported(self):
        T = IncongruityTheory((Aspect(And((ModalityIs(1, hyp()), XDistLeq(1.0)))),))
        X, y = data(4)
        with pytest.raises(UnsupportedTheoryError):
            build_full_model(constant_hypothesis(0), FormulaSet.from_arrays(X, y), T)

    def test_idempotent(self):
        X, y = data(6, 2)
        S = FormulaSet.from_arrays(X, y)
        h = linear_hypothesis([1.0, -1.0], 0.3)
        a = build_full_model(h, S, erm_theory())
        b = build_full_model(h, S, erm_theory())
        assert a.formulas.formulas == b.formulas.formulas

    def test_minimality(self):
        S = FormulaSet.from_arrays([[0.0]], [0.0])
        far = Formula(hyp(), (9.0,), 0.0)
        near = Formula(hyp(), (0.0,), 1.0)
        M = build_full_model(ExplicitInstances((far, near)), S, erm_theory())
        assert M.formulas.hypothetical().formulas == (near,)

    def test_exact_fit_zero_deviations(self):
        X, _ = data(5, 2)
        h = linear_hypothesis([2.0, 1.0], -1.0)
        S = FormulaSet.from_arrays(X, [h(x) for x in X])
        T = erm_theory()
        devs = aspect_deviations(build_full_model(h, S, T), T.aspects[0])
        assert len(devs) == 5 and (devs == 0).all()


class TestTotal:
    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 30), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_erm_identity(self, m, n, seed):
        X, y = data(m, n, seed)
        w = np.random.default_rng(seed + 1).normal(size=n)
        h = linear_hypothesis(w, 0.25)
        direct = np.mean([abs(h(x) - v) for x, v in zip(X, y)])
        # duplicates collapse only if rows coincide, which random normals never do
        got = total_incongruity(h, FormulaSet.from_arrays(X, y), erm_theory()).total
        assert got == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_exact_fit_zero(self):
        S = FormulaSet.from_arrays([[1.0], [2.0]], [3.0, 3.0])
        assert total_incongruity(constant_hypothesis(3.0), S, erm_theory()).total == 0.0

    def test_ridge_example(self):
        S = FormulaSet.from_arrays([[0.0], [0.0]], [0.0, 2.0])
        # f(0) = 1 for w=[2], b=1: squared residuals 1, 1 -> mean 1.0
        r = total_incongruity(linear_hypothesis([2.0], 1.0), S, ridge_theory(0.5))
        assert r.aspects[0].value == 1.0
        assert r.regularization == 2.0
        assert r.total == 3.0

    def test_reg_needs_linear_form(self):
        S = FormulaSet.from_arrays([[0.0]], [0.0])
        with pytest.raises((SchemaError, DomainError)):
            total_incongruity(constant_hypothesis(0.0), S, ridge_theory(0.5))

    def test_empty_aspect_identity(self):
        far = Aspect(And((ModalityIs(1, hyp()), XEqual(), XDistGt(5.0))))
        T = IncongruityTheory((Aspect(pointwise_condition()), far), top=TotalAggregator(TopKind.SUM))
        S = FormulaSet.from_arrays([[0.0], [1.0]], [1.0, 3.0])
        r = total_incongruity(constant_hypothesis(0.0), S, T)
        assert r.aspects[1].no_collisions and r.aspects[1].value is None
        assert r.total == 2.0

    def test_monotone_response(self):
        X, y = data(10, 1, 3)
        S0 = FormulaSet.from_arrays(X, y)
        h = constant_hypothesis(0.0)
        base = total_incongruity(h, S0, erm_theory()).total
        for i in range(10):
            y2 = y.copy()
            y2[i] += np.sign(y2[i]) * 0.5
            assert total_incongruity(h, FormulaSet.from_arrays(X, y2), erm_theory()).total >= base

    def test_deterministic(self):
        X, y = data(40, 3, 9)
        S = FormulaSet.from_arrays(X, y)
        h = linear_hypothesis([0.1, 0.2, 0.3], 0.0)
        vals = {total_incongruity(h, S, ridge_theory(0.1)).total for _ in range(5)}
        assert len(vals) == 1

    def test_fast_mode_close(self):
        X, y = data(40, 3, 9)
        S = FormulaSet.from_arrays(X, y)
        h = linear_hypothesis([0.1, 0.2, 0.3], 0.0)
        a = total_incongruity(h, S, ridge_theory(0.1), mode="exact").total
        b = total_incongruity(h, S, ridge_theory(0.1), mode="fast").total
        assert b == pytest.approx(a, rel=1e-9)


class TestSerialization:
    def theory(self):
        return IncongruityTheory(
            (Aspect(pointwise_condition(), hinge_above(0.5), MEAN),
             Aspect(And((ModalityIs(1, hyp()), XEqual(), CoordEqual(1))), log_rho_y(1e-6))),
            name="mixed", top=TotalAggregator.of("weighted_sum", [1.0, 2.0]),
            regularization=RegularizationTerm.squared_weight_norm(0.25),
            y_metric=MetricDef.epsilon_insensitive(0.1))

    def test_round_trip(self):
        T = self.theory()
        assert IncongruityTheory.from_json(T.to_json()) == T
        text = T.to_json()
        assert IncongruityTheory.from_json(text).to_json() == text

    def test_bad_json(self):
        with pytest.raises(SchemaError, match="line"):
            IncongruityTheory.from_json("{ not json")

    @pytest.mark.parametrize("mutate", [
        lambda d: d.pop("aspects"),
        lambda d: d.__setitem__("aspects", []),
        lambda d: d["aspects"][0]["deviation"].__setitem__("id", "cube"),
        lambda d: d["aspects"][0]["condition"].__setitem__("atom", "telepathy"),
    ])
    def test_schema_errors(self, mutate):
        d = self.theory().to_dict()
        mutate(d)
        with pytest.raises(SchemaError):
            IncongruityTheory.from_dict(d)

    def test_deviation_from_dict(self):
        assert DeviationFn.from_dict({"id": "travel_slack"}).kind is DevKind.TRAVEL_SLACK
