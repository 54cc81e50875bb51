import numpy as np
import pytest

from builders import at, first_feasible, make_proc, schedule
from iotscheduler.core.CampaignConfig import CostModel
from iotscheduler.core.Exceptions import ConfigurationError, EmptyScheduleError
from iotscheduler.core.ScheduleModel import Duration, ProcedureSchedule, Slot, SlotSchedule
from iotscheduler.objectives.FitnessFunctions import (
    NO_FEASIBLE_MAX,
    FitnessVector,
    apply_penalty,
    cost_of,
    evaluate,
    evaluate_indices,
    feasible_maxima,
    fit_cost,
    fit_frag,
    fit_use,
    scalar_fitness,
)
from iotscheduler.slotting.SlotScheduler import generate_slot, slot_schedule

BOUNDED = CostModel(cost_min=456.0, cost_max=3561.0)


def _slots(*pairs):
    return SlotSchedule(slots=tuple(Slot(t_start=at(a), t_end=at(b)) for a, b in pairs))


# --- utilization ---

def test_fit_use_example():
    s = schedule(
        make_proc("a", "s1", at("00:00"), at("03:00")),
        make_proc("b", "s2", at("05:00"), at("09:00")),
        make_proc("c", "s3", at("13:00"), at("15:00")),
    )
    assert fit_use(s, Duration.from_minutes(60)) == pytest.approx(11 / 15)


def test_fit_use_single_and_back_to_back():
    a = make_proc("a", "s1", at("10:00"), at("11:00"))
    b = make_proc("b", "s2", at("11:15"), at("12:00"))
    assert fit_use(schedule(a), Duration(0)) == 1.0
    assert fit_use(schedule(a, b), Duration.from_minutes(15)) == pytest.approx(1.0)
    assert fit_use(schedule(b, a), Duration.from_minutes(15)) == pytest.approx(1.0)


def test_fit_use_empty():
    with pytest.raises(EmptyScheduleError):
        fit_use(ProcedureSchedule(), Duration(0))


# --- fragmentation ---

def test_fit_frag_values():
    four = schedule(*[make_proc(f"p{k}", f"s{k}", at(f"{10 + k}:00"), at(f"{10 + k}:30")) for k in range(4)])
    assert fit_frag(four, _slots(("10:00", "11:00"), ("12:00", "14:00"))) == pytest.approx(2 / 3)
    assert fit_frag(four, _slots(("10:00", "14:00"))) == 1.0
    one = schedule(make_proc("x", "s1", at("10:00"), at("11:00")))
    assert fit_frag(one, _slots(("10:00", "11:00"))) == 1.0


# --- cost ---

@pytest.mark.parametrize("pairs, expected", [
    ((("10:00", "12:00"),), 912.0),
    ((("10:00", "11:00"), ("14:00", "15:00")), 912.0),
    ((("00:00", "23:00"),), 23 * 456.0),
])
def test_cost_of(pairs, expected):
    assert cost_of(_slots(*pairs), CostModel()) == pytest.approx(expected)


def test_day_long_slot_costs_the_cap():
    q = SlotSchedule(slots=(Slot(t_start=at("00:00"), t_end=at("00:00", day=1)),))
    assert cost_of(q, CostModel()) == 3561.0


def test_fit_cost_normalizes_and_clamps():
    assert fit_cost(_slots(("10:00", "12:00")), BOUNDED) == pytest.approx(456 / 3105)
    assert fit_cost(_slots(("10:00", "10:30")), BOUNDED) == 0.0
    with pytest.raises(ConfigurationError):
        fit_cost(_slots(("10:00", "12:00")), CostModel())


def test_cost_bounds_must_be_ordered():
    with pytest.raises(ValueError):
        CostModel(cost_min=10.0, cost_max=10.0)


def test_derived_bounds(small_scenario):
    m = small_scenario.cost_model
    assert m.has_bounds
    assert 0 < m.cost_min < m.cost_max


# --- evaluation and penalty ---

def test_evaluate_indices_matches_slot_pipeline(small_scenario):
    idx = first_feasible(small_scenario)
    v = small_scenario.evaluate(idx)
    assert v.feasible
    s = ProcedureSchedule(procedures=tuple(small_scenario.candidates.candidates[i] for i in idx))
    q = slot_schedule(s, small_scenario.policy)
    assert v.n_slots == len(q)
    assert v.cost_value == pytest.approx(cost_of(q, small_scenario.cost_model))
    assert v.frag == pytest.approx(fit_frag(s, q))
    assert v.use == pytest.approx(fit_use(s, Duration(small_scenario.delta_c)))
    for x in (v.use, v.frag, v.cost):
        assert 0.0 <= x <= 1.0


def _random_independent(scenario, rng):
    """At most one candidate per requirement, no two in conflict, at least one chosen."""
    matrix = scenario.graph.matrix
    options = scenario.candidates.options
    wanted = rng.integers(1, len(options) + 1)
    chosen = []
    for k in rng.permutation(len(options))[:wanted]:
        free = [i for i in options[k] if not any(matrix[i, j] for j in chosen)]
        if free:
            chosen.append(int(rng.choice(free)))
    return np.array(chosen or [options[0][0]], dtype=np.int64)


@pytest.mark.parametrize("name", ["small_scenario", "exp_scenario"])
def test_evaluate_indices_agrees_with_slot_functions(name, request):
    scenario = request.getfixturevalue(name)
    cands, policy, m = scenario.candidates, scenario.policy, scenario.cost_model
    rng = np.random.default_rng(20240304)
    for _ in range(120):
        idx = _random_independent(scenario, rng)
        v = scenario.evaluate(idx)
        assert v.feasible

        s = ProcedureSchedule(procedures=tuple(cands.candidates[i] for i in idx))
        q = slot_schedule(s, policy)
        assert v.n_slots == len(q)
        assert v.use == pytest.approx(fit_use(s, Duration(scenario.delta_c)))
        assert v.frag == pytest.approx(fit_frag(s, q))
        assert v.cost == pytest.approx(fit_cost(q, m))
        assert v.cost_value == pytest.approx(cost_of(q, m))

        # each procedure's own slot lies inside one final slot
        for p in s.procedures:
            own = generate_slot(p, policy)
            assert any(x.contains(own.t_start, own.t_end) for x in q)
        assert len(q) <= len(s)


def test_evaluate_with_procedure_schedule(small_scenario):
    idx = first_feasible(small_scenario)
    s = ProcedureSchedule(procedures=tuple(small_scenario.candidates.candidates[i] for i in idx))
    v = evaluate(s, small_scenario.candidates, small_scenario.graph, small_scenario.policy,
                 small_scenario.cost_model)
    assert v.minimized == pytest.approx((1 - v.use, 1 - v.frag, v.cost))


def test_infeasible_schedule_skips_objectives(small_scenario):
    options = small_scenario.candidates.options
    idx = np.array([options[0][0], options[0][1]], dtype=np.int64)
    v = small_scenario.evaluate(idx)
    assert v.violations == 1
    assert v.use is None and v.cost is None


def test_empty_index_schedule():
    with pytest.raises(EmptyScheduleError):
        evaluate_indices(np.array([], dtype=np.int64), None, None, None, None, 0)


def test_penalty_puts_infeasible_behind_feasible():
    vectors = [
        FitnessVector(violations=0, use=0.8, frag=0.5, cost=0.3),
        FitnessVector(violations=0, use=0.6, frag=1.0, cost=0.1),
        FitnessVector(violations=2),
    ]
    assert feasible_maxima(vectors) == pytest.approx((0.4, 0.5, 0.3))
    ranked = apply_penalty(vectors)
    assert ranked[0].minimized == pytest.approx((0.2, 0.5, 0.3))
    assert ranked[2].minimized == pytest.approx((2.4, 2.5, 2.3))
    for feasible in ranked[:2]:
        assert all(f < p for f, p in zip(feasible.minimized, ranked[2].minimized))


def test_penalty_without_feasible_vectors():
    ranked = apply_penalty([FitnessVector(violations=1), FitnessVector(violations=3)])
    assert feasible_maxima([FitnessVector(violations=1)]) == NO_FEASIBLE_MAX
    assert ranked[0].minimized == (2.0, 2.0, 2.0)
    assert ranked[1].minimized == (4.0, 4.0, 4.0)


def test_scalar_fitness():
    assert scalar_fitness(FitnessVector(violations=0, use=0.8, frag=0.5, cost=0.3)) == pytest.approx(2 / 3)
    assert scalar_fitness(FitnessVector(violations=2)) == -2.0
