"""备选方案搜索: 目标构建、约束支配、非支配排序、NSGA-II与穷举oracle"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.choice.choice_processor import ChoiceBatchProcessor, choose_alternatives
from app.choice.dominance import (
    constrained_dominates,
    crowding_distance,
    domination_matrix,
    fast_non_dominated_sort,
    non_dominated_fronts,
)
from app.choice.nsga2 import NSGA2Engine, genome_bits, nsga2_select_alternatives
from app.choice.objectives import ObjectiveTable, build_objective_spec, evaluate, rent_band_violation
from app.choice.oracle import exhaustive_pareto_oracle, minimal_covering_fronts, oracle_top_k
from app.city.builder import build_city
from app.config.settings import NSGA2Settings, ProcessingSettings, SynthesisSettings
from app.models.agent import Criterion
from app.models.choice import Constraint, Individual, Objective
from app.synthesis.pipeline import synthesize_population
from app.utils.errors import ConfigError, InputValidationError, OracleGuardError

objective_values = st.floats(min_value=-100, max_value=100, allow_nan=False)
violation_values = st.one_of(st.just(0.0), st.floats(min_value=0.01, max_value=5.0))


def ind(objectives, violation=0.0):
    return Individual(genome=(), zone=0, objectives=tuple(objectives), violation=violation)


individuals = st.builds(
    lambda objs, v: ind(objs, v),
    st.lists(objective_values, min_size=2, max_size=2),
    violation_values,
)


# ---- 目标与约束 ----
def test_minimal_profile_spec(make_agent, make_profile):
    spec = build_objective_spec(make_agent(profile=make_profile()))
    assert spec.objectives == (Objective.RENT,)
    assert spec.constraints == (Constraint.RENT_BAND,)


def test_very_important_criteria_add_constraints(make_agent, make_profile):
    profile = make_profile(very=[Criterion.POLLUTION, Criterion.TRAFFIC])
    spec = build_objective_spec(make_agent(profile=profile))
    assert Constraint.POLLUTION_CLASS in spec.constraints
    assert Constraint.NO_TRAFFIC_RESTRICTION in spec.constraints
    assert {Objective.AIR, Objective.NOISE, Objective.TRAFFIC} <= set(spec.objectives)
    assert spec.pollution_limit == 3


def test_rent_objective_and_band_violation(make_zone, make_agent):
    city = build_city([make_zone(1, 0, 0, rent=100.0)], [], None)
    agent = make_agent(required_area=80.0, income=20000.0, rent_band=(0.0, 0.35))
    values, violation = evaluate(1, build_objective_spec(agent), agent, city)
    assert values == (8000.0,)
    assert violation == pytest.approx(1000.0 / 7000.0)
    assert violation == pytest.approx(0.142857, abs=1e-6)


def test_rent_band_violation_below_minimum():
    assert rent_band_violation([50.0, 150.0, 300.0], 100.0, 200.0).tolist() == pytest.approx([0.5, 0.0, 0.5])


def test_work_distance_is_summed(make_zone, make_agent, make_profile):
    city = build_city([make_zone(1, 0, 0), make_zone(2, 3, 0), make_zone(3, 0, 4)], [], None)
    agent = make_agent(workplaces=[2, 3], profile=make_profile(flagged=[Criterion.WORK_DISTANCE]))
    values, _ = evaluate(1, build_objective_spec(agent), agent, city)
    assert values[1] == pytest.approx(7.0)


def test_evaluate_rejects_non_residential_zone(make_zone, make_agent):
    city = build_city([make_zone(1, 0, 0), make_zone(2, 1, 0, residential_area=0.0)], [], None)
    agent = make_agent()
    with pytest.raises(InputValidationError):
        evaluate(2, build_objective_spec(agent), agent, city)


# ---- 约束支配 ----
def test_domination_examples():
    assert constrained_dominates(ind((1, 2)), ind((2, 2)))
    assert not constrained_dominates(ind((2, 2)), ind((1, 2)))
    assert not constrained_dominates(ind((1, 2)), ind((1, 2)))
    assert constrained_dominates(ind((9, 9)), ind((0, 0), 0.2))
    assert constrained_dominates(ind((9, 9), 0.1), ind((0, 0), 0.2))


def test_domination_arity_mismatch():
    with pytest.raises(InputValidationError):
        constrained_dominates(ind((1, 2)), ind((1, 2, 3)))


@given(individuals)
def test_domination_irreflexive(a):
    assert not constrained_dominates(a, a)


@given(individuals, individuals)
def test_domination_asymmetric(a, b):
    assert not (constrained_dominates(a, b) and constrained_dominates(b, a))


@given(st.lists(st.lists(objective_values, min_size=2, max_size=2), min_size=3, max_size=3))
def test_domination_transitive_among_feasible(points):
    a, b, c = (ind(p) for p in points)
    if constrained_dominates(a, b) and constrained_dominates(b, c):
        assert constrained_dominates(a, c)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(objective_values, objective_values, violation_values), min_size=1, max_size=15))
def test_domination_matrix_matches_pairwise(rows):
    population = [ind(r[:2], r[2]) for r in rows]
    matrix = domination_matrix(np.array([r[:2] for r in rows]), np.array([r[2] for r in rows]))
    for i, a in enumerate(population):
        for j, b in enumerate(population):
            assert bool(matrix[i, j]) == constrained_dominates(a, b)


# ---- 非支配排序 ----
def test_sort_examples():
    zeros = np.zeros(4)
    assert non_dominated_fronts(np.array([[1, 1], [2, 2], [1, 3], [3, 1]]), zeros) == [[0], [1, 2, 3]]
    assert non_dominated_fronts(np.ones((3, 2)), np.zeros(3)) == [[0, 1, 2]]
    assert non_dominated_fronts(np.array([[3.0], [1.0], [2.0]]), np.zeros(3)) == [[1], [2], [0]]
    assert fast_non_dominated_sort([]) == []


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(objective_values, objective_values, violation_values), min_size=1, max_size=20))
def test_sort_agrees_with_pairwise_oracle(rows):
    population = [ind(r[:2], r[2]) for r in rows]
    fronts = fast_non_dominated_sort(population)
    assert sorted(id(x) for f in fronts for x in f) == sorted(id(x) for x in population)
    for f, front in enumerate(fronts):
        later = [x for g in fronts[f:] for x in g]
        for member in front:
            assert member.rank == f + 1
            assert not any(constrained_dominates(other, member) for other in later)
            if f > 0:
                assert any(constrained_dominates(other, member) for other in fronts[f - 1])


# ---- 拥挤距离 ----
def test_crowding_examples():
    assert crowding_distance(np.array([[1, 3], [2, 2], [3, 1]])).tolist() == [np.inf, 2.0, np.inf]
    assert np.all(np.isinf(crowding_distance(np.array([[1, 2], [2, 1]]))))
    assert np.all(np.isinf(crowding_distance(np.array([[5, 5]]))))


def test_crowding_zero_range_objective_contributes_nothing():
    values = crowding_distance(np.array([[1, 7], [2, 7], [4, 7]]))
    assert values[1] == pytest.approx(1.0)


def test_zero_range_objective_still_marks_boundaries():
    # 第二个目标全相同: 按稳定排序首尾 (下标0和3) 为边界
    values = crowding_distance(np.array([[1, 7], [3, 7], [4, 7], [2, 7]]))
    assert values[0] == np.inf and values[2] == np.inf
    assert values[3] == np.inf
    assert values[1] == pytest.approx((4 - 2) / 3)
    assert crowding_distance(np.array([[5, 5], [5, 5], [5, 5]])).tolist() == [np.inf, 0.0, np.inf]


# ---- NSGA-II ----
@pytest.mark.parametrize("n,bits", [(1, 1), (2, 1), (3, 2), (12, 4), (100, 7)])
def test_genome_bits(n, bits):
    assert genome_bits(n) == bits


def _rent_city(make_zone, n=12):
    # 编号越大租金越低: 5, 7, 9, ... 倒序
    return build_city([make_zone(i, x=i, rent=5.0 + 2 * (n - i)) for i in range(1, n + 1)], [], None)


def test_decode_repairs_out_of_range_index(make_zone, make_agent):
    city = _rent_city(make_zone)
    engine = NSGA2Engine(ObjectiveTable.build(make_agent(), city), NSGA2Settings(), np.random.default_rng(0))
    assert engine.bits == 4
    assert engine.decode(np.array([[1, 1, 1, 1], [0, 0, 1, 1]], dtype=np.uint8)).tolist() == [3, 3]


def test_tournament_draws_two_distinct_contenders(make_zone, make_agent):
    engine = NSGA2Engine(ObjectiveTable.build(make_agent(), _rent_city(make_zone)), NSGA2Settings(),
                         np.random.default_rng(0))
    # 同一个体不会与自己比赛, 所以前沿更低的下标0每次都胜出
    ranks, crowding = np.array([1, 2]), np.zeros(2)
    assert {engine._tournament(ranks, crowding) for _ in range(200)} == {0}
    assert engine._tournament(np.array([1]), np.zeros(1)) == 0


def test_invalid_engine_params(make_zone, make_agent):
    city = _rent_city(make_zone)
    with pytest.raises(ConfigError):
        NSGA2Engine(ObjectiveTable.build(make_agent(), city),
                    NSGA2Settings.model_construct(pop_size=0, generations=10), np.random.default_rng(0))


def test_single_objective_returns_cheapest_feasible(make_zone, make_agent):
    city = _rent_city(make_zone)
    agent = make_agent(required_area=1.0, income=100.0, rent_band=(0.0, 0.2))
    params = NSGA2Settings(k=3, dedupe_survivors=True)
    alternatives = nsga2_select_alternatives(agent, city, params, seed=3)

    assert alternatives.zones == [12, 11, 10]
    assert alternatives.zones == oracle_top_k(exhaustive_pareto_oracle(agent, city), 3)
    assert alternatives.front_ranks == [1, 2, 3]


def test_infeasible_agent_gets_empty_set(make_zone, make_agent):
    city = _rent_city(make_zone)
    agent = make_agent(required_area=100.0, income=1.0)
    alternatives = nsga2_select_alternatives(agent, city, NSGA2Settings(), seed=3)
    assert len(alternatives) == 0
    assert exhaustive_pareto_oracle(agent, city) == []


def test_alternatives_lie_within_minimal_covering_fronts(grid_100, make_agent, make_profile):
    params = NSGA2Settings(pop_size=60, generations=100, k=10, dedupe_survivors=True)
    profile = make_profile(flagged=[Criterion.FORMER_DISTANCE])
    inside = total = 0
    for agent_id, former in enumerate([1, 23, 45, 67, 100], start=1):
        agent = make_agent(agent_id, required_area=80.0, income=100.0, former_zone=former, profile=profile)
        alternatives = nsga2_select_alternatives(agent, grid_100, params, seed=2024)
        allowed = set(minimal_covering_fronts(exhaustive_pareto_oracle(agent, grid_100), params.k))
        assert len(alternatives) == params.k
        assert len(set(alternatives.zones)) == len(alternatives)
        inside += sum(1 for z in alternatives.zones if z in allowed)
        total += len(alternatives)
    assert inside / total >= 0.95


def test_default_search_matches_oracle_for_synthesized_agents(grid_100_scenario):
    city, stats = grid_100_scenario
    agents = synthesize_population(stats, city, SynthesisSettings(n_agents=50), seed=2024)
    params = NSGA2Settings()
    inside = total = 0
    for agent in agents:
        alternatives = nsga2_select_alternatives(agent, city, params, seed=2024)
        table = ObjectiveTable.build(agent, city)
        assert all(table.violations[table.row(z)] == 0 for z in alternatives.zones)
        allowed = set(minimal_covering_fronts(exhaustive_pareto_oracle(agent, city, guard=params.oracle_guard),
                                              params.k))
        inside += sum(1 for z in alternatives.zones if z in allowed)
        total += len(alternatives)
    assert total > 0
    assert inside / total >= 0.95


def test_survivor_dedupe_finds_exact_top_k_for_rent_only_agent(grid_100, make_agent, make_profile):
    agent = make_agent(required_area=10.0, income=100.0, profile=make_profile())
    top_k = oracle_top_k(exhaustive_pareto_oracle(agent, grid_100), 10)

    # 默认只在提取时去重: 单目标下种群可能收敛到少数小区的副本
    extraction_only = nsga2_select_alternatives(agent, grid_100, NSGA2Settings(), seed=2024)
    assert not NSGA2Settings().dedupe_survivors
    assert 0 < len(extraction_only) <= 10
    assert len(set(extraction_only.zones)) == len(extraction_only)
    assert extraction_only.zones[0] == top_k[0]

    params = NSGA2Settings(dedupe_survivors=True)
    alternatives = nsga2_select_alternatives(agent, grid_100, params, seed=2024)
    assert alternatives.zones == top_k
    assert alternatives.front_ranks == list(range(1, params.k + 1))


def test_alternatives_satisfy_hard_constraints(small_synthetic):
    city, stats = small_synthetic
    agents = synthesize_population(stats, city, SynthesisSettings(n_agents=40), seed=5)
    params = NSGA2Settings(pop_size=20, generations=15)
    for alternatives in choose_alternatives(agents, city, params, seed=5):
        agent = next(a for a in agents if a.id == alternatives.agent_id)
        table = ObjectiveTable.build(agent, city)
        assert len(alternatives) <= params.k
        assert all(table.violations[table.row(z)] == 0 for z in alternatives.zones)


@pytest.mark.slow
def test_alternatives_independent_of_workers_and_batches(small_synthetic):
    city, stats = small_synthetic
    agents = synthesize_population(stats, city, SynthesisSettings(n_agents=24), seed=8)
    params = NSGA2Settings(pop_size=16, generations=10)

    serial = choose_alternatives(agents, city, params, seed=8, processing=ProcessingSettings(workers=1, batch_size=64))
    processor = ChoiceBatchProcessor(params, ProcessingSettings(workers=2, batch_size=5))
    parallel = processor.run(list(reversed(agents)), city, seed=8)

    assert [(a.agent_id, a.zones, a.front_ranks) for a in serial] == \
        [(a.agent_id, a.zones, a.front_ranks) for a in parallel]
    assert processor.get_statistics()["total_batches"] == 5


def test_same_seed_same_alternatives(grid_100, make_agent, make_profile):
    agent = make_agent(required_area=80.0, former_zone=50, profile=make_profile(flagged=[Criterion.FORMER_DISTANCE]))
    params = NSGA2Settings(generations=20)
    first = nsga2_select_alternatives(agent, grid_100, params, seed=77)
    second = nsga2_select_alternatives(agent, grid_100, params, seed=77)
    assert first == second


# ---- 穷举oracle ----
def test_oracle_guard(grid_100, make_agent):
    with pytest.raises(OracleGuardError):
        exhaustive_pareto_oracle(make_agent(), grid_100, guard=50)


def test_oracle_single_feasible_zone(make_zone, make_agent):
    city = _rent_city(make_zone, n=4)
    # 租金 11, 9, 7, 5: 上限6只留下 zone 4
    agent = make_agent(required_area=1.0, income=100.0, rent_band=(0.0, 0.06))
    assert exhaustive_pareto_oracle(agent, city) == [[4]]


def test_oracle_matches_fast_sort(grid_100, make_agent, make_profile):
    agent = make_agent(required_area=80.0, former_zone=12,
                       profile=make_profile(flagged=[Criterion.FORMER_DISTANCE, Criterion.TRAFFIC]))
    table = ObjectiveTable.build(agent, grid_100)
    feasible = np.nonzero(table.feasible)[0]
    expected = [sorted(int(table.zone_ids[feasible[i]]) for i in front)
                for front in non_dominated_fronts(table.objectives[feasible], np.zeros(feasible.size))]
    assert exhaustive_pareto_oracle(agent, grid_100) == expected


def test_unconstrained_oracle_ignores_violations(make_zone, make_agent):
    city = _rent_city(make_zone, n=6)
    agent = make_agent(required_area=1.0, income=1.0)
    assert exhaustive_pareto_oracle(agent, city) == []
    table = ObjectiveTable.build(agent, city, constrained=False)
    expected = [sorted(int(table.zone_ids[i]) for i in f)
                for f in non_dominated_fronts(table.objectives, np.zeros(table.zone_ids.size))]
    assert exhaustive_pareto_oracle(agent, city, constrained=False) == expected


def test_minimal_covering_fronts():
    fronts = [[1, 2], [3], [4, 5, 6], [7]]
    assert minimal_covering_fronts(fronts, 3) == [1, 2, 3]
    assert minimal_covering_fronts(fronts, 4) == [1, 2, 3, 4, 5, 6]
    assert minimal_covering_fronts(fronts, 50) == [1, 2, 3, 4, 5, 6, 7]
