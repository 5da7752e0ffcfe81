"""多次运行实验: 备选数量K的敏感性与多种子可重复性"""
import logging
import time
from itertools import combinations
from typing import Dict, List, Mapping, Sequence, Tuple

import pandas as pd

from ..choice.choice_processor import choose_alternatives
from ..config.settings import RunConfig
from ..models.agent import HouseholdAgent, ZoneStats
from ..models.analytics import ObservedResidence
from ..models.choice import AlternativeSet
from ..models.city import City
from ..models.market import SimulationOutcome
from ..market.simulation import run_simulation
from ..synthesis.pipeline import synthesize_population
from ..utils.errors import ConfigError
from .bands import percent
from .validation import validation_report

logger = logging.getLogger(__name__)

REPEATABILITY_SHARES = ("housed_first_alternative", "unhoused", "carried_forward")


def truncate_alternatives(alternatives: Mapping[int, AlternativeSet], k: int) -> Dict[int, AlternativeSet]:
    """取前k个备选; 与以 K=k 重新搜索的结果一致 (最终种群与K无关)"""
    return {
        agent_id: AlternativeSet(agent_id, alt.zones[:k], alt.front_ranks[:k])
        for agent_id, alt in alternatives.items()
    }


def simulate(agents: List[HouseholdAgent], city: City, config: RunConfig,
             seed: int) -> Tuple[Dict[int, AlternativeSet], SimulationOutcome]:
    """备选搜索 + 市场仿真"""
    sets = choose_alternatives(agents, city, config.nsga2, seed, config.processing)
    alternatives = {alt.agent_id: alt for alt in sets}
    return alternatives, run_simulation(agents, city, config.market, alternatives, seed)


def k_sensitivity(agents: List[HouseholdAgent], city: City, observed: Sequence[ObservedResidence],
                  k_values: Sequence[int], config: RunConfig) -> pd.DataFrame:
    """对每个K统计小区一致率与实际居住地位于备选集合的比例"""
    if not k_values or min(k_values) < 1:
        raise ConfigError(f"K 取值必须为正整数: {list(k_values)}")
    start_time = time.time()
    k_max = max(k_values)
    params = config.nsga2.model_copy(update={"k": k_max})
    sets = choose_alternatives(agents, city, params, config.seed, config.processing)
    full = {alt.agent_id: alt for alt in sets}

    rows = []
    for k in sorted(set(k_values)):
        alternatives = truncate_alternatives(full, k)
        outcome = run_simulation(agents, city, config.market, alternatives, config.seed)
        report = validation_report(outcome, observed, alternatives, city)
        rows.append({
            "k": k,
            "identical_zone": report["identical_zone"],
            "in_alternatives": report["in_alternatives"],
            "identical_or_adjacent": report["identical_or_adjacent"],
            "unhoused_pct": percent(len(outcome.unhoused), len(agents)),
        })
        logger.info(f"K={k}: 小区一致 {report['identical_zone']:.1f}%, 位于备选 {report['in_alternatives']:.1f}%")
    logger.info(f"K敏感性分析完成, 耗时: {time.time() - start_time:.2f}秒")
    return pd.DataFrame(rows)


def aggregate_shares(outcome: SimulationOutcome, n_agents: int) -> Dict[str, float]:
    """可重复性比较用的聚合类别占比"""
    housed_first = sum(1 for o in outcome.housed if o.alternative_rank == 1)
    carried = sum(1 for o in outcome.outcomes.values() if o.carried)
    return {
        "housed_first_alternative": percent(housed_first, n_agents),
        "unhoused": percent(len(outcome.unhoused), n_agents),
        "carried_forward": percent(carried, n_agents),
    }


def repeatability(zone_stats: ZoneStats, city: City, config: RunConfig, seeds: Sequence[int]) -> pd.DataFrame:
    """
    每个种子完整运行一次 (人口合成 -> 备选 -> 市场), 比较聚合占比;
    最后一行为各占比两两之差的最大值 (百分点)。
    """
    if len(seeds) < 2:
        raise ConfigError("可重复性实验至少需要两个种子")
    rows = []
    for seed in seeds:
        agents = synthesize_population(zone_stats, city, config.synthesis, seed)
        _, outcome = simulate(agents, city, config, seed)
        rows.append({"seed": str(seed), **aggregate_shares(outcome, len(agents))})
        logger.info(f"种子 {seed} 完成")

    spread = {"seed": "max_diff_pp"}
    for name in REPEATABILITY_SHARES:
        spread[name] = max(abs(a[name] - b[name]) for a, b in combinations(rows, 2))
    rows.append(spread)
    return pd.DataFrame(rows, columns=["seed", *REPEATABILITY_SHARES])
