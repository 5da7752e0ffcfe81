"""穷举Pareto oracle - 离散决策空间上的参考解"""
import logging
from typing import List

from ..models.agent import HouseholdAgent
from ..models.choice import Individual
from ..models.city import City
from ..utils.errors import OracleGuardError
from .dominance import constrained_dominates
from .objectives import ObjectiveTable

logger = logging.getLogger(__name__)


def exhaustive_pareto_oracle(agent: HouseholdAgent, city: City, guard: int = 5000,
                             constrained: bool = True) -> List[List[int]]:
    """
    对所有可行住宅小区两两比较, 逐层剥离非支配集合。
    constrained=False 时忽略全部硬约束 (违反量恒为0)。
    """
    table = ObjectiveTable.build(agent, city, constrained=constrained)
    n = int(table.zone_ids.size)
    if n > guard:
        raise OracleGuardError(f"住宅小区数 {n} 超过oracle上限 {guard}")

    individuals = [
        Individual(genome=(), zone=int(table.zone_ids[i]),
                   objectives=tuple(float(v) for v in table.objectives[i]),
                   violation=float(table.violations[i]))
        for i in range(n)
        if table.violations[i] == 0
    ]

    fronts: List[List[int]] = []
    remaining = individuals
    while remaining:
        front = [
            a for a in remaining
            if not any(constrained_dominates(b, a) for b in remaining if b is not a)
        ]
        fronts.append(sorted(ind.zone for ind in front))
        front_ids = {id(ind) for ind in front}
        remaining = [ind for ind in remaining if id(ind) not in front_ids]
    return fronts


def minimal_covering_fronts(fronts: List[List[int]], k: int) -> List[int]:
    """最少的前若干层, 使其小区数 ≥ K (不足K时为全部)"""
    covered: List[int] = []
    for front in fronts:
        if len(covered) >= k:
            break
        covered.extend(front)
    return covered


def oracle_top_k(fronts: List[List[int]], k: int) -> List[int]:
    """单目标情形下按层顺序取前K个小区"""
    return [zone for front in fronts for zone in front][:k]
