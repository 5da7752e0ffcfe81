"""工作地分配 - 就业容量 + 距离衰减"""
import logging
from typing import Dict, List

import numpy as np

from ..models.agent import HouseholdAgent
from ..models.city import City
from ..utils.apportion import largest_remainder
from ..utils.errors import InputValidationError

logger = logging.getLogger(__name__)


def employment_capacity(employment, n_employees: int) -> np.ndarray:
    """EC_i = N_ei / Σ N_ei * N_a, 最大余数法取整"""
    employment = np.asarray(employment, dtype=float)
    if employment.sum() <= 0:
        raise InputValidationError("所有小区就业数为0, 无法分配工作地")
    return largest_remainder(employment, n_employees)


def allocate_workplaces(agents: List[HouseholdAgent], city: City, rng: np.random.Generator,
                        decay_km: float = 5.0) -> Dict[int, List[int]]:
    """
    在容量内为每个就业成员抽取工作小区, 概率 ∝ 剩余容量 * exp(-d/λ)。
    按agent编号顺序处理, 结果写回 agent.workplaces。
    """
    n_employees = sum(a.employees for a in agents)
    capacity = employment_capacity(city.column("employment"), n_employees)
    remaining = capacity.astype(float)
    zone_ids = np.array([z.id for z in city.zones])
    dist = city.distances.zone_to_zone

    assignments: Dict[int, List[int]] = {}
    for agent in sorted(agents, key=lambda a: a.id):
        row = city.index[agent.former_zone]
        if np.isinf(decay_km):
            kernel = np.ones(city.n_zones)
        else:
            kernel = np.exp(-dist[row] / decay_km)
        chosen = []
        for _ in range(agent.employees):
            weights = remaining * kernel
            total = weights.sum()
            if total <= 0:
                # 核函数下溢时退化为按容量抽取
                weights = remaining.copy()
                total = weights.sum()
            j = int(rng.choice(city.n_zones, p=weights / total))
            remaining[j] -= 1
            chosen.append(int(zone_ids[j]))
        agent.workplaces = chosen
        assignments[agent.id] = chosen

    logger.info(f"工作地分配完成: {n_employees} 个就业成员, {int((capacity > 0).sum())} 个就业小区")
    return assignments
