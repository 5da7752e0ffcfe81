"""约束NSGA-II 备选小区搜索"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from ..config.settings import NSGA2Settings
from ..models.agent import HouseholdAgent
from ..models.choice import AlternativeSet
from ..models.city import City
from ..utils.errors import ConfigError
from ..utils.rng import RNGManager
from .dominance import crowding_distance, domination_matrix, fronts_from_matrix
from .objectives import ObjectiveTable

logger = logging.getLogger(__name__)


def genome_bits(n_zones: int) -> int:
    """编码小区下标所需的二进制位数"""
    return max(1, math.ceil(math.log2(max(n_zones, 1))))


class NSGA2Engine:
    """单个agent的NSGA-II搜索, 决策变量为住宅小区下标的二进制编码"""

    def __init__(self, table: ObjectiveTable, params: NSGA2Settings, rng: np.random.Generator):
        if params.pop_size < 1 or params.generations < 1:
            raise ConfigError(f"pop_size 和 generations 必须为正: {params.pop_size}, {params.generations}")
        self.table = table
        self.params = params
        self.rng = rng
        self.n_zones = len(table.zone_ids)
        self.bits = genome_bits(self.n_zones)
        self.mutation_rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / self.bits
        self._powers = 2 ** np.arange(self.bits - 1, -1, -1)

    # ---- 编码 ----
    def decode(self, genomes: np.ndarray) -> np.ndarray:
        """二进制 -> 住宅小区下标, 越界值取模修复"""
        values = genomes.astype(np.int64) @ self._powers
        return values % self.n_zones

    # ---- 排序与选择 ----
    def _rank_and_crowd(self, idx: np.ndarray) -> Tuple[List[List[int]], np.ndarray, np.ndarray]:
        F = self.table.objectives[idx]
        V = self.table.violations[idx]
        fronts = fronts_from_matrix(domination_matrix(F, V))
        ranks = np.zeros(idx.size, dtype=np.int64)
        crowding = np.zeros(idx.size)
        for r, members in enumerate(fronts, start=1):
            ranks[members] = r
            crowding[members] = crowding_distance(F[members])
        return fronts, ranks, crowding

    def _environmental_selection(self, idx: np.ndarray) -> np.ndarray:
        """R_t 中按前沿填充 P_{t+1}, 最后一层按拥挤距离截断"""
        n = self.params.pop_size
        if self.params.dedupe_survivors:
            _, first = np.unique(idx, return_index=True)
            unique_mask = np.zeros(idx.size, dtype=bool)
            unique_mask[first] = True
            groups = [np.nonzero(unique_mask)[0], np.nonzero(~unique_mask)[0]]
        else:
            groups = [np.arange(idx.size)]

        chosen: List[int] = []
        for group in groups:
            if len(chosen) >= n or group.size == 0:
                continue
            fronts, _, crowding = self._rank_and_crowd(idx[group])
            for members in fronts:
                space = n - len(chosen)
                if space <= 0:
                    break
                if len(members) <= space:
                    chosen.extend(group[members].tolist())
                else:
                    order = sorted(members, key=lambda m: (-crowding[m], m))
                    chosen.extend(group[order[:space]].tolist())
        return np.array(chosen, dtype=np.int64)

    def _tournament(self, ranks: np.ndarray, crowding: np.ndarray) -> int:
        """拥挤比较二元锦标赛: 前沿低者胜, 同层拥挤距离大者胜, 再相同则掷硬币"""
        if ranks.size < 2:
            return 0
        # 两个参赛者互不相同
        a, b = self.rng.choice(ranks.size, size=2, replace=False)
        if ranks[a] != ranks[b]:
            return int(a if ranks[a] < ranks[b] else b)
        if crowding[a] != crowding[b]:
            return int(a if crowding[a] > crowding[b] else b)
        return int(a if self.rng.random() < 0.5 else b)

    def _offspring(self, genomes: np.ndarray, ranks: np.ndarray, crowding: np.ndarray) -> np.ndarray:
        n = self.params.pop_size
        children = np.empty((n, self.bits), dtype=np.uint8)
        for k in range(0, n, 2):
            p1 = genomes[self._tournament(ranks, crowding)].copy()
            p2 = genomes[self._tournament(ranks, crowding)].copy()
            if self.bits > 1 and self.rng.random() < self.params.crossover_rate:
                point = int(self.rng.integers(1, self.bits))
                p1[point:], p2[point:] = p2[point:].copy(), p1[point:].copy()
            children[k] = p1
            if k + 1 < n:
                children[k + 1] = p2
        flips = self.rng.random(children.shape) < self.mutation_rate
        return children ^ flips.astype(np.uint8)

    def run(self) -> np.ndarray:
        """执行完整的代际循环, 返回最终种群的住宅小区下标"""
        n = self.params.pop_size
        genomes = self.rng.integers(0, 2, size=(n, self.bits), dtype=np.uint8)
        idx = self.decode(genomes)
        _, ranks, crowding = self._rank_and_crowd(idx)

        for _ in range(self.params.generations):
            offspring = self._offspring(genomes, ranks, crowding)
            merged = np.vstack([genomes, offspring])
            merged_idx = self.decode(merged)
            survivors = self._environmental_selection(merged_idx)
            genomes = merged[survivors]
            idx = merged_idx[survivors]
            _, ranks, crowding = self._rank_and_crowd(idx)
        return idx

    def extract(self, idx: np.ndarray, k: int) -> Tuple[List[int], List[int]]:
        """按小区去重、剔除不可行, 以 (前沿, -拥挤距离, 小区编号) 排序取前K"""
        unique = np.unique(idx)
        unique = unique[self.table.violations[unique] == 0]
        if unique.size == 0:
            return [], []
        fronts, ranks, crowding = self._rank_and_crowd(unique)
        zone_ids = self.table.zone_ids[unique]
        order = sorted(range(unique.size), key=lambda i: (ranks[i], -crowding[i], int(zone_ids[i])))[:k]
        return [int(zone_ids[i]) for i in order], [int(ranks[i]) for i in order]


def nsga2_select_alternatives(agent: HouseholdAgent, city: City, params: Optional[NSGA2Settings],
                              seed: int, table: Optional[ObjectiveTable] = None) -> AlternativeSet:
    """为一个agent生成不超过K个可行备选小区"""
    params = params or NSGA2Settings()
    table = table or ObjectiveTable.build(agent, city)
    if table.zone_ids.size == 0:
        return AlternativeSet(agent_id=agent.id)
    rng = RNGManager(seed).generator(f"nsga2:{agent.id}")
    engine = NSGA2Engine(table, params, rng)
    final_idx = engine.run()
    zones, ranks = engine.extract(final_idx, params.k)
    if not zones:
        logger.debug(f"agent {agent.id} 没有找到可行小区")
    return AlternativeSet(agent_id=agent.id, zones=zones, front_ranks=ranks)
