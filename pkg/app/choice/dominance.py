"""约束支配、非支配排序与拥挤距离"""
from typing import List, Optional, Sequence

import numpy as np

from ..models.choice import Individual
from ..utils.errors import InputValidationError


def pareto_dominates(fa: Sequence[float], fb: Sequence[float]) -> bool:
    """Pareto支配: 各分量不差且至少一项严格更优"""
    if len(fa) != len(fb):
        raise InputValidationError(f"目标维数不一致: {len(fa)} vs {len(fb)}")
    no_worse = all(x <= y for x, y in zip(fa, fb))
    better = any(x < y for x, y in zip(fa, fb))
    return no_worse and better


def constrained_dominates(a: Individual, b: Individual) -> bool:
    """
    Deb约束支配:
    可行解支配不可行解; 都不可行时违反量严格更小者支配; 都可行时按Pareto支配。
    """
    if len(a.objectives) != len(b.objectives):
        raise InputValidationError(f"目标维数不一致: {len(a.objectives)} vs {len(b.objectives)}")
    a_ok, b_ok = a.violation == 0, b.violation == 0
    if a_ok and not b_ok:
        return True
    if b_ok and not a_ok:
        return False
    if not a_ok and not b_ok:
        return a.violation < b.violation
    return pareto_dominates(a.objectives, b.objectives)


def domination_matrix(objectives: np.ndarray, violations: np.ndarray) -> np.ndarray:
    """D[i, j] = i 约束支配 j (向量化)"""
    F = np.asarray(objectives, dtype=float)
    V = np.asarray(violations, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    feasible = V == 0
    no_worse = np.all(F[:, None, :] <= F[None, :, :], axis=-1)
    better = np.any(F[:, None, :] < F[None, :, :], axis=-1)
    pareto = no_worse & better

    fi, fj = feasible[:, None], feasible[None, :]
    return (
        (fi & ~fj)
        | (~fi & ~fj & (V[:, None] < V[None, :]))
        | (fi & fj & pareto)
    )


def fronts_from_matrix(dominates: np.ndarray) -> List[List[int]]:
    """由支配矩阵分层, 每层下标升序"""
    n = dominates.shape[0]
    if n == 0:
        return []
    counts = dominates.sum(axis=0).astype(np.int64)   # 支配 j 的个体数
    current = [i for i in range(n) if counts[i] == 0]
    fronts = []
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in np.nonzero(dominates[i])[0]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(int(j))
        current = sorted(nxt)
    return fronts


def non_dominated_fronts(objectives: np.ndarray, violations: np.ndarray) -> List[List[int]]:
    return fronts_from_matrix(domination_matrix(objectives, violations))


def fast_non_dominated_sort(population: List[Individual]) -> List[List[Individual]]:
    """返回各前沿的个体列表, 同时写入个体的 rank (从1开始)"""
    if not population:
        return []
    F = np.array([ind.objectives for ind in population], dtype=float)
    V = np.array([ind.violation for ind in population], dtype=float)
    fronts = []
    for rank, members in enumerate(non_dominated_fronts(F.reshape(len(population), -1), V), start=1):
        front = [population[i] for i in members]
        for ind in front:
            ind.rank = rank
        fronts.append(front)
    return fronts


def crowding_distance(front_objectives: np.ndarray, bounds: Optional[np.ndarray] = None) -> np.ndarray:
    """
    拥挤距离: 每个目标的边界个体为无穷大, 内部个体累加 (后一个 - 前一个) / (max - min)。
    bounds 为 (n_obj, 2) 的 [min, max], 默认取前沿自身范围; 零范围目标的内部个体贡献0,
    边界仍按稳定排序取首尾个体。
    """
    F = np.asarray(front_objectives, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    n, m = F.shape
    if n == 0:
        return np.zeros(0)
    if n <= 2:
        return np.full(n, np.inf)

    distance = np.zeros(n)
    for k in range(m):
        lo, hi = (F[:, k].min(), F[:, k].max()) if bounds is None else bounds[k]
        order = np.argsort(F[:, k], kind="stable")
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        span = hi - lo
        if span == 0:
            continue
        gaps = (F[order[2:], k] - F[order[:-2], k]) / span
        distance[order[1:-1]] += gaps
    return distance

