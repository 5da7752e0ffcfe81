"""最大余数法整数分配"""
import math
from typing import Sequence

import numpy as np


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def largest_remainder(shares: Sequence[float], total: int) -> np.ndarray:
    """
    将非负实数份额按比例分配为整数, 总和恰好为 total。
    余数相同时下标小的优先, 结果完全确定。
    """
    weights = np.asarray(shares, dtype=float)
    if total < 0:
        raise ValueError(f"total 不能为负: {total}")
    if weights.size == 0:
        if total:
            raise ValueError("空份额无法分配非零总数")
        return np.zeros(0, dtype=np.int64)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("份额必须是非负有限数")
    weight_sum = weights.sum()
    if weight_sum <= 0:
        if total:
            raise ValueError("份额全部为0, 无法分配")
        return np.zeros(weights.size, dtype=np.int64)

    quotas = weights / weight_sum * total
    floors = np.floor(quotas).astype(np.int64)
    remainders = np.round(quotas - floors, 12)
    leftover = int(total - floors.sum())
    if leftover > 0:
        # 余数降序, 同余数按下标升序
        order = np.lexsort((np.arange(weights.size), -remainders))
        floors[order[:leftover]] += 1
    return floors
