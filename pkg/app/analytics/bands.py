"""距离分段与直方图工具"""
from typing import Iterable, List, Sequence, Tuple

import numpy as np


def band_labels(width: float = 1.0, limit: float = 10.0) -> List[str]:
    edges = np.arange(0.0, limit + width / 2, width)
    labels = [f"{lo:g}-{hi:g}km" for lo, hi in zip(edges[:-1], edges[1:])]
    labels.append(f">{limit:g}km")
    return labels


def distance_bands(values: Iterable[float], width: float = 1.0, limit: float = 10.0) -> List[Tuple[str, int]]:
    """1 km 分段到 limit, 其后为溢出段; 计数之和等于样本数"""
    values = np.asarray(list(values), dtype=float)
    edges = np.append(np.arange(0.0, limit + width / 2, width), np.inf)
    counts, _ = np.histogram(values, bins=edges)
    return list(zip(band_labels(width, limit), (int(c) for c in counts)))


def count_histogram(values: Sequence[int], low: int, high: int) -> List[Tuple[int, int]]:
    """整数取值 low..high 的频数, 区间外的值不计入"""
    values = np.asarray(values, dtype=np.int64).reshape(-1)
    values = values[(values >= low) & (values <= high)]
    counts = np.bincount(values - low, minlength=high - low + 1)
    return [(low + i, int(counts[i])) for i in range(high - low + 1)]


def percent(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0
