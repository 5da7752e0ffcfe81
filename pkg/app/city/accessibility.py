"""可达性指数与归一化"""
import logging
from typing import Dict, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..models.city import City, Facility, TransitMode, Zone
from ..utils.errors import InputValidationError

logger = logging.getLogger(__name__)


def facility_weights(areas: Sequence[float]) -> np.ndarray:
    """w_j(k) = A_j(k) / max A_j(k); 空类型返回空数组"""
    values = np.asarray(areas, dtype=float)
    if values.size == 0:
        return values
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise InputValidationError("设施占地面积必须为正")
    return values / values.max()


def _check_weights(weights: Mapping[str, float], name: str) -> None:
    if any(w < 0 for w in weights.values()):
        raise InputValidationError(f"{name} 权重不能为负: {dict(weights)}")


def raw_facility_access(distances_to_kind: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """单一设施类型的 Σ_j w_j * d_ij^-2, 按小区向量化"""
    if weights.size == 0:
        return np.zeros(distances_to_kind.shape[0])
    return (weights[None, :] * distances_to_kind ** -2.0).sum(axis=1)


def facility_accessibility(zone: Zone, p_ka: Mapping[str, float], city: City) -> float:
    """设施可达性原始得分 Σ_k Σ_j p_ka * w_j(k) * d_ij^-2 (km)"""
    _check_weights(p_ka, "p_ka")
    row = city.index[zone.id]
    score = 0.0
    for kind, p in p_ka.items():
        if p == 0:
            continue
        raw = city.facility_raw_access.get(kind)
        if raw is None:
            continue
        score += p * float(raw[row])
    return score


def facility_accessibility_vector(city: City, p_ka: Mapping[str, float]) -> np.ndarray:
    """所有小区的设施可达性原始得分"""
    _check_weights(p_ka, "p_ka")
    total = np.zeros(city.n_zones)
    for kind, p in p_ka.items():
        if p and kind in city.facility_raw_access:
            total += p * city.facility_raw_access[kind]
    return total


def transit_accessibility(zone: Zone, P_ka: Mapping[str, float]) -> float:
    """交通可达性原始得分 Σ_k coverage_k * P_ka"""
    _check_weights(P_ka, "P_ka")
    score = 0.0
    for mode, p in P_ka.items():
        coverage = zone.transit_coverage.get(mode, 0.0)
        if not 0.0 <= coverage <= 1.0:
            raise InputValidationError(f"zone {zone.id} 的 {mode} 覆盖率超出[0,1]: {coverage}")
        score += coverage * p
    return score


def transit_accessibility_vector(city: City, P_ka: Mapping[str, float]) -> np.ndarray:
    _check_weights(P_ka, "P_ka")
    total = np.zeros(city.n_zones)
    for mode, p in P_ka.items():
        if p and mode in city.coverage:
            total += p * city.coverage[mode]
    return total


def min_max_normalize(values: Sequence[float]) -> np.ndarray:
    """(x - min) / (max - min); max == min 时全部为0"""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise InputValidationError("归一化输入不能为空")
    if not np.all(np.isfinite(arr)):
        raise InputValidationError("归一化输入必须是有限值")
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)


def normalize_over_residential(city: City, raw: np.ndarray) -> np.ndarray:
    """以住宅小区为范围归一化, 非住宅小区置0"""
    out = np.zeros(city.n_zones)
    if city.residential_idx.size:
        out[city.residential_idx] = min_max_normalize(raw[city.residential_idx])
    return out


def coverage_fraction(center: Sequence[float], side_km: float, stops: np.ndarray,
                      radius_km: float, resolution_m: float) -> float:
    """
    正方形小区被服务半径圆并集覆盖的比例。
    在分辨率为 resolution_m 的采样网格上计数。
    """
    if stops.size == 0:
        return 0.0
    step = resolution_m / 1000.0
    n = max(1, int(round(side_km / step)))
    offsets = (np.arange(n) + 0.5) / n * side_km - side_km / 2.0
    gx, gy = np.meshgrid(center[0] + offsets, center[1] + offsets)
    cells = np.column_stack([gx.ravel(), gy.ravel()])
    tree = cKDTree(np.asarray(stops, dtype=float).reshape(-1, 2))
    dist, _ = tree.query(cells, k=1, distance_upper_bound=radius_km)
    return float(np.isfinite(dist).mean())


def overall_indices(city: City) -> Dict[str, np.ndarray]:
    """均匀权重下的归一化小区指标, 用于验证与报告"""
    uniform = {kind: 1.0 / len(city.facility_raw_access) for kind in city.facility_raw_access}
    return {
        "rent_norm": normalize_over_residential(city, city.column("rent_per_m2")),
        "facility_access": normalize_over_residential(city, facility_accessibility_vector(city, uniform)),
        "highway_access": normalize_over_residential(
            city, transit_accessibility_vector(city, {TransitMode.HIGHWAY.value: 1.0})
        ),
        "transit_access": normalize_over_residential(
            city,
            transit_accessibility_vector(city, {TransitMode.BUS.value: 0.5, TransitMode.SUBWAY.value: 0.5}),
        ),
    }


def facilities_by_kind(facilities: Sequence[Facility]) -> Dict[str, list]:
    grouped: Dict[str, list] = {}
    for idx, f in enumerate(facilities):
        grouped.setdefault(f.kind.value, []).append(idx)
    return grouped
