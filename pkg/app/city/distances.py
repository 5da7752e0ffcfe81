"""欧氏距离矩阵"""
import logging
from typing import Sequence

import numpy as np

from ..models.city import DistanceMatrix, Facility, Zone
from ..utils.errors import InputValidationError

logger = logging.getLogger(__name__)


def _coords(points: Sequence[Sequence[float]]) -> np.ndarray:
    if len(points) == 0:
        return np.zeros((0, 2))
    return np.asarray(points, dtype=float).reshape(-1, 2)


def pairwise_km(a: np.ndarray, b: np.ndarray, d_floor: float) -> np.ndarray:
    """平面欧氏距离, 不低于 d_floor"""
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    diff = a[:, None, :] - b[None, :, :]
    return np.maximum(np.sqrt((diff ** 2).sum(axis=-1)), d_floor)


def build_distance_matrix(zones: Sequence[Zone],
                          facilities: Sequence[Facility],
                          d_floor: float) -> DistanceMatrix:
    """构建对称的小区距离矩阵和小区-设施距离"""
    if not d_floor > 0:
        raise InputValidationError(f"d_floor 必须为正: {d_floor}")

    issues = []
    for z in zones:
        if not np.all(np.isfinite(z.centroid)):
            issues.append((None, "centroid", f"zone {z.id} 坐标非有限值: {z.centroid}"))
    for f in facilities:
        if not np.all(np.isfinite(f.location)):
            issues.append((None, "location", f"facility {f.id} 坐标非有限值: {f.location}"))
    if issues:
        raise InputValidationError(f"坐标无效: {issues[0][2]}", issues)

    zone_xy = _coords([z.centroid for z in zones])
    fac_xy = _coords([f.location for f in facilities])

    zone_to_zone = pairwise_km(zone_xy, zone_xy, d_floor)
    # 浮点误差下保证严格对称
    zone_to_zone = np.maximum(zone_to_zone, zone_to_zone.T)
    np.fill_diagonal(zone_to_zone, d_floor)

    zone_to_facility = pairwise_km(zone_xy, fac_xy, d_floor)

    logger.debug(f"距离矩阵构建完成: {len(zones)} 个小区, {len(facilities)} 个设施")
    return DistanceMatrix(
        zone_ids=tuple(z.id for z in zones),
        zone_to_zone=zone_to_zone,
        zone_to_facility=zone_to_facility,
        d_floor=d_floor,
    )
