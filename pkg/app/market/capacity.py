"""月度居住容量"""
from typing import Dict

import numpy as np

from ..models.city import City
from ..utils.apportion import largest_remainder, round_half_up
from ..utils.errors import InputValidationError


def monthly_capacity(city: City, month: int, alpha_t: float, n_at: int) -> Dict[int, int]:
    """RC_it = RA_i / Σ RA_i * (α_t * N_at), 最大余数法取整, 单位为agent名额"""
    if alpha_t <= 0:
        raise InputValidationError(f"第{month}月 alpha 必须为正: {alpha_t}")
    if n_at < 0:
        raise InputValidationError(f"第{month}月 agent数不能为负: {n_at}")
    areas = city.column("residential_area")
    if areas.sum() <= 0:
        raise InputValidationError("所有小区居住面积为0")
    total = round_half_up(alpha_t * n_at)
    slots = largest_remainder(areas, total)
    return {zone.id: int(slots[i]) for i, zone in enumerate(city.zones) if zone.is_residential}


def capacity_from_areas(areas, alpha_t: float, n_at: int) -> np.ndarray:
    """不依赖City的纯算术版本"""
    areas = np.asarray(areas, dtype=float)
    if areas.sum() <= 0:
        raise InputValidationError("所有小区居住面积为0")
    return largest_remainder(areas, round_half_up(alpha_t * n_at))
