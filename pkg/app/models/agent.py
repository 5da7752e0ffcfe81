"""租户家庭agent数据模型"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np


class Importance(Enum):
    """偏好重要程度"""
    NOT_IMPORTANT = 0
    IMPORTANT = 1
    VERY_IMPORTANT = 2

    @property
    def flagged(self) -> bool:
        return self is not Importance.NOT_IMPORTANT


class Criterion(Enum):
    """13项居住选择准则, 值与先验表列名一致"""
    RENT = "rent"
    EDUCATIONAL = "educational"
    SHOPPING = "shopping"
    GREEN_RECREATIONAL = "green_recreational"
    CULTURAL = "cultural"
    HEALTH = "health"
    HIGHWAY = "highway"
    SUBWAY = "subway"
    BUS = "bus"
    POLLUTION = "pollution"
    WORK_DISTANCE = "work_distance"
    FORMER_DISTANCE = "former_distance"
    TRAFFIC = "traffic"


FACILITY_CRITERIA = (
    Criterion.EDUCATIONAL,
    Criterion.SHOPPING,
    Criterion.GREEN_RECREATIONAL,
    Criterion.CULTURAL,
    Criterion.HEALTH,
)
TRANSIT_CRITERIA = (Criterion.HIGHWAY, Criterion.BUS, Criterion.SUBWAY)


@dataclass(frozen=True)
class PreferenceProfile:
    """偏好档案"""
    levels: Dict[Criterion, Importance]
    facility_weights: Dict[str, float]       # p_ka, 和为1或全0
    transit_weights: Dict[str, float]        # P_ka, 和为1或全0

    def level(self, criterion: Criterion) -> Importance:
        return self.levels.get(criterion, Importance.NOT_IMPORTANT)

    def is_flagged(self, criterion: Criterion) -> bool:
        return self.level(criterion).flagged

    def is_very_important(self, criterion: Criterion) -> bool:
        return self.level(criterion) is Importance.VERY_IMPORTANT


@dataclass
class HouseholdAgent:
    """租户家庭"""
    id: int
    size: int
    ages: List[int]
    income: float                            # I_a, 每月
    cars: int
    employees: int
    students: int
    has_child: bool
    required_area: float                     # RA_a, m²
    former_zone: int
    workplaces: List[int] = field(default_factory=list)
    relocation_month: int = 1                # 1..12, 1 = 模拟年第一个月
    rent_band: Tuple[float, float] = (0.0, 0.35)
    profile: PreferenceProfile = None

    @property
    def adults(self) -> int:
        return sum(1 for age in self.ages if age >= 19)

    @property
    def rent_bounds(self) -> Tuple[float, float]:
        """租金上下限 (货币单位)"""
        pmin, pmax = self.rent_band
        return pmin * self.income, pmax * self.income

    def check_invariants(self) -> List[str]:
        problems = []
        if self.size < 1:
            problems.append("size < 1")
        if self.employees > self.size:
            problems.append("employees > size")
        if len(self.workplaces) != self.employees:
            problems.append("workplaces 数量与 employees 不一致")
        if not self.rent_band[0] < self.rent_band[1]:
            problems.append("Pmin >= Pmax")
        if self.required_area <= 0:
            problems.append("required_area <= 0")
        if self.profile is not None and not self.profile.is_flagged(Criterion.RENT):
            problems.append("租金准则未标记")
        return problems


@dataclass(frozen=True)
class ZoneStats:
    """小区级人口合成目标"""
    zone_ids: Tuple[int, ...]
    households: np.ndarray                   # 各小区家庭权重
    income_mean: np.ndarray
    income_std: np.ndarray
    size_probs: np.ndarray                   # (n_zones, 6), 列 = 1..6+
    age_shares: np.ndarray                   # (n_zones, 4), 列顺序见 AGE_GROUPS

    AGE_GROUPS = ("age_0_5", "age_6_18", "age_19_64", "age_65_plus")
