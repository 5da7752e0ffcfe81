"""城市空间数据模型"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Tuple

import numpy as np


class FacilityKind(Enum):
    """公共设施类型"""
    EDUCATIONAL = "educational"
    SHOPPING = "shopping"
    GREEN_RECREATIONAL = "green_recreational"
    CULTURAL = "cultural"
    HEALTH = "health"


class TransitMode(Enum):
    """交通服务类型"""
    HIGHWAY = "highway"
    BUS = "bus"
    SUBWAY = "subway"


class TrafficCode(Enum):
    """交通限制代码"""
    NONE = 0
    ODD_EVEN = 1
    ALL_PRIVATE = 2


@dataclass(frozen=True)
class Zone:
    """交通小区 (TAZ)"""
    id: int
    centroid: Tuple[float, float]            # km
    area: float                              # km²
    residential_area: float                  # m²
    rent_per_m2: float
    air_class: int                           # 1=清洁 .. 5=重污染
    noise_class: int
    traffic_code: int
    employment: float
    transit_coverage: Dict[str, float] = field(default_factory=dict)

    @property
    def is_residential(self) -> bool:
        return self.residential_area > 0

    def coverage(self, mode: TransitMode) -> float:
        return self.transit_coverage.get(mode.value, 0.0)


@dataclass(frozen=True)
class Facility:
    """公共设施"""
    id: int
    kind: FacilityKind
    location: Tuple[float, float]            # km
    footprint_area: float                    # m²


@dataclass(frozen=True)
class DistanceMatrix:
    """小区间与小区-设施距离 (km), 带下限"""
    zone_ids: Tuple[int, ...]
    zone_to_zone: np.ndarray                 # (n_zones, n_zones)
    zone_to_facility: np.ndarray             # (n_zones, n_facilities)
    d_floor: float

    def between(self, zone_a: int, zone_b: int, index: Dict[int, int]) -> float:
        return float(self.zone_to_zone[index[zone_a], index[zone_b]])


@dataclass(frozen=True)
class City:
    """不可变的城市对象, 构建后可被任意并发worker只读共享"""
    zones: Tuple[Zone, ...]
    facilities: Tuple[Facility, ...]
    distances: DistanceMatrix
    adjacency: FrozenSet[Tuple[int, int]]
    facility_weights: Dict[str, np.ndarray]  # kind -> 与该类设施顺序对应的权重
    facility_raw_access: Dict[str, np.ndarray]   # kind -> (n_zones,) 未归一化的单类设施得分
    coverage: Dict[str, np.ndarray]          # mode -> (n_zones,)
    index: Dict[int, int]                    # zone id -> 行号
    residential_idx: np.ndarray              # 住宅小区行号 (升序)
    attributes: Dict[str, np.ndarray] = field(default_factory=dict)   # 预取的属性列

    @property
    def n_zones(self) -> int:
        return len(self.zones)

    @property
    def residential_ids(self) -> List[int]:
        return [self.zones[i].id for i in self.residential_idx]

    def zone(self, zone_id: int) -> Zone:
        return self.zones[self.index[zone_id]]

    def distance(self, zone_a: int, zone_b: int) -> float:
        return self.distances.between(zone_a, zone_b, self.index)

    def are_adjacent(self, zone_a: int, zone_b: int) -> bool:
        return (min(zone_a, zone_b), max(zone_a, zone_b)) in self.adjacency

    def column(self, name: str) -> np.ndarray:
        """按小区顺序取属性列"""
        if name in self.attributes:
            return self.attributes[name]
        return np.array([getattr(z, name) for z in self.zones], dtype=float)
