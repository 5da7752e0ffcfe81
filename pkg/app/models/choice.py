"""备选方案选择相关数据模型"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple


class Objective(Enum):
    """目标函数 (均为最小化)"""
    RENT = "rent"
    FACILITY_ACCESS = "facility_access"
    TRANSIT_ACCESS = "transit_access"
    AIR = "air"
    NOISE = "noise"
    WORK_DISTANCE = "work_distance"
    FORMER_DISTANCE = "former_distance"
    TRAFFIC = "traffic"


class Constraint(Enum):
    """硬约束"""
    RENT_BAND = "rent_band"
    POLLUTION_CLASS = "pollution_class"
    NO_TRAFFIC_RESTRICTION = "no_traffic_restriction"


@dataclass(frozen=True)
class ObjectiveSpec:
    """某个agent的目标与约束"""
    objectives: Tuple[Objective, ...]
    constraints: Tuple[Constraint, ...]
    pollution_limit: int = 3


@dataclass
class Individual:
    """NSGA-II 个体"""
    genome: Tuple[int, ...]
    zone: int
    objectives: Tuple[float, ...] = ()
    violation: float = 0.0
    rank: int = 0
    crowding: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0


@dataclass
class AlternativeSet:
    """agent的有序备选小区集合 (≤K)"""
    agent_id: int
    zones: List[int] = field(default_factory=list)
    front_ranks: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.zones)

    def position(self, zone_id: int) -> Optional[int]:
        """1起始的位置, 不在集合中返回None"""
        try:
            return self.zones.index(zone_id) + 1
        except ValueError:
            return None
