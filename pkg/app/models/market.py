"""租赁市场数据模型"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple


class HousingStatus(Enum):
    """最终状态"""
    HOUSED = "housed"
    UNHOUSED = "unhoused"


@dataclass
class CompetitionEvent:
    """一次需求超过容量的竞争"""
    month: int
    zone: int
    contenders: List[int]
    winners: List[int]
    remaining_capacity: int

    def to_record(self) -> Dict:
        return {
            "month": self.month,
            "zone": self.zone,
            "contenders": list(self.contenders),
            "winners": list(self.winners),
            "remaining_capacity": self.remaining_capacity,
        }


@dataclass
class MonthLedger:
    """单月结算结果"""
    month: int
    capacities: Dict[int, int]
    assignments: Dict[int, Tuple[int, int]] = field(default_factory=dict)  # agent -> (zone, rank)
    losers: List[int] = field(default_factory=list)
    events: List[CompetitionEvent] = field(default_factory=list)
    rounds: int = 0

    def housed_per_zone(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for zone, _ in self.assignments.values():
            counts[zone] = counts.get(zone, 0) + 1
        return counts


@dataclass
class AgentOutcome:
    """单个agent的最终状态"""
    agent_id: int
    status: HousingStatus
    zone: Optional[int] = None
    month: Optional[int] = None
    alternative_rank: Optional[int] = None
    carried: bool = False

    @property
    def housed(self) -> bool:
        return self.status is HousingStatus.HOUSED


@dataclass
class SimulationOutcome:
    """整年仿真结果"""
    outcomes: Dict[int, AgentOutcome]
    events: List[CompetitionEvent] = field(default_factory=list)
    capacity_log: List[Tuple[int, int, int, int]] = field(default_factory=list)  # (month, zone, capacity, housed)

    @property
    def housed(self) -> List[AgentOutcome]:
        return [o for o in self.outcomes.values() if o.housed]

    @property
    def unhoused(self) -> List[AgentOutcome]:
        return [o for o in self.outcomes.values() if not o.housed]
