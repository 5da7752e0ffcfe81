"""验证与报告数据模型"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple


@dataclass(frozen=True)
class ObservedResidence:
    """实际居住记录"""
    agent_id: int
    zone: int
    month: int


@dataclass
class ValidationReport:
    """实际与模拟居住地对比的十一项指标 (百分比)"""
    metrics: Dict[str, float]
    n_observed: int
    distance_bands: List[Tuple[str, int]] = field(default_factory=list)
    rent_distribution: List[Tuple[str, int, int]] = field(default_factory=list)  # (区间, 实际, 模拟)

    def __getitem__(self, key: str) -> float:
        return self.metrics[key]

    def rows(self) -> List[Tuple[str, float]]:
        return list(self.metrics.items())
