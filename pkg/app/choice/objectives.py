"""目标函数与约束构建"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..city.accessibility import (
    facility_accessibility_vector,
    normalize_over_residential,
    transit_accessibility_vector,
)
from ..models.agent import FACILITY_CRITERIA, TRANSIT_CRITERIA, Criterion, HouseholdAgent
from ..models.choice import Constraint, Objective, ObjectiveSpec
from ..models.city import City
from ..utils.errors import InputValidationError

POLLUTION_LIMIT = 3


def build_objective_spec(agent: HouseholdAgent, city: City = None) -> ObjectiveSpec:
    """准则级别 ≥ important 即激活目标; very_important 的污染/交通限制额外加硬约束"""
    profile = agent.profile
    objectives = [Objective.RENT]
    if any(profile.is_flagged(c) for c in FACILITY_CRITERIA):
        objectives.append(Objective.FACILITY_ACCESS)
    if any(profile.is_flagged(c) for c in TRANSIT_CRITERIA):
        objectives.append(Objective.TRANSIT_ACCESS)
    if profile.is_flagged(Criterion.POLLUTION):
        objectives.extend([Objective.AIR, Objective.NOISE])
    if profile.is_flagged(Criterion.WORK_DISTANCE):
        objectives.append(Objective.WORK_DISTANCE)
    if profile.is_flagged(Criterion.FORMER_DISTANCE):
        objectives.append(Objective.FORMER_DISTANCE)
    if profile.is_flagged(Criterion.TRAFFIC):
        objectives.append(Objective.TRAFFIC)

    constraints = [Constraint.RENT_BAND]
    if profile.is_very_important(Criterion.POLLUTION):
        constraints.append(Constraint.POLLUTION_CLASS)
    if profile.is_very_important(Criterion.TRAFFIC):
        constraints.append(Constraint.NO_TRAFFIC_RESTRICTION)
    return ObjectiveSpec(objectives=tuple(objectives), constraints=tuple(constraints),
                         pollution_limit=POLLUTION_LIMIT)


def rent_band_violation(cost: np.ndarray, low: float, high: float) -> np.ndarray:
    """租金落在区间外的相对距离"""
    cost = np.asarray(cost, dtype=float)
    over = np.where(cost > high, (cost - high) / high, 0.0)
    if low > 0:
        under = np.where(cost < low, (low - cost) / low, 0.0)
    else:
        under = np.zeros_like(cost)
    return over + under


@dataclass(frozen=True)
class ObjectiveTable:
    """agent在全部住宅小区上的目标矩阵与约束违反量"""
    zone_ids: np.ndarray            # (n_res,)
    objectives: np.ndarray          # (n_res, n_obj)
    violations: np.ndarray          # (n_res,)
    spec: ObjectiveSpec

    @classmethod
    def build(cls, agent: HouseholdAgent, city: City, spec: ObjectiveSpec = None,
              constrained: bool = True) -> "ObjectiveTable":
        spec = spec or build_objective_spec(agent, city)
        res = city.residential_idx
        dist = city.distances.zone_to_zone
        rent = agent.required_area * city.column("rent_per_m2")
        air = city.column("air_class")
        noise = city.column("noise_class")
        traffic = city.column("traffic_code")

        columns = []
        for objective in spec.objectives:
            if objective is Objective.RENT:
                columns.append(rent[res])
            elif objective is Objective.FACILITY_ACCESS:
                raw = facility_accessibility_vector(city, agent.profile.facility_weights)
                columns.append(-normalize_over_residential(city, raw)[res])
            elif objective is Objective.TRANSIT_ACCESS:
                raw = transit_accessibility_vector(city, agent.profile.transit_weights)
                columns.append(-normalize_over_residential(city, raw)[res])
            elif objective is Objective.AIR:
                columns.append(air[res])
            elif objective is Objective.NOISE:
                columns.append(noise[res])
            elif objective is Objective.WORK_DISTANCE:
                work_rows = [city.index[w] for w in agent.workplaces]
                if work_rows:
                    columns.append(dist[np.ix_(res, work_rows)].sum(axis=1))
                else:
                    columns.append(np.zeros(res.size))
            elif objective is Objective.FORMER_DISTANCE:
                columns.append(dist[res, city.index[agent.former_zone]])
            elif objective is Objective.TRAFFIC:
                columns.append(traffic[res])

        violations = np.zeros(res.size)
        if constrained:
            low, high = agent.rent_bounds
            for constraint in spec.constraints:
                if constraint is Constraint.RENT_BAND:
                    violations += rent_band_violation(rent[res], low, high)
                elif constraint is Constraint.POLLUTION_CLASS:
                    violations += np.maximum(air[res] - spec.pollution_limit, 0)
                    violations += np.maximum(noise[res] - spec.pollution_limit, 0)
                elif constraint is Constraint.NO_TRAFFIC_RESTRICTION:
                    violations += traffic[res]

        zone_ids = np.array([city.zones[i].id for i in res], dtype=np.int64)
        objectives = np.column_stack(columns) if columns else np.zeros((res.size, 0))
        return cls(zone_ids=zone_ids, objectives=objectives, violations=violations, spec=spec)

    @property
    def feasible(self) -> np.ndarray:
        return self.violations == 0

    def row(self, zone_id: int) -> int:
        hits = np.nonzero(self.zone_ids == zone_id)[0]
        if hits.size == 0:
            raise InputValidationError(f"zone {zone_id} 不是住宅小区")
        return int(hits[0])


def evaluate(zone_id: int, spec: ObjectiveSpec, agent: HouseholdAgent, city: City) -> Tuple[Tuple[float, ...], float]:
    """单个小区的目标向量与总违反量"""
    if zone_id not in city.index or not city.zone(zone_id).is_residential:
        raise InputValidationError(f"zone {zone_id} 不是住宅小区")
    table = ObjectiveTable.build(agent, city, spec)
    row = table.row(zone_id)
    return tuple(float(v) for v in table.objectives[row]), float(table.violations[row])
