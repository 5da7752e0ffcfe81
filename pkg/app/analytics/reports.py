"""分布报告: 备选数量/最终排名直方图、距离分布、小区与类别汇总"""
import logging
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..city.accessibility import overall_indices
from ..models.agent import HouseholdAgent
from ..models.choice import AlternativeSet
from ..models.city import City
from ..models.market import AgentOutcome, SimulationOutcome
from .bands import count_histogram, distance_bands, percent

logger = logging.getLogger(__name__)

HIGHLIGHT_COUNT = 3


def _band_frame(bands: List[Tuple[str, int]]) -> pd.DataFrame:
    total = sum(c for _, c in bands)
    return pd.DataFrame(
        [(label, count, percent(count, total)) for label, count in bands],
        columns=["band", "agents", "share_pct"],
    )


def work_distance(agent: HouseholdAgent, zone: int, city: City) -> Optional[float]:
    """居住地到各工作地的平均距离, 无就业成员时为None"""
    if not agent.workplaces:
        return None
    return float(np.mean([city.distance(zone, w) for w in agent.workplaces]))


def selection_counts(alternatives: Mapping[int, AlternativeSet], city: City) -> Dict[int, int]:
    """每个住宅小区被选为备选的次数"""
    counts = {zone_id: 0 for zone_id in city.residential_ids}
    for alt in alternatives.values():
        for zone in alt.zones:
            counts[zone] = counts.get(zone, 0) + 1
    return counts


def first_full_month(capacity_log: Sequence[Tuple[int, int, int, int]]) -> Dict[int, int]:
    """各小区容量首次被占满的月份 (容量为0的月份不算)"""
    filled: Dict[int, int] = {}
    for month, zone, capacity, housed in sorted(capacity_log):
        if capacity > 0 and housed >= capacity and zone not in filled:
            filled[zone] = month
    return filled


def earliest_filled_zones(capacity_log: Sequence[Tuple[int, int, int, int]],
                          n: int = HIGHLIGHT_COUNT) -> List[Tuple[int, int]]:
    """最早被占满的小区 [(zone, month)], 按月份再按小区编号"""
    filled = first_full_month(capacity_log)
    return sorted(filled.items(), key=lambda item: (item[1], item[0]))[:n]


def _category_row(name: str, members: List[HouseholdAgent], total: int) -> Dict:
    return {
        "category": name,
        "agents": len(members),
        "share_pct": percent(len(members), total),
        "mean_income": float(np.mean([a.income for a in members])) if members else 0.0,
        "mean_size": float(np.mean([a.size for a in members])) if members else 0.0,
        "mean_cars": float(np.mean([a.cars for a in members])) if members else 0.0,
    }


def category_summary(outcome: SimulationOutcome, agents: Sequence[HouseholdAgent],
                     alternatives: Mapping[int, AlternativeSet], city: City, k: int) -> pd.DataFrame:
    """按类别统计agent占比及类别内收入、规模、汽车均值"""
    total = len(agents)
    n_alt = {a.id: len(alternatives[a.id]) if a.id in alternatives else 0 for a in agents}
    result: Dict[int, AgentOutcome] = outcome.outcomes

    def housed_where(predicate: Callable[[HouseholdAgent, AgentOutcome], bool]) -> List[HouseholdAgent]:
        return [a for a in agents if result[a.id].housed and predicate(a, result[a.id])]

    def former_d(a: HouseholdAgent, o: AgentOutcome) -> float:
        return city.distance(a.former_zone, o.zone)

    def work_d(a: HouseholdAgent, o: AgentOutcome) -> Optional[float]:
        return work_distance(a, o.zone, city)

    categories = [
        ("all_agents", list(agents)),
        ("selected_all_k", [a for a in agents if n_alt[a.id] == k]),
        ("selected_more_than_7", [a for a in agents if n_alt[a.id] > 7]),
        ("selected_less_than_4", [a for a in agents if n_alt[a.id] < 4]),
        ("housed_first_alternative", housed_where(lambda a, o: o.alternative_rank == 1)),
        ("housed_first_three", housed_where(lambda a, o: o.alternative_rank <= 3)),
        ("housed_last_three", housed_where(lambda a, o: o.alternative_rank > n_alt[a.id] - 3)),
        ("carried_forward", [a for a in agents if result[a.id].carried]),
        ("unhoused", [a for a in agents if not result[a.id].housed]),
        ("former_lt_5km", housed_where(lambda a, o: former_d(a, o) < 5.0)),
        ("former_gt_10km", housed_where(lambda a, o: former_d(a, o) > 10.0)),
        ("work_lt_5km", housed_where(lambda a, o: work_d(a, o) is not None and work_d(a, o) < 5.0)),
        ("work_gt_10km", housed_where(lambda a, o: work_d(a, o) is not None and work_d(a, o) > 10.0)),
    ]
    return pd.DataFrame([_category_row(name, members, total) for name, members in categories])


def zone_summary(outcome: SimulationOutcome, agents: Sequence[HouseholdAgent],
                 alternatives: Mapping[int, AlternativeSet], city: City) -> pd.DataFrame:
    """住宅小区的入住人数、平均收入、平均汽车数、被选次数与首次占满月份"""
    by_id = {a.id: a for a in agents}
    residents: Dict[int, List[HouseholdAgent]] = {z: [] for z in city.residential_ids}
    for o in outcome.housed:
        residents.setdefault(o.zone, []).append(by_id[o.agent_id])
    selected = selection_counts(alternatives, city)
    filled = first_full_month(outcome.capacity_log)
    capacity: Dict[int, int] = {}
    for _, zone, cap, _ in outcome.capacity_log:
        capacity[zone] = capacity.get(zone, 0) + cap

    rows = []
    for zone_id in city.residential_ids:
        members = residents.get(zone_id, [])
        rows.append({
            "zone_id": zone_id,
            "residents": len(members),
            "mean_income": float(np.mean([a.income for a in members])) if members else 0.0,
            "mean_cars": float(np.mean([a.cars for a in members])) if members else 0.0,
            "mean_size": float(np.mean([a.size for a in members])) if members else 0.0,
            "times_selected": selected.get(zone_id, 0),
            "capacity_total": capacity.get(zone_id, 0),
            "first_full_month": filled.get(zone_id, 0),
        })
    return pd.DataFrame(rows)


def zone_highlights(outcome: SimulationOutcome, alternatives: Mapping[int, AlternativeSet],
                    city: City, n: int = HIGHLIGHT_COUNT) -> pd.DataFrame:
    """被选最多/最少、入住最多/最少、最早占满的小区及其属性"""
    indices = overall_indices(city)
    selected = selection_counts(alternatives, city)
    residents = {zone_id: 0 for zone_id in city.residential_ids}
    for o in outcome.housed:
        residents[o.zone] = residents.get(o.zone, 0) + 1

    def top(counts: Dict[int, int], largest: bool) -> List[Tuple[int, int]]:
        sign = -1 if largest else 1
        return sorted(counts.items(), key=lambda item: (sign * item[1], item[0]))[:n]

    groups = [
        ("most_selected", top(selected, True)),
        ("least_selected", top(selected, False)),
        ("most_residents", top(residents, True)),
        ("fewest_residents", top(residents, False)),
        ("earliest_filled", earliest_filled_zones(outcome.capacity_log, n)),
    ]
    rows = []
    for category, members in groups:
        for position, (zone_id, value) in enumerate(members, start=1):
            i = city.index[zone_id]
            zone = city.zones[i]
            rows.append({
                "category": category,
                "position": position,
                "zone_id": zone_id,
                "value": value,
                "rent_norm": float(indices["rent_norm"][i]),
                "air_class": zone.air_class,
                "noise_class": zone.noise_class,
                "facility_access": float(indices["facility_access"][i]),
                "highway_access": float(indices["highway_access"][i]),
                "transit_access": float(indices["transit_access"][i]),
            })
    return pd.DataFrame(rows, columns=[
        "category", "position", "zone_id", "value", "rent_norm", "air_class", "noise_class",
        "facility_access", "highway_access", "transit_access",
    ])


def distribution_report(outcome: SimulationOutcome, agents: Sequence[HouseholdAgent],
                        alternatives: Mapping[int, AlternativeSet], city: City,
                        k: int = 10) -> Dict[str, pd.DataFrame]:
    """生成全部报告表, 键为输出文件名 (不含扩展名)"""
    ordered = sorted(agents, key=lambda a: a.id)
    housed = [(a, outcome.outcomes[a.id]) for a in ordered if outcome.outcomes[a.id].housed]

    sizes = [len(alternatives[a.id]) if a.id in alternatives else 0 for a in ordered]
    ranks = [o.alternative_rank for _, o in housed]
    work = [d for a, o in housed for d in [work_distance(a, o.zone, city)] if d is not None]
    former = [city.distance(a.former_zone, o.zone) for a, o in housed]

    tables = {
        "hist_alternatives": pd.DataFrame(count_histogram(sizes, 0, k), columns=["n_alternatives", "agents"]),
        "hist_rank": pd.DataFrame(count_histogram(ranks, 1, k), columns=["rank", "agents"]),
        "dist_work": _band_frame(distance_bands(work)),
        "dist_former": _band_frame(distance_bands(former)),
        "zone_summary": zone_summary(outcome, ordered, alternatives, city),
        "category_summary": category_summary(outcome, ordered, alternatives, city, k),
        "zone_highlights": zone_highlights(outcome, alternatives, city),
    }
    logger.info(f"分布报告生成完成: {len(ordered)} 个agent, {len(housed)} 个已安置")
    return tables
