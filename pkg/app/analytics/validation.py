"""模拟居住地与实际居住地的对比指标"""
import logging
from typing import List, Mapping, Sequence, Tuple

import numpy as np

from ..city.accessibility import overall_indices
from ..models.analytics import ObservedResidence, ValidationReport
from ..models.choice import AlternativeSet
from ..models.city import City
from ..models.market import SimulationOutcome
from ..utils.errors import InputValidationError
from .bands import distance_bands, percent

logger = logging.getLogger(__name__)

BAND_LOW, BAND_HIGH = 0.85, 1.15

VALIDATION_METRICS = (
    "identical_zone",
    "in_alternatives",
    "identical_or_adjacent",
    "distance_lt_5km",
    "distance_gt_10km",
    "rent_within_15pct",
    "facility_access_within_15pct",
    "highway_access_within_15pct",
    "transit_access_within_15pct",
    "air_class_identical",
    "noise_class_identical",
)


def within_band(simulated: float, actual: float, low: float = BAND_LOW, high: float = BAND_HIGH) -> bool:
    """simulated 是否落在 actual 的 85%-115% 内 (actual 为0时要求 simulated 也为0)"""
    return low * actual <= simulated <= high * actual


def check_observed(observed: Sequence[ObservedResidence], city: City) -> None:
    issues = []
    for row, obs in enumerate(observed, start=1):
        if obs.zone not in city.index:
            issues.append((row, "zone_id", f"小区 {obs.zone} 不存在"))
        elif not city.zone(obs.zone).is_residential:
            issues.append((row, "zone_id", f"小区 {obs.zone} 不是住宅小区"))
        if not 1 <= obs.month <= 12:
            issues.append((row, "month", f"月份超出范围: {obs.month}"))
    if issues:
        raise InputValidationError(f"实际居住数据校验失败, 共 {len(issues)} 项", issues)


def rent_distribution(actual: Sequence[float], simulated: Sequence[float], bins: int = 10) -> List[Tuple[str, int, int]]:
    """实际与模拟居住地每平米租金的分布, 共用同一组区间"""
    combined = np.concatenate([np.asarray(actual, dtype=float), np.asarray(simulated, dtype=float)])
    if combined.size == 0:
        return []
    lo, hi = float(combined.min()), float(combined.max())
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    a_counts, _ = np.histogram(actual, bins=edges)
    s_counts, _ = np.histogram(simulated, bins=edges)
    return [
        (f"{edges[i]:.4f}-{edges[i + 1]:.4f}", int(a_counts[i]), int(s_counts[i]))
        for i in range(bins)
    ]


def validation_report(outcome: SimulationOutcome,
                      observed: Sequence[ObservedResidence],
                      alternatives: Mapping[int, AlternativeSet],
                      city: City) -> ValidationReport:
    """逐项计算对比指标; 模拟中未安置的agent不参与比较"""
    if not observed:
        raise InputValidationError("实际居住数据为空")
    check_observed(observed, city)

    pairs = []
    skipped = 0
    for obs in sorted(observed, key=lambda o: o.agent_id):
        result = outcome.outcomes.get(obs.agent_id)
        if result is None or not result.housed:
            skipped += 1
            continue
        pairs.append((obs, result.zone))
    if skipped:
        logger.warning(f"{skipped} 条实际居住记录对应的agent未被安置或不存在, 已跳过")
    if not pairs:
        raise InputValidationError("没有可比较的已安置agent")

    indices = overall_indices(city)
    rent = city.column("rent_per_m2")
    air = city.column("air_class")
    noise = city.column("noise_class")

    hits = dict.fromkeys(VALIDATION_METRICS, 0)
    distances = []
    for obs, sim_zone in pairs:
        a, s = city.index[obs.zone], city.index[sim_zone]
        d = city.distance(obs.zone, sim_zone)
        distances.append(d)
        alt = alternatives.get(obs.agent_id)

        hits["identical_zone"] += obs.zone == sim_zone
        hits["in_alternatives"] += alt is not None and obs.zone in alt.zones
        hits["identical_or_adjacent"] += obs.zone == sim_zone or city.are_adjacent(obs.zone, sim_zone)
        hits["distance_lt_5km"] += d < 5.0
        hits["distance_gt_10km"] += d > 10.0
        hits["rent_within_15pct"] += within_band(rent[s], rent[a])
        hits["facility_access_within_15pct"] += within_band(indices["facility_access"][s], indices["facility_access"][a])
        hits["highway_access_within_15pct"] += within_band(indices["highway_access"][s], indices["highway_access"][a])
        hits["transit_access_within_15pct"] += within_band(indices["transit_access"][s], indices["transit_access"][a])
        hits["air_class_identical"] += air[s] == air[a]
        hits["noise_class_identical"] += noise[s] == noise[a]

    n = len(pairs)
    metrics = {name: percent(int(hits[name]), n) for name in VALIDATION_METRICS}
    report = ValidationReport(
        metrics=metrics,
        n_observed=n,
        distance_bands=distance_bands(distances),
        rent_distribution=rent_distribution(
            [rent[city.index[o.zone]] for o, _ in pairs],
            [rent[city.index[z]] for _, z in pairs],
        ),
    )
    logger.info(f"验证完成: {n} 条记录, 小区一致 {metrics['identical_zone']:.1f}%, "
                f"位于备选集合 {metrics['in_alternatives']:.1f}%")
    return report
