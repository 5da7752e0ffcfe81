"""城市对象构建与校验"""
import logging
import time
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import CitySettings
from ..models.city import City, Facility, FacilityKind, TrafficCode, TransitMode, Zone
from ..utils.errors import InputValidationError
from .accessibility import facilities_by_kind, facility_weights, raw_facility_access
from .distances import build_distance_matrix

logger = logging.getLogger(__name__)

ATTRIBUTE_COLUMNS = ("rent_per_m2", "residential_area", "air_class", "noise_class", "traffic_code", "employment", "area")


def validate_zone(zone: Zone) -> List[str]:
    """返回该小区违反的不变量"""
    problems = []
    if not zone.area > 0:
        problems.append(f"area 必须为正: {zone.area}")
    if zone.residential_area < 0:
        problems.append(f"residential_area 不能为负: {zone.residential_area}")
    if not zone.rent_per_m2 > 0:
        problems.append(f"rent_per_m2 必须为正: {zone.rent_per_m2}")
    if not 1 <= zone.air_class <= 5:
        problems.append(f"air_class 超出1..5: {zone.air_class}")
    if not 1 <= zone.noise_class <= 5:
        problems.append(f"noise_class 超出1..5: {zone.noise_class}")
    if zone.traffic_code not in {c.value for c in TrafficCode}:
        problems.append(f"traffic_code 必须为0/1/2: {zone.traffic_code}")
    if zone.employment < 0:
        problems.append(f"employment 不能为负: {zone.employment}")
    for mode in TransitMode:
        cov = zone.transit_coverage.get(mode.value, 0.0)
        if not 0.0 <= cov <= 1.0:
            problems.append(f"{mode.value} 覆盖率超出[0,1]: {cov}")
    return problems


def threshold_adjacency(zones: Sequence[Zone], zone_to_zone: np.ndarray,
                        threshold_km: float) -> frozenset:
    """质心距离不超过阈值即视为相邻"""
    pairs = set()
    n = len(zones)
    rows, cols = np.nonzero(zone_to_zone <= threshold_km)
    for i, j in zip(rows.tolist(), cols.tolist()):
        if i < j < n:
            a, b = zones[i].id, zones[j].id
            pairs.add((min(a, b), max(a, b)))
    return frozenset(pairs)


def build_city(zones: Sequence[Zone],
               facilities: Sequence[Facility],
               adjacency_pairs: Optional[Iterable[Tuple[int, int]]] = None,
               city_settings: Optional[CitySettings] = None) -> City:
    """校验并构建不可变的 City"""
    start_time = time.time()
    cfg = city_settings or CitySettings()
    zones = tuple(sorted(zones, key=lambda z: z.id))
    facilities = tuple(facilities)

    if not zones:
        raise InputValidationError("城市至少需要一个小区")

    issues = []
    ids = [z.id for z in zones]
    if len(set(ids)) != len(ids):
        issues.append((None, "id", "小区编号重复"))
    for z in zones:
        for problem in validate_zone(z):
            issues.append((None, None, f"zone {z.id}: {problem}"))
    for f in facilities:
        if not f.footprint_area > 0:
            issues.append((None, "footprint_m2", f"facility {f.id}: 占地面积必须为正"))
    if issues:
        raise InputValidationError(f"城市数据校验失败, 共 {len(issues)} 项", issues)

    index = {z.id: i for i, z in enumerate(zones)}
    distances = build_distance_matrix(zones, facilities, cfg.d_floor_km)

    if adjacency_pairs is None:
        adjacency = threshold_adjacency(zones, distances.zone_to_zone, cfg.adjacency_threshold_km)
    else:
        pairs = set()
        for a, b in adjacency_pairs:
            if a not in index or b not in index:
                raise InputValidationError(f"邻接关系引用了不存在的小区: ({a}, {b})")
            if a == b:
                raise InputValidationError(f"邻接关系不能自反: ({a}, {b})")
            pairs.add((min(a, b), max(a, b)))
        adjacency = frozenset(pairs)

    grouped = facilities_by_kind(facilities)
    weights = {}
    raw_access = {}
    for kind in FacilityKind:
        members = grouped.get(kind.value, [])
        w = facility_weights([facilities[i].footprint_area for i in members])
        if not members:
            logger.warning(f"设施类型 {kind.value} 没有设施, 该类型可达性为0")
        weights[kind.value] = w
        raw_access[kind.value] = raw_facility_access(distances.zone_to_facility[:, members], w)

    coverage = {
        mode.value: np.array([z.transit_coverage.get(mode.value, 0.0) for z in zones], dtype=float)
        for mode in TransitMode
    }
    residential_idx = np.array([i for i, z in enumerate(zones) if z.is_residential], dtype=np.int64)
    if residential_idx.size == 0:
        logger.warning("城市中没有住宅小区")

    city = City(
        zones=zones,
        facilities=facilities,
        distances=distances,
        adjacency=adjacency,
        facility_weights=weights,
        facility_raw_access=raw_access,
        coverage=coverage,
        index=index,
        residential_idx=residential_idx,
        attributes={
            name: np.array([getattr(z, name) for z in zones], dtype=float)
            for name in ATTRIBUTE_COLUMNS
        },
    )
    logger.info(f"城市构建完成: {len(zones)} 个小区 ({residential_idx.size} 个住宅), "
                f"{len(facilities)} 个设施, {len(adjacency)} 对邻接, "
                f"耗时: {time.time() - start_time:.2f}秒")
    return city
