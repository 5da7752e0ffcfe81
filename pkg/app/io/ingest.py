"""城市数据导入与逐行校验"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Type, TypeVar

import pandas as pd
from pydantic import BaseModel, ValidationError

from ..city.builder import build_city
from ..config.settings import CitySettings
from ..models.analytics import ObservedResidence
from ..models.city import City, Facility, Zone
from ..utils.errors import InputValidationError
from .schemas import AdjacencyRow, FacilityRow, ObservedRow, ZoneRow

logger = logging.getLogger(__name__)

Row = TypeVar("Row", bound=BaseModel)


def read_rows(path, model: Type[Row]) -> List[Row]:
    """读取CSV并逐行校验; 缺列或任何行出错都会汇总后抛出"""
    file = Path(path)
    if not file.exists():
        raise InputValidationError(f"文件不存在: {path}")
    df = pd.read_csv(file, dtype=str, keep_default_na=False)
    df.columns = [c.strip() for c in df.columns]

    required = [name for name, info in model.model_fields.items() if info.is_required()]
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise InputValidationError(
            f"{file.name} 缺少列: {', '.join(missing)}",
            [(None, c, "缺少必需列") for c in missing],
        )

    rows: List[Row] = []
    issues = []
    for row_no, record in enumerate(df.to_dict(orient="records"), start=2):
        try:
            rows.append(model.model_validate({k: v.strip() for k, v in record.items()}))
        except ValidationError as e:
            for err in e.errors():
                column = ".".join(str(p) for p in err["loc"])
                issues.append((row_no, column, f"{err['msg']} (值: {record.get(column, '')!r})"))
    if issues:
        raise InputValidationError(f"{file.name} 校验失败, 共 {len(issues)} 项", issues)
    return rows


def zone_from_row(row: ZoneRow) -> Zone:
    return Zone(
        id=row.id,
        centroid=(row.cx_km, row.cy_km),
        area=row.area_km2,
        residential_area=row.residential_area_m2,
        rent_per_m2=row.rent_per_m2,
        air_class=row.air_class,
        noise_class=row.noise_class,
        traffic_code=row.traffic_code,
        employment=row.employment,
        transit_coverage={"highway": row.cov_highway, "bus": row.cov_bus, "subway": row.cov_subway},
    )


def facility_from_row(row: FacilityRow) -> Facility:
    return Facility(id=row.id, kind=row.kind, location=(row.x_km, row.y_km), footprint_area=row.footprint_m2)


def ingest_city(zones_path, facilities_path, adjacency_path=None,
                city_settings: Optional[CitySettings] = None) -> City:
    """读取 zones.csv / facilities.csv / adjacency.csv (可选) 并构建城市"""
    zones = [zone_from_row(r) for r in read_rows(zones_path, ZoneRow)]
    facilities = [facility_from_row(r) for r in read_rows(facilities_path, FacilityRow)]

    adjacency: Optional[List[Tuple[int, int]]] = None
    if adjacency_path is not None and Path(adjacency_path).exists():
        adjacency = [(r.zone_a, r.zone_b) for r in read_rows(adjacency_path, AdjacencyRow)]
    else:
        logger.info("未提供邻接文件, 按质心距离阈值生成邻接关系")

    logger.info(f"读取城市数据: {len(zones)} 个小区, {len(facilities)} 个设施")
    return build_city(zones, facilities, adjacency, city_settings)


def read_observed(path) -> List[ObservedResidence]:
    """读取实际居住记录; zone_id 为空的行 (未安置) 被忽略"""
    file = Path(path)
    if not file.exists():
        raise InputValidationError(f"文件不存在: {path}")
    df = pd.read_csv(file, dtype=str, keep_default_na=False)
    if "zone_id" in df.columns:
        df = df[df["zone_id"].str.strip() != ""]
    if df.empty:
        raise InputValidationError(f"{file.name} 没有有效的实际居住记录")

    tmp: Dict[int, ObservedResidence] = {}
    issues = []
    for row_no, record in zip(df.index + 2, df.to_dict(orient="records")):
        try:
            row = ObservedRow.model_validate({k: v.strip() for k, v in record.items()})
        except ValidationError as e:
            issues.extend((int(row_no), ".".join(str(p) for p in err["loc"]), err["msg"]) for err in e.errors())
            continue
        if row.agent_id in tmp:
            issues.append((int(row_no), "agent_id", f"agent {row.agent_id} 重复"))
            continue
        tmp[row.agent_id] = ObservedResidence(agent_id=row.agent_id, zone=row.zone_id, month=row.month)
    if issues:
        raise InputValidationError(f"{file.name} 校验失败, 共 {len(issues)} 项", issues)
    return [tmp[k] for k in sorted(tmp)]
