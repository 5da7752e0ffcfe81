"""输入CSV的行级校验模型"""
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..models.city import FacilityKind


class _Row(BaseModel):
    model_config = ConfigDict(extra="ignore")


class ZoneRow(_Row):
    """zones.csv 行"""
    id: int = Field(..., description="小区编号")
    cx_km: float = Field(..., allow_inf_nan=False, description="质心x坐标")
    cy_km: float = Field(..., allow_inf_nan=False, description="质心y坐标")
    area_km2: float = Field(..., gt=0, description="小区面积")
    residential_area_m2: float = Field(..., ge=0, allow_inf_nan=False, description="居住面积")
    rent_per_m2: float = Field(..., gt=0, allow_inf_nan=False, description="每平米月租金")
    air_class: int = Field(..., ge=1, le=5, description="空气污染等级")
    noise_class: int = Field(..., ge=1, le=5, description="噪声污染等级")
    traffic_code: int = Field(..., ge=0, le=2, description="交通限制代码")
    employment: float = Field(..., ge=0, allow_inf_nan=False, description="就业岗位数")
    cov_highway: float = Field(..., ge=0, le=1, description="高速公路覆盖比例")
    cov_bus: float = Field(..., ge=0, le=1, description="公交覆盖比例")
    cov_subway: float = Field(..., ge=0, le=1, description="地铁覆盖比例")


class FacilityRow(_Row):
    """facilities.csv 行"""
    id: int = Field(..., description="设施编号")
    kind: FacilityKind = Field(..., description="设施类型")
    x_km: float = Field(..., allow_inf_nan=False, description="x坐标")
    y_km: float = Field(..., allow_inf_nan=False, description="y坐标")
    footprint_m2: float = Field(..., gt=0, allow_inf_nan=False, description="占地面积")

    @field_validator("kind", mode="before")
    @classmethod
    def _normalize_kind(cls, value):
        # 兼容 green-recreational 写法
        return value.strip().lower().replace("-", "_") if isinstance(value, str) else value


class AdjacencyRow(_Row):
    """adjacency.csv 行"""
    zone_a: int = Field(..., description="小区A")
    zone_b: int = Field(..., description="小区B")


class ObservedRow(_Row):
    """实际居住记录行"""
    agent_id: int = Field(..., ge=1, description="agent编号")
    zone_id: int = Field(..., description="实际居住小区")
    month: int = Field(..., ge=1, le=12, description="搬迁月份")
