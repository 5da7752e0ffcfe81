"""运行配置管理模块 - Pydantic v2"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from ..utils.errors import ConfigError
from ..utils.rng import U64_MAX

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parents[2] / "data"

FACILITY_KINDS = ("educational", "shopping", "green_recreational", "cultural", "health")
TRANSIT_MODES = ("highway", "bus", "subway")


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CitySettings(_Section):
    """城市模型配置"""
    zones_path: Optional[str] = None              # 为空时使用合成城市
    facilities_path: Optional[str] = None
    adjacency_path: Optional[str] = None
    d_floor_km: float = Field(0.5, gt=0)
    service_radius_km: Dict[str, float] = Field(
        default_factory=lambda: {"highway": 2.0, "bus": 1.5, "subway": 1.9}
    )
    adjacency_threshold_km: float = Field(2.0, gt=0)
    coverage_grid_m: float = Field(50.0, gt=0)

    @field_validator("service_radius_km")
    @classmethod
    def _check_radii(cls, value: Dict[str, float]) -> Dict[str, float]:
        if set(value) != set(TRANSIT_MODES):
            raise ValueError(f"service_radius_km 必须且只能包含 {list(TRANSIT_MODES)}")
        if any(r <= 0 for r in value.values()):
            raise ValueError("服务半径必须为正")
        return value

    @model_validator(mode="after")
    def _check_paths(self) -> "CitySettings":
        if (self.zones_path is None) != (self.facilities_path is None):
            raise ValueError("zones_path 和 facilities_path 必须同时提供")
        return self


class SyntheticCitySettings(_Section):
    """合成城市配置 (SyntheticCitySpec)"""
    rows: int = Field(10, ge=2)
    cols: int = Field(10, ge=2)
    cell_km: float = Field(2.0, gt=0)
    rent_base: float = Field(0.03, gt=0)          # 百万IRR / m² / 月
    rent_gradient: float = Field(1.5, ge=0)
    pollution_gradient: bool = True
    employment_concentration: float = Field(2.5, ge=0)
    employment_base: float = Field(2000.0, ge=0)
    facility_density: Dict[str, float] = Field(
        default_factory=lambda: {
            "educational": 1.2,
            "shopping": 0.8,
            "green_recreational": 0.5,
            "cultural": 0.2,
            "health": 0.4,
        }
    )
    bus_stop_density: float = Field(0.6, ge=0)    # 每km², 中心加密
    subway_lines: int = Field(2, ge=0)
    subway_station_spacing_km: float = Field(1.5, gt=0)
    highway_ramp_spacing_km: float = Field(3.0, gt=0)
    non_residential_share: float = Field(0.05, ge=0, lt=1)
    households_per_zone: float = Field(300.0, gt=0)
    income_mean: float = Field(14.0, gt=0)        # 百万IRR / 月
    income_cv: float = Field(0.6, ge=0)

    @field_validator("facility_density")
    @classmethod
    def _check_density(cls, value: Dict[str, float]) -> Dict[str, float]:
        unknown = set(value) - set(FACILITY_KINDS)
        if unknown:
            raise ValueError(f"未知设施类型: {sorted(unknown)}")
        if any(v < 0 for v in value.values()):
            raise ValueError("设施密度不能为负")
        return value

    @property
    def n_zones(self) -> int:
        return self.rows * self.cols


class SynthesisSettings(_Section):
    """人口合成配置"""
    n_agents: int = Field(10000, ge=1)
    zone_stats_path: Optional[str] = None
    survey_priors_path: str = str(DATA_DIR / "survey_priors.csv")
    month_shares_path: str = str(DATA_DIR / "month_shares.csv")
    conditionals_path: str = str(DATA_DIR / "conditionals.csv")
    pmax: float = Field(0.35, gt=0, le=1)
    pmin: float = Field(0.0, ge=0, lt=1)
    pmin_high_income: float = Field(0.15, ge=0, lt=1)
    very_important_share: float = Field(0.3, ge=0, le=1)
    workplace_decay_km: float = Field(5.0, gt=0)
    area_cv: float = Field(0.15, ge=0)
    area_floor_m2: float = Field(20.0, gt=0)
    income_breaks: List[float] = Field(default_factory=lambda: [7.5, 30.0])
    pooling: Literal["mean"] = "mean"
    pooling_rows: List[Literal["size", "income", "cars"]] = Field(
        default_factory=lambda: ["size", "income", "cars"]
    )
    age_bounds: Dict[str, List[int]] = Field(
        default_factory=lambda: {
            "age_0_5": [0, 5],
            "age_6_18": [6, 18],
            "age_19_64": [19, 64],
            "age_65_plus": [65, 90],
        }
    )

    @field_validator("income_breaks")
    @classmethod
    def _check_breaks(cls, value: List[float]) -> List[float]:
        if len(value) != 2 or not 0 < value[0] < value[1]:
            raise ValueError("income_breaks 需要两个递增的正数")
        return value

    @field_validator("pooling_rows")
    @classmethod
    def _check_rows(cls, value: List[str]) -> List[str]:
        if not value or len(set(value)) != len(value):
            raise ValueError("pooling_rows 不能为空且不能重复")
        return value

    @model_validator(mode="after")
    def _check_band(self) -> "SynthesisSettings":
        if max(self.pmin, self.pmin_high_income) >= self.pmax:
            raise ValueError("租金区间下限必须小于上限 pmax")
        return self


class NSGA2Settings(_Section):
    """NSGA-II 参数"""
    pop_size: int = Field(40, ge=2)
    generations: int = Field(50, ge=1)
    crossover_rate: float = Field(0.9, ge=0, le=1)
    mutation_rate: Optional[float] = Field(None, ge=0, le=1)  # None -> 1/基因位数
    k: int = Field(10, ge=1)
    dedupe_survivors: bool = False              # True: 环境选择时重复小区排在所有不同小区之后
    oracle_guard: int = Field(5000, ge=1)


class MarketSettings(_Section):
    """租赁市场配置"""
    alpha: List[float] = Field(default_factory=lambda: [1.0] * 12)
    carry_forward_limit: int = Field(1, ge=0)
    count_carried_in_demand: bool = True
    singles_rule: Literal["last", "by_size"] = "last"

    @field_validator("alpha")
    @classmethod
    def _check_alpha(cls, value: List[float]) -> List[float]:
        if len(value) != 12:
            raise ValueError("alpha 需要12个月的取值")
        if any(a <= 0 for a in value):
            raise ValueError("alpha 必须全部为正")
        return value


class ProcessingSettings(_Section):
    """并行处理配置, 只影响速度"""
    workers: int = Field(1, ge=1)
    batch_size: int = Field(64, ge=1)


class RunConfig(BaseSettings):
    """运行主配置, 不读取环境变量"""

    seed: int = Field(..., ge=0, le=U64_MAX)
    output_dir: str = "./out"

    city: CitySettings = Field(default_factory=CitySettings)
    synthetic_city: SyntheticCitySettings = Field(default_factory=SyntheticCitySettings)
    synthesis: SynthesisSettings = Field(default_factory=SynthesisSettings)
    nsga2: NSGA2Settings = Field(default_factory=NSGA2Settings)
    market: MarketSettings = Field(default_factory=MarketSettings)
    processing: ProcessingSettings = Field(default_factory=ProcessingSettings)

    model_config = SettingsConfigDict(extra="forbid", case_sensitive=True)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # 所有状态只来自配置文件和命令行
        return (init_settings,)

    def to_yaml(self) -> str:
        """导出生效配置; 输出目录与进程数不影响结果, 不写入"""
        data = self.model_dump(mode="json", exclude={"output_dir": True, "processing": {"workers": True}})
        return yaml.safe_dump(data, sort_keys=False, allow_unicode=True)


def _deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_config(raw: Optional[Dict[str, Any]] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """由字典构造配置, 校验失败抛出 ConfigError"""
    data = _deep_merge(raw or {}, overrides or {})
    try:
        return RunConfig(**data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"配置校验失败: {details}") from e


def load_config_from_yaml(config_path: Optional[str] = None,
                          overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """从YAML文件加载配置, 命令行覆盖项优先"""
    raw: Dict[str, Any] = {}
    if config_path is not None:
        config_file = Path(config_path)
        if not config_file.exists():
            raise ConfigError(f"配置文件不存在: {config_path}")
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"YAML解析错误: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"配置文件顶层必须是映射: {config_path}")
        logger.info(f"成功加载配置文件: {config_path}")

    return build_config(raw, overrides)
