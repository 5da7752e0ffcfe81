"""先验表加载: 偏好调查汇总、月份分布、条件分布、小区目标"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from ..models.agent import Criterion, ZoneStats
from ..utils.errors import InputValidationError

logger = logging.getLogger(__name__)

PROB_TOL = 1e-9
SIZE_CLASSES = ("single", "couple", "3_4", "5_plus")
INCOME_CLASSES = ("low", "middle", "high")
CAR_CLASSES = ("0", "1", "2_plus")


def size_class(size: int) -> str:
    if size <= 1:
        return "single"
    if size == 2:
        return "couple"
    if size <= 4:
        return "3_4"
    return "5_plus"


def cars_class(cars: int) -> str:
    if cars <= 0:
        return "0"
    if cars == 1:
        return "1"
    return "2_plus"


def income_class(income: float, breaks) -> str:
    low, high = breaks
    if income < low:
        return "low"
    if income <= high:
        return "middle"
    return "high"


@dataclass(frozen=True)
class SurveyPriors:
    """各类别的准则标记百分比与平均居住面积"""
    percentages: Dict[Tuple[str, str], Dict[Criterion, float]]   # (attribute, category) -> 准则 -> 概率
    mean_area: Dict[str, float]                                   # size_class -> m²

    def flag_probability(self, criterion: Criterion, rows) -> float:
        """rows 为 [(attribute, category), ...], 取算术平均"""
        values = [self.percentages[row][criterion] for row in rows]
        return float(np.mean(values))


@dataclass(frozen=True)
class ConditionalTables:
    """(size_class, income_class) -> 取值概率"""
    cars: Dict[Tuple[str, str], np.ndarray]
    employees: Dict[Tuple[str, str], np.ndarray]


def _read(path) -> pd.DataFrame:
    file = Path(path)
    if not file.exists():
        raise InputValidationError(f"文件不存在: {path}")
    return pd.read_csv(file, comment="#", float_precision="round_trip",
                       dtype={"category": str, "size_class": str, "income_class": str})


def _require_columns(df: pd.DataFrame, columns, path) -> None:
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise InputValidationError(
            f"{path} 缺少列: {', '.join(missing)}",
            [(None, c, "缺少必需列") for c in missing],
        )


def load_survey_priors(path) -> SurveyPriors:
    df = _read(path)
    criteria_cols = [c.value for c in Criterion]
    _require_columns(df, ["attribute", "category", "mean_area_m2", *criteria_cols], path)

    issues = []
    percentages = {}
    mean_area = {}
    for row_no, row in enumerate(df.itertuples(index=False), start=2):
        record = row._asdict()
        key = (str(record["attribute"]), str(record["category"]))
        values = {}
        for c in Criterion:
            pct = float(record[c.value])
            if not 0.0 <= pct <= 100.0:
                issues.append((row_no, c.value, f"百分比超出[0,100]: {pct}"))
            values[c] = pct / 100.0
        if values[Criterion.RENT] != 1.0:
            issues.append((row_no, "rent", "租金准则必须为100%"))
        percentages[key] = values
        if key[0] == "size":
            mean_area[key[1]] = float(record["mean_area_m2"])
    if issues:
        raise InputValidationError(f"{path} 校验失败", issues)

    expected = [("size", s) for s in SIZE_CLASSES] + [("income", s) for s in INCOME_CLASSES] + \
        [("cars", s) for s in CAR_CLASSES]
    missing_rows = [f"{a}={c}" for a, c in expected if (a, c) not in percentages]
    if missing_rows:
        raise InputValidationError(f"{path} 缺少类别行: {', '.join(missing_rows)}")
    return SurveyPriors(percentages=percentages, mean_area=mean_area)


def load_month_shares(path) -> np.ndarray:
    df = _read(path)
    _require_columns(df, ["month", "share"], path)
    df = df.sort_values("month")
    if df["month"].tolist() != list(range(1, 13)):
        raise InputValidationError(f"{path} 需要月份 1..12 各一行")
    shares = df["share"].to_numpy(dtype=float)
    validate_probabilities(shares, "month shares")
    return shares


def validate_probabilities(values: np.ndarray, name: str) -> None:
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise InputValidationError(f"{name} 存在负数或非有限值")
    if abs(values.sum() - 1.0) > PROB_TOL:
        raise InputValidationError(f"{name} 之和必须为1, 实际为 {values.sum():.12f}")


def load_conditionals(path) -> ConditionalTables:
    df = _read(path)
    value_cols = [c for c in df.columns if c.startswith("v")]
    _require_columns(df, ["attribute", "size_class", "income_class"], path)
    tables: Dict[str, Dict[Tuple[str, str], np.ndarray]] = {"cars": {}, "employees": {}}
    for row_no, row in enumerate(df.itertuples(index=False), start=2):
        record = row._asdict()
        attribute = record["attribute"]
        if attribute not in tables:
            raise InputValidationError(f"{path} 第{row_no}行: 未知属性 {attribute}",
                                       [(row_no, "attribute", "未知属性")])
        probs = np.array([float(record[c]) for c in value_cols])
        validate_probabilities(probs, f"{path} 第{row_no}行")
        tables[attribute][(record["size_class"], record["income_class"])] = probs
    for attribute, table in tables.items():
        for s in SIZE_CLASSES:
            for i in INCOME_CLASSES:
                if (s, i) not in table:
                    raise InputValidationError(f"{path} 缺少 {attribute} 条件分布: ({s}, {i})")
    return ConditionalTables(cars=tables["cars"], employees=tables["employees"])


SIZE_COLUMNS = tuple(f"size_{i}" for i in range(1, 7))


def load_zone_stats(path) -> ZoneStats:
    df = _read(path)
    required = ["zone_id", "households", "income_mean", "income_std", *SIZE_COLUMNS, *ZoneStats.AGE_GROUPS]
    _require_columns(df, required, path)
    df = df.sort_values("zone_id").reset_index(drop=True)
    return zone_stats_from_frame(df, source=str(path))


def zone_stats_from_frame(df: pd.DataFrame, source: str = "zone_stats") -> ZoneStats:
    issues = []
    sizes = df[list(SIZE_COLUMNS)].to_numpy(dtype=float)
    ages = df[list(ZoneStats.AGE_GROUPS)].to_numpy(dtype=float)
    for i in range(len(df)):
        row_no = i + 2
        if abs(sizes[i].sum() - 1.0) > PROB_TOL or np.any(sizes[i] < 0):
            issues.append((row_no, "size_*", f"家庭规模分布之和必须为1: {sizes[i].sum():.12f}"))
        if abs(ages[i].sum() - 1.0) > PROB_TOL or np.any(ages[i] < 0):
            issues.append((row_no, "age_*", f"年龄组占比之和必须为1: {ages[i].sum():.12f}"))
        if ages[i][2:].sum() <= 0:
            issues.append((row_no, "age_*", "成年人年龄组占比不能全为0"))
        if df["income_std"].iloc[i] < 0:
            issues.append((row_no, "income_std", "标准差不能为负"))
        if not df["income_mean"].iloc[i] > 0:
            issues.append((row_no, "income_mean", "平均收入必须为正"))
        if df["households"].iloc[i] < 0:
            issues.append((row_no, "households", "家庭权重不能为负"))
    if issues:
        raise InputValidationError(f"{source} 校验失败, 共 {len(issues)} 项", issues)
    return ZoneStats(
        zone_ids=tuple(int(z) for z in df["zone_id"]),
        households=df["households"].to_numpy(dtype=float),
        income_mean=df["income_mean"].to_numpy(dtype=float),
        income_std=df["income_std"].to_numpy(dtype=float),
        size_probs=sizes,
        age_shares=ages,
    )
