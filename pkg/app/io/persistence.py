"""结果文件读写 - 固定列顺序, 逐字节可复现"""
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence

import pandas as pd

from ..models.agent import (
    FACILITY_CRITERIA,
    TRANSIT_CRITERIA,
    Criterion,
    HouseholdAgent,
    Importance,
    PreferenceProfile,
)
from ..models.analytics import ValidationReport
from ..models.choice import AlternativeSet
from ..models.market import AgentOutcome, CompetitionEvent, HousingStatus, SimulationOutcome
from ..utils.errors import InputValidationError

logger = logging.getLogger(__name__)

LIST_SEP = ";"

AGENT_COLUMNS = [
    "agent_id", "size", "ages", "income", "cars", "employees", "students", "has_child",
    "required_area", "former_zone", "workplaces", "relocation_month", "pmin", "pmax",
    *[f"pref_{c.value}" for c in Criterion],
    *[f"w_{c.value}" for c in FACILITY_CRITERIA],
    *[f"w_{c.value}" for c in TRANSIT_CRITERIA],
]
ALTERNATIVE_COLUMNS = ["agent_id", "position", "zone_id", "front_rank"]
ASSIGNMENT_COLUMNS = ["agent_id", "status", "zone_id", "month", "alternative_rank", "carried", "n_alternatives"]
CAPACITY_COLUMNS = ["month", "zone_id", "capacity", "housed"]


def write_csv(df: pd.DataFrame, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")


def read_csv(path) -> pd.DataFrame:
    file = Path(path)
    if not file.exists():
        raise InputValidationError(f"文件不存在: {path}")
    return pd.read_csv(file, float_precision="round_trip")


def _join(values: Iterable[int]) -> str:
    return LIST_SEP.join(str(v) for v in values)


def _split(text) -> List[int]:
    if pd.isna(text) or str(text).strip() == "":
        return []
    return [int(v) for v in str(text).split(LIST_SEP)]


# ---- agents.csv ----
def agents_frame(agents: Sequence[HouseholdAgent]) -> pd.DataFrame:
    rows = []
    for a in sorted(agents, key=lambda a: a.id):
        row = {
            "agent_id": a.id,
            "size": a.size,
            "ages": _join(a.ages),
            "income": a.income,
            "cars": a.cars,
            "employees": a.employees,
            "students": a.students,
            "has_child": int(a.has_child),
            "required_area": a.required_area,
            "former_zone": a.former_zone,
            "workplaces": _join(a.workplaces),
            "relocation_month": a.relocation_month,
            "pmin": a.rent_band[0],
            "pmax": a.rent_band[1],
        }
        for c in Criterion:
            row[f"pref_{c.value}"] = a.profile.level(c).value
        for c in FACILITY_CRITERIA:
            row[f"w_{c.value}"] = a.profile.facility_weights.get(c.value, 0.0)
        for c in TRANSIT_CRITERIA:
            row[f"w_{c.value}"] = a.profile.transit_weights.get(c.value, 0.0)
        rows.append(row)
    return pd.DataFrame(rows, columns=AGENT_COLUMNS)


def write_agents(agents: Sequence[HouseholdAgent], path) -> None:
    write_csv(agents_frame(agents), path)
    logger.info(f"写出 {len(agents)} 个agent: {path}")


def read_agents(path) -> List[HouseholdAgent]:
    df = read_csv(path)
    missing = [c for c in AGENT_COLUMNS if c not in df.columns]
    if missing:
        raise InputValidationError(f"agents文件缺少列: {', '.join(missing)}",
                                   [(None, c, "缺少必需列") for c in missing])
    # 月份越界的行在构造任何agent之前报告
    months = pd.to_numeric(df["relocation_month"], errors="coerce")
    bad = ~months.between(1, 12)
    if bad.any():
        issues = [(int(i) + 2, "relocation_month", f"搬迁月份必须在1..12之间: {df.at[i, 'relocation_month']}")
                  for i in df.index[bad]]
        raise InputValidationError(f"{Path(path).name} 校验失败, 共 {len(issues)} 项", issues)
    agents = []
    for r in df.to_dict(orient="records"):
        profile = PreferenceProfile(
            levels={c: Importance(int(r[f"pref_{c.value}"])) for c in Criterion},
            facility_weights={c.value: float(r[f"w_{c.value}"]) for c in FACILITY_CRITERIA},
            transit_weights={c.value: float(r[f"w_{c.value}"]) for c in TRANSIT_CRITERIA},
        )
        agents.append(HouseholdAgent(
            id=int(r["agent_id"]),
            size=int(r["size"]),
            ages=_split(r["ages"]),
            income=float(r["income"]),
            cars=int(r["cars"]),
            employees=int(r["employees"]),
            students=int(r["students"]),
            has_child=bool(int(r["has_child"])),
            required_area=float(r["required_area"]),
            former_zone=int(r["former_zone"]),
            workplaces=_split(r["workplaces"]),
            relocation_month=int(r["relocation_month"]),
            rent_band=(float(r["pmin"]), float(r["pmax"])),
            profile=profile,
        ))
    return agents


# ---- alternatives.csv ----
def write_alternatives(alternatives: Iterable[AlternativeSet], path) -> None:
    rows = [
        (alt.agent_id, position, zone, rank)
        for alt in sorted(alternatives, key=lambda a: a.agent_id)
        for position, (zone, rank) in enumerate(zip(alt.zones, alt.front_ranks), start=1)
    ]
    write_csv(pd.DataFrame(rows, columns=ALTERNATIVE_COLUMNS), path)


def read_alternatives(path, agent_ids: Iterable[int]) -> Dict[int, AlternativeSet]:
    """没有任何行的agent得到空集合"""
    df = read_csv(path).sort_values(["agent_id", "position"])
    result = {agent_id: AlternativeSet(agent_id) for agent_id in sorted(agent_ids)}
    for r in df.itertuples(index=False):
        agent_id = int(r.agent_id)
        if agent_id not in result:
            raise InputValidationError(f"alternatives 引用了不存在的agent: {agent_id}")
        result[agent_id].zones.append(int(r.zone_id))
        result[agent_id].front_ranks.append(int(r.front_rank))
    return result


# ---- assignments.csv / events.jsonl / capacity.csv ----
def write_outcome(outcome: SimulationOutcome, alternatives: Mapping[int, AlternativeSet], out_dir) -> None:
    out = Path(out_dir)
    rows = []
    for agent_id in sorted(outcome.outcomes):
        o = outcome.outcomes[agent_id]
        rows.append({
            "agent_id": agent_id,
            "status": o.status.value,
            "zone_id": o.zone,
            "month": o.month,
            "alternative_rank": o.alternative_rank,
            "carried": int(o.carried),
            "n_alternatives": len(alternatives[agent_id]) if agent_id in alternatives else 0,
        })
    df = pd.DataFrame(rows, columns=ASSIGNMENT_COLUMNS).astype(
        {"zone_id": "Int64", "month": "Int64", "alternative_rank": "Int64"}
    )
    write_csv(df, out / "assignments.csv")

    with open(out / "events.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for event in outcome.events:
            f.write(json.dumps(event.to_record()) + "\n")

    write_csv(pd.DataFrame(outcome.capacity_log, columns=CAPACITY_COLUMNS), out / "capacity.csv")
    logger.info(f"写出仿真结果: {len(rows)} 条安置记录, {len(outcome.events)} 条竞争事件")


def read_events(path) -> List[CompetitionEvent]:
    file = Path(path)
    if not file.exists():
        raise InputValidationError(f"文件不存在: {path}")
    events = []
    with open(file, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                events.append(CompetitionEvent(**json.loads(line)))
    return events


def read_outcome(out_dir) -> SimulationOutcome:
    out = Path(out_dir)
    df = read_csv(out / "assignments.csv")
    outcomes: Dict[int, AgentOutcome] = {}
    for r in df.to_dict(orient="records"):
        status = HousingStatus(r["status"])
        housed = status is HousingStatus.HOUSED
        outcomes[int(r["agent_id"])] = AgentOutcome(
            agent_id=int(r["agent_id"]),
            status=status,
            zone=int(r["zone_id"]) if housed else None,
            month=int(r["month"]) if housed else None,
            alternative_rank=int(r["alternative_rank"]) if housed else None,
            carried=bool(int(r["carried"])),
        )
    capacity = read_csv(out / "capacity.csv")
    return SimulationOutcome(
        outcomes=outcomes,
        events=read_events(out / "events.jsonl"),
        capacity_log=[tuple(int(v) for v in row) for row in capacity[CAPACITY_COLUMNS].itertuples(index=False)],
    )


# ---- 报告 ----
def write_validation(report: ValidationReport, out_dir) -> None:
    out = Path(out_dir)
    write_csv(pd.DataFrame(report.rows(), columns=["metric", "value"]), out / "validation.csv")
    write_csv(pd.DataFrame(report.distance_bands, columns=["band", "agents"]), out / "validation_distance.csv")
    write_csv(pd.DataFrame(report.rent_distribution, columns=["rent_band", "actual", "simulated"]),
              out / "validation_rent.csv")


def write_tables(tables: Mapping[str, pd.DataFrame], out_dir) -> None:
    out = Path(out_dir)
    for name, df in tables.items():
        write_csv(df, out / f"{name}.csv")
    logger.info(f"写出 {len(tables)} 张报告表: {out}")
