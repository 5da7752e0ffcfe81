"""租户居住选址微观仿真 - 命令行入口"""
import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .analytics.experiments import k_sensitivity, repeatability, simulate
from .analytics.reports import distribution_report
from .analytics.validation import validation_report
from .choice.choice_processor import choose_alternatives
from .config.settings import RunConfig, load_config_from_yaml
from .io.ingest import ingest_city, read_observed
from .io.persistence import (
    read_agents,
    read_alternatives,
    read_outcome,
    write_agents,
    write_alternatives,
    write_csv,
    write_outcome,
    write_tables,
    write_validation,
)
from .io.synthetic import synth_city
from .market.simulation import run_simulation
from .models.agent import HouseholdAgent, ZoneStats
from .models.choice import AlternativeSet
from .models.city import City
from .synthesis.pipeline import synthesize_population
from .synthesis.priors import load_zone_stats
from .utils.errors import ConfigError, InputValidationError, SimulationError
from .utils.rng import U64_MAX

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


# ---- 参数解析 ----
def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"种子必须是整数: {text}")
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"种子超出64位无符号整数范围: {text}")
    return value


def _int_list(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"需要逗号分隔的整数: {text}")
    if not values:
        raise argparse.ArgumentTypeError("列表不能为空")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML配置文件")
    common.add_argument("--seed", type=_seed, help="主随机种子 (覆盖配置文件)")
    common.add_argument("--out", help="输出目录 (覆盖配置文件)")
    common.add_argument("--workers", type=int, help="备选搜索进程数, 只影响速度")
    common.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="日志级别")

    parser = argparse.ArgumentParser(prog="tenant-sim", description="租户居住选址微观仿真")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth-city", parents=[common], help="生成合成城市CSV")
    sub.add_parser("gen-agents", parents=[common], help="生成agent并写出 agents.csv")
    sub.add_parser("choose", parents=[common], help="只生成备选方案 alternatives.csv")
    run = sub.add_parser("run", parents=[common], help="完整流程: agent -> 备选 -> 市场 -> 报告")
    run.add_argument("--reuse-alternatives", action="store_true", help="使用输出目录中已有的 agents/alternatives")
    run.add_argument("--observed", help="实际居住记录, 提供时同时输出验证指标")
    validate = sub.add_parser("validate", parents=[common], help="与实际居住记录对比")
    validate.add_argument("--observed", required=True, help="实际居住记录CSV")
    sub.add_parser("report", parents=[common], help="根据已有仿真结果生成报告")
    sweep = sub.add_parser("sweep-k", parents=[common], help="备选数量K敏感性分析")
    sweep.add_argument("--observed", required=True, help="实际居住记录CSV")
    sweep.add_argument("--k-values", type=_int_list, default=list(range(1, 16)), help="逗号分隔的K值")
    repeat = sub.add_parser("repeat", parents=[common], help="多种子可重复性实验")
    repeat.add_argument("--seeds", type=_int_list, default=[1, 2, 3, 4, 5], help="逗号分隔的种子")
    return parser


# ---- 公共步骤 ----
def load_run_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.workers is not None:
        overrides["processing"] = {"workers": args.workers}
    return load_config_from_yaml(args.config, overrides)


def output_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective_config.yaml").write_text(config.to_yaml(), encoding="utf-8")
    return out


def load_city(config: RunConfig) -> Tuple[City, ZoneStats]:
    """配置了小区文件时导入, 否则按主种子生成合成城市"""
    if config.city.zones_path is not None:
        if config.synthesis.zone_stats_path is None:
            raise ConfigError("导入城市数据时必须提供 synthesis.zone_stats_path")
        city = ingest_city(config.city.zones_path, config.city.facilities_path,
                           config.city.adjacency_path, config.city)
        return city, load_zone_stats(config.synthesis.zone_stats_path)

    city, zone_stats = synth_city(config.synthetic_city, config.seed, config.city)
    if config.synthesis.zone_stats_path is not None:
        zone_stats = load_zone_stats(config.synthesis.zone_stats_path)
    return city, zone_stats


def generate_agents(config: RunConfig, out: Path, city: City, zone_stats: ZoneStats) -> List[HouseholdAgent]:
    agents = synthesize_population(zone_stats, city, config.synthesis, config.seed)
    write_agents(agents, out / "agents.csv")
    return agents


def existing_or_new_agents(config: RunConfig, out: Path, city: City, zone_stats: ZoneStats) -> List[HouseholdAgent]:
    if (out / "agents.csv").exists():
        logger.info(f"使用已有的agent文件: {out / 'agents.csv'}")
        return read_agents(out / "agents.csv")
    return generate_agents(config, out, city, zone_stats)


def check_agents_in_city(agents: Sequence[HouseholdAgent], city: City) -> None:
    issues = []
    for a in agents:
        for zone in [a.former_zone, *a.workplaces]:
            if zone not in city.index:
                issues.append((a.id, "zone", f"agent {a.id} 引用了不存在的小区 {zone}"))
    if issues:
        raise InputValidationError(f"agent与城市不匹配, 共 {len(issues)} 项", issues[:50])


def compute_alternatives(config: RunConfig, out: Path, agents: List[HouseholdAgent],
                         city: City) -> Dict[int, AlternativeSet]:
    sets = choose_alternatives(agents, city, config.nsga2, config.seed, config.processing)
    write_alternatives(sets, out / "alternatives.csv")
    return {alt.agent_id: alt for alt in sets}


def write_reports(config: RunConfig, out: Path, outcome, agents, alternatives, city: City) -> None:
    write_tables(distribution_report(outcome, agents, alternatives, city, config.nsga2.k), out)


# ---- 子命令 ----
def cmd_synth_city(config: RunConfig) -> None:
    out = output_dir(config)
    synth_city(config.synthetic_city, config.seed, config.city, out_dir=out)


def cmd_gen_agents(config: RunConfig) -> None:
    out = output_dir(config)
    city, zone_stats = load_city(config)
    generate_agents(config, out, city, zone_stats)


def cmd_choose(config: RunConfig) -> None:
    out = output_dir(config)
    city, zone_stats = load_city(config)
    agents = existing_or_new_agents(config, out, city, zone_stats)
    check_agents_in_city(agents, city)
    compute_alternatives(config, out, agents, city)


def cmd_run(config: RunConfig, reuse_alternatives: bool, observed_path: Optional[str]) -> None:
    out = output_dir(config)
    city, zone_stats = load_city(config)
    if reuse_alternatives:
        agents = read_agents(out / "agents.csv")
        check_agents_in_city(agents, city)
        alternatives = read_alternatives(out / "alternatives.csv", [a.id for a in agents])
        logger.info(f"复用已有备选方案: {len(alternatives)} 个agent")
        outcome = run_simulation(agents, city, config.market, alternatives, config.seed)
    else:
        agents = generate_agents(config, out, city, zone_stats)
        alternatives, outcome = simulate(agents, city, config, config.seed)
        write_alternatives(alternatives.values(), out / "alternatives.csv")

    write_outcome(outcome, alternatives, out)
    write_reports(config, out, outcome, agents, alternatives, city)
    if observed_path is not None:
        write_validation(validation_report(outcome, read_observed(observed_path), alternatives, city), out)


def cmd_validate(config: RunConfig, observed_path: str) -> None:
    out = output_dir(config)
    city, _ = load_city(config)
    outcome = read_outcome(out)
    alternatives = read_alternatives(out / "alternatives.csv", outcome.outcomes.keys())
    write_validation(validation_report(outcome, read_observed(observed_path), alternatives, city), out)


def cmd_report(config: RunConfig) -> None:
    out = output_dir(config)
    city, _ = load_city(config)
    agents = read_agents(out / "agents.csv")
    outcome = read_outcome(out)
    alternatives = read_alternatives(out / "alternatives.csv", [a.id for a in agents])
    write_reports(config, out, outcome, agents, alternatives, city)


def cmd_sweep_k(config: RunConfig, observed_path: str, k_values: List[int]) -> None:
    out = output_dir(config)
    city, zone_stats = load_city(config)
    agents = existing_or_new_agents(config, out, city, zone_stats)
    table = k_sensitivity(agents, city, read_observed(observed_path), k_values, config)
    write_csv(table, out / "k_sensitivity.csv")


def cmd_repeat(config: RunConfig, seeds: List[int]) -> None:
    out = output_dir(config)
    city, zone_stats = load_city(config)
    write_csv(repeatability(zone_stats, city, config, seeds), out / "repeatability.csv")


def _error_line(error: Exception) -> str:
    payload = {
        "status": "error",
        "type": type(error).__name__,
        "message": str(error),
        "issues": error.to_dict()["issues"] if isinstance(error, InputValidationError) else [],
    }
    return json.dumps(payload, ensure_ascii=False)


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """解析参数并执行子命令, 返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)    # 用法错误时以2退出

    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, args.log_level))

    start_time = time.time()
    try:
        config = load_run_config(args)
        logger.info(f"开始执行 {args.command}: seed={config.seed}, out={config.output_dir}")
        if args.command == "synth-city":
            cmd_synth_city(config)
        elif args.command == "gen-agents":
            cmd_gen_agents(config)
        elif args.command == "choose":
            cmd_choose(config)
        elif args.command == "run":
            cmd_run(config, args.reuse_alternatives, args.observed)
        elif args.command == "validate":
            cmd_validate(config, args.observed)
        elif args.command == "report":
            cmd_report(config)
        elif args.command == "sweep-k":
            cmd_sweep_k(config, args.observed, args.k_values)
        elif args.command == "repeat":
            cmd_repeat(config, args.seeds)
    except SimulationError as e:
        logger.error(f"{args.command} 失败: {e}")
        print(_error_line(e), file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception(f"{args.command} 出现未预期的错误")
        print(_error_line(e), file=sys.stderr)
        return 1

    logger.info(f"{args.command} 完成, 耗时: {time.time() - start_time:.2f}秒")
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
