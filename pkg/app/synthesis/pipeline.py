"""人口合成流水线: 属性 -> 工作地 -> 偏好 -> 月份"""
import logging
import time
from typing import List

from ..config.settings import SynthesisSettings
from ..models.agent import HouseholdAgent, ZoneStats
from ..models.city import City
from ..utils.errors import InputValidationError
from ..utils.rng import RNGManager
from .months import assign_months
from .population import PopulationSynthesizer
from .preferences import sample_preferences
from .priors import load_conditionals, load_month_shares, load_survey_priors
from .workplaces import allocate_workplaces

logger = logging.getLogger(__name__)


def synthesize_population(zone_stats: ZoneStats, city: City, settings: SynthesisSettings,
                          seed: int) -> List[HouseholdAgent]:
    """完整生成agent集合"""
    start_time = time.time()
    unknown = [z for z in zone_stats.zone_ids if z not in city.index]
    if unknown:
        raise InputValidationError(f"zone_stats 引用了城市中不存在的小区: {unknown[:10]}")

    priors = load_survey_priors(settings.survey_priors_path)
    conditionals = load_conditionals(settings.conditionals_path)
    month_shares = load_month_shares(settings.month_shares_path)

    synthesizer = PopulationSynthesizer(priors, conditionals, settings)
    agents = synthesizer.generate_agents(zone_stats, settings.n_agents, seed)

    manager = RNGManager(seed)
    allocate_workplaces(agents, city, manager.generator("workplaces"), settings.workplace_decay_km)
    for agent in agents:
        agent.profile = sample_preferences(agent, priors, manager.generator(f"preferences:{agent.id}"), settings)
    assign_months(agents, month_shares, manager.generator("months"))

    logger.info(f"人口合成完成: {len(agents)} 个agent, 耗时: {time.time() - start_time:.2f}秒")
    return agents
