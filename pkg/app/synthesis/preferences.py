"""居住偏好抽样"""
from typing import Dict, List, Tuple

import numpy as np

from ..config.settings import SynthesisSettings
from ..models.agent import (
    FACILITY_CRITERIA,
    TRANSIT_CRITERIA,
    Criterion,
    HouseholdAgent,
    Importance,
    PreferenceProfile,
)
from .priors import SurveyPriors, cars_class, income_class, size_class


def category_rows(agent: HouseholdAgent, settings: SynthesisSettings) -> List[Tuple[str, str]]:
    """agent在先验表中对应的类别行"""
    lookup = {
        "size": ("size", size_class(agent.size)),
        "income": ("income", income_class(agent.income, settings.income_breaks)),
        "cars": ("cars", cars_class(agent.cars)),
    }
    return [lookup[name] for name in settings.pooling_rows]


def _uniform(flags: Dict[str, bool]) -> Dict[str, float]:
    n = sum(flags.values())
    return {key: (1.0 / n if flagged and n else 0.0) for key, flagged in flags.items()}


def sample_preferences(agent: HouseholdAgent, priors: SurveyPriors, rng: np.random.Generator,
                       settings: SynthesisSettings = None) -> PreferenceProfile:
    """每项准则按类别行百分比均值决定是否标记, 标记者按比例升级为非常重要"""
    settings = settings or SynthesisSettings()
    rows = category_rows(agent, settings)

    levels: Dict[Criterion, Importance] = {}
    for criterion in Criterion:
        probability = priors.flag_probability(criterion, rows)
        flagged = criterion is Criterion.RENT or rng.random() < probability
        if not flagged:
            levels[criterion] = Importance.NOT_IMPORTANT
            continue
        upgrade = rng.random() < settings.very_important_share
        levels[criterion] = Importance.VERY_IMPORTANT if upgrade else Importance.IMPORTANT

    facility = _uniform({c.value: levels[c].flagged for c in FACILITY_CRITERIA})
    transit = _uniform({c.value: levels[c].flagged for c in TRANSIT_CRITERIA})
    return PreferenceProfile(levels=levels, facility_weights=facility, transit_weights=transit)
