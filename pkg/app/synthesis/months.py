"""搬迁月份分配"""
import logging
from typing import List, Sequence

import numpy as np

from ..models.agent import HouseholdAgent
from ..utils.errors import InputValidationError
from .priors import validate_probabilities

logger = logging.getLogger(__name__)


def assign_months(agents: List[HouseholdAgent], month_shares: Sequence[float],
                  rng: np.random.Generator) -> np.ndarray:
    """按月份占比独立抽取, 按agent编号顺序写回"""
    shares = np.asarray(month_shares, dtype=float)
    if shares.shape != (12,):
        raise InputValidationError(f"月份占比需要12个值, 实际 {shares.size}")
    validate_probabilities(shares, "month shares")

    ordered = sorted(agents, key=lambda a: a.id)
    months = rng.choice(12, size=len(ordered), p=shares) + 1
    for agent, month in zip(ordered, months):
        agent.relocation_month = int(month)
    logger.info(f"搬迁月份分配完成: {len(ordered)} 个agent")
    return months
