"""agent生成 - 顺序蒙特卡洛"""
import logging
import time
from typing import List, Optional

import numpy as np
from scipy.stats import truncnorm

from ..config.settings import SynthesisSettings
from ..models.agent import HouseholdAgent, ZoneStats
from ..utils.apportion import largest_remainder
from ..utils.errors import InputValidationError
from ..utils.rng import RNGManager
from .priors import ConditionalTables, SurveyPriors, income_class, size_class

logger = logging.getLogger(__name__)


def lognormal_params(mean: float, std: float):
    """按目标均值/标准差求对数正态参数 (mu, sigma)"""
    sigma2 = np.log1p((std / mean) ** 2)
    return np.log(mean) - sigma2 / 2.0, np.sqrt(sigma2)


def sample_incomes(rng: np.random.Generator, mean: float, std: float, n: int) -> np.ndarray:
    if std == 0:
        return np.full(n, float(mean))
    mu, sigma = lognormal_params(mean, std)
    return rng.lognormal(mu, sigma, size=n)


def sample_required_area(rng: np.random.Generator, mean: float, cv: float, floor: float) -> float:
    """以类别均值为中心的截断正态"""
    if cv == 0:
        return max(float(mean), floor)
    scale = cv * mean
    a = (floor - mean) / scale
    return float(truncnorm.rvs(a, np.inf, loc=mean, scale=scale, random_state=rng))


class PopulationSynthesizer:
    """按小区顺序生成家庭, 每个小区独立随机子流"""

    def __init__(self,
                 priors: SurveyPriors,
                 conditionals: ConditionalTables,
                 settings: Optional[SynthesisSettings] = None):
        self.priors = priors
        self.conditionals = conditionals
        self.settings = settings or SynthesisSettings()
        self._age_bounds = [self.settings.age_bounds[g] for g in ZoneStats.AGE_GROUPS]

    def agent_counts(self, zone_stats: ZoneStats, n_agents: int) -> np.ndarray:
        """按家庭权重分配各小区agent数"""
        if n_agents < 1:
            raise InputValidationError(f"agent数量必须 ≥ 1: {n_agents}")
        if zone_stats.households.sum() <= 0:
            raise InputValidationError("所有小区家庭权重为0")
        return largest_remainder(zone_stats.households, n_agents)

    def generate_agents(self, zone_stats: ZoneStats, n_agents: int, seed: int) -> List[HouseholdAgent]:
        """生成agent (不含工作地、偏好和搬迁月份)"""
        start_time = time.time()
        counts = self.agent_counts(zone_stats, n_agents)
        manager = RNGManager(seed)

        agents: List[HouseholdAgent] = []
        next_id = 1
        for z, zone_id in enumerate(zone_stats.zone_ids):
            n = int(counts[z])
            if n == 0:
                continue
            rng = manager.generator(f"zone:{zone_id}")
            agents.extend(self._generate_zone(rng, zone_stats, z, zone_id, n, next_id))
            next_id += n

        logger.info(f"生成 {len(agents)} 个agent, 覆盖 {int((counts > 0).sum())} 个小区, "
                    f"耗时: {time.time() - start_time:.2f}秒")
        return agents

    def generate_zone(self, zone_stats: ZoneStats, zone_id: int, n: int, first_id: int,
                      seed: int) -> List[HouseholdAgent]:
        """单独生成一个小区, 与整体生成结果一致"""
        z = zone_stats.zone_ids.index(zone_id)
        rng = RNGManager(seed).generator(f"zone:{zone_id}")
        return self._generate_zone(rng, zone_stats, z, zone_id, n, first_id)

    def _generate_zone(self, rng: np.random.Generator, zone_stats: ZoneStats, z: int,
                       zone_id: int, n: int, first_id: int) -> List[HouseholdAgent]:
        cfg = self.settings
        # 1. 家庭规模、成员年龄、收入
        sizes = rng.choice(6, size=n, p=zone_stats.size_probs[z]) + 1
        incomes = sample_incomes(rng, zone_stats.income_mean[z], zone_stats.income_std[z], n)
        age_shares = zone_stats.age_shares[z]
        adult_shares = np.where(np.arange(4) >= 2, age_shares, 0.0)
        adult_shares = adult_shares / adult_shares.sum()

        agents = []
        for i in range(n):
            size = int(sizes[i])
            groups = [int(rng.choice(4, p=adult_shares))]
            if size > 1:
                groups.extend(int(g) for g in rng.choice(4, size=size - 1, p=age_shares))
            ages = [int(rng.integers(self._age_bounds[g][0], self._age_bounds[g][1] + 1)) for g in groups]
            income = float(incomes[i])

            # 2. 基于已生成属性的条件抽样: 汽车、就业人数、居住面积
            s_cls = size_class(size)
            i_cls = income_class(income, cfg.income_breaks)
            cars_p = self.conditionals.cars[(s_cls, i_cls)]
            emp_p = self.conditionals.employees[(s_cls, i_cls)]
            cars = int(rng.choice(len(cars_p), p=cars_p))
            adults = sum(1 for a in ages if a >= 19)
            employees = min(int(rng.choice(len(emp_p), p=emp_p)), adults)
            required_area = sample_required_area(rng, self.priors.mean_area[s_cls], cfg.area_cv, cfg.area_floor_m2)

            pmin = cfg.pmin_high_income if i_cls == "high" else cfg.pmin
            agents.append(HouseholdAgent(
                id=first_id + i,
                size=size,
                ages=ages,
                income=income,
                cars=cars,
                employees=employees,
                students=sum(1 for a in ages if 6 <= a <= 18),
                has_child=any(a < 19 for a in ages),
                required_area=required_area,
                former_zone=int(zone_id),
                rent_band=(pmin, cfg.pmax),
            ))
        return agents

