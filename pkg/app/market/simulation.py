"""12个月租赁市场仿真"""
import logging
import time
from typing import Dict, List, Mapping, Optional

from ..config.settings import MarketSettings
from ..models.agent import HouseholdAgent
from ..models.choice import AlternativeSet
from ..models.city import City
from ..models.market import AgentOutcome, HousingStatus, SimulationOutcome
from ..utils.rng import RNGManager
from .capacity import monthly_capacity
from .competition import run_month

logger = logging.getLogger(__name__)

MONTHS = range(1, 13)


class MarketSimulator:
    """按月推进: 当月新需求 + 上月落败者 (宽限一次)"""

    def __init__(self, city: City, settings: Optional[MarketSettings] = None):
        self.city = city
        self.settings = settings or MarketSettings()

    def run(self, agents: List[HouseholdAgent], alternatives: Mapping[int, AlternativeSet],
            seed: int) -> SimulationOutcome:
        start_time = time.time()
        cfg = self.settings
        manager = RNGManager(seed)
        by_month: Dict[int, List[HouseholdAgent]] = {m: [] for m in MONTHS}
        for agent in agents:
            by_month[agent.relocation_month].append(agent)

        outcomes: Dict[int, AgentOutcome] = {}
        outcome = SimulationOutcome(outcomes=outcomes)
        carried: List[HouseholdAgent] = []
        carry_count: Dict[int, int] = {}
        was_carried: Dict[int, bool] = {}

        for month in MONTHS:
            pool = by_month[month] + carried
            n_at = len(pool) if cfg.count_carried_in_demand else len(by_month[month])
            capacities = monthly_capacity(self.city, month, cfg.alpha[month - 1], n_at)
            ledger = run_month(pool, alternatives, capacities, self.city,
                               manager.generator(f"market:{month}"), month, cfg.singles_rule)

            for agent_id, (zone, rank) in ledger.assignments.items():
                outcomes[agent_id] = AgentOutcome(agent_id, HousingStatus.HOUSED, zone, month, rank,
                                                  carried=was_carried.get(agent_id, False))
            housed = ledger.housed_per_zone()
            for zone, cap in sorted(capacities.items()):
                outcome.capacity_log.append((month, zone, cap, housed.get(zone, 0)))
            outcome.events.extend(ledger.events)

            pool_by_id = {a.id: a for a in pool}
            carried = []
            for agent_id in ledger.losers:
                used = carry_count.get(agent_id, 0)
                if month < 12 and used < cfg.carry_forward_limit:
                    carry_count[agent_id] = used + 1
                    was_carried[agent_id] = True
                    carried.append(pool_by_id[agent_id])
                else:
                    outcomes[agent_id] = AgentOutcome(agent_id, HousingStatus.UNHOUSED,
                                                      carried=was_carried.get(agent_id, False))
            logger.info(f"第{month}月: 需求={len(pool)}, 名额={sum(capacities.values())}, "
                        f"安置={len(ledger.assignments)}, 顺延={len(carried)}")

        housed_total = sum(1 for o in outcomes.values() if o.housed)
        logger.info(f"市场仿真完成: 安置 {housed_total}, 未安置 {len(outcomes) - housed_total}, "
                    f"竞争 {len(outcome.events)} 次, 耗时: {time.time() - start_time:.2f}秒")
        return outcome


def run_simulation(agents: List[HouseholdAgent], city: City, market_config: Optional[MarketSettings],
                   alternatives: Mapping[int, AlternativeSet], seed: int) -> SimulationOutcome:
    return MarketSimulator(city, market_config).run(agents, alternatives, seed)
