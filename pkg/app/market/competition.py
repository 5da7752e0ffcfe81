"""房东偏好竞争与单月轮次结算"""
import logging
from typing import Dict, List, Mapping, Tuple

import numpy as np

from ..models.agent import HouseholdAgent
from ..models.choice import AlternativeSet
from ..models.city import City
from ..models.market import CompetitionEvent, MonthLedger
from ..utils.errors import InputValidationError

logger = logging.getLogger(__name__)

SINGLES_LAST = "last"


def effective_size(agent: HouseholdAgent, singles_rule: str = SINGLES_LAST) -> float:
    """单身家庭排在所有多成员家庭之后"""
    if agent.size == 1 and singles_rule == SINGLES_LAST:
        return float("inf")
    return float(agent.size)


def competition_key(agent: HouseholdAgent, tiebreak: float = 0.0,
                    singles_rule: str = SINGLES_LAST) -> Tuple[float, float, bool, float]:
    """越小越优先: (有效规模, -收入, 有孩子, 随机数)"""
    return (effective_size(agent, singles_rule), -agent.income, agent.has_child, tiebreak)


def deterministic_key(agent: HouseholdAgent, singles_rule: str = SINGLES_LAST) -> Tuple[float, float, bool]:
    """不含随机部分的键, 用于回放检查"""
    return competition_key(agent, 0.0, singles_rule)[:3]


def search_order(agent: HouseholdAgent, alternatives: AlternativeSet, city: City) -> List[int]:
    """按到原住址距离升序 (同距离按小区编号) 的搜索顺序"""
    return sorted(alternatives.zones, key=lambda z: (city.distance(agent.former_zone, z), z))


def run_month(pool: List[HouseholdAgent],
              alternatives: Mapping[int, AlternativeSet],
              capacities: Dict[int, int],
              city: City,
              rng: np.random.Generator,
              month: int = 1,
              singles_rule: str = SINGLES_LAST) -> MonthLedger:
    """
    同步轮次出价: 每轮所有未安置agent向当前指针小区出价,
    未超额的小区全部接受, 超额小区按竞争键取前 capacity 名, 落败者指针后移。
    """
    missing = [a.id for a in pool if a.id not in alternatives]
    if missing:
        raise InputValidationError(f"以下agent没有备选方案: {missing[:10]}")

    ordered = sorted(pool, key=lambda a: a.id)
    tiebreaks = rng.random(len(ordered))
    keys = {a.id: competition_key(a, float(t), singles_rule) for a, t in zip(ordered, tiebreaks)}
    orders = {a.id: search_order(a, alternatives[a.id], city) for a in ordered}
    pointer = {a.id: 0 for a in ordered}
    remaining = dict(capacities)
    ledger = MonthLedger(month=month, capacities=dict(capacities))

    active = [a.id for a in ordered if orders[a.id]]
    ledger.losers.extend(a.id for a in ordered if not orders[a.id])

    while active:
        ledger.rounds += 1
        bids: Dict[int, List[int]] = {}
        for agent_id in active:
            bids.setdefault(orders[agent_id][pointer[agent_id]], []).append(agent_id)

        defeated: List[int] = []
        for zone in sorted(bids):
            bidders = bids[zone]
            free = remaining.get(zone, 0)
            if len(bidders) <= free:
                winners = bidders
            else:
                ranked = sorted(bidders, key=lambda i: keys[i])
                winners = ranked[:free]
                losers = ranked[free:]
                defeated.extend(losers)
                ledger.events.append(CompetitionEvent(
                    month=month, zone=zone, contenders=sorted(bidders),
                    winners=sorted(winners), remaining_capacity=free,
                ))
            for agent_id in winners:
                ledger.assignments[agent_id] = (zone, pointer[agent_id] + 1)
            remaining[zone] = free - len(winners)

        active = []
        for agent_id in sorted(defeated):
            pointer[agent_id] += 1
            if pointer[agent_id] < len(orders[agent_id]):
                active.append(agent_id)
            else:
                ledger.losers.append(agent_id)

    ledger.losers.sort()
    logger.debug(f"第{month}月结算: {len(ledger.assignments)} 安置, {len(ledger.losers)} 落败, "
                 f"{ledger.rounds} 轮, {len(ledger.events)} 次竞争")
    return ledger
