"""备选方案批处理器 - 将agent分批交给进程池并行搜索"""
import asyncio
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Dict, List, Optional

from ..config.settings import NSGA2Settings, ProcessingSettings
from ..models.agent import HouseholdAgent
from ..models.choice import AlternativeSet
from ..models.city import City
from .nsga2 import nsga2_select_alternatives

logger = logging.getLogger(__name__)

# worker进程内共享的只读城市
_WORKER_CITY: Optional[City] = None


def _init_worker(city: City) -> None:
    global _WORKER_CITY
    _WORKER_CITY = city


def _run_batch(agents: List[HouseholdAgent], params: NSGA2Settings, seed: int,
               city: Optional[City] = None) -> List[AlternativeSet]:
    """处理单个批次 (worker进程或主进程内执行)"""
    city = city if city is not None else _WORKER_CITY
    return [nsga2_select_alternatives(agent, city, params, seed) for agent in agents]


class ChoiceBatchProcessor:
    """备选方案批处理器, 结果与worker数和批大小无关"""

    def __init__(self, params: Optional[NSGA2Settings] = None,
                 processing: Optional[ProcessingSettings] = None):
        self.params = params or NSGA2Settings()
        self.processing = processing or ProcessingSettings()
        self.workers = self.processing.workers
        self.batch_size = self.processing.batch_size

        # 统计
        self.total_batches = 0
        self.total_agents = 0
        self.total_time = 0.0

        logger.info(f"备选方案批处理器初始化: workers={self.workers}, batch_size={self.batch_size}")

    def _make_batches(self, agents: List[HouseholdAgent]) -> List[List[HouseholdAgent]]:
        ordered = sorted(agents, key=lambda a: a.id)
        return [ordered[i:i + self.batch_size] for i in range(0, len(ordered), self.batch_size)]

    async def _process_single_batch(self, executor: Optional[Executor], batch: List[HouseholdAgent],
                                    batch_id: int, city: City, seed: int) -> List[AlternativeSet]:
        batch_start = time.time()
        if executor is None:
            results = _run_batch(batch, self.params, seed, city)
        else:
            loop = asyncio.get_running_loop()
            results = await loop.run_in_executor(executor, _run_batch, batch, self.params, seed)

        batch_time = time.time() - batch_start
        self.total_batches += 1
        logger.debug(f"批次 {batch_id} 完成: {len(batch)} 个agent, 耗时={batch_time*1000:.1f}ms")
        return results

    async def process(self, agents: List[HouseholdAgent], city: City, seed: int) -> List[AlternativeSet]:
        """并发处理全部批次, 按agent编号返回"""
        start_time = time.time()
        batches = self._make_batches(agents)
        logger.info(f"开始生成备选方案: {len(agents)} 个agent, {len(batches)} 个批次")

        if self.workers <= 1:
            batch_results = [
                await self._process_single_batch(None, batch, i, city, seed)
                for i, batch in enumerate(batches)
            ]
        else:
            with ProcessPoolExecutor(max_workers=self.workers, initializer=_init_worker,
                                     initargs=(city,)) as executor:
                batch_results = await asyncio.gather(*[
                    self._process_single_batch(executor, batch, i, city, seed)
                    for i, batch in enumerate(batches)
                ])

        alternatives: Dict[int, AlternativeSet] = {}
        for results in batch_results:
            for alt in results:
                alternatives[alt.agent_id] = alt

        elapsed = time.time() - start_time
        self.total_agents += len(agents)
        self.total_time += elapsed
        throughput = len(agents) / elapsed if elapsed > 0 else 0.0
        empty = sum(1 for a in alternatives.values() if len(a) == 0)
        logger.info(f"备选方案生成完成: 耗时={elapsed:.1f}秒, 吞吐量={throughput:.1f} agents/s, "
                    f"无可行小区={empty}")
        return [alternatives[a.id] for a in sorted(agents, key=lambda a: a.id)]

    def run(self, agents: List[HouseholdAgent], city: City, seed: int) -> List[AlternativeSet]:
        """同步入口"""
        return asyncio.run(self.process(agents, city, seed))

    def get_statistics(self) -> Dict[str, float]:
        return {
            "total_batches": self.total_batches,
            "total_agents": self.total_agents,
            "total_time_seconds": round(self.total_time, 2),
        }


def choose_alternatives(agents: List[HouseholdAgent], city: City, params: NSGA2Settings, seed: int,
                        processing: Optional[ProcessingSettings] = None) -> List[AlternativeSet]:
    return ChoiceBatchProcessor(params, processing).run(agents, city, seed)
