"""确定性随机数子流管理"""
import hashlib
from dataclasses import dataclass

import numpy as np

U64_MAX = 2**64 - 1


def _hash_to_u64(text: str) -> int:
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


@dataclass
class RNGManager:
    """从一个主种子派生命名子流, 结果与调度和分区无关"""

    base_seed: int

    def __post_init__(self):
        if not 0 <= int(self.base_seed) <= U64_MAX:
            raise ValueError(f"种子必须是64位无符号整数: {self.base_seed}")

    def child_seed(self, name: str) -> int:
        """名称 -> 子种子"""
        if not name:
            raise ValueError("子流名称不能为空")
        return _hash_to_u64(f"{self.base_seed}:{name}")

    def generator(self, name: str) -> np.random.Generator:
        """每次调用返回一个全新的生成器(从头重放)"""
        return np.random.default_rng(self.child_seed(name))

