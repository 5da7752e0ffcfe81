"""仿真异常定义"""
from typing import List, Optional, Tuple


class SimulationError(Exception):
    """所有仿真错误的基类"""


class InputValidationError(SimulationError, ValueError):
    """输入数据校验失败, issues 为 (行号, 列名, 说明) 列表"""

    def __init__(self, message: str, issues: Optional[List[Tuple[Optional[int], Optional[str], str]]] = None):
        super().__init__(message)
        self.issues = list(issues or [])

    def to_dict(self) -> dict:
        return {
            "message": str(self),
            "issues": [
                {"row": row, "column": column, "message": msg}
                for row, column, msg in self.issues
            ],
        }


class ConfigError(SimulationError, ValueError):
    """配置文件错误"""


class OracleGuardError(SimulationError):
    """穷举oracle超出规模限制"""
