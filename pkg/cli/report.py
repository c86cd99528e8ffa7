"""
查询报告：命令结果的 JSON 表示
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from core.config import SCHEMA


def _clean(value: Any) -> Any:
    """把 numpy 标量、非有限浮点数等转换为可序列化的值"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    return value


@dataclass
class QueryReport:
    """
    一次查询的结果

    witness 中的字段直接放在报告顶层（如 quotient、annihilator）。
    """

    command: str
    inputs: Dict[str, Any]
    verdict: str
    witness: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    elapsed_ms: float = 0.0
    index: Optional[int] = None

    def as_dict(self) -> Dict[str, Any]:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "diagnostics": {"elapsed_ms": round(self.elapsed_ms, 3), "notes": list(self.notes)},
        }
        for key, value in self.witness.items():
            out.setdefault(key, value)
        if self.index is not None:
            out["index"] = self.index
        return _clean(out)

    def to_json(self, pretty: bool = False) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, ensure_ascii=False,
                          indent=2 if pretty else None)


def error_report(command: str, inputs: Dict[str, Any], exc: BaseException) -> QueryReport:
    """输入错误或内部错误时的报告"""
    return QueryReport(
        command=command,
        inputs=inputs,
        verdict="error",
        witness={"error": {"type": type(exc).__name__, "message": str(exc)}},
    )
