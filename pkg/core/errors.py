"""
quasidiv 异常类型

引擎层统一抛出 QuasiDivError 的子类，CLI 负责映射为退出码：
QuasiDivError -> 1（输入错误），其它异常 -> 2（内部错误）。
"""

from typing import Optional


class QuasiDivError(ValueError):
    """所有输入/数学前置条件错误的基类"""


class DivisionByZero(QuasiDivError, ZeroDivisionError):
    """除数为零（标量、有理函数或多项式除法）"""


class ArityMismatch(QuasiDivError):
    """两个多项式的变量个数不一致"""


class UndefinedGcd(QuasiDivError):
    """gcd(0, 0) 没有定义"""


class PoleAtPoint(QuasiDivError):
    """求值点落在有理函数的极点簇上"""


class InvalidInput(QuasiDivError):
    """前置条件不满足（例如 root_bound 要求首一常系数多项式）"""


class ZeroElement(QuasiDivError):
    """运算要求非零代数元素"""


class BasisMismatch(QuasiDivError):
    """两个代数元素的表示基底不一致"""


class ZeroUnit(QuasiDivError):
    """单位方程右端 R 为零"""


class NotAUnit(QuasiDivError):
    """指数多项式为常数，R·e^p 不是非平凡可逆元"""


class UnsupportedGenerator(QuasiDivError):
    """表达式超出可处理的生成元类别"""


class DegenerateResultant(QuasiDivError):
    """两个多项式关于消元变量都是常数"""


class DegeneratePair(QuasiDivError):
    """消元后结式恒为零"""


class OverflowAtAllRadii(QuasiDivError):
    """所有半径上的采样都溢出或无效"""


class NotEntire(QuasiDivError):
    """表达式含有极点，不是整函数"""


class InsufficientGrid(QuasiDivError):
    """角度网格点少于 3 个"""


class ParseError(QuasiDivError):
    """表达式语法错误，带行列位置"""

    def __init__(self, message: str, line: int = 1, column: int = 1, text: Optional[str] = None):
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"{message} (行 {line}, 列 {column})")


class VerificationFailed(RuntimeError):
    """引擎结果未通过自身的回代校验（内部错误）"""
