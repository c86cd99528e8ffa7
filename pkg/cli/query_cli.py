import argparse
import logging
import math
import sys
import time
from dataclasses import asdict
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from cli.report import QueryReport, error_report
from core.algebra_core import (
    EXP_BASIS,
    GenDescriptor,
    GenericGen,
    classify_generator,
    describe_generator,
    divide,
    element_str,
    equiv,
    ideal_member,
    parse_element,
    solve_unit_equation,
    split_unit,
    stability_verdict,
)
from core.arith_core import Scalar, total_degree
from core.config import IndicatorConfig
from core.depend_core import eliminate, parse_pair, verify_dependence
from core.errors import InvalidInput, QuasiDivError, VerificationFailed
from core.expr_core import (
    Expr,
    ast_to_expsum,
    ast_to_poly,
    ast_to_ratfun,
    ast_to_upoly,
    max_var_index,
    parse_expr,
    print_expr,
    print_poly,
    print_ratfun,
    print_upoly,
)
from core.indicator_core import (
    LineSpec,
    SectorSpec,
    check_almost_sinusoidal,
    check_sine_inequality,
    check_sinusoidal,
    estimate_indicator,
    estimate_order,
    exact_exp_indicator,
)
from core.numeric_core import check_division, check_solution_family
from core.upoly_core import root_bound, tschirnhaus

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EPILOG = """
使用示例:
  python -m cli.query_cli classify "exp(z)+exp(2*z)"              # 生成元分类
  python -m cli.query_cli divide --gen "exp(z)" "f^2-1" "f-1"     # 稳定除法
  python -m cli.query_cli member --gen "exp(z)" "w-1" "w^2-w"     # 理想成员判定
  python -m cli.query_cli equiv --gen "exp(z)" "w-1" "z*w^3-z*w^2" # 等价判定
  python -m cli.query_cli solve "w^2+2*w+1" 1 z                   # 求解 P(f) = R·e^p
  python -m cli.query_cli depend "t^2" "t^3"                      # 代数相关性
  python -m cli.query_cli indicator "exp(z)" --rho 1              # 指标函数
  python -m cli.query_cli bounds "w^2-2"                          # 根模界
  python -m cli.query_cli depress "w^3+3*w^2"                     # Tschirnhaus 变换
  python -m cli.query_cli --batch queries.txt                     # 批量查询
"""

# 指标估计出的阶与整数相差不超过该值时取整数
ORDER_SNAP = 0.05


class QueryArgumentParser(argparse.ArgumentParser):
    """用法错误以退出码 1 结束"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: 错误: {message}\n")


def build_parser() -> QueryArgumentParser:
    """构造命令行解析器"""
    parser = QueryArgumentParser(
        prog="quasidiv",
        description="quasidiv - R^n[f] 与 R^n[e^p, e^-p] 的精确除法、稳定性与相关性计算",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument('--batch', metavar='FILE', help='批量模式：逐行读取查询并并发执行')
    parser.add_argument('-v', '--verbose', action='store_true', default=False, help='启用详细输出模式')
    parser.add_argument('--pretty', action='store_true', default=False, help='缩进输出 JSON')

    # 子命令共用的输出选项；SUPPRESS 避免覆盖顶层取值
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument('--json', dest='pretty', action='store_false', default=argparse.SUPPRESS,
                     help='单行 JSON 输出（默认）')
    fmt.add_argument('--pretty', dest='pretty', action='store_true', default=argparse.SUPPRESS,
                     help='缩进输出 JSON')
    common.add_argument('-v', '--verbose', action='store_true', default=argparse.SUPPRESS,
                        help='启用详细输出模式')

    gen_opts = argparse.ArgumentParser(add_help=False)
    gen_group = gen_opts.add_mutually_exclusive_group()
    gen_group.add_argument('--gen', metavar='EXPR', help='生成元 f 的表达式，例如 "exp(z)"')
    gen_group.add_argument('--generic', action='store_true', help='声明 f 为超越、有限阶的整函数')
    gen_opts.add_argument('--order', type=Fraction, default=Fraction(1),
                          help='--generic 时声明的阶，默认 1')

    numeric_opts = argparse.ArgumentParser(add_help=False)
    numeric_opts.add_argument('--no-numeric', action='store_true', help='跳过数值交叉校验')

    subparsers = parser.add_subparsers(dest='command', help='可用命令')

    p = subparsers.add_parser('classify', parents=[common], help='生成元分类与稳定性结论')
    p.add_argument('expr', help='生成元表达式')
    p.add_argument('--nvars', type=int, default=None, help='变量个数，默认取表达式中最大下标')

    p = subparsers.add_parser('divide', parents=[common, gen_opts, numeric_opts], help='稳定除法 h0 / h1')
    p.add_argument('h0', help='被除式')
    p.add_argument('h1', help='除式')

    p = subparsers.add_parser('member', parents=[common, gen_opts], help='理想成员判定 h ∈ M_0·g')
    p.add_argument('h', help='待判定元素')
    p.add_argument('g', help='理想生成元')

    p = subparsers.add_parser('equiv', parents=[common, gen_opts], help='判定 g2 = R·e^{mp}·g1')
    p.add_argument('g1', help='第一个元素')
    p.add_argument('g2', help='第二个元素')

    p = subparsers.add_parser('solve', parents=[common, numeric_opts], help='求解单位方程 P(f) = R·e^p')
    p.add_argument('P', help='w 的多项式 P(w)')
    p.add_argument('R', help='有理函数 R')
    p.add_argument('p', help='指数多项式 p')

    p = subparsers.add_parser('depend', parents=[common], help='参数 t 的两个有理函数的消去多项式')
    p.add_argument('A', help='A(t)')
    p.add_argument('B', help='B(t)')

    defaults = IndicatorConfig()
    p = subparsers.add_parser('indicator', parents=[common], help='估计增长阶与指标函数')
    p.add_argument('expr', help='整函数表达式')
    p.add_argument('--rho', type=float, default=None, help='指标的阶 ρ，默认数值估计')
    p.add_argument('--alpha', type=float, default=0.0, help='扇形起始角，默认 0')
    p.add_argument('--beta', type=float, default=2 * math.pi, help='扇形终止角，默认 2π')
    p.add_argument('--r0', type=float, default=0.0, help='扇形内半径，默认 0')
    p.add_argument('--point', default=None, help='多变量时的直线基点，逗号分隔，默认原点')
    p.add_argument('--direction', default=None, help='多变量时的直线方向，逗号分隔，默认全 1')
    p.add_argument('--r-start', type=float, default=defaults.r_start, help='起始半径')
    p.add_argument('--r-ratio', type=float, default=defaults.r_ratio, help='半径公比')
    p.add_argument('--r-steps', type=int, default=defaults.r_steps, help='半径个数')
    p.add_argument('--n-theta', type=int, default=defaults.n_theta, help='角度网格点数')
    p.add_argument('--slack', type=float, default=defaults.sine_slack, help='正弦不等式的容差')
    p.add_argument('--sinusoid-tol', type=float, default=defaults.sinusoid_tol, help='正弦拟合容差')

    p = subparsers.add_parser('bounds', parents=[common], help='首一常系数多项式的根模界')
    p.add_argument('P', help='w 的首一多项式')

    p = subparsers.add_parser('depress', parents=[common], help='Tschirnhaus 变换消去次高项')
    p.add_argument('P', help='w 的首一多项式')

    return parser


def _nvars(*nodes: Expr) -> int:
    return max(1, max_var_index(*nodes))


def _resolve_gen(args, *elements: Expr) -> Tuple[GenDescriptor, dict]:
    """由 --gen 或 --generic 得到生成元"""
    if args.generic:
        if args.order < 0:
            raise InvalidInput("声明的阶不能为负")
        gen = GenericGen(label='f', declared_order=args.order, nvars=_nvars(*elements))
        return gen, {"generic": True, "order": str(args.order)}
    if args.gen is None:
        raise InvalidInput("需要 --gen <表达式> 或 --generic")
    gen_expr = parse_expr(args.gen)
    gen = classify_generator(gen_expr, _nvars(gen_expr, *elements))
    return gen, {"gen": print_expr(gen_expr)}


def _numeric_block(check) -> dict:
    block = check.as_dict()
    if not check.passed:
        logger.warning(f"数值校验未通过: 最大相对误差 {check.max_rel_error:.3e}")
    return block


def _parse_scalars(text: str) -> Tuple[Scalar, ...]:
    values = []
    for part in text.split(','):
        r = ast_to_ratfun(parse_expr(part), 1, {})
        if not r.is_constant():
            raise InvalidInput(f"'{part}' 不是常数")
        values.append(r.constant())
    return tuple(values)


def cmd_classify(args) -> QueryReport:
    expr = parse_expr(args.expr)
    gen = classify_generator(expr, args.nvars)
    verdict = stability_verdict(gen)
    return QueryReport(
        command='classify',
        inputs={"expr": print_expr(expr)},
        verdict=gen.kind,
        witness={
            "class": gen.kind,
            "generator": describe_generator(gen),
            "stability": {
                "stable_algebra": verdict.stable_algebra,
                "has_nontrivial_invertibles": verdict.has_nontrivial_invertibles,
                "statement": verdict.statement,
            },
        },
    )


def cmd_divide(args) -> QueryReport:
    e0, e1 = parse_expr(args.h0), parse_expr(args.h1)
    gen, gen_inputs = _resolve_gen(args, e0, e1)
    h0, h1 = parse_element(e0, gen), parse_element(e1, gen)
    result = divide(h0, h1, gen)
    witness = {"generator": describe_generator(gen)}
    notes: List[str] = []
    if result.in_algebra:
        witness["quotient"] = element_str(result.quotient, gen)
        if not args.no_numeric:
            witness["numeric_check"] = _numeric_block(check_division(h0, h1, result.quotient, gen))
    else:
        witness["certificate"] = print_upoly(result.certificate, 'w')
        witness["cofactor"] = print_upoly(result.cofactor, 'w')
        notes.append("证书与余因子互素且次数为正，h0/h1 不在 M_0^n 中")
    return QueryReport(
        command='divide',
        inputs={**gen_inputs, "h0": element_str(h0, gen), "h1": element_str(h1, gen)},
        verdict=result.verdict,
        witness=witness,
        notes=notes,
    )


def cmd_member(args) -> QueryReport:
    eh, eg = parse_expr(args.h), parse_expr(args.g)
    gen, gen_inputs = _resolve_gen(args, eh, eg)
    h, g = parse_element(eh, gen), parse_element(eg, gen)
    cofactor = ideal_member(h, g, gen)
    witness = {"generator": describe_generator(gen)}
    if g.basis == EXP_BASIS:
        m, q = split_unit(g.rep)
        witness["unit_exponent"] = m
        witness["unit_free_part"] = print_upoly(q, 'w')
    if cofactor is not None:
        witness["cofactor"] = element_str(cofactor, gen)
    return QueryReport(
        command='member',
        inputs={**gen_inputs, "h": element_str(h, gen), "g": element_str(g, gen)},
        verdict="member" if cofactor is not None else "not_member",
        witness=witness,
    )


def cmd_equiv(args) -> QueryReport:
    e1, e2 = parse_expr(args.g1), parse_expr(args.g2)
    gen, gen_inputs = _resolve_gen(args, e1, e2)
    g1, g2 = parse_element(e1, gen), parse_element(e2, gen)
    found = equiv(g1, g2, gen)
    witness = {"generator": describe_generator(gen)}
    if found is not None:
        ratio, shift = found
        witness["ratio"] = print_ratfun(ratio)
        witness["shift"] = shift
    return QueryReport(
        command='equiv',
        inputs={**gen_inputs, "g1": element_str(g1, gen), "g2": element_str(g2, gen)},
        verdict="equivalent" if found is not None else "not_equivalent",
        witness=witness,
    )


def cmd_solve(args) -> QueryReport:
    eP, eR, ep = parse_expr(args.P), parse_expr(args.R), parse_expr(args.p)
    nvars = _nvars(eP, eR, ep)
    P = ast_to_upoly(eP, nvars, 'w')
    R = ast_to_ratfun(eR, nvars)
    p = ast_to_poly(ep, nvars)
    family = solve_unit_equation(P, R, p)
    witness = {}
    notes: List[str] = []
    if family is not None:
        witness["family"] = family.as_dict()
        if family.deferred_root:
            notes.append("unit_part 在 R^n 中没有精确 m 次根，数值校验取主值根")
        if not args.no_numeric:
            witness["numeric_check"] = _numeric_block(check_solution_family(P, R, family))
    else:
        notes.append("P 不是完全幂 c·(w+q)^m，不存在有限阶整函数解")
    return QueryReport(
        command='solve',
        inputs={"P": print_upoly(P, 'w'), "R": print_ratfun(R), "p": print_poly(p)},
        verdict="family" if family is not None else "no_solution",
        witness=witness,
        notes=notes,
    )


def cmd_depend(args) -> QueryReport:
    pair = parse_pair(args.A, args.B)
    elim = eliminate(pair)
    if not verify_dependence(elim.annihilator, pair):
        raise VerificationFailed("消去多项式代回后不为零")
    return QueryReport(
        command='depend',
        inputs=pair.as_dict(),
        verdict="dependent",
        witness={
            "annihilator": print_poly(elim.annihilator),
            "degree": total_degree(elim.annihilator),
            "verified": True,
            "squarefree_reduced": elim.reduced,
        },
        notes=list(elim.notes),
    )


def _snap_order(order: float) -> Tuple[float, Optional[str]]:
    nearest = round(order)
    if nearest >= 1 and abs(order - nearest) <= ORDER_SNAP:
        return float(nearest), f"估计阶 {order:.4f} 取整为 {nearest}"
    return order, None


def cmd_indicator(args) -> QueryReport:
    expr = parse_expr(args.expr)
    nvars = _nvars(expr)
    cfg = IndicatorConfig(
        r_start=args.r_start,
        r_ratio=args.r_ratio,
        r_steps=args.r_steps,
        n_theta=args.n_theta,
        sine_slack=args.slack,
        sinusoid_tol=args.sinusoid_tol,
    )
    line = LineSpec(
        point=_parse_scalars(args.point) if args.point else (),
        direction=_parse_scalars(args.direction) if args.direction else (),
    )
    sector = SectorSpec(alpha=args.alpha, beta=args.beta, r0=args.r0)
    inputs = {"expr": print_expr(expr), "sector": {"alpha": args.alpha, "beta": args.beta, "r0": args.r0}}
    notes: List[str] = []
    witness: Dict[str, object] = {}

    order = None
    rho = args.rho
    if rho is None:
        order = estimate_order(expr, cfg, line)
        witness["order"] = order
        if order == 0.0:
            notes.append("log M(r) 关于 log r 线性，函数为多项式增长")
            return QueryReport(command='indicator', inputs=inputs, verdict="polynomial_growth",
                               witness=witness, notes=notes)
        rho, note = _snap_order(order)
        if note:
            notes.append(note)
    witness["rho"] = rho

    profile = estimate_indicator(expr, rho, sector, cfg, line)
    violations = check_sine_inequality(profile, cfg.sine_slack)
    fit = check_sinusoidal(profile, cfg.sinusoid_tol, cfg.phase_step)
    witness["profile"] = profile.as_table()
    witness["cancellation_flags"] = profile.flagged
    witness["sine_inequality"] = {
        "violations": len(violations),
        "worst": [asdict(v) for v in sorted(violations, key=lambda v: -v.excess)[:5]],
    }
    witness["sinusoid"] = fit.as_dict() if fit is not None else None

    es = ast_to_expsum(expr, nvars)
    exponents = es.exponents()
    if len(exponents) == 1 and es.rational_part().is_zero():
        p = exponents[0]
        exact = exact_exp_indicator(p, line)
        witness["exact_sinusoid"] = exact.as_dict()
        if profile.full_circle and exact.rho == rho:
            neg = estimate_indicator(parse_expr(f"exp(-({print_poly(p)}))"), rho, sector, cfg, line)
            almost = check_almost_sinusoidal(profile, neg, cfg.sine_slack)
            witness["almost_sinusoidal"] = {"holds": almost.holds, "interval": almost.interval}

    return QueryReport(
        command='indicator',
        inputs=inputs,
        verdict="sinusoidal" if fit is not None else "non_sinusoidal",
        witness=witness,
        notes=notes,
    )


def cmd_bounds(args) -> QueryReport:
    expr = parse_expr(args.P)
    P = ast_to_upoly(expr, _nvars(expr), 'w')
    bound = root_bound(P)
    return QueryReport(
        command='bounds',
        inputs={"P": print_upoly(P, 'w')},
        verdict="bounded",
        witness={"lo": bound.lo, "hi": bound.hi, "lo_sq": str(bound.lo_sq), "hi_sq": str(bound.hi_sq)},
    )


def cmd_depress(args) -> QueryReport:
    expr = parse_expr(args.P)
    P = ast_to_upoly(expr, _nvars(expr), 'w')
    shift, depressed = tschirnhaus(P)
    return QueryReport(
        command='depress',
        inputs={"P": print_upoly(P, 'w')},
        verdict="depressed",
        witness={"shift": print_ratfun(shift), "depressed": print_upoly(depressed, 'w')},
    )


HANDLERS: Dict[str, Callable[[argparse.Namespace], QueryReport]] = {
    'classify': cmd_classify,
    'divide': cmd_divide,
    'member': cmd_member,
    'equiv': cmd_equiv,
    'solve': cmd_solve,
    'depend': cmd_depend,
    'indicator': cmd_indicator,
    'bounds': cmd_bounds,
    'depress': cmd_depress,
}

_NON_INPUTS = {'command', 'batch', 'verbose', 'pretty'}


def execute(args: argparse.Namespace) -> Tuple[QueryReport, int]:
    """
    执行一条已解析的查询

    返回:
    Tuple[QueryReport, int]: 报告与退出码（0 结论，1 输入错误，2 内部错误）
    """
    start = time.perf_counter()
    raw_inputs = {k: str(v) for k, v in vars(args).items() if k not in _NON_INPUTS and v is not None}
    try:
        report = HANDLERS[args.command](args)
        code = 0
        logger.info(f"{args.command}: {report.verdict}")
    except QuasiDivError as exc:
        logger.error(f"{args.command} 输入错误: {exc}")
        report, code = error_report(args.command, raw_inputs, exc), 1
    except Exception as exc:
        logger.exception(f"{args.command} 内部错误: {exc}")
        report, code = error_report(args.command, raw_inputs, exc), 2
    report.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return report, code


def run_command(argv: Sequence[str]) -> Tuple[QueryReport, int]:
    """解析 argv 并执行；用法错误以 SystemExit(1) 结束"""
    args = build_parser().parse_args(list(argv))
    if not args.command:
        raise InvalidInput("缺少子命令")
    return execute(args)


def main(argv: Optional[Sequence[str]] = None):
    """主函数，命令行界面"""
    parser = build_parser()
    args = parser.parse_args(argv)

    # 根据详细标志设置日志级别
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    else:
        logging.getLogger().setLevel(logging.INFO)

    if args.batch:
        from cli.batch_cli import run_batch
        sys.exit(run_batch(args.batch, pretty=args.pretty))

    if not args.command:
        parser.print_help()
        sys.exit(1)

    report, code = execute(args)
    print(report.to_json(pretty=args.pretty))
    sys.exit(code)


if __name__ == "__main__":
    main()
