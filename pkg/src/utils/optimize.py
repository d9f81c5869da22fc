import math
from dataclasses import dataclass
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


@dataclass(frozen=True)
class GoldenResult:
    x: float
    fun: float
    iterations: int
    converged: bool


def golden_section_minimize(
    obj: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> GoldenResult:
    """Golden section search for the minimum of a unimodal function on [a, b].

    Args:
        obj: 1d function to minimise
        a: lower end of the starting bracket
        b: upper end of the starting bracket
        tol: final bracket width
        max_iter: hard cap on objective evaluations after the first two

    Returns:
        GoldenResult with the bracket midpoint of the final interval.
    """
    if b < a:
        a, b = b, a

    dist = b - a
    if dist <= tol:
        x = 0.5 * (a + b)
        return GoldenResult(x=x, fun=obj(x), iterations=0, converged=True)

    n = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    converged = n <= max_iter
    n = min(n, max_iter)

    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = obj(c)
    yd = obj(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = obj(c)
        else:
            a = c
            c = d
            yc = yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = obj(d)

    if yc < yd:
        x = 0.5 * (a + d)
    else:
        x = 0.5 * (c + b)
    return GoldenResult(x=x, fun=obj(x), iterations=n, converged=converged)


def golden_section_maximize(
    obj: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> GoldenResult:
    res = golden_section_minimize(lambda x: -obj(x), a, b, tol=tol, max_iter=max_iter)
    return GoldenResult(x=res.x, fun=-res.fun, iterations=res.iterations, converged=res.converged)
