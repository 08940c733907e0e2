"""Stack-program encoding for closed-form scalar functions.

Every kernel and test function in the toolkit compiles to a tiny postfix
program: a float64 array of (opcode, arg0, arg1) rows plus a coefficient
pool. Both evaluation backends (numba and pure numpy) interpret the same
encoding, which keeps the hot loops free of Python callables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Opcodes. arg0/arg1 meanings per op:
#   CONST  push arg0
#   VAR    push x
#   POWC   push x ** arg0
#   EXPC   push exp(arg0 * x)
#   POLY   push sum(pool[arg0 + k] * x**k, k < arg1)   (Horner)
#   SQDEV  push (x - arg0) ** 2
#   MUL    pop b, pop a, push a * b
#   MAX    pop b, pop a, push max(a, b)
#   SCALE  top *= arg0
OP_CONST = 0
OP_VAR = 1
OP_POWC = 2
OP_EXPC = 3
OP_POLY = 4
OP_SQDEV = 5
OP_MUL = 6
OP_MAX = 7
OP_SCALE = 8

# Argument transforms applied before program evaluation when integrating
# over the unit interval: u = t, t^2, t(1-t), (1-t)^2, 1-t.
TR_NONE = 0
TR_SQ = 1
TR_CROSS = 2
TR_COMPSQ = 3
TR_COMP = 4


@dataclass(frozen=True, eq=False)
class Program:
    code: np.ndarray  # shape (n, 3), float64, C-contiguous
    pool: np.ndarray  # shape (m,), float64

    def __post_init__(self):
        object.__setattr__(self, "code", np.ascontiguousarray(self.code, dtype=np.float64))
        object.__setattr__(self, "pool", np.ascontiguousarray(self.pool, dtype=np.float64))


def _rows(*rows) -> np.ndarray:
    return np.array(rows, dtype=np.float64).reshape(-1, 3)


def const(value: float) -> Program:
    return Program(_rows((OP_CONST, value, 0.0)), np.empty(0))


def var() -> Program:
    return Program(_rows((OP_VAR, 0.0, 0.0)), np.empty(0))


def powc(exponent: float) -> Program:
    return Program(_rows((OP_POWC, exponent, 0.0)), np.empty(0))


def expc(rate: float) -> Program:
    return Program(_rows((OP_EXPC, rate, 0.0)), np.empty(0))


def poly(coeffs) -> Program:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return Program(_rows((OP_POLY, 0.0, float(coeffs.size))), coeffs)


def sqdev(center: float) -> Program:
    return Program(_rows((OP_SQDEV, center, 0.0)), np.empty(0))


def _concat(a: Program, b: Program) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate two programs, shifting POLY pool offsets of the second."""
    code_b = b.code.copy()
    shift = a.pool.size
    if shift:
        is_poly = code_b[:, 0] == OP_POLY
        code_b[is_poly, 1] += shift
    return np.vstack([a.code, code_b]), np.concatenate([a.pool, b.pool])


def product(a: Program, b: Program) -> Program:
    code, pool = _concat(a, b)
    return Program(np.vstack([code, _rows((OP_MUL, 0.0, 0.0))]), pool)


def maximum(a: Program, b: Program) -> Program:
    code, pool = _concat(a, b)
    return Program(np.vstack([code, _rows((OP_MAX, 0.0, 0.0))]), pool)


def scaled(a: Program, factor: float) -> Program:
    return Program(np.vstack([a.code, _rows((OP_SCALE, factor, 0.0))]), a.pool)
