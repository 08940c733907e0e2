"""Pure-numpy fallback backend.

Implements the same contract as numba_impl without JIT compilation:
program evaluation is vectorized over sample arrays and the adaptive
integrator runs its worst-first loop in Python. Selected by setting
HHAUDIT_BACKEND=numpy (or automatically when numba is unavailable).
"""

import numpy as np

from ._gk_nodes import NODES, WEIGHTS_G, WEIGHTS_K
from .._programs import (
    OP_CONST,
    OP_EXPC,
    OP_MAX,
    OP_MUL,
    OP_POLY,
    OP_POWC,
    OP_SCALE,
    OP_SQDEV,
    OP_VAR,
)

_EPS = np.finfo(np.float64).eps
_UFLOW = np.finfo(np.float64).tiny

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1
STATUS_NON_FINITE = 2


def eval_program_many(code, pool, xs):
    xs = np.asarray(xs, dtype=np.float64)
    stack = []
    for i in range(code.shape[0]):
        op = int(code[i, 0])
        if op == OP_CONST:
            stack.append(np.full_like(xs, code[i, 1]))
        elif op == OP_VAR:
            stack.append(xs.copy())
        elif op == OP_POWC:
            stack.append(xs ** code[i, 1])
        elif op == OP_EXPC:
            stack.append(np.exp(code[i, 1] * xs))
        elif op == OP_POLY:
            off = int(code[i, 1])
            cnt = int(code[i, 2])
            acc = np.full_like(xs, pool[off + cnt - 1])
            for k in range(cnt - 2, -1, -1):
                acc = acc * xs + pool[off + k]
            stack.append(acc)
        elif op == OP_SQDEV:
            d = xs - code[i, 1]
            stack.append(d * d)
        elif op == OP_MUL:
            b = stack.pop()
            stack[-1] = stack[-1] * b
        elif op == OP_MAX:
            b = stack.pop()
            stack[-1] = np.maximum(stack[-1], b)
        elif op == OP_SCALE:
            stack[-1] = stack[-1] * code[i, 1]
        else:
            raise ValueError(f"unknown opcode {op}")
    return stack[0]


def _apply_transform(xs, transform):
    if transform == 1:
        return xs * xs
    if transform == 2:
        return xs * (1.0 - xs)
    if transform == 3:
        return (1.0 - xs) * (1.0 - xs)
    if transform == 4:
        return 1.0 - xs
    return xs


def _gk15(code, pool, lo, hi, transform):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = center + half * NODES
    fv = eval_program_many(code, pool, _apply_transform(xs, transform))
    bad = ~np.isfinite(fv)
    if bad.any():
        return 0.0, 0.0, 0.0, False, float(xs[np.argmax(bad)])
    resk = 0.0
    resg = 0.0
    resabs = 0.0
    for i in range(15):
        resk += WEIGHTS_K[i] * fv[i]
        resg += WEIGHTS_G[i] * fv[i]
        resabs += WEIGHTS_K[i] * abs(fv[i])
    reskh = 0.5 * resk
    resasc = 0.0
    for i in range(15):
        resasc += WEIGHTS_K[i] * abs(fv[i] - reskh)
    dh = abs(half)
    value = resk * half
    resabs *= dh
    resasc *= dh
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        scaled = (200.0 * err / resasc) ** 1.5
        err = resasc * scaled if scaled < 1.0 else resasc
    if resabs > _UFLOW / (50.0 * _EPS):
        err = max(err, 50.0 * _EPS * resabs)
    return value, err, resabs, True, 0.0


def gk_adaptive(code, pool, a, b, tol, transform, max_depth, cap):
    """Worst-first adaptive bisection; mirrors numba_impl.gk_adaptive."""
    v0, e0, resabs0, ok, bad = _gk15(code, pool, a, b, transform)
    if not ok:
        return 0.0, 0.0, 15, STATUS_NON_FINITE, bad
    lo = [a]
    hi = [b]
    val = [v0]
    err = [e0]
    depth = [0]
    neval = 15
    tol_eff = max(tol, 50.0 * _EPS * resabs0)

    status = STATUS_OK
    total_err = e0
    while total_err > tol_eff:
        worst = -1
        werr = -1.0
        for i in range(len(err)):
            if err[i] > werr and depth[i] < max_depth:
                mid = 0.5 * (lo[i] + hi[i])
                if lo[i] < mid < hi[i]:
                    werr = err[i]
                    worst = i
        if worst < 0 or len(err) >= cap:
            status = STATUS_NO_CONVERGENCE
            break
        left, right = lo[worst], hi[worst]
        mid = 0.5 * (left + right)
        vl, el, _, okl, badl = _gk15(code, pool, left, mid, transform)
        if not okl:
            return 0.0, 0.0, neval + 15, STATUS_NON_FINITE, badl
        vr, er, _, okr, badr = _gk15(code, pool, mid, right, transform)
        if not okr:
            return 0.0, 0.0, neval + 30, STATUS_NON_FINITE, badr
        neval += 30
        d = depth[worst] + 1
        hi[worst] = mid
        val[worst] = vl
        err[worst] = el
        depth[worst] = d
        lo.append(mid)
        hi.append(right)
        val.append(vr)
        err.append(er)
        depth.append(d)
        total_err = sum(err)

    value = 0.0
    total_err = 0.0
    for i in range(len(val)):
        value += val[i]
        total_err += err[i]
    return value, total_err, neval, status, 0.0
