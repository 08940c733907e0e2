"""Jitted evaluation backend.

Hot loops (stack-program evaluation and globally adaptive Gauss-Kronrod
integration) are compiled with numba. Compiled artifacts are cached on
disk, so only the first process pays compile time.

The numpy twin in numpy_impl.py implements the identical contract; the
active backend is chosen in backends/__init__.py via HHAUDIT_BACKEND.
"""

import numpy as np
from numba import njit

from ._gk_nodes import NODES, WEIGHTS_G, WEIGHTS_K

_EPS = np.finfo(np.float64).eps
_UFLOW = np.finfo(np.float64).tiny

# Opcode/transform constants are inlined as literals for numba; they must
# match hhaudit._programs.
_OP_CONST = 0
_OP_VAR = 1
_OP_POWC = 2
_OP_EXPC = 3
_OP_POLY = 4
_OP_SQDEV = 5
_OP_MUL = 6
_OP_MAX = 7
_OP_SCALE = 8

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1
STATUS_NON_FINITE = 2


@njit(cache=True)
def _eval_into(stack, code, pool, x):
    sp = 0
    for i in range(code.shape[0]):
        op = int(code[i, 0])
        if op == _OP_CONST:
            stack[sp] = code[i, 1]
            sp += 1
        elif op == _OP_VAR:
            stack[sp] = x
            sp += 1
        elif op == _OP_POWC:
            stack[sp] = x ** code[i, 1]
            sp += 1
        elif op == _OP_EXPC:
            stack[sp] = np.exp(code[i, 1] * x)
            sp += 1
        elif op == _OP_POLY:
            off = int(code[i, 1])
            cnt = int(code[i, 2])
            acc = pool[off + cnt - 1]
            for k in range(cnt - 2, -1, -1):
                acc = acc * x + pool[off + k]
            stack[sp] = acc
            sp += 1
        elif op == _OP_SQDEV:
            d = x - code[i, 1]
            stack[sp] = d * d
            sp += 1
        elif op == _OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == _OP_MAX:
            sp -= 1
            if stack[sp] > stack[sp - 1]:
                stack[sp - 1] = stack[sp]
        else:  # _OP_SCALE
            stack[sp - 1] = stack[sp - 1] * code[i, 1]
    return stack[0]


@njit(cache=True)
def eval_program_many(code, pool, xs):
    out = np.empty(xs.size)
    stack = np.empty(code.shape[0])
    for i in range(xs.size):
        out[i] = _eval_into(stack, code, pool, xs[i])
    return out


@njit(cache=True)
def _transform(x, transform):
    if transform == 1:  # t^2
        return x * x
    if transform == 2:  # t(1-t)
        return x * (1.0 - x)
    if transform == 3:  # (1-t)^2
        return (1.0 - x) * (1.0 - x)
    if transform == 4:  # 1-t
        return 1.0 - x
    return x


@njit(cache=True)
def _gk15(code, pool, lo, hi, transform):
    """One Kronrod-15 application with the QUADPACK error estimate.

    Returns (value, err, resabs, ok, bad_x) where ok is False when a
    non-finite integrand value was met at bad_x.
    """
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fv = np.empty(15)
    stack = np.empty(code.shape[0])
    for i in range(15):
        x = center + half * NODES[i]
        v = _eval_into(stack, code, pool, _transform(x, transform))
        if not np.isfinite(v):
            return 0.0, 0.0, 0.0, False, x
        fv[i] = v
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
        if scaled < 1.0:
            err = resasc * scaled
        else:
            err = resasc
    if resabs > _UFLOW / (50.0 * _EPS):
        floor = 50.0 * _EPS * resabs
        if floor > err:
            err = floor
    return value, err, resabs, True, 0.0


@njit(cache=True)
def gk_adaptive(code, pool, a, b, tol, transform, max_depth, cap):
    """Globally adaptive bisection: repeatedly split the worst interval.

    Worst-first refinement lets the error budget concentrate near
    integrable endpoint singularities instead of spreading it uniformly,
    which is what makes kernel-moment integrands with fractional powers
    converge within the depth cap.

    Returns (value, err, neval, status, bad_x).
    """
    lo = np.empty(cap)
    hi = np.empty(cap)
    val = np.empty(cap)
    err = np.empty(cap)
    depth = np.empty(cap, dtype=np.int64)

    v0, e0, resabs0, ok, bad = _gk15(code, pool, a, b, transform)
    if not ok:
        return 0.0, 0.0, 15, STATUS_NON_FINITE, bad
    lo[0] = a
    hi[0] = b
    val[0] = v0
    err[0] = e0
    depth[0] = 0
    n = 1
    neval = 15
    tol_eff = max(tol, 50.0 * _EPS * resabs0)

    status = STATUS_OK
    total_err = e0
    while total_err > tol_eff:
        worst = -1
        werr = -1.0
        for i in range(n):
            if err[i] > werr and depth[i] < max_depth:
                mid = 0.5 * (lo[i] + hi[i])
                if lo[i] < mid < hi[i]:
                    werr = err[i]
                    worst = i
        if worst < 0 or n >= cap:
            status = STATUS_NO_CONVERGENCE
            break
        left = lo[worst]
        right = hi[worst]
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
        lo[n] = mid
        hi[n] = right
        val[n] = vr
        err[n] = er
        depth[n] = d
        n += 1
        total_err = 0.0
        for i in range(n):
            total_err += err[i]

    value = 0.0
    total_err = 0.0
    for i in range(n):
        value += val[i]
        total_err += err[i]
    return value, total_err, neval, status, 0.0
