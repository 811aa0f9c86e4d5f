"""Pure-numpy implementations of the hot kernels.

Semantics here are the reference; the compiled extension in _speedups.pyx
must match bit-for-bit up to the usual floating-point reassociation slack.
"""

import numpy as np

BACKEND = "pure"

OP_CONST = 0
OP_POW_LEFT = 1
OP_POW_RIGHT = 2
OP_EXP = 3
OP_PWL = 4
OP_STEP = 5
OP_PPOLY = 6
OP_ADD = 7
OP_MUL = 8
OP_POWER = 9
OP_ABS = 10


def eval_program(ops, fargs, iargs, data, xs, stack_depth):
    """Run a postfix spec program over an array of abscissae."""
    stack = []
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for k in range(len(ops)):
            op = ops[k]
            if op == OP_CONST:
                stack.append(np.full_like(xs, fargs[k, 0]))
            elif op == OP_POW_LEFT:
                c, alpha, a = fargs[k]
                t = xs - a
                if alpha == 0.0:
                    stack.append(np.full_like(xs, c))
                else:
                    stack.append(c * np.power(t, alpha))
            elif op == OP_POW_RIGHT:
                c, alpha, b = fargs[k]
                t = b - xs
                if alpha == 0.0:
                    stack.append(np.full_like(xs, c))
                else:
                    stack.append(c * np.power(t, alpha))
            elif op == OP_EXP:
                c, beta, _ = fargs[k]
                stack.append(c * np.exp(beta * xs))
            elif op == OP_PWL:
                off, n = iargs[k]
                kx = data[off : off + n]
                kv = data[off + n : off + 2 * n]
                stack.append(np.interp(xs, kx, kv))
            elif op == OP_STEP:
                off, n = iargs[k]
                breaks = data[off : off + n + 1]
                values = data[off + n + 1 : off + 2 * n + 1]
                idx = np.clip(np.searchsorted(breaks, xs, side="right") - 1, 0, n - 1)
                stack.append(values[idx])
            elif op == OP_PPOLY:
                off, n = iargs[k]
                deg = int(fargs[k, 0])
                breaks = data[off : off + n + 1]
                coeffs = data[off + n + 1 : off + n + 1 + n * (deg + 1)].reshape(
                    n, deg + 1
                )
                idx = np.clip(np.searchsorted(breaks, xs, side="right") - 1, 0, n - 1)
                t = xs - breaks[idx]
                acc = coeffs[idx, deg].copy()
                for j in range(deg - 1, -1, -1):
                    acc = acc * t + coeffs[idx, j]
                stack.append(acc)
            elif op == OP_ADD:
                rhs = stack.pop()
                stack[-1] = stack[-1] + rhs
            elif op == OP_MUL:
                rhs = stack.pop()
                stack[-1] = stack[-1] * rhs
            elif op == OP_POWER:
                e = fargs[k, 0]
                stack[-1] = np.power(stack[-1], e)
            elif op == OP_ABS:
                stack[-1] = np.abs(stack[-1])
            else:  # pragma: no cover - compiler emits known opcodes only
                raise ValueError(f"bad opcode {op}")
    return stack[-1]


def shoot_quasilinear(r_half, m_half, lam, h, p, u0=0.0, w0=None):
    """RK4 march of (R(x) |u'|^(p-1) u')' = -lam m(x) |u|^(p-1) u.

    r_half and m_half hold coefficient values on the half-step grid
    (2n + 1 values for n steps).  Starts from (u0, w0) where
    w = R |u'|^(p-1) u'; the default start is u(a) = 0, u'(a) = 1.
    Returns (u_end, w_end, first_cross) where first_cross is the step
    index at which u first became <= 0 (or -1 if u stayed positive).
    """
    n = (len(r_half) - 1) // 2
    inv_p = 1.0 / p
    u = float(u0)
    w = float(r_half[0]) if w0 is None else float(w0)

    def slope(ui, wi, R, m):
        if wi >= 0.0:
            du = (wi / R) ** inv_p
        else:
            du = -((-wi / R) ** inv_p)
        dw = -lam * m * abs(ui) ** (p - 1.0) * ui if p != 1.0 else -lam * m * ui
        return du, dw

    first_cross = -1
    for i in range(n):
        r0 = r_half[2 * i]
        rh = r_half[2 * i + 1]
        r1 = r_half[2 * i + 2]
        m0 = m_half[2 * i]
        mh = m_half[2 * i + 1]
        m1 = m_half[2 * i + 2]
        k1u, k1w = slope(u, w, r0, m0)
        k2u, k2w = slope(u + 0.5 * h * k1u, w + 0.5 * h * k1w, rh, mh)
        k3u, k3w = slope(u + 0.5 * h * k2u, w + 0.5 * h * k2w, rh, mh)
        k4u, k4w = slope(u + h * k3u, w + h * k3w, r1, m1)
        u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        if u <= 0.0 and (i >= 1 or u0 > 0.0) and first_cross < 0:
            first_cross = i
            break
    return u, w, first_cross
