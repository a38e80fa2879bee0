"""Bracketed scalar root finding: bisection safeguarding secant steps."""

import math

from .errors import InfeasibleDesignError


def bisect_secant(func, a, b, ftol=1e-9, max_iter=200, fa=None, fb=None):
    """Root of ``func`` on ``[a, b]`` where the endpoint values change sign.

    Each iteration tries a secant step through the current bracket ends and
    falls back to bisection when the step leaves the bracket or fails to
    shrink it by half over two iterations.

    Returns:
        (x, fx, iterations)

    Raises:
        InfeasibleDesignError: if the endpoints do not bracket a sign change,
            or if ``max_iter`` is exhausted before ``|f| <= ftol``.
    """
    fa = func(a) if fa is None else fa
    fb = func(b) if fb is None else fb
    if fa == 0.0:
        return a, fa, 0
    if fb == 0.0:
        return b, fb, 0
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise InfeasibleDesignError(
            f"no sign change on [{a:.9g}, {b:.9g}]: f(a) = {fa:.9g}, f(b) = {fb:.9g}"
        )

    width = abs(b - a)
    x, fx = a, fa
    for it in range(1, max_iter + 1):
        x = b - fb * (b - a) / (fb - fa)
        lo, hi = min(a, b), max(a, b)
        if not lo < x < hi:
            x = 0.5 * (a + b)
        fx = func(x)
        if abs(fx) <= ftol:
            return x, fx, it
        if math.copysign(1.0, fx) == math.copysign(1.0, fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
        new_width = abs(b - a)
        if new_width > 0.5 * width:
            m = 0.5 * (a + b)
            fm = func(m)
            if fm == 0.0:
                return m, fm, it
            if math.copysign(1.0, fm) == math.copysign(1.0, fa):
                a, fa = m, fm
            else:
                b, fb = m, fm
        width = abs(b - a)
        if width <= 4.0 * math.ulp(max(abs(a), abs(b))):
            x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
            if abs(fx) <= ftol:
                return x, fx, it
            break
    raise InfeasibleDesignError(
        f"root not converged after {max_iter} iterations: x = {x:.12g}, f = {fx:.3g}"
    )
