"""Hot numeric kernels: reflected-path scans and Monte Carlo cost totals.

Two interchangeable backends.  The numba backend compiles the per-step
recurrences with @njit; the numpy backend expresses the same recurrences as
cumsum / running-max scans (the reflected state admits the closed form
post_n = C_n + min(post_0, x_bar - runmax(C)_n) with C the increment
cumsum).  Set the environment variable SRL_NO_NUMBA=1 before import to force
the numpy path; the two agree to roundoff and each is bit-reproducible.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("SRL_NO_NUMBA", "").strip() not in ("", "0")

if not _FORCE_NUMPY:
    try:
        import numba as nb
    except ImportError:
        _FORCE_NUMPY = True


# ---------------------------------------------------------------------------
# numpy scan backend

def _reflect_path_np(x0, x_bar, incs):
    """Pre/post states and per-interval control overshoot along one path.

    pre[0] = x0; post[n] = state after the jump at t_n; the only possibly
    nonzero jump is at t_0, later steps are projected at interval end.
    Returns (pre, post, overshoot) with overshoot[n] the xi increment
    accrued over (t_n, t_{n+1}).
    """
    n = incs.shape[-1]
    if n == 0:
        empty = np.empty(incs.shape)
        return empty, empty.copy(), empty.copy()
    c_sum = np.cumsum(incs, axis=-1)
    m0 = min(x0, x_bar) if np.ndim(x0) == 0 else np.minimum(x0, x_bar)
    shape = incs.shape[:-1] + (n,)
    post = np.empty(shape)
    post[..., 0] = m0
    if n > 1:
        runmax = np.maximum.accumulate(c_sum[..., :-1], axis=-1)
        post[..., 1:] = c_sum[..., :-1] + np.minimum(m0, x_bar - runmax)
    pre = post.copy()
    pre[..., 0] = x0
    overshoot = np.maximum(post + incs - x_bar, 0.0)
    return pre, post, overshoot


def _reflect_totals_np(x0, x_bar, incs, a, c, beta, dt):
    """Discounted running + control cost per path, initial jump included."""
    _, post, overshoot = _reflect_path_np(x0, x_bar, incs)
    t = dt * np.arange(incs.shape[-1])
    disc = np.exp(-beta * t)
    run = np.sum(disc * np.exp(a * post) * dt, axis=-1)
    ctrl = np.sum(disc * overshoot, axis=-1) * c
    return run + ctrl + c * max(x0 - x_bar, 0.0)


# ---------------------------------------------------------------------------
# numba loop backend

if not _FORCE_NUMPY:

    @nb.njit(cache=True)
    def _reflect_path_nb(x0, x_bar, incs):
        n = incs.shape[0]
        pre = np.empty(n)
        post = np.empty(n)
        overshoot = np.empty(n)
        pre[0] = x0
        x = min(x0, x_bar)
        for i in range(n):
            post[i] = x
            nxt = x + incs[i]
            overshoot[i] = max(nxt - x_bar, 0.0)
            x = min(nxt, x_bar)
            if i + 1 < n:
                pre[i + 1] = x
        return pre, post, overshoot

    @nb.njit(cache=True)
    def _reflect_totals_nb(x0, x_bar, incs, a, c, beta, dt):
        m, n = incs.shape
        out = np.empty(m)
        jump0 = c * max(x0 - x_bar, 0.0)
        for j in range(m):
            x = min(x0, x_bar)
            acc = jump0
            for i in range(n):
                disc = np.exp(-beta * dt * i)
                acc += disc * np.exp(a * x) * dt
                nxt = x + incs[j, i]
                if nxt > x_bar:
                    acc += disc * c * (nxt - x_bar)
                    x = x_bar
                else:
                    x = nxt
            out[j] = acc
        return out

    def reflect_path(x0, x_bar, incs):
        incs = np.ascontiguousarray(incs, dtype=np.float64)
        if incs.shape[-1] == 0:
            return _reflect_path_np(x0, x_bar, incs)
        return _reflect_path_nb(float(x0), float(x_bar), incs)

    def reflect_totals(x0, x_bar, incs, a, c, beta, dt):
        return _reflect_totals_nb(float(x0), float(x_bar),
                                  np.ascontiguousarray(incs, dtype=np.float64),
                                  float(a), float(c), float(beta), float(dt))

    BACKEND = "numba"
else:
    reflect_path = _reflect_path_np
    reflect_totals = _reflect_totals_np
    BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND
