"""Truncated Gaussian moments used by the kernel-convolution value functions.

All helpers work for Y ~ Normal(m, s2) and are written in log space so that
large exponents stay finite.  Inputs may be floats, ndarrays, or
:class:`srl._dual.Dual` parameter bundles.
"""

from __future__ import annotations

from . import _dual as D


def exp_moment_below(kappa, m, s2, s, u):
    """E[exp(kappa*Y) 1{Y <= u}] for Y ~ N(m, s2)."""
    return D.exp(kappa * m + 0.5 * kappa * kappa * s2
                 + D.log_ndtr((u - m - kappa * s2) / s))


def exp_moment_above(kappa, m, s2, s, u):
    """E[exp(kappa*Y) 1{Y > u}]."""
    return D.exp(kappa * m + 0.5 * kappa * kappa * s2
                 + D.log_ndtr((m + kappa * s2 - u) / s))


def prob_above(m, s, u):
    """P(Y > u)."""
    return D.ndtr((m - u) / s)


def lin_moment_above(m, s, u):
    """E[Y 1{Y > u}] = m*N((m-u)/s) + s*phi((u-m)/s)."""
    z = (m - u) / s
    return m * D.ndtr(z) + s * D.npdf(z)
