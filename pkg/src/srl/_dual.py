"""Vectorized forward-mode derivatives with a fixed 3-slot gradient.

A ``Dual`` carries a value array and the three partial derivatives with
respect to the learnable parameter triple.  The evaluators in
:mod:`srl.params` and :mod:`srl._gauss` are written against the module-level
math helpers below, so the same code path produces plain values (floats /
ndarrays in, same out) and exact forward-mode gradients (Duals in, Duals
out).
"""

from __future__ import annotations

import numpy as np
from scipy import special

_SQRT2PI = np.sqrt(2.0 * np.pi)


def _align(grad, shape):
    """Broadcast a gradient stack of shape (3,) + s to (3,) + shape.

    The value axes are right-aligned (numpy semantics), so a grad carried by
    a scalar-valued Dual picks up new value axes after the leading slot.
    """
    grad = np.asarray(grad, dtype=float)
    want = (3,) + tuple(shape)
    if grad.shape == want:
        return grad
    grad = grad.reshape((3,) + (1,) * (len(want) - grad.ndim) + grad.shape[1:])
    return np.broadcast_to(grad, want)


class Dual:
    __slots__ = ("val", "grad")

    # make ndarray + Dual dispatch to our reflected operators instead of
    # numpy trying (and failing) to broadcast elementwise
    __array_ufunc__ = None

    def __init__(self, val, grad):
        self.val = np.asarray(val, dtype=float)
        self.grad = _align(grad, self.val.shape)

    @staticmethod
    def seed(values):
        """Three Duals for the parameter triple, gradients seeded to I."""
        eye = np.eye(3)
        return tuple(Dual(v, eye[i]) for i, v in enumerate(values))

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        return Dual(other, np.zeros((3,) + np.shape(other)))

    def __add__(self, other):
        o = self._lift(other)
        v = self.val + o.val
        return Dual(v, _align(self.grad, v.shape) + _align(o.grad, v.shape))

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __sub__(self, other):
        o = self._lift(other)
        v = self.val - o.val
        return Dual(v, _align(self.grad, v.shape) - _align(o.grad, v.shape))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        v = self.val * o.val
        return Dual(v, _align(self.grad, v.shape) * o.val
                    + _align(o.grad, v.shape) * self.val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        v = self.val / o.val
        return Dual(v, (_align(self.grad, v.shape)
                        - v * _align(o.grad, v.shape)) / o.val)

    def __rtruediv__(self, other):
        return self._lift(other) / self


def exp(x):
    if isinstance(x, Dual):
        v = np.exp(x.val)
        return Dual(v, v * x.grad)
    return np.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(np.log(x.val), x.grad / x.val)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Dual):
        v = np.sqrt(x.val)
        return Dual(v, 0.5 * x.grad / v)
    return np.sqrt(x)


def npdf(x):
    """Standard normal density."""
    if isinstance(x, Dual):
        v = np.exp(-0.5 * x.val ** 2) / _SQRT2PI
        return Dual(v, -x.val * v * x.grad)
    return np.exp(-0.5 * np.asarray(x) ** 2) / _SQRT2PI


def ndtr(x):
    """Standard normal CDF."""
    if isinstance(x, Dual):
        v = special.ndtr(x.val)
        d = np.exp(-0.5 * x.val ** 2) / _SQRT2PI
        return Dual(v, d * x.grad)
    return special.ndtr(x)


def log_ndtr(x):
    """log of the standard normal CDF, stable far into the left tail."""
    if isinstance(x, Dual):
        lv = special.log_ndtr(x.val)
        # d/dx log N(x) = phi(x)/N(x), computed in log space
        ratio = np.exp(-0.5 * x.val ** 2 - np.log(_SQRT2PI) - lv)
        return Dual(lv, ratio * x.grad)
    return special.log_ndtr(x)


def value_of(x):
    return x.val if isinstance(x, Dual) else np.asarray(x, dtype=float)


def where(cond, a, b):
    if isinstance(a, Dual) or isinstance(b, Dual):
        a = a if isinstance(a, Dual) else Dual(np.broadcast_to(a, np.shape(cond)), np.zeros((3,) + np.shape(cond)))
        b = b if isinstance(b, Dual) else Dual(np.broadcast_to(b, np.shape(cond)), np.zeros((3,) + np.shape(cond)))
        return Dual(np.where(cond, a.val, b.val), np.where(cond, a.grad, b.grad))
    return np.where(cond, a, b)
