"""Degree-bounded Taylor series arithmetic.

A :class:`TruncatedSeries` holds coefficients c_0..c_K of a function about a
fixed expansion point (c_k = f^(k) / k!).  Addition, multiplication and the
exponential all preserve the order K, which is what makes the type usable as
a forward high-order automatic-differentiation vehicle: compose the ops,
then read the q-th derivative off coefficient q times q!.

``series_exp_batch`` applies the same exponential recurrence across many
coefficient rows at once (one row per quadrature node); the scalar and batch
paths are kept in lockstep by tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class TruncatedSeries:
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.coefficients) < 1:
            raise ValueError("a truncated series needs at least the constant term")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self, q: int) -> float:
        """q-th derivative at the expansion point, q! * c_q."""
        if not 0 <= q <= self.order:
            raise ValueError(f"derivative order {q} outside series order {self.order}")
        return math.factorial(q) * self.coefficients[q]

    def scale(self, k: float) -> "TruncatedSeries":
        return TruncatedSeries(tuple(k * c for c in self.coefficients))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_orders(self, other)
        return TruncatedSeries(tuple(x + y for x, y in zip(self.coefficients, other.coefficients)))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_orders(self, other)
        a, b = self.coefficients, other.coefficients
        out = [0.0] * len(a)
        for k in range(len(a)):
            out[k] = math.fsum(a[j] * b[k - j] for j in range(k + 1))
        return TruncatedSeries(tuple(out))

    def exp(self) -> "TruncatedSeries":
        """exp of the series by the standard recurrence.

        d_0 = exp(c_0);  d_k = (1/k) * sum_{j=1..k} j * c_j * d_{k-j}.
        """
        c = self.coefficients
        d = [0.0] * len(c)
        d[0] = math.exp(c[0])
        for k in range(1, len(c)):
            d[k] = math.fsum(j * c[j] * d[k - j] for j in range(1, k + 1)) / k
        return TruncatedSeries(tuple(d))


def _check_orders(a: TruncatedSeries, b: TruncatedSeries):
    if a.order != b.order:
        raise ValueError(f"series order mismatch: {a.order} != {b.order}")


def series_lift(coefficients: Sequence[float], order: int | None = None) -> TruncatedSeries:
    """Wrap raw coefficients, optionally checking they carry order K."""
    s = TruncatedSeries(tuple(coefficients))
    if order is not None and s.order != order:
        raise ValueError(f"expected order {order}, got {s.order}")
    return s


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    return a.exp()


def series_exp_batch(coeffs: np.ndarray) -> np.ndarray:
    """Row-wise exponential of Taylor coefficient rows, shape (n, K+1).

    Identical recurrence to :meth:`TruncatedSeries.exp`, vectorized over rows.
    Rows whose constant term underflows exp() simply produce zero rows, which
    is the correct limit for the coverage integrands this backs.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 2:
        raise ValueError("expected a 2-D array of coefficient rows")
    n, width = c.shape
    d = np.zeros_like(c)
    d[:, 0] = np.exp(c[:, 0])
    j = np.arange(1, width)
    jc = c[:, 1:] * j  # pre-scaled j * c_j
    for k in range(1, width):
        acc = np.zeros(n)
        for m in range(1, k + 1):
            acc += jc[:, m - 1] * d[:, k - m]
        d[:, k] = acc / k
    return d
