"""Gauss hypergeometric function on z <= 0 and the regularized incomplete gamma.

2F1 evaluation strategy:

* z == 0 (or a zero upper parameter): exactly 1.
* moderate |z|: Pfaff transform to w = z/(z-1) in [0, 1) and sum the series
  there; term count grows like 35 * (1 + |z|), so this path is capped.
* large |z|: the standard z -> 1/z linear transformation.  The incoming
  argument here is a threshold t (via z = -t), and the rate integral samples
  thresholds up to ~1e12 where the Pfaff series would need tens of millions
  of terms, so this branch is not optional.  It requires a - b to stay away
  from integers, which holds for every call the coverage stack makes
  (a - b = -2/eta - M with eta > 2).

Both paths sum until a term drops below 1e-15 of the partial sum.
"""

from __future__ import annotations

import math

from scipy import special as _sp

_TERM_EPS = 1e-15
_MAX_TERMS = 500_000
_LARGE_Z_SWITCH = 8.0
_INTEGER_EPS = 1e-9


class HypergeometricError(ValueError):
    """Invalid parameters or a series that cannot converge."""


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0.5 and abs(x - round(x)) < _INTEGER_EPS


def _series_2f1(a: float, b: float, c: float, w: float) -> float:
    """Defining series at argument w, |w| < 1."""
    term = 1.0
    total = 1.0
    for k in range(_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        total += term
        if abs(term) <= _TERM_EPS * abs(total):
            return total
    raise HypergeometricError(
        f"2F1 series did not converge (argument {w!r} too close to 1)"
    )


def _pfaff(a: float, b: float, c: float, z: float) -> float:
    # 2F1(a,b;c;z) = (1-z)^(-b) 2F1(c-a, b; c; z/(z-1)), maps z<=0 into [0,1)
    w = z / (z - 1.0)
    return (1.0 - z) ** (-b) * _series_2f1(c - a, b, c, w)


def _large_z(a: float, b: float, c: float, z: float, ln_shift: float = 0.0) -> float:
    # DLMF 15.8.2 linear transformation for |z| -> inf, real z < 0.  The
    # optional ln_shift multiplies the result by exp(ln_shift) inside the
    # log-space scaling, which lets callers form (-z)^n * 2F1 without overflow.
    if abs((a - b) - round(a - b)) < _INTEGER_EPS:
        raise HypergeometricError(
            f"large-argument path needs non-integer a-b, got a-b={a - b!r}"
        )
    lz = math.log(-z)

    def half(p: float, q: float) -> float:
        # Gamma(c)Gamma(q-p) / (Gamma(q)Gamma(c-p)) * (-z)^(-p) * 2F1(p, 1-c+p; 1-q+p; 1/z)
        num_ln, num_sg = _lgamma_sign(c)
        t_ln, t_sg = _lgamma_sign(q - p)
        num_ln += t_ln
        num_sg *= t_sg
        den_ln, den_sg = _lgamma_sign(q)
        t_ln, t_sg = _lgamma_sign(c - p)
        den_ln += t_ln
        den_sg *= t_sg
        scale_ln = num_ln - den_ln - p * lz + ln_shift
        if scale_ln < -745.0:
            return 0.0
        tail = _series_2f1(p, 1.0 - c + p, 1.0 - q + p, 1.0 / z)
        return num_sg * den_sg * math.exp(scale_ln) * tail

    return half(a, b) + half(b, a)


def _lgamma_sign(x: float) -> tuple[float, float]:
    if x <= 0.0 and abs(x - round(x)) < _INTEGER_EPS:
        raise HypergeometricError(f"gamma pole at {x!r} in 2F1 transformation")
    return math.lgamma(x), math.copysign(1.0, _sp.gammasgn(x))


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """2F1(a, b; c; z) for real parameters and z <= 0."""
    if _is_nonpositive_int(c):
        raise HypergeometricError(f"c={c!r} is a non-positive integer")
    if z > 0.0:
        raise HypergeometricError(f"only z <= 0 is supported, got z={z!r}")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    if -z <= _LARGE_Z_SWITCH:
        return _pfaff(a, b, c, z)
    return _large_z(a, b, c, z)


def gauss_2f1_shift_table(a: float, b: float, c: float, z: float, count: int) -> list[float]:
    """[2F1(a+n, b+n; c+n; z) for n in 0..count-1].

    These are the factors of the contiguous-derivative relation
    d/dz 2F1(a,b;c;z) = (a b / c) 2F1(a+1, b+1; c+1; z), applied recursively.
    """
    return [gauss_2f1(a + n, b + n, c + n, z) for n in range(count)]


def gauss_2f1_scaled_shift_table(
    a: float, b: float, c: float, z: float, count: int
) -> list[float]:
    """[(-z)^n * 2F1(a+n, b+n; c+n; z) for n in 0..count-1], overflow-safe.

    The coverage series needs the n-th derivative factor times (-z)^n; forming
    the product inside the log-space large-argument branch keeps it bounded
    (it behaves like (-z)^(-a) there) even for |z| ~ 1e12 where (-z)^n alone
    would overflow.
    """
    if z > 0.0:
        raise HypergeometricError(f"only z <= 0 is supported, got z={z!r}")
    if z == 0.0:
        return [1.0] + [0.0] * (count - 1)
    if -z <= _LARGE_Z_SWITCH:
        out = []
        power = 1.0
        for n in range(count):
            out.append(power * gauss_2f1(a + n, b + n, c + n, z))
            power *= -z
        return out
    lz = math.log(-z)
    return [_large_z(a + n, b + n, c + n, z, ln_shift=n * lz) for n in range(count)]


def upper_incomplete_gamma_reg(m: float, x: float) -> float:
    """Regularized upper incomplete gamma Gamma(m, x) / Gamma(m).

    Integer m uses the finite Poisson-tail sum exp(-x) * sum_{k<m} x^k / k!,
    built multiplicatively so no term can overflow; non-integer m (and the
    exp-underflow corner x > 700) delegate to SciPy's continued-fraction
    implementation.
    """
    if m <= 0.0:
        raise ValueError(f"shape must be positive, got m={m!r}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got x={x!r}")
    if x == 0.0:
        return 1.0
    m_int = round(m)
    if abs(m - m_int) < _INTEGER_EPS and m_int >= 1 and x <= 700.0:
        term = math.exp(-x)
        total = term
        for k in range(1, m_int):
            term *= x / k
            total += term
        return min(total, 1.0)
    return float(_sp.gammaincc(m, x))
