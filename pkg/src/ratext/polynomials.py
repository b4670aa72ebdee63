"""Dense real polynomials, Hermite and generalized Laguerre constructors,
Sturm root counting and the Kienast-Lawton-Hahn zero-count predicate.

All coefficient arrays are in ascending degree order.  Arithmetic is plain
double precision; the degrees involved stay small (≲ 25).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegeneratePolynomialError

#: relative threshold used by :meth:`Polynomial.allclose`
EQ_TOL = 1e-10
#: absolute threshold below which a polynomial counts as degenerate
DEGENERATE_TOL = 1e-300
# relative size under which a Sturm remainder is treated as zero
_STURM_ZERO = 1e-12
# relative size under which a value at an interval endpoint is a root
_ENDPOINT_ZERO = 1e-13


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Real univariate polynomial ``sum(coeffs[k] * u**k)``.

    Parameters
    ----------
    coeffs : array_like
        Coefficients in ascending degree.  Trailing exact zeros are trimmed.
    var : str
        Label of the variable the polynomial is written in.  Documentation
        only; arithmetic does not check it.
    """

    coeffs: np.ndarray
    var: str = "u"

    def __post_init__(self):
        c = np.array(np.atleast_1d(self.coeffs), dtype=float)
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, t):
        return npoly.polyval(t, self.coeffs)

    def __repr__(self):
        return f"Polynomial({np.array2string(self.coeffs, precision=6)}, var={self.var!r})"

    def __len__(self):
        return len(self.coeffs)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other.coeffs
        return np.array([float(other)])

    def __add__(self, other):
        return Polynomial(npoly.polyadd(self.coeffs, self._coerce(other)), self.var)

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(npoly.polysub(self.coeffs, self._coerce(other)), self.var)

    def __rsub__(self, other):
        return Polynomial(npoly.polysub(self._coerce(other), self.coeffs), self.var)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs), self.var)
        return Polynomial(self.coeffs * float(other), self.var)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(self.coeffs / float(scalar), self.var)

    def __neg__(self):
        return Polynomial(-self.coeffs, self.var)

    # calculus and substitutions -------------------------------------------
    def deriv(self, m: int = 1) -> "Polynomial":
        if self.degree < m:
            return Polynomial([0.0], self.var)
        return Polynomial(npoly.polyder(self.coeffs, m), self.var)

    def scaled(self, scale: float, var: str | None = None) -> "Polynomial":
        """Return ``q(u) = p(scale * u)``."""
        powers = float(scale) ** np.arange(len(self.coeffs))
        return Polynomial(self.coeffs * powers, var or self.var)

    def of_square(self, scale: float, var: str | None = None) -> "Polynomial":
        """Return ``q(x) = p(scale * x**2)``."""
        c = np.zeros(2 * len(self.coeffs) - 1)
        c[::2] = self.scaled(scale).coeffs
        return Polynomial(c, var or self.var)

    def shifted(self, shift: float) -> "Polynomial":
        """Return ``q(u) = p(u + shift)``."""
        out = np.zeros(1)
        for c in self.coeffs[::-1]:
            out = npoly.polyadd(npoly.polymul(out, [shift, 1.0]), [c])
        return Polynomial(out, self.var)

    def reversed(self, var: str | None = None) -> "Polynomial":
        """Return ``u**deg * p(1/u)``."""
        return Polynomial(self.coeffs[::-1], var or self.var)

    def times_var(self, power: int = 1) -> "Polynomial":
        return Polynomial(np.concatenate([np.zeros(power), self.coeffs]), self.var)

    def with_var(self, var: str) -> "Polynomial":
        return Polynomial(self.coeffs, var)

    def allclose(self, other: "Polynomial", tol: float = EQ_TOL) -> bool:
        """Coefficientwise comparison relative to the largest coefficient."""
        diff = npoly.polysub(self.coeffs, other.coeffs)
        scale = max(np.max(np.abs(self.coeffs)), np.max(np.abs(other.coeffs)))
        if scale == 0.0:
            return True
        return bool(np.max(np.abs(diff)) <= tol * scale)

    def real_roots(self, imag_tol: float = 1e-9) -> np.ndarray:
        """Real roots from the companion matrix (approximate; for plotting
        and pole exclusion, not for counting)."""
        if self.degree < 1:
            return np.zeros(0)
        r = npoly.polyroots(self.coeffs)
        scale = np.maximum(1.0, np.abs(r))
        return np.sort(r[np.abs(r.imag) <= imag_tol * scale].real)


# --------------------------------------------------------------------------
# classical polynomials
# --------------------------------------------------------------------------
def laguerre_eval(n: int, alpha: float, t):
    """Evaluate the generalized Laguerre polynomial by its three-term recurrence.

    ``(k+1) L_{k+1} = (2k + 1 + alpha - t) L_k - (k + alpha) L_{k-1}``

    Runs in extended precision: for negative ``alpha`` the final value can be
    orders of magnitude below the intermediate ones.
    """
    t = np.asarray(t, dtype=float)
    if n == 0:
        out = np.ones_like(t)
        return out if out.ndim else float(out)
    ld = np.longdouble
    tl, al = t.astype(ld), ld(alpha)
    prev = np.ones_like(tl)
    cur = 1 + al - tl
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + al - tl) * cur - (k + al) * prev) / (k + 1)
    cur = cur.astype(float)
    return cur if np.ndim(cur) else float(cur)


def laguerre_poly(n: int, alpha: float, scale: float = 1.0, var: str = "u") -> Polynomial:
    """Coefficient form of ``L_n^(alpha)(scale * u)``.

    Coefficients are built from the closed form
    ``c_k = (-1)^k / k! * prod_{i=k+1}^{n} (alpha + i) / (n - k)!`` so that the
    constant terms vanish exactly when ``alpha`` is in ``{-n, ..., -1}``.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    c = np.empty(n + 1)
    binom = 1.0  # binom(n + alpha, n - k) for k = n
    for k in range(n, -1, -1):
        if k < n:
            binom *= (alpha + k + 1) / (n - k)
        c[k] = (-1) ** k * binom / math.factorial(k)
    return Polynomial(c, var).scaled(scale)


def hermite_poly(n: int, var: str = "u") -> Polynomial:
    """Physicists' Hermite polynomial from its explicit sum."""
    c = np.zeros(n + 1)
    for j in range(n // 2 + 1):
        c[n - 2 * j] = (
            (-1) ** j * math.factorial(n) * 2.0 ** (n - 2 * j)
            / (math.factorial(j) * math.factorial(n - 2 * j))
        )
    return Polynomial(c, var)


class HermiteLaguerre(NamedTuple):
    """``H_n(i u) = i**parity * factor * u**parity * L_m^(alpha)(-u**2)``."""

    m: int
    parity: int  # 0 even, 1 odd
    alpha: float
    factor: float

    @property
    def even(self) -> bool:
        return self.parity == 0


def hermite_imaginary_as_laguerre(n: int) -> HermiteLaguerre:
    """Reduce a Hermite polynomial of imaginary argument to a real Laguerre one."""
    m, parity = divmod(n, 2)
    if parity == 0:
        return HermiteLaguerre(m, 0, -0.5, (-1) ** m * 4.0**m * math.factorial(m))
    return HermiteLaguerre(m, 1, 0.5, (-1) ** m * 2.0 ** (2 * m + 1) * math.factorial(m))


def hermite_imaginary_real_part(n: int, scale: float = 1.0, var: str = "x") -> Polynomial:
    """Real polynomial ``D(x)`` with ``H_n(i * scale * x) = i**(n mod 2) * D(x)``."""
    red = hermite_imaginary_as_laguerre(n)
    lag = laguerre_poly(red.m, red.alpha, var=var).of_square(-(scale**2))
    if red.parity:
        lag = lag.times_var() * scale
    return lag * red.factor


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``a (a+1) ... (a+n-1)``."""
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


def glp_identity_residual(n: int, beta: float, samples: Sequence[float]) -> float:
    """Largest residual of the two contiguous Laguerre identities

    ``L_n^b + L_{n-1}^{b+1} = L_n^{b+1}`` and
    ``z L_{n-1}^{b+1} = (n+b) L_{n-1}^b - n L_n^b``.

    Each pointwise residual is divided by ``max(1, sum of |terms|)`` so the
    measure stays meaningful where the polynomials are large.
    """
    z = np.asarray(samples, dtype=float)
    if z.size == 0:
        raise ValueError("samples must be non-empty")
    a = laguerre_eval(n, beta, z)
    b = laguerre_eval(n - 1, beta + 1, z)
    c = laguerre_eval(n, beta + 1, z)
    d = laguerre_eval(n - 1, beta, z)
    first = (a + b - c) / np.maximum(1.0, np.abs(a) + np.abs(b) + np.abs(c))
    t1, t2, t3 = z * b, (n + beta) * d, n * a
    second = (t1 - t2 + t3) / np.maximum(1.0, np.abs(t1) + np.abs(t2) + np.abs(t3))
    return float(max(np.max(np.abs(first)), np.max(np.abs(second))))


# --------------------------------------------------------------------------
# root counting
# --------------------------------------------------------------------------
def _normalized(c: np.ndarray) -> np.ndarray:
    return c / np.max(np.abs(c))


def _trim_relative(c: np.ndarray, tol: float) -> np.ndarray:
    scale = np.max(np.abs(c)) if c.size else 0.0
    keep = np.flatnonzero(np.abs(c) > tol * scale)
    return c[: keep[-1] + 1] if keep.size else np.zeros(1)


def sturm_sequence(p: Polynomial) -> list[np.ndarray]:
    """Sturm chain of ``p`` built from scaled remainders.

    Each member is renormalized to unit max-coefficient; the scaling is by a
    positive factor so sign variations are unaffected.  The chain stops at
    the (numerical) gcd of ``p`` and ``p'``.
    """
    seq = [_normalized(p.coeffs.copy())]
    if p.degree < 1:
        return seq
    seq.append(_normalized(npoly.polyder(seq[0])))
    while len(seq[-1]) > 1:
        _, rem = npoly.polydiv(seq[-2], seq[-1])
        rem = _trim_relative(np.atleast_1d(rem), _STURM_ZERO)
        if np.max(np.abs(rem)) <= _STURM_ZERO:
            break
        seq.append(-_normalized(rem))
    return seq


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)


def _variations(seq: list[np.ndarray], t: float) -> int:
    if math.isinf(t):
        vals = [c[-1] * (1 if (t > 0 or (len(c) - 1) % 2 == 0) else -1) for c in seq]
    else:
        vals = [npoly.polyval(t, c) for c in seq]
    return _sign_changes(vals)


def _is_root_at(c: np.ndarray, t: float) -> bool:
    size = npoly.polyval(abs(t), np.abs(c))
    return abs(npoly.polyval(t, c)) <= _ENDPOINT_ZERO * size


def origin_multiplicity(p: Polynomial, tol: float = _ENDPOINT_ZERO) -> int:
    """Number of leading (low-order) coefficients that vanish relative to the largest."""
    c = np.abs(p.coeffs)
    scale = np.max(c)
    k = 0
    while k < len(c) - 1 and c[k] <= tol * scale:
        k += 1
    return k


def count_real_roots(p: Polynomial, lo: float = -math.inf, hi: float = math.inf) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``(lo, hi)``.

    Roots sitting exactly on a finite endpoint are divided out first, so they
    are never counted.
    """
    if np.max(np.abs(p.coeffs)) < DEGENERATE_TOL:
        raise DegeneratePolynomialError("all coefficients below 1e-300")
    if not lo < hi:
        return 0
    c = p.coeffs
    shift = 0.0
    for end in (lo, hi):
        if math.isinf(end):
            continue
        local = end - shift
        if _is_root_at(c, local):
            moved = Polynomial(c).shifted(local).coeffs
            k = origin_multiplicity(Polynomial(moved))
            c = moved[k:]
            shift = end
    lo, hi = lo - shift, hi - shift
    if len(c) == 1:
        return 0
    seq = sturm_sequence(Polynomial(c))
    return _variations(seq, lo) - _variations(seq, hi)


class ZeroCount(NamedTuple):
    """Zero locations of a generalized Laguerre polynomial."""

    positive: int
    negative: int
    origin_multiplicity: int
    branch: str


def _as_negative_integer(alpha: float, n: int) -> int | None:
    j = round(-alpha)
    if 1 <= j <= n and abs(alpha + j) <= 1e-12:
        return j
    return None


def klh_zero_counts(n: int, alpha: float) -> ZeroCount:
    """Zero counts of ``L_n^(alpha)`` predicted by the Kienast-Lawton-Hahn theorem.

    The integer part in the intermediate branch is the floor, which is the
    reading that agrees with Sturm counts (see tests).  For ``alpha`` in
    ``{-n, ..., -1}`` the identity ``L_n^(-j)(z) = (-z)^j (n-j)!/n! L_{n-j}^(j)(z)``
    gives ``n - j`` positive zeros and a root of multiplicity ``j`` at the origin.
    """
    if n == 0:
        return ZeroCount(0, 0, 0, "constant")
    j = _as_negative_integer(alpha, n)
    if j is not None:
        return ZeroCount(n - j, 0, j, "origin")
    if alpha > -1:
        return ZeroCount(n, 0, 0, "alpha>-1")
    if alpha > -n:
        fl = math.floor(alpha)
        return ZeroCount(n + fl + 1, 1 if fl % 2 == 0 else 0, 0, "-n<alpha<-1")
    return ZeroCount(0, n % 2, 0, "alpha<-n")
