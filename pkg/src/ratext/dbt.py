"""Darboux-Bäcklund engine: extended potentials, their eigenstates, the
associated polynomial families and orthogonality weights.

Given a regularized RS function ``v_n`` at energy ``E_{-(n+1)}``, the
extension is ``V^(n) = V + 2 v_n'``.  Physical states map as
``psi_k^(n) ∝ (d/dx + v_n) psi_k = psi_k (v_n - w_k)`` and, when it is
normalizable, ``exp(+∫ v_n)`` is an extra ground state at ``E_{-(n+1)}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import oracle
from .errors import (
    CoincidenceError,
    NoExtraStateError,
    NoSuchStateError,
    RegularityError,
    UnsupportedError,
)
from .families import (
    RECIP_X,
    X,
    FamilySpec,
    Regularity,
    RSFunction,
    Variable,
    base_energy,
    bound_state_count,
    erkc_case,
    morse_y,
    morse_z,
    potential_value,
    regularity_check,
    rs_physical,
    rs_regularized,
)
from .polynomials import Polynomial, hermite_poly, laguerre_poly

EXTRA = "-"
#: default number of physical levels reported for families with infinite spectra
DEFAULT_LEVELS = 5


@dataclass(frozen=True)
class SpectrumReport:
    """Analytic spectrum of an extended Hamiltonian.

    ``levels`` is a tuple of ``(label, energy)`` in increasing energy, the
    extra level labelled ``"-"``.  ``strict`` means the spectrum is exactly
    the base one.
    """

    levels: tuple
    strict: bool
    extra_level: float | None = None

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for _, e in self.levels])

    @property
    def labels(self) -> list:
        return [lab for lab, _ in self.levels]


@dataclass(frozen=True, eq=False)
class ExtendedPotential:
    """``V^(n)(x) = V(x) + 2 v_n'(x)``."""

    family: FamilySpec
    n: int
    v: RSFunction
    regularity: Regularity
    spectrum: SpectrumReport
    conforming: bool = True

    @property
    def case(self) -> str | None:
        return self.regularity.case

    @property
    def domain(self) -> tuple[float, float]:
        if self.family.kind == "ho" and self.n % 2:
            return (0.0, math.inf)
        return self.family.domain

    @property
    def extra_energy(self) -> float:
        return self.v.energy

    def base(self, x):
        return potential_value(self.family, x)

    def correction(self, x):
        """Rational correction ``2 v_n'``."""
        return 2.0 * self.v.deriv(x)

    def __call__(self, x):
        return self.base(x) + self.correction(x)

    def closed_form(self, x):
        """Same potential assembled from the shifted-parameter closed forms:
        ``V - w + 2Q'`` (oscillator), ``V(y; a_{-1}) + E_{-1} - 2 alpha y dQ/dy``
        (Morse) and ``V(x; a_{-1}) + E_{-1} + 2Q'`` (ERKC)."""
        f = self.family
        x = np.asarray(x, dtype=float)
        d = self.v.denom
        u = self.v.denom_var(x)
        r1 = d.deriv()(u) / d(u)
        r2 = d.deriv(2)(u) / d(u)
        if f.kind == "ho":
            dq = -(r2 - r1 * r1)
            return potential_value(f, x) - f.omega + 2.0 * dq
        e_m1 = base_energy(f, -1)
        if f.kind == "morse":
            al = f.alpha
            y = u
            a_m1 = f.a_k(-1)
            # Q(y) = -n alpha + alpha y D_y/D
            dq_dy = al * r1 + al * y * (r2 - r1 * r1)
            shifted = f.b**2 * y * y - 2.0 * (a_m1 + al / 2.0) * f.b * y + a_m1**2
            return shifted + e_m1 - 2.0 * al * y * dq_dy
        a_m1 = f.a_k(-1)
        shifted = a_m1 * (a_m1 - 1.0) / (x * x) - f.gamma / x + f.gamma**2 / (4.0 * a_m1**2)
        dq = -(r2 - r1 * r1)
        return shifted + e_m1 + 2.0 * dq


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------
def _physical_levels(f: FamilySpec, k_max: int | None) -> list[int]:
    count = bound_state_count(f)
    if k_max is None:
        k_max = DEFAULT_LEVELS - 1 if math.isinf(count) else int(count) - 1
    return list(range(0, int(min(k_max + 1, count))))


def _extra_is_physical(f: FamilySpec, n: int, regularity: Regularity) -> bool:
    if not regularity.regular:
        return False
    if f.kind == "erkc":
        return regularity.case == "ii"
    return n % 2 == 0


def _spectrum(f, n, regularity, k_max, conforming) -> SpectrumReport:
    ks = _physical_levels(f, k_max)
    if f.kind == "ho" and n % 2:
        # half-line extension: only odd levels vanish fast enough at the origin
        levels = tuple((k, base_energy(f, k)) for k in ks if k % 2)
        return SpectrumReport(levels, False, None)
    physical = tuple((k, base_energy(f, k)) for k in ks)
    if _extra_is_physical(f, n, regularity):
        e = base_energy(f, -(n + 1))
        return SpectrumReport(((EXTRA, e),) + physical, False, e)
    return SpectrumReport(physical, conforming and f.kind == "erkc")


def extended_spectrum(ext: ExtendedPotential, k_max: int | None = None) -> SpectrumReport:
    """Levels of ``V^(n)``; ``k_max`` bounds the physical index."""
    return _spectrum(ext.family, ext.n, ext.regularity, k_max, ext.conforming)


def extend(
    f: FamilySpec, n: int, *, non_conforming: bool = False, k_max: int | None = None
) -> ExtendedPotential:
    """Build ``V^(n)`` from the regularized RS function ``v_n``.

    Raises :class:`RegularityError` when ``v_n`` has a pole in the physical
    domain, unless ``non_conforming`` is set.  Odd ``n`` for the oscillator
    is always non-conforming (its extension lives on the half line).
    """
    reg = regularity_check(f, n)
    ho_odd = f.kind == "ho" and n % 2 == 1
    if not reg.regular or ho_odd:
        if not non_conforming:
            raise RegularityError(
                f"{f.label()} n={n}: {reg.verdict} ({reg.reason}; KLH branch {reg.branch})",
                reg,
            )
    conforming = reg.regular and not ho_odd
    v = rs_regularized(f, n)
    return ExtendedPotential(f, n, v, reg, _spectrum(f, n, reg, k_max, conforming), conforming)


# --------------------------------------------------------------------------
# transformed RS functions
# --------------------------------------------------------------------------
def dbt_rs(ext: ExtendedPotential, k: int, x):
    """``w_k^(n) = -v_n + (E_k - E_{-(n+1)}) / (v_n - w_k)``."""
    w = rs_physical(ext.family, k)
    v = ext.v
    diff = v(x) - w(x)
    if np.any(np.abs(diff) < 1e-12):
        raise CoincidenceError("v_n and w_k coincide at an evaluation point")
    out = -v(x) + (w.energy - v.energy) / diff
    return out if np.ndim(out) else float(out)


def dbt_rs_deriv(ext: ExtendedPotential, k: int, x):
    """Derivative of :func:`dbt_rs`."""
    w = rs_physical(ext.family, k)
    v = ext.v
    diff = v(x) - w(x)
    de = w.energy - v.energy
    return -v.deriv(x) - de * (v.deriv(x) - w.deriv(x)) / (diff * diff)


# --------------------------------------------------------------------------
# polynomial families
# --------------------------------------------------------------------------
def p_polynomial(m: int, k: int, omega: float) -> Polynomial:
    """``P_(m,k)(x) = 1/2 L_m^{-1/2}(-s) H_{k+1}(xi) + xi L_{m-1}^{1/2}(-s) H_k(xi)``
    with ``xi = sqrt(omega/2) x`` and ``s = omega x^2 / 2``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    xi = math.sqrt(omega / 2.0)
    big = laguerre_poly(m, -0.5, var="x").of_square(-omega / 2.0)
    small = laguerre_poly(m - 1, 0.5, var="x").of_square(-omega / 2.0)
    hk1 = hermite_poly(k + 1, "x").scaled(xi)
    hk = hermite_poly(k, "x").scaled(xi)
    return 0.5 * big * hk1 + (small * hk).times_var() * xi


def m_polynomial(a: float, k: int, m: int) -> Polynomial:
    """Morse numerator, in ``z = 2 b y`` with ``alpha = 1``::

        2(m+a+1) L_{2m-1}^{b}(-z) L_k^{2(a-k)}(z) - (k+1) L_{k+1}^{2(a-k)}(z) L_{2m}^{b}(-z)

    with ``b = -2(a+2m+1)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    beta = -2.0 * (a + 2 * m + 1)
    lag_lo = laguerre_poly(2 * m - 1, beta, -1.0, "z")
    lag_hi = laguerre_poly(2 * m, beta, -1.0, "z")
    phys_k = laguerre_poly(k, 2.0 * (a - k), 1.0, "z")
    phys_k1 = laguerre_poly(k + 1, 2.0 * (a - k), 1.0, "z")
    return 2.0 * (m + a + 1) * lag_lo * phys_k - (k + 1) * phys_k1 * lag_hi


def m_value_at_zero(a: float, k: int, m: int) -> float:
    """Value at ``z = 0`` of :func:`m_polynomial` from Pochhammer symbols:
    ``-(2a+2m+1-k) (2a+2m+2)_{2m} (2a-2k+1)_k / ((2m)! k!)``."""
    from .polynomials import pochhammer

    return -(
        (2 * a + 2 * m + 1 - k)
        * pochhammer(2 * a + 2 * m + 2, 2 * m)
        * pochhammer(2 * a - 2 * k + 1, k)
        / (math.factorial(2 * m) * math.factorial(k))
    )


def _check_erkc_case(a: float, n: int) -> str:
    if (n + 1) / 2 < a < n + 1:
        return "i"
    if n % 2 == 0 and a > n + 1:
        return "ii"
    raise UnsupportedError(f"a={a:g}, n={n} is outside both regularity regimes")


def n_polynomial(a: float, k: int, n: int, gamma: float) -> Polynomial:
    """ERKC numerator of degree ``n + k + 1`` (five Laguerre products with
    arguments ``gamma x / a_k`` and ``-gamma x / a_{-(n+1)}``).

    The leading product carries ``(1 - 2a) - (k+1)/2``; with this coefficient
    the sum equals :func:`dbt_numerator` identically.
    """
    _check_erkc_case(a, n)
    ak = a + k
    alow = a - n - 1
    s_phys = gamma / ak
    s_reg = -gamma / alow
    lk = lambda deg, par: laguerre_poly(deg, par, s_phys, "x")  # noqa: E731
    ln = lambda deg, par: laguerre_poly(deg, par, s_reg, "x")  # noqa: E731
    return (
        (1.0 - 2.0 * a - (k + 1) / 2.0) * lk(k, 2 * a - 1) * ln(n, 1 - 2 * a)
        + (a - (n + 1) / 2.0) * lk(k, 2 * a - 1) * ln(n, -2 * a)
        + (a + (k - 1) / 2.0) * lk(k, 2 * a - 2) * ln(n, 1 - 2 * a)
        + (k + 1) / 2.0 * lk(k + 1, 2 * a - 1) * ln(n, 1 - 2 * a)
        - (n + 1) / 2.0 * lk(k, 2 * a - 1) * ln(n + 1, -2 * a)
    )


def dbt_numerator(ext: ExtendedPotential, k: int) -> Polynomial:
    """Polynomial ``G`` with ``psi_k (v_n - w_k) = prefactor * G / D`` built
    directly from the RS data (no closed-form identities used)."""
    f = ext.family
    v = ext.v
    w = rs_physical(f, k)
    dd, lk = v.denom, w.denom
    if f.kind == "ho":
        xpoly = Polynomial([0.0, 1.0], "x")
        return -f.omega * xpoly * lk * dd - dd.deriv() * lk + lk.deriv() * dd
    if f.kind == "morse":
        y = Polynomial([0.0, 1.0], "y")
        lin = 2.0 * f.b * y - (f.a_k(-(ext.n + 1)) + f.a_k(k))
        return lin * lk * dd + f.alpha * y * (dd.deriv() * lk - lk.deriv() * dd)
    xpoly = Polynomial([0.0, 1.0], "x")
    rate = f.gamma / (2.0 * f.a_k(-(ext.n + 1))) + f.gamma / (2.0 * f.a_k(k))
    lin = Polynomial([2.0 * f.a - 1.0, -rate], "x")
    return lin * lk * dd - xpoly * dd.deriv() * lk + xpoly * lk.deriv() * dd


# --------------------------------------------------------------------------
# closed-form eigenstates
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ClosedFormEigenstate:
    """``psi(x) = t(x)**power * exp(-rate * q(x)) * N(u1(x)) / D(u2(x))``, unnormalized."""

    level: object
    energy: float
    numerator: Polynomial
    num_var: Variable
    denominator: Polynomial
    den_var: Variable
    power: float = 0.0
    power_var: Variable = X
    rate: float = 0.0
    exp_var: Variable = X
    domain: tuple = (-math.inf, math.inf)

    def __call__(self, x):
        # extended precision keeps the point-to-point rounding noise far
        # below what finite-difference checks can see
        ld = np.longdouble
        x = np.asarray(x, dtype=ld)
        num = npoly.polyval(self.num_var(x), self.numerator.coeffs.astype(ld))
        den = npoly.polyval(self.den_var(x), self.denominator.coeffs.astype(ld))
        log_mag = -ld(self.rate) * self.exp_var(x)
        if self.power:
            log_mag = log_mag + ld(self.power) * np.log(self.power_var(x))
        with np.errstate(divide="ignore", under="ignore", over="ignore", invalid="ignore"):
            log_mag = log_mag + np.log(np.abs(num)) - np.log(np.abs(den))
            out = (np.sign(num) * np.sign(den) * np.exp(log_mag)).astype(float)
        return out if out.ndim else float(out)

    def window(self, cutoff: float = 1e-16) -> tuple[float, float]:
        """Part of the domain where ``psi**2`` exceeds ``cutoff`` times its peak."""
        lo, hi = self.domain
        span = (max(lo, -400.0), min(hi, 4000.0))
        if span[0] == 0.0:
            span = (1e-12, span[1])
        a, b = _tail_window([self], 1.0, cutoff, span=span)
        return max(a, lo), min(b, hi)

    def norm(self, rel_tol: float = 1e-10) -> float:
        """L2 norm over :meth:`window` (tails below 1e-16 of the peak dropped)."""
        lo, hi = self.window()
        return math.sqrt(oracle.integrate(lambda t: self(t) ** 2, lo, hi, rel_tol))

    def normalized(self) -> Callable:
        nrm = self.norm()
        return lambda x: self(x) / nrm


def _ho_laguerre_denominator(f: FamilySpec, n: int) -> Polynomial:
    m = n // 2
    if n % 2:
        return laguerre_poly(m, 0.5, var="x").of_square(-f.omega / 2.0).times_var()
    return laguerre_poly(m, -0.5, var="x").of_square(-f.omega / 2.0)


def extended_eigenstate(ext: ExtendedPotential, level) -> ClosedFormEigenstate:
    """Closed form of the state of ``V^(n)`` at level ``k`` or the extra level ``"-"``."""
    f, n = ext.family, ext.n
    if level == EXTRA:
        if ext.spectrum.extra_level is None:
            raise NoExtraStateError(
                f"{f.label()} n={n}: exp(+∫v_n) is not normalizable (strict isospectrality)"
            )
        energy = ext.v.energy
    else:
        k = int(level)
        if k < 0 or k >= bound_state_count(f):
            raise NoSuchStateError(f"{f.label()} has no level k={k}")
        if f.kind == "ho" and n % 2 and k % 2 == 0:
            raise NoSuchStateError("odd-n oscillator extension keeps only odd levels")
        energy = base_energy(f, k)
    dom = ext.domain
    one = Polynomial([1.0])

    if f.kind == "ho":
        den = _ho_laguerre_denominator(f, n)
        sq = Variable("x^2", "square")
        if level == EXTRA:
            num = one
        elif n % 2 == 0 and n > 0:
            num = p_polynomial(n // 2, k, f.omega)
        else:
            num = dbt_numerator(ext, k)
            den = ext.v.denom
        return ClosedFormEigenstate(
            level, energy, num, X, den, X, rate=f.omega / 4.0, exp_var=sq, domain=dom
        )

    if f.kind == "morse":
        if f.alpha == 1.0 and n % 2 == 0 and n > 0:
            z = morse_z(f.b, 1.0)
            m = n // 2
            den = laguerre_poly(n, -2.0 * (f.a + 1 + n), -1.0, "z")
            if level == EXTRA:
                return ClosedFormEigenstate(
                    level, energy, one, z, den, z, f.a + 1 + n, z, 0.5, z, dom
                )
            return ClosedFormEigenstate(
                level, energy, m_polynomial(f.a, k, m), z, den, z, f.a - k, z, 0.5, z, dom
            )
        # general scale: generic Darboux numerator in y
        y = morse_y(f.alpha)
        rate = f.b / f.alpha
        if level == EXTRA:
            power = f.a_k(-(n + 1)) / f.alpha
            return ClosedFormEigenstate(
                level, energy, one, y, ext.v.denom, y, power, y, rate, y, dom
            )
        return ClosedFormEigenstate(
            level, energy, dbt_numerator(ext, k), y, ext.v.denom, y,
            f.a / f.alpha - k, y, rate, y, dom,
        )

    alow = f.a_k(-(n + 1))
    den = laguerre_poly(n, 1.0 - 2.0 * f.a, -f.gamma / alow, "x")
    if level == EXTRA:
        return ClosedFormEigenstate(
            level, energy, one, X, den, X, f.a - 1.0, X, f.gamma / (2.0 * alow), X, dom
        )
    try:
        num = n_polynomial(f.a, k, n, f.gamma)
    except UnsupportedError:
        num = dbt_numerator(ext, k)
        den = ext.v.denom
    return ClosedFormEigenstate(
        level, energy, num, X, den, X, f.a - 1.0, X, f.gamma / (2.0 * f.a_k(k)), X, dom
    )


def generic_eigenstate(ext: ExtendedPotential, k: int) -> Callable:
    """``psi_k(x) (v_n(x) - w_k(x))`` with the base closed-form ``psi_k``."""
    f = ext.family
    w = rs_physical(f, k)

    def base_state(x):
        x = np.asarray(x, dtype=float)
        if f.kind == "ho":
            return w.denom(x) * np.exp(-f.omega * x * x / 4.0)
        if f.kind == "morse":
            y = np.exp(-f.alpha * x)
            return y ** (f.a / f.alpha - k) * np.exp(-f.b * y / f.alpha) * w.denom(y)
        return x**f.a * np.exp(-f.gamma * x / (2.0 * f.a_k(k))) * w.denom(x)

    return lambda x: base_state(x) * (ext.v(x) - w(x))


# --------------------------------------------------------------------------
# orthogonal families
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class OrthogonalFamily:
    """Functions orthogonal on ``(lo, hi)`` under ``weight``.

    ``log_measure`` integrates in ``t = log u`` (used for the Morse family,
    whose integrand has only algebraic decay at large ``u``).
    """

    members: tuple
    weight: Callable
    lo: float
    hi: float
    var: str
    log_measure: bool = False
    breakpoints: tuple = ()

    @property
    def labels(self) -> list:
        return [lab for lab, _ in self.members]

    def inner(self, i: int, j: int, rel_tol: float = 1e-12, abs_tol: float = 0.0) -> float:
        fi, fj = self.members[i][1], self.members[j][1]
        if self.log_measure:
            def integrand(t):
                u = math.exp(t)
                return fi(u) * fj(u) * self.weight(u) * u

            lo, hi = math.log(self.lo), math.log(self.hi)
            return oracle.integrate(integrand, lo, hi, rel_tol, abs_tol, self.breakpoints)
        return oracle.integrate(
            lambda u: fi(u) * fj(u) * self.weight(u),
            self.lo, self.hi, rel_tol, abs_tol, self.breakpoints,
        )

    def gram(self, rel_tol: float = 1e-12) -> np.ndarray:
        """Normalized Gram matrix (unit diagonal)."""
        size = len(self.members)
        norms = np.array([self.inner(i, i, rel_tol) for i in range(size)])
        g = np.eye(size)
        for i in range(size):
            for j in range(i + 1, size):
                scale = math.sqrt(norms[i] * norms[j])
                val = self.inner(i, j, rel_tol, abs_tol=1e-13 * scale) / scale
                g[i, j] = g[j, i] = val
        return g


def _tail_window(funcs, scale, cutoff=1e-16, span=(-40.0, 400.0), square=True):
    """Interval outside which every ``|f|`` (``|f|**2`` with ``square``) is
    below ``cutoff`` times its peak."""
    x = np.linspace(span[0] * scale, span[1] * scale, 200001)
    with np.errstate(all="ignore"):
        keep = np.zeros_like(x, dtype=bool)
        for fn in funcs:
            sq = np.abs(np.asarray(fn(x), dtype=float))
            sq = np.nan_to_num(sq**2 if square else sq, nan=0.0, posinf=0.0)
            keep |= sq >= cutoff * sq.max()
    idx = np.flatnonzero(keep)
    return float(x[max(idx[0] - 1, 0)]), float(x[min(idx[-1] + 1, len(x) - 1)])


def _as_func(p: Polynomial) -> Callable:
    return lambda u: p(u)


def orthogonal_family(ext: ExtendedPotential, k_max: int = 3) -> OrthogonalFamily:
    """Polynomial (or quasi-polynomial) family associated with ``V^(n)``.

    Members are ``(label, function)`` pairs; the extra member ``"-"`` is
    present when the extension has the extra lower level.
    """
    f, n = ext.family, ext.n
    ks = [k for k in _physical_levels(f, k_max)]
    with_extra = ext.spectrum.extra_level is not None
    if f.kind == "ho":
        if n % 2 or n == 0:
            raise UnsupportedError("oscillator family needs even n >= 2")
        m = n // 2
        den = laguerre_poly(m, -0.5, var="x").of_square(-f.omega / 2.0)
        members = [(k, _as_func(p_polynomial(m, k, f.omega))) for k in ks]
        if with_extra:
            members.insert(0, (EXTRA, lambda x: np.ones_like(np.asarray(x, dtype=float))))
        weight = lambda x: np.exp(-f.omega * x * x / 2.0) / den(x) ** 2  # noqa: E731
        return OrthogonalFamily(tuple(members), weight, -math.inf, math.inf, "x", False, (0.0,))
    if f.kind == "morse":
        if n % 2 or n == 0:
            raise UnsupportedError("Morse family needs even n >= 2")
        if f.alpha != 1.0:
            # no polynomial form off the unit scale: the eigenstates themselves, flat weight
            members = [(k, extended_eigenstate(ext, k)) for k in ks]
            if with_extra:
                members.insert(0, (EXTRA, extended_eigenstate(ext, EXTRA)))
            lo, hi = _tail_window([fn for _, fn in members], 1.0 / f.alpha)
            return OrthogonalFamily(tuple(members), lambda x: 1.0, lo, hi, "x", False, (0.0,))
        m = n // 2
        den = laguerre_poly(n, -2.0 * (f.a + 1 + n), -1.0, "z")
        members = [(k, _as_func(m_polynomial(f.a, k, m).reversed("z"))) for k in ks]
        if with_extra:
            members.insert(0, (EXTRA, lambda z: 1.0))
        power = 2.0 * (f.a + n) + 3.0
        # den is L_n^{beta}(-u) in u; the weight needs L_n^{beta}(-1/z) = den(1/z)
        def weight(z):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                return np.exp(-1.0 / z - power * np.log(z)) / den(1.0 / z) ** 2

        diag = [lambda t, fn=fn: fn(np.exp(t)) ** 2 * weight(np.exp(t)) * np.exp(t)
                for _, fn in members]
        t_lo, t_hi = _tail_window(diag, 1.0, span=(-60.0, 60.0), square=False)
        return OrthogonalFamily(
            tuple(members), weight, math.exp(t_lo), math.exp(t_hi), "z", True, (1.0,)
        )
    alow = f.a_k(-(n + 1))
    den = laguerre_poly(n, 1.0 - 2.0 * f.a, -f.gamma / alow, "x")

    def c_member(k):
        num = n_polynomial(f.a, k, n, f.gamma)
        rate = f.gamma / (2.0 * f.a_k(k))
        return lambda x: np.exp(-rate * x) * num(x)

    members = [(k, c_member(k)) for k in ks]
    if with_extra:
        rate_m = f.gamma / (2.0 * alow)
        members.insert(0, (EXTRA, lambda x: np.exp(-rate_m * x)))
    weight = lambda x: x ** (2.0 * (f.a - 1.0)) / den(x) ** 2  # noqa: E731
    scale = 2.0 * (f.a + max(ks, default=0)) ** 2 / f.gamma
    return OrthogonalFamily(tuple(members), weight, 0.0, math.inf, "x", False, (scale,))


# --------------------------------------------------------------------------
# superpartner
# --------------------------------------------------------------------------
def superpartner(ext: ExtendedPotential) -> Callable:
    """Superpartner of ``V^(n)`` built on its ground state.

    With the extra level present the ground RS function is ``-v_n`` and the
    partner is ``V^(n) - 2 v_n'`` (which is the base potential).  In the
    strictly isospectral ERKC regime the ground RS function is ``w_0^(n)``
    and the partner is ``V^(n) + 2 (w_0^(n))'``.
    """
    if ext.spectrum.extra_level is not None:
        return lambda x: ext.closed_form(x) - 2.0 * ext.v.deriv(x)
    return lambda x: ext.closed_form(x) + 2.0 * dbt_rs_deriv(ext, 0, x)
