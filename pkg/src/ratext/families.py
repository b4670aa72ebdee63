"""The three exceptional first-category shape-invariant potentials.

Each family is written in a canonical variable in which every bound state
is a classical polynomial times an elementary prefactor:

* ``ho``    harmonic oscillator, ``V = w^2 x^2/4 - w/2`` on the real line;
* ``morse`` Morse, ``V = b^2 y^2 - 2(a + alpha/2) b y + a^2`` with ``y = exp(-alpha x)``;
* ``erkc``  effective radial Kepler-Coulomb,
  ``V = a(a-1)/x^2 - gamma/x + gamma^2/(4 a^2)`` on ``x > 0``.

All three have zero ground level.  Riccati-Schrödinger (RS) functions are
``w = -psi'/psi`` and are stored as an affine part in a canonical variable
plus ``-(d/dx) log D`` for a polynomial ``D``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .errors import (
    DomainError,
    InconsistencyError,
    NoSuchStateError,
    ParameterError,
    PoleError,
    SingularEnergyError,
    UnsupportedError,
)
from .polynomials import (
    Polynomial,
    ZeroCount,
    count_real_roots,
    hermite_imaginary_as_laguerre,
    hermite_imaginary_real_part,
    hermite_poly,
    klh_zero_counts,
    laguerre_poly,
    origin_multiplicity,
)

KINDS = ("ho", "morse", "erkc")
#: grid points closer than this (in the denominator's variable) to a pole are skipped
POLE_EXCLUSION = 1e-3
_BOUNDARY_TOL = 1e-12


# --------------------------------------------------------------------------
# canonical variables
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Variable:
    """A smooth map ``u(x)`` with analytic first and second derivatives.

    ``kind`` is one of ``"x"`` (``scale*x``), ``"recip"`` (``scale/x``),
    ``"square"`` (``scale*x**2``) or ``"exp"`` (``scale*exp(-rate*x)``).
    """

    name: str
    kind: str = "x"
    scale: float = 1.0
    rate: float = 0.0

    def __call__(self, x):
        x = np.asarray(x)
        if x.dtype != np.longdouble:
            x = x.astype(float)
        if self.kind == "x":
            return self.scale * x
        if self.kind == "recip":
            return self.scale / x
        if self.kind == "square":
            return self.scale * x * x
        return self.scale * np.exp(-self.rate * x)

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "x":
            return np.full_like(x, self.scale)
        if self.kind == "recip":
            return -self.scale / (x * x)
        if self.kind == "square":
            return 2.0 * self.scale * x
        return -self.rate * self(x)

    def d2(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "x":
            return np.zeros_like(x)
        if self.kind == "recip":
            return 2.0 * self.scale / (x * x * x)
        if self.kind == "square":
            return np.full_like(x, 2.0 * self.scale)
        return self.rate**2 * self(x)

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "x":
            return u / self.scale
        if self.kind == "recip":
            return self.scale / u
        if self.kind == "square":
            return np.sqrt(u / self.scale)
        return -np.log(u / self.scale) / self.rate


X = Variable("x")
RECIP_X = Variable("1/x", "recip")


def morse_y(alpha: float) -> Variable:
    return Variable("y", "exp", 1.0, alpha)


def morse_z(b: float, alpha: float) -> Variable:
    """``z = 2 b y / alpha``."""
    return Variable("z", "exp", 2.0 * b / alpha, alpha)


# --------------------------------------------------------------------------
# family specification
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class FamilySpec:
    """One member of a potential family.

    Use the :meth:`ho`, :meth:`morse` and :meth:`erkc` constructors; they
    validate the parameter ranges.
    """

    kind: str
    omega: float | None = None
    a: float | None = None
    b: float | None = None
    alpha: float = 1.0
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown family {self.kind!r}")
        if self.kind == "ho":
            if self.omega is None or not self.omega > 0:
                raise ParameterError("harmonic oscillator needs omega > 0")
        elif self.kind == "morse":
            if self.a is None or self.b is None or not (self.a > 0 and self.b > 0):
                raise ParameterError("Morse needs a > 0 and b > 0")
            if not self.alpha > 0:
                raise ParameterError("Morse needs alpha > 0")
        else:
            if self.a is None or self.gamma is None or not (self.a > 1 and self.gamma > 0):
                raise ParameterError("ERKC needs a > 1 and gamma > 0")

    @classmethod
    def ho(cls, omega: float) -> "FamilySpec":
        return cls("ho", omega=float(omega))

    @classmethod
    def morse(cls, a: float, b: float, alpha: float = 1.0) -> "FamilySpec":
        return cls("morse", a=float(a), b=float(b), alpha=float(alpha))

    @classmethod
    def erkc(cls, a: float, gamma: float) -> "FamilySpec":
        return cls("erkc", a=float(a), gamma=float(gamma))

    @property
    def params(self) -> dict:
        if self.kind == "ho":
            return {"omega": self.omega}
        if self.kind == "morse":
            return {"a": self.a, "b": self.b, "alpha": self.alpha}
        return {"a": self.a, "gamma": self.gamma}

    @property
    def domain(self) -> tuple[float, float]:
        """Physical domain in ``x``."""
        return (0.0, math.inf) if self.kind == "erkc" else (-math.inf, math.inf)

    def a_k(self, k: int) -> float:
        """Shifted parameter ``a_k`` (``a - k alpha`` for Morse, ``a + k`` for ERKC)."""
        if self.kind == "morse":
            return self.a - k * self.alpha
        if self.kind == "erkc":
            return self.a + k
        raise ParameterError("a_k is undefined for the harmonic oscillator")

    def label(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.kind}({inner})"


# raw-parameter formulas, shared with the symmetry map where parameters may
# leave the physical range
def _potential_raw(kind: str, p: Mapping[str, float], x):
    x = np.asarray(x, dtype=float)
    if kind == "ho":
        w = p["omega"]
        return w * w * x * x / 4.0 - w / 2.0
    if kind == "morse":
        al = p.get("alpha", 1.0)
        y = np.exp(-al * x)
        return p["b"] ** 2 * y * y - 2.0 * (p["a"] + al / 2.0) * p["b"] * y + p["a"] ** 2
    a, g = p["a"], p["gamma"]
    return a * (a - 1.0) / (x * x) - g / x + g * g / (4.0 * a * a)


def _energy_raw(kind: str, p: Mapping[str, float], k: int) -> float:
    if kind == "ho":
        return k * p["omega"]
    a = p["a"]
    if kind == "morse":
        ak = a - k * p.get("alpha", 1.0)
        return a * a - ak * ak
    ak = a + k
    if ak == 0.0 or a == 0.0:
        raise SingularEnergyError(f"ERKC energy diverges at a_k = 0 (k={k})")
    g = p["gamma"]
    return g * g / (4.0 * a * a) - g * g / (4.0 * ak * ak)


def potential_value(f: FamilySpec, x):
    """Base potential with zero ground level."""
    if f.kind == "erkc" and np.any(np.asarray(x) <= 0):
        raise DomainError("ERKC potential is defined for x > 0 only")
    return _potential_raw(f.kind, f.params, x)


def base_energy(f: FamilySpec, k: int) -> float:
    """``E_k``; negative ``k`` is allowed and gives the energies used by the DBT."""
    return _energy_raw(f.kind, f.params, k)


def bound_state_count(f: FamilySpec) -> float:
    """Number of bound states; ``math.inf`` for the oscillator and ERKC.

    For Morse a level ``k`` is normalizable iff ``a_k = a - k alpha > 0``,
    which gives ``ceil(a/alpha)`` levels (``a/alpha`` when that is an integer).
    """
    if f.kind != "morse":
        return math.inf
    ratio = f.a / f.alpha
    return int(math.ceil(ratio - 1e-12))


# --------------------------------------------------------------------------
# RS functions
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class RSFunction:
    """``w(x) = slope * t(x) + offset - d/dx log D(u(x))``.

    ``t`` is ``base_var`` and ``u`` is ``denom_var``.
    """

    family: FamilySpec
    index: int
    energy: float
    physical: bool
    slope: float
    offset: float
    base_var: Variable
    denom: Polynomial
    denom_var: Variable

    def log_deriv(self, x):
        """``d/dx log D(u(x))``."""
        u = self.denom_var(x)
        return self.denom_var.d1(x) * self.denom.deriv()(u) / self.denom(u)

    def __call__(self, x):
        return self.slope * self.base_var(x) + self.offset - self.log_deriv(x)

    def deriv(self, x):
        u = self.denom_var(x)
        d0 = self.denom(u)
        r1 = self.denom.deriv()(u) / d0
        r2 = self.denom.deriv(2)(u) / d0
        u1 = self.denom_var.d1(x)
        u2 = self.denom_var.d2(x)
        log2 = u2 * r1 + u1 * u1 * (r2 - r1 * r1)
        return self.slope * self.base_var.d1(x) - log2

    def potential(self, x):
        return potential_value(self.family, x)

    def residual(self, x):
        """``-w' + w^2 - (V - E)`` pointwise."""
        w = self(x)
        return -self.deriv(x) + w * w - (self.potential(x) - self.energy)

    def poles(self) -> np.ndarray:
        """Poles inside the physical domain, in ``x``."""
        roots = self.denom.real_roots()
        if self.denom_var.kind == "exp":
            roots = roots[roots / self.denom_var.scale > 0]
        elif self.family.kind == "erkc":
            roots = roots[roots > 0]
        return np.sort(self.denom_var.inverse(roots)) if roots.size else roots

    def pole_mask(self, x, radius: float = POLE_EXCLUSION):
        """True where ``x`` is farther than ``radius`` (in ``u``) from every pole."""
        x = np.asarray(x, dtype=float)
        u = self.denom_var(x)
        keep = np.ones(x.shape, dtype=bool)
        for r in self.denom.real_roots():
            keep &= np.abs(u - r) > radius
        return keep


def rs_physical(f: FamilySpec, k: int) -> RSFunction:
    """RS function of the physical level ``k``."""
    if k < 0:
        raise NoSuchStateError("level index must be non-negative")
    if k >= bound_state_count(f):
        raise NoSuchStateError(f"{f.label()} has no bound state k={k}")
    energy = base_energy(f, k)
    if f.kind == "ho":
        xi = math.sqrt(f.omega / 2.0)
        denom = hermite_poly(k, "x").scaled(xi)
        return RSFunction(f, k, energy, True, f.omega / 2.0, 0.0, X, denom, X)
    if f.kind == "morse":
        y = morse_y(f.alpha)
        denom = laguerre_poly(k, 2.0 * (f.a / f.alpha - k), 2.0 * f.b / f.alpha, "y")
        return RSFunction(f, k, energy, True, -f.b, f.a_k(k), y, denom, y)
    ak = f.a_k(k)
    denom = laguerre_poly(k, 2.0 * f.a - 1.0, f.gamma / ak, "x")
    return RSFunction(f, k, energy, True, -f.a, f.gamma / (2.0 * ak), RECIP_X, denom, X)


def _erkc_shifted(f: FamilySpec, n: int) -> float:
    a_low = f.a_k(-(n + 1))
    if abs(a_low) <= _BOUNDARY_TOL:
        raise UnsupportedError(f"a = n+1 = {n + 1}: regularizing argument undefined")
    return a_low


def rs_regularized(f: FamilySpec, n: int) -> RSFunction:
    """Regularized (unphysical) RS function ``v_n``, image of ``w_n`` under the
    parameter symmetry, at energy ``E_{-(n+1)}``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if f.kind == "ho":
        xi = math.sqrt(f.omega / 2.0)
        denom = hermite_imaginary_real_part(n, xi, "x")
        return RSFunction(f, n, base_energy(f, -(n + 1)), False, -f.omega / 2.0, 0.0, X, denom, X)
    if f.kind == "morse":
        y = morse_y(f.alpha)
        denom = laguerre_poly(n, -2.0 * (f.a / f.alpha + 1.0 + n), -2.0 * f.b / f.alpha, "y")
        return RSFunction(
            f, n, base_energy(f, -(n + 1)), False, f.b, -f.a_k(-(n + 1)), y, denom, y
        )
    a_low = _erkc_shifted(f, n)
    denom = laguerre_poly(n, 1.0 - 2.0 * f.a, -f.gamma / a_low, "x")
    return RSFunction(
        f, n, base_energy(f, -(n + 1)), False, f.a_k(-1), -f.gamma / (2.0 * a_low),
        RECIP_X, denom, X,
    )


# --------------------------------------------------------------------------
# parameter symmetry
# --------------------------------------------------------------------------
def apply_gamma(kind: str, params: Mapping[str, float]) -> dict:
    """The discrete parameter map that leaves the potential's form invariant."""
    p = dict(params)
    if kind == "ho":
        p["omega"] = -p["omega"]
    elif kind == "morse":
        p["a"] = -p["a"] - p.get("alpha", 1.0)
        p["b"] = -p["b"]
    else:
        p["a"] = 1.0 - p["a"]
    return p


@dataclass(frozen=True)
class SymmetryImage:
    """Result of the parameter map: mapped raw parameters and the constant
    by which the potential shifts, ``V(x; mapped) = V(x) + potential_shift``."""

    family: FamilySpec
    mapped_params: dict
    potential_shift: float

    def mapped_potential(self, x):
        return _potential_raw(self.family.kind, self.mapped_params, x)

    def mapped_energy(self, n: int) -> float:
        """``E_n`` evaluated at the mapped parameters."""
        return _energy_raw(self.family.kind, self.mapped_params, n)

    def regularized_energy(self, n: int) -> float:
        """Energy of ``v_n`` relative to the unmapped potential.

        Equals ``mapped_energy(n) - potential_shift``, i.e. ``E_{-(n+1)}``.
        """
        return self.mapped_energy(n) - self.potential_shift


def gamma_map(f: FamilySpec) -> SymmetryImage:
    return SymmetryImage(f, apply_gamma(f.kind, f.params), -base_energy(f, -1))


def _cf_terms(kind: str, p: Mapping[str, float], n: int, x):
    """(numerator_j, denominator_j) for j = 1..n of the terminating fraction."""
    x = np.asarray(x, dtype=float)
    if kind == "ho":
        w = p["omega"]
        return [((n - j + 1) * w, w * x) for j in range(1, n + 1)]
    en = _energy_raw(kind, p, n)
    if kind == "morse":
        al = p.get("alpha", 1.0)
        y = np.exp(-al * x)
        a_ = lambda k: p["a"] - k * al  # noqa: E731
        return [
            (en - _energy_raw(kind, p, j - 1), a_(j - 1) + a_(j) - 2.0 * p["b"] * y)
            for j in range(1, n + 1)
        ]
    g = p["gamma"]
    w0 = lambda c: -c / x + g / (2.0 * c)  # noqa: E731
    return [
        (en - _energy_raw(kind, p, j - 1), w0(p["a"] + j - 1) + w0(p["a"] + j))
        for j in range(1, n + 1)
    ]


def rs_continued_fraction_eval(f: FamilySpec, n: int, x, regularized: bool = False):
    """``R_n`` (or ``Q_n`` if ``regularized``) by bottom-up evaluation of the
    terminating continued fraction ``-num_1/(den_1 - num_2/(den_2 - ...))``.

    ``Q_n`` is the physical fraction at the symmetry-mapped parameters.
    """
    params = apply_gamma(f.kind, f.params) if regularized else f.params
    x = np.asarray(x, dtype=float)
    tail = np.zeros_like(x)
    for num, den in reversed(_cf_terms(f.kind, params, n, x)):
        d = den - tail
        if np.any(np.abs(d) < 1e-12):
            raise PoleError("continued fraction denominator vanished")
        tail = num / d
    out = -tail
    return out if out.ndim else float(out)


def rs_log_part(w: RSFunction, x):
    """``R_n`` or ``Q_n``: the RS function minus its ``n = 0`` member."""
    f = w.family
    w0 = rs_regularized(f, 0) if not w.physical else rs_physical(f, 0)
    return w(x) - w0(x)


# --------------------------------------------------------------------------
# regularity
# --------------------------------------------------------------------------
class Regularity(NamedTuple):
    """Regularity verdict for ``v_n``.

    ``predicted`` is the KLH count of denominator zeros inside the physical
    domain, ``observed`` the Sturm count on the same open domain.
    """

    regular: bool
    reason: str
    branch: str
    zero_count: ZeroCount
    predicted: int
    observed: int
    case: str | None = None

    @property
    def verdict(self) -> str:
        return "Regular" if self.regular else "SingularInDomain"


def erkc_case(f: FamilySpec, n: int) -> str | None:
    """``"i"`` for ``(n+1)/2 < a < n+1``, ``"ii"`` for even ``n`` with ``a > n+1``."""
    if f.kind != "erkc":
        return None
    if (n + 1) / 2 < f.a < n + 1:
        return "i"
    if n % 2 == 0 and f.a > n + 1:
        return "ii"
    return None


def denominator_glp(f: FamilySpec, n: int) -> tuple[int, float, int]:
    """(degree, Laguerre parameter, sign of the argument on the domain) of the
    Laguerre factor of ``v_n``'s denominator."""
    if f.kind == "ho":
        red = hermite_imaginary_as_laguerre(n)
        return red.m, red.alpha, -1
    if f.kind == "morse":
        return n, -2.0 * (f.a / f.alpha + 1.0 + n), -1
    a_low = _erkc_shifted(f, n)
    return n, 1.0 - 2.0 * f.a, 1 if a_low < 0 else -1


def regularity_check(f: FamilySpec, n: int) -> Regularity:
    """Decide whether ``v_n`` is pole-free on the physical domain.

    The Kienast-Lawton-Hahn prediction and a Sturm count on the actual
    denominator polynomial are computed independently; disagreement raises
    :class:`InconsistencyError`.
    """
    if f.kind == "erkc":
        if abs(f.a - (n + 1) / 2) <= _BOUNDARY_TOL:
            raise UnsupportedError(f"a = (n+1)/2 = {(n + 1) / 2:g} is a regularity boundary")
        _erkc_shifted(f, n)
    deg, lag_alpha, sign = denominator_glp(f, n)
    zc = klh_zero_counts(deg, lag_alpha)
    on_side = zc.positive if sign > 0 else zc.negative
    v = rs_regularized(f, n)
    if f.kind == "ho":
        # each negative root of L_m(-w x^2/2) gives two real x; the origin one
        predicted = 2 * zc.negative + (1 if zc.origin_multiplicity else 0) + n % 2
        observed = count_real_roots(v.denom)
        if n % 2:
            reason = "odd n: zero of the denominator at the origin"
        elif predicted:
            reason = "denominator has real zeros"
        else:
            reason = "no real zero of the denominator"
    elif f.kind == "morse":
        predicted = on_side
        observed = count_real_roots(v.denom, 0.0, math.inf)
        reason = ("no" if predicted == 0 else f"{predicted}") + " zero(s) for y > 0"
    else:
        predicted = on_side
        observed = count_real_roots(v.denom, 0.0, math.inf)
        reason = ("no" if predicted == 0 else f"{predicted}") + " zero(s) for x > 0"
    if predicted != observed:
        raise InconsistencyError(
            f"KLH predicts {predicted} domain zeros, Sturm finds {observed} "
            f"({f.label()}, n={n}, branch {zc.branch})"
        )
    return Regularity(
        predicted == 0, reason, zc.branch, zc, predicted, observed, erkc_case(f, n)
    )


__all__ = [
    "FamilySpec",
    "Variable",
    "RSFunction",
    "SymmetryImage",
    "Regularity",
    "potential_value",
    "base_energy",
    "bound_state_count",
    "rs_physical",
    "rs_regularized",
    "gamma_map",
    "apply_gamma",
    "rs_continued_fraction_eval",
    "rs_log_part",
    "regularity_check",
    "erkc_case",
    "denominator_glp",
    "origin_multiplicity",
]
