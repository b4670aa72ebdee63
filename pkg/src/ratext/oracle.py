"""Independent numerical ground truth: grid eigensolvers, adaptive quadrature
and a wavefunction residual.

Nothing here knows about RS functions or Darboux transformations; the
eigensolvers only see a potential and a grid.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy.linalg import eigh_tridiagonal

from .errors import EigensolverError, IntegrationError

MIN_POINTS = 64
# fraction of the interior grid we trust for eigenvalue counts
_RESOLVABLE = 8


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[lo, hi]`` with Dirichlet conditions at both ends.

    ``points`` counts the two boundary nodes.
    """

    lo: float
    hi: float
    points: int = 4096

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise ValueError(f"bad grid bounds [{self.lo}, {self.hi}]")
        if self.points < MIN_POINTS:
            raise ValueError(f"grid needs at least {MIN_POINTS} points")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)

    def refined(self) -> "GridSpec":
        """Same interval with the spacing halved."""
        return GridSpec(self.lo, self.hi, 2 * (self.points - 1) + 1)


@dataclass(frozen=True)
class EigenResult:
    """Lowest eigenvalues (Richardson-extrapolated) and per-level error estimates."""

    energies: np.ndarray
    residuals: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray

    def __len__(self):
        return len(self.energies)


def _lowest(diag, off, count):
    # explicit tolerance: the default eps*||T|| is far too loose on graded meshes
    try:
        return eigh_tridiagonal(
            diag, off, eigvals_only=True, select="i", select_range=(0, count - 1),
            lapack_driver="stebz", tol=1e-13,
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(str(exc)) from exc


def _dirichlet_levels(V, g: GridSpec, count: int) -> np.ndarray:
    x = g.nodes[1:-1]
    with np.errstate(all="ignore"):
        pot = np.asarray(V(x), dtype=float)
    if not np.all(np.isfinite(pot)):
        bad = x[~np.isfinite(pot)][0]
        raise EigensolverError(f"potential is not finite at x={bad:.6g}")
    h2 = g.step**2
    diag = 2.0 / h2 + pot
    off = np.full(len(x) - 1, -1.0 / h2)
    return _lowest(diag, off, count)


def _check_count(points: int, count: int):
    if count < 1:
        raise EigensolverError("count must be positive")
    if count > (points - 2) // _RESOLVABLE:
        raise EigensolverError(f"{count} levels cannot be resolved on {points} points")


def _richardson(coarse, fine, order=2) -> EigenResult:
    fac = 2.0**order
    extrap = (fac * fine - coarse) / (fac - 1.0)
    return EigenResult(extrap, np.abs(fine - coarse), coarse, fine)


def solve_bound_states(V: Callable, g: GridSpec, count: int) -> EigenResult:
    """Lowest ``count`` eigenvalues of ``-d²/dx² + V`` on ``g``.

    Three-point finite differences, solved at ``g`` and at half the spacing;
    the reported energies are the Richardson combination of the pair and
    ``residuals`` the raw pair difference.
    """
    _check_count(g.points, count)
    coarse = _dirichlet_levels(V, g, count)
    fine = _dirichlet_levels(V, g.refined(), count)
    return _richardson(coarse, fine)


def origin_exponent(V: Callable, x0: float = 1e-6) -> float:
    """Exponent ``nu`` of the regular solution ``psi ~ x**nu`` at an inverse-square origin.

    ``c = lim x² V`` is extrapolated from two small abscissas.
    """
    f1 = x0 * x0 * float(V(x0))
    f2 = 4.0 * x0 * x0 * float(V(2.0 * x0))
    c = 2.0 * f1 - f2
    if -0.25 - 1e-9 < c < -0.25:
        c = -0.25  # critical coupling, up to extrapolation error
    if c < -0.25:
        raise EigensolverError(f"x² V -> {c:.4g} < -1/4: Hamiltonian unbounded below")
    return 0.5 + math.sqrt(0.25 + c)


def _radial_levels(V, hi, cells, count, nu, grading):
    xi = np.linspace(0.0, 1.0, cells + 1)
    faces = hi * xi**grading
    centers = hi * (0.5 * (xi[:-1] + xi[1:])) ** grading
    p = 2.0 * nu
    weight_face = faces**p
    mass = (faces[1:] ** (p + 1) - faces[:-1] ** (p + 1)) / (p + 1)
    with np.errstate(all="ignore"):
        pot = np.asarray(V(centers), dtype=float) - nu * (nu - 1.0) / centers**2
    if not np.all(np.isfinite(pot)):
        raise EigensolverError("potential is not finite on the radial grid")
    # flux form -(W u')' + W V_r u = E W u; W vanishes at the origin (no flux)
    gaps = np.diff(centers)
    inner = weight_face[1:-1] / gaps
    stiff_right = np.append(inner, weight_face[-1] / (faces[-1] - centers[-1]))  # Dirichlet at hi
    stiff_left = np.insert(inner, 0, 0.0)
    diag = stiff_right + stiff_left + mass * pot
    scale = 1.0 / np.sqrt(mass)
    return _lowest(diag * scale * scale, -inner * scale[:-1] * scale[1:], count)


def solve_radial_bound_states(
    V: Callable,
    hi: float,
    points: int,
    count: int,
    exponent: float | None = None,
    grading: float = 2.0,
) -> EigenResult:
    """Bound states on ``(0, hi]`` for potentials with an inverse-square origin.

    The regular behaviour ``x**nu`` is factored out and the remaining
    Sturm-Liouville problem is discretized by cell-centred finite volumes
    with exact cell masses, so no artificial cut-off near the origin is
    needed.  Cells are uniform in ``xi`` with ``x = hi * xi**grading``, fine
    near the origin and coarse in the tail.  ``exponent`` overrides the
    estimated ``nu``.
    """
    _check_count(points, count)
    nu = origin_exponent(V) if exponent is None else exponent
    coarse = _radial_levels(V, hi, points, count, nu, grading)
    fine = _radial_levels(V, hi, 2 * points, count, nu, grading)
    return _richardson(coarse, fine)


def integrate(
    f: Callable,
    lo: float,
    hi: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    breakpoints: Sequence[float] = (),
) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``(lo, hi)``.

    Infinite endpoints are mapped onto finite intervals, so exponential and
    algebraic tails are both handled without truncation.  Raises
    :class:`IntegrationError` when any piece misses the tolerance.
    """
    edges = [lo] + sorted(b for b in breakpoints if lo < b < hi) + [hi]
    total = 0.0
    pieces = len(edges) - 1
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = _integrate.quad(
                f, a, b, epsabs=abs_tol / pieces, epsrel=rel_tol, limit=400, full_output=1
            )
        val, err = out[0], out[1]
        if not math.isfinite(val):
            raise IntegrationError(f"non-finite integral on ({a}, {b})")
        if len(out) > 3:
            # quad flagged a problem (ier != 0); accept only if the error bound is met anyway
            if err > max(abs_tol / pieces, rel_tol * abs(val)):
                raise IntegrationError(f"quadrature on ({a}, {b}): {out[3].splitlines()[0]}")
        total += val
    return float(total)


def _second_derivative(psi, x, d):
    return (
        -psi(x + 2 * d) + 16.0 * psi(x + d) - 30.0 * psi(x) + 16.0 * psi(x - d) - psi(x - 2 * d)
    ) / (12.0 * d * d)


def _first_derivative(psi, x, d):
    return (-psi(x + 2 * d) + 8.0 * psi(x + d) - 8.0 * psi(x - d) + psi(x - 2 * d)) / (12.0 * d)


def _extrapolated(op, psi, x, d):
    # two stencil widths, Richardson on the h^4 term
    return (16.0 * op(psi, x, 0.5 * d) - op(psi, x, d)) / 15.0


def schrodinger_residual(
    V: Callable,
    E: float,
    psi: Callable,
    g: GridSpec,
    *,
    stencil: float | None = None,
    log_scale: bool = False,
    exclude: Callable | None = None,
) -> float:
    """``max |-psi'' + (V - E) psi| / (max|psi| max(1, |E|))`` over the grid.

    ``psi''`` comes from the five-point stencil of width ``stencil``
    (independent of the grid spacing; default 2e-3, or 1e-2 in ``log x``),
    extrapolated over two widths.  With
    ``log_scale`` the stencil acts in ``s = log x`` and
    ``psi'' = (psi_ss - psi_s) / x**2``, which keeps power-law behaviour at
    an origin well resolved.  Nodes flagged by ``exclude`` are skipped.
    """
    x = g.nodes
    if stencil is None:
        stencil = 1e-2 if log_scale else 2e-3
    if log_scale:
        if g.lo <= 0:
            raise ValueError("log-scale stencil needs lo > 0")
        keep = (x * math.exp(-2 * stencil) >= g.lo) & (x * math.exp(2 * stencil) <= g.hi)
    else:
        keep = (x - 2 * stencil >= g.lo) & (x + 2 * stencil <= g.hi)
    if exclude is not None:
        keep &= ~np.asarray(exclude(x), dtype=bool)
    x = x[keep]
    p0 = np.asarray(psi(x), dtype=float)
    if log_scale:
        phi = lambda s: psi(np.exp(s))  # noqa: E731
        s = np.log(x)
        d2 = (
            _extrapolated(_second_derivative, phi, s, stencil)
            - _extrapolated(_first_derivative, phi, s, stencil)
        ) / (x * x)
    else:
        d2 = _extrapolated(_second_derivative, psi, x, stencil)
    res = -d2 + (np.asarray(V(x)) - E) * p0
    scale = np.max(np.abs(p0)) * max(1.0, abs(E))
    if scale == 0.0 or not np.isfinite(scale):
        raise ValueError("psi vanishes or diverges on the grid")
    return float(np.max(np.abs(res)) / scale)
