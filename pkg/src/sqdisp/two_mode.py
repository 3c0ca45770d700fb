"""Regularized two-mode entangled pointers in a truncated Fock basis.

The ideal pointer vectors  (1/sqrt(pi)) integral dy sqrt(|y|) |y>|+-y>  make
an orthogonal joint measurement of squeezing and displacement possible but
are not normalizable.  Their lambda-regularized versions damp the two-mode
Fock amplitudes geometrically,

    <n, m| Phi(lambda)_s > = N_lambda lambda^{n+m} c_nm,
    c_nm = (1/sqrt(pi)) integral sqrt(|y|) h_n(y) h_m(s y) dy,

with h_n the oscillator eigenfunctions in the quadrature scaling
(h_0(y) = (2/pi)^{1/4} e^{-y^2}), generated by the stable three-term
recurrence.  Parity forces c_nm = 0 for odd n + m, and the sign flip obeys
c^-_nm = (-1)^m c^+_nm.

The truncated coefficient mass drops like sqrt(k) lambda^{2k} across total
degree k = n + m, so cutting at n_max drops an estimable geometric tail;
``make_pointer`` raises CutoffTooSmall when that estimate exceeds
``tail_tol``.  Close to lambda = 1 any practical cutoff fails the default
1e-4 criterion, and callers that accept a truncated model pass a larger
tolerance (or None) explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import CutoffTooSmall, GridMismatch
from .distribution import DensityMap, _trapezoid_weights
from .grids import QuadratureGrid
from .group import GroupElement

DEFAULT_TEST_LAMBDAS = (0.9, 0.95, 0.99)
DEFAULT_N_MAX = 60
TAIL_TOL = 1e-4


def hermite_functions(n_max: int, y: np.ndarray) -> np.ndarray:
    """Oscillator eigenfunctions h_0 .. h_{n_max} at the points y.

    Quadrature scaling: h_n(y) = 2^{1/4} phi_n(sqrt(2) y) with phi_n the
    standard orthonormal Hermite functions, so that the h_n are orthonormal
    in integral dy.
    """
    u = math.sqrt(2.0) * np.asarray(y, dtype=float)
    H = np.zeros((n_max + 1, len(u)))
    H[0] = (2.0 / math.pi) ** 0.25 * np.exp(-0.5 * u * u)
    if n_max >= 1:
        H[1] = math.sqrt(2.0) * u * H[0]
    for n in range(1, n_max):
        H[n + 1] = math.sqrt(2.0 / (n + 1)) * u * H[n] - math.sqrt(n / (n + 1)) * H[n - 1]
    return H


def _pointer_grid(n_max: int) -> QuadratureGrid:
    # h_n lives inside |y| <= sqrt(2 n_max + 1)/sqrt(2); keep a safety margin
    y_max = 1.25 * math.sqrt(2.0 * n_max + 1.0) / math.sqrt(2.0) + 2.0
    return QuadratureGrid(y_max, 2048)


@dataclass
class TwoModePointer:
    """lambda-regularized entangled pointer in a truncated two-mode Fock basis."""

    lam: float
    sign: int
    n_max: int
    coeffs: np.ndarray  # normalized N_lambda lambda^{n+m} c_nm, (n_max+1)^2
    norm_constant: float
    grid: QuadratureGrid

    @property
    def mean_energy(self) -> float:
        """<a^dag a + b^dag b> of the truncated pointer."""
        k = np.arange(self.n_max + 1)
        return float(((k[:, None] + k[None, :]) * self.coeffs ** 2).sum())


def raw_pointer_coefficients(n_max: int, sign: int = +1,
                             n_quad: int = 2048) -> np.ndarray:
    """c_nm = (1/sqrt(pi)) integral sqrt(|y|) h_n(y) h_m(sign y) dy.

    Parity reduces this to 2/sqrt(pi) times the half-line integral for even
    n + m (exactly zero otherwise); the substitution y = t^2 removes the
    sqrt(|y|) kink so the midpoint sum converges superalgebraically:

        c_nm = (4/sqrt(pi)) integral_0^inf t^2 h_n(t^2) h_m(t^2) dt.
    """
    y_max = _pointer_grid(n_max).y_max
    dt = math.sqrt(y_max) / n_quad
    t = (np.arange(n_quad) + 0.5) * dt
    Ht = hermite_functions(n_max, t * t)
    C = (4.0 / math.sqrt(math.pi)) * (Ht * (t * t * dt)) @ Ht.T
    k = np.arange(n_max + 1)
    parity = (k[:, None] + k[None, :]) % 2 == 1
    C[parity] = 0.0
    if sign < 0:
        C = C * ((-1.0) ** k)[None, :]
    return C


def _tail_estimate(shell_mass: np.ndarray) -> float:
    """Dropped-mass fraction beyond the last complete shell, by geometric
    extrapolation over the trailing even-degree shells."""
    nz = np.nonzero(shell_mass > 0)[0]
    if len(nz) < 4:
        return 0.0
    trail = nz[-4:]
    span = trail[-1] - trail[0]
    q = (shell_mass[trail[-1]] / shell_mass[trail[0]]) ** (1.0 / span)
    q = min(q, 0.999999)
    step = trail[-1] - trail[-2]
    ratio = q ** step
    tail = shell_mass[trail[-1]] * ratio / (1.0 - ratio)
    return float(tail / (shell_mass.sum() + tail))


def make_pointer(lam: float, sign: int, n_max: int = DEFAULT_N_MAX,
                 grid: Optional[QuadratureGrid] = None,
                 tail_tol: Optional[float] = TAIL_TOL) -> TwoModePointer:
    """Build the normalized truncated pointer |Phi(lambda)_sign>.

    ``tail_tol`` bounds the estimated coefficient mass dropped by the
    truncation; pass a larger value (or None) to accept a strongly truncated
    model, e.g. for lambda close to 1 at moderate n_max.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie strictly between 0 and 1")
    if n_max < 20:
        raise ValueError("n_max must be at least 20")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if grid is None:
        grid = _pointer_grid(n_max)
    C = raw_pointer_coefficients(n_max, sign)
    k = np.arange(n_max + 1)
    A = lam ** (k[:, None] + k[None, :]) * C
    total = float((A ** 2).sum())
    if total == 0.0:
        raise ValueError("pointer coefficients vanished")

    degrees = k[:, None] + k[None, :]
    shell_mass = np.zeros(n_max + 1)
    for kk in range(0, n_max + 1):  # complete shells only (n + m = kk <= n_max)
        shell_mass[kk] = float((A[degrees == kk] ** 2).sum())
    tail = _tail_estimate(shell_mass)
    if tail_tol is not None and tail > tail_tol:
        raise CutoffTooSmall(
            f"estimated dropped tail {tail:.3e} exceeds {tail_tol:.1e} for "
            f"lambda={lam}, n_max={n_max}")

    norm_constant = 1.0 / math.sqrt(total)
    return TwoModePointer(lam=lam, sign=sign, n_max=n_max,
                          coeffs=norm_constant * A,
                          norm_constant=norm_constant, grid=grid)


def _mode1_waves(p: TwoModePointer, H: np.ndarray) -> np.ndarray:
    """f_m(y) = sum_n coeffs[n, m] h_n(y), one row per mode-2 index m."""
    return p.coeffs.T @ H


def pointer_overlap(p1: TwoModePointer, g: GroupElement,
                    p2: TwoModePointer) -> complex:
    """<<Phi(lambda1)_{s1}| U_g (x) 1 |Phi(lambda2)_{s2}>>.

    Synthesizes the mode-1 wavefunctions on the grid, applies the affine
    action to the ket, and contracts over the mode-2 Fock index.
    """
    if p1.n_max != p2.n_max:
        raise GridMismatch("pointers must share n_max")
    if not p1.grid.matches(p2.grid):
        raise GridMismatch("pointers must share the synthesis grid")
    grid = p1.grid
    y = grid.nodes
    H = hermite_functions(p1.n_max, y)
    Hs = hermite_functions(p1.n_max, math.exp(g.r) * y)
    bra = _mode1_waves(p1, H)
    ket = _mode1_waves(p2, Hs)
    kernel = (bra * ket).sum(axis=0)  # coefficients are real
    phase = np.exp(-2.0j * g.x * y)
    return complex(math.exp(g.r / 2.0) * np.sum(kernel * phase) * grid.dy)


@dataclass
class ConcentrationProfile:
    """Self-overlap profile of the pointer pair with its second-moment widths."""

    map: DensityMap
    width_x: float
    width_r: float


def concentration_profile(lam: float, n_max: int,
                          window: Tuple[float, float, float, float],
                          resolution, tail_tol: Optional[float] = TAIL_TOL) -> ConcentrationProfile:
    """Map of sum_s |<<Phi(lambda)_s| U_{x,r} (x) 1 |Phi(lambda)_+>>|^2.

    Widths are the second moments of the profile about the origin over the
    window; they shrink monotonically as lambda -> 1 (delta concentration).
    """
    x_lo, x_hi, r_lo, r_hi = window
    if isinstance(resolution, int):
        nx = nr = resolution
    else:
        nx, nr = resolution
    p_plus = make_pointer(lam, +1, n_max, tail_tol=tail_tol)
    p_minus = make_pointer(lam, -1, n_max, grid=p_plus.grid, tail_tol=tail_tol)
    grid = p_plus.grid
    y = grid.nodes
    H = hermite_functions(n_max, y)
    bra_p = _mode1_waves(p_plus, H)
    bra_m = _mode1_waves(p_minus, H)

    x_nodes = np.linspace(x_lo, x_hi, nx)
    r_nodes = np.linspace(r_lo, r_hi, nr)
    values = np.empty((nx, nr))
    for j, r in enumerate(r_nodes):
        Hs = hermite_functions(n_max, math.exp(r) * y)
        ket = _mode1_waves(p_plus, Hs)
        kern_p = (bra_p * ket).sum(axis=0) * grid.dy
        kern_m = (bra_m * ket).sum(axis=0) * grid.dy
        phases = np.exp(-2.0j * np.outer(x_nodes, y))
        amp = math.exp(r / 2.0)
        values[:, j] = (np.abs(amp * (phases @ kern_p)) ** 2
                        + np.abs(amp * (phases @ kern_m)) ** 2)

    wx = _trapezoid_weights(x_nodes)
    wr = _trapezoid_weights(r_nodes) * np.exp(-r_nodes)
    mass = float(wx @ values @ wr)
    dmap = DensityMap(x_nodes=x_nodes, r_nodes=r_nodes, values=values,
                      window=window, mass=mass)
    flat_wr = _trapezoid_weights(r_nodes)
    weighted = values * np.outer(wx, flat_wr)
    total = float(weighted.sum())
    width_x = math.sqrt(float((weighted.sum(axis=1) * x_nodes ** 2).sum()) / total)
    width_r = math.sqrt(float((weighted.sum(axis=0) * r_nodes ** 2).sum()) / total)
    return ConcentrationProfile(map=dmap, width_x=width_x, width_r=width_r)
