"""Estimation probability densities over the affine group.

``density_at`` returns the conditional probability density of estimating the
group element g when the true transformation is the identity,

    p(g) = Tr[M(g) |psi><psi|] = |<eta| U_{g^{-1}} |psi>|^2,

a density with respect to the left-invariant measure d_L g = e^{-r} dr dx.
With this convention the windowed mass  integral p e^{-r} dx dr  tends to 1
as the window grows (POVM completeness on the span probed by the seed), and
shifting the input state by h translates the density, p'(g) = p(h^{-1} g).

The asymptotic Gaussian law for excited coherent states approximates the
measure-weighted density p(g) e^{-r}; pointwise comparisons against that law
must therefore include the weight.

``group_average_sandwich`` is the brute-force oracle for the group average
integral d_L g U_g A U_g^dag of a rank-one A = |psi><phi|, evaluated between
<u| and |v> and compared against the two-sector closed form
sum_s pi <phi| theta(sY) |Y|^{-1} |psi> <u| theta(sY) |v>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DivergenceDetected, GridMismatch, GridTooNarrow, InsufficientMass
from .grids import GROWTH_FACTOR, MAX_NODES, QuadratureGrid, StateVector
from .group import GroupElement, inverse
from .povm import PovmSeed

MEASURE_CONVENTION = "left-haar: probability = p(x,r) * exp(-r) dx dr"

# Empirically fixed modular sign: conjugating the averaged operator by U_h
# rescales the group average by exp(MODULAR_SIGN * r_h).
MODULAR_SIGN = +1.0

_PHASE_NODES_PER_RADIAN = 8.0 / math.pi  # dy <= pi / (8 |x|_max)


@dataclass
class DensityMap:
    """Sampled estimation density p(x, r) over a rectangular group window."""

    x_nodes: np.ndarray
    r_nodes: np.ndarray
    values: np.ndarray  # shape (len(x_nodes), len(r_nodes))
    window: Tuple[float, float, float, float]  # (x_lo, x_hi, r_lo, r_hi)
    measure_convention: str = MEASURE_CONVENTION
    mass: float = 0.0


@dataclass
class SummaryStats:
    mean_x: float
    mean_r: float
    delta_x: float
    delta_r: float
    argmax_x: float
    argmax_r: float
    peak_value: float


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.zeros_like(nodes)
    if len(nodes) == 1:
        return np.ones(1)
    d = np.diff(nodes)
    w[:-1] += d / 2.0
    w[1:] += d / 2.0
    return w


def _compatible_grids(seed: PovmSeed, psi: StateVector):
    if not seed.eta.grid.matches(psi.grid):
        raise GridMismatch("seed and state must share a quadrature grid")


def density_at(seed: PovmSeed, psi: StateVector, g: GroupElement) -> float:
    """p(g) = |<eta| U_{g^{-1}} |psi>|^2 at a single group element."""
    _compatible_grids(seed, psi)
    gi = inverse(g)
    grid = psi.grid
    y = grid.nodes
    integrand = (np.conj(seed.eta.amplitudes)
                 * math.exp(gi.r / 2.0)
                 * np.exp(-2.0j * gi.x * y)
                 * psi.evaluate_at(math.exp(gi.r) * y))
    return abs(np.sum(integrand) * grid.dy) ** 2


def _refine_for_window(seed: PovmSeed, psi: StateVector,
                       window: Tuple[float, float, float, float]):
    """Resample seed and state so the grid resolves scan phase oscillations."""
    x_lo, x_hi, r_lo, r_hi = window
    grid = psi.grid
    freq = max(abs(x_lo), abs(x_hi)) * math.exp(max(-r_lo, -r_hi, 0.0))
    for src in (psi.evaluator, seed.source.evaluator):
        if src is not None:
            freq += abs(src.linear_phase)
    dy_req = math.pi / (8.0 * max(1.0, freq))
    if grid.dy <= dy_req:
        return seed, psi
    n = 2 ** math.ceil(math.log2(2.0 * grid.y_max / dy_req))
    if n > MAX_NODES:
        raise GridTooNarrow(
            f"scan window needs {n} nodes to control oscillation, cap is {MAX_NODES}")
    fine = QuadratureGrid(grid.y_max, n)
    return seed.on_grid(fine), psi.with_grid(fine)


def scan(seed: PovmSeed, psi: StateVector,
         window: Tuple[float, float, float, float],
         resolution) -> DensityMap:
    """Fill a DensityMap with density_at over a tensor grid.

    ``resolution`` is an int or an (nx, nr) pair, at least 16 per axis.
    Each r row is evaluated as one matrix product over the quadrature grid,
    so the result does not depend on evaluation order.
    """
    x_lo, x_hi, r_lo, r_hi = window
    if not all(math.isfinite(v) for v in window):
        raise ValueError("window must be finite")
    if not (x_lo < x_hi and r_lo < r_hi):
        raise ValueError("window must satisfy x_lo < x_hi and r_lo < r_hi")
    if isinstance(resolution, int):
        nx = nr = resolution
    else:
        nx, nr = resolution
    if nx < 16 or nr < 16:
        raise ValueError("resolution must be at least 16 per axis")
    seed, psi = _refine_for_window(seed, psi, window)

    x_nodes = np.linspace(x_lo, x_hi, nx)
    r_nodes = np.linspace(r_lo, r_hi, nr)
    grid = psi.grid
    y = grid.nodes
    eta_conj = np.conj(seed.eta.amplitudes)
    values = np.empty((nx, nr))
    for j, r_hat in enumerate(r_nodes):
        rp = -r_hat
        xp = -math.exp(-r_hat) * x_nodes  # x components of the inverse elements
        base = eta_conj * psi.evaluate_at(math.exp(rp) * y) * (math.exp(rp / 2.0) * grid.dy)
        phases = np.exp(-2.0j * np.outer(xp, y))
        values[:, j] = np.abs(phases @ base) ** 2

    wx = _trapezoid_weights(x_nodes)
    wr = _trapezoid_weights(r_nodes) * np.exp(-r_nodes)
    mass = float(wx @ values @ wr)
    return DensityMap(x_nodes=x_nodes, r_nodes=r_nodes, values=values,
                      window=(x_lo, x_hi, r_lo, r_hi), mass=mass)


def _quadratic_peak(values: np.ndarray, i: int, j: int,
                    x_nodes: np.ndarray, r_nodes: np.ndarray):
    """Refine a grid peak with a least-squares quadratic on its 3x3 patch."""
    nx, nr = values.shape
    if not (0 < i < nx - 1 and 0 < j < nr - 1):
        return x_nodes[i], r_nodes[j], values[i, j]
    du = np.array([-1.0, 0.0, 1.0])
    rows = []
    rhs = []
    for a in range(3):
        for b in range(3):
            u, v = du[a], du[b]
            rows.append([1.0, u, v, u * u, v * v, u * v])
            rhs.append(values[i - 1 + a, j - 1 + b])
    c = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
    hess = np.array([[2.0 * c[3], c[5]], [c[5], 2.0 * c[4]]])
    det = np.linalg.det(hess)
    if det <= 0:  # not a proper maximum; keep the grid point
        return x_nodes[i], r_nodes[j], values[i, j]
    shift = np.linalg.solve(hess, -np.array([c[1], c[2]]))
    shift = np.clip(shift, -1.0, 1.0)
    u, v = shift
    peak = float(c @ np.array([1.0, u, v, u * u, v * v, u * v]))
    dx = x_nodes[1] - x_nodes[0]
    dr = r_nodes[1] - r_nodes[0]
    return x_nodes[i] + u * dx, r_nodes[j] + v * dr, peak


def argmax(density_map: DensityMap) -> Tuple[float, float, float]:
    """Location and value of the density peak, refined by a quadratic fit.

    Exact grid ties resolve to the lexicographically smallest (x, r).
    """
    values = density_map.values
    flat = int(np.argmax(values))  # first occurrence: smallest (x, r) on ties
    i, j = np.unravel_index(flat, values.shape)
    return _quadratic_peak(values, i, j, density_map.x_nodes, density_map.r_nodes)


def moments(density_map: DensityMap) -> SummaryStats:
    """Means and r.m.s. widths under the weight p(x,r) e^{-r}."""
    if density_map.mass <= 0.9:
        raise InsufficientMass(
            f"window captures mass {density_map.mass:.4f} <= 0.9")
    x = density_map.x_nodes
    r = density_map.r_nodes
    wx = _trapezoid_weights(x)
    wr = _trapezoid_weights(r) * np.exp(-r)
    weighted = density_map.values * np.outer(wx, wr)
    total = float(weighted.sum())
    mean_x = float((weighted.sum(axis=1) * x).sum()) / total
    mean_r = float((weighted.sum(axis=0) * r).sum()) / total
    var_x = float((weighted.sum(axis=1) * (x - mean_x) ** 2).sum()) / total
    var_r = float((weighted.sum(axis=0) * (r - mean_r) ** 2).sum()) / total
    ax, ar, peak = argmax(density_map)
    return SummaryStats(mean_x=mean_x, mean_r=mean_r,
                        delta_x=math.sqrt(max(var_x, 0.0)),
                        delta_r=math.sqrt(max(var_r, 0.0)),
                        argmax_x=ax, argmax_r=ar, peak_value=peak)


def _freq_window(y: np.ndarray, kernel: np.ndarray) -> Tuple[float, float]:
    """Center and half-width of the frequency support of FT[kernel].

    The transform convention is khat(x) = integral k(y) exp(-2ixy) dy, so a
    spatial width sigma maps to frequency extent ~1/sigma and a linear phase
    exp(-2icy) shifts the center to -c.
    """
    w = np.abs(kernel) ** 2
    total = float(w.sum())
    if total == 0.0:
        return 0.0, 0.0
    mu = float((w * y).sum()) / total
    var = float((w * (y - mu) ** 2).sum()) / total
    sigma = math.sqrt(max(var, 1e-300))
    grad = np.gradient(kernel, y)
    center = 0.5 * float(np.imag(np.sum(np.conj(kernel) * grad))) / total
    return center, 6.0 / sigma


def _fourier_line_integral(kernel: np.ndarray, y: np.ndarray, dy: float,
                           lo: float, hi: float, halfwidth: float) -> float:
    """Direct quadrature of |FT kernel|^2 over the frequency window [lo, hi]."""
    if halfwidth <= 0.0 or hi <= lo:
        return 0.0
    # FT features have scale ~ halfwidth / 6; keep ~20 nodes per feature
    dx = halfwidth / 120.0
    nxs = min(max(int(math.ceil((hi - lo) / dx)), 8), 8192)
    xs = np.linspace(lo, hi, nxs)
    ft = np.exp(-2.0j * np.outer(xs, y)) @ (kernel * dy)
    wts = _trapezoid_weights(xs)
    return float((np.abs(ft) ** 2 * wts).sum())


def normalization_check(seed: PovmSeed, psi_test: StateVector,
                        window: Tuple[float, float, float, float],
                        r_resolution: int = 1024) -> float:
    """integral over the window of p(g) e^{-r} dx dr for input psi_test.

    Slices in r are reduced to one-dimensional y quadratures by Parseval
    whenever the window's x range covers the slice's effective support
    (wider than 6 sigma of the Fourier transform); otherwise the truncated
    x integral is evaluated directly.  Tends to 1 on generous windows for
    states in the span probed by the seed.
    """
    _compatible_grids(seed, psi_test)
    x_lo, x_hi, r_lo, r_hi = window
    grid = psi_test.grid
    y = grid.nodes
    eta = seed.eta.amplitudes
    r_nodes = np.linspace(r_lo, r_hi, r_resolution)
    wr = _trapezoid_weights(r_nodes)
    total = 0.0
    for r_hat, wgt in zip(r_nodes, wr):
        kernel = np.conj(eta) * psi_test.evaluate_at(math.exp(-r_hat) * y)
        norm2 = float(np.sum(np.abs(kernel) ** 2)) * grid.dy
        if norm2 == 0.0:
            continue
        # slice integral in the scaled frequency variable x' = -e^{-r} x
        scale = math.exp(-r_hat)
        lo, hi = sorted((-scale * x_lo, -scale * x_hi))
        center, halfwidth = _freq_window(y, kernel)
        if lo <= center - halfwidth and hi >= center + halfwidth:
            slice_val = math.pi * norm2  # Parseval: full-line value
        else:
            slice_val = _fourier_line_integral(kernel, y, grid.dy, lo, hi, halfwidth)
        # dx = e^{r} dx'; the squared e^{r'/2} = e^{-r_hat/2} amplitude factor
        # cancels it, leaving the bare slice value times the Haar weight.
        total += wgt * math.exp(-r_hat) * slice_val
    return total


def group_average_sandwich(psi: StateVector, phi: StateVector,
                           u: StateVector, v: StateVector,
                           window: Tuple[float, float, float, float],
                           r_resolution: int = 1024) -> complex:
    """Brute-force  integral d_L g <u|U_g|psi> <phi|U_g^dag|v>  over the window.

    The closed-form comparison target is
    sum_s pi <phi| theta(sY)/|Y| |psi> <u| theta(sY) |v>.
    Raises DivergenceDetected (via the cross-sector screen) for inadmissible
    pairs, i.e. when <phi| theta(sY)/|Y| |psi> fails the growth test.
    """
    for other in (phi, u, v):
        if not psi.grid.matches(other.grid):
            raise GridMismatch("sandwich states must share a grid")
    _screened_cross_terms(phi, psi)  # admissibility screen

    x_lo, x_hi, r_lo, r_hi = window
    grid = psi.grid
    y = grid.nodes
    r_nodes = np.linspace(r_lo, r_hi, r_resolution)
    wr = _trapezoid_weights(r_nodes)
    total = 0.0 + 0.0j
    for r, wgt in zip(r_nodes, wr):
        s = math.exp(r)
        h1 = np.conj(u.amplitudes) * psi.evaluate_at(s * y)
        h2 = np.conj(v.amplitudes) * phi.evaluate_at(s * y)
        c1, hw1 = _freq_window(y, h1)
        c2, hw2 = _freq_window(y, h2)
        if hw1 == 0.0 or hw2 == 0.0:
            continue
        lo_need = min(c1 - hw1, c2 - hw2)
        hi_need = max(c1 + hw1, c2 + hw2)
        # e^{-r} Haar weight cancels the e^{r} from the two amplitude factors
        if x_lo <= lo_need and x_hi >= hi_need:
            val = math.pi * complex(np.sum(h1 * np.conj(h2))) * grid.dy
        else:
            dx = min(hw1, hw2) / 120.0
            nxs = min(max(int(math.ceil((x_hi - x_lo) / dx)), 8), 8192)
            xs = np.linspace(x_lo, x_hi, nxs)
            phases = np.exp(-2.0j * np.outer(xs, y))
            ft1 = phases @ (h1 * grid.dy)
            ft2 = phases @ (h2 * grid.dy)
            val = complex((ft1 * np.conj(ft2) * _trapezoid_weights(xs)).sum())
        total += wgt * val
    return total


def _cross_sector_term(phi: StateVector, psi: StateVector, sign: int):
    """(value, grows) for <phi| theta(sY)/|Y| |psi> under grid doubling."""

    def weighted(grid: QuadratureGrid) -> complex:
        yy = grid.nodes
        mask = sign * yy > 0
        f = np.conj(phi.evaluate_at(yy[mask])) * psi.evaluate_at(yy[mask])
        return complex(np.sum(f / np.abs(yy[mask])) * grid.dy)

    grid = psi.grid
    v0 = weighted(grid)
    v1 = weighted(grid.refined(2))
    v2 = weighted(grid.refined(4))
    grows = (abs(v1) > abs(v0) * GROWTH_FACTOR
             and abs(v2) > abs(v1) * GROWTH_FACTOR)
    value = v2
    g = grid.refined(4)
    while not grows and g.n < MAX_NODES:
        g = g.refined(2)
        nxt = weighted(g)
        done = abs(nxt - value) <= 1e-9 * abs(nxt) + 1e-300
        value = nxt
        if done:
            break
    return value, grows


def cross_sector_dmc(phi: StateVector, psi: StateVector, sign: int) -> complex:
    """<phi| theta(sY)/|Y| |psi> with the divergence growth screen.

    Values below 1e-9 in magnitude are treated as numerically zero rather
    than screened: a log-divergent tail at that scale cannot move any
    downstream comparison made at the oracle tolerances.
    """
    if not phi.grid.matches(psi.grid):
        raise GridMismatch("states must share a grid")
    value, grows = _cross_sector_term(phi, psi, sign)
    if grows and abs(value) > 1e-9:
        raise DivergenceDetected(
            f"cross-sector <theta({'+' if sign > 0 else '-'}Y)/|Y|> grows under "
            f"grid doubling (magnitude {abs(value):.4g})")
    return value


def _screened_cross_terms(phi: StateVector, psi: StateVector):
    """Both sector cross terms, flagging divergence only where it is material
    relative to the dominant sector (1e-6 relative floor)."""
    terms = {s: _cross_sector_term(phi, psi, s) for s in (+1, -1)}
    scale = max(abs(v) for v, _ in terms.values())
    for s, (v, grows) in terms.items():
        if grows and abs(v) > max(1e-6 * scale, 1e-9):
            raise DivergenceDetected(
                f"cross-sector <theta({'+' if s > 0 else '-'}Y)/|Y|> grows under "
                f"grid doubling (magnitude {abs(v):.4g}); states inadmissible")
    return {s: v for s, (v, _) in terms.items()}


def closed_form_sandwich(psi: StateVector, phi: StateVector,
                         u: StateVector, v: StateVector) -> complex:
    """sum_s pi <phi|theta(sY)/|Y||psi> <u|theta(sY)|v> (the two-sector
    closed form of the group average)."""
    cross = _screened_cross_terms(phi, psi)
    total = 0.0 + 0.0j
    y = u.grid.nodes
    dy = u.grid.dy
    for s in (+1, -1):
        mask = s * y > 0
        proj = complex(np.sum(np.conj(u.amplitudes[mask]) * v.amplitudes[mask]) * dy)
        total += math.pi * cross[s] * proj
    return total
