"""Measurement seeds for covariant joint estimation of squeezing and displacement.

The representation splits into two irreducible sectors, wavefunctions
supported on y > 0 and y < 0, with sector projectors theta(+-Y) and
operators D_+- = pi theta(+-Y) / |Y| entering the nonunimodular
orthogonality relations.  For an input state psi with half-line weights

    w_s = <psi| |Y| theta(sY) |psi>,

the maximum-likelihood seed and its likelihood are

    eta = sum_s |Y| theta(sY) |psi> / sqrt(pi w_s),
    L_opt = (sqrt(w_+) + sqrt(w_-))^2 / pi,

the square-root-measurement seed divides each sector by
sqrt(<psi| D_s |psi>) instead (defined only when that expectation is
finite), and the parity-extended seed uses the full-line weight |Y| with
D = pi / |Y|.  Every constructed seed carries normalization certificates
<eta_s| D_s |eta_s>, which equal 1 by construction up to quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import DivergenceDetected, DomainViolation, EmptySupport
from .grids import (StateVector, abs_moment, adaptive_expectation,
                    adaptive_quadrature, half_line_moment)

SECTOR_THRESHOLD = 1e-14

KIND_ML = "ml"
KIND_SRM = "srm"
KIND_PARITY = "ml-parity"


@dataclass
class PovmSeed:
    """Covariant POVM seed vector |eta> with per-sector metadata.

    ``sector_coeffs`` maps sector sign (+1, -1, or 0 for the full line) to
    the coefficient multiplying |y|^weight_power theta(sector) psi(y); this
    lets the seed be re-evaluated exactly at arbitrary points when the
    source state has a Gaussian evaluator.
    """

    kind: str
    eta: StateVector
    source: StateVector
    w_plus: float
    w_minus: float
    sector_phases: Dict[int, complex]
    certificates: Dict[str, float]
    likelihood: float
    sector_coeffs: Dict[int, complex] = field(repr=False, default_factory=dict)
    weight_power: int = field(repr=False, default=1)

    def multiplier(self, y: np.ndarray) -> np.ndarray:
        m = np.zeros_like(y, dtype=complex)
        for s, cf in self.sector_coeffs.items():
            mask = np.ones_like(y, dtype=bool) if s == 0 else (s * y > 0)
            m[mask] += cf * np.abs(y[mask]) ** self.weight_power
        return m

    def evaluate_at(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.multiplier(y) * self.source.evaluate_at(y)

    def on_grid(self, grid) -> "PovmSeed":
        """Same seed resampled on another grid (exact for Gaussian sources)."""
        if grid.matches(self.eta.grid):
            return self
        src = self.source.with_grid(grid)
        eta = StateVector(grid, self.multiplier(grid.nodes) * src.amplitudes)
        return PovmSeed(self.kind, eta, src, self.w_plus, self.w_minus,
                        self.sector_phases, self.certificates, self.likelihood,
                        self.sector_coeffs, self.weight_power)


def dmc_apply(psi: StateVector, sign: int, power: float) -> StateVector:
    """Apply D_sign^power = (pi/|Y|)^power theta(sign Y) at the node level.

    power = 0 gives the bare sector projection.  The result is generally not
    normalized; divergences surface only in downstream quadratures.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    y = psi.grid.nodes
    w = np.zeros(psi.grid.n)
    mask = sign * y > 0
    w[mask] = (math.pi / np.abs(y[mask])) ** power
    return StateVector(psi.grid, w * psi.amplitudes)


def dmc_expectation(psi: StateVector, sign: int, power: float) -> float:
    """<psi| D_sign^power |psi>; raises DivergenceDetected when it blows up."""
    return math.pi ** power * half_line_moment(psi, sign, int(-power))


def _sector_phase(psi: StateVector, sign: int) -> complex:
    """Phase of the sector coefficient against a real positive reference.

    For real inputs the sign is absorbed into the sector state (positive
    decomposition), so the phase is +1.  Complex inputs get the phase of the
    |Y|-weighted sector integral.
    """
    if psi.is_real:
        return 1.0 + 0.0j
    y = psi.grid.nodes
    mask = sign * y > 0
    u = complex(np.sum(np.abs(y[mask]) * psi.amplitudes[mask]) * psi.grid.dy)
    if u == 0:
        return 1.0 + 0.0j
    return u / abs(u)


def _certificate(seed: PovmSeed, sign: int) -> float:
    """<eta_s| D_s |eta_s> via the same adaptive quadrature as the weights."""

    def weight(y):
        m = np.abs(seed.multiplier(y)) ** 2
        w = np.zeros_like(y)
        mask = np.ones_like(y, dtype=bool) if sign == 0 else (sign * y > 0)
        w[mask] = math.pi * m[mask] / np.abs(y[mask])
        return w

    return adaptive_expectation(seed.source, weight)


def build_ml_seed(psi: StateVector) -> PovmSeed:
    """Optimal maximum-likelihood seed eta = sum_s |Y| theta(sY) psi / sqrt(pi w_s)."""
    weights = {s: half_line_moment(psi, s, 1) for s in (+1, -1)}
    kept = {s: w for s, w in weights.items() if w > SECTOR_THRESHOLD}
    if not kept:
        raise EmptySupport("both sector weights are below threshold")
    phases = {s: _sector_phase(psi, s) for s in kept}
    coeffs = {s: phases[s] / math.sqrt(math.pi * w) for s, w in kept.items()}

    seed = PovmSeed(
        kind=KIND_ML,
        eta=None,  # filled below
        source=psi,
        w_plus=weights[+1],
        w_minus=weights[-1],
        sector_phases=phases,
        certificates={},
        likelihood=sum(math.sqrt(w) for w in kept.values()) ** 2 / math.pi,
        sector_coeffs=coeffs,
        weight_power=1,
    )
    seed.eta = StateVector(psi.grid, seed.multiplier(psi.grid.nodes) * psi.amplitudes)
    seed.certificates = {("+" if s > 0 else "-"): _certificate(seed, s) for s in kept}
    return seed


def optimal_likelihood(psi: StateVector) -> float:
    """L_opt = (sqrt(w_+) + sqrt(w_-))^2 / pi."""
    w = [half_line_moment(psi, s, 1) for s in (+1, -1)]
    kept = [v for v in w if v > SECTOR_THRESHOLD]
    if not kept:
        raise EmptySupport("both sector weights are below threshold")
    return sum(math.sqrt(v) for v in kept) ** 2 / math.pi


def build_srm_seed(psi: StateVector) -> PovmSeed:
    """Square-root-measurement seed: each sector divided by sqrt(<D_s>).

    Defined only when every populated sector lies in the domain of
    D_s^{1/2}; the grid-doubling growth test operationalizes that condition
    and a divergent <D_s> raises DomainViolation.
    """
    masses = {s: half_line_moment(psi, s, 0) for s in (+1, -1)}
    kept = {s: m for s, m in masses.items() if m > SECTOR_THRESHOLD}
    if not kept:
        raise EmptySupport("state has no sector mass")
    dvals = {}
    for s in kept:
        try:
            dvals[s] = math.pi * half_line_moment(psi, s, -1)
        except DivergenceDetected as exc:
            raise DomainViolation(
                "square-root seed undefined: <D> diverges on sector "
                f"{'+' if s > 0 else '-'}; the state is outside the domain of "
                f"D^(1/2) ({exc})") from exc
    phases = {s: _sector_phase(psi, s) for s in kept}
    coeffs = {s: phases[s] / math.sqrt(dvals[s]) for s in kept}
    seed = PovmSeed(
        kind=KIND_SRM,
        eta=None,
        source=psi,
        w_plus=half_line_moment(psi, +1, 1),
        w_minus=half_line_moment(psi, -1, 1),
        sector_phases=phases,
        certificates={},
        likelihood=sum(m / math.sqrt(dvals[s]) for s, m in kept.items()) ** 2,
        sector_coeffs=coeffs,
        weight_power=0,
    )
    seed.eta = StateVector(psi.grid, seed.multiplier(psi.grid.nodes) * psi.amplitudes)
    seed.certificates = {("+" if s > 0 else "-"): _certificate(seed, s) for s in kept}
    return seed


def srm_likelihood(psi: StateVector) -> float:
    """L_srm = (sum_s m_s / sqrt(<psi| D_s |psi>))^2 with m_s the sector mass."""
    masses = {s: half_line_moment(psi, s, 0) for s in (+1, -1)}
    kept = {s: m for s, m in masses.items() if m > SECTOR_THRESHOLD}
    if not kept:
        raise EmptySupport("state has no sector mass")
    total = 0.0
    for s, m in kept.items():
        try:
            d = math.pi * half_line_moment(psi, s, -1)
        except DivergenceDetected as exc:
            raise DomainViolation(
                "square-root likelihood undefined: <D> diverges on sector "
                f"{'+' if s > 0 else '-'} ({exc})") from exc
        total += m / math.sqrt(d)
    return total ** 2


def build_parity_seed(psi: StateVector) -> PovmSeed:
    """Seed for the parity-extended group: eta = |Y| psi / sqrt(pi <|Y|>)."""
    t = abs_moment(psi, 1)
    if t <= SECTOR_THRESHOLD:
        raise EmptySupport("<|Y|> vanishes")
    phase = 1.0 + 0.0j if psi.is_real else _sector_phase(psi, +1)
    coeffs = {0: phase / math.sqrt(math.pi * t)}
    seed = PovmSeed(
        kind=KIND_PARITY,
        eta=None,
        source=psi,
        w_plus=half_line_moment(psi, +1, 1),
        w_minus=half_line_moment(psi, -1, 1),
        sector_phases={0: phase},
        certificates={},
        likelihood=t / math.pi,
        sector_coeffs=coeffs,
        weight_power=1,
    )
    seed.eta = StateVector(psi.grid, seed.multiplier(psi.grid.nodes) * psi.amplitudes)
    seed.certificates = {"full": _certificate(seed, 0)}
    return seed


def seed_overlap_likelihood(seed: PovmSeed, psi: Optional[StateVector] = None) -> float:
    """|<eta|psi>|^2 recomputed by adaptive quadrature (consistency oracle)."""
    if psi is None:
        psi = seed.source

    def integrand(y):
        return np.conj(seed.evaluate_at(y)) * psi.evaluate_at(y)

    return abs(adaptive_quadrature(psi.grid, integrand)) ** 2
