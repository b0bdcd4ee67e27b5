"""Quantum Fisher information and Cramer-Rao bound for time-delay estimation.

A time translation of the pulse train is generated (per pulse) by the
frequency-weighted quadratic form Omega_mn = int psi_m*(t)(omega0 - i d/dt)
psi_n(t) dt.  For an intense probe the Fisher information reduces to a
Gaussian quadratic form in the p-quadrature covariance, maximised by putting
all probe amplitude in supermode 0 with the pulse weights of the minimum-
variance eigenvector; the resulting bound improves on the coherent-probe
standard quantum limit by 1/(sqrt 2 sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .cavity import CavityConfig, threshold_gain
from .errors import NumericalError, ValidationError
from .pulses import covariance, min_variance_transcendental, sigma2_limit
from .supermodes import SupermodeBasis

#: convergence level defining the "minimum pulse number" of a curve
ASYMPTOTE_FRACTION = 0.99

_MAX_SEARCH_N = 10**7


@dataclass(frozen=True)
class TranslationGenerator:
    """Hermitian matrix of the time-translation generator over kept modes."""

    omega0: float
    matrix: np.ndarray

    def hermiticity_defect(self) -> float:
        """Relative deviation from Hermiticity (entries scale with omega0)."""
        return float(np.abs(self.matrix - self.matrix.conj().T).max()
                     / max(1.0, np.abs(self.matrix).max()))


def omega_matrix(basis: SupermodeBasis, omega0: float) -> TranslationGenerator:
    """Spectral evaluation Omega_mn = sum_i psi_m*(w_i)(omega0 + w_i) psi_n(w_i) dw/2pi."""
    if omega0 <= 0:
        raise ValidationError("omega0 must be positive")
    n = basis.n_kept
    phi = basis.modes_freq[:, :n] * math.sqrt(basis.grid.weight)
    weighted = phi.conj().T * (omega0 + basis.grid.omegas)[None, :]
    return TranslationGenerator(omega0=omega0, matrix=weighted @ phi)


@dataclass(frozen=True)
class ProbeField:
    """Mean probe field over N pulses.

    ``alpha_prime[n, k]`` are the (real) generator-weighted mean amplitudes
    entering the Fisher quadratic form; ``envelope`` samples the mean field
    over the N periods of the basis time grid; ``pulse_freq`` samples the
    probe pulse spectrum psi0(w)/(omega0 + w) before amplitude scaling.
    ``spectral_spread_sq`` is the second moment of the probe spectrum about
    the carrier, <(omega0 + w)^2> - omega0^2, which makes the amplitude
    normalization exact: sum |envelope|^2 dt = N n_bar0.  It can come out
    slightly negative: the 1/(omega0 + w)^2 spectral weighting of the probe
    pulse shifts its mean frequency just below the carrier.
    """

    alpha_prime: np.ndarray
    n_bar0: float
    spectral_spread_sq: float
    amplitude: float
    envelope: np.ndarray
    pulse_freq: np.ndarray
    n_pulses: int

    def total_photons(self, dt: float) -> float:
        return float(np.sum(np.abs(self.envelope) ** 2) * dt)


def fisher_information(probe, v_minus_family: Sequence[np.ndarray]) -> float:
    """Gaussian Fisher information F = (1/2) sum_n alpha_n^T [V_n^(-)]^-1 alpha_n.

    ``probe`` is a ProbeField or a bare (modes x pulses) real array;
    ``v_minus_family`` supplies one symmetric positive-definite p-covariance
    per probe mode row.
    """
    alpha = np.asarray(getattr(probe, "alpha_prime", probe), dtype=float)
    if alpha.ndim == 1:
        alpha = alpha[None, :]
    if len(v_minus_family) < alpha.shape[0]:
        raise ValidationError("need one V^(-) matrix per probe mode row")
    total = 0.0
    for row, vm in zip(alpha, v_minus_family):
        vm = np.asarray(vm, dtype=float)
        if vm.shape != (row.size, row.size):
            raise ValidationError("V^(-) shape does not match probe row")
        try:
            factor = scipy.linalg.cho_factor(vm)
        except scipy.linalg.LinAlgError as exc:
            raise ValidationError(f"V^(-) not positive definite: {exc}") from exc
        total += 0.5 * float(row @ scipy.linalg.cho_solve(factor, row))
    return total


def optimal_probe(basis: SupermodeBasis, omega0: float, cavity: CavityConfig,
                  n_pulses: int, n_bar0: float, gain0: float | None = None,
                  branch_phase: str = "even") -> ProbeField:
    """Optimal mean probe for the time-delay bound.

    All amplitude goes to supermode 0 with pulse weights from the minimum-
    variance eigenvector; the pulse envelope solves (omega0 - i d/dt)
    psi0' = psi0 spectrally, and the overall amplitude carries
    sqrt(N n_bar0 (omega0^2 + spread^2)).
    """
    if n_bar0 <= 0:
        raise ValidationError("n_bar0 must be positive")
    if basis.n_kept < 1:
        raise ValidationError("basis has no kept modes")
    g0 = basis.gains[0] if gain0 is None else float(gain0)
    sol = min_variance_transcendental(g0, cavity.r, n_pulses, branch_phase)

    omegas = basis.grid.omegas
    shifted = omega0 + omegas
    if np.any(shifted <= 0.0):
        raise ValidationError("omega0 + omega must stay positive on the grid")
    pulse_freq = basis.modes_freq[:, 0] / shifted

    weight = basis.grid.weight
    density = np.abs(pulse_freq) ** 2 * weight
    norm_sq = float(density.sum())
    second_moment = float((shifted**2 * density).sum() / norm_sq)
    spread_sq = second_moment - omega0**2
    amplitude = math.sqrt(n_pulses * n_bar0 * second_moment)

    alpha_prime = np.zeros((basis.n_kept, n_pulses))
    alpha_prime[0] = amplitude * sol.eigvec

    tau = basis.time_grid
    pulse_time = (np.exp(1j * np.outer(tau, omegas)) * weight) @ pulse_freq
    envelope = amplitude * (sol.eigvec[:, None] * pulse_time[None, :]).ravel()
    return ProbeField(alpha_prime=alpha_prime, n_bar0=float(n_bar0),
                      spectral_spread_sq=spread_sq, amplitude=amplitude,
                      envelope=envelope, pulse_freq=pulse_freq,
                      n_pulses=n_pulses)


@dataclass(frozen=True)
class MetrologyResult:
    """Time-delay bound for one (sigma^2, N) operating point."""

    fisher: float
    delta_tau: float
    delta_tau_sql: float
    improvement: float


def cramer_rao(sigma2_min: float, n_pulses: int, n_bar0: float, omega0: float,
               spectral_spread_sq: float) -> MetrologyResult:
    """Quantum Cramer-Rao bound dtau^2 = sigma^2 / (2 N n_bar0 (omega0^2 + spread^2)).

    The standard quantum limit is the same expression at the coherent value
    sigma^2 = 1/2, so the improvement factor is 1 / (sqrt 2 sigma).
    """
    if min(sigma2_min, n_bar0, omega0) <= 0 or n_pulses < 1:
        raise ValidationError("cramer_rao needs positive inputs")
    scale = 2.0 * n_pulses * n_bar0 * (omega0**2 + spectral_spread_sq)
    dtau2 = sigma2_min / scale
    dtau2_sql = 0.5 / scale
    return MetrologyResult(fisher=1.0 / dtau2,
                           delta_tau=math.sqrt(dtau2),
                           delta_tau_sql=math.sqrt(dtau2_sql),
                           improvement=math.sqrt(dtau2_sql / dtau2))


def _sigma2_at(gain: float, r: float, n: int) -> float:
    if gain == 0.0:
        return 0.5
    if n == 1:
        return float(covariance(gain, r, 1).v_minus[0, 0])
    return min_variance_transcendental(gain, r, n).sigma2


def _improvement_at(gain: float, r: float, n: int) -> float:
    return 1.0 / math.sqrt(2.0 * _sigma2_at(gain, r, n))


@dataclass(frozen=True)
class ImprovementCurve:
    """Quantum improvement vs pulse number for several pump ratios."""

    ratios: np.ndarray
    n_values: np.ndarray
    sigma2: np.ndarray
    improvement: np.ndarray
    asymptote: np.ndarray
    min_pulses_to_asymptote: np.ndarray


def improvement_curve(cavity: CavityConfig, ratios: Sequence[float],
                      n_max: int, ceo_half: float = 0.0) -> ImprovementCurve:
    """Improvement(N) for N = 1..n_max at each pump ratio g0/g_th < 1.

    Also reports the asymptote 1/(sqrt 2 sigma(inf)) and the minimum pulse
    number reaching ``ASYMPTOTE_FRACTION`` of it (searched beyond n_max when
    necessary).
    """
    ratios = np.asarray(ratios, dtype=float)
    if np.any(ratios < 0.0) or np.any(ratios >= 1.0):
        raise ValidationError("pump ratios must lie in [0, 1)")
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    gth = threshold_gain(cavity, ceo_half).gain
    ns = np.arange(1, n_max + 1)
    sig = np.empty((ratios.size, ns.size))
    imp = np.empty_like(sig)
    asym = np.empty(ratios.size)
    min_n = np.empty(ratios.size, dtype=int)
    for i, ratio in enumerate(ratios):
        g = ratio * gth
        for j, n in enumerate(ns):
            sig[i, j] = _sigma2_at(g, cavity.r, int(n))
            imp[i, j] = 1.0 / math.sqrt(2.0 * sig[i, j])
        asym[i] = 1.0 / math.sqrt(2.0 * sigma2_limit(g, cavity.r)) if g > 0 else 1.0
        min_n[i] = _first_n_at_asymptote(g, cavity.r, asym[i])
    return ImprovementCurve(ratios=ratios, n_values=ns, sigma2=sig,
                            improvement=imp, asymptote=asym,
                            min_pulses_to_asymptote=min_n)


def _first_n_at_asymptote(gain: float, r: float, asymptote: float) -> int:
    target = ASYMPTOTE_FRACTION * asymptote
    if _improvement_at(gain, r, 1) >= target:
        return 1
    lo, hi = 1, 2
    while _improvement_at(gain, r, hi) < target:
        lo, hi = hi, hi * 2
        if hi > _MAX_SEARCH_N:
            raise NumericalError("asymptote not reached below N = 1e7")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _improvement_at(gain, r, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi
