"""Cavity input-output map per comb pair, oscillation threshold, spectra.

Each supermode/frequency-shift pair (n, theta) transforms independently:

    out = (e^{i theta} T_n - r) (1 - r e^{i theta} T_n)^{-1} in,

with T_n the single-pass squeezer of gain g_n rotated by the round-trip phase
delta_rt + ceo_half.  theta = 0 gives single-comb squeezing; theta != 0 gives
twin combs at +-theta in a two-mode squeezed state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AtThresholdError, NoFiniteThresholdError, ValidationError
from .symplectic import ModePairTransform

#: condition-number ceiling for the input-output inversion
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class CavityConfig:
    """Output-coupler amplitude coefficients and round-trip detuning phase."""

    r: float
    delta_rt: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.r < 1.0:
            raise ValidationError(f"need 0 <= r < 1, got r={self.r}")

    @property
    def t(self) -> float:
        """Amplitude transmission; r^2 + t^2 = 1 exactly by construction."""
        return math.sqrt(1.0 - self.r**2)

    @property
    def finesse(self) -> float:
        """Diagnostic high-finesse estimate 2 pi / t^2."""
        return 2.0 * math.pi / self.t**2

    @classmethod
    def from_finesse(cls, finesse: float, delta_rt: float = 0.0) -> "CavityConfig":
        if finesse <= 2.0 * math.pi:
            raise ValidationError("finesse must exceed 2 pi for 0 < r < 1")
        return cls(r=math.sqrt(1.0 - 2.0 * math.pi / finesse), delta_rt=delta_rt)


class ThresholdResult(NamedTuple):
    gain: float
    #: frequency-shift branch that oscillates first: 0.0 or pi
    branch_theta: float


def _wrap_phase(phi: float) -> float:
    """Reduce to (-pi, pi]."""
    return -math.remainder(-phi, 2.0 * math.pi)


def threshold_gain(cavity: CavityConfig, ceo_half: float) -> ThresholdResult:
    """Oscillation threshold acosh[(1+r^2) / (2 r |cos(delta_rt + ceo_half)|)].

    The theta = 0 branch applies when the total phase is within pi/2 of an
    even multiple of pi, the theta = pi branch when within pi/2 of an odd
    multiple; exactly halfway there is no finite threshold.
    """
    if cavity.r == 0.0:
        raise NoFiniteThresholdError("r = 0: no cavity feedback, no threshold")
    phase = _wrap_phase(cavity.delta_rt + ceo_half)
    cos_phase = math.cos(phase)
    if abs(cos_phase) < 1e-15:
        raise NoFiniteThresholdError(
            f"delta_rt + ceo_half = {phase:.6f} is an odd multiple of pi/2")
    branch = 0.0 if cos_phase > 0 else math.pi
    gain = math.acosh((1.0 + cavity.r**2) / (2.0 * cavity.r * abs(cos_phase)))
    return ThresholdResult(gain=gain, branch_theta=branch)


def _round_trip_block(gain: float, theta: float, cavity: CavityConfig,
                      ceo_half: float) -> np.ndarray:
    """e^{i theta} T_n as an explicit 2x2 complex matrix."""
    phase = cavity.delta_rt + ceo_half
    with np.errstate(over="ignore", invalid="ignore"):
        ch, sh = np.cosh(gain), np.sinh(gain)
        up = np.exp(1j * (theta + phase))
        dn = np.exp(1j * (theta - phase))
        return np.array([[up * ch, up * sh],
                         [dn * sh, dn * ch]])


def comb_io(gain: float, theta: float, cavity: CavityConfig,
            ceo_half: float) -> ModePairTransform:
    """Cavity input-output block for one (supermode, frequency-shift) pair.

    Returns the coefficients of
    a_out(theta) = C a_in(theta) + S a_in^dag(-theta); the block satisfies
    |C|^2 - |S|^2 = 1 for every theta below threshold.

    Raises ``AtThresholdError`` when the resolvent 1 - r e^{i theta} T_n is
    numerically singular (condition number above ``CONDITION_LIMIT``).
    """
    if gain < 0:
        raise ValidationError("gain must be >= 0")
    a = _round_trip_block(gain, theta, cavity, ceo_half)
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"gain {gain:g} overflows the round-trip block")
    resolvent = np.eye(2) - cavity.r * a
    if np.linalg.cond(resolvent) >= CONDITION_LIMIT:
        raise AtThresholdError(
            f"input-output map singular at theta={theta:.6g} "
            f"(g={gain:.6g}, r={cavity.r:.6g})", theta=theta)
    m = (a - cavity.r * np.eye(2)) @ np.linalg.inv(resolvent)
    return ModePairTransform(c=complex(m[0, 0]), s=complex(m[0, 1]))


def pair_covariance(gain: float, theta: float, cavity: CavityConfig,
                    ceo_half: float) -> np.ndarray:
    """4x4 covariance of the comb pair (+theta, -theta), basis (x+, p+, x-, p-).

    Vacuum input.  Each reduced single-comb block is thermal with variance
    (1 + 2|S|^2)/2; all cross moments sit in the ``<b(+theta) b(-theta)>``
    correlator K = C(theta) S(-theta).
    """
    tp = comb_io(gain, theta, cavity, ceo_half)
    tm = comb_io(gain, -theta, cavity, ceo_half)
    v_th = 0.5 * (1.0 + 2.0 * abs(tp.s) ** 2)
    k = tp.c * tm.s
    re_k, im_k = k.real, k.imag
    return np.array([
        [v_th, 0.0, re_k, im_k],
        [0.0, v_th, im_k, -re_k],
        [re_k, im_k, v_th, 0.0],
        [im_k, -re_k, 0.0, v_th],
    ])


def epr_pair_check(gain: float, theta: float, cavity: CavityConfig,
                   ceo_half: float) -> float:
    """Two-mode EPR variance of the (+theta, -theta) comb pair.

    Var((x+ - x-)/sqrt2) + Var((p+ + p-)/sqrt2), minimized over a relative
    quadrature rotation of the two combs; below 1 certifies entanglement,
    vacuum gives exactly 1.
    """
    tp = comb_io(gain, theta, cavity, ceo_half)
    tm = comb_io(gain, -theta, cavity, ceo_half)
    v_th = 0.5 * (1.0 + 2.0 * abs(tp.s) ** 2)
    return 2.0 * (v_th - abs(tp.c * tm.s))


@dataclass(frozen=True)
class SqueezingSpectrum:
    """Per-mode variance spectra over a theta grid.

    ``var_p``/``var_x`` are the extremal joint-quadrature variances
    (|C| -+ |S|)^2 / 2 of the (+theta, -theta) pair: at theta = 0 on resonance
    they reduce to the single-comb p/x variances.  ``epr`` is the minimized
    two-mode EPR variance (NaN at theta = 0 where the pair degenerates);
    ``pair_cov`` stacks the 4x4 pair covariances (NaN at theta = 0).
    """

    theta_grid: np.ndarray
    gains: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    epr: np.ndarray
    pair_cov: np.ndarray


def squeezing_spectrum(basis, cavity: CavityConfig, ceo_half: float,
                       theta_grid: Sequence[float]) -> SqueezingSpectrum:
    """Squeezing and pair-entanglement spectra for every kept supermode.

    ``basis`` is a SupermodeBasis or a plain sequence of gains.  All gains
    must lie below the oscillation threshold.
    """
    gains = np.asarray(getattr(basis, "gains", basis), dtype=float)
    n_kept = getattr(basis, "n_kept", gains.size)
    gains = gains[:n_kept]
    thetas = np.asarray(theta_grid, dtype=float)
    if gains.size:
        gth = threshold_gain(cavity, ceo_half).gain
        if gains.max() >= gth:
            raise AtThresholdError(
                f"max gain {gains.max():.6g} is at/above threshold {gth:.6g}",
                theta=threshold_gain(cavity, ceo_half).branch_theta)
    var_x = np.empty((gains.size, thetas.size))
    var_p = np.empty_like(var_x)
    epr = np.full_like(var_x, np.nan)
    pair = np.full((gains.size, thetas.size, 4, 4), np.nan)
    for i, g in enumerate(gains):
        for j, th in enumerate(thetas):
            block = comb_io(g, th, cavity, ceo_half)
            ac, as_ = abs(block.c), abs(block.s)
            var_x[i, j] = 0.5 * (ac + as_) ** 2
            var_p[i, j] = 0.5 * (ac - as_) ** 2
            if th != 0.0:
                pair[i, j] = pair_covariance(g, th, cavity, ceo_half)
                epr[i, j] = epr_pair_check(g, th, cavity, ceo_half)
    return SqueezingSpectrum(theta_grid=thetas, gains=gains, var_x=var_x,
                             var_p=var_p, epr=epr, pair_cov=pair)
