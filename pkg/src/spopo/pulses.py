"""Closed-form pulse-train covariance matrices and their minimum-variance mode.

For N successive pulses of one supermode (coherent/vacuum input, resonant
round-trip phase), the quadrature covariances are Toeplitz:

    V_(j,k)^(+-) = delta_jk/2 (r^2 + t^4 e^(+-2g) / (1 - r^2 e^(+-2g)))
                 - (1-delta_jk)/2 t^2 (1 - e^(+-2g)) / (1 - r^2 e^(+-2g))
                   (r e^(+-g))^|j-k|

(+ is the amplified x quadrature, - the squeezed p quadrature).  The smallest
eigenpair of V^(-) has a cosine eigenvector with angle quantized by
cos(theta (N+1)/2) = r e^{-g} cos(theta (N-1)/2), 0 < N theta < pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AboveThresholdError, NumericalError, ValidationError

#: truncation target for the squared tail of the input-output series
SERIES_TAIL = 1e-14

_BRANCHES = ("even", "odd")


def _effective_r(r: float, branch_phase: str) -> float:
    """Resonant branches: even (delta = 2 n pi) keeps r, odd flips its sign."""
    if branch_phase not in _BRANCHES:
        raise ValidationError(f"branch_phase must be one of {_BRANCHES}")
    return r if branch_phase == "even" else -r


def _check_below_threshold(gain: float, r: float, strict: bool = True) -> None:
    """Strict mode rejects r e^g >= 1 (series divergence); the closed forms
    accept g = -ln r itself, where only the + branch diverges."""
    if gain < 0:
        raise ValidationError("gain must be >= 0")
    if not 0.0 <= r < 1.0:
        raise ValidationError(f"need 0 <= r < 1, got {r}")
    q = r * math.exp(gain)
    if (q >= 1.0) if strict else (q > 1.0 + 1e-12):
        raise AboveThresholdError(
            f"r e^g = {q:.6g} {'>=' if strict else '>'} 1: above threshold")


@dataclass(frozen=True)
class PulseCovariance:
    """Toeplitz x/p covariance matrices of N successive pulses."""

    n_pulses: int
    gain: float
    r: float
    t: float
    v_plus: np.ndarray
    v_minus: np.ndarray


def io_series_coefficients(gain: float, r: float, t: float,
                           branch_phase: str = "even",
                           s_max: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Pulse input-output series coefficients for the x (+g) and p (-g) branches.

    Output pulse k is coeff[0] times input pulse k plus coeff[s] times input
    pulse k-s: (-r, t^2 e^{+-g}, t^2 r e^{+-2g}, ...).  ``s_max`` defaults to
    the smallest truncation whose squared tail is below ``SERIES_TAIL``.
    """
    _check_below_threshold(gain, abs(r))
    if abs(r**2 + t**2 - 1.0) > 1e-12:
        raise ValidationError("r^2 + t^2 must equal 1")
    r_eff = _effective_r(r, branch_phase)
    if s_max is None:
        # tail of sum c_s^2 on the + branch is (t^2 e^g)^2 q^(2 smax) / (1-q^2),
        # q = |r| e^g < 1
        q = abs(r) * math.exp(gain)
        if q == 0.0:
            s_max = 1
        else:
            lead = (t**2 * math.exp(gain)) ** 2 / (1.0 - q**2)
            s_max = max(1, int(math.ceil(
                math.log(SERIES_TAIL / max(lead, SERIES_TAIL)) / (2.0 * math.log(q)))))
    out = []
    s = np.arange(1, s_max + 1)
    for sign in (+1.0, -1.0):
        coeff = np.empty(s_max + 1)
        coeff[0] = -r_eff
        coeff[1:] = t**2 * r_eff ** (s - 1) * np.exp(sign * gain * s)
        out.append(coeff)
    return out[0], out[1]


def covariance(gain: float, r: float, n_pulses: int,
               branch_phase: str = "even") -> PulseCovariance:
    """Exact closed-form pulse covariance matrices V^(+-)(N).

    Valid up to and including g = -ln r, where the amplified branch V^(+)
    diverges and is reported as +inf.
    """
    _check_below_threshold(gain, r, strict=False)
    if n_pulses < 1:
        raise ValidationError("n_pulses must be >= 1")
    r_eff = _effective_r(r, branch_phase)
    t2 = 1.0 - r**2
    idx = np.arange(n_pulses)
    sep = np.abs(idx[:, None] - idx[None, :])
    mats = []
    for sign in (+1.0, -1.0):
        e2 = math.exp(2.0 * sign * gain)
        denom = 1.0 - r**2 * e2
        if denom <= 0.0:
            mats.append(np.full((n_pulses, n_pulses), np.inf))
            continue
        diag = 0.5 * (r**2 + t2**2 * e2 / denom)
        off = -0.5 * t2 * (1.0 - e2) / denom \
            * (r_eff * math.exp(sign * gain)) ** sep
        mats.append(np.where(sep == 0, diag, off))
    return PulseCovariance(n_pulses=n_pulses, gain=gain, r=r,
                           t=math.sqrt(t2), v_plus=mats[0], v_minus=mats[1])


@dataclass(frozen=True)
class MinVarianceSolution:
    """Smallest eigenpair of V^(-)(N).

    ``theta_sol`` is the cosine-mode angle in (0, pi/N) for the semi-analytic
    route, None when the eigenpair came from a dense solver (or N = 1).
    """

    sigma2: float
    eigvec: np.ndarray
    theta_sol: float | None = None


def min_variance_direct(cov: PulseCovariance) -> MinVarianceSolution:
    """Smallest eigenpair of V^(-) by a dense symmetric eigensolver.

    Sign gauge: the central eigenvector entry is made positive.
    """
    if cov.n_pulses > 4096:
        raise ValidationError("dense solve limited to N <= 4096")
    vals, vecs = scipy.linalg.eigh(cov.v_minus)
    vec = vecs[:, 0]
    center = vec[(cov.n_pulses - 1) // 2]
    if center < 0 or (center == 0 and vec.sum() < 0):
        vec = -vec
    return MinVarianceSolution(sigma2=float(vals[0]), eigvec=vec)


def _variance_at_angle(gain: float, r: float, theta: float) -> float:
    z_num = r - np.exp(1j * theta) * math.exp(-gain)
    z_den = 1.0 - r * np.exp(1j * theta) * math.exp(-gain)
    return 0.5 * abs(z_num / z_den) ** 2


def sigma2_limit(gain: float, r: float) -> float:
    """Large-N limit of the minimum variance: p-quadrature variance of the
    squeezed comb at zero shift, (1/2) [(r - e^-g) / (1 - r e^-g)]^2."""
    _check_below_threshold(gain, r, strict=False)
    return _variance_at_angle(gain, r, 0.0)


def min_variance_transcendental(gain: float, r: float, n_pulses: int,
                                branch_phase: str = "even") -> MinVarianceSolution:
    """Semi-analytic smallest eigenpair of V^(-)(N).

    Solves cos(theta (N+1)/2) = r e^{-g} cos(theta (N-1)/2) on (0, pi/N) by
    scanning for the first sign change and bisecting; the eigenvector entries
    are cos[theta (N - 2k - 1)/2], normalized, and the variance follows from
    the closed form at that angle.  N = 1 returns the matrix diagonal.

    The odd branch is handled through the exact similarity
    V_odd = D V_even D, D = diag((-1)^k): same spectrum, alternating signs on
    the eigenvector, so the quantization is always solved with +r.
    """
    _check_below_threshold(gain, r, strict=False)
    if n_pulses < 1:
        raise ValidationError("n_pulses must be >= 1")
    _effective_r(r, branch_phase)  # validates branch_phase
    if n_pulses == 1:
        cov = covariance(gain, r, 1, branch_phase)
        return MinVarianceSolution(sigma2=float(cov.v_minus[0, 0]),
                                   eigvec=np.array([1.0]))
    q = r * math.exp(-gain)

    def condition(theta: float) -> float:
        return math.cos(0.5 * theta * (n_pulses + 1)) \
            - q * math.cos(0.5 * theta * (n_pulses - 1))

    eps = 1e-12
    lo = hi = None
    grid = np.linspace(eps, math.pi / n_pulses - eps, 65)
    values = [condition(x) for x in grid]
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            lo = hi = grid[i]
            break
        if values[i] * values[i + 1] < 0.0:
            lo, hi = grid[i], grid[i + 1]
            break
    if lo is None:
        raise NumericalError(
            f"no bracket for the minimum-variance angle (g={gain}, r={r}, "
            f"N={n_pulses}); below threshold this indicates a bug")
    for _ in range(200):
        if hi - lo <= eps * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if condition(lo) * condition(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    theta = 0.5 * (lo + hi)

    k = np.arange(n_pulses)
    vec = np.cos(0.5 * theta * (n_pulses - 2 * k - 1))
    if branch_phase == "odd":
        vec = vec * (-1.0) ** k
    vec = vec / np.linalg.norm(vec)
    center = vec[(n_pulses - 1) // 2]
    if center < 0:
        vec = -vec
    sigma2 = _variance_at_angle(gain, r, theta)
    return MinVarianceSolution(sigma2=float(sigma2), eigvec=vec,
                               theta_sol=float(theta))


def duan_sum(cov: PulseCovariance, j: int, k: int) -> float:
    """Duan separability witness Var(x_j - x_k) + Var(p_j + p_k).

    Separable states satisfy >= 2 in this convention (vacuum gives exactly 2);
    smaller values certify entanglement of the pulse pair.
    """
    n = cov.n_pulses
    if j == k:
        raise ValidationError("duan_sum needs two distinct pulses")
    if not (0 <= j < n and 0 <= k < n):
        raise ValidationError(f"pulse indices ({j}, {k}) out of range 0..{n - 1}")
    vp, vm = cov.v_plus, cov.v_minus
    var_x = vp[j, j] + vp[k, k] - 2.0 * vp[j, k]
    var_p = vm[j, j] + vm[k, k] + 2.0 * vm[j, k]
    return float(var_x + var_p)
