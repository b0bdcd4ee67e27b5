"""Takagi decomposition of the joint kernel and the frequency-comb basis.

The symmetric kernel factorises as S = sum_n g_n psi_n psi_n^T with g_n >= 0
and orthonormal supermodes psi_n; each supermode extends to a continuous pulse
train (frequency comb)

    f_n(theta, t) = (2 pi)^{-1/2} sum_k psi_n(t - k T0) e^{i k (theta + ceo_half)}

whose spectrum is a comb shifted by theta / T0 from the down-conversion
centers.  Time-domain samples are produced by discrete Fourier synthesis on a
per-period grid; on a comb-aligned frequency grid (spacing exactly 2 pi / T0)
that synthesis is exactly unitary, so projections and reconstructions below
hold at machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, sqrtm

from .errors import ValidationError
from .kernel import FrequencyGrid, JointKernel, PumpConfig

DEFAULT_GAIN_CUTOFF = 1e-6


def takagi(matrix: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorisation M = U diag(vals) U^T of a complex symmetric matrix.

    Returns singular values in descending order and the unitary U whose
    columns are the symmetric-SVD modes.  A real symmetric input is handled
    through its eigendecomposition (phases i absorb negative eigenvalues); the
    genuinely complex case uses an SVD with a per-degenerate-block phase
    correction.
    """
    m = np.asarray(matrix)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValidationError("takagi needs a square matrix")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > tol * scale:
        raise ValidationError("takagi needs a symmetric matrix")
    if not np.any(m):
        return np.zeros(n), np.eye(n, dtype=complex)
    if np.isrealobj(m) or not np.abs(m.imag).max() > tol * scale:
        lam, u = np.linalg.eigh(m.real)
        vals = np.abs(lam)
        phases = np.where(lam >= 0, 1.0 + 0.0j, 1.0j)
        uc = u.astype(complex) * phases[None, :]
        order = np.argsort(vals)[::-1]
        return vals[order], uc[:, order]
    v, s, wh = np.linalg.svd(m)
    w = wh.conj().T
    # group (near-)degenerate singular values; sqrtm of V^T W per block fixes
    # the relative phases so that U diag(s) U^T reproduces M
    blocks = []
    start = 0
    for i in range(1, n + 1):
        if i == n or abs(s[i] - s[start]) > 1e-10 * max(1.0, s[0]):
            blocks.append(sqrtm(v[:, start:i].T @ w[:, start:i]))
            start = i
    u = v @ np.conj(block_diag(*blocks))
    return s, u


def _fix_mode_signs(modes: np.ndarray) -> np.ndarray:
    """Deterministic gauge: at each mode's max-|.| sample, make Re positive
    (Im positive when the sample is purely imaginary).  Only the sign may be
    touched: any other phase would break the symmetric factorisation."""
    out = modes.copy()
    for n in range(out.shape[1]):
        col = out[:, n]
        z = col[np.argmax(np.abs(col))]
        if abs(z.real) > 1e-12 * abs(z):
            if z.real < 0:
                out[:, n] = -col
        elif z.imag < 0:
            out[:, n] = -col
    return out


@dataclass(frozen=True)
class SupermodeBasis:
    """Gains and supermode functions of one kernel decomposition.

    ``modes_freq[:, n]`` samples psi_n(omega) with unit L2 norm under the
    d_omega/2pi quadrature weight; ``modes_time[:, n]`` samples psi_n(t) on
    ``time_grid`` (one period, pulses centered at t = 0) with unit L2 norm
    under dt.  ``n_kept`` counts modes with g_n >= cutoff * g_0.
    """

    gains: np.ndarray
    modes_freq: np.ndarray
    modes_time: np.ndarray
    grid: FrequencyGrid
    rep_period: float
    time_grid: np.ndarray
    n_kept: int
    gain_cutoff: float
    kernel: JointKernel = field(repr=False)

    @property
    def dt(self) -> float:
        return float(self.time_grid[1] - self.time_grid[0])

    def reconstruction_residual(self) -> float:
        """Relative Frobenius residual of sum_n g_n psi_n psi_n^T (all modes)."""
        weight = self.grid.weight
        phi = self.modes_freq * np.sqrt(weight)
        rec = (phi * self.gains) @ phi.T
        denom = self.kernel.frobenius_norm()
        if denom == 0.0:
            return float(np.linalg.norm(rec))
        return float(np.linalg.norm(rec - self.kernel.matrix) / denom)

    def gram_defect(self, n_modes: int | None = None) -> float:
        """Max deviation of the kept-mode Gram matrix from identity."""
        n = self.n_kept if n_modes is None else n_modes
        phi = self.modes_freq[:, :n] * np.sqrt(self.grid.weight)
        return float(np.abs(phi.conj().T @ phi - np.eye(n)).max())


def schmidt_decompose(kernel: JointKernel,
                      gain_cutoff: float = DEFAULT_GAIN_CUTOFF,
                      rep_period: float | None = None) -> SupermodeBasis:
    """Decompose a joint kernel into supermodes with gains.

    ``rep_period`` fixes the per-period time grid for the synthesized
    psi_n(t); when omitted it is inferred from the grid spacing as
    2 pi / delta_omega, which is exact for comb-aligned grids.
    """
    if gain_cutoff < 0:
        raise ValidationError("gain_cutoff must be >= 0")
    grid = kernel.grid
    if rep_period is None:
        rep_period = 2.0 * np.pi / grid.delta_omega
    gains, u = takagi(kernel.matrix)
    u = _fix_mode_signs(u)
    weight = grid.weight
    modes_freq = u / np.sqrt(weight)

    m = grid.n_points
    tau = (np.arange(m) + 0.5) * rep_period / m - rep_period / 2.0
    synth = np.exp(1j * np.outer(tau, grid.omegas)) * weight
    modes_time = synth @ modes_freq

    if gains[0] > 0.0:
        n_kept = int(np.count_nonzero(gains >= gain_cutoff * gains[0]))
    else:
        n_kept = 0
    return SupermodeBasis(gains=gains, modes_freq=modes_freq,
                          modes_time=modes_time, grid=grid,
                          rep_period=float(rep_period), time_grid=tau,
                          n_kept=n_kept, gain_cutoff=float(gain_cutoff),
                          kernel=kernel)


@dataclass(frozen=True)
class CombFunction:
    """Sampled frequency comb f_n(theta, t) over an integer number of periods.

    Quasi-periodic by construction: f(t + T0) = f(t) e^{i ceo} with
    ceo = theta + ceo_half.
    """

    mode_index: int
    theta: float
    ceo: float
    samples: np.ndarray
    times: np.ndarray
    rep_period: float
    n_periods: int

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def synthesize_comb(basis: SupermodeBasis, n: int, theta: float,
                    n_periods: int, pump: PumpConfig) -> CombFunction:
    """Build the pulse train f_n(theta, t) over ``n_periods`` periods."""
    if not 0 <= n < basis.n_kept:
        raise ValidationError(f"mode index {n} out of kept range {basis.n_kept}")
    if not -np.pi <= theta <= np.pi:
        raise ValidationError("theta must lie in [-pi, pi]")
    if n_periods < 1:
        raise ValidationError("n_periods must be >= 1")
    ceo = theta + pump.ceo_half
    pulse = basis.modes_time[:, n] / np.sqrt(2.0 * np.pi)
    phases = np.exp(1j * np.arange(n_periods) * ceo)
    samples = (phases[:, None] * pulse[None, :]).ravel()
    times = (np.arange(n_periods)[:, None] * basis.rep_period
             + basis.time_grid[None, :]).ravel()
    return CombFunction(mode_index=n, theta=float(theta), ceo=float(ceo),
                        samples=samples, times=times,
                        rep_period=basis.rep_period, n_periods=n_periods)


def comb_inner_product(f: CombFunction, g: CombFunction) -> complex:
    """Per-period normalized overlap (1/K) int f* g dt over the common window."""
    if f.n_periods != g.n_periods or f.samples.shape != g.samples.shape \
            or abs(f.dt - g.dt) > 1e-15 * f.dt:
        raise ValidationError("comb functions live on different grids")
    return complex(np.vdot(f.samples, g.samples) * f.dt / f.n_periods)


def project_pulse(field_samples: np.ndarray, basis: SupermodeBasis,
                  n: int, k: int) -> complex:
    """Overlap of period ``k`` of a sampled field with supermode ``n``.

    The field must be sampled on the basis time grid, consecutively from
    period 0; this is the classical-amplitude analogue of the pulse operator
    a_{n,k}.
    """
    m = basis.time_grid.size
    field = np.asarray(field_samples)
    if n < 0 or n >= basis.gains.size:
        raise ValidationError("mode index out of range")
    if k < 0 or field.size < (k + 1) * m:
        raise ValidationError(
            f"field has {field.size} samples; period {k} needs {(k + 1) * m}")
    segment = field[k * m:(k + 1) * m]
    return complex(np.vdot(basis.modes_time[:, n], segment) * basis.dt)


def pulse_train_from_coefficients(basis: SupermodeBasis,
                                  coefficients: np.ndarray) -> np.ndarray:
    """Synthesize a(t) = sum_{n,k} a_{n,k} psi_n(t - k T0) on the basis grid.

    ``coefficients[n, k]`` covers all decomposition modes (not just kept
    ones); the inverse of ``project_pulse``.
    """
    coeff = np.asarray(coefficients)
    if coeff.shape[0] != basis.gains.size:
        raise ValidationError("coefficient rows must cover all modes")
    return (basis.modes_time @ coeff).T.ravel()
