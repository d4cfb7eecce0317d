"""Linearized inversion of the scattering relation.

Radial route: Q(r) = q + (1/(2 pi sigma)^2) * int_{-beta}^{beta}
ln(lambda(r, alpha)) S0(alpha) d alpha with the closed-form log kernel.
General route: double integral of ln|alpha + sigma - r cos(theta - phi)|
against S0(theta, alpha), Simpson in alpha and product integration in theta
(FFT of S0 paired with the kernel's closed-form Fourier coefficients).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import TWO_PI
from .scattering import S0Series

SINGULARITY_FLOOR = 1e-12


class SingularKernelError(ValueError):
    """The log kernel has no value at (r, alpha) = (0, -sigma)."""


def lambda_kernel(r: float, alpha: float, sigma: float) -> float:
    """Closed-form theta integral: exp of (1/2pi) int ln|alpha+sigma-r cos t| dt."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    a = abs(alpha + sigma)
    if r == 0.0 and a == 0.0:
        raise SingularKernelError("lambda kernel undefined at (r, alpha) = (0, -sigma)")
    if r > 0 and a <= r:
        return 0.5 * r
    return 0.5 * (a + np.sqrt(a * a - r * r))


def simpson_weights(n_nodes: int, spacing: float):
    """Composite Simpson weight vector for an odd number of uniform nodes."""
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise ValueError("composite Simpson needs an odd node count >= 3")
    w = np.ones(n_nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * spacing / 3.0


@dataclass(frozen=True)
class ReconstructionResult:
    """Reconstructed potential values with provenance metadata."""

    r: np.ndarray           # radii (radial) or polar radii of the points
    phi: np.ndarray | None  # polar angles for the general route, else None
    values: np.ndarray
    q: float
    sigma: float
    rho: float
    beta: float
    N: int


def _check_uniform(alphas):
    spacing = np.diff(alphas)
    if not np.allclose(spacing, spacing[0], rtol=1e-12, atol=1e-15):
        raise ValueError("alpha grid must be uniform")
    return float(spacing[0])


def reconstruct_radial(s0: S0Series, rho: float, q: float,
                       r_grid) -> ReconstructionResult:
    """Single-integral inversion for radially symmetric potentials."""
    r_grid = np.asarray(r_grid, dtype=float)
    h = _check_uniform(s0.alphas)
    w = simpson_weights(len(s0.alphas), h)
    series = s0.values[0]
    sigma = s0.sigma
    vals = np.empty_like(r_grid)
    for i, r in enumerate(r_grid):
        kern = np.log([lambda_kernel(r, a, sigma) for a in s0.alphas])
        vals[i] = q + (w * kern) @ series / (TWO_PI * sigma) ** 2
    return ReconstructionResult(r_grid, None, vals, q, sigma, rho,
                                s0.beta, (len(s0.alphas) - 1) // 2)


def _kernel_fourier(r: float, shift: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Closed-form coefficients K_hat[m, j] = int_0^{2pi} ln|shift_j -
    r cos u| e^{i n_m u} du.

    With z the larger-modulus root of (r/2)(z + 1/z) = shift the kernel
    factors as ln(r|z|/2) - sum_{k>=1} 2 cos(k u) Re(z^-k) / k, so the
    n = 0 coefficient is 2 pi ln(lambda) and the n != 0 ones are
    -(2 pi / |n|) Re(z^-|n|).
    """
    shift = np.asarray(shift, dtype=float)
    out = np.zeros((len(n), len(shift)))
    if r == 0.0:
        out[n == 0] = TWO_PI * np.log(np.maximum(np.abs(shift),
                                                 SINGULARITY_FLOOR))
        return out
    disc = np.sqrt(shift.astype(complex) ** 2 - r * r)
    z = np.where(shift >= 0, shift + disc, shift - disc) / r  # |z| >= 1
    lam = np.maximum(0.5 * r * np.abs(z), SINGULARITY_FLOOR)
    for m, nm in enumerate(n):
        k = abs(int(nm))
        if k == 0:
            out[m] = TWO_PI * np.log(lam)
        else:
            out[m] = -(TWO_PI / k) * (z ** -k).real
    return out


def reconstruct_general(s0: S0Series, rho: float, q: float, r_grid,
                        phi_grid) -> ReconstructionResult:
    """Double-integral inversion on arbitrary polar points.

    ``r_grid`` and ``phi_grid`` are matched 1-d arrays of evaluation points.
    The theta integral uses product integration: the FFT of S0 over the
    angular nodes is paired with the kernel's exact Fourier coefficients,
    so the only angular error is aliasing of the smooth S0.  Kernel
    arguments closer to zero than the singularity floor are clamped; the
    singularity is integrable so this only regularizes isolated nodes.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    phi_grid = np.asarray(phi_grid, dtype=float)
    h = _check_uniform(s0.alphas)
    w_alpha = simpson_weights(len(s0.alphas), h)
    M = len(s0.thetas)
    n = np.rint(np.fft.fftfreq(M) * M).astype(int)
    coeffs = np.fft.fft(s0.values, axis=0) / M          # (M, L) in theta
    sigma = s0.sigma

    vals = np.empty_like(r_grid)
    shift = s0.alphas + sigma  # (L,)
    for i, (r, phi) in enumerate(zip(r_grid, phi_grid)):
        k_hat = _kernel_fourier(r, shift, n)            # (M, L)
        inner = (coeffs * k_hat * np.exp(1j * n * phi)[:, None]).sum(axis=0)
        vals[i] = q + (inner.real @ w_alpha) / (TWO_PI**3 * sigma**2)
    return ReconstructionResult(r_grid, phi_grid, vals, q, sigma, rho,
                                s0.beta, (len(s0.alphas) - 1) // 2)


def moment_check(s0: S0Series) -> float:
    """Largest |Simpson integral of S0 over alpha| across the theta rows."""
    h = _check_uniform(s0.alphas)
    w = simpson_weights(len(s0.alphas), h)
    return float(np.max(np.abs(s0.values @ w)))


def result_to_text(res: ReconstructionResult, exact=None) -> str:
    """Delimited text with metadata header; optional exact-value column."""
    lines = ["# dipoletomo reconstruction"]
    for name in ("sigma", "rho", "beta", "q"):
        lines.append(f"# {name} = {getattr(res, name):.17g}")
    lines.append(f"# N = {res.N}")
    if exact is not None:
        lines.append("# r, Q_rec, Q_exact, abs_err")
        for r, v, e in zip(res.r, res.values, exact):
            lines.append(f"{r:.17g}, {v:.17g}, {e:.17g}, {abs(v - e):.17g}")
    else:
        lines.append("# r, Q_rec")
        for r, v in zip(res.r, res.values):
            lines.append(f"{r:.17g}, {v:.17g}")
    return "\n".join(lines) + "\n"
