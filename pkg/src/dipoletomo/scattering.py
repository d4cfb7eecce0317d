"""Launch geometry, scattering samples and tables, and the S0 series.

A launch (theta, alpha, sigma, rho) starts the dipole on the line tangent
to the ball of radius rho/2pi opposite its travel direction:
xi0 = sigma (-sin theta, cos theta), x0 = alpha perp(xi0)/sigma - (rho/2pi) xi0/sigma.
The scattering sample is S = X(tau) - X_e(tau).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import (TWO_PI, IntegratorConfig, PhaseState, free_flow,
                       integrate)
from .potential import Potential, parse_potential, perp


@dataclass(frozen=True)
class LaunchParams:
    theta: float
    alpha: float
    sigma: float
    rho: float

    def __post_init__(self):
        if self.sigma <= 0 or self.rho <= 0:
            raise ValueError("need sigma > 0 and rho > 0")

    @property
    def xi0(self):
        return self.sigma * np.array([-np.sin(self.theta), np.cos(self.theta)])

    @property
    def x0(self):
        xi = self.xi0
        return self.alpha * perp(xi) / self.sigma - (self.rho / TWO_PI) * xi / self.sigma

    @property
    def beta(self) -> float:
        return self.sigma + self.rho / TWO_PI

    def state(self) -> PhaseState:
        return PhaseState(self.x0, self.xi0)


def launch(theta: float, alpha: float, sigma: float, rho: float) -> PhaseState:
    """Initial phase state for the given launch parameters."""
    return LaunchParams(theta, alpha, sigma, rho).state()


@dataclass(frozen=True)
class ScatteringSample:
    theta: float
    alpha: float
    S_x: np.ndarray
    S_xi: np.ndarray
    tau_used: float

    def vector(self):
        return np.concatenate((np.asarray(self.S_x), np.asarray(self.S_xi)))


def scattering_sample(theta, alpha, sigma, rho, pot: Potential, tau=None,
                      cfg: IntegratorConfig = IntegratorConfig()) -> ScatteringSample:
    """S(theta, alpha) = X(tau, X0) - X_e(tau, X0) for one launch."""
    if tau is None:
        tau = 2.0 * sigma * rho
    if tau < 2.0 * sigma * rho:
        raise ValueError("tau must be at least the free-flow exit time 2*sigma*rho")
    x0 = launch(theta, alpha, sigma, rho)
    final = integrate(x0, pot, tau, cfg).final_state
    free = free_flow(tau, x0)
    return ScatteringSample(theta, alpha, final.x - free.x, final.xi - free.xi, tau)


def rotate_sample(sample: ScatteringSample, theta: float) -> ScatteringSample:
    """Apply the rotation R_theta blockwise to S_x and S_xi."""
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return ScatteringSample(theta, sample.alpha, rot @ sample.S_x,
                            rot @ sample.S_xi, sample.tau_used)


@dataclass(frozen=True)
class ScatteringTable:
    """Sampled scattering relation on a (theta, alpha) product grid.

    ``S_x`` and ``S_xi`` have shape (M, 2N+1, 2); row k is angle thetas[k],
    column l is alphas[l] = beta * (l - N) / N.
    """

    sigma: float
    rho: float
    N: int
    thetas: np.ndarray
    alphas: np.ndarray
    S_x: np.ndarray
    S_xi: np.ndarray
    tau: float
    potential: str
    rel_tol: float
    abs_tol: float

    @property
    def beta(self) -> float:
        return self.sigma + self.rho / TWO_PI

    def sample(self, k: int, l: int) -> ScatteringSample:
        return ScatteringSample(self.thetas[k], self.alphas[l],
                                self.S_x[k, l], self.S_xi[k, l], self.tau)


def _alpha_grid(sigma, rho, N):
    beta = sigma + rho / TWO_PI
    return beta * np.arange(-N, N + 1) / N


def _one_sample(args):
    theta, alpha, sigma, rho, descr, tau, cfg = args
    s = scattering_sample(theta, alpha, sigma, rho, parse_potential(descr), tau, cfg)
    return s.S_x, s.S_xi


def _build_table(pot, sigma, rho, N, thetas, tau, cfg, workers):
    if N < 2:
        raise ValueError("need N >= 2")
    alphas = _alpha_grid(sigma, rho, N)
    beta = sigma + rho / TWO_PI
    if tau is None:
        tau = 2.0 * sigma * rho
    descr = pot.describe()

    jobs, slots = [], []
    for k, th in enumerate(thetas):
        for l, al in enumerate(alphas):
            # |alpha| >= beta: neither vortex meets the ball, S = 0 exactly
            if abs(al) >= beta - 1e-15:
                continue
            jobs.append((th, al, sigma, rho, descr, tau, cfg))
            slots.append((k, l))

    S_x = np.zeros((len(thetas), len(alphas), 2))
    S_xi = np.zeros_like(S_x)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_sample, jobs, chunksize=16))
    else:
        results = [_one_sample(j) for j in jobs]
    for (k, l), (sx, sxi) in zip(slots, results):
        S_x[k, l] = sx
        S_xi[k, l] = sxi
    return ScatteringTable(sigma, rho, N, np.asarray(thetas, float), alphas,
                           S_x, S_xi, tau, descr, cfg.rel_tol, cfg.abs_tol)


def radial_table(pot: Potential, sigma: float, rho: float, N: int, tau=None,
                 cfg: IntegratorConfig = IntegratorConfig(),
                 workers: int = 1) -> ScatteringTable:
    """Scattering table at theta = 0 over the symmetric alpha grid."""
    return _build_table(pot, sigma, rho, N, [0.0], tau, cfg, workers)


def angular_table(pot: Potential, sigma: float, rho: float, N: int, M: int,
                  tau=None, cfg: IntegratorConfig = IntegratorConfig(),
                  workers: int = 1) -> ScatteringTable:
    """Scattering table on the product grid theta_k = 2 pi k / M."""
    if M < 4:
        raise ValueError("need M >= 4")
    thetas = TWO_PI * np.arange(M) / M
    return _build_table(pot, sigma, rho, N, thetas, tau, cfg, workers)


def synthesize_angular_table(table: ScatteringTable, M: int) -> ScatteringTable:
    """Angular table for a radial potential built by rotating the theta=0 row."""
    thetas = TWO_PI * np.arange(M) / M
    S_x = np.empty((M, len(table.alphas), 2))
    S_xi = np.empty_like(S_x)
    for k, th in enumerate(thetas):
        c, s = np.cos(th), np.sin(th)
        rot = np.array([[c, -s], [s, c]])
        S_x[k] = table.S_x[0] @ rot.T
        S_xi[k] = table.S_xi[0] @ rot.T
    return replace(table, thetas=thetas, S_x=S_x, S_xi=S_xi)


@dataclass(frozen=True)
class S0Series:
    """S0(theta, alpha) on the table grid; shape (M, 2N+1)."""

    sigma: float
    thetas: np.ndarray
    alphas: np.ndarray
    values: np.ndarray

    @property
    def beta(self) -> float:
        return float(self.alphas[-1])


def s0_series(table: ScatteringTable) -> S0Series:
    """S0 = sigma t . dS_x/da + n . (S_xi - sigma dS_xi/da) with
    t = (-sin th, cos th), n = (cos th, sin th); central differences with
    zero ghost values beyond the grid ends."""
    alphas = table.alphas
    spacing = np.diff(alphas)
    if not np.allclose(spacing, spacing[0], rtol=1e-12, atol=1e-15):
        raise ValueError("alpha grid must be uniform")

    def central_diff(rows):  # (M, L, 2) -> same, zero-padded ends
        padded = np.pad(rows, ((0, 0), (1, 1), (0, 0)))
        return (padded[:, 2:] - padded[:, :-2]) / (2.0 * spacing[0])

    dSx = central_diff(table.S_x)
    dSxi = central_diff(table.S_xi)
    sig = table.sigma
    tang = np.stack((-np.sin(table.thetas), np.cos(table.thetas)), axis=-1)
    norm = np.stack((np.cos(table.thetas), np.sin(table.thetas)), axis=-1)
    vals = (sig * np.einsum("kd,kld->kl", tang, dSx)
            + np.einsum("kd,kld->kl", norm, table.S_xi - sig * dSxi))
    return S0Series(sig, table.thetas, alphas, vals)


# ---------------------------------------------------------------------------
# serialization

_HEADER_FLOATS = ("sigma", "rho", "tau", "rel_tol", "abs_tol")


def table_to_text(table: ScatteringTable) -> str:
    lines = ["# dipoletomo scattering table"]
    for name in _HEADER_FLOATS:
        lines.append(f"# {name} = {getattr(table, name):.17g}")
    lines.append(f"# N = {table.N}")
    lines.append(f"# M = {len(table.thetas)}")
    lines.append(f"# beta = {table.beta:.17g}")
    lines.append(f"# potential = {table.potential}")
    lines.append("# theta, alpha, S_x1, S_x2, S_xi1, S_xi2")
    for k, th in enumerate(table.thetas):
        for l, al in enumerate(table.alphas):
            row = (th, al, *table.S_x[k, l], *table.S_xi[k, l])
            lines.append(", ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def table_from_text(text: str) -> ScatteringTable:
    meta = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, eq, val = body.partition("=")
            if eq:
                meta[key.strip()] = val.strip()
            continue
        rows.append([float(v) for v in line.split(",")])
    data = np.asarray(rows)
    N = int(meta["N"])
    M = int(meta["M"])
    L = 2 * N + 1
    if data.shape != (M * L, 6):
        raise ValueError("scattering table has inconsistent row count")
    return ScatteringTable(
        sigma=float(meta["sigma"]), rho=float(meta["rho"]), N=N,
        thetas=data[::L, 0].copy(), alphas=data[:L, 1].copy(),
        S_x=data[:, 2:4].reshape(M, L, 2), S_xi=data[:, 4:6].reshape(M, L, 2),
        tau=float(meta["tau"]), potential=meta["potential"],
        rel_tol=float(meta["rel_tol"]), abs_tol=float(meta["abs_tol"]))


def save_table(table: ScatteringTable, path):
    with open(path, "w") as fh:
        fh.write(table_to_text(table))


def load_table(path) -> ScatteringTable:
    with open(path) as fh:
        return table_from_text(fh.read())


def table_to_dict(table: ScatteringTable) -> dict:
    return {
        "sigma": table.sigma, "rho": table.rho, "N": table.N,
        "tau": table.tau, "potential": table.potential,
        "rel_tol": table.rel_tol, "abs_tol": table.abs_tol,
        "thetas": table.thetas.tolist(), "alphas": table.alphas.tolist(),
        "S_x": table.S_x.tolist(), "S_xi": table.S_xi.tolist(),
    }


def table_from_dict(d: dict) -> ScatteringTable:
    return ScatteringTable(
        sigma=d["sigma"], rho=d["rho"], N=d["N"],
        thetas=np.asarray(d["thetas"]), alphas=np.asarray(d["alphas"]),
        S_x=np.asarray(d["S_x"]), S_xi=np.asarray(d["S_xi"]),
        tau=d["tau"], potential=d["potential"],
        rel_tol=d["rel_tol"], abs_tol=d["abs_tol"])


def save_table_json(table: ScatteringTable, path):
    with open(path, "w") as fh:
        json.dump(table_to_dict(table), fh)


def load_table_json(path) -> ScatteringTable:
    with open(path) as fh:
        return table_from_dict(json.load(fh))
