"""Flat key-value run configuration with the standard experiment defaults.

The file format is one ``section.key = value`` pair per line, ``#`` comments.
Every field has a default; an empty or missing file reproduces the baseline
parameter set (ball radius 1, sigma = 0.1, poly potential with strength 0.01,
omega = 0.5, kappa = 8, N = 400, tau = 2 sigma rho).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .dynamics import TWO_PI, IntegratorConfig
from .potential import (ZERO, CompactBump, Constant, GaussianBump,
                        GaussianSum, Potential)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    # potential
    kind: str = "poly"
    strength: float = 0.01
    omega: float = 0.5
    kappa: float = 8.0
    decay: float = 10.0
    center: tuple = (0.0, 0.0)
    terms: tuple = ()               # gausssum: ((strength, decay, cx, cy), ...)
    q: float = 0.0
    # launch geometry; rho = 2 pi * ball_radius
    sigma: float = 0.1
    ball_radius: float = 1.0
    # scattering table
    N: int = 400
    M: int = 1                      # 1 = radial mode, >= 4 = angular grid
    tau: float | None = None
    # reconstruction grid
    r_max: float | None = None      # default beta + sigma + 0.1
    r_count: int = 201
    # integrator
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = float("inf")
    # verification
    launches: int = 20
    eps_ladder: tuple = (0.02, 0.01, 0.005)
    cov_N: int = 24
    cov_M: int = 8
    # dipole-pair simulation
    a_plus: tuple = (0.0, 1.0)
    a_minus: tuple = (0.0, -1.0)
    sim_T: float = 10.0
    # figures
    fig_eps_ladder: tuple = (0.04, 0.02, 0.01, 0.005, 0.0025)
    # run
    seed: int = 0
    threads: int = 1
    out: str = "out"

    @property
    def rho(self) -> float:
        return TWO_PI * self.ball_radius

    @property
    def beta(self) -> float:
        return self.sigma + self.ball_radius

    @property
    def tau_effective(self) -> float:
        return self.tau if self.tau is not None else 2.0 * self.sigma * self.rho

    @property
    def r_max_effective(self) -> float:
        return self.r_max if self.r_max is not None else self.beta + self.sigma + 0.1

    def validate(self):
        if self.sigma <= 0 or self.ball_radius <= 0:
            raise ConfigError("sigma and ball radius must be positive")
        if self.N < 2:
            raise ConfigError("scatter.N must be >= 2")
        if self.M != 1 and self.M < 4:
            raise ConfigError("scatter.M must be 1 (radial) or >= 4")
        if self.tau is not None and self.tau < 2.0 * self.sigma * self.rho:
            raise ConfigError("scatter.tau must be >= 2*sigma*rho")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ConfigError("ode tolerances must be positive")
        if self.threads < 1 or self.r_count < 2 or self.launches < 1:
            raise ConfigError("counts must be positive")
        self.potential()
        return self

    def potential(self) -> Potential:
        if self.kind == "zero":
            return ZERO
        if self.kind == "constant":
            return Constant(self.q)
        if self.kind == "poly":
            return CompactBump(self.strength, self.omega, self.kappa, self.q)
        if self.kind == "gauss":
            return GaussianBump(self.strength, self.decay, self.center, self.q)
        if self.kind == "gausssum":
            return GaussianSum(
                [GaussianBump(s, d, (cx, cy)) for s, d, cx, cy in self.terms],
                self.q)
        raise ConfigError(f"unknown potential.kind {self.kind!r}")

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.rel_tol, self.abs_tol, self.max_step)


_KEYMAP = {
    "potential.kind": ("kind", str),
    "potential.strength": ("strength", float),
    "potential.omega": ("omega", float),
    "potential.kappa": ("kappa", float),
    "potential.decay": ("decay", float),
    "potential.center": ("center", "pair"),
    "potential.terms": ("terms", "terms"),
    "potential.q": ("q", float),
    "launch.sigma": ("sigma", float),
    "launch.ball_radius": ("ball_radius", float),
    "scatter.N": ("N", int),
    "scatter.M": ("M", int),
    "scatter.tau": ("tau", float),
    "recon.r_max": ("r_max", float),
    "recon.r_count": ("r_count", int),
    "ode.rel_tol": ("rel_tol", float),
    "ode.abs_tol": ("abs_tol", float),
    "ode.max_step": ("max_step", float),
    "verify.launches": ("launches", int),
    "verify.eps_ladder": ("eps_ladder", "floats"),
    "verify.cov_N": ("cov_N", int),
    "verify.cov_M": ("cov_M", int),
    "simulate.a_plus": ("a_plus", "pair"),
    "simulate.a_minus": ("a_minus", "pair"),
    "simulate.T": ("sim_T", float),
    "figures.eps_ladder": ("fig_eps_ladder", "floats"),
    "run.seed": ("seed", int),
    "run.threads": ("threads", int),
    "run.out": ("out", str),
}


def _convert(raw: str, conv):
    if conv == "pair":
        a, b = (float(v) for v in raw.split(","))
        return (a, b)
    if conv == "floats":
        return tuple(float(v) for v in raw.split(",") if v.strip())
    if conv == "terms":
        out = []
        for chunk in raw.split(";"):
            if chunk.strip():
                out.append(tuple(float(v) for v in chunk.split(",")))
        return tuple(out)
    return conv(raw)


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not eq or key not in _KEYMAP:
            raise ConfigError(f"line {lineno}: unknown or malformed entry {line!r}")
        name, conv = _KEYMAP[key]
        try:
            values[name] = _convert(raw, conv)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return replace(RunConfig(), **values).validate()


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
