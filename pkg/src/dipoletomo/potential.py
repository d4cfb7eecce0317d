"""Analytic background potentials with exact gradients.

All potentials are radial or sums of radial bumps, equal a constant q in the
far field, and expose the gradient in closed form so that the dynamics and
the reconstruction tests never rely on numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


def perp(u):
    """Perpendicular vector (u1, u2) -> (u2, -u1). Works on (..., 2) arrays."""
    u = np.asarray(u, dtype=float)
    return np.stack((u[..., 1], -u[..., 0]), axis=-1)


class Potential:
    """Scalar background field Q(x) with analytic gradient.

    Subclasses must set ``q`` (far-field constant) and implement ``value``
    and ``gradient``; both accept (..., 2) arrays of plane points.
    """

    q: float = 0.0

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def gradient_perp(self, x):
        """(d2 Q, -d1 Q), i.e. perp applied to the gradient."""
        return perp(self.gradient(x))

    def scaled(self, factor: float) -> "Potential":
        """Same shape with the bump strength multiplied by ``factor``."""
        raise NotImplementedError

    def dilated(self, c: float) -> "Potential":
        """Spatial dilation x -> x/c, i.e. the potential Q(x/c)."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Potential):
    """Q(x) = q everywhere; the gradient vanishes identically."""

    q: float = 0.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.q) if x.ndim > 1 else self.q

    def gradient(self, x):
        return np.zeros(np.shape(np.asarray(x, dtype=float)))

    def scaled(self, factor):
        return Constant(self.q * factor)

    def dilated(self, c):
        return self

    def describe(self):
        return f"constant q={self.q:.17g}"


ZERO = Constant(0.0)


@dataclass(frozen=True)
class CompactBump(Potential):
    """q + strength * (1 - |x|^2/omega^2)^(kappa+1) inside |x| <= omega.

    kappa >= 1 gives a continuous gradient across |x| = omega; kappa = 0 has
    a cusp there, for which the interior one-sided gradient is returned.
    """

    strength: float
    omega: float
    kappa: float
    q: float = 0.0

    def __post_init__(self):
        if self.strength < 0 or self.omega <= 0 or self.kappa < 0:
            raise ValueError("need strength >= 0, omega > 0, kappa >= 0")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        u = 1.0 - r2 / self.omega**2
        return self.q + self.strength * np.where(u > 0.0, u, 0.0) ** (self.kappa + 1)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        u = 1.0 - r2 / self.omega**2
        # interior value at u = 0 so the kappa = 0 cusp gets its one-sided limit
        coef = np.where(
            u >= 0.0,
            -2.0 * self.strength * (self.kappa + 1)
            * np.where(u > 0.0, u, 0.0) ** self.kappa / self.omega**2,
            0.0,
        )
        return coef[..., np.newaxis] * x if x.ndim > 1 else coef * x

    def scaled(self, factor):
        return CompactBump(self.strength * factor, self.omega, self.kappa, self.q)

    def dilated(self, c):
        return CompactBump(self.strength, self.omega * c, self.kappa, self.q)

    def describe(self):
        return (f"poly strength={self.strength:.17g} omega={self.omega:.17g} "
                f"kappa={self.kappa:.17g} q={self.q:.17g}")


@dataclass(frozen=True)
class GaussianBump(Potential):
    """q + strength * exp(-decay * |x - center|^2)."""

    strength: float
    decay: float = 10.0
    center: Tuple[float, float] = (0.0, 0.0)
    q: float = 0.0

    def __post_init__(self):
        if self.strength < 0 or self.decay <= 0:
            raise ValueError("need strength >= 0, decay > 0")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        d = x - np.asarray(self.center)
        r2 = np.sum(d * d, axis=-1)
        return self.q + self.strength * np.exp(-self.decay * r2)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        d = x - np.asarray(self.center)
        r2 = np.sum(d * d, axis=-1)
        coef = -2.0 * self.decay * self.strength * np.exp(-self.decay * r2)
        return coef[..., np.newaxis] * d if x.ndim > 1 else coef * d

    def scaled(self, factor):
        return GaussianBump(self.strength * factor, self.decay, self.center, self.q)

    def dilated(self, c):
        cx, cy = self.center
        return GaussianBump(self.strength, self.decay / c**2, (cx * c, cy * c), self.q)

    def describe(self):
        cx, cy = self.center
        return (f"gauss strength={self.strength:.17g} decay={self.decay:.17g} "
                f"cx={cx:.17g} cy={cy:.17g} q={self.q:.17g}")


@dataclass(frozen=True)
class GaussianSum(Potential):
    """Sum of Gaussian bumps sharing the far-field constant q."""

    terms: Tuple[GaussianBump, ...]
    q: float = 0.0

    def __init__(self, terms: Sequence[GaussianBump], q: float = 0.0):
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "q", q)

    def value(self, x):
        return self.q + sum(t.value(x) for t in self.terms)

    def gradient(self, x):
        return sum(t.gradient(x) for t in self.terms)

    def scaled(self, factor):
        return GaussianSum([t.scaled(factor) for t in self.terms], self.q)

    def dilated(self, c):
        return GaussianSum([t.dilated(c) for t in self.terms], self.q)

    def describe(self):
        parts = ";".join(
            f"{t.strength:.17g},{t.decay:.17g},{t.center[0]:.17g},{t.center[1]:.17g}"
            for t in self.terms
        )
        return f"gausssum terms={parts} q={self.q:.17g}"


def parse_potential(text: str) -> Potential:
    """Inverse of ``Potential.describe`` for table headers and configs."""
    tokens = text.split()
    kind = tokens[0]
    kv = {}
    for tok in tokens[1:]:
        key, _, val = tok.partition("=")
        kv[key] = val
    if kind == "constant":
        return Constant(float(kv["q"]))
    if kind == "zero":
        return ZERO
    if kind == "poly":
        return CompactBump(float(kv["strength"]), float(kv["omega"]),
                           float(kv["kappa"]), float(kv.get("q", 0.0)))
    if kind == "gauss":
        return GaussianBump(float(kv["strength"]), float(kv["decay"]),
                            (float(kv.get("cx", 0.0)), float(kv.get("cy", 0.0))),
                            float(kv.get("q", 0.0)))
    if kind == "gausssum":
        terms = []
        for chunk in kv["terms"].split(";"):
            if not chunk:
                continue
            s, d, cx, cy = (float(v) for v in chunk.split(","))
            terms.append(GaussianBump(s, d, (cx, cy)))
        return GaussianSum(terms, float(kv.get("q", 0.0)))
    raise ValueError(f"unknown potential kind {kind!r}")
