"""Fading, path loss and per-tier transmitter settings."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .pointproc import GinibreModel, PoissonModel

__all__ = [
    "FadingKind",
    "FadingModel",
    "RAYLEIGH",
    "PathLoss",
    "TierConfig",
    "laplace_interference_fading",
    "one_minus_laplace",
    "sample_fading",
    "path_loss",
]


class FadingKind(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    ERLANG = "erlang"


@dataclass(frozen=True)
class FadingModel:
    """Channel power ~ Gamma(shape, 1); shape 1 is Rayleigh (Exp(1))."""

    kind: FadingKind = FadingKind.RAYLEIGH
    shape: int = 1

    def __post_init__(self):
        kind = FadingKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError(f"fading shape must be a positive integer, got {self.shape!r}")
        object.__setattr__(self, "shape", int(self.shape))
        if kind is FadingKind.RAYLEIGH and self.shape != 1:
            raise ValueError("Rayleigh fading has shape 1")

    @classmethod
    def erlang(cls, shape: int) -> "FadingModel":
        return cls(FadingKind.RAYLEIGH if shape == 1 else FadingKind.ERLANG, shape)


RAYLEIGH = FadingModel()


@dataclass(frozen=True)
class PathLoss:
    """Power-law path loss ``r**(-2*beta)``."""

    beta: float

    def __post_init__(self):
        if not (self.beta > 1.0 and math.isfinite(self.beta)):
            raise ValueError(f"path-loss parameter beta must exceed 1, got {self.beta!r}")


@dataclass(frozen=True)
class TierConfig:
    """Transmit power, association bias, antennas and served users of one tier."""

    power: float
    bias: float
    antennas: int
    served_users: int
    pathloss: PathLoss
    deployment: Union[GinibreModel, PoissonModel]

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("power must be positive")
        if not self.bias > 0:
            raise ValueError("bias must be positive")
        if int(self.antennas) != self.antennas or self.antennas < 1:
            raise ValueError("antennas must be a positive integer")
        if int(self.served_users) != self.served_users or self.served_users < 1:
            raise ValueError("served_users must be a positive integer")
        if self.served_users > self.antennas:
            raise ValueError("served_users cannot exceed antennas")
        if not isinstance(self.deployment, (GinibreModel, PoissonModel)):
            raise TypeError("deployment must be a GinibreModel or PoissonModel")

    @property
    def delta(self) -> int:
        """Shape of the serving-link channel power, m - psi + 1."""
        return self.antennas - self.served_users + 1

    @property
    def desired_fading(self) -> FadingModel:
        return FadingModel.erlang(self.delta)

    @property
    def interferer_fading(self) -> FadingModel:
        return FadingModel.erlang(self.served_users)


def laplace_interference_fading(f: FadingModel, s):
    """E[exp(-s G)] = (1 + s)^(-shape)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("Laplace argument must be nonnegative")
    out = np.exp(-f.shape * np.log1p(s))
    return float(out) if out.ndim == 0 else out


def one_minus_laplace(f: FadingModel, s):
    """1 - (1 + s)^(-shape) without cancellation for small s."""
    s = np.asarray(s, dtype=float)
    out = -np.expm1(-f.shape * np.log1p(s))
    return float(out) if out.ndim == 0 else out


def sample_fading(f: FadingModel, rng: np.random.Generator, size=None):
    """Gamma(shape, 1) channel power draws."""
    if f.shape == 1:
        return rng.standard_exponential(size)
    return rng.standard_gamma(f.shape, size)


def path_loss(pl: PathLoss, r):
    """``r**(-2*beta)`` for r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("path loss is singular at r <= 0")
    out = r ** (-2.0 * pl.beta)
    return float(out) if out.ndim == 0 else out
