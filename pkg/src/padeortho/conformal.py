"""Exterior conformal maps onto the complement of the unit disk.

For an interval [a, b] the map is the scaled inverse Joukowski
w = t + sqrt(t^2 - 1) (t the affine image of z in [-1, 1]), with the branch
chosen pointwise so |w| >= 1. For the closed unit disk it is the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import measures

INTERVAL = "interval"
DISK = "disk"


@dataclass(frozen=True)
class ConformalMap:
    kind: str
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in (INTERVAL, DISK):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == INTERVAL and not self.a < self.b:
            raise ValueError("interval map requires a < b")

    @property
    def cap(self) -> float:
        """Logarithmic capacity of the underlying compact set."""
        return (self.b - self.a) / 4.0 if self.kind == INTERVAL else 1.0


@dataclass(frozen=True)
class LevelIndex:
    """Index rho >= 1 of a level curve of the exterior map."""

    rho: float

    def __post_init__(self):
        if self.rho < 1.0:
            raise ValueError("level index must be >= 1")


def map_for(measure: measures.MeasureSpec) -> ConformalMap:
    """The exterior map of the measure's supporting compact set."""
    if measure.kind == measures.CIRCLE:
        return ConformalMap(DISK)
    a, b = measures.support_interval(measure)
    return ConformalMap(INTERVAL, a, b)


def interval_map(a: float = -1.0, b: float = 1.0) -> ConformalMap:
    return ConformalMap(INTERVAL, float(a), float(b))


def disk_map() -> ConformalMap:
    return ConformalMap(DISK)


def phi(cmap: ConformalMap, z):
    """Exterior map value; on the set itself, the upper-edge boundary value."""
    scalar = np.isscalar(z) or isinstance(z, complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if cmap.kind == DISK:
        w = z.copy()
    else:
        t = (2.0 * z - (cmap.a + cmap.b)) / (cmap.b - cmap.a)
        s = np.sqrt(t * t - 1.0)
        w_plus = t + s
        w_minus = t - s
        w = np.where(np.abs(w_plus) >= np.abs(w_minus), w_plus, w_minus)
        on_seg = (t.imag == 0.0) & (np.abs(t.real) <= 1.0)
        if np.any(on_seg):
            tr = t.real[on_seg]
            w[on_seg] = tr + 1j * np.sqrt(np.maximum(0.0, 1.0 - tr * tr))
    return complex(w[0]) if scalar else w


def psi(cmap: ConformalMap, w):
    """Inverse of the exterior map, continuous up to |w| = 1."""
    scalar = np.isscalar(w) or isinstance(w, complex)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if np.any(np.abs(w) < 1.0 - 1e-12):
        raise ValueError("psi requires |w| >= 1")
    if cmap.kind == DISK:
        z = w.copy()
    else:
        t = 0.5 * (w + 1.0 / w)
        z = 0.5 * (cmap.b - cmap.a) * t + 0.5 * (cmap.a + cmap.b)
    return complex(z[0]) if scalar else z


def rho_of(cmap: ConformalMap, z) -> float:
    """Level-curve index |phi(z)| through z; exactly 1 on the compact set."""
    z = complex(z)
    if cmap.kind == DISK:
        return max(1.0, abs(z))
    t = (2.0 * z - (cmap.a + cmap.b)) / (cmap.b - cmap.a)
    if t.imag == 0.0 and abs(t.real) <= 1.0:
        return 1.0
    return max(1.0, abs(phi(cmap, z)))


def phi_deriv_over_phi(cmap: ConformalMap, z) -> complex:
    """Logarithmic derivative of the exterior map at z (off the set)."""
    z = complex(z)
    if cmap.kind == DISK:
        return 1.0 / z
    t = (2.0 * z - (cmap.a + cmap.b)) / (cmap.b - cmap.a)
    half = 0.5 * (cmap.b - cmap.a)
    return 1.0 / (half * _sqrt_branch(t))


def _sqrt_branch(t: complex) -> complex:
    # sqrt(t^2 - 1) on the branch matching |t + sqrt(t^2-1)| >= 1
    s = np.sqrt(complex(t * t - 1.0))
    return s if abs(t + s) >= abs(t - s) else -s
