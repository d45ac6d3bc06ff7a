"""Expansion coefficients, growth-rate estimation, and second-kind functions.

Fourier coefficients of F in an orthonormal basis are computed by node-doubled
quadrature; the Laurent coefficients of F composed with the inverse exterior
map come from a DFT on a circle of radius r > 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conformal, funcexpr, measures
from .errors import QuadratureConvergenceError

FOURIER = "fourier"
LAURENT = "laurent"

RELIABLE_FACTOR = 10.0
RHO_INF_CUTOFF = 1e6
SUPERGEOMETRIC_CURVATURE = -5e-3


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    """Indexed coefficients c_0..c_N with a reliability annotation.

    ``reliable_upto`` is the largest index whose magnitude clears ten times
    the estimated quadrature noise floor (-1 when none does).
    """

    kind: str
    coeffs: np.ndarray
    reliable_upto: int
    noise_floor: float

    def __len__(self):
        return len(self.coeffs)

    def reliable_mask(self, factor: float = RELIABLE_FACTOR) -> np.ndarray:
        return np.abs(self.coeffs) > factor * max(self.noise_floor, 1e-300)


@dataclass(frozen=True)
class SecondKindValue:
    n: int
    z: complex
    value: complex


def _annotate(kind, coeffs, noise_floor) -> CoeffSeries:
    idx = np.where(np.abs(coeffs) > RELIABLE_FACTOR * max(noise_floor, 1e-300))[0]
    upto = int(idx[-1]) if len(idx) else -1
    return CoeffSeries(kind, coeffs, upto, noise_floor)


def fourier_coeffs(F, basis: measures.OrthoBasis, n_max: int) -> CoeffSeries:
    """Coefficients <F, p_n> for n = 0..n_max by node-doubled quadrature."""
    if n_max > basis.n_max:
        raise ValueError(f"n_max {n_max} exceeds basis degree {basis.n_max}")
    fn = funcexpr.evaluator(F) if not callable(F) else F

    def compute(rule):
        fv = np.asarray(fn(rule.nodes), dtype=complex)
        P = basis.eval_all(rule.nodes, n_max=n_max)
        return np.conj(P) @ (rule.weights * fv)

    start = measures.default_node_count(n_max)
    vals, floor, _ = measures.refine_until_stable(basis.measure, compute, start)
    return _annotate(FOURIER, vals, floor)


def partial_sum(series: CoeffSeries, basis: measures.OrthoBasis, z, N: int):
    """Value of the truncated expansion sum_{n<=N} c_n p_n(z)."""
    if N >= len(series.coeffs):
        raise ValueError(f"N={N} exceeds series length {len(series.coeffs)}")
    scalar = np.isscalar(z) or isinstance(z, complex)
    P = basis.eval_all(z, n_max=N)
    out = series.coeffs[: N + 1] @ P
    return complex(out[0]) if scalar else out


def rho0_estimate(series: CoeffSeries) -> float:
    """Expansion-domain index from the decay rate of the coefficients.

    Fits log|c_n| against (1, n, log n) over the reliable window; the n-slope
    gives the geometric decay rate, the log n regressor absorbs algebraic
    prefactors so branch-point singularities do not bias the rate. Returns
    ``inf`` for super-geometric decay (entire functions, polynomials).
    """
    absc = np.abs(series.coeffs)
    mask = series.reliable_mask()
    mask[0] = False
    idx = np.where(mask)[0]
    tail_dead = len(series.coeffs) - 1 - series.reliable_upto
    if len(idx) < 8:
        if tail_dead >= 5:
            return math.inf
        raise ValueError("rho0 estimate needs at least 8 reliable coefficients")
    n = idx.astype(float)
    y = np.log(absc[idx])
    quad = np.vstack([np.ones_like(n), n, n * n]).T
    qsol, *_ = np.linalg.lstsq(quad, y, rcond=None)
    if qsol[2] < SUPERGEOMETRIC_CURVATURE:
        return math.inf
    design = np.vstack([np.ones_like(n), n, np.log(n)]).T
    sol, *_ = np.linalg.lstsq(design, y, rcond=None)
    rho = math.exp(-sol[1])
    return math.inf if rho > RHO_INF_CUTOFF else rho


def second_kind(basis: measures.OrthoBasis, n: int, z: complex) -> SecondKindValue:
    """Cauchy transform of conj(p_n) d(mu) at z, off the support."""
    z = complex(z)
    dist = measures.support_distance(basis.measure, z)
    if dist <= 1e-6:
        raise ValueError(f"z={z} is within 1e-6 of the support")
    cmap = conformal.map_for(basis.measure)
    rho_z = conformal.rho_of(cmap, z)
    start = max(measures.default_node_count(n),
                2 * n + 32,
                int(48.0 / max(math.log(rho_z), 1e-2)))

    def compute(rule):
        pv = basis.eval_all(rule.nodes, n_max=n)[n]
        return np.array([np.sum(rule.weights * np.conj(pv) / (z - rule.nodes))])

    vals, _, _ = measures.refine_until_stable(basis.measure, compute, start, cap=16384)
    return SecondKindValue(n, z, complex(vals[0]))


def second_kind_product(basis: measures.OrthoBasis, n: int, z: complex) -> complex:
    """The product p_n(z) s_n(z) computed in cancellation-free form.

    Orthogonality reduces the product to the integral of |p_n|^2/(z - t),
    whose integrand stays O(1); the factored form loses all digits once
    p_n(z) grows past 1/eps.
    """
    z = complex(z)
    dist = measures.support_distance(basis.measure, z)
    if dist <= 1e-6:
        raise ValueError(f"z={z} is within 1e-6 of the support")

    def compute(rule):
        pv = basis.eval_all(rule.nodes, n_max=n)[n]
        return np.array([np.sum(rule.weights * np.abs(pv) ** 2 / (z - rule.nodes))])

    start = max(measures.default_node_count(n), 2 * n + 32)
    vals, _, _ = measures.refine_until_stable(basis.measure, compute, start, cap=16384)
    return complex(vals[0])


def laurent_coeffs(F, cmap: conformal.ConformalMap, r: float, k_max: int) -> CoeffSeries:
    """Nonnegative-index Laurent coefficients of F composed with psi.

    Sampled by DFT on the circle |w| = r, 1 < r < the holomorphy index of F;
    the node count doubles until the retained coefficients stabilize.
    """
    if not r > 1.0 + 1e-9:
        raise ValueError(f"laurent radius must exceed 1, got {r}")
    fn = funcexpr.evaluator(F) if not callable(F) else F
    k = np.arange(k_max + 1)
    scale_back = r ** (-k.astype(float))

    def values(n_nodes):
        theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
        w = r * np.exp(1j * theta)
        fv = np.asarray(fn(conformal.psi(cmap, w)), dtype=complex)
        fv = np.broadcast_to(fv, w.shape)
        return (np.fft.fft(fv)[: k_max + 1] / n_nodes) * scale_back

    n = max(256, 8 * k_max)
    vals = values(n)
    cap = 1 << 17
    while True:
        n2 = 2 * n
        vals2 = values(n2)
        delta = float(np.max(np.abs(vals2 - vals)))
        scale = max(1.0, float(np.max(np.abs(vals2))))
        if delta <= measures.DOUBLING_REL_TOL * scale:
            return _annotate(LAURENT, vals2, delta)
        if n2 >= cap:
            if delta > measures.DOUBLING_FAIL_TOL * scale:
                raise QuadratureConvergenceError(
                    f"laurent sampling did not converge by {cap} nodes")
            return _annotate(LAURENT, vals2, delta)
        n, vals = n2, vals2


def default_laurent_radius(rho0: float) -> float:
    """Sampling radius sqrt(rho0) clamped to [1.05, 0.95 rho0]."""
    if not math.isfinite(rho0):
        return 2.0
    if rho0 <= 1.0:
        raise ValueError("rho0 must exceed 1")
    return min(max(math.sqrt(rho0), 1.05), 0.95 * rho0)


def series_csv(series: CoeffSeries) -> str:
    """CSV rows ``n, re, im, abs, reliable`` (reliable as 0/1)."""
    lines = ["n,re,im,abs,reliable"]
    mask = series.reliable_mask()
    for n, c in enumerate(series.coeffs):
        lines.append(f"{n},{c.real:.17g},{c.imag:.17g},{abs(c):.17g},{int(mask[n])}")
    return "\n".join(lines) + "\n"
