"""Classical power-series rational approximants and the pole comparator.

The denominator of the classical (n, m) approximant of a power series
solves the Toeplitz conditions sum_i q_i c_{n+j-i} = 0, j = 1..m (monic,
coefficients of negative index read as zero). On the unit disk with the
arc-length measure this coincides with the basis construction; in general
the two pole sets correspond through the exterior map.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import conformal, measures, pade, series
from .errors import ComparisonUnavailableError


@dataclass(frozen=True, eq=False)
class ClassicalDenominator:
    n: int
    m: int
    Q: np.ndarray
    unique: bool
    nullspace_dim: int = 0
    certificate: pade.NonUniqueCertificate | None = None

    @property
    def poles(self):
        return tuple(pade.roots_of(self.Q))


@dataclass(frozen=True, eq=False)
class PoleCorrespondence:
    """Matched pole lists of the two pipelines with their map-residual."""

    n: int
    m: int
    lam: tuple
    tau: tuple
    matched_residual: float
    truncated: bool = False


def classical_denominator(fhat: series.CoeffSeries, n: int, m: int) -> ClassicalDenominator:
    """Monic Toeplitz solve for the classical denominator in w."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if len(fhat.coeffs) <= n + m:
        raise ValueError(
            f"series supplies {len(fhat.coeffs)} coefficients; need indices up to {n + m}")
    c = fhat.coeffs
    block = np.zeros((m, m + 1), dtype=complex)
    for j in range(1, m + 1):
        for i in range(m + 1):
            k = n + j - i
            block[j - 1, i] = c[k] if k >= 0 else 0.0
    sol = pade.solve_monic_denominator(block)
    return ClassicalDenominator(n, m, sol.Q, sol.unique, sol.nullspace_dim, sol.certificate)


def match_by_assignment(targets, values):
    """Pair two equal-length complex lists minimizing the total distance."""
    k = len(targets)
    if k != len(values):
        raise ValueError("lists must have equal length")
    if k == 0:
        return [], 0.0
    best_perm, best_cost = None, None
    for perm in permutations(range(k)):
        cost = sum(abs(targets[i] - values[perm[i]]) for i in range(k))
        if best_cost is None or cost < best_cost - 1e-15:
            best_perm, best_cost = perm, cost
    return list(best_perm), best_cost


def compare_theorem6(F, measure: measures.MeasureSpec, cmap: conformal.ConformalMap,
                     n: int, m: int, r: float | None = None,
                     basis: measures.OrthoBasis | None = None) -> PoleCorrespondence:
    """Poles of the basis construction against classical poles of the
    composed series, matched through the exterior map.

    Both pipelines must produce unique denominators; otherwise the
    comparison is unavailable and the certificates are attached to the
    error.
    """
    if basis is None:
        basis = measures.make_basis(measure, n + m)
    apx = pade.approximant(F, basis, measure, n, m)
    if not apx.unique:
        raise ComparisonUnavailableError(
            f"basis-side denominator not unique at (n={n}, m={m})",
            pade_certificate=apx.certificate)
    if r is None:
        four = series.fourier_coeffs(F, basis, min(basis.n_max, n + m))
        r = series.default_laurent_radius(series.rho0_estimate(four))
    fhat = series.laurent_coeffs(F, cmap, r, n + m)
    cd = classical_denominator(fhat, n, m)
    if not cd.unique:
        raise ComparisonUnavailableError(
            f"classical denominator not unique at (n={n}, m={m})",
            pade_certificate=apx.certificate, classical_certificate=cd.certificate)
    lam = list(apx.poles)
    tau = list(cd.poles)
    truncated = len(lam) != len(tau)
    k = min(len(lam), len(tau))
    lam_k, tau_k = lam[:k], tau[:k]
    phi_lam = [conformal.phi(cmap, v) for v in lam_k]
    perm, _ = match_by_assignment(tau_k, phi_lam)
    lam_matched = tuple(lam_k[perm[i]] for i in range(k))
    tau_matched = tuple(tau_k)
    residual = max((abs(conformal.phi(cmap, lam_matched[i]) - tau_matched[i])
                    for i in range(k)), default=0.0)
    order = sorted(range(k), key=lambda i: (abs(tau_matched[i]),
                                            np.angle(tau_matched[i])))
    lam_matched = tuple(lam_matched[i] for i in order)
    tau_matched = tuple(tau_matched[i] for i in order)
    return PoleCorrespondence(n, m, lam_matched, tau_matched, float(residual), truncated)


def correspondence_csv(pc: PoleCorrespondence, cmap: conformal.ConformalMap) -> str:
    """CSV rows ``n, j, re_lambda, im_lambda, re_tau, im_tau,
    abs_phi_lambda_minus_tau``."""
    lines = ["n,j,re_lambda,im_lambda,re_tau,im_tau,abs_phi_lambda_minus_tau"]
    for j, (lam, tau) in enumerate(zip(pc.lam, pc.tau), start=1):
        gap = abs(conformal.phi(cmap, lam) - tau)
        lines.append(f"{pc.n},{j},{lam.real:.17g},{lam.imag:.17g},"
                     f"{tau.real:.17g},{tau.imag:.17g},{gap:.17g}")
    return "\n".join(lines) + "\n"
