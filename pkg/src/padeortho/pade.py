"""Rational approximants from defect orthogonality in an orthonormal basis.

The denominator of the (n, m) approximant solves the homogeneous moment
conditions sum_i q_i <z^i F, p_{n+j}> = 0, j = 1..m, normalized monic. A
rank-deficient moment block means the approximant is not unique; that case
is surfaced as a certificate rather than silently resolved.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import funcexpr, measures
from .errors import DegenerateInputError, OracleDegenerateError

RANK_TOL_FACTOR = 1e-8
POLE_CLUSTER_RADIUS = 1e-7


@dataclass(frozen=True, eq=False)
class MomentBlock:
    """Entries M[j-1, i] = <z^i F, p_{n+j}>, j = 1..m, i = 0..m."""

    n: int
    m: int
    entries: np.ndarray
    noise_floor: float = 0.0


@dataclass(frozen=True, eq=False)
class NonUniqueCertificate:
    """Evidence that the denominator is not unique at (n, m)."""

    nullspace_dim: int
    sample_denominators: tuple
    delta_value: complex


@dataclass(frozen=True, eq=False)
class RationalApproximant:
    """An (n, m) approximant: monic denominator Q in power form, numerator
    held as its coefficients against the orthonormal basis."""

    n: int
    m: int
    Q: np.ndarray
    P_coeffs: np.ndarray
    unique: bool
    nullspace_dim: int
    poles: tuple
    basis: measures.OrthoBasis
    certificate: NonUniqueCertificate | None = None
    moment_noise: float = 0.0

    def eval_at(self, z):
        scalar = np.isscalar(z) or isinstance(z, complex)
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        P = self.basis.eval_all(zz, n_max=self.n)
        num = self.P_coeffs @ P
        den = np.polynomial.polynomial.polyval(zz, self.Q)
        out = num / den
        return complex(out[0]) if scalar else out

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "Q": [[c.real, c.imag] for c in self.Q],
            "P": [[c.real, c.imag] for c in self.P_coeffs],
            "unique": self.unique,
            "nullspace_dim": self.nullspace_dim,
            "poles": [[p.real, p.imag] for p in self.poles],
        }


def moment_block(F, basis: measures.OrthoBasis, n: int, m: int) -> MomentBlock:
    """Quadrature moments <z^i F, p_{n+j}> as an m x (m+1) block."""
    if n + m > basis.n_max:
        raise ValueError(f"n+m={n + m} exceeds basis degree {basis.n_max}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    fn = funcexpr.evaluator(F) if not callable(F) else F

    def compute(rule):
        fv = np.asarray(fn(rule.nodes), dtype=complex)
        P = basis.eval_all(rule.nodes, n_max=n + m)[n + 1: n + m + 1]
        powers = rule.nodes[None, :] ** np.arange(m + 1)[:, None]
        # rows j, cols i, flattened for the doubling comparison
        return np.einsum("jk,ik,k->ji", np.conj(P), powers, rule.weights * fv).ravel()

    start = measures.default_node_count(n + m)
    vals, floor, _ = measures.refine_until_stable(basis.measure, compute, start)
    return MomentBlock(n, m, vals.reshape(m, m + 1), floor)


def delta(block: MomentBlock) -> complex:
    """Determinant of the first m columns of the moment block."""
    if block.m < 1:
        raise ValueError("delta requires m >= 1")
    return complex(np.linalg.det(block.entries[:, : block.m]))


@dataclass(frozen=True, eq=False)
class _MonicSolve:
    Q: np.ndarray
    unique: bool
    nullspace_dim: int
    certificate: NonUniqueCertificate | None


def solve_monic_denominator(block_entries: np.ndarray,
                            tol_rank_factor: float = RANK_TOL_FACTOR) -> _MonicSolve:
    """Monic solution of sum_i q_i B[:, i] = 0 for an m x (m+1) block B.

    Full-rank leading submatrix: the unique monic degree-m solution.
    Deficient rank with a consistent monic reduction: a certificate holding
    the minimal-norm monic solution plus one nullspace perturbation of it.
    Inconsistent monic reduction: the minimal-degree monic solution.
    """
    B = np.asarray(block_entries, dtype=complex)
    m = B.shape[0]
    if B.shape != (m, m + 1):
        raise ValueError(f"expected m x (m+1) block, got {B.shape}")
    scale = float(np.max(np.abs(B)))
    if scale == 0.0:
        raise DegenerateInputError("all-zero moment block (is the function identically zero?)")
    A = B[:, :m]
    b = B[:, m]
    svals = np.linalg.svd(A, compute_uv=False)
    smax = float(svals[0])
    tol = tol_rank_factor * max(smax, tol_rank_factor * scale)
    rank = int(np.sum(svals > tol))
    if rank == m:
        q = np.linalg.solve(A, -b)
        return _MonicSolve(np.append(q, 1.0), True, 0, None)
    nullspace_dim = m - rank
    q, *_ = np.linalg.lstsq(A, -b, rcond=tol_rank_factor)
    resid = float(np.linalg.norm(A @ q + b))
    ctol = tol_rank_factor * scale * (1.0 + float(np.linalg.norm(q)))
    if resid <= ctol:
        q1 = np.append(q, 1.0)
        _, _, vh = np.linalg.svd(A)
        null_vec = np.conj(vh[-1])
        q2 = q1 + np.append(null_vec, 0.0) * max(1.0, float(np.linalg.norm(q1)))
        det_a = complex(np.linalg.det(A))
        cert = NonUniqueCertificate(nullspace_dim, (q1, q2), det_a)
        return _MonicSolve(q1, False, nullspace_dim, cert)
    for d in range(m + 1):
        bd = B[:, d]
        if d == 0:
            if np.linalg.norm(bd) <= ctol:
                return _MonicSolve(np.array([1.0 + 0j]), False, nullspace_dim, None)
            continue
        qd, *_ = np.linalg.lstsq(B[:, :d], -bd, rcond=tol_rank_factor)
        rd = float(np.linalg.norm(B[:, :d] @ qd + bd))
        if rd <= tol_rank_factor * scale * (1.0 + float(np.linalg.norm(qd))):
            return _MonicSolve(np.append(qd, 1.0), False, nullspace_dim, None)
    raise DegenerateInputError("moment block admits no nonzero denominator")


def denominator(block: MomentBlock, tol_rank: float | None = None):
    """Monic denominator from the moment block.

    Returns (Q, unique, nullspace_dim) when a preferred monic solution
    exists, or a NonUniqueCertificate when the solution set is a proper
    affine family.
    """
    if block.m < 1:
        raise ValueError("denominator requires m >= 1")
    factor = RANK_TOL_FACTOR if tol_rank is None else tol_rank
    sol = solve_monic_denominator(block.entries, factor)
    if sol.certificate is not None:
        return sol.certificate
    return sol.Q, sol.unique, sol.nullspace_dim


def numerator(F, Q: np.ndarray, basis: measures.OrthoBasis, n: int) -> np.ndarray:
    """Coefficients <Q F, p_k>, k = 0..n, of the numerator in the basis."""
    fn = funcexpr.evaluator(F) if not callable(F) else F
    Q = np.asarray(Q, dtype=complex)

    def compute(rule):
        fv = np.asarray(fn(rule.nodes), dtype=complex)
        qv = np.polynomial.polynomial.polyval(rule.nodes, Q)
        P = basis.eval_all(rule.nodes, n_max=n)
        return np.conj(P) @ (rule.weights * qv * fv)

    start = measures.default_node_count(n + len(Q))
    vals, _, _ = measures.refine_until_stable(basis.measure, compute, start)
    return vals


def approximant(F, basis: measures.OrthoBasis, measure: measures.MeasureSpec | None,
                n: int, m: int) -> RationalApproximant:
    """The full (n, m) approximant record."""
    if measure is not None and measure != basis.measure:
        raise ValueError("measure does not match the basis")
    if m == 0:
        Q = np.array([1.0 + 0j])
        P = numerator(F, Q, basis, n)
        return RationalApproximant(n, 0, Q, P, True, 0, (), basis)
    block = moment_block(F, basis, n, m)
    sol = solve_monic_denominator(block.entries)
    P = numerator(F, sol.Q, basis, n)
    poles = tuple(roots_of(sol.Q)) if len(sol.Q) > 1 else ()
    return RationalApproximant(n, m, sol.Q, P, sol.unique, sol.nullspace_dim,
                               poles, basis, sol.certificate, block.noise_floor)


def roots_of(Q: np.ndarray) -> list:
    """Roots of a polynomial (coefficients low to high), multiplicity by
    clustering, one Newton polish per root."""
    Q = np.asarray(Q, dtype=complex)
    if len(Q) < 2:
        return []
    raw = np.roots(Q[::-1])
    dQ = np.polynomial.polynomial.polyder(Q)
    scale = float(np.max(np.abs(Q)))
    polished = []
    for r in raw:
        qd = np.polynomial.polynomial.polyval(r, dQ)
        if abs(qd) > 1e-8 * scale:
            r = r - np.polynomial.polynomial.polyval(r, Q) / qd
        polished.append(complex(r))
    polished.sort(key=lambda c: (c.real, c.imag))
    clusters: list[list[complex]] = []
    for r in polished:
        placed = False
        for cl in clusters:
            if abs(r - cl[0]) <= POLE_CLUSTER_RADIUS:
                cl.append(r)
                placed = True
                break
        if not placed:
            clusters.append([r])
    out = []
    for cl in clusters:
        centroid = complex(np.mean(cl))
        out.extend([centroid] * len(cl))
    return out


def poles_of(approx: RationalApproximant) -> list:
    """Poles of the approximant (roots of Q with multiplicity)."""
    return list(approx.poles)


def qtilde_oracle(F, basis: measures.OrthoBasis, measure, n: int, m: int) -> np.ndarray:
    """Denominator candidate from the (m+1) x (m+1) moment determinant,
    expanded along its polynomial row. Independent of the linear solve.

    Returns coefficients low to high; normalized monic when the degree-m
    coefficient is significant, raw otherwise (the degenerate signature).
    """
    if m < 1:
        raise ValueError("oracle requires m >= 1")
    block = moment_block(F, basis, n, m)
    M = block.entries
    coeffs = np.empty(m + 1, dtype=complex)
    for k in range(m + 1):
        sub = np.delete(M, k, axis=1)
        coeffs[k] = (-1) ** (m + k) * np.linalg.det(sub)
    top = float(np.max(np.abs(coeffs)))
    if top == 0.0:
        raise OracleDegenerateError("moment determinant is identically zero")
    if abs(coeffs[m]) > RANK_TOL_FACTOR * top:
        coeffs = coeffs / coeffs[m]
    return coeffs


def defect_residuals(F, approx: RationalApproximant) -> np.ndarray:
    """Residuals <QF - P, p_j> for j = 0..n+m (near zero by construction
    for j <= n; the j > n entries test the denominator conditions)."""
    basis = approx.basis
    fn = funcexpr.evaluator(F) if not callable(F) else F
    top = approx.n + approx.m

    def compute(rule):
        fv = np.asarray(fn(rule.nodes), dtype=complex)
        qv = np.polynomial.polynomial.polyval(rule.nodes, approx.Q)
        P = basis.eval_all(rule.nodes, n_max=top)
        return np.conj(P) @ (rule.weights * qv * fv)

    start = measures.default_node_count(top + approx.m)
    vals, _, _ = measures.refine_until_stable(basis.measure, compute, start)
    vals[: approx.n + 1] -= approx.P_coeffs
    return vals
