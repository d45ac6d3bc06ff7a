"""Measures, quadrature rules, and orthonormal polynomial bases.

Supported measures: the Chebyshev first-kind weight on an interval [a, b],
normalized arc length on the unit circle, and measures given by their
Jacobi-matrix recurrence coefficients (alpha_k, beta_k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureConvergenceError

CHEBYSHEV1 = "chebyshev1"
CIRCLE = "circle"
RECURRENCE = "recurrence"

ASYMPTOTICS_CLASSES = ("regular", "ratio", "szego")

TOL_ORTH = 1e-10
DOUBLING_REL_TOL = 1e-13
DOUBLING_FAIL_TOL = 1e-6
MAX_NODES = 8192


@dataclass(frozen=True)
class MeasureSpec:
    """A finite positive measure with compact support.

    ``asymptotics_class`` is a declaration about the orthonormal polynomial
    sequence (regular / ratio / szego); it is recorded but not verified at
    construction, since it is not decidable from finite data.
    """

    kind: str
    interval: tuple[float, float] | None = None
    alpha: tuple[float, ...] | None = None
    beta: tuple[float, ...] | None = None
    asymptotics_class: str = "szego"

    def __post_init__(self):
        if self.kind not in (CHEBYSHEV1, CIRCLE, RECURRENCE):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.asymptotics_class not in ASYMPTOTICS_CLASSES:
            raise ValueError(f"unknown asymptotics class {self.asymptotics_class!r}")
        if self.kind == CHEBYSHEV1:
            if self.interval is None:
                raise ValueError("chebyshev1 measure requires an interval")
            if self.alpha is not None or self.beta is not None:
                raise ValueError("chebyshev1 measure takes no recurrence data")
        if self.kind == CIRCLE:
            if self.interval is not None or self.alpha is not None or self.beta is not None:
                raise ValueError("circle measure takes no interval or recurrence data")
        if self.kind == RECURRENCE:
            if self.alpha is None or self.beta is None:
                raise ValueError("recurrence measure requires alpha and beta sequences")
            if len(self.alpha) != len(self.beta) or len(self.alpha) < 1:
                raise ValueError("alpha and beta must have equal positive length")
            if any(b <= 0 for b in self.beta):
                raise ValueError("all beta coefficients must be positive")
        if self.interval is not None:
            a, b = self.interval
            if not a < b:
                raise ValueError(f"interval must satisfy a < b, got {self.interval}")

    @property
    def mass(self) -> float:
        """Total measure of the support."""
        if self.kind == CHEBYSHEV1:
            return math.pi
        if self.kind == CIRCLE:
            return 1.0
        return self.beta[0]

    @property
    def max_nodes(self) -> int:
        """Largest quadrature rule this measure can supply."""
        if self.kind == RECURRENCE:
            return len(self.alpha)
        return MAX_NODES


def chebyshev_first_kind(a: float = -1.0, b: float = 1.0) -> MeasureSpec:
    return MeasureSpec(kind=CHEBYSHEV1, interval=(float(a), float(b)),
                       asymptotics_class="szego")


def circle_lebesgue() -> MeasureSpec:
    return MeasureSpec(kind=CIRCLE, asymptotics_class="szego")


def from_recurrence(alpha, beta, interval=None, asymptotics_class="regular") -> MeasureSpec:
    iv = None if interval is None else (float(interval[0]), float(interval[1]))
    return MeasureSpec(kind=RECURRENCE, interval=iv,
                       alpha=tuple(float(a) for a in alpha),
                       beta=tuple(float(b) for b in beta),
                       asymptotics_class=asymptotics_class)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    node_count: int


@lru_cache(maxsize=256)
def quad_rule(measure: MeasureSpec, n_nodes: int) -> QuadratureRule:
    """Quadrature rule with (up to) ``n_nodes`` points for the measure.

    Gauss-Chebyshev for the interval weight, the uniform trapezoid rule on
    the circle, and the Gauss rule from the Jacobi matrix for recurrence
    data (clamped to the number of supplied coefficient pairs).
    """
    if n_nodes < 1:
        raise ValueError("node count must be positive")
    if measure.kind == CHEBYSHEV1:
        a, b = measure.interval
        k = np.arange(1, n_nodes + 1)
        t = np.cos((2 * k - 1) * np.pi / (2 * n_nodes))
        nodes = 0.5 * (b - a) * t + 0.5 * (a + b)
        weights = np.full(n_nodes, np.pi / n_nodes)
        return QuadratureRule(nodes, weights, n_nodes)
    if measure.kind == CIRCLE:
        theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
        nodes = np.exp(1j * theta)
        weights = np.full(n_nodes, 1.0 / n_nodes)
        return QuadratureRule(nodes, weights, n_nodes)
    n = min(n_nodes, measure.max_nodes)
    alpha = np.asarray(measure.alpha[:n])
    offdiag = np.sqrt(np.asarray(measure.beta[1:n]))
    jac = np.diag(alpha)
    if n > 1:
        jac += np.diag(offdiag, 1) + np.diag(offdiag, -1)
    vals, vecs = np.linalg.eigh(jac)
    weights = measure.beta[0] * vecs[0] ** 2
    return QuadratureRule(vals, weights, n)


def support_distance(measure: MeasureSpec, z: complex) -> float:
    """Distance from z to the support of the measure."""
    z = complex(z)
    if measure.kind == CIRCLE:
        return abs(abs(z) - 1.0)
    a, b = support_interval(measure)
    dx = max(a - z.real, 0.0, z.real - b)
    return math.hypot(dx, z.imag)


@lru_cache(maxsize=64)
def support_interval(measure: MeasureSpec) -> tuple[float, float]:
    """Bracketing interval [a, b] of the support (interval kinds only)."""
    if measure.kind == CIRCLE:
        raise ValueError("circle measure has no support interval")
    if measure.interval is not None:
        return measure.interval
    # recurrence data without a declared interval: use the hull of the
    # largest available Gauss rule
    rule = quad_rule(measure, measure.max_nodes)
    return float(np.min(rule.nodes)), float(np.max(rule.nodes))


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Orthonormal polynomials p_0..p_n_max for a measure.

    Interval kinds evaluate through the normalized three-term recurrence in
    [-1, 1] coordinates; the circle basis is the monomials.
    """

    measure: MeasureSpec
    n_max: int
    kappa: np.ndarray
    _alpha: np.ndarray | None
    _beta: np.ndarray | None

    def _to_normalized(self, z):
        if self.measure.kind == CHEBYSHEV1:
            a, b = self.measure.interval
            return (2.0 * z - (a + b)) / (b - a)
        return z

    def eval_all(self, z, n_max=None):
        """Matrix P[k, j] = p_k(z_j) for k = 0..n_max."""
        top = self.n_max if n_max is None else n_max
        if top > self.n_max:
            raise ValueError(f"degree {top} exceeds basis n_max {self.n_max}")
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.measure.kind == CIRCLE:
            return z[None, :] ** np.arange(top + 1)[:, None]
        t = self._to_normalized(z)
        P = np.empty((top + 1, len(z)), dtype=complex)
        sb = np.sqrt(self._beta)
        P[0] = 1.0 / sb[0]
        if top >= 1:
            P[1] = (t - self._alpha[0]) * P[0] / sb[1]
        for k in range(1, top):
            P[k + 1] = ((t - self._alpha[k]) * P[k] - sb[k] * P[k - 1]) / sb[k + 1]
        return P

    def eval(self, n: int, z):
        """Value of p_n at z (complex scalar or array)."""
        if not 0 <= n <= self.n_max:
            raise ValueError(f"degree {n} out of range 0..{self.n_max}")
        scalar = np.isscalar(z) or isinstance(z, complex)
        vals = self.eval_all(z, n_max=n)[n]
        return complex(vals[0]) if scalar else vals


def make_basis(measure: MeasureSpec, n_max: int) -> OrthoBasis:
    """Build the orthonormal basis through degree n_max.

    The orthonormality of the result is quadrature-checked at construction
    (max deviation of the Gram matrix from the identity below 1e-10).
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if measure.kind == CIRCLE:
        basis = OrthoBasis(measure, n_max, np.ones(n_max + 1), None, None)
        return basis
    if measure.kind == CHEBYSHEV1:
        alpha = np.zeros(n_max + 1)
        beta = np.full(n_max + 1, 0.25)
        beta[0] = np.pi
        if n_max >= 1:
            beta[1] = 0.5
        a, b = measure.interval
        scale = 2.0 / (b - a)
    else:
        if len(measure.alpha) < n_max + 1:
            raise ValueError(
                f"recurrence data supplies {len(measure.alpha)} coefficient pairs; "
                f"need at least {n_max + 1}")
        alpha = np.asarray(measure.alpha[: n_max + 1])
        beta = np.asarray(measure.beta[: n_max + 1])
        scale = 1.0
    kappa = np.exp(-0.5 * np.cumsum(np.log(beta))) * scale ** np.arange(n_max + 1)
    basis = OrthoBasis(measure, n_max, kappa, alpha, beta)
    _check_orthonormality(basis)
    return basis


def _check_orthonormality(basis: OrthoBasis):
    n_nodes = min(basis.measure.max_nodes, max(256, 2 * (basis.n_max + 1)))
    rule = quad_rule(basis.measure, n_nodes)
    P = basis.eval_all(rule.nodes)
    gram = (P * rule.weights) @ np.conj(P.T)
    dev = np.max(np.abs(gram - np.eye(basis.n_max + 1)))
    if dev > TOL_ORTH:
        raise ValueError(f"basis fails orthonormality check: max deviation {dev:.3e}")


def inner_product(measure: MeasureSpec, g, h, rule: QuadratureRule) -> complex:
    """Quadrature value of the inner product of g against h (h conjugated)."""
    gv = np.asarray(g(rule.nodes), dtype=complex)
    hv = np.asarray(h(rule.nodes), dtype=complex)
    return complex(np.sum(rule.weights * gv * np.conj(hv)))


def default_node_count(n_degree: int) -> int:
    return max(256, 4 * (n_degree + 2))


def refine_until_stable(measure: MeasureSpec, compute, start_nodes: int,
                        rel_tol: float = DOUBLING_REL_TOL, cap: int = MAX_NODES):
    """Run ``compute(rule)`` under node doubling until the result stabilizes.

    Returns (values, noise_floor, rule). The noise floor is the max change
    across the final doubling. Raises QuadratureConvergenceError when the
    cap is reached while changes are still large (the integrand is not
    resolvable, e.g. a singularity on the support).
    """
    cap = min(cap, measure.max_nodes)
    n = min(max(2, start_nodes), cap)
    rule = quad_rule(measure, n)
    vals = np.asarray(compute(rule))
    if n >= cap:
        # no room to double (short recurrence data): accept with an
        # eps-level floor estimate
        scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
        return vals, 16 * np.finfo(float).eps * scale, rule
    while True:
        n2 = min(2 * n, cap)
        rule2 = quad_rule(measure, n2)
        vals2 = np.asarray(compute(rule2))
        delta = float(np.max(np.abs(vals2 - vals))) if vals.size else 0.0
        scale = max(1.0, float(np.max(np.abs(vals2))) if vals2.size else 1.0)
        if delta <= rel_tol * scale:
            return vals2, delta, rule2
        if n2 >= cap:
            if delta > DOUBLING_FAIL_TOL * scale:
                raise QuadratureConvergenceError(
                    f"quadrature did not converge by {cap} nodes "
                    f"(last change {delta:.3e} at scale {scale:.3e})")
            return vals2, delta, rule2
        n, rule, vals = n2, rule2, vals2
