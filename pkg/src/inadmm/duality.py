"""Primal/dual objective values, Fenchel gap, and optimality residuals."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DualityReport",
    "primal_value",
    "dual_value",
    "kkt_residual",
    "subgradient_violation",
    "hypothesis_check",
    "duality_report",
]


def primal_value(p, x):
    """f(x) + g(Lx); +inf outside the domain."""
    fx = p.f(x)
    if np.isinf(fx):
        return np.inf
    gx = p.g(p.L.apply(x))
    if np.isinf(gx):
        return np.inf
    return fx + gx


def dual_value(p, v):
    """-f*(-L*v) - g*(v); -inf when either conjugate is +inf."""
    a = p.f.conj(-p.L.adjoint_apply(v))
    if np.isinf(a):
        return -np.inf
    b = p.g.conj(v)
    if np.isinf(b):
        return -np.inf
    return -a - b


def subgradient_violation(f, x, u, probes=50, rng=None, scale=1.0):
    """Worst violation of the inequality f(y) >= f(x) + <u, y - x>.

    Probes random points around x; returns +inf when f(x) itself is +inf
    (u cannot be a subgradient outside the domain).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    x = np.asarray(x, dtype=float)
    fx = f(x)
    if np.isinf(fx):
        return np.inf
    worst = 0.0
    for _ in range(probes):
        y = x + scale * rng.standard_normal(x.shape)
        fy = f(y)
        if np.isinf(fy):
            continue
        worst = max(worst, fx + float(u @ (y - x)) - fy)
    return worst


def kkt_residual(p, x, v, probes=50, rng=None):
    """Sum of the violations of -L*v in df(x) and v in dg(Lx)."""
    if rng is None:
        rng = np.random.default_rng(0)
    r1 = subgradient_violation(p.f, x, -p.L.adjoint_apply(v), probes, rng)
    r2 = subgradient_violation(p.g, p.L.apply(x), v, probes, rng)
    return r1 + r2


def hypothesis_check(p):
    """Injectivity moduli (theta, theta*) of L and its adjoint."""
    return p.L.injectivity_modulus(), p.L.adjoint().injectivity_modulus()


@dataclass
class DualityReport:
    primal_value: float
    dual_value: float
    gap: float
    kkt_residual: float
    h_theta: float
    h_star_theta: float

    def __str__(self):
        return (
            "primal %.12g  dual %.12g  gap %.3g  kkt %.3g  "
            "theta %.3g  theta* %.3g"
            % (self.primal_value, self.dual_value, self.gap,
               self.kkt_residual, self.h_theta, self.h_star_theta)
        )


def duality_report(p, x, v, probes=50, rng=None):
    pv = primal_value(p, x)
    dv = dual_value(p, v)
    gap = pv - dv if np.isfinite(pv) and np.isfinite(dv) else np.inf
    theta, theta_star = hypothesis_check(p)
    return DualityReport(
        primal_value=pv,
        dual_value=dv,
        gap=gap,
        kkt_residual=kkt_residual(p, x, v, probes, rng),
        h_theta=theta,
        h_star_theta=theta_star,
    )
