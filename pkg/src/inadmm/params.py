"""Inertia/relaxation parameter region shared by all solvers.

The admissible region couples the inertia cap ``alpha`` with two auxiliary
constants ``sigma`` and ``delta``: ``delta`` must exceed a lower bound
depending on ``alpha`` and ``sigma``, and the relaxation factors are then
confined to ``(0, lambda_max]`` with ``lambda_max < 2``.
"""

import math
from dataclasses import dataclass, field

__all__ = [
    "InfeasibleParameters",
    "delta_lower_bound",
    "max_relaxation",
    "delta_roots",
    "Schedule",
    "constant_schedule",
    "ramp_schedule",
    "InertialParams",
    "default_params",
    "ValidationReport",
    "validate",
]


class InfeasibleParameters(ValueError):
    """Raised when (alpha, sigma, delta) lies outside the admissible region."""


def delta_lower_bound(alpha, sigma):
    """Strict lower bound on delta: (alpha^2 (1+alpha) + alpha sigma) / (1 - alpha^2)."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0,1)")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return (alpha**2 * (1.0 + alpha) + alpha * sigma) / (1.0 - alpha**2)


def max_relaxation(alpha, sigma, delta):
    """Upper bound for the relaxation factors lambda_k.

    Returns ``2 (delta - alpha [alpha(1+alpha) + alpha delta + sigma]) /
    (delta [1 + alpha(1+alpha) + alpha delta + sigma])``, which lies in
    (0, 2) whenever delta exceeds its lower bound.
    """
    lb = delta_lower_bound(alpha, sigma)
    if delta <= lb or delta <= 0.0:
        raise InfeasibleParameters(
            "delta=%g must exceed its lower bound %g (alpha=%g, sigma=%g)"
            % (delta, lb, alpha, sigma)
        )
    bracket = alpha * (1.0 + alpha) + alpha * delta + sigma
    return 2.0 * (delta - alpha * bracket) / (delta * (1.0 + bracket))


def delta_roots(target, alpha, sigma):
    """The two delta values at which max_relaxation/2 equals ``target``.

    ``target`` is the desired value of the bracketed ratio, in (0, 1).
    Feasibility requires
    ``target (1 + alpha(1+alpha) + sigma) + alpha^2
    + 2 alpha sqrt(target) sqrt(alpha(1+alpha) + sigma) < 1``.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target ratio must lie in (0,1)")
    if alpha <= 0.0 or sigma <= 0.0:
        raise ValueError("alpha and sigma must be positive")
    base = alpha * (1.0 + alpha) + sigma
    lhs = target * (1.0 + base) + alpha**2 + 2.0 * alpha * math.sqrt(target) * math.sqrt(base)
    if lhs >= 1.0:
        raise InfeasibleParameters(
            "no delta attains ratio %g for alpha=%g, sigma=%g" % (target, alpha, sigma)
        )
    b = 1.0 - alpha**2 - target * (1.0 + base)
    disc = b * b - 4.0 * target * alpha**2 * base
    if disc < 0.0:
        raise RuntimeError("negative discriminant despite feasible inputs")
    sq = math.sqrt(disc)
    # stable quadratic roots: avoid cancellation in b - sq
    d2 = (b + sq) / (2.0 * alpha * target)
    d1 = base / (target * d2)  # product of roots is base / target (per alpha)
    return d1, d2


@dataclass(frozen=True)
class Schedule:
    """Closed-form per-iteration schedule: constant or a linear ramp."""

    kind: str  # "constant" | "ramp"
    value: float
    start: float = 0.0
    ramp_over: int = 1

    def __call__(self, k):
        if self.kind == "constant":
            return self.value
        # linear ramp from `start` at k=1 up to `value` at k=ramp_over
        if k >= self.ramp_over:
            return self.value
        frac = (k - 1) / max(self.ramp_over - 1, 1)
        return self.start + frac * (self.value - self.start)


def constant_schedule(value):
    return Schedule("constant", float(value))


def ramp_schedule(value, start=0.0, over=10):
    return Schedule("ramp", float(value), float(start), int(over))


@dataclass(frozen=True)
class InertialParams:
    """Step parameter, inertia cap, region constants, and schedules."""

    gamma: float
    alpha: float
    sigma: float
    delta: float
    lambda_lo: float
    alpha_schedule: Schedule
    lambda_schedule: Schedule
    init_mode: str = "lambda1_alpha1_zero"  # or "alpha2_zero" / "raw"

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0,1)")
        if self.init_mode not in ("alpha2_zero", "lambda1_alpha1_zero", "raw"):
            raise ValueError("unknown init_mode %r" % (self.init_mode,))

    def alpha_at(self, k):
        """Effective inertia factor at iteration k >= 1 (init mode applied)."""
        if self.init_mode == "lambda1_alpha1_zero" and k == 1:
            return 0.0
        if self.init_mode == "alpha2_zero" and k <= 2:
            return 0.0
        return self.alpha_schedule(k)

    def lambda_at(self, k):
        """Effective relaxation factor at iteration k >= 1 (init mode applied)."""
        if self.init_mode == "lambda1_alpha1_zero" and k == 1:
            return 0.0
        return self.lambda_schedule(k)

    def max_relaxation(self):
        return max_relaxation(self.alpha, self.sigma, self.delta)


def default_params(alpha, gamma=1.0, sigma=0.01, lambda_frac=0.9):
    """Preset sitting strictly inside the admissible region.

    delta is 1.5x its lower bound (or 1.0 when the bound vanishes at
    alpha = 0), lambda_k is a constant fraction of the admissible maximum,
    and alpha_k is constant with the first iteration un-inertial.
    """
    lb = delta_lower_bound(alpha, sigma)
    delta = 1.5 * lb if lb > 0.0 else 1.0
    lam = lambda_frac * max_relaxation(alpha, sigma, delta)
    return InertialParams(
        gamma=gamma,
        alpha=alpha,
        sigma=sigma,
        delta=delta,
        lambda_lo=min(lam, 1e-6),
        alpha_schedule=constant_schedule(alpha),
        lambda_schedule=constant_schedule(lam),
        init_mode="lambda1_alpha1_zero",
    )


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, condition, index=None):
        self.violations.append((condition, index))

    def __str__(self):
        if self.ok:
            return "parameters valid"
        lines = ["parameter violations:"]
        for cond, idx in self.violations:
            where = "" if idx is None else " (first at k=%d)" % idx
            lines.append("  - %s%s" % (cond, where))
        return "\n".join(lines)


def validate(p, horizon=1000):
    """Check every region and schedule condition over iterations 1..horizon."""
    report = ValidationReport()
    lb = delta_lower_bound(p.alpha, p.sigma)
    if p.delta <= lb:
        report.add("delta must exceed its lower bound %g" % lb)
        return report
    lam_max = max_relaxation(p.alpha, p.sigma, p.delta)
    if not 0.0 < p.lambda_lo:
        report.add("lambda lower bound must be positive")

    prev_alpha = None
    for k in range(1, horizon + 1):
        a_k = p.alpha_at(k)
        l_k = p.lambda_at(k)
        if not 0.0 <= a_k <= p.alpha:
            report.add("alpha_k must lie in [0, alpha]", k)
            break
        if prev_alpha is not None and a_k < prev_alpha:
            report.add("alpha schedule must be nondecreasing", k)
            break
        prev_alpha = a_k
        if k >= 2 and not (p.lambda_lo <= l_k <= lam_max):
            report.add(
                "lambda_k must lie in [%g, %g]" % (p.lambda_lo, lam_max), k
            )
            break
        if k == 1 and l_k != 0.0 and not (p.lambda_lo <= l_k <= lam_max):
            report.add("lambda_1 must be 0 or lie in the admissible interval", k)

    alpha2 = p.alpha_at(2)
    if alpha2 != 0.0 and not (p.lambda_at(1) == 0.0 and p.alpha_at(1) == 0.0):
        report.add("either alpha_2 = 0 or lambda_1 = alpha_1 = 0 is required")
    return report
