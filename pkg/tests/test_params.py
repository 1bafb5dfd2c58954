import math

import numpy as np
import pytest

from inadmm import (
    InertialParams,
    InfeasibleParameters,
    constant_schedule,
    default_params,
    delta_lower_bound,
    delta_roots,
    max_relaxation,
    ramp_schedule,
    validate,
)


def test_delta_lower_bound_values():
    assert delta_lower_bound(0.0, 0.01) == 0.0
    # (0.01 * 1.1 + 0.1 * 0.01) / 0.99
    assert delta_lower_bound(0.1, 0.01) == pytest.approx(0.012 / 0.99)
    with pytest.raises(ValueError):
        delta_lower_bound(1.0, 0.01)
    with pytest.raises(ValueError):
        delta_lower_bound(0.5, 0.0)


def test_max_relaxation_pinned_value():
    # alpha=0.1, sigma=0.01, delta=1: bracket = 0.11 + 0.1 + 0.01 = 0.22
    # 2 (1 - 0.1*0.22) / (1 * 1.22) = 2 * 0.978 / 1.22
    got = max_relaxation(0.1, 0.01, 1.0)
    assert got == pytest.approx(2.0 * 0.978 / 1.22, abs=1e-15)


def test_max_relaxation_alpha_zero_approaches_two():
    # alpha = 0: bound is 2 delta / (delta (1 + sigma)) = 2 / (1 + sigma)
    assert max_relaxation(0.0, 0.01, 1.0) == pytest.approx(2.0 / 1.01)


def test_max_relaxation_infeasible():
    with pytest.raises(InfeasibleParameters):
        max_relaxation(0.5, 0.01, 0.1)


def test_max_relaxation_in_open_zero_two(rng):
    count = 0
    while count < 10000:
        alpha = rng.uniform(0.0, 0.99)
        sigma = rng.uniform(1e-4, 0.5)
        lb = delta_lower_bound(alpha, sigma)
        delta = (lb + rng.uniform(1e-6, 3.0)) * rng.uniform(1.0, 3.0)
        lam = max_relaxation(alpha, sigma, delta)
        assert 0.0 < lam < 2.0
        count += 1


def test_infeasible_rejected(rng):
    count = 0
    while count < 1000:
        alpha = rng.uniform(0.01, 0.99)
        sigma = rng.uniform(1e-4, 0.5)
        lb = delta_lower_bound(alpha, sigma)
        delta = lb * rng.uniform(0.0, 1.0)
        with pytest.raises(InfeasibleParameters):
            max_relaxation(alpha, sigma, delta)
        count += 1


def test_delta_roots_round_trip(rng):
    hits = 0
    while hits < 200:
        alpha = rng.uniform(0.01, 0.6)
        sigma = rng.uniform(1e-3, 0.2)
        target = rng.uniform(0.05, 0.95)
        try:
            d1, d2 = delta_roots(target, alpha, sigma)
        except InfeasibleParameters:
            continue
        assert 0.0 < d1 <= d2
        for d in (d1, d2):
            # round trip: at a root the relaxation cap is exactly 2 * target
            assert max_relaxation(alpha, sigma, d) == pytest.approx(
                2.0 * target, abs=1e-12, rel=1e-12)
        hits += 1


def test_delta_roots_quadratic_identity(rng):
    # d1, d2 solve: target * alpha * d^2 - b d + alpha (alpha(1+alpha)+sigma) = 0
    # with b = 1 - alpha^2 - target (1 + alpha(1+alpha) + sigma)
    hits = 0
    while hits < 500:
        alpha = rng.uniform(0.01, 0.6)
        sigma = rng.uniform(1e-3, 0.2)
        target = rng.uniform(0.05, 0.95)
        try:
            d1, d2 = delta_roots(target, alpha, sigma)
        except InfeasibleParameters:
            continue
        base = alpha * (1.0 + alpha) + sigma
        b = 1.0 - alpha**2 - target * (1.0 + base)
        for d in (d1, d2):
            resid = target * alpha * d * d - b * d + alpha * base
            scale = max(1.0, abs(target * alpha * d * d), abs(b * d))
            assert abs(resid) <= 1e-12 * scale
        hits += 1


def test_delta_roots_infeasible_raises():
    with pytest.raises(InfeasibleParameters):
        delta_roots(0.99, 0.9, 0.5)


def test_default_params_valid():
    for alpha in (0.0, 0.05, 0.2, 0.5, 0.9):
        p = default_params(alpha)
        assert validate(p).ok
        lam = p.lambda_schedule(10)
        assert 0.0 < lam < p.max_relaxation()


def test_schedules():
    s = constant_schedule(0.3)
    assert s(1) == s(500) == 0.3
    r = ramp_schedule(0.3, start=0.0, over=4)
    assert r(1) == 0.0
    assert r(4) == 0.3
    assert r(100) == 0.3
    assert 0.0 < r(2) < r(3) < 0.3


def test_init_mode_overrides():
    p = default_params(0.3)
    assert p.alpha_at(1) == 0.0 and p.lambda_at(1) == 0.0
    assert p.alpha_at(2) == 0.3
    q = InertialParams(
        gamma=1.0, alpha=0.3, sigma=0.01, delta=1.0,
        lambda_lo=1e-6,
        alpha_schedule=constant_schedule(0.3),
        lambda_schedule=constant_schedule(1.0),
        init_mode="alpha2_zero",
    )
    assert q.alpha_at(1) == q.alpha_at(2) == 0.0
    assert q.alpha_at(3) == 0.3
    assert q.lambda_at(1) == 1.0


def test_validate_flags_violations():
    # lambda above the cap
    p = InertialParams(
        gamma=1.0, alpha=0.1, sigma=0.01, delta=1.0, lambda_lo=1e-6,
        alpha_schedule=constant_schedule(0.1),
        lambda_schedule=constant_schedule(1.99),
        init_mode="raw",
    )
    rep = validate(p)
    assert not rep.ok
    assert any("lambda_k" in cond for cond, _ in rep.violations)

    # decreasing alpha schedule
    q = InertialParams(
        gamma=1.0, alpha=0.1, sigma=0.01, delta=1.0, lambda_lo=1e-6,
        alpha_schedule=ramp_schedule(0.0, start=0.1, over=5),
        lambda_schedule=constant_schedule(1.0),
        init_mode="raw",
    )
    rep = validate(q)
    assert not rep.ok
    assert any("nondecreasing" in cond for cond, _ in rep.violations)

    # missing start-up condition: alpha_2 > 0 without a zeroed first step
    r = InertialParams(
        gamma=1.0, alpha=0.1, sigma=0.01, delta=1.0, lambda_lo=1e-6,
        alpha_schedule=constant_schedule(0.1),
        lambda_schedule=constant_schedule(1.0),
        init_mode="raw",
    )
    rep = validate(r)
    assert not rep.ok
    assert any("alpha_2" in cond for cond, _ in rep.violations)

    # delta below its bound
    s = InertialParams(
        gamma=1.0, alpha=0.5, sigma=0.01, delta=0.1, lambda_lo=1e-6,
        alpha_schedule=constant_schedule(0.5),
        lambda_schedule=constant_schedule(0.5),
        init_mode="lambda1_alpha1_zero",
    )
    rep = validate(s)
    assert not rep.ok
    assert any("lower bound" in cond for cond, _ in rep.violations)


def test_constructor_guards():
    with pytest.raises(ValueError):
        default_params(-0.1)
    with pytest.raises(ValueError):
        default_params(1.0)
    with pytest.raises(ValueError):
        InertialParams(
            gamma=0.0, alpha=0.1, sigma=0.01, delta=1.0, lambda_lo=1e-6,
            alpha_schedule=constant_schedule(0.1),
            lambda_schedule=constant_schedule(1.0),
        )
