import numpy as np
import pytest

from inadmm import (
    IndicatorBox,
    IndicatorHyperplane,
    IndicatorPoint,
    L1Norm,
    L2Norm,
    LinearMap,
    Quadratic,
    Translated,
    Zero,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    try:
        from test_acceptance import ACCEPTANCE_CRITERIA
    except ImportError:
        return
    results = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            name = report.nodeid.split("::")[-1]
            if name in ACCEPTANCE_CRITERIA:
                results[name] = outcome
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in ACCEPTANCE_CRITERIA.items():
        status = "PASS" if results.get(name) == "passed" else (
            "FAIL" if name in results else "NOT RUN")
        terminalreporter.write_line("[%s] %s" % (status, label))


def random_psd(n, rng, ridge=0.0):
    a = rng.standard_normal((n, n))
    return a @ a.T / n + ridge * np.eye(n)


def random_quadratic(n, rng, ridge=0.5):
    return Quadratic(random_psd(n, rng, ridge), rng.standard_normal(n),
                     float(rng.standard_normal()))


def catalog(n, rng):
    """One instance of every catalog kind on R^n (plus a translated one)."""
    lo = -np.abs(rng.standard_normal(n)) - 0.2
    hi = np.abs(rng.standard_normal(n)) + 0.2
    fns = [
        Zero(n),
        random_quadratic(n, rng),
        L1Norm(n, 0.5 + rng.random()),
        L2Norm(n, 0.5 + rng.random()),
        IndicatorPoint(rng.standard_normal(n)),
        IndicatorBox(lo, hi),
        IndicatorHyperplane(rng.standard_normal(n) + 0.1, float(rng.standard_normal())),
        Translated(L1Norm(n, 1.0), rng.standard_normal(n)),
    ]
    return fns


def tall_full_rank(m, n, rng):
    """Random m x n (m >= n) matrix with a comfortably positive smallest SV."""
    a = rng.standard_normal((m, n))
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    s = s + 0.5  # bound the spectrum away from zero
    return u @ np.diag(s) @ vt


def random_composite(rng, allow_dense=True):
    """Random small min f(x) + g(Lx) instance with exact subproblems.

    f is quadratic (any L) or an l1 norm (L = identity); g is drawn from
    the full catalog kinds that keep the dual trace finite.
    """
    n = int(rng.integers(1, 5))
    use_l1 = bool(rng.random() < 0.4) or not allow_dense
    if use_l1:
        f = L1Norm(n, 0.5 + rng.random())
        L = LinearMap.identity(n)
        m = n
    else:
        f = random_quadratic(n, rng)
        if allow_dense and rng.random() < 0.5:
            m = n + int(rng.integers(0, 2))
            L = LinearMap.dense(tall_full_rank(m, n, rng))
        else:
            L = LinearMap.identity(n)
            m = n
    g_choice = rng.integers(0, 3)
    if g_choice == 0:
        g = random_quadratic(m, rng)
    elif g_choice == 1:
        g = L1Norm(m, 0.5 + rng.random())
    else:
        g = L2Norm(m, 0.5 + rng.random())
    return f, g, L
