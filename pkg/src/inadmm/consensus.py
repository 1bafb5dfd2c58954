"""Product-space schemes for min sum_i f_i(x).

Two variants: the dual-sum-zero form keeps per-block primal iterates and
multipliers summing to zero, and aggregates a shared consensus point u.
The interchanged form keeps one shared primal point and per-block splitting
variables.  Both reduce to the textbook consensus ADMM when inertia is off
and relaxation is 1.
"""

from dataclasses import dataclass

import numpy as np

from .admm import ProblemSpec
from .functions import IndicatorConsensus, SeparableSum
from .linalg import LinearMap
from .params import validate
from .trace import SolveTrace, TraceRow

__all__ = [
    "ConsensusProblem",
    "ConsensusState",
    "sum1_step",
    "run_sum1",
    "sum2_step",
    "run_sum2",
    "run_sum1_simplified",
    "boyd_consensus",
    "consensus_optimality_residual",
    "lift_problem",
]

ZERO_SUM_TOL = 1e-12


@dataclass
class ConsensusProblem:
    blocks: list  # ConvexFn, all on the same space

    def __post_init__(self):
        if len(self.blocks) < 2:
            raise ValueError("need at least two blocks")
        dims = {f.dim for f in self.blocks}
        if len(dims) != 1:
            raise ValueError("all blocks must share one dimension")

    @property
    def m(self):
        return len(self.blocks)

    @property
    def n(self):
        return self.blocks[0].dim


@dataclass
class ConsensusState:
    """Per-block iterates as (m, n) arrays; `shared` is u or the shared x."""

    k: int
    x: np.ndarray
    z: np.ndarray
    z_prev: np.ndarray
    zbar: np.ndarray
    y: np.ndarray
    y_prev: np.ndarray
    shared: np.ndarray = None


def _as_block_array(u, m, n, name):
    a = np.asarray(u, dtype=float)
    if a.shape != (m, n):
        raise ValueError("%s must have shape (%d, %d)" % (name, m, n))
    return a


def _initial_state(cp, init, require_zero_sum):
    m, n = cp.m, cp.n
    if init is None:
        y0 = y1 = z0 = z1 = np.zeros((m, n))
    else:
        y0, y1, z0, z1 = (
            _as_block_array(u, m, n, nm)
            for u, nm in zip(init, ("y0", "y1", "z0", "z1"))
        )
    if require_zero_sum:
        for nm, y in (("y0", y0), ("y1", y1)):
            s = np.linalg.norm(y.sum(axis=0))
            if s > ZERO_SUM_TOL * (1.0 + np.abs(y).max()):
                raise ValueError("%s must sum to zero across blocks" % nm)
    return ConsensusState(
        k=1,
        x=np.zeros((m, n)),
        z=z1,
        z_prev=z0,
        zbar=np.zeros((m, n)),
        y=y1,
        y_prev=y0,
    )


def sum1_step(state, cp, params, k):
    """One step of the dual-sum-zero consensus scheme."""
    gamma = params.gamma
    a_k = params.alpha_at(k)
    a_next = params.alpha_at(k + 1)
    l_k = params.lambda_at(k)
    m = cp.m

    drift = state.y - state.y_prev + gamma * (state.z - state.z_prev)
    c = state.y - a_k * (state.y - state.y_prev) - gamma * a_k * (state.z - state.z_prev)
    x_next = np.stack([
        f.prox(1.0 / gamma, state.z[i] - c[i] / gamma)
        for i, f in enumerate(cp.blocks)
    ])
    zbar_next = (a_next * l_k * (x_next - state.z)
                 + ((1.0 - l_k) * a_k * a_next / gamma) * drift)
    u_next = (
        (l_k * (1.0 + a_next) / m) * x_next.sum(axis=0)
        + ((1.0 - a_next * l_k - l_k) / m) * state.z.sum(axis=0)
        + (a_k * (1.0 - l_k) * (1.0 + a_next) / m)
        * (state.z - state.z_prev).sum(axis=0)
    )
    z_next = u_next[None, :] - zbar_next
    y_next = (state.y
              + gamma * (l_k * x_next + (1.0 - l_k) * state.z - z_next)
              + (1.0 - l_k) * a_k * drift)
    return ConsensusState(k=k + 1, x=x_next, z=z_next, z_prev=state.z,
                          zbar=zbar_next, y=y_next, y_prev=state.y,
                          shared=u_next)


def sum2_step(state, cp, params, k):
    """One step of the interchanged scheme with one shared primal point."""
    gamma = params.gamma
    a_k = params.alpha_at(k)
    a_next = params.alpha_at(k + 1)
    l_k = params.lambda_at(k)
    m = cp.m

    drift = state.y - state.y_prev + gamma * (state.z - state.z_prev)
    x_next = (state.z.sum(axis=0) / m
              - state.y.sum(axis=0) / (m * gamma)
              + (a_k / (m * gamma)) * drift.sum(axis=0))
    zbar_next = (a_next * l_k * (x_next[None, :] - state.z)
                 + ((1.0 - l_k) * a_k * a_next / gamma) * drift)
    arg = (zbar_next + l_k * x_next[None, :] + (1.0 - l_k) * state.z
           + state.y / gamma + ((1.0 - l_k) * a_k / gamma) * drift)
    z_next = np.stack([
        -zbar_next[i] + f.prox(1.0 / gamma, arg[i])
        for i, f in enumerate(cp.blocks)
    ])
    y_next = (state.y
              + gamma * (l_k * x_next[None, :] + (1.0 - l_k) * state.z - z_next)
              + (1.0 - l_k) * a_k * drift)
    return ConsensusState(k=k + 1, x=np.tile(x_next, (m, 1)), z=z_next,
                          z_prev=state.z, zbar=zbar_next, y=y_next,
                          y_prev=state.y, shared=x_next)


def _v_blocks_sum1(state, new_state, gamma, a_k):
    # v_i^k = y_i^k - gamma z_i^k + gamma x_i^{k+1} - alpha_k (dy + gamma dz);
    # the per-block prox x-update certifies -v_i^k in df_i(x_i^{k+1})
    drift = state.y - state.y_prev + gamma * (state.z - state.z_prev)
    return state.y - gamma * state.z + gamma * new_state.x - a_k * drift


def _v_blocks_sum2(state, new_state, gamma, a_k):
    # the per-block prox sits in the z-update here, certifying
    # y_i^{k+1} in df_i(z_i^{k+1} + zbar_i^{k+1}); same -v_i convention
    return -new_state.y


def _run_blockwise(cp, params, stepper, vfn, init, require_zero_sum,
                   max_iters, tol, horizon_check=1000):
    report = validate(params, horizon=horizon_check)
    if not report.ok:
        raise ValueError(str(report))
    state = _initial_state(cp, init, require_zero_sum)
    gamma = params.gamma
    trace = SolveTrace()
    dw_sq_sum = 0.0
    for k in range(1, max_iters + 1):
        prev = state
        state = stepper(state, cp, params, k)
        v = vfn(prev, state, gamma, params.alpha_at(k))
        w_prev = prev.y + gamma * prev.z
        w_next = state.y + gamma * state.z
        dw = float(np.linalg.norm(w_next - w_prev))
        dw_sq_sum += dw * dw
        feas = float(np.abs(state.x - prev.z).max())
        zbar_norm = float(np.linalg.norm(state.zbar))
        primal = _sum_or_inf(f(state.x[i]) for i, f in enumerate(cp.blocks))
        dual = -_sum_or_inf(f.conj(-v[i]) for i, f in enumerate(cp.blocks))
        trace.append(TraceRow(
            k,
            primal=primal,
            dual=dual,
            feas_residual=feas,
            zbar_norm=zbar_norm,
            dw_norm=dw,
            dw_sq_sum=dw_sq_sum,
            vectors={"x": state.x, "z": state.z, "zbar": state.zbar,
                     "y": state.y, "v": v, "shared": state.shared,
                     "w": w_prev, "w_next": w_next},
        ))
        # k = 1 can show zero residuals by construction (forced bridge step)
        if k >= 2 and max(feas, zbar_norm, dw) <= tol:
            trace.converged = True
            break
    trace.final = {"x": state.x, "z": state.z, "y": state.y,
                   "shared": state.shared, "v": v}
    return trace


def _sum_or_inf(values):
    total = 0.0
    for v in values:
        if np.isinf(v):
            return np.inf
        total += v
    return total


def run_sum1(cp, params, init=None, max_iters=100000, tol=1e-10):
    """Dual-sum-zero consensus run; initialization must have zero dual sum."""
    return _run_blockwise(cp, params, sum1_step, _v_blocks_sum1, init, True,
                          max_iters, tol)


def run_sum2(cp, params, init=None, max_iters=100000, tol=1e-10):
    """Interchanged consensus run (no zero-sum requirement on the duals)."""
    return _run_blockwise(cp, params, sum2_step, _v_blocks_sum2, init, False,
                          max_iters, tol)


def run_sum1_simplified(cp, params, init=None, max_iters=1000):
    """Independent implementation of the lambda_k = 1 simplification.

    Requires the alpha_2 = 0 initialization mode (the simplification keeps
    lambda_1 = 1) and a constant relaxation of exactly 1.
    """
    if params.init_mode != "alpha2_zero":
        raise ValueError("simplified scheme assumes the alpha_2 = 0 init mode")
    gamma = params.gamma
    m, n = cp.m, cp.n
    state = _initial_state(cp, init, True)
    x_prev = None
    trace = SolveTrace()
    for k in range(1, max_iters + 1):
        a_k = params.alpha_at(k)
        a_next = params.alpha_at(k + 1)
        if params.lambda_at(k) != 1.0:
            raise ValueError("simplified scheme requires lambda_k = 1")
        c = (state.y - a_k * (state.y - state.y_prev)
             - gamma * a_k * (state.z - state.z_prev))
        x_next = np.stack([
            f.prox(1.0 / gamma, state.z[i] - c[i] / gamma)
            for i, f in enumerate(cp.blocks)
        ])
        mean_next = x_next.mean(axis=0)
        if a_next == 0.0:
            z_next = np.tile(mean_next, (m, 1))
        else:
            z_next = ((1.0 + a_next) * mean_next - a_next * x_prev.mean(axis=0)
                      )[None, :] - a_next * (x_next - state.z)
        y_next = state.y + gamma * (x_next - z_next)
        trace.append(TraceRow(k, vectors={"x": x_next, "z": z_next, "y": y_next}))
        state = ConsensusState(k=k + 1, x=x_next, z=z_next, z_prev=state.z,
                               zbar=np.zeros((m, n)), y=y_next,
                               y_prev=state.y)
        x_prev = x_next
    trace.final = {"x": state.x, "z": state.z, "y": state.y}
    return trace


def boyd_consensus(cp, gamma, init=None, max_iters=100000, tol=1e-10):
    """Textbook consensus ADMM: per-block prox against the running average.

    The reduction oracle for the dual-sum-zero scheme with inertia off and
    relaxation 1.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    m, n = cp.m, cp.n
    if init is None:
        y = np.zeros((m, n))
        xbar = np.zeros(n)
    else:
        y, xbar = init
        y = _as_block_array(y, m, n, "y0")
        xbar = np.asarray(xbar, dtype=float)
        s = np.linalg.norm(y.sum(axis=0))
        if s > ZERO_SUM_TOL * (1.0 + np.abs(y).max()):
            raise ValueError("y0 must sum to zero across blocks")
    trace = SolveTrace()
    for k in range(1, max_iters + 1):
        x = np.stack([
            f.prox(1.0 / gamma, xbar - y[i] / gamma)
            for i, f in enumerate(cp.blocks)
        ])
        xbar_next = x.mean(axis=0)
        y_next = y + gamma * (x - xbar_next[None, :])
        feas = float(np.abs(x - xbar[None, :]).max())
        dy = float(np.linalg.norm(y_next - y))
        trace.append(TraceRow(
            k,
            primal=_sum_or_inf(f(x[i]) for i, f in enumerate(cp.blocks)),
            feas_residual=feas,
            dw_norm=dy,
            vectors={"x": x, "xbar": xbar_next, "y": y_next},
        ))
        y, xbar = y_next, xbar_next
        if feas <= tol and dy <= tol:
            trace.converged = True
            break
    trace.final = {"x": x, "xbar": xbar, "y": y}
    return trace


def consensus_optimality_residual(x, v, cp, probes=50, rng=None):
    """Violation of the first-order conditions at (x, v_1..v_m).

    The stationarity certificate is -v_i in df_i(x) with sum_i v_i = 0;
    the result sums the worst probed subgradient-inequality violation with
    the norm of sum_i v_i.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    worst = 0.0
    for i, f in enumerate(cp.blocks):
        fx = f(x)
        if np.isinf(fx):
            return np.inf
        for _ in range(probes):
            p = x + rng.standard_normal(x.shape)
            fp = f(p)
            if np.isinf(fp):
                continue
            violation = fx - float(v[i] @ (p - x)) - fp
            worst = max(worst, violation)
    return worst + float(np.linalg.norm(v.sum(axis=0)))


def lift_problem(cp):
    """The product-space composite problem equivalent to the consensus one."""
    return ProblemSpec(
        f=SeparableSum(cp.blocks),
        g=IndicatorConsensus(cp.m, cp.n),
        L=LinearMap.identity(cp.m * cp.n),
    )
