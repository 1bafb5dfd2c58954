"""Inertial Douglas-Rachford iteration for two resolvent-equipped operators.

This is both a solver in its own right and the independent oracle for the
equivalence test of the inertial ADMM scheme: the ADMM iterates, suitably
recombined, follow exactly this recursion.
"""

from dataclasses import dataclass

import numpy as np

from .functions import Quadratic
from .linalg import check_vector
from .params import validate
from .trace import SolveTrace, TraceRow

__all__ = ["ResolventOp", "IdrState", "idr_step", "run_idr"]


class ResolventOp:
    """A maximally monotone operator given through its (exact) resolvent.

    Kinds:
      - ``subdifferential(f)``: A = df, resolvent is the prox of f.
      - ``conjugate_subdifferential(g)``: A = dg*, resolvent is the prox of
        the conjugate (Moreau decomposition).
      - ``composed_conjugate(f, L)``: A = d(f* o (-L*)).  The resolvent is
        computed by an inner minimization that is available in closed form
        only for quadratic f or (scaled-)identity L; other combinations are
        rejected at construction so the oracle stays exact.
      - ``zero`` / ``point_normal_cone(a)``: convenience special cases.
    """

    def __init__(self, kind, resolvent, dim):
        self.kind = kind
        self._resolvent = resolvent
        self.dim = dim

    @classmethod
    def subdifferential(cls, f):
        return cls("subdifferential", lambda gamma, u: f.prox(gamma, u), f.dim)

    @classmethod
    def conjugate_subdifferential(cls, g):
        return cls(
            "conjugate_subdifferential",
            lambda gamma, u: g.conj_prox(gamma, u),
            g.dim,
        )

    @classmethod
    def zero(cls, dim):
        return cls("zero", lambda gamma, u: check_vector(u, dim).copy(), dim)

    @classmethod
    def point_normal_cone(cls, a):
        a = check_vector(a, None, name="a")
        return cls("point_normal_cone", lambda gamma, u: a.copy(), a.shape[0])

    @classmethod
    def composed_conjugate(cls, f, L):
        """A = d(f* o (-L*)) on the codomain of L.

        J_{gamma A}(u) = u + gamma L xhat with
        xhat = argmin_x { f(x) + <u, Lx> + (gamma/2) ||Lx||^2 }.
        """
        dim = L.codomain_dim
        if L.kind in ("identity", "scaled_identity"):
            c = 1.0 if L.kind == "identity" else L.scale

            def resolvent(gamma, u):
                u = check_vector(u, dim)
                # argmin f(x) + c<u,x> + (gamma c^2/2)||x||^2
                xhat = f.prox(1.0 / (gamma * c * c), -u / (gamma * c))
                return u + gamma * c * xhat

            return cls("composed_conjugate", resolvent, dim)
        if isinstance(f, Quadratic):
            import scipy.linalg

            Lm = L.as_matrix()
            cache = {}

            def resolvent(gamma, u):
                u = check_vector(u, dim)
                try:
                    fct = cache[gamma]
                except KeyError:
                    fct = scipy.linalg.cho_factor(f.Q + gamma * (Lm.T @ Lm))
                    cache[gamma] = fct
                xhat = scipy.linalg.cho_solve(fct, -f.q - Lm.T @ u)
                return u + gamma * (Lm @ xhat)

            return cls("composed_conjugate", resolvent, dim)
        raise ValueError(
            "composed_conjugate needs quadratic f or (scaled-)identity L "
            "for an exact inner solve"
        )

    def resolvent(self, gamma, u):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        return self._resolvent(gamma, check_vector(u, self.dim))


@dataclass
class IdrState:
    k: int
    w_prev: np.ndarray
    w: np.ndarray
    y: np.ndarray = None
    v: np.ndarray = None


def idr_step(state, A, B, gamma, alpha_k, lambda_k):
    """One inertial Douglas-Rachford step.

    u = w + alpha_k (w - w_prev); y = J_{gamma B}(u);
    v = J_{gamma A}(2y - u); w_next = u + lambda_k (v - y).
    """
    u = state.w + alpha_k * (state.w - state.w_prev)
    y = B.resolvent(gamma, u)
    v = A.resolvent(gamma, 2.0 * y - u)
    w_next = u + lambda_k * (v - y)
    return IdrState(k=state.k + 1, w_prev=state.w, w=w_next, y=y, v=v)


def run_idr(A, B, gamma, params, w0, w1, max_iters=100000, tol=1e-10,
            horizon_check=1000):
    """Iterate the inertial DR scheme until the joint residual is small.

    Stops when ||v - y|| <= tol and ||w_next - w|| <= tol, or after
    `max_iters` iterations.  The trace stores w, y, v per iteration and
    the running sum of ||w_next - w||^2.
    """
    report = validate(params, horizon=horizon_check)
    if not report.ok:
        raise ValueError(str(report))
    w0 = check_vector(w0, A.dim, name="w0")
    w1 = check_vector(w1, A.dim, name="w1")
    if params.alpha_at(1) > 0.0 and not np.array_equal(w0, w1):
        raise ValueError(
            "nonzero inertia at the first iteration requires w0 == w1"
        )

    trace = SolveTrace()
    state = IdrState(k=0, w_prev=w0, w=w1)
    dw_sq_sum = 0.0
    for k in range(1, max_iters + 1):
        w_cur = state.w
        state = idr_step(state, A, B, gamma, params.alpha_at(k), params.lambda_at(k))
        dw = float(np.linalg.norm(state.w - w_cur))
        vy = float(np.linalg.norm(state.v - state.y))
        dw_sq_sum += dw * dw
        trace.append(TraceRow(
            k,
            feas_residual=vy,
            dw_norm=dw,
            dw_sq_sum=dw_sq_sum,
            vectors={"w": w_cur, "w_next": state.w, "y": state.y, "v": state.v},
        ))
        # the first iteration can be a forced w^2 = w^1 bridge
        if k >= 2 and vy <= tol and dw <= tol:
            trace.converged = True
            break
    trace.final = {"w": state.w, "y": state.y, "v": state.v}
    return trace
