"""Beamformer step: given the reflection coefficients, solve the transmit
subproblem globally.

The fractional objective is lifted (S = w w^H, rank constraint dropped) and
scaled by the Charnes-Cooper transformation into a linear conic problem over
(S_scaled, t); a rank-1 solution is then recovered with the penalty method,
iterating linearized penalty subproblems on tr(S) - lambda_max(S).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from risec import conic
from risec.numerics import max_eigenpair, rank_one_gap
from risec.system import effective_channels


class InfeasibleReflectError(ValueError):
    """The current reflection matrix already exhausts the RIS power budget
    on noise amplification (P_I - |Q|_F^2 sigma_I^2 <= 0)."""


@dataclass
class PenaltyConfig:
    p0: float = 10.0
    growth: float = 2.0
    eps1: float = 1e-3  # rank-gap target
    eps2: float = 1e-3  # stall tolerance on |S_{k+1} - S_k|_F
    p_cap: float = 1e8
    max_inner: int = 100


@dataclass
class CctState:
    """Scaled covariance and scalar of the transformed fractional problem."""

    S_tilde: np.ndarray
    t: float


@dataclass
class CctContext:
    """Fixed data of one beamformer subproblem instance.

    gain_scale conditions the conic form: the solver works on X = g * S,
    which keeps the channel quadratic forms O(1); solutions are mapped back.
    """

    R_B: np.ndarray  # htilde_B^H htilde_B
    R_E: np.ndarray  # htilde_E^H htilde_E
    A_ris: np.ndarray  # H_AI^H Q^H Q H_AI
    p_t: float
    p_tilde_i: float
    ris_power: bool = True
    gain_scale: float = 1.0


@dataclass
class PenaltyTraceRow:
    iteration: int
    objective: float  # penalized objective being decreased
    rank_gap: float
    p: float


@dataclass
class BeamStepResult:
    w: np.ndarray
    state: CctState
    relaxed_objective: float
    recovered_objective: float
    rank_gap: float
    trace: list = field(default_factory=list)
    status: str = "ok"
    inner_iterations: int = 0


def make_context(ch, q, params, ris_power=True):
    q = np.asarray(q, dtype=complex).reshape(-1)
    ec = effective_channels(ch, q, params)
    p_tilde_i = params.p_i - float(np.sum(np.abs(q) ** 2)) * params.sigma2_I
    if ris_power and p_tilde_i <= 0:
        raise InfeasibleReflectError(
            f"residual RIS power budget is {p_tilde_i:.3e} W"
        )
    QH = q[:, None] * ch.H_AI
    R_B = ec.htilde_B.conj().T @ ec.htilde_B
    R_E = ec.htilde_E.conj().T @ ec.htilde_E
    return CctContext(
        R_B=R_B,
        R_E=R_E,
        A_ris=QH.conj().T @ QH,
        p_t=params.p_t,
        p_tilde_i=p_tilde_i,
        ris_power=ris_power,
        gain_scale=max(1.0, float(np.abs(R_B).max()), float(np.abs(R_E).max())),
    )


def _conic_from_context(ctx, linear_s, scaled=True):
    """Conic form over (X, t) with X = g * S; g = 1 gives the literal form."""
    m = ctx.R_B.shape[0]
    g = ctx.gain_scale if scaled else 1.0
    cons = [
        conic.TraceConstraint([np.eye(m) / g, np.array([[-ctx.p_t]])], "<=", 0.0),
        conic.TraceConstraint([ctx.R_E / g, np.array([[1.0]])], "==", 1.0),
    ]
    if ctx.ris_power:
        cons.insert(
            1,
            conic.TraceConstraint([ctx.A_ris / g, np.array([[-ctx.p_tilde_i]])], "<=", 0.0),
        )
    return conic.ConicProblem(
        blocks=[m, 1],
        linear=[linear_s / g, np.array([[1.0]])],
        constraints=cons,
    )


def _optimum_scale_hint(ctx):
    """Order of magnitude of the fractional optimum: the top generalized
    eigenvalue of the power-loaded channel pencil (reflect-power constraint
    ignored, which only loosens the estimate)."""
    m = ctx.R_B.shape[0]
    A = np.eye(m) + ctx.p_t * ctx.R_B
    B = np.eye(m) + ctx.p_t * ctx.R_E
    return float(scipy.linalg.eigh(A, B, eigvals_only=True)[-1])


def _dinkelbach_step(ctx, linear_s, options):
    """Fractional-programming fallback: instead of the one-shot transformed
    problem, iterate plain linear semidefinite subproblems
    maximize tr((N - lam R_E) S) whose root in lam is the fractional optimum.
    Each subproblem is free of the tiny normalization scalar that conditions
    the transformed form badly when the optimum is huge."""
    m = ctx.R_B.shape[0]
    cons = [conic.TraceConstraint([np.eye(m)], "<=", ctx.p_t)]
    if ctx.ris_power:
        cons.append(conic.TraceConstraint([ctx.A_ris], "<=", ctx.p_tilde_i))
    lam = 1.0
    S = np.zeros((m, m), dtype=complex)
    status = conic.STATUS_MAX_ITERATIONS
    for _ in range(60):
        sol = conic.solve(
            conic.ConicProblem(
                blocks=[m], linear=[linear_s - lam * ctx.R_E], constraints=cons
            ),
            options,
        )
        if sol.status == conic.STATUS_INFEASIBLE or sol.blocks is None:
            break
        S = sol.blocks[0]
        num = 1.0 + float(np.real(np.trace(linear_s @ S)))
        den = 1.0 + float(np.real(np.trace(ctx.R_E @ S)))
        new_lam = num / den
        if abs(new_lam - lam) <= 1e-10 * max(1.0, abs(new_lam)):
            lam = new_lam
            status = conic.STATUS_OPTIMAL
            break
        lam = new_lam
    t = 1.0 / (1.0 + float(np.real(np.trace(ctx.R_E @ S))))
    sol = conic.ConicSolution(
        blocks=[t * S, np.array([[t]])], objective=lam, status=status
    )
    return t * S, t, sol


def _solve_step(ctx, linear_s, options):
    """Solve one conic step and return (S, t, solution) in original units.

    The gain-conjugated form is tried first (without the slow last-resort
    backend); when it cannot be certified, the literal form is retried with
    the objective prescaled by the pencil estimate of the fractional
    optimum, and finally the fractional problem is re-solved directly by
    iterating linear subproblems.
    """
    attempts = (
        (True, None, False),
        (False, 1.0 / max(1.0, _optimum_scale_hint(ctx)), True),
    )
    best = None
    err = None
    for scaled, oscale, fall in attempts:
        try:
            sol = conic.solve(
                _conic_from_context(ctx, linear_s, scaled=scaled),
                options,
                objective_scale=oscale,
                fallback=fall,
            )
        except conic.ConicSolverError as exc:
            err = exc
            continue
        if sol.status == conic.STATUS_INFEASIBLE:
            return None, None, sol
        S = sol.blocks[0] / (ctx.gain_scale if scaled else 1.0)
        t = float(np.real(sol.blocks[1][0, 0]))
        if sol.status == conic.STATUS_OPTIMAL:
            return S, t, sol
        if best is None:
            best = (S, t, sol)
    try:
        S, t, sol = _dinkelbach_step(ctx, linear_s, options)
    except conic.ConicSolverError as exc:
        err = exc
    else:
        if sol.status == conic.STATUS_OPTIMAL:
            return S, t, sol
        if best is None:
            best = (S, t, sol)
    if best is not None:
        return best
    raise err


def build_cct_problem(ch, q, params, ris_power=True):
    """Conic form of the transformed beamformer relaxation: maximize
    t + htilde_B S htilde_B^H over (S, t) with the scaled power constraints
    and the normalization equality."""
    ctx = make_context(ch, q, params, ris_power=ris_power)
    return _conic_from_context(ctx, ctx.R_B, scaled=False)


def recover_rank_one(relaxed, ctx, config=None, options=None):
    """Penalty loop driving tr(S) - lambda_max(S) to zero while keeping all
    constraints of the relaxation; the penalized objective is non-increasing
    for fixed penalty weight.

    Returns (state, trace, status); status is 'ok', 'penalty-cap', or a
    solver status.
    """
    config = config or PenaltyConfig()
    m = ctx.R_B.shape[0]
    S, t = np.asarray(relaxed.S_tilde, dtype=complex), float(relaxed.t)
    p = config.p0
    trace = []
    status = "ok"
    for k in range(config.max_inner):
        gap = rank_one_gap(S)
        obj = -(t + float(np.real(np.trace(ctx.R_B @ S)))) + p * gap
        trace.append(PenaltyTraceRow(iteration=k, objective=obj, rank_gap=gap, p=p))
        if gap <= config.eps1:
            break
        _, u = max_eigenpair(S)
        lin = ctx.R_B - p * (np.eye(m) - np.outer(u, u.conj()))
        try:
            S_new, t_new, sol = _solve_step(ctx, lin, options)
        except conic.ConicSolverError:
            # keep the last feasible iterate if a large penalty weight
            # defeats the backend
            status = "solver-failure"
            break
        if sol.status == conic.STATUS_INFEASIBLE:
            status = "infeasible"
            break
        if np.linalg.norm(S_new - S) <= config.eps2 * max(1.0, np.linalg.norm(S)):
            p *= config.growth
            if p > config.p_cap:
                status = "penalty-cap"
                break
            continue
        if sol.status == conic.STATUS_MAX_ITERATIONS:
            status = conic.STATUS_MAX_ITERATIONS
        S, t = S_new, t_new
    else:
        status = "max-inner"
    return CctState(S_tilde=S, t=t), trace, status


def optimize_beamformer(ch, q, params, config=None, options=None, ris_power=True):
    """Globally solve the beamformer subproblem for fixed reflection
    coefficients and return the recovered rank-1 beamformer."""
    config = config or PenaltyConfig()
    ctx = make_context(ch, q, params, ris_power=ris_power)
    S0, t0, relaxed_sol = _solve_step(ctx, ctx.R_B, options)
    if relaxed_sol.status == conic.STATUS_INFEASIBLE:
        raise InfeasibleReflectError("relaxed beamformer subproblem infeasible")
    relaxed = CctState(S_tilde=S0, t=t0)
    state, trace, status = recover_rank_one(relaxed, ctx, config, options)
    recovered_obj = state.t + float(np.real(np.trace(ctx.R_B @ state.S_tilde)))
    gap = rank_one_gap(state.S_tilde)
    if state.t < 1e-10:
        # degenerate inversion of the fractional transform
        return BeamStepResult(
            w=np.zeros(params.m, dtype=complex),
            state=state,
            relaxed_objective=relaxed_sol.objective,
            recovered_objective=recovered_obj,
            rank_gap=gap,
            trace=trace,
            status="degenerate-t",
            inner_iterations=len(trace),
        )
    S = state.S_tilde / state.t
    lam, u = max_eigenpair(S)
    w = u * np.sqrt(max(lam, 0.0))
    nrm2 = float(np.sum(np.abs(w) ** 2))
    if nrm2 > params.p_t:
        w = w * np.sqrt(params.p_t / nrm2)
    return BeamStepResult(
        w=w,
        state=state,
        relaxed_objective=relaxed_sol.objective,
        recovered_objective=recovered_obj,
        rank_gap=gap,
        trace=trace,
        status=status,
        inner_iterations=len(trace),
    )
