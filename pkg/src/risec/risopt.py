"""Reflection step: given the beamformer, optimize the RIS coefficients.

The coefficient vector is lifted to an (n+1)x(n+1) PSD matrix with a pinned
unit corner; the objective is a difference of log-traces.  The two concave
subtracted logs are linearized at the current anchor (a tangent minorizer),
and the resulting convex problem is solved per iteration of a
minorize-maximize loop.  Rank-1 solutions are recovered with the same
penalty machinery as the beamformer step.
"""

from dataclasses import dataclass, field

import numpy as np

from risec import conic
from risec.beamopt import PenaltyConfig
from risec.numerics import max_eigenpair, rank_one_gap


@dataclass(frozen=True)
class LiftedRisMatrices:
    """Quadratic-form matrices of the lifted reflection subproblem."""

    H_A: np.ndarray  # RIS amplification power
    H_AB: np.ndarray  # signal+noise at Bob
    H_AE: np.ndarray  # signal+noise at Eve
    H_IB: np.ndarray  # noise-only at Bob
    H_IE: np.ndarray  # noise-only at Eve
    tau_B: float
    tau_E: float


@dataclass
class MmConfig:
    eps3: float = 1e-3
    max_iters: int = 50
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    unit_modulus: bool = False
    ris_power: bool = True


@dataclass
class MmTraceRow:
    iteration: int
    objective: float  # C value after the accepted iterate
    rank_gap: float
    inner_iterations: int


@dataclass
class MmResult:
    q: np.ndarray
    v: np.ndarray
    V: np.ndarray
    objective: float
    trace: list = field(default_factory=list)
    iterations: int = 0
    status: str = "ok"


def _lift_blocks(a, b, Hbar, tau):
    """[[a a^H + Hbar, a b*], [b a^H, tau]] as a Hermitian (n+1)^2 matrix."""
    n = a.shape[0]
    M = np.zeros((n + 1, n + 1), dtype=complex)
    M[:n, :n] = np.outer(a, a.conj()) + Hbar
    M[:n, n] = a * np.conj(b)
    M[n, :n] = np.conj(M[:n, n])
    M[n, n] = tau
    return M


def build_lifted(ch, w, params):
    """Assemble the lifted quadratic-form matrices for a fixed beamformer."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    n = params.n
    s2i = params.sigma2_I
    Hw = ch.H_AI @ w  # n-vector

    H_A = np.zeros((n + 1, n + 1), dtype=complex)
    H_A[:n, :n] = np.diag(np.abs(Hw) ** 2) + s2i * np.eye(n)

    out = {}
    for j, h_Ij, h_Aj, s2j in (
        ("B", ch.h_IB[0], ch.h_AB[0], params.sigma2_B),
        ("E", ch.h_IE[0], ch.h_AE[0], params.sigma2_E),
    ):
        Hbar = s2i * np.diag(np.abs(h_Ij) ** 2)
        a = h_Ij * Hw  # diag(h_Ij) H_AI w
        b = complex(h_Aj @ w)
        tau = s2j + abs(b) ** 2
        out["H_A" + j] = _lift_blocks(a, b, Hbar, tau)
        H_I = np.zeros((n + 1, n + 1), dtype=complex)
        H_I[:n, :n] = Hbar
        H_I[n, n] = s2j
        out["H_I" + j] = H_I
        out["tau_" + j] = tau

    return LiftedRisMatrices(
        H_A=H_A,
        H_AB=out["H_AB"],
        H_AE=out["H_AE"],
        H_IB=out["H_IB"],
        H_IE=out["H_IE"],
        tau_B=out["tau_B"],
        tau_E=out["tau_E"],
    )


def lift_vector(v):
    """Rank-1 lift [v;1][v;1]^H of a coefficient vector."""
    x = np.concatenate([np.asarray(v, dtype=complex).reshape(-1), [1.0]])
    return np.outer(x, x.conj())


def _tr(M, V):
    return float(np.real(np.trace(M @ V)))


def rate_value(V, M):
    """Objective of the lifted problem: difference of Bob's and Eve's
    log-trace rates."""
    return (
        np.log(_tr(M.H_AB, V))
        - np.log(_tr(M.H_IB, V))
        - np.log(_tr(M.H_AE, V))
        + np.log(_tr(M.H_IE, V))
    )


def surrogate_value(V, V_anchor, M):
    """Tangent minorizer of rate_value at V_anchor (the two subtracted
    concave logs are linearized)."""
    t_ib = _tr(M.H_IB, V_anchor)
    t_ae = _tr(M.H_AE, V_anchor)
    return (
        np.log(_tr(M.H_AB, V))
        + np.log(_tr(M.H_IE, V))
        - np.log(t_ib)
        - _tr(M.H_IB, V - V_anchor) / t_ib
        - np.log(t_ae)
        - _tr(M.H_AE, V - V_anchor) / t_ae
    )


@dataclass
class _Scaled:
    """Problem data in the diag-scaled variable X with V = D X D."""

    D: np.ndarray
    M: LiftedRisMatrices
    log_ab: np.ndarray
    log_ie: np.ndarray
    lin: np.ndarray
    power: np.ndarray = None

    def to_v(self, X):
        return self.D @ X @ self.D

    def to_x(self, V):
        Di = np.diag(1.0 / np.diag(self.D))
        return Di @ V @ Di


def _scaled_problem(M, anchor_V, params, cfg):
    """Build the convex surrogate problem in the scaled variable."""
    n = params.n
    d = np.ones(n + 1)
    if not cfg.unit_modulus:
        d[:n] = params.eta
    D = np.diag(d)
    s_ab = _tr(M.H_AB, anchor_V)
    s_ie = _tr(M.H_IE, anchor_V)
    lin = -(M.H_IB / _tr(M.H_IB, anchor_V) + M.H_AE / _tr(M.H_AE, anchor_V))
    sc = _Scaled(
        D=D,
        M=M,
        log_ab=D @ (M.H_AB / s_ab) @ D,
        log_ie=D @ (M.H_IE / s_ie) @ D,
        lin=D @ lin @ D,
        power=(D @ M.H_A @ D) / params.p_i if cfg.ris_power else None,
    )
    return sc


def _conic_from_scaled(sc, params, cfg, extra_lin=None):
    n = params.n
    lin = sc.lin if extra_lin is None else sc.lin + extra_lin
    cons = []
    if sc.power is not None:
        cons.append(conic.TraceConstraint([sc.power], "<=", 1.0))
    if cfg.unit_modulus:
        pins = {i: 1.0 for i in range(n + 1)}
        bounds = None
    else:
        pins = {n: 1.0}
        bounds = {i: 1.0 for i in range(n)}
    return conic.ConicProblem(
        blocks=[n + 1],
        linear=[lin],
        logs=[conic.LogTerm(1.0, [sc.log_ab]), conic.LogTerm(1.0, [sc.log_ie])],
        constraints=cons,
        diag_bounds=[bounds],
        diag_pins=[pins],
    )


def _recover_rank_one_v(V, sc, params, cfg, options=None):
    """Penalty loop in the lifted space; keeps the surrogate objective's
    constraints and drives tr(V) - lambda_max(V) to the target."""
    pcfg = cfg.penalty
    p = pcfg.p0
    status = "ok"
    inner = 0
    for _ in range(pcfg.max_inner):
        gap = rank_one_gap(V)
        if gap <= pcfg.eps1:
            break
        _, u = max_eigenpair(V)
        pen = -p * sc.D @ (np.eye(params.n + 1) - np.outer(u, u.conj())) @ sc.D
        try:
            sol = conic.solve(_conic_from_scaled(sc, params, cfg, extra_lin=pen), options)
        except conic.ConicSolverError:
            # large penalty weights can defeat the backend; keep the last
            # feasible iterate rather than aborting the whole step
            status = "solver-failure"
            break
        inner += 1
        if sol.status == conic.STATUS_INFEASIBLE:
            status = "infeasible"
            break
        V_new = sc.to_v(sol.blocks[0])
        if np.linalg.norm(V_new - V) <= pcfg.eps2 * max(1.0, np.linalg.norm(V)):
            p *= pcfg.growth
            if p > pcfg.p_cap:
                status = "penalty-cap"
                break
            continue
        V = V_new
    else:
        status = "max-inner"
    return V, status, inner


def extract_coefficients(V, params, unit_modulus=False):
    """Reflection vector from the top eigenpair of the lifted matrix."""
    n = params.n
    lam, u = max_eigenpair(V)
    x = u * np.sqrt(max(lam, 0.0))
    if abs(x[n]) < 1e-9:
        raise ValueError("degenerate lifted solution: vanishing corner entry")
    v = x[:n] / x[n]
    mag = np.abs(v)
    if unit_modulus:
        v = np.where(mag > 0, v / np.maximum(mag, 1e-300), 1.0)
    else:
        over = mag > params.eta
        if np.any(over):
            v = np.where(over, v * (params.eta / np.maximum(mag, 1e-300)), v)
    return np.conj(v)


def mm_optimize(ch, w, params, v_init, config=None, options=None):
    """Minorize-maximize loop over the lifted reflection matrix.

    Each iteration solves the convex surrogate problem at the current anchor,
    recovers a rank-1 iterate, and accepts it only if the true objective did
    not decrease; terminates when the gain drops below the target accuracy.
    """
    cfg = config or MmConfig()
    v = np.asarray(v_init, dtype=complex).reshape(-1)
    M = build_lifted(ch, w, params)
    V = lift_vector(v)
    c_prev = rate_value(V, M)
    trace = [MmTraceRow(iteration=0, objective=c_prev, rank_gap=0.0, inner_iterations=0)]
    status = "ok"
    k = 0
    for k in range(1, cfg.max_iters + 1):
        sc = _scaled_problem(M, V, params, cfg)
        try:
            sol = conic.solve(_conic_from_scaled(sc, params, cfg), options)
        except conic.ConicSolverError:
            if k == 1:
                raise
            status = "solver-failure"
            k -= 1
            break
        if sol.status == conic.STATUS_INFEASIBLE:
            status = "infeasible"
            break
        V_cand = sc.to_v(sol.blocks[0])
        V_cand, rec_status, inner = _recover_rank_one_v(V_cand, sc, params, cfg, options)
        gap = rank_one_gap(V_cand)
        c_new = rate_value(V_cand, M)
        if c_new < c_prev - 1e-12:
            # rank-1 recovery undercut the anchor; keep the previous iterate
            status = "recovery-regression" if rec_status == "ok" else rec_status
            k -= 1
            break
        V = V_cand
        trace.append(MmTraceRow(iteration=k, objective=c_new, rank_gap=gap, inner_iterations=inner))
        if abs(c_new - c_prev) <= cfg.eps3:
            c_prev = c_new
            break
        c_prev = c_new
    else:
        status = "max-iterations"

    q = extract_coefficients(V, params, unit_modulus=cfg.unit_modulus)
    return MmResult(
        q=q,
        v=np.conj(q),
        V=V,
        objective=c_prev,
        trace=trace,
        iterations=k,
        status=status,
    )
