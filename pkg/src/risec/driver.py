"""Outer alternating-optimization loop and the comparison baselines.

The beamformer step is globally optimal for fixed reflection coefficients
and the reflection step is monotone from its anchor, so the secrecy-rate
trace is non-decreasing; the loop stops when the per-iteration gain drops
below the target accuracy.
"""

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from risec import beamopt, risopt
from risec.system import secrecy_rate


@dataclass
class AoConfig:
    eps_ao: float = 1e-3
    max_outer: int = 30
    penalty: beamopt.PenaltyConfig = field(default_factory=beamopt.PenaltyConfig)
    eps_mm: float = 1e-3
    max_mm: int = 50


@dataclass
class AoResult:
    w: np.ndarray
    q: np.ndarray
    sr: float  # raw (unclamped) secrecy rate, nats
    sr_trace: list
    w_traces: list  # one penalty trace per outer iteration
    q_traces: list  # one MM trace per outer iteration
    status: str
    outer_iters: int
    mm_iterations: list = field(default_factory=list)
    w_steps: list = field(default_factory=list)  # BeamStepResult per outer iteration
    q_steps: list = field(default_factory=list)  # MmResult per outer iteration

    @property
    def operational_sr(self):
        return max(self.sr, 0.0)


def alternating_optimize(ch, params, config=None, passive=False, options=None):
    """Alternate the beamformer and reflection steps from (w=0, Q=I).

    With ``passive=True`` the reflection step enforces exact unit modulus and
    drops the RIS power budget (the caller is expected to pass params with
    sigma2_I = 0 for the passive model).
    """
    config = config or AoConfig()
    n = params.n
    w = np.zeros(params.m, dtype=complex)
    q = np.ones(n, dtype=complex)
    sr = secrecy_rate(ch, w, q, params)  # identically 0 at w = 0
    sr_trace = []
    w_traces = []
    q_traces = []
    mm_iters = []
    w_steps = []
    q_steps = []
    status = "iteration-capped"
    mm_cfg = risopt.MmConfig(
        eps3=config.eps_mm,
        max_iters=config.max_mm,
        penalty=config.penalty,
        unit_modulus=passive,
        ris_power=not passive,
    )

    for it in range(1, config.max_outer + 1):
        try:
            wres = beamopt.optimize_beamformer(
                ch, q, params, config.penalty, options, ris_power=not passive
            )
        except beamopt.InfeasibleReflectError:
            status = "subproblem-failure"
            break
        w_traces.append(wres.trace)
        w_steps.append(wres)
        w_cand = wres.w
        if secrecy_rate(ch, w_cand, q, params) >= sr:
            w = w_cand

        mm = risopt.mm_optimize(ch, w, params, np.conj(q), mm_cfg, options)
        q_traces.append(mm.trace)
        q_steps.append(mm)
        mm_iters.append(mm.iterations)
        if secrecy_rate(ch, w, mm.q, params) >= secrecy_rate(ch, w, q, params):
            q = mm.q

        sr_new = secrecy_rate(ch, w, q, params)
        sr_trace.append(sr_new)
        gain = sr_new - sr
        sr = sr_new
        if it > 1 and gain <= config.eps_ao:
            status = "converged"
            break

    return AoResult(
        w=w,
        q=q,
        sr=sr,
        sr_trace=sr_trace,
        w_traces=w_traces,
        q_traces=q_traces,
        status=status,
        outer_iters=len(sr_trace),
        mm_iterations=mm_iters,
        w_steps=w_steps,
        q_steps=q_steps,
    )


def passive_baseline(ch, params, config=None, options=None):
    """Passive-RIS comparison: no RIS noise injection, exact unit modulus,
    no reflect-power budget; rebuilt from this artifact's own machinery."""
    params_p = replace(
        params, sigma2_I=0.0, eta=np.ones(params.n)
    )
    return alternating_optimize(ch, params_p, config, passive=True, options=options)


def no_ris_baseline(ch, params):
    """Closed-form optimum without the RIS: full-power transmission along the
    principal generalized eigenvector of the two rank-1-loaded channel
    matrices; returns (w, sr)."""
    m = params.m
    A = np.eye(m) + params.p_t * np.outer(ch.h_AB[0].conj(), ch.h_AB[0]) / params.sigma2_B
    B = np.eye(m) + params.p_t * np.outer(ch.h_AE[0].conj(), ch.h_AE[0]) / params.sigma2_E
    vals, vecs = scipy.linalg.eigh(A, B)
    u = vecs[:, -1]
    u = u / np.linalg.norm(u)
    w = np.sqrt(params.p_t) * u
    sr = secrecy_rate(ch, w, np.zeros(params.n), params)
    return w, sr
