"""Physical configuration and direct evaluation of the secrecy-rate objective
and its power/amplification constraints for any (w, q) pair."""

from dataclasses import dataclass, field

import numpy as np

ACTIVE_SLACK_FACTOR = 1e-6


@dataclass(frozen=True)
class SystemParams:
    """Powers in watts, amplification caps linear, noise powers in watts.

    sigma2_I may be zero (passive-RIS modeling); the receiver noise powers
    must be strictly positive.
    """

    m: int
    n: int
    p_t: float
    p_i: float
    eta: np.ndarray  # per-element amplification caps, length n
    sigma2_B: float
    sigma2_E: float
    sigma2_I: float

    def __post_init__(self):
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if self.p_t <= 0 or self.p_i <= 0:
            raise ValueError("power budgets must be positive")
        if self.eta.shape != (self.n,) or np.any(self.eta <= 0):
            raise ValueError("eta must be a length-n vector of positive caps")
        if self.sigma2_B <= 0 or self.sigma2_E <= 0:
            raise ValueError("receiver noise powers must be positive")
        if self.sigma2_I < 0:
            raise ValueError("RIS noise power must be nonnegative")


@dataclass(frozen=True)
class EffectiveChannels:
    """Combined direct+reflected channels and their noise-normalized variants."""

    h_B: np.ndarray
    h_E: np.ndarray
    htilde_B: np.ndarray
    htilde_E: np.ndarray
    noise_B: float  # sigma_B^2 + |h_IB Q|^2 sigma_I^2
    noise_E: float


def _as_q(q, n):
    q = np.asarray(q, dtype=complex).reshape(-1)
    if q.shape != (n,):
        raise ValueError(f"q must have length {n}")
    return q


def effective_channels(ch, q, params):
    """h_j = h_Aj + h_Ij diag(q) H_AI and htilde_j = h_j / sqrt(noise_j)."""
    q = _as_q(q, params.n)
    h_B = ch.h_AB + (ch.h_IB * q[None, :]) @ ch.H_AI
    h_E = ch.h_AE + (ch.h_IE * q[None, :]) @ ch.H_AI
    noise_B = params.sigma2_B + np.sum(np.abs(ch.h_IB[0] * q) ** 2) * params.sigma2_I
    noise_E = params.sigma2_E + np.sum(np.abs(ch.h_IE[0] * q) ** 2) * params.sigma2_I
    return EffectiveChannels(
        h_B=h_B,
        h_E=h_E,
        htilde_B=h_B / np.sqrt(noise_B),
        htilde_E=h_E / np.sqrt(noise_E),
        noise_B=float(noise_B),
        noise_E=float(noise_E),
    )


def secrecy_rate(ch, w, q, params):
    """Secrecy rate in nats per channel use; unclamped (may be negative)."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    ec = effective_channels(ch, q, params)
    snr_B = abs(ec.h_B[0] @ w) ** 2 / ec.noise_B
    snr_E = abs(ec.h_E[0] @ w) ** 2 / ec.noise_E
    return float(np.log1p(snr_B) - np.log1p(snr_E))


def amplification_power(ch, w, q, params):
    """RIS reflect power |Q H_AI w|^2 + |Q|_F^2 sigma_I^2 actually used."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    q = _as_q(q, params.n)
    signal = np.sum(np.abs(q * (ch.H_AI @ w)) ** 2)
    return float(signal + np.sum(np.abs(q) ** 2) * params.sigma2_I)


@dataclass(frozen=True)
class ConstraintReport:
    """Per-constraint slacks of the joint problem; violations are negative
    slacks, never exceptions."""

    slack_pt: float
    slack_pi: float
    slack_eta: np.ndarray
    active_pt: bool
    active_pi: bool
    active_eta: np.ndarray = field(default=None)

    @property
    def feasible(self):
        return bool(
            self.slack_pt >= -1e-7 * max(1.0, abs(self.slack_pt))
            and self.slack_pi >= -1e-7
            and np.all(self.slack_eta >= -1e-7 * np.maximum(1.0, np.abs(self.slack_eta)))
        )

    def min_relative_slack(self, params):
        rel = [self.slack_pt / params.p_t, self.slack_pi / params.p_i]
        rel += list(self.slack_eta / params.eta)
        return float(min(rel))


def audit_constraints(ch, w, q, params):
    """Slacks of transmit power, RIS amplification power, and per-element caps.

    A constraint is flagged active when its slack is within
    ACTIVE_SLACK_FACTOR of the constraint scale.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    q = _as_q(q, params.n)
    slack_pt = params.p_t - float(np.sum(np.abs(w) ** 2))
    slack_pi = params.p_i - amplification_power(ch, w, q, params)
    slack_eta = params.eta - np.abs(q)
    return ConstraintReport(
        slack_pt=slack_pt,
        slack_pi=slack_pi,
        slack_eta=slack_eta,
        active_pt=slack_pt <= ACTIVE_SLACK_FACTOR * params.p_t,
        active_pi=slack_pi <= ACTIVE_SLACK_FACTOR * params.p_i,
        active_eta=slack_eta <= ACTIVE_SLACK_FACTOR * params.eta,
    )
