"""Brute-force grid oracle over beamformer direction/power and per-element
reflection amplitude/phase.

Exhaustive search is only tractable for m <= 2, n <= 2; it provides the
independent lower-bound reference the verification suite compares the
optimizer against.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from risec.system import effective_channels

GRID_BUDGET = int(1e8)


class GridBudgetError(ValueError):
    """Requested grid exceeds the point budget."""


@dataclass
class OracleResult:
    sr: float
    w: np.ndarray
    q: np.ndarray
    points: int


def beam_grid(m, p_t, n_dir=24, n_phase=16, n_pow=6):
    """Beamformer candidates: unit directions (global phase fixed) times a
    power ladder ending at full power."""
    if m == 1:
        dirs = np.ones((1, 1), dtype=complex)
    elif m == 2:
        theta = np.linspace(0.0, np.pi / 2.0, n_dir)
        phi = np.linspace(0.0, 2.0 * np.pi, n_phase, endpoint=False)
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        dirs = np.stack(
            [np.cos(tt).ravel(), np.sin(tt).ravel() * np.exp(1j * pp.ravel())], axis=1
        )
    else:
        raise ValueError("beam grid supports m <= 2 only")
    powers = np.linspace(p_t / n_pow, p_t, n_pow)
    W = np.concatenate([dirs * np.sqrt(p) for p in powers], axis=0)
    return W


def reflect_grid(n, amp_max, n_amp=8, n_qphase=16):
    """Per-element amplitude x phase product grid; n = 0 yields the single
    empty (RIS disabled) point."""
    if n == 0:
        return np.zeros((1, 0), dtype=complex)
    amp_max = np.broadcast_to(np.asarray(amp_max, dtype=float), (n,))
    per_elem = []
    for i in range(n):
        if amp_max[i] <= 0:
            per_elem.append(np.array([0.0 + 0.0j]))
            continue
        amps = np.linspace(0.0, amp_max[i], n_amp)
        phases = np.linspace(0.0, 2.0 * np.pi, n_qphase, endpoint=False)
        aa, ph = np.meshgrid(amps, phases, indexing="ij")
        per_elem.append((aa * np.exp(1j * ph)).ravel())
    out = np.array(list(itertools.product(*per_elem)), dtype=complex)
    return out


def grid_search(ch, params, n_dir=24, n_phase=16, n_pow=6, n_amp=8, n_qphase=16,
                amp_max=None, use_ris=True):
    """Best secrecy rate over the full (w, q) product grid, honoring the
    transmit and reflect power budgets."""
    m, n = params.m, params.n
    W = beam_grid(m, params.p_t, n_dir, n_phase, n_pow)
    if use_ris:
        Qg = reflect_grid(n, params.eta if amp_max is None else amp_max, n_amp, n_qphase)
    else:
        Qg = np.zeros((1, n), dtype=complex)
    total = W.shape[0] * Qg.shape[0]
    if total > GRID_BUDGET:
        need = int(np.ceil(total / GRID_BUDGET))
        raise GridBudgetError(
            f"grid has {total} points (budget {GRID_BUDGET}); "
            f"reduce resolutions by about a factor {need}"
        )

    A = ch.H_AI @ W.T  # (n, Nw): H_AI w per beam candidate
    abs_A2 = np.abs(A) ** 2
    best = (-np.inf, None, None)
    for q in Qg:
        ec = effective_channels(ch, q, params)
        amp_used = (np.abs(q[:, None]) ** 2 * abs_A2).sum(axis=0) if n else 0.0
        amp_used = amp_used + np.sum(np.abs(q) ** 2) * params.sigma2_I
        feasible = amp_used <= params.p_i + 1e-12 * params.p_i
        snr_B = np.abs(ec.h_B[0] @ W.T) ** 2 / ec.noise_B
        snr_E = np.abs(ec.h_E[0] @ W.T) ** 2 / ec.noise_E
        sr = np.log1p(snr_B) - np.log1p(snr_E)
        sr = np.where(feasible, sr, -np.inf)
        k = int(np.argmax(sr))
        if sr[k] > best[0]:
            best = (float(sr[k]), W[k].copy(), q.copy())
    return OracleResult(sr=best[0], w=best[1], q=best[2], points=total)
