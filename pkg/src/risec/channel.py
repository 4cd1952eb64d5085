"""Channel generation: large-scale pathloss times small-scale fading.

Direct links (Alice-Bob, Alice-Eve) are Rayleigh; reflected links
(Alice-RIS, RIS-Bob, RIS-Eve) are Rician mixtures of a deterministic
ULA steering component and a Rayleigh component.  Generation is
deterministic given the seed: each of the five blocks draws from its own
counter-based (Philox) substream, so changing one array size never
perturbs the other blocks.
"""

from dataclasses import dataclass

import numpy as np

# substream ids, one per channel block (do not renumber)
_STREAMS = {"h_AB": 0, "h_AE": 1, "H_AI": 2, "h_IB": 3, "h_IE": 4}


@dataclass(frozen=True)
class ScenarioGeometry:
    """Node positions and propagation parameters (2-D plane, meters)."""

    alice_pos: tuple
    bob_pos: tuple
    eve_pos: tuple
    ris_pos: tuple
    d0: float = 1.0
    beta_db: float = -30.0
    alpha_AB: float = 3.8
    alpha_AE: float = 3.5
    alpha_AI: float = 2.2
    alpha_IB: float = 2.2
    alpha_IE: float = 2.2
    kappa: float = 5.0
    dt_over_lambda: float = 0.5
    dr_over_lambda: float = 0.5

    def __post_init__(self):
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        for name in ("alpha_AB", "alpha_AE", "alpha_AI", "alpha_IB", "alpha_IE"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        pos = [self.alice_pos, self.bob_pos, self.eve_pos, self.ris_pos]
        for i in range(len(pos)):
            for j in range(i + 1, len(pos)):
                if _dist(pos[i], pos[j]) <= 0:
                    raise ValueError("all pairwise node distances must be positive")


@dataclass(frozen=True)
class ChannelSet:
    """The five channel blocks of the wiretap system."""

    h_AB: np.ndarray  # 1 x m
    h_AE: np.ndarray  # 1 x m
    H_AI: np.ndarray  # n x m
    h_IB: np.ndarray  # 1 x n
    h_IE: np.ndarray  # 1 x n

    def __post_init__(self):
        n, m = self.H_AI.shape
        if self.h_AB.shape != (1, m) or self.h_AE.shape != (1, m):
            raise ValueError("direct-link dimensions inconsistent with H_AI")
        if self.h_IB.shape != (1, n) or self.h_IE.shape != (1, n):
            raise ValueError("RIS-link dimensions inconsistent with H_AI")
        for blk in (self.h_AB, self.h_AE, self.H_AI, self.h_IB, self.h_IE):
            if not np.all(np.isfinite(blk)):
                raise ValueError("channel entries must be finite")

    @property
    def m(self):
        return self.H_AI.shape[1]

    @property
    def n(self):
        return self.H_AI.shape[0]


def _dist(a, b):
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def pathloss(d, alpha, geometry):
    """Amplitude-domain pathloss sqrt(beta * (d0/d)^alpha)."""
    if d <= 0:
        raise ValueError("distance must be positive")
    beta_lin = 10.0 ** (geometry.beta_db / 10.0)
    return float(np.sqrt(beta_lin * (geometry.d0 / d) ** alpha))


def steering_vector(count, spacing_over_lambda, angle):
    """ULA response: entry k is exp(j*2*pi*k*spacing*cos(angle)), entry 0 is 1."""
    if count < 1:
        raise ValueError("count must be >= 1")
    k = np.arange(count)
    return np.exp(1j * 2.0 * np.pi * k * spacing_over_lambda * np.cos(angle))


def _substream(seed, name):
    key = (np.uint64(_STREAMS[name]).item() << 64) | (int(seed) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


def _cgauss(rng, shape):
    """Circular complex Gaussian, zero mean, unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def departure_angle(src, dst):
    """Angle of the src->dst direction against the array axis (x-axis)."""
    d = _dist(src, dst)
    return float(np.arccos((dst[0] - src[0]) / d))


def generate_channels(params, geometry, seed):
    """Draw one ChannelSet for (params, geometry); deterministic given seed."""
    m, n = params.m, params.n
    g = geometry

    d_AB = _dist(g.alice_pos, g.bob_pos)
    d_AE = _dist(g.alice_pos, g.eve_pos)
    d_AI = _dist(g.alice_pos, g.ris_pos)
    d_IB = _dist(g.ris_pos, g.bob_pos)
    d_IE = _dist(g.ris_pos, g.eve_pos)

    pl = {
        "h_AB": pathloss(d_AB, g.alpha_AB, g),
        "h_AE": pathloss(d_AE, g.alpha_AE, g),
        "H_AI": pathloss(d_AI, g.alpha_AI, g),
        "h_IB": pathloss(d_IB, g.alpha_IB, g),
        "h_IE": pathloss(d_IE, g.alpha_IE, g),
    }

    # departure angle at Alice toward the RIS, arrival angle at the RIS
    theta_AI = np.arccos((g.ris_pos[0] - g.alice_pos[0]) / d_AI)
    phi_AI = np.pi - theta_AI
    los_AI = np.outer(
        steering_vector(n, g.dr_over_lambda, phi_AI),
        steering_vector(m, g.dt_over_lambda, theta_AI).conj(),
    )
    # LoS rows for the RIS->receiver links: RIS departure angles, RIS spacing
    los_IB = steering_vector(n, g.dr_over_lambda, departure_angle(g.ris_pos, g.bob_pos))
    los_IE = steering_vector(n, g.dr_over_lambda, departure_angle(g.ris_pos, g.eve_pos))

    c_los = np.sqrt(g.kappa / (g.kappa + 1.0))
    c_nlos = np.sqrt(1.0 / (g.kappa + 1.0))

    h_AB = _cgauss(_substream(seed, "h_AB"), (1, m)) * pl["h_AB"]
    h_AE = _cgauss(_substream(seed, "h_AE"), (1, m)) * pl["h_AE"]
    H_AI = (c_los * los_AI + c_nlos * _cgauss(_substream(seed, "H_AI"), (n, m))) * pl["H_AI"]
    h_IB = (c_los * los_IB[None, :] + c_nlos * _cgauss(_substream(seed, "h_IB"), (1, n))) * pl["h_IB"]
    h_IE = (c_los * los_IE[None, :] + c_nlos * _cgauss(_substream(seed, "h_IE"), (1, n))) * pl["h_IE"]

    return ChannelSet(h_AB=h_AB, h_AE=h_AE, H_AI=H_AI, h_IB=h_IB, h_IE=h_IE)
