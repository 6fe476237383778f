"""Single-cell geometry and large-scale channel gains.

The BS sits at the origin. UL users come first in the position array,
DL users after them. All returned gains are linear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig, WeightMode


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def dbm_to_watt(x_dbm):
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """One channel realization of the cell, everything in linear units.

    ``g_cross[i, j]`` is the gain from UL transmitter ``i`` to DL receiver ``j``.
    """

    g_ul: np.ndarray
    g_dl: np.ndarray
    g_cross: np.ndarray
    sigma2: float
    beta: float
    alpha_ul: np.ndarray
    alpha_dl: np.ndarray
    p_max_ul: float
    p_max_dl: float
    sinr_th_ul: float
    sinr_th_dl: float

    def __post_init__(self):
        for name in ("g_ul", "g_dl", "g_cross", "alpha_ul", "alpha_dl"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n_ul, n_dl = self.g_ul.shape[0], self.g_dl.shape[0]
        if self.g_cross.shape != (n_ul, n_dl):
            raise ValueError(f"g_cross must be {n_ul}x{n_dl}, got {self.g_cross.shape}")
        if self.alpha_ul.shape != (n_ul,) or self.alpha_dl.shape != (n_dl,):
            raise ValueError("weight vectors do not match the number of users")
        if not (self.sigma2 > 0 and 0 <= self.beta <= 1):
            raise ValueError("need sigma2 > 0 and 0 <= beta <= 1")

    @property
    def n(self) -> int:
        return self.g_ul.shape[0]

    def __eq__(self, other):
        if not isinstance(other, NetworkInstance):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in self.__dataclass_fields__)

    @classmethod
    def from_gains(cls, g_ul, g_dl, g_cross, *, sigma2, beta, p_max_ul=1.0, p_max_dl=1.0,
                   sinr_th_ul=1.0, sinr_th_dl=1.0, weight_mode=WeightMode.SUM_RATE,
                   alpha_ul=None, alpha_dl=None):
        """Build an instance directly from linear gains (handy for hand-made cases)."""
        g_ul = np.atleast_1d(np.asarray(g_ul, dtype=float))
        g_dl = np.atleast_1d(np.asarray(g_dl, dtype=float))
        if alpha_ul is None:
            alpha_ul, alpha_dl = _weights(WeightMode(weight_mode), g_ul, g_dl)
        return cls(g_ul=g_ul, g_dl=g_dl, g_cross=np.atleast_2d(g_cross), sigma2=float(sigma2),
                   beta=float(beta), alpha_ul=alpha_ul, alpha_dl=alpha_dl,
                   p_max_ul=float(p_max_ul), p_max_dl=float(p_max_dl),
                   sinr_th_ul=float(sinr_th_ul), sinr_th_dl=float(sinr_th_dl))


def place_users(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Drop ``2N`` users uniformly in the annulus ``[min_distance, cell_radius]``.

    Returns an array of shape ``(2N, 2)``; rows ``0..N-1`` are UL users.
    """
    count = 2 * config.n
    r0, r1 = config.min_distance, config.cell_radius
    radius = np.sqrt(rng.uniform(r0 ** 2, r1 ** 2, size=count))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=count)
    pos = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    # guard against rounding just outside the annulus
    norm = np.hypot(pos[:, 0], pos[:, 1])
    scale = np.clip(norm, r0, r1) / norm
    return pos * scale[:, None]


def path_gain_db(distance, los):
    """Urban-micro path gain in dB (negated path loss), distance in meters."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be strictly positive")
    los = np.asarray(los, dtype=bool)
    loss = np.where(los, 34.96 + 22.7 * np.log10(d), 33.36 + 38.35 * np.log10(d))
    return -loss if loss.ndim else float(-loss)


def los_probability(distance):
    """3GPP UMi line-of-sight probability."""
    d = np.asarray(distance, dtype=float)
    return np.minimum(18.0 / d, 1.0) * (1.0 - np.exp(-d / 36.0)) + np.exp(-d / 36.0)


def _link_gains(d, config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    d = np.maximum(d, config.min_distance)
    if config.force_nlos:
        los = np.zeros(d.shape, dtype=bool)
    else:
        los = rng.random(d.shape) < los_probability(d)
    std = np.where(los, config.los_shadow_std, config.nlos_shadow_std)
    shadow = rng.standard_normal(d.shape) * std
    return db_to_linear(path_gain_db(d, los) + shadow)


def _weights(mode: WeightMode, g_ul, g_dl):
    if mode is WeightMode.SUM_RATE:
        return np.ones_like(g_ul), np.ones_like(g_dl)
    return 1.0 / g_ul, 1.0 / g_dl


def build_instance(config: ScenarioConfig, positions: np.ndarray,
                   rng: np.random.Generator) -> NetworkInstance:
    """Draw LOS states and shadowing for every link and assemble the instance."""
    n = config.n
    ul, dl = positions[:n], positions[n:2 * n]
    d_ul = np.hypot(ul[:, 0], ul[:, 1])
    d_dl = np.hypot(dl[:, 0], dl[:, 1])
    d_cross = np.hypot(ul[:, None, 0] - dl[None, :, 0], ul[:, None, 1] - dl[None, :, 1])
    g_ul = _link_gains(d_ul, config, rng)
    g_dl = _link_gains(d_dl, config, rng)
    g_cross = _link_gains(d_cross, config, rng)
    alpha_ul, alpha_dl = _weights(config.weight_mode, g_ul, g_dl)
    return NetworkInstance(
        g_ul=g_ul, g_dl=g_dl, g_cross=g_cross,
        sigma2=float(dbm_to_watt(config.noise_power)),
        beta=float(db_to_linear(config.si_cancellation)),
        alpha_ul=alpha_ul, alpha_dl=alpha_dl,
        p_max_ul=float(dbm_to_watt(config.p_max_ul)),
        p_max_dl=float(dbm_to_watt(config.p_max_dl)),
        sinr_th_ul=float(db_to_linear(config.sinr_target_ul)),
        sinr_th_dl=float(db_to_linear(config.sinr_target_dl)),
    )


def drop_rngs(seed: int, drop_index: int, count: int = 2) -> list[np.random.Generator]:
    """Independent generators for one drop, derived from ``(seed, drop_index)``."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(drop_index,))
    return [np.random.default_rng(child) for child in seq.spawn(count)]
