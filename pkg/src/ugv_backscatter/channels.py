"""Seeded Rayleigh-fading channel draws.

Every coefficient is CN(0, 1). Each (trial, link, cell, tag) gets its own
Philox stream derived from the master seed, so a draw does not depend on the
order in which trials or cells are generated, and longer antenna arrays
extend shorter ones (the first L entries of an L' > L draw coincide).
"""

from __future__ import annotations

import numpy as np

from .model import ChannelSet, HexPlan, ScenarioConfig

__all__ = ["sample_channels", "complex_normal", "dump_channels", "load_channels"]

_TAG, _READER, _SELF = 0, 1, 2


def _stream(seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Draw CN(0, 1) samples with independent N(0, 1/2) real and imaginary parts."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def sample_channels(
    seed: int,
    plan: HexPlan,
    config: ScenarioConfig,
    mode: str = "hd",
    trial: int = 0,
    si_scale: float = 1.0,
) -> ChannelSet:
    """Draw all fading coefficients of one Monte-Carlo trial.

    In half-duplex mode ``f`` and ``h`` have length L and no self-interference
    matrix is drawn. In full-duplex mode ``f`` has length L_T, ``h`` length
    L_R and ``q_si`` is L_R x L_T, scaled by ``si_scale``.
    """
    if mode == "hd":
        lt = lr = config.antennas
    elif mode == "fd":
        if config.antennas % 2:
            raise ValueError("full-duplex mode needs an even number of antennas")
        lt, lr = config.antenna_split("fd")
    else:
        raise ValueError(f"unknown mode {mode!r}")

    M, I = plan.cells, plan.tags_per_cell
    g = np.empty((M, I), dtype=complex)
    f = np.empty((M, I, lt), dtype=complex)
    h = np.empty((M, lr), dtype=complex)
    for m in range(M):
        for i in range(I):
            rng = _stream(seed, trial, _TAG, m, i)
            g[m, i] = complex_normal(rng, 1)[0]
            f[m, i] = complex_normal(rng, lt)
        h[m] = complex_normal(_stream(seed, trial, _READER, m, 0), lr)

    q_si = None
    if mode == "fd":
        rng = _stream(seed, trial, _SELF, 0, 0)
        q_si = si_scale * complex_normal(rng, (lr, lt))
    return ChannelSet(g=g, f=f, h=h, q_si=q_si)


def dump_channels(channels: ChannelSet, path) -> None:
    """Write a channel draw to a ``.npz`` file for regression comparisons."""
    arrays = {"g": channels.g, "f": channels.f, "h": channels.h}
    if channels.q_si is not None:
        arrays["q_si"] = channels.q_si
    np.savez(path, **arrays)


def load_channels(path) -> ChannelSet:
    with np.load(path) as data:
        return ChannelSet(
            g=data["g"],
            f=data["f"],
            h=data["h"],
            q_si=data["q_si"] if "q_si" in data.files else None,
        )
