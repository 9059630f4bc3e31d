"""BPSK over AWGN with LLR output.

LLR convention: positive values favour bit 0. Bit ``b`` maps to the symbol
``1 - 2b`` and the channel LLR is ``2 y / sigma**2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN channel parameters.

    Attributes
    ----------
    ebn0_db : float
        Energy per information bit over noise density, dB.
    rate : float
        Code rate ``K / N`` in (0, 1].
    seed : int
        Base seed; frame ``i`` uses a stream derived from ``(seed, i)``.
    """

    ebn0_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    @property
    def sigma2(self) -> float:
        """Noise variance ``1 / (2 R 10**(EbN0/10))``."""
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))


def frame_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for one frame, keyed by ``(seed, *keys)``.

    The stream depends only on the keys, never on scheduling.
    """
    entropy = [int(seed) & (2**64 - 1)] + [int(k) for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def bpsk(bits: np.ndarray) -> np.ndarray:
    """Map bits to symbols ``1 - 2b``."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def hard_decision(llr: np.ndarray) -> np.ndarray:
    """Bit 1 iff the LLR is strictly negative (zero decides 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def transmit(cw: np.ndarray, cfg: ChannelConfig, frame_index: int = 0, rng: np.random.Generator | None = None) -> np.ndarray:
    """Send a codeword through BPSK/AWGN and return channel LLRs.

    Parameters
    ----------
    cw : numpy.ndarray
        Codeword bits.
    cfg : ChannelConfig
    frame_index : int
        Selects the per-frame noise stream when ``rng`` is not given.
    rng : numpy.random.Generator, optional
        Explicit noise source.
    """
    if rng is None:
        rng = frame_rng(cfg.seed, frame_index)
    sigma2 = cfg.sigma2
    y = bpsk(cw) + rng.standard_normal(np.shape(cw)) * np.sqrt(sigma2)
    return 2.0 * y / sigma2
