"""BEC and binary-input AWGN simulation producing channel LLRs.

Sign convention: positive LLR favors bit 0 / symbol +1.  BEC LLRs take only
the values {0, +LLR_MAX, -LLR_MAX}; LLR_MAX stands in for +/- infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeds import make_rng

LLR_MAX = 40.0

BEC = "bec"
BIAWGN = "biawgn"


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    param: float          # erasure probability for BEC, Eb/N0 in dB for BiAWGN
    rate: float | None = None

    def __post_init__(self):
        if self.kind not in (BEC, BIAWGN):
            raise ChannelError(f"unknown channel kind {self.kind!r}")
        if self.kind == BEC and not (0.0 <= self.param <= 1.0):
            raise ChannelError(f"erasure probability {self.param} outside [0, 1]")
        if self.kind == BIAWGN:
            if self.rate is None:
                raise ChannelError("BiAWGN channel needs the code rate to map Eb/N0")
            if not (0.0 < self.rate < 1.0):
                raise ChannelError(f"rate {self.rate} outside (0, 1)")


def bec(epsilon: float) -> ChannelSpec:
    return ChannelSpec(BEC, epsilon)


def biawgn(ebn0_db: float, rate: float) -> ChannelSpec:
    return ChannelSpec(BIAWGN, ebn0_db, rate)


def parse_channel(text: str, rate: float | None = None) -> ChannelSpec:
    """Parse 'bec:0.25' or 'awgn:2.0' (Eb/N0 dB; needs rate)."""
    kind, sep, param = text.partition(":")
    if not sep:
        raise ChannelError(f"channel spec {text!r} must look like 'bec:0.25' or 'awgn:2.0'")
    kind = kind.strip().lower()
    value = float(param)
    if kind == "bec":
        return bec(value)
    if kind in ("awgn", "biawgn"):
        if rate is None:
            raise ChannelError("awgn channel needs a code rate (pass rate=...)")
        return biawgn(value, rate)
    raise ChannelError(f"unknown channel kind {kind!r}")


def noise_variance(spec: ChannelSpec) -> float:
    """sigma_n^2 of the real AWGN for unit-energy BPSK at the spec's Eb/N0."""
    if spec.kind != BIAWGN:
        raise ChannelError("noise_variance is only defined for BiAWGN")
    return 1.0 / (2.0 * spec.rate * 10.0 ** (spec.param / 10.0))


def channel_llr_sigma(spec: ChannelSpec) -> float:
    """Standard deviation of the channel LLR for BiAWGN: sqrt(8 R Eb/N0)."""
    if spec.kind != BIAWGN:
        raise ChannelError("channel_llr_sigma is only defined for BiAWGN")
    return math.sqrt(8.0 * spec.rate * 10.0 ** (spec.param / 10.0))


def transmit(symbols: np.ndarray, spec: ChannelSpec, seed) -> np.ndarray:
    """Send +/-1 symbols through the channel, return per-position LLRs."""
    x = np.asarray(symbols, dtype=np.float64)
    if x.size and not np.all(np.abs(x) == 1.0):
        raise ChannelError("symbols must be +/-1")
    rng = make_rng(seed)
    if spec.kind == BEC:
        erased = rng.random(x.size) < spec.param
        return np.where(erased, 0.0, x * LLR_MAX)
    sigma2 = noise_variance(spec)
    y = x + rng.normal(0.0, math.sqrt(sigma2), x.size)
    return np.clip(2.0 * y / sigma2, -LLR_MAX, LLR_MAX)


def channel_mi(spec: ChannelSpec) -> float:
    """Mutual information between a transmitted bit and its channel LLR."""
    if spec.kind == BEC:
        return 1.0 - spec.param
    from .analytic import j_function
    return float(j_function(channel_llr_sigma(spec)))
