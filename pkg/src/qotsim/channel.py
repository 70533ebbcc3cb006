"""Idealized BB84 photon channel.

A classical bit is encoded in one of two conjugate polarization bases.
Measuring in the emission basis reproduces the bit exactly (the channel is
noiseless); measuring in the other basis yields an unbiased coin.  Photons
are classical records with a consumed flag: each admits exactly one
measurement, and a second measurement is a hard error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Basis(Enum):
    """Photon polarization basis: rectilinear (H/V) or diagonal (+/-45 deg)."""

    RECTILINEAR = 0
    DIAGONAL = 1

    @classmethod
    def from_bit(cls, b: int) -> "Basis":
        return cls(int(b))


class PhotonReuseError(RuntimeError):
    """Raised when a photon is measured more than once (simulator misuse)."""


@dataclass
class Photon:
    """A single polarized photon in transit: the encoded bit and its basis."""

    bit: int
    basis: Basis
    _consumed: bool = field(default=False, repr=False, compare=False)


class RandomSource:
    """Deterministic random source with named, non-overlapping sub-streams.

    The same (seed, stream path) always yields the same draws.  Distinct
    names derive statistically independent streams (a keyed-hash chain over
    the path feeds a counter-based generator), so parallel trials can each
    own one stream without any coordination.  A single stream must not be
    shared across concurrent consumers.
    """

    __slots__ = ("seed", "_digest", "_gen")

    def __init__(self, seed: int, _digest: bytes | None = None):
        self.seed = int(seed)
        if _digest is None:
            _digest = hashlib.blake2b(
                self.seed.to_bytes(8, "little", signed=True), digest_size=16
            ).digest()
        self._digest = _digest
        self._gen = None

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            key = np.frombuffer(self._digest, dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def stream(self, name: str) -> "RandomSource":
        """Derive an independent named sub-stream."""
        digest = hashlib.blake2b(
            name.encode("utf-8"), digest_size=16, key=self._digest
        ).digest()
        return RandomSource(self.seed, digest)

    def bit(self) -> int:
        """One fair coin flip."""
        return int(self.gen.integers(0, 2))

    def bits(self, count: int) -> np.ndarray:
        """`count` fair coin flips as a uint8 array.

        Drawn at the generator's native width so a batch of `count` consumes
        the stream exactly as `count` calls to :meth:`bit` would.
        """
        return self.gen.integers(0, 2, size=count).astype(np.uint8)


def random_bit(rng: RandomSource) -> int:
    """Fair coin: 0 or 1 with probability 1/2 each."""
    return rng.bit()


def encode(r: int, basis: Basis) -> Photon:
    """Encode bit `r` as a photon polarized in `basis`."""
    if r not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {r!r}")
    return Photon(bit=int(r), basis=basis)


def measure(photon: Photon, basis: Basis, rng: RandomSource) -> int:
    """Measure a photon in `basis`, consuming it.

    Matching basis reproduces the encoded bit; a mismatched basis yields an
    uncorrelated fair coin.  Measuring a photon twice raises
    :class:`PhotonReuseError`.
    """
    if photon._consumed:
        raise PhotonReuseError("photon already measured")
    photon._consumed = True
    if basis is photon.basis:
        return photon.bit
    return rng.bit()


def transmit_batch(
    bits: np.ndarray,
    bases_sender: np.ndarray,
    bases_receiver: np.ndarray,
    rng: RandomSource,
    flip_prob: float = 0.0,
) -> np.ndarray:
    """Vectorized send/measure of a batch of photons.

    Bases are given as 0/1 arrays (0 = rectilinear, 1 = diagonal).  One
    random bit is drawn per basis mismatch, in index order, so the result is
    draw-for-draw identical to a scalar loop over :func:`measure` with the
    same stream.  `flip_prob` is a noise hook (per-photon flip probability);
    it defaults to 0, matching the noiseless-channel assumption.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    bases_sender = np.asarray(bases_sender, dtype=np.uint8)
    bases_receiver = np.asarray(bases_receiver, dtype=np.uint8)
    out = bits.copy()
    mismatch = bases_sender != bases_receiver
    k = int(mismatch.sum())
    if k:
        out[mismatch] = rng.bits(k)
    if flip_prob > 0.0:
        flips = rng.gen.random(out.shape[0]) < flip_prob
        out ^= flips.astype(np.uint8)
    return out
