"""Weak bit commitment as an ideal functionality.

Commitments live in a session ledger: the receiver's view of an unopened
commitment is its id only, so hiding is perfect by construction, and honest
unveils always return the committed value (perfect binding).  Weakness is
injected solely through :class:`CheatModel`: a forged unveil goes undetected
with probability `p` and is rejected otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import RandomSource


class DoubleUnveilError(RuntimeError):
    """Raised when a commitment is unveiled more than once."""


@dataclass(frozen=True)
class CheatModel:
    """Probability p in (0,1) that a forged unveil goes undetected."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"cheat probability must be in (0,1), got {self.p}")


@dataclass
class CommitmentHandle:
    """Receiver-visible reference to one commitment: an id and an opened flag."""

    id: int
    opened: bool = field(default=False)

    def __repr__(self) -> str:  # never leak the committed value
        return f"CommitmentHandle(id={self.id}, opened={self.opened})"


class CommitmentSession:
    """Single-writer ledger of commitments for one protocol session."""

    def __init__(self):
        self._values = np.empty(0, dtype=np.uint8)
        self._opened = np.empty(0, dtype=bool)

    def __len__(self) -> int:
        return self._values.shape[0]

    def commit(self, value: int) -> CommitmentHandle:
        """Commit a bit; returns a fresh handle revealing nothing about it."""
        if value not in (0, 1):
            raise ValueError(f"committed value must be 0 or 1, got {value!r}")
        self.commit_many(np.array([value], dtype=np.uint8))
        return CommitmentHandle(id=len(self) - 1)

    def commit_many(self, values: np.ndarray) -> np.ndarray:
        """Bulk commit; returns the array of fresh ids."""
        vals = np.asarray(values, dtype=np.uint8)
        base = len(self)
        self._values = np.concatenate([self._values, vals])
        self._opened = np.concatenate([self._opened, np.zeros(vals.shape[0], bool)])
        return np.arange(base, base + vals.shape[0])

    def _open(self, cid: int) -> int:
        if self._opened[cid]:
            raise DoubleUnveilError(f"commitment {cid} already unveiled")
        self._opened[cid] = True
        return int(self._values[cid])

    def unveil(self, handle: CommitmentHandle) -> tuple[int, bool]:
        """Honest unveil: returns (committed value, accepted=True)."""
        value = self._open(handle.id)
        handle.opened = True
        return value, True

    def unveil_id(self, cid: int) -> int:
        """Honest unveil by ledger id."""
        return self._open(int(cid))

    def unveil_many(self, cids: np.ndarray) -> np.ndarray:
        """Bulk honest unveil by ledger ids."""
        cids = np.asarray(cids, dtype=np.int64)
        if self._opened[cids].any():
            already = cids[self._opened[cids]]
            raise DoubleUnveilError(f"commitments already unveiled: {already.tolist()}")
        self._opened[cids] = True
        return self._values[cids]

    def cheat_unveil(
        self,
        handle: CommitmentHandle,
        forged: int,
        cheat: CheatModel,
        rng: RandomSource,
    ) -> tuple[int, bool]:
        """Forged unveil: accepted with probability `cheat.p`, else rejected.

        Requires `forged` to differ from the committed value (an equal value
        would be an honest unveil).  The commitment is consumed either way.
        """
        committed = self._open(handle.id)
        handle.opened = True
        if int(forged) == committed:
            raise ValueError("forged value equals committed value; use unveil()")
        accepted = rng.gen.random() < cheat.p
        return int(forged), bool(accepted)
