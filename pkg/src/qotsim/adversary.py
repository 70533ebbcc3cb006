"""Dishonest-party strategies probing the protocol's privacy claims.

Each strategy replaces one hook of the honest behavior and leaves the
counterpart fully honest, including all checks.  Information gain is always
recomputed from ground truth (the actual basis matches), never taken from
the adversary's own claims.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import RandomSource
from .commitment import CheatModel, CommitmentSession
from .params import Case, ProtocolParams
from .protocol import (
    ChoiceVector,
    HonestBob,
    InsufficientMatches,
    Status,
    _random_legal_family,
    phase1_transmit,
    phase2_challenge,
    run_protocol,
    CheatDetected,
)

STRATEGY_KINDS = (
    "honest",
    "greedy",
    "dishonest-removal",
    "postpone",
    "commit-cheat",
    "curious-alice",
)


@dataclass(frozen=True)
class Strategy:
    """A named adversary.  `p` is required for commit-cheat; `strict_alice`
    selects the strict removal verifier against dishonest-removal."""

    kind: str
    p: float | None = None
    strict_alice: bool = False

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}; one of {STRATEGY_KINDS}")
        if self.kind == "commit-cheat":
            if self.p is None or not 0.0 < self.p < 1.0:
                raise ValueError("commit-cheat requires p in (0,1)")


@dataclass
class AdversarialOutcome:
    """What one adversarial session achieved."""

    caught: bool
    bits_learned: int
    target_exceeded: bool
    status: Status
    choice_guess: tuple[int, ...] | None = None


class GreedyBob(HonestBob):
    """Follows the protocol but builds one extra all-matching subset when the
    surviving matches allow it, decoding m+1 bits."""

    def build_family(self, state, choices: ChoiceVector, rng: RandomSource):
        extra = min(k for k in range(1, state.params.n + 1) if k not in choices.indices)
        try:
            return _random_legal_family(state, choices.indices + (extra,), rng)
        except InsufficientMatches:
            return _random_legal_family(state, choices.indices, rng)


class DishonestRemovalBob(GreedyBob):
    """Low case only: removes mismatched slots while claiming compliance,
    keeping every basis match available for extra subsets.  Alice's stated
    implication check is vacuous on mismatches, so the literal verifier never
    notices; the strict verifier always does."""

    def removal_pool(self, state, match: np.ndarray) -> np.ndarray:
        if state.params.case is not Case.LOW:
            raise ValueError("dishonest-removal strategy applies to the low case only")
        return ~match


class PostponeBob(HonestBob):
    """Commits to fabricated values without measuring, hoping to measure after
    the bases are announced.  The per-pair challenge catches a basis-matching
    wrong bit with probability 1/4."""

    measures = False


class LeakyBob(HonestBob):
    """Deliberately leaky positive control: deterministic subset placement
    that puts the chosen subsets lexicographically first."""

    def build_family(self, state, choices: ChoiceVector, rng: RandomSource):
        params = state.params
        s = params.subset_size
        alive = np.flatnonzero(~state.removed)
        match = state.match_flags()
        matched = np.sort(alive[match[alive]])
        labels = tuple(sorted(choices.indices))
        if matched.size < len(labels) * s:
            raise InsufficientMatches("not enough matches for leaky placement")
        family: list[np.ndarray | None] = [None] * params.n
        for k, label in enumerate(labels):
            family[label - 1] = matched[k * s:(k + 1) * s]
        used = np.concatenate([family[label - 1] for label in labels])
        rest = np.sort(np.setdiff1d(alive, used))
        others = [k for k in range(params.n) if family[k] is None]
        for j, k in enumerate(others):
            family[k] = rest[j * s:(j + 1) * s]
        return [np.asarray(f) for f in family], labels


_BOB_BEHAVIORS = {
    "honest": HonestBob,
    "greedy": GreedyBob,
    "dishonest-removal": DishonestRemovalBob,
}


def greedy_bob_subsets(state, params: ProtocolParams, choices, rng: RandomSource):
    """Greedy family for an in-flight session, or None if matches fall short."""
    if not isinstance(choices, ChoiceVector):
        choices = ChoiceVector(tuple(choices), n=params.n)
    try:
        return GreedyBob().build_family(state, choices, rng)[0]
    except InsufficientMatches:
        return None


def dishonest_removal(state, params: ProtocolParams, rng: RandomSource) -> np.ndarray:
    """Slots a dishonest-removal Bob would unveil (mismatched, low case)."""
    return np.flatnonzero(DishonestRemovalBob().removal_pool(state, state.match_flags()))


def postpone_bob(params: ProtocolParams, rng: RandomSource) -> AdversarialOutcome:
    """Run phases 1-2 with an unmeasuring Bob; caught iff a challenge fails."""
    rng_a = rng.stream("alice")
    rng_b = rng.stream("bob")
    state = phase1_transmit(params, rng_a, rng_b, bob=PostponeBob())
    try:
        phase2_challenge(state, rng_a)
        caught = False
    except CheatDetected:
        caught = True
    return AdversarialOutcome(
        caught=caught,
        bits_learned=0,
        target_exceeded=False,
        status=Status.ABORT_CHEAT_DETECTED if caught else Status.COMPLETED,
    )


def commit_cheat_bob(params: ProtocolParams, p: float, rng: RandomSource) -> AdversarialOutcome:
    """Forge the (N-x)/n unveils supporting one extra all-matching subset.

    Each forgery is accepted independently with probability p; Bob gains the
    extra bit only if every forgery survives.
    """
    cheat = CheatModel(p)
    session = CommitmentSession()
    forgeries = params.subset_size
    values = rng.bits(forgeries)
    accepted_all = True
    for v in values:
        handle = session.commit(int(v))
        _, accepted = session.cheat_unveil(handle, 1 - int(v), cheat, rng)
        if not accepted:
            accepted_all = False
    return AdversarialOutcome(
        caught=not accepted_all,
        bits_learned=params.m + 1 if accepted_all else params.m,
        target_exceeded=accepted_all,
        status=Status.COMPLETED if accepted_all else Status.ABORT_CHEAT_DETECTED,
    )


def commit_cheat_trials(
    params: ProtocolParams, p: float, trials: int, rng: RandomSource,
    chunk: int = 100_000,
) -> int:
    """Vectorized count of commit-cheat successes over many sessions."""
    CheatModel(p)  # validate
    forgeries = params.subset_size
    successes = 0
    done = 0
    while done < trials:
        rows = min(chunk, trials - done)
        draws = rng.gen.random((rows, forgeries))
        successes += int((draws < p).all(axis=1).sum())
        done += rows
    return successes


def _curious_alice_guess(outcome) -> tuple[int, ...] | None:
    """Guess the choice vector from the announced family alone: the labels of
    the subsets holding the smallest surviving indices.  Under the uniform-
    announcement property this hits the true vector with chance probability."""
    family = outcome.detail.get("family")
    if family is None:
        return None
    m = len(outcome.detail["claimed"])
    order = sorted(range(len(family)), key=lambda k: int(family[k][0]) if len(family[k]) else -1)
    return tuple(sorted(k + 1 for k in order[:m]))


def run_with_adversary(
    strategy: Strategy,
    params: ProtocolParams,
    inputs,
    choices,
    seed,
) -> AdversarialOutcome:
    """Execute one session with the given party replaced by `strategy`."""
    root = seed if isinstance(seed, RandomSource) else RandomSource(int(seed))
    if strategy.kind == "postpone":
        return postpone_bob(params, root)
    if strategy.kind == "commit-cheat":
        return commit_cheat_bob(params, strategy.p, root)

    bob_cls = _BOB_BEHAVIORS.get(strategy.kind, HonestBob)
    outcome = run_protocol(
        params, inputs, choices, root,
        bob=bob_cls(),
        strict_removal=strategy.strict_alice,
    )
    caught = outcome.status is Status.ABORT_CHEAT_DETECTED
    if outcome.status is Status.COMPLETED:
        truly_matching = set(outcome.detail["all_matching_labels"])
        bits_learned = len(set(outcome.detail["claimed"]) & truly_matching)
    else:
        bits_learned = 0
    guess = None
    if strategy.kind == "curious-alice" and outcome.status is Status.COMPLETED:
        guess = _curious_alice_guess(outcome)
    return AdversarialOutcome(
        caught=caught,
        bits_learned=bits_learned,
        target_exceeded=bits_learned > params.m,
        status=outcome.status,
        choice_guess=guess,
    )
