"""Monte Carlo experiments, exact oracles, and bound verdicts.

Every empirical rate is checked two ways: against an exact binomial oracle
(3-sigma tolerance) and against the analytic bounds (a one-sided <= check,
only at N past the threshold where the simplified bound is non-vacuous).
Trials derive per-index RNG streams from the experiment seed, so results are
independent of execution order and reproducible byte-for-byte.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import chi2_contingency

from . import __version__
from .adversary import (
    AdversarialOutcome,
    LeakyBob,
    Strategy,
    commit_cheat_trials,
    run_with_adversary,
)
from .channel import RandomSource
from .params import (
    Case,
    HoeffdingQuery,
    ProtocolParams,
    commitment_attack_bound,
    correctness_epsilon,
    hoeffding_bound,
    min_N,
    privacy_epsilon,
    validate_params,
)
from .protocol import Status, run_protocol

# 99% two-sided normal quantile, for Wilson intervals
_Z99 = 2.5758293035489004


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: parameter set, trial count, seed, strategy, IO modes."""

    n: int
    m: int
    N: int
    trials: int
    seed: int
    strategy: Strategy = Strategy("honest")
    bits: tuple[int, ...] | None = None      # None: fresh random bits per trial
    choices: tuple[int, ...] | None = None   # None: fresh random choices per trial

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class AggregateStats:
    """Order-independent aggregation over the trials of one experiment."""

    trials: int
    strategy: str
    event_name: str
    event_count: int
    event_rate: float
    wilson_low: float
    wilson_high: float
    completed: int
    aborts: dict[str, int]
    wrong_decodes: int
    oracle_rate: float | None = None
    oracle_exact: str | None = None


@dataclass
class Verdict:
    """One pass/fail comparison between an observed value and a reference."""

    criterion: str
    empirical: float
    reference: float
    relation: str  # "within_3sigma" | "le" | "eq"
    passed: bool
    tolerance: float | None = None


def wilson_interval(successes: int, trials: int, z: float = _Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# exact oracles
# ---------------------------------------------------------------------------

def _honest_run_feasible(params: ProtocolParams, matches: int) -> bool:
    """Can an honest Bob with this survivor match count finish the protocol?"""
    if params.case is Case.LOW:
        return matches >= params.x and (matches - params.x) >= params.m * params.subset_size
    return (params.N - matches) >= params.x and matches >= params.m * params.subset_size


def _extra_bit_feasible(params: ProtocolParams, matches: int) -> bool:
    """Can a greedy Bob form m+1 all-matching subsets while complying with removal?"""
    need = (params.m + 1) * params.subset_size
    if params.case is Case.LOW:
        return matches >= params.x + need
    return (params.N - matches) >= params.x and matches >= need


def _dishonest_removal_feasible(params: ProtocolParams, matches: int) -> bool:
    """Low case: Bob removes mismatches instead, keeping all matches for subsets."""
    need = (params.m + 1) * params.subset_size
    return (params.N - matches) >= params.x and matches >= need


_EVENTS = {
    "correctness": lambda p, M: not _honest_run_feasible(p, M),
    "privacy": _extra_bit_feasible,
    "privacy_m_plus_1": _extra_bit_feasible,
    "privacy_dishonest_removal": _dishonest_removal_feasible,
}


def exact_failure_oracle(params: ProtocolParams, event: str = "correctness") -> Fraction:
    """Exact probability of the event under M ~ Binomial(N, 1/2).

    Events: "correctness" (honest Bob cannot finish), "privacy" (a greedy
    Bob can decode m+1 bits), "privacy_dishonest_removal".
    """
    try:
        pred = _EVENTS[event]
    except KeyError:
        raise ValueError(f"unknown event {event!r}; one of {sorted(_EVENTS)}") from None
    N = params.N
    total = Fraction(0)
    for M in range(N + 1):
        if pred(params, M):
            total += Fraction(math.comb(N, M), 2**N)
    return total


def brute_force_failure_probability(params: ProtocolParams, event: str = "correctness") -> Fraction:
    """Independent check of the oracle: enumerate all 2^N basis-coin outcomes.

    Walks every outcome of the N survivor basis-agreement coins, replays the
    eligibility logic per outcome, and counts.  Restricted to N <= 20.
    """
    N = params.N
    if N > 20:
        raise ValueError("brute force enumeration is limited to N <= 20")
    pred = _EVENTS[event]
    masks = np.arange(2**N, dtype=np.uint64)
    match_counts = np.bitwise_count(masks)
    hits = 0
    # predicate depends on the match count only; evaluate once per count,
    # but tally outcome-by-outcome so the enumeration stays the checked route
    by_count = np.array([bool(pred(params, M)) for M in range(N + 1)])
    hits = int(by_count[match_counts].sum())
    return Fraction(hits, 2**N)


# ---------------------------------------------------------------------------
# experiment runner
# ---------------------------------------------------------------------------

def _trial_inputs(config: ExperimentConfig, rng: RandomSource) -> tuple:
    if config.bits is not None:
        bits = config.bits
    else:
        bits = tuple(int(b) for b in rng.stream("inputs").bits(config.n))
    if config.choices is not None:
        choices = config.choices
    else:
        picks = rng.stream("choices").gen.choice(config.n, size=config.m, replace=False)
        choices = tuple(sorted(int(c) + 1 for c in picks))
    return bits, choices


def run_experiment(config: ExperimentConfig) -> AggregateStats:
    """Execute the configured trials and aggregate counts.

    The tracked event is strategy-dependent: honest runs count aborts
    (correctness failures); adversarial runs count successes (postpone Bob's
    "success" is surviving the challenge phase).
    """
    params = validate_params(config.n, config.m, config.N)
    root = RandomSource(config.seed)
    strategy = config.strategy
    aborts: dict[str, int] = {}
    completed = 0
    wrong = 0
    event_count = 0

    if strategy.kind == "commit-cheat":
        event_count = commit_cheat_trials(
            params, strategy.p, config.trials, root.stream("commit-cheat")
        )
        completed = event_count
        event_name = "commit_cheat_success"
    else:
        for k in range(config.trials):
            trial_rng = root.stream(f"trial/{k}")
            bits, choices = _trial_inputs(config, trial_rng)
            proto_rng = trial_rng.stream("protocol")
            if strategy.kind == "honest":
                outcome = run_protocol(params, bits, choices, proto_rng)
                if outcome.status is Status.COMPLETED:
                    completed += 1
                    if any(outcome.recovered[c] != bits[c - 1] for c in choices):
                        wrong += 1
                else:
                    aborts[outcome.status.value] = aborts.get(outcome.status.value, 0) + 1
                    event_count += 1
            else:
                adv = run_with_adversary(strategy, params, bits, choices, proto_rng)
                if adv.status is Status.COMPLETED:
                    completed += 1
                else:
                    aborts[adv.status.value] = aborts.get(adv.status.value, 0) + 1
                if strategy.kind == "postpone":
                    event_count += 0 if adv.caught else 1
                elif strategy.kind == "curious-alice":
                    event_count += 1 if adv.choice_guess == tuple(sorted(choices)) else 0
                else:
                    event_count += 1 if adv.target_exceeded else 0
        event_name = {
            "honest": "abort",
            "postpone": "challenge_survival",
            "curious-alice": "choice_guess_correct",
        }.get(strategy.kind, "extra_bit_success")

    event_count_total = event_count + wrong if strategy.kind == "honest" else event_count
    rate = event_count_total / config.trials
    low, high = wilson_interval(event_count_total, config.trials)
    oracle = _reference_rate(params, strategy)
    return AggregateStats(
        trials=config.trials,
        strategy=strategy.kind,
        event_name=event_name,
        event_count=event_count_total,
        event_rate=rate,
        wilson_low=low,
        wilson_high=high,
        completed=completed,
        aborts=aborts,
        wrong_decodes=wrong,
        oracle_rate=float(oracle) if oracle is not None else None,
        oracle_exact=str(oracle) if isinstance(oracle, Fraction) else None,
    )


def _reference_rate(params: ProtocolParams, strategy: Strategy):
    """Exact predicted rate for the tracked event, where one exists."""
    if strategy.kind == "honest":
        return exact_failure_oracle(params, "correctness")
    if strategy.kind == "greedy":
        return exact_failure_oracle(params, "privacy")
    if strategy.kind == "dishonest-removal":
        return exact_failure_oracle(params, "privacy_dishonest_removal")
    if strategy.kind == "postpone":
        return Fraction(3, 4) ** params.N
    if strategy.kind == "commit-cheat":
        return strategy.p ** params.subset_size
    if strategy.kind == "curious-alice":
        # chance level per completed run, scaled by the completion probability
        completed = 1 - exact_failure_oracle(params, "correctness")
        return completed / math.comb(params.n, params.m)
    return None


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

def check_bounds(stats: AggregateStats, params: ProtocolParams) -> list[Verdict]:
    """Compare empirical rates with the exact oracle (3-sigma) and with the
    analytic bounds (<=, only at N >= the non-vacuity threshold)."""
    verdicts: list[Verdict] = []
    q = stats.oracle_rate
    if q is not None:
        sigma = math.sqrt(q * (1 - q) / stats.trials)
        tol = 3 * sigma
        verdicts.append(
            Verdict(
                criterion=f"{stats.event_name}_rate_within_3sigma_of_oracle",
                empirical=stats.event_rate,
                reference=q,
                relation="within_3sigma",
                passed=abs(stats.event_rate - q) <= tol,
                tolerance=tol,
            )
        )

    if stats.strategy == "honest":
        verdicts.append(
            Verdict(
                criterion="completed_runs_decode_exactly",
                empirical=float(stats.wrong_decodes),
                reference=0.0,
                relation="eq",
                passed=stats.wrong_decodes == 0,
            )
        )
        delta, eps = correctness_epsilon(params.n, params.m)
    elif stats.strategy in ("greedy", "dishonest-removal"):
        delta, eps = privacy_epsilon(params.n, params.m)
    else:
        delta = eps = None

    if delta is not None and q is not None and params.N >= min_N(delta):
        raw = hoeffding_bound(HoeffdingQuery(trials=params.N, deviation=float(delta)))
        verdicts.append(
            Verdict(
                criterion="oracle_le_hoeffding_bound",
                empirical=q,
                reference=min(raw, 1.0),
                relation="le",
                passed=q <= raw,
            )
        )
        verdicts.append(
            Verdict(
                criterion="oracle_le_eps_pow_N",
                empirical=q,
                reference=eps**params.N,
                relation="le",
                passed=q <= eps**params.N,
            )
        )
        verdicts.append(
            Verdict(
                criterion="empirical_le_eps_pow_N",
                empirical=stats.event_rate,
                reference=eps**params.N,
                relation="le",
                passed=stats.event_rate <= eps**params.N,
            )
        )

    if stats.strategy == "commit-cheat" and q is not None:
        # p must be recoverable from the oracle: q = p^subset_size
        p = q ** (1.0 / params.subset_size)
        bound, eps_c = commitment_attack_bound(p, params.n, params.N, params.x)
        verdicts.append(
            Verdict(
                criterion="commitment_bound_lt_eps_pow_N",
                empirical=bound,
                reference=eps_c**params.N,
                relation="le",
                passed=bound < eps_c**params.N,
            )
        )
    return verdicts


# ---------------------------------------------------------------------------
# privacy independence test
# ---------------------------------------------------------------------------

def privacy_independence_test(
    params: ProtocolParams,
    trials_per_choice: int,
    seed: int,
    significance: float = 0.001,
    leaky: bool = False,
) -> dict:
    """Distinguishability test of Alice's view across Bob's choice vectors.

    For every choice vector, runs honest sessions and records which announced
    subset holds the smallest surviving slot (a feature of Alice's view).
    Pairwise chi-square tests at Bonferroni-corrected significance; under the
    uniform-announcement claim all pairs should be indistinguishable.  The
    `leaky` flag swaps in the deterministic positive-control Bob.
    """
    n, m = params.n, params.m
    choice_vectors = list(itertools.combinations(range(1, n + 1), m))
    root = RandomSource(seed)
    bob_cls = LeakyBob if leaky else None
    counts: dict[tuple[int, ...], np.ndarray] = {}
    for cv in choice_vectors:
        tally = np.zeros(n, dtype=np.int64)
        stream = root.stream(f"choice/{','.join(map(str, cv))}")
        bits = (0,) * n
        for k in range(trials_per_choice):
            trial_rng = stream.stream(f"trial/{k}")
            kwargs = {"bob": bob_cls()} if bob_cls else {}
            outcome = run_protocol(params, bits, cv, trial_rng, **kwargs)
            if outcome.status is not Status.COMPLETED:
                continue
            family = outcome.detail["family"]
            min_slot = min(int(f[0]) for f in family if len(f))
            for label, f in enumerate(family):
                if len(f) and int(f[0]) == min_slot:
                    tally[label] += 1
                    break
        counts[cv] = tally

    pairs = []
    n_pairs = math.comb(len(choice_vectors), 2)
    corrected = significance / max(1, n_pairs)
    max_tv = 0.0
    all_pass = True
    for a, b in itertools.combinations(choice_vectors, 2):
        table = np.vstack([counts[a], counts[b]])
        keep = table.sum(axis=0) > 0
        _, p_value, _, _ = chi2_contingency(table[:, keep])
        fa = counts[a] / max(1, counts[a].sum())
        fb = counts[b] / max(1, counts[b].sum())
        tv = 0.5 * float(np.abs(fa - fb).sum())
        max_tv = max(max_tv, tv)
        passed = p_value >= corrected
        all_pass = all_pass and passed
        pairs.append(
            {
                "choice_a": list(a),
                "choice_b": list(b),
                "p_value": float(p_value),
                "total_variation": tv,
                "passed": bool(passed),
            }
        )
    return {
        "n": n,
        "m": m,
        "N": params.N,
        "trials_per_choice": trials_per_choice,
        "leaky": leaky,
        "significance": significance,
        "corrected_significance": corrected,
        "feature_counts": {",".join(map(str, cv)): c.tolist() for cv, c in counts.items()},
        "pairs": pairs,
        "max_total_variation": max_tv,
        "all_pass": bool(all_pass),
    }


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------

def round_sig(value, digits: int = 12):
    """Recursively round floats to `digits` significant digits for stable output."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: round_sig(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v, digits) for v in value]
    return value


def emit_report(
    config: dict,
    stats: AggregateStats | None = None,
    verdicts: list[Verdict] | None = None,
    extra: dict | None = None,
    fmt: str = "structured",
) -> str:
    """Render one report document: JSON ("structured") or a plain table."""
    doc: dict = {
        "version": __version__,
        "seed": config.get("seed"),
        "config": config,
    }
    if stats is not None:
        doc["stats"] = dataclasses.asdict(stats)
    if verdicts is not None:
        doc["verdicts"] = [dataclasses.asdict(v) for v in verdicts]
    if extra:
        doc.update(extra)
    doc = round_sig(doc)
    if fmt == "structured":
        return json.dumps(doc, indent=2)
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"qotsim {__version__}  seed={doc.get('seed')}"]
    for key, val in doc.items():
        if key in ("verdicts", "version", "seed"):
            continue
        lines.append(f"{key}: {json.dumps(val)}")
    for v in doc.get("verdicts", []):
        mark = "PASS" if v["passed"] else "FAIL"
        lines.append(
            f"[{mark}] {v['criterion']}: empirical={v['empirical']} "
            f"{v['relation']} reference={v['reference']}"
        )
    return "\n".join(lines)


def all_verdicts_pass(verdicts: list[Verdict]) -> bool:
    return all(v.passed for v in verdicts)
