"""Derived protocol quantities and security bounds.

Admissibility decisions (target rate, removal count, subset size) use exact
integer/rational arithmetic; only final probability bounds are evaluated in
floating point.  Two labeled bound forms are exposed for each claim: the raw
two-sided concentration bound 2*exp(-2*N*delta^2) and the simplified eps^N
form with eps = exp(-delta^2), which dominates the raw bound once
N > ln(2)/delta^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class Case(Enum):
    """Which side of 1/2 the target match rate (2m+1)/(2n) falls on."""

    LOW = "low"    # rate < 1/2: excess matching indices are removed
    HIGH = "high"  # rate >= 1/2: excess mismatching indices are removed


class ParameterError(ValueError):
    """Invalid protocol parameters."""


class InvalidChoiceCount(ParameterError):
    """m outside [1, n-1]."""


class InvalidN(ParameterError):
    """N fails an exact divisibility requirement."""


def target_rate(n: int, m: int) -> Fraction:
    """Target fraction of basis matches among surviving indices: (2m+1)/(2n)."""
    _require_choice_count(n, m)
    return Fraction(2 * m + 1, 2 * n)


def _require_choice_count(n: int, m: int) -> None:
    if not (isinstance(n, int) and isinstance(m, int)):
        raise InvalidChoiceCount(f"n and m must be integers, got n={n!r}, m={m!r}")
    if not 1 <= m < n:
        raise InvalidChoiceCount(f"require 1 <= m < n, got n={n}, m={m}")


def case_of(n: int, m: int) -> Case:
    _require_choice_count(n, m)
    return Case.LOW if 2 * m + 1 < n else Case.HIGH


def compute_x(n: int, m: int, N: int) -> int:
    """Removal count making the surviving match rate equal the target rate.

    Low case: x = (n-(2m+1))*N / (2n-(2m+1)); high case:
    x = ((2m+1)-n)*N / (2m+1).  Raises :class:`InvalidN` when the division
    is not exact.
    """
    _require_choice_count(n, m)
    if N < 1:
        raise InvalidN(f"require N >= 1, got {N}")
    if case_of(n, m) is Case.LOW:
        num, den = (n - (2 * m + 1)) * N, 2 * n - (2 * m + 1)
    else:
        num, den = ((2 * m + 1) - n) * N, 2 * m + 1
    if num % den != 0:
        raise InvalidN(
            f"removal count x = {num}/{den} is not an integer; "
            f"N={N} must make {den} divide {num}"
        )
    return num // den


@dataclass(frozen=True)
class ProtocolParams:
    """Validated parameter set with all derived quantities."""

    n: int
    m: int
    N: int
    case: Case
    x: int
    subset_size: int
    target_rate: Fraction


def validate_params(n: int, m: int, N: int) -> ProtocolParams:
    """Check every admissibility constraint and return the populated params.

    Constraints: 1 <= m < n; N >= 1; the removal count x exact; and (N-x)
    divisible by n so equal-size subsets exist.  The error message lists
    every violated constraint.
    """
    _require_choice_count(n, m)
    violations = []
    if N < 1:
        violations.append(f"N must be >= 1, got {N}")
        raise InvalidN("; ".join(violations))
    try:
        x = compute_x(n, m, N)
    except InvalidN as err:
        violations.append(str(err))
        x = None
    if x is not None and (N - x) % n != 0:
        violations.append(
            f"(N - x) = {N - x} must be divisible by n = {n} "
            f"to form equal-size subsets"
        )
    if violations:
        raise InvalidN("; ".join(violations))
    return ProtocolParams(
        n=n,
        m=m,
        N=N,
        case=case_of(n, m),
        x=x,
        subset_size=(N - x) // n,
        target_rate=target_rate(n, m),
    )


def smallest_valid_N(n: int, m: int, floor: int = 1) -> int:
    """Least admissible N >= floor.  Always terminates: admissibility is periodic."""
    _require_choice_count(n, m)
    N = max(1, int(floor))
    while True:
        try:
            validate_params(n, m, N)
            return N
        except InvalidN:
            N += 1


@dataclass(frozen=True)
class HoeffdingQuery:
    """Inputs to the two-sided concentration bound for an empirical mean."""

    trials: int
    deviation: float
    low: float = 0.0
    high: float = 1.0
    mean: float = 0.5

    def __post_init__(self):
        if self.deviation <= 0:
            raise ValueError("deviation must be positive")
        if self.low >= self.high:
            raise ValueError("require low < high")


def hoeffding_bound(q: HoeffdingQuery) -> float:
    """Two-sided tail bound 2*exp(-2*N*delta^2/(high-low)).

    May exceed 1 (vacuous) for small N; callers clamp for reporting.
    """
    return 2.0 * math.exp(-2.0 * q.trials * float(q.deviation) ** 2 / (q.high - q.low))


def correctness_deviation(n: int, m: int) -> Fraction:
    """Deviation delta_c in the correctness tail bound (exact rational)."""
    if case_of(n, m) is Case.LOW:
        return Fraction(n - m, 2 * n - (2 * m + 1)) - Fraction(1, 2)
    return Fraction(1, 2) - Fraction(m, 2 * m + 1)


def correctness_epsilon(n: int, m: int) -> tuple[Fraction, float]:
    """(delta_c, eps_c) with eps_c = exp(-delta_c^2) < 1."""
    delta = correctness_deviation(n, m)
    assert delta > 0, f"correctness deviation must be positive, got {delta}"
    return delta, math.exp(-float(delta) ** 2)


def privacy_deviation_signed(n: int, m: int) -> Fraction:
    """Privacy deviation exactly as written in the source analysis.

    In the low case this expression, 1/2 - (n-m)/(2n-(2m+1)), is negative
    for every admissible (n, m) despite being asserted positive; callers use
    the absolute value and flag the sign anomaly rather than guessing intent.
    """
    if case_of(n, m) is Case.LOW:
        return Fraction(1, 2) - Fraction(n - m, 2 * n - (2 * m + 1))
    return Fraction(m + 1, 2 * m + 1) - Fraction(1, 2)


def privacy_sign_anomaly(n: int, m: int) -> bool:
    """True when the stated privacy deviation is non-positive as written."""
    return privacy_deviation_signed(n, m) <= 0


def privacy_epsilon(n: int, m: int) -> tuple[Fraction, float]:
    """(|delta_p|, eps_p) with eps_p = exp(-delta_p^2) < 1."""
    delta = abs(privacy_deviation_signed(n, m))
    assert delta > 0, f"privacy deviation must be nonzero for n={n}, m={m}"
    return delta, math.exp(-float(delta) ** 2)


def min_N(delta) -> int:
    """Least integer strictly greater than ln(2)/delta^2.

    Beyond this threshold the raw bound 2*exp(-2*N*delta^2) drops below the
    simplified form exp(-N*delta^2).
    """
    d = float(delta)
    if d <= 0:
        raise ValueError("deviation must be positive")
    return math.floor(math.log(2.0) / d**2) + 1


def commitment_attack_bound(p: float, n: int, N: int, x: int) -> tuple[float, float]:
    """Success bound for forging one extra all-matching subset.

    Returns (p^((N-x)/n), eps) with eps = p^(1/(2n)); the bound is strictly
    below eps^N whenever (N-x)/n > N/(2n).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"cheat probability must be in (0,1), got {p}")
    if (N - x) % n != 0:
        raise InvalidN(f"(N - x) = {N - x} must be divisible by n = {n}")
    forgeries = (N - x) // n
    bound = p**forgeries
    eps = p ** (1.0 / (2 * n))
    if forgeries > N / (2 * n):
        assert bound < eps**N
    return bound, eps


@dataclass(frozen=True)
class BoundReport:
    """Every bound and threshold for one parameter set (and optional p, N)."""

    n: int
    m: int
    case: str
    target_rate: str
    delta_correctness: str
    delta_privacy: str
    privacy_sign_anomaly: bool
    eps_correctness: float
    eps_privacy: float
    hoeffding_correctness_form: str  # "2*exp(-c*N)" with exact rational c = 2*delta^2
    hoeffding_privacy_form: str
    min_N_correctness: int
    min_N_privacy: int
    N: int | None = None
    x: int | None = None
    subset_size: int | None = None
    hoeffding_correctness: float | None = None  # 2*exp(-2*N*delta_c^2)
    hoeffding_privacy: float | None = None      # 2*exp(-2*N*delta_p^2)
    eps_correctness_pow_N: float | None = None
    eps_privacy_pow_N: float | None = None
    p: float | None = None
    commitment_eps: float | None = None         # p^(1/(2n))
    commitment_bound: float | None = None       # p^((N-x)/n)


def _bound_form(delta: Fraction) -> str:
    """Closed form of the raw tail bound, with exact rational exponent rate."""
    rate = 2 * delta * delta
    if rate.numerator == 1:
        return f"2*exp(-N/{rate.denominator})"
    return f"2*exp(-{rate.numerator}*N/{rate.denominator})"


def build_bound_report(
    n: int, m: int, N: int | None = None, p: float | None = None
) -> BoundReport:
    """Assemble a :class:`BoundReport`; N enables per-N bounds, p the
    commitment-attack figures (commitment_bound additionally needs N)."""
    delta_c, eps_c = correctness_epsilon(n, m)
    delta_p, eps_p = privacy_epsilon(n, m)
    fields: dict = dict(
        n=n,
        m=m,
        case=case_of(n, m).value,
        target_rate=str(target_rate(n, m)),
        delta_correctness=str(delta_c),
        delta_privacy=str(delta_p),
        privacy_sign_anomaly=privacy_sign_anomaly(n, m),
        eps_correctness=eps_c,
        eps_privacy=eps_p,
        hoeffding_correctness_form=_bound_form(delta_c),
        hoeffding_privacy_form=_bound_form(delta_p),
        min_N_correctness=min_N(delta_c),
        min_N_privacy=min_N(delta_p),
        p=p,
    )
    if N is not None:
        params = validate_params(n, m, N)
        fields.update(
            N=N,
            x=params.x,
            subset_size=params.subset_size,
            hoeffding_correctness=hoeffding_bound(
                HoeffdingQuery(trials=N, deviation=float(delta_c))
            ),
            hoeffding_privacy=hoeffding_bound(
                HoeffdingQuery(trials=N, deviation=float(delta_p))
            ),
            eps_correctness_pow_N=eps_c**N,
            eps_privacy_pow_N=eps_p**N,
        )
        if p is not None:
            bound, eps = commitment_attack_bound(p, n, N, params.x)
            fields.update(commitment_bound=bound, commitment_eps=eps)
    elif p is not None:
        fields.update(commitment_eps=p ** (1.0 / (2 * n)))
    return BoundReport(**fields)
