"""Deletion channel model and Monte Carlo / exhaustive decoder checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .decoder import decode
from .seqcore import BitSeq, delete_at, deletion_ball

CSV_COLUMNS = (
    "n", "d", "M", "trials", "accuracy",
    "mean_filter_reduction", "mean_lcs_evaluations", "early_exit_rate",
)
DEFAULT_EXHAUSTIVE_CAP = 10**7


class ChannelConfigError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ChannelModel:
    """Up to ``d_max`` deletions; ``t_probs[t]`` is P(t deletions).

    Given ``t``, the deleted positions are a uniform t-subset. ``t_probs``
    defaults to uniform over ``0..d_max``.
    """

    d_max: int
    t_probs: tuple[float, ...] | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d_max < 0:
            raise ChannelConfigError("d_max must be >= 0")
        if self.t_probs is None:
            object.__setattr__(self, "t_probs", (1.0 / (self.d_max + 1),) * (self.d_max + 1))
        probs = self.t_probs
        if len(probs) != self.d_max + 1:
            raise ChannelConfigError(f"t_probs needs {self.d_max + 1} entries")
        if any(p < 0 for p in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-9):
            raise ChannelConfigError("t_probs must be non-negative and sum to 1")

    @classmethod
    def fixed(cls, t: int, seed: int = 0) -> ChannelModel:
        """Channel that always deletes exactly ``t`` symbols."""
        return cls(t, tuple(1.0 if i == t else 0.0 for i in range(t + 1)), seed)


def transmit(x: BitSeq, model: ChannelModel, rng: np.random.Generator) -> BitSeq:
    if model.d_max > len(x):
        raise ChannelConfigError(f"d_max={model.d_max} exceeds word length {len(x)}")
    t = int(rng.choice(model.d_max + 1, p=model.t_probs))
    positions = rng.choice(len(x), size=t, replace=False) if t else ()
    return delete_at(x, (int(p) for p in positions))


@dataclass
class _Tally:
    trials: int = 0
    correct: int = 0
    reduction: float = 0.0
    evals: int = 0
    eval_reduction: float = 0.0
    early: int = 0

    def add(self, ok: bool, m: int, cands: int, evals: int, early: bool) -> None:
        self.trials += 1
        self.correct += ok
        self.reduction += (m - cands) / m
        self.evals += evals
        self.eval_reduction += (m - evals) / m
        self.early += early

    def summary(self) -> dict:
        k = self.trials
        return {
            "trials": k,
            "accuracy": self.correct / k,
            "mean_filter_reduction": self.reduction / k,
            "mean_lcs_evaluations": self.evals / k,
            "mean_lcs_eval_reduction": self.eval_reduction / k,
            "early_exit_rate": self.early / k,
        }


@dataclass
class SimReport:
    n: int
    d: int
    M: int
    trials: int
    seed: int
    t_distribution: list[float]
    accuracy: float
    mean_filter_reduction: float
    mean_lcs_evaluations: float
    mean_lcs_eval_reduction: float
    early_exit_rate: float
    breakdown: dict[int, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["breakdown"] = {str(t): v for t, v in sorted(self.breakdown.items())}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def csv_row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


def simulate(
    c: Codebook,
    model: ChannelModel,
    trials: int,
    seed: int | None = None,
) -> SimReport:
    """Send uniformly chosen codewords through ``model`` and decode them.

    Trial ``i`` draws from its own generator seeded with ``(seed, i)``, so a
    report depends only on its inputs, never on execution order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if model.d_max > c.d:
        raise ChannelConfigError(
            f"channel deletes up to {model.d_max} symbols but the code corrects {c.d}"
        )
    seed = model.seed if seed is None else seed
    m = len(c.words)
    total = _Tally()
    per_t: dict[int, _Tally] = {}
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        x = c.words[int(rng.integers(m))]
        y = transmit(x, model, rng)
        out = decode(c, y)
        t = c.n - len(y)
        row = (out.decoded == x, m, out.candidates_after_filter, out.lcs_evaluations, out.early_exit)
        total.add(*row)
        per_t.setdefault(t, _Tally()).add(*row)
    s = total.summary()
    return SimReport(
        n=c.n,
        d=c.d,
        M=m,
        seed=seed,
        t_distribution=list(model.t_probs),
        breakdown={t: tally.summary() for t, tally in per_t.items()},
        **s,
    )


@dataclass(frozen=True)
class ExhaustiveResult:
    ok: bool
    checked: int
    witness: tuple[BitSeq, BitSeq, BitSeq] | None = None  # (sent, received, decoded)


def exhaustive_check(c: Codebook, *, cap: int = DEFAULT_EXHAUSTIVE_CAP) -> ExhaustiveResult:
    """Decode every member of every codeword's deletion ball."""
    total = 0
    for x in c.words:
        total += len(deletion_ball(x, c.d))
        if total > cap:
            raise CapExceeded(f"more than {cap} received words to check")
    checked = 0
    for x in c.words:
        for y in sorted(deletion_ball(x, c.d), key=lambda s: (len(s), s.value)):
            checked += 1
            got = decode(c, y).decoded
            if got != x:
                return ExhaustiveResult(False, checked, (x, y, got))
    return ExhaustiveResult(True, checked)
