"""Decision counting, boosted deciders, bisection counting and testers.

Decision r-approximate counting: given an estimate Ẑ and a rate r > 1 with
the promise Z ≤ Ẑ/r or Z ≥ rẐ, answer which side holds with probability at
least 5/8.  A tester consumes a visible model plus L sample configurations
and answers Yes ("samples look like the visible model") or No; the generic
reduction turns any such tester into a decider by constructing a visible /
hidden instance pair whose total-variation distance encodes the comparison.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import GuardViolation, InvalidConfigurationError, InvalidModelError
from .exact import CollapsedSpace, tv_collapsed
from .model import SpinSystem, classify_field, disjoint_union, FIELD_ZERO
from .potts import ANSWER_HIGH, ANSWER_LOW

DEFAULT_CONFIDENCE = 5.0 / 8.0
TESTER_CONFIDENCE = 3.0 / 4.0

PROVENANCE_TESTER = "tester"
PROVENANCE_GUARD = "guard-bound"


@dataclass(frozen=True)
class DecisionQuery:
    log_Zhat: float
    r: float
    confidence: float = DEFAULT_CONFIDENCE

    def __post_init__(self) -> None:
        if self.r <= 1.0:
            raise InvalidConfigurationError("decision rate r must exceed 1")


@dataclass(frozen=True)
class CountingOutcome:
    answer: str
    provenance: str

    def __post_init__(self) -> None:
        if self.answer not in (ANSWER_LOW, ANSWER_HIGH):
            raise InvalidConfigurationError(f"unknown answer {self.answer!r}")
        if self.provenance not in (PROVENANCE_TESTER, PROVENANCE_GUARD):
            raise InvalidConfigurationError(f"unknown provenance {self.provenance!r}")


# -- collapsed-space dispatch ----------------------------------------------------


def collapsed_pair(instance) -> tuple[CollapsedSpace, CollapsedSpace]:
    """(visible, hidden) collapsed spaces for a reduction instance."""
    from . import hubs, potts

    if isinstance(instance, hubs.HubInstance):
        return (
            hubs.collapsed_distribution_hub(instance, "visible"),
            hubs.collapsed_distribution_hub(instance, "hidden"),
        )
    if isinstance(instance, potts.PottsInstance):
        return (
            potts.collapsed_distribution_F(instance, "visible"),
            potts.collapsed_distribution_F(instance, "hidden"),
        )
    raise InvalidModelError(
        f"no collapsed space available for {type(instance).__name__}"
    )


def collapsed_class_of(instance, sigma) -> tuple:
    from . import hubs, potts

    if isinstance(instance, hubs.HubInstance):
        return hubs.collapsed_class_of(instance, sigma)
    if isinstance(instance, potts.PottsInstance):
        return potts.collapsed_class_of(instance, sigma)
    raise InvalidModelError(
        f"no collapsed class map available for {type(instance).__name__}"
    )


# -- testers ----------------------------------------------------------------------


def oracle_tv_tester(epsilon: float, L: int) -> Callable:
    """Pipeline-validation tester: thresholds the exact collapsed TV between
    the instance's visible and hidden models at the midpoint of the
    contract gap [1/(16L), 1-eps].  Ignores the samples; deterministic;
    ties resolve to Yes."""
    threshold = 0.5 * (1.0 / (16.0 * L) + (1.0 - epsilon))

    def tester(instance, samples: Sequence, rng=None) -> bool:
        vis, hid = collapsed_pair(instance)
        return tv_collapsed(vis, hid) <= threshold

    tester.kind = "oracle-tv"
    tester.threshold = threshold
    return tester


def empirical_tester(epsilon: float, L: int) -> Callable:
    """Plug-in tester: estimates TV between the visible class distribution
    and the empirical class frequencies of the samples; thresholds at the
    same contract-gap midpoint.  Needs L large relative to the class count."""
    threshold = 0.5 * (1.0 / (16.0 * L) + (1.0 - epsilon))

    def tester(instance, samples: Sequence, rng=None) -> bool:
        vis, _ = collapsed_pair(instance)
        index = {d: i for i, d in enumerate(vis.descriptors)}
        counts = np.zeros(len(vis.descriptors), dtype=float)
        for sigma in samples:
            counts[index[collapsed_class_of(instance, sigma)]] += 1.0
        if not samples:
            raise InvalidConfigurationError("empirical tester needs samples")
        emp = counts / counts.sum()
        # class probability = exp(log_count + log_weight - log_Z)
        p = np.exp(vis.log_count + vis.log_weight - vis.log_Z)
        est = 0.5 * float(np.abs(emp - p).sum())
        return est <= threshold

    tester.kind = "empirical"
    tester.threshold = threshold
    return tester


# -- generic reduction --------------------------------------------------------------


def run_generic_reduction(
    G: SpinSystem,
    query: DecisionQuery,
    builder: Callable,
    hidden_sampler: Callable,
    tester: Callable,
    L: int,
    rng: np.random.Generator,
) -> CountingOutcome:
    """Decide Z ≤ Ẑ/r vs Z ≥ rẐ through an instance builder and a tester.

    ``builder(G, log_Zhat)`` returns a reduction instance (its solver is
    tuned so the visible/hidden TV is small exactly when Z ≤ Ẑ/r);
    ``hidden_sampler(instance, rng)`` draws one hidden-model sample.  A
    GuardViolation from the builder short-circuits to the certified answer.
    """
    try:
        instance = builder(G, query.log_Zhat)
    except GuardViolation as gv:
        return CountingOutcome(answer=gv.suggested_answer, provenance=PROVENANCE_GUARD)
    samples = [hidden_sampler(instance, rng) for _ in range(L)]
    yes = bool(tester(instance, samples, rng))
    answer = ANSWER_LOW if yes else ANSWER_HIGH
    return CountingOutcome(answer=answer, provenance=PROVENANCE_TESTER)


# -- boosting and bisection -----------------------------------------------------------


def boosted_copies(n: int, r: float, c1: float) -> int:
    """k = 80*ceil(log(8*log(4*c1*n^2 + 4*log r))) + 1 (odd by construction)."""
    inner = math.log(4.0 * c1 * n * n + 4.0 * math.log(r))
    k = 80 * math.ceil(math.log(8.0 * inner)) + 1
    return max(k, 1)


def boosted_decider(decider: Callable, n: int, r: float, c1: float) -> Callable:
    """Majority vote of k independent runs of a base decider with error ≤ 3/8.

    The base decider is called as decider(log_Zhat, rng) -> answer string.
    The boosted error is at most 1/(8*log(4*c1*n^2 + 4*log r)).
    """
    k = boosted_copies(n, r, c1)

    def boosted(log_Zhat: float, rng: np.random.Generator) -> str:
        high = sum(decider(log_Zhat, rng) == ANSWER_HIGH for _ in range(k))
        return ANSWER_HIGH if 2 * high > k else ANSWER_LOW

    boosted.copies = k
    return boosted


def bisection_counter(
    decider: Callable,
    n: int,
    c1: float,
    r: float,
    rng: np.random.Generator,
) -> float:
    """2r-approximate counting from a decision oracle; returns log ℓ with
    (1/r)ℓ < Z < 2rℓ (when the decider answers correctly throughout).

    Starts from the crude bracket [e^{-c1 n^2}/r, r e^{c1 n^2}], queries the
    decider at geometric midpoints, keeps the half certified by the answer,
    and stops once u/ℓ ≤ 2.  Degenerate case r > e^{c1 n^2}: every Z in the
    crude bracket satisfies (1/r)·1 < Z < 2r·1, so output 1.
    """
    if math.log(r) > c1 * n * n:
        return 0.0
    log_l = -math.log(r) - c1 * n * n
    log_u = math.log(r) + c1 * n * n
    while log_u - log_l > math.log(2.0):
        log_c = 0.5 * (log_l + log_u)
        if decider(log_c, rng) == ANSWER_HIGH:
            log_l = log_c
        else:
            log_u = log_c
    return log_l


def bisection_iteration_bound(n: int, c1: float, r: float) -> int:
    """Upper bound on the number of decider queries the bisection makes."""
    width = 2.0 * (c1 * n * n + math.log(r))
    if width <= math.log(2.0):
        return 0
    return math.ceil(math.log2(width / math.log(2.0)))


# -- crude bounds and amplification -------------------------------------------------------


def crude_bounds(model: SpinSystem) -> tuple[float, float]:
    """A certified bracket for log Z: the generic one-configuration /
    max-weight bound, tightened by the ferromagnetic or antiferromagnetic
    zero-field forms when the model qualifies."""
    n, q = model.n, model.q
    betas = [b for _, _, b in model.edges]
    h = model.field_array if model.field else np.zeros((n, q))
    abs_field = float(np.abs(h).max(axis=1).sum())
    pos_field = float(np.clip(h, 0.0, None).max(axis=1).sum())
    lo = n * math.log(q) - sum(abs(b) for b in betas) - abs_field
    hi = n * math.log(q) + sum(max(b, 0.0) for b in betas) + pos_field
    if classify_field(model) == FIELD_ZERO and betas:
        total = sum(betas)
        if all(b > 0 for b in betas):
            # q e^{beta |E|} <= Z <= q^n e^{beta |E|}
            lo = max(lo, math.log(q) + total)
            hi = min(hi, n * math.log(q) + total)
        elif all(b < 0 for b in betas):
            # q^n e^{sum beta} <= Z <= q^n
            lo = max(lo, n * math.log(q) + total)
            hi = min(hi, n * math.log(q))
    return lo, hi


def crude_exponent(model: SpinSystem, margin: float = 1e-9) -> float:
    """The smallest c1 with e^{-c1 n^2} ≤ Z ≤ e^{c1 n^2} per crude_bounds."""
    lo, hi = crude_bounds(model)
    return (max(abs(lo), abs(hi)) + margin) / float(model.n * model.n)


def amplify_copies(model: SpinSystem, c: float, rho: float) -> tuple[SpinSystem, int]:
    """Disjoint union of k copies, k the smallest integer ≥ c·ln(kn)/ρ."""
    if c <= 0 or rho <= 0:
        raise InvalidConfigurationError("amplification needs c, rho > 0")
    k = 1
    while k < c * math.log(k * model.n) / rho:
        k += 1
    if k == 1:
        return model, 1
    return disjoint_union([model] * k), k


# -- trial harness ----------------------------------------------------------------------


def run_reduction_trials(
    G: SpinSystem,
    builder: Callable,
    hidden_sampler: Callable,
    tester: Callable,
    L: int,
    branches: Sequence[tuple[str, float, str]],
    seeds: Sequence[int],
    r: float,
    *,
    timing: bool = False,
) -> list[dict]:
    """One reduction trial per (branch, seed); returns JSON-ready dicts.

    ``branches`` lists (branch name, log_Zhat, expected answer).  Report
    keys: seed, branch, Zhat, r, tester, answer, correct, tv_exact when a
    collapsed space is available, and runtime_ms only when ``timing``.
    """
    reports = []
    for name, log_Zhat, expected in branches:
        query = DecisionQuery(log_Zhat=log_Zhat, r=r)
        for seed in seeds:
            rng = np.random.default_rng(seed)
            t0 = time.perf_counter()
            outcome = run_generic_reduction(
                G, query, builder, hidden_sampler, tester, L, rng
            )
            elapsed_ms = 1000.0 * (time.perf_counter() - t0)
            report = {
                "seed": int(seed),
                "branch": name,
                "Zhat": math.exp(log_Zhat) if abs(log_Zhat) < 700 else None,
                "log_Zhat": log_Zhat,
                "r": r,
                "tester": getattr(tester, "kind", "custom"),
                "answer": outcome.answer,
                "provenance": outcome.provenance,
                "correct": outcome.answer == expected,
            }
            if outcome.provenance == PROVENANCE_TESTER:
                try:
                    instance = builder(G, log_Zhat)
                    vis, hid = collapsed_pair(instance)
                    report["tv_exact"] = tv_collapsed(vis, hid)
                except (GuardViolation, InvalidModelError):
                    pass
            if timing:
                report["runtime_ms"] = elapsed_ms
            reports.append(report)
    return reports


def reports_to_jsonl(reports: Sequence[dict]) -> str:
    return "\n".join(json.dumps(rep, sort_keys=True) for rep in reports) + "\n"
