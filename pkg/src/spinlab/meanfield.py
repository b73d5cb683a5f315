"""Ferromagnetic mean-field (complete-graph) Potts analyzer.

Signature enumeration, the majority/disordered/residual (M/D/S) phase split,
the free-energy functional Phi, the coexistence coupling Bo (scaled so the
per-edge coupling is Bo/m), and a bisection solver hitting a target
Z^M/Z^D ratio.

Window convention: the raw majority and disordered windows (half-width
m^{3/4}) overlap at small m, but the split must partition the signature
space.  A signature inside both windows is assigned to the nearest phase
center in Euclidean distance on count vectors (ties go to the disordered
phase; ties among majority branches go to the smallest color index), which
is color-permutation symmetric and recovers the raw windows once they
separate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from .errors import BudgetExceededError, InvalidModelError, TargetUnreachableError

PHASE_M, PHASE_D, PHASE_S = 0, 1, 2
DEFAULT_WINDOW_EXPONENT = 0.75
SIGNATURE_BUDGET = 5_000_000


def phi(alpha, beta_scaled: float) -> float:
    """Mean-field free-energy functional H(alpha) + (beta/2)*||alpha||_2^2."""
    a = np.asarray(alpha, dtype=float)
    if np.any(a < -1e-12) or abs(a.sum() - 1.0) > 1e-12:
        raise InvalidModelError(f"not a simplex point: {alpha!r}")
    a = np.clip(a, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.where(a > 0, a * np.log(np.where(a > 0, a, 1.0)), 0.0).sum()
    return float(ent + 0.5 * beta_scaled * np.dot(a, a))


def psi1(x: float, beta_scaled: float, q: int) -> float:
    """Phi restricted to the symmetric ray (x, y, ..., y), y=(1-x)/(q-1)."""
    y = (1.0 - x) / (q - 1)
    return phi([x] + [y] * (q - 1), beta_scaled)


@dataclass(frozen=True)
class CriticalPoint:
    Bo: float
    alpha_hat: float
    phi_at_u: float
    phi_at_majority: float


def _majority_argmax(beta: float, q: int) -> tuple[float, float]:
    """Argmax and value of psi1 over the majority branch (x well above 1/q)."""
    x_lo = 1.0 / q + 0.3 * (1.0 - 1.0 / q)
    xs = np.linspace(x_lo, 1.0 - 1e-12, 512)
    vals = [psi1(float(x), beta, q) for x in xs]
    k = int(np.argmax(vals))
    lo = xs[max(0, k - 1)]
    hi = xs[min(len(xs) - 1, k + 1)]
    res = minimize_scalar(
        lambda x: -psi1(float(x), beta, q),
        bounds=(float(lo), float(hi)),
        method="bounded",
        options={"xatol": 1e-14},
    )
    return float(res.x), float(-res.fun)


@lru_cache(maxsize=None)
def find_critical_Bo(q: int, tol: float = 1e-11) -> CriticalPoint:
    """Scaled coexistence coupling Bo: the majority-branch maximum of psi1
    equals its value at the uniform point, with the argmax strictly above 1/q."""
    if q < 3:
        raise InvalidModelError("phase coexistence requires q >= 3")
    if tol <= 0:
        raise InvalidModelError("tol must be positive")

    def height(beta: float) -> float:
        _, val = _majority_argmax(beta, q)
        return val - psi1(1.0 / q, beta, q)

    lo, hi = 0.5, 4.0 * math.log(q) + 2.0
    if height(lo) > 0 or height(hi) < 0:
        raise TargetUnreachableError("coexistence bracket failed to enclose a root")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if height(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    else:
        raise TargetUnreachableError("coexistence bisection did not converge")
    bo = 0.5 * (lo + hi)
    alpha_hat, val = _majority_argmax(bo, q)
    return CriticalPoint(
        Bo=bo, alpha_hat=alpha_hat, phi_at_u=psi1(1.0 / q, bo, q), phi_at_majority=val
    )


def default_alpha_hat(q: int) -> float:
    return find_critical_Bo(q).alpha_hat


# -- signature enumeration ---------------------------------------------------


@lru_cache(maxsize=64)
def enumerate_signatures(m: int, q: int) -> np.ndarray:
    """All color-count vectors (s_1..s_q) summing to m, lexicographic order."""
    count = math.comb(m + q - 1, q - 1)
    if count > SIGNATURE_BUDGET:
        raise BudgetExceededError(q, m, math.log2(SIGNATURE_BUDGET))
    if q == 1:
        return np.asarray([[m]], dtype=np.int64)
    rows: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], remaining: int, slots: int) -> None:
        if slots == 1:
            rows.append(prefix + (remaining,))
            return
        for s in range(remaining + 1):
            rec(prefix + (s,), remaining - s, slots - 1)

    rec((), m, q)
    return np.asarray(rows, dtype=np.int64)


def signature_log_weights(m: int, q: int, beta_H: float) -> tuple[np.ndarray, np.ndarray]:
    """Signatures and log of multinomial(m; s) * exp(beta_H * sum C(s_i,2))."""
    sigs = enumerate_signatures(m, q)
    log_multi = gammaln(m + 1) - gammaln(sigs + 1).sum(axis=1)
    mono_edges = (sigs * (sigs - 1) // 2).sum(axis=1)
    return sigs, log_multi + beta_H * mono_edges


def classify_signatures(
    sigs: np.ndarray,
    m: int,
    q: int,
    alpha_hat: float,
    window_exponent: float = DEFAULT_WINDOW_EXPONENT,
) -> tuple[np.ndarray, np.ndarray]:
    """Phase label (M/D/S) per signature plus fractional branch weights.

    Returns ``(labels, branch_frac)`` where ``branch_frac`` has shape
    (n_sigs, q); for an M signature the row is a probability vector over
    majority branches (ties split evenly), else all zero.
    """
    w = float(m) ** window_exponent
    minority = (1.0 - alpha_hat) * m / (q - 1)
    centers_m = np.full((q, q), minority)
    np.fill_diagonal(centers_m, alpha_hat * m)
    center_d = np.full(q, m / q)

    in_d = np.all(np.abs(sigs - center_d) <= w, axis=1)
    # in_m[:, j]: inside the window of majority branch j
    in_m = np.zeros((len(sigs), q), dtype=bool)
    for j in range(q):
        in_m[:, j] = np.all(np.abs(sigs - centers_m[j]) <= w, axis=1)
    any_m = in_m.any(axis=1)

    d2_d = ((sigs - center_d) ** 2).sum(axis=1).astype(float)
    d2_m = np.full((len(sigs), q), np.inf)
    for j in range(q):
        d2_m[in_m[:, j], j] = ((sigs[in_m[:, j]] - centers_m[j]) ** 2).sum(axis=1)
    best_m = d2_m.min(axis=1)

    labels = np.full(len(sigs), PHASE_S, dtype=np.int8)
    labels[in_d] = PHASE_D
    take_m = any_m & (~in_d | (best_m < d2_d))
    labels[take_m] = PHASE_M

    branch_frac = np.zeros((len(sigs), q), dtype=float)
    if take_m.any():
        tied = np.isclose(d2_m[take_m], best_m[take_m, None])
        branch_frac[take_m] = tied / tied.sum(axis=1, keepdims=True)
    return labels, branch_frac


@dataclass(frozen=True)
class PhaseSplit:
    m: int
    q: int
    beta_H: float
    alpha_hat: float
    window: float
    log_ZM: float
    log_ZD: float
    log_ZS: float
    log_branches: tuple[float, ...]

    @property
    def log_Z(self) -> float:
        return float(logsumexp([self.log_ZM, self.log_ZD, self.log_ZS]))

    @property
    def gap(self) -> float:
        return self.log_ZS - min(self.log_ZM, self.log_ZD)


def phase_split(
    m: int,
    q: int,
    beta_H: float,
    alpha_hat: Optional[float] = None,
    window_exponent: float = DEFAULT_WINDOW_EXPONENT,
) -> PhaseSplit:
    """Exact log partition values of the M/D/S phases of the complete graph K_m."""
    if m < 1:
        raise InvalidModelError("m must be >= 1")
    if alpha_hat is None:
        alpha_hat = default_alpha_hat(q)
    sigs, logw = signature_log_weights(m, q, beta_H)
    labels, branch_frac = classify_signatures(sigs, m, q, alpha_hat, window_exponent)

    def part(label: int) -> float:
        sel = labels == label
        return float(logsumexp(logw[sel])) if sel.any() else float("-inf")

    branches = []
    for j in range(q):
        wj = branch_frac[:, j]
        sel = wj > 0
        if sel.any():
            branches.append(float(logsumexp(logw[sel] + np.log(wj[sel]))))
        else:
            branches.append(float("-inf"))
    return PhaseSplit(
        m=m,
        q=q,
        beta_H=beta_H,
        alpha_hat=alpha_hat,
        window=float(m) ** window_exponent,
        log_ZM=part(PHASE_M),
        log_ZD=part(PHASE_D),
        log_ZS=part(PHASE_S),
        log_branches=tuple(branches),
    )


def log_ratio_g(
    m: int, q: int, beta_H: float, alpha_hat: Optional[float] = None
) -> float:
    """g(beta_H) = log Z^M - log Z^D."""
    split = phase_split(m, q, beta_H, alpha_hat)
    return split.log_ZM - split.log_ZD


def solve_beta_H(
    m: int,
    q: int,
    target_R: float,
    delta: float,
    alpha_hat: Optional[float] = None,
    c_prime_start: float = 1.0,
    c_prime_cap: float = 64.0,
) -> float:
    """Find beta_H with (1-delta)*R <= Z^M/Z^D <= R by bisection on g.

    The bracket is Bo/m +- c' * m^{-3/2} with c' doubled adaptively from
    ``c_prime_start`` up to ``c_prime_cap``.
    """
    if target_R <= 0 or not 0 < delta < 1:
        raise InvalidModelError("need target_R > 0 and delta in (0,1)")
    crit = find_critical_Bo(q)
    if alpha_hat is None:
        alpha_hat = crit.alpha_hat
    center = crit.Bo / m
    t_hi = math.log(target_R)
    t_lo = t_hi + math.log1p(-delta)
    t_mid = 0.5 * (t_lo + t_hi)

    c_prime = c_prime_start
    while True:
        half = c_prime * m**-1.5
        lo = max(center - half, 1e-12)
        hi = center + half
        g_lo = log_ratio_g(m, q, lo, alpha_hat)
        g_hi = log_ratio_g(m, q, hi, alpha_hat)
        if g_lo <= t_mid <= g_hi:
            break
        if c_prime >= c_prime_cap:
            raise TargetUnreachableError(
                f"target ratio {target_R} unreachable within bracket cap; "
                f"achievable log-ratio range [{g_lo:.6g}, {g_hi:.6g}]",
                achieved_range=(g_lo, g_hi),
            )
        c_prime = min(2 * c_prime, c_prime_cap)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = log_ratio_g(m, q, mid, alpha_hat)
        if t_lo <= g_mid <= t_hi:
            return mid
        if g_mid < t_mid:
            lo = mid
        else:
            hi = mid
    raise TargetUnreachableError("ratio bisection did not converge")


def metastability_report(
    m: int, q: int, alpha_hat: Optional[float], beta_H: float
) -> tuple[float, float]:
    """(log Z^S - min(log Z^M, log Z^D), sqrt(m)) for suppression trend checks."""
    split = phase_split(m, q, beta_H, alpha_hat)
    return split.gap, math.sqrt(m)


def explicit_complete_graph(m: int, q: int, beta_H: float):
    """K_m as a SpinSystem (for brute-force cross-checks)."""
    from .model import SpinSystem

    edges = tuple((i, j, beta_H) for i in range(m) for j in range(i + 1, m))
    return SpinSystem(q=q, n=m, edges=edges)
