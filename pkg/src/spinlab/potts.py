"""Potts testing-instance construction around a mean-field block.

The visible model F joins the input graph G to a complete graph H = K_m by a
complete bipartite graph K_{m,N}; the hidden model F* replaces G by the
complete graph K_N with coupling beta_K = beta_G + 4 ln q.  The mean-field
coupling beta_H is solved so that Z_H^D / Z_H^M hits a window proportional to
exp(alpha_0 * beta * N * m + beta_G |E_G|) / Zhat, which makes the
visible-vs-hidden total variation track the decision "Z_G vs Zhat".

Vertex layout: the N block vertices come first (ids 0..N-1), then the m
vertices of H (ids N..N+m-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from . import meanfield
from .errors import (
    GuardViolation,
    InfeasibleParametersError,
    InvalidModelError,
)
from .exact import CollapsedSpace
from .model import Configuration, SpinSystem, classify_field, FIELD_ZERO

ANSWER_LOW = "Z<=Zhat/r"
ANSWER_HIGH = "Z>=r*Zhat"

DEFAULT_DELTA = 0.1


def testing_rate(epsilon: float, L: int) -> float:
    """r = 96 * sqrt(epsilon*L + 1) / epsilon."""
    return 96.0 / epsilon * math.sqrt(epsilon * L + 1)


@dataclass(frozen=True)
class PottsInstance:
    visible: SpinSystem
    hidden: SpinSystem
    N: int
    m: int
    q: int
    beta_G: float
    beta_cross: float
    beta_H: float
    beta_K: float
    alpha_hat: float
    log_Zhat: float
    r: float
    epsilon: float
    L: int

    @cached_property
    def hidden_class_table(self) -> tuple[tuple, np.ndarray, np.ndarray]:
        """Joint (sig_H, sig_K) classes of the hidden model.

        Returns (descriptors, log_count, log_weight); the count is the number
        of configurations realizing the signature pair and the weight is the
        common per-configuration log-weight.
        """
        sigs_h = meanfield.enumerate_signatures(self.m, self.q)
        sigs_k = meanfield.enumerate_signatures(self.N, self.q)
        lc_h = gammaln(self.m + 1) - gammaln(sigs_h + 1).sum(axis=1)
        lc_k = gammaln(self.N + 1) - gammaln(sigs_k + 1).sum(axis=1)
        mono_h = (sigs_h * (sigs_h - 1) // 2).sum(axis=1)
        mono_k = (sigs_k * (sigs_k - 1) // 2).sum(axis=1)
        log_count = (lc_h[:, None] + lc_k[None, :]).ravel()
        cross = sigs_h.astype(float) @ sigs_k.T.astype(float)
        log_weight = (
            self.beta_H * mono_h[:, None]
            + self.beta_K * mono_k[None, :]
            + self.beta_cross * cross
        ).ravel()
        descriptors = tuple(
            (tuple(int(x) for x in s), tuple(int(x) for x in t))
            for s in sigs_h
            for t in sigs_k
        )
        return descriptors, log_count, log_weight


def make_potts_instance(
    G: SpinSystem,
    m: int,
    beta_cross: float,
    beta_H: float,
    *,
    log_Zhat: float = 0.0,
    r: float = 1.0,
    epsilon: float = 0.5,
    L: int = 1,
    alpha_hat: Optional[float] = None,
) -> PottsInstance:
    """Direct constructor with explicit parameters (no solver, no guard)."""
    _check_base_graph(G)
    q, N = G.q, G.n
    beta_G = G.edges[0][2] if G.edges else 0.0
    beta_K = beta_G + 4.0 * math.log(q)
    if alpha_hat is None:
        alpha_hat = meanfield.default_alpha_hat(q)
    visible = _assemble(G_edges=G.edges, N=N, m=m, q=q, beta_H=beta_H, beta_cross=beta_cross)
    k_edges = tuple((i, j, beta_K) for i in range(N) for j in range(i + 1, N))
    hidden = _assemble(G_edges=k_edges, N=N, m=m, q=q, beta_H=beta_H, beta_cross=beta_cross)
    return PottsInstance(
        visible=visible,
        hidden=hidden,
        N=N,
        m=m,
        q=q,
        beta_G=beta_G,
        beta_cross=beta_cross,
        beta_H=beta_H,
        beta_K=beta_K,
        alpha_hat=alpha_hat,
        log_Zhat=log_Zhat,
        r=r,
        epsilon=epsilon,
        L=L,
    )


def _check_base_graph(G: SpinSystem) -> None:
    if classify_field(G) != FIELD_ZERO:
        raise InvalidModelError("base graph must have zero field")
    betas = {b for _, _, b in G.edges}
    if len(betas) > 1:
        raise InvalidModelError("base graph must have uniform couplings")
    if betas and next(iter(betas)) <= 0:
        raise InvalidModelError("base graph must be ferromagnetic")


def _assemble(G_edges, N: int, m: int, q: int, beta_H: float, beta_cross: float) -> SpinSystem:
    edges = list(G_edges)
    edges += [(N + i, N + j, beta_H) for i in range(m) for j in range(i + 1, m)]
    edges += [(v, N + i, beta_cross) for v in range(N) for i in range(m)]
    return SpinSystem(q=q, n=N + m, edges=tuple(edges))


def beta_interval(
    N: int,
    m: int,
    q: int,
    alpha_hat: float,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
    delta: float = DEFAULT_DELTA,
) -> tuple[float, float]:
    """Admissible cross-coupling interval [c1*N/m, c2/(N*m^{3/4})]."""
    if c1 is None:
        alpha_p = alpha_hat - (1.0 - alpha_hat) / (q - 1)
        alpha_pp = alpha_p - 2.0 * m**-0.25
        if alpha_pp <= 0:
            raise InfeasibleParametersError(
                f"m={m} too small: majority-minority margin {alpha_p:.4f} is "
                f"swallowed by the window slack 2*m^(-1/4)"
            )
        c1 = 2.0 * math.log(q) / alpha_pp
    if c2 is None:
        c2 = delta / 2.0
    return c1 * N / m, c2 / (N * m**0.75)


def guard_bounds(G: SpinSystem, r: float) -> tuple[float, float]:
    """Certified log-Zhat window [log(r q e^{bG|E|}), log(q^N e^{bG|E|} / r)]."""
    beta_G = G.edges[0][2] if G.edges else 0.0
    log_e = beta_G * len(G.edges)
    return math.log(r) + math.log(G.q) + log_e, G.n * math.log(G.q) + log_e - math.log(r)


def build_potts_instance(
    G: SpinSystem,
    m: int,
    epsilon: float,
    L: int,
    log_Zhat: float,
    *,
    c1: Optional[float] = None,
    c2: Optional[float] = None,
    delta: float = DEFAULT_DELTA,
    enforce_guard: bool = True,
) -> PottsInstance:
    """Full construction: pick beta at the interval midpoint, solve beta_H."""
    _check_base_graph(G)
    q, N = G.q, G.n
    r = testing_rate(epsilon, L)
    floor, ceiling = guard_bounds(G, r)
    if enforce_guard:
        if log_Zhat < floor:
            raise GuardViolation("below", ANSWER_HIGH, f"log Zhat {log_Zhat:.4g} < floor {floor:.4g}")
        if log_Zhat > ceiling:
            raise GuardViolation("above", ANSWER_LOW, f"log Zhat {log_Zhat:.4g} > ceiling {ceiling:.4g}")
    alpha_hat = meanfield.default_alpha_hat(q)
    lo, hi = beta_interval(N, m, q, alpha_hat, c1, c2, delta)
    if lo > hi:
        raise InfeasibleParametersError(
            f"empty cross-coupling interval [{lo:.4g}, {hi:.4g}] at N={N}, m={m}; "
            f"increase m"
        )
    beta_cross = 0.5 * (lo + hi)
    beta_G = G.edges[0][2] if G.edges else 0.0
    alpha_0 = alpha_hat - 1.0 / q
    # Window for Z_H^D/Z_H^M is [3/8, 3/4]/sqrt(eps L + 1) times
    # exp(alpha_0*beta*N*m + beta_G|E_G|)/Zhat, i.e. the inverse ratio
    # Z_H^M/Z_H^D must land in [(1/2)R, R] with:
    log_x = (
        math.log(3.0 / 4.0)
        - 0.5 * math.log(epsilon * L + 1)
        + alpha_0 * beta_cross * N * m
        + beta_G * len(G.edges)
        - log_Zhat
    )
    target_R = math.exp(-log_x)
    beta_H = meanfield.solve_beta_H(m, q, target_R, delta=0.5, alpha_hat=alpha_hat)
    inst = make_potts_instance(
        G,
        m,
        beta_cross,
        beta_H,
        log_Zhat=log_Zhat,
        r=r,
        epsilon=epsilon,
        L=L,
        alpha_hat=alpha_hat,
    )
    return inst


# -- collapsed spaces and sampling -------------------------------------------


def collapsed_distribution_F(inst: PottsInstance, which: str) -> CollapsedSpace:
    """Exact collapsed space over classes (sig(H), sigma on the N block vertices).

    Visible and hidden instances share descriptors, so tv_collapsed applies.
    """
    model = _pick(inst, which)
    q, N, m = inst.q, inst.N, inst.m
    sigs_h = meanfield.enumerate_signatures(m, q)
    lc_h = gammaln(m + 1) - gammaln(sigs_h + 1).sum(axis=1)
    mono_h = (sigs_h * (sigs_h - 1) // 2).sum(axis=1).astype(float)

    n_block = q**N
    block_idx = np.arange(n_block, dtype=np.int64)
    spins = np.empty((n_block, N), dtype=np.int64)
    rem = block_idx.copy()
    for v in range(N):
        spins[:, v] = rem % q
        rem //= q
    # block edge weight under this model's couplings on vertices 0..N-1
    block_lw = np.zeros(n_block, dtype=float)
    for u, v, b in model.edges:
        if u < N and v < N:
            block_lw += b * (spins[:, u] == spins[:, v])
    counts = np.stack([(spins == c).sum(axis=1) for c in range(q)], axis=1).astype(float)

    # total log-weight of class (s, sigma_block):
    #   beta_H * monoedges(s) + block_lw + beta * <s, counts>
    cross = sigs_h.astype(float) @ counts.T
    log_weight = (
        inst.beta_H * mono_h[:, None] + block_lw[None, :] + inst.beta_cross * cross
    ).ravel()
    log_count = np.repeat(lc_h, n_block)
    descriptors = tuple(
        (tuple(int(x) for x in s), tuple(int(x) for x in row))
        for s, lw_row in zip(sigs_h, cross)
        for row in spins
    )
    return CollapsedSpace(descriptors=descriptors, log_count=log_count, log_weight=log_weight)


def _pick(inst: PottsInstance, which: str) -> SpinSystem:
    if which == "visible":
        return inst.visible
    if which == "hidden":
        return inst.hidden
    raise InvalidModelError(f"which must be visible|hidden, got {which!r}")


def collapsed_class_of(inst: PottsInstance, sigma: Configuration) -> tuple:
    """Descriptor of the collapsed class containing ``sigma``."""
    spins = sigma.spins if isinstance(sigma, Configuration) else tuple(sigma)
    block = tuple(spins[: inst.N])
    h_spins = spins[inst.N :]
    sig = tuple(int(sum(1 for s in h_spins if s == c)) for c in range(inst.q))
    return (sig, block)


def phase_partition_F(inst: PottsInstance, which: str) -> tuple[float, float, float]:
    """(log Z_F^M, log Z_F^D, log Z_F^S) by H-signature phase membership."""
    space = collapsed_distribution_F(inst, which)
    sigs_h = meanfield.enumerate_signatures(inst.m, inst.q)
    labels, _ = meanfield.classify_signatures(sigs_h, inst.m, inst.q, inst.alpha_hat)
    n_block = inst.q**inst.N
    full_labels = np.repeat(labels, n_block)
    t = space.log_count + space.log_weight
    out = []
    for lab in (meanfield.PHASE_M, meanfield.PHASE_D, meanfield.PHASE_S):
        sel = full_labels == lab
        out.append(float(logsumexp(t[sel])) if sel.any() else float("-inf"))
    return out[0], out[1], out[2]


def sample_hidden_potts_classes(
    inst: PottsInstance, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Class indices (into hidden_class_table) of exact hidden-model draws."""
    _, log_count, log_weight = inst.hidden_class_table
    t = log_count + log_weight
    p = np.exp(t - logsumexp(t))
    p /= p.sum()
    return rng.choice(len(p), size=size, p=p)


def sample_hidden_potts(inst: PottsInstance, rng: np.random.Generator) -> Configuration:
    """An exact draw from the hidden Gibbs distribution mu_{F*}.

    Samples the joint (sig_H, sig_K) signature pair from its exact
    distribution, then realizes it by uniformly random color placements.
    """
    descriptors, _, _ = inst.hidden_class_table
    k = int(sample_hidden_potts_classes(inst, rng, 1)[0])
    sig_h, sig_k = descriptors[k]
    block = _place_colors(inst.N, sig_k, rng)
    hpart = _place_colors(inst.m, sig_h, rng)
    return Configuration(tuple(block + hpart))


def _place_colors(n: int, sig: tuple[int, ...], rng: np.random.Generator) -> list[int]:
    colors: list[int] = []
    for c, cnt in enumerate(sig):
        colors.extend([c] * cnt)
    perm = rng.permutation(n)
    out = [0] * n
    for pos, c in zip(perm, colors):
        out[int(pos)] = c
    return out
