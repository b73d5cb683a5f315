"""Two-hub Ising testing instances.

Two variants over a base Ising graph G on N vertices:

* ``antiferro``: zero field; every base vertex is joined to each hub s1, s2
  by ``n_uv`` disjoint 2-paths (both edges -beta1), and the hubs are joined
  by ``n_ss`` disjoint 3-paths (all three edges -beta2).  The hidden model
  replaces G by an independent set.
* ``ferro-field``: uniform coupling beta_hat > 0 and a per-vertex field that
  puts weight h_hat on exactly one of the two spins; hubs carry ``n_ss``
  pendant vertices each with edge weight beta2 and field (h,0) on s1's
  pendants, (0,h) on s2's, with h = beta2.  The hidden model replaces G by
  K_N with beta_K = beta_hat + 4 ln 2, fields preserved.

Defaults n_uv = N and n_ss = N^2 give the canonical n = 4N^2 + N + 2 vertex
count; both multiplicities are overridable for small exact cross-checks.

Vertex layout: base block 0..N-1, s1 = N, s2 = N+1, then u-vertices grouped
by (base vertex, hub), then the w-vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import GuardViolation, InvalidModelError, TargetUnreachableError
from .model import (
    Configuration,
    SpinSystem,
    classify_field,
    FIELD_ZERO,
)
from .exact import CollapsedSpace
from .potts import ANSWER_HIGH, ANSWER_LOW, testing_rate

VARIANT_ANTIFERRO = "antiferro"
VARIANT_FERRO = "ferro-field"


def g_antiferro(x: float) -> float:
    """g(x) = (3 e^{-2x} + 1) / (e^{-3x} + 3 e^{-x}); increasing, g(0)=1."""
    return (3.0 * math.exp(-2.0 * x) + 1.0) / (math.exp(-3.0 * x) + 3.0 * math.exp(-x))


@dataclass(frozen=True)
class HubInstance:
    variant: str
    visible: SpinSystem
    hidden: SpinSystem
    N: int
    n_uv: int
    n_ss: int
    beta1: float
    beta2: float
    h: float
    beta_G: float  # uniform base coupling (beta_hat for the ferro variant)
    h_hat: float
    beta_K: float
    log_Zhat: float
    r: float
    epsilon: float
    L: int
    # antiferro: log of the base ground-state exponent e^{sum of couplings}
    # (-0.9N canonically); ferro: log of the two-color monochromatic weight sum.
    log_Zmono: float
    field_spins: tuple[int, ...]  # ferro variant: per-base-vertex field spin

    @property
    def s1(self) -> int:
        return self.N

    @property
    def s2(self) -> int:
        return self.N + 1

    @cached_property
    def hidden_class_table(self) -> tuple[tuple, np.ndarray, np.ndarray]:
        """Type classes of the hidden model: (descriptors, log_count, log_weight)."""
        return _hidden_type_table(self)


# -- log helpers for the auxiliary-vertex factors ----------------------------


def _u_factors(variant: str, beta1: float, n_uv: int) -> tuple[float, float]:
    """Per-(vertex, hub) log factor from summing out the n_uv path vertices:
    (value when sigma(v) == sigma(hub), value when they differ)."""
    s = -1.0 if variant == VARIANT_ANTIFERRO else 1.0
    same = n_uv * float(np.logaddexp(2.0 * s * beta1, 0.0))
    diff = n_uv * (math.log(2.0) + s * beta1)
    return same, diff


def _w_factor_antiferro(beta2: float, same_hubs: bool) -> float:
    """Log factor of one s1-w1-w2-s2 path (all edges -beta2), hub spins fixed."""
    if same_hubs:
        return float(logsumexp([-3.0 * beta2, math.log(3.0) - beta2]))
    return float(logsumexp([math.log(3.0) - 2.0 * beta2, 0.0]))


def _pendant_factor(beta2: float, h: float, hub_matches_field: bool) -> float:
    """Log factor of one pendant: sum over its spin of exp(beta2*(match) + field)."""
    if hub_matches_field:
        return float(np.logaddexp(beta2 + h, 0.0))
    return float(np.logaddexp(beta2, h))


def _w_factor_ferro(beta2: float, h: float, c1: int, c2: int) -> float:
    """Log of the product of the two hubs' single-pendant factors.

    s1's pendants have field on spin 0, s2's on spin 1.
    """
    return _pendant_factor(beta2, h, c1 == 0) + _pendant_factor(beta2, h, c2 == 1)


# -- solvers ------------------------------------------------------------------


def _bisect_increasing(fn, target: float, lo: float, hi: float, iters: int = 200) -> float:
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_beta2_antiferro(
    beta1: float,
    N: int,
    log_Zhat: float,
    epsilon: float,
    L: int,
    *,
    log_Zmono: Optional[float] = None,
    n_ss: Optional[int] = None,
) -> float:
    """Solve (g(beta2)/cosh(beta1))^{n_ss} into the window
    [1/2, 1] / sqrt(eps L + 1) * exp(log_Zmono) / Zhat; beta2 in (0, beta1+2).
    """
    if n_ss is None:
        n_ss = N * N
    if log_Zmono is None:
        log_Zmono = -0.9 * N
    log_hi = -0.5 * math.log(epsilon * L + 1) + log_Zmono - log_Zhat
    log_lo = log_hi - math.log(2.0)
    target = 0.5 * (log_lo + log_hi) / n_ss + math.log(math.cosh(beta1))

    def log_g(x: float) -> float:
        return math.log(g_antiferro(x))

    hi_x = beta1 + 2.0
    if not log_g(0.0) <= target <= log_g(hi_x):
        raise TargetUnreachableError(
            f"beta2 target log g = {target:.6g} outside achievable "
            f"[{log_g(0.0):.6g}, {log_g(hi_x):.6g}]",
            achieved_range=(log_g(0.0), log_g(hi_x)),
        )
    beta2 = _bisect_increasing(log_g, target, 0.0, hi_x)
    achieved = n_ss * (log_g(beta2) - math.log(math.cosh(beta1)))
    if not log_lo <= achieved <= log_hi:
        raise TargetUnreachableError(
            f"beta2 bisection landed outside the window: {achieved:.6g} "
            f"not in [{log_lo:.6g}, {log_hi:.6g}]"
        )
    return beta2


def solve_beta2_ferro(
    beta1: float,
    N: int,
    log_Zhat: float,
    log_Zmono: float,
    epsilon: float,
    L: int,
    *,
    n_ss: Optional[int] = None,
) -> float:
    """Solve (cosh(beta2)/cosh(beta1))^{n_ss} into the window
    [1/3, 1/2] / sqrt(eps L + 1) * Zmono / Zhat; beta2 in (0, beta1).
    """
    if n_ss is None:
        n_ss = N * N
    log_hi = -math.log(2.0) - 0.5 * math.log(epsilon * L + 1) + log_Zmono - log_Zhat
    log_lo = log_hi - math.log(1.5)
    target = 0.5 * (log_lo + log_hi) / n_ss + math.log(math.cosh(beta1))

    def log_cosh(x: float) -> float:
        return math.log(math.cosh(x))

    if not 0.0 <= target <= log_cosh(beta1):
        raise TargetUnreachableError(
            f"beta2 target log cosh = {target:.6g} outside achievable "
            f"[0, {log_cosh(beta1):.6g}]",
            achieved_range=(0.0, log_cosh(beta1)),
        )
    beta2 = _bisect_increasing(log_cosh, target, 0.0, beta1)
    achieved = n_ss * (log_cosh(beta2) - log_cosh(beta1))
    if not log_lo <= achieved <= log_hi:
        raise TargetUnreachableError(
            f"beta2 bisection landed outside the window: {achieved:.6g} "
            f"not in [{log_lo:.6g}, {log_hi:.6g}]"
        )
    return beta2


# -- builder -------------------------------------------------------------------


def _base_params(G: SpinSystem, variant: str, strict_family: bool) -> tuple[float, float, tuple[int, ...]]:
    if G.q != 2:
        raise InvalidModelError("hub constructions require Ising base graphs (q=2)")
    betas = {b for _, _, b in G.edges}
    if len(betas) != 1:
        raise InvalidModelError("base graph must have uniform couplings")
    beta_G = next(iter(betas))
    if variant == VARIANT_ANTIFERRO:
        if classify_field(G) != FIELD_ZERO:
            raise InvalidModelError("antiferro variant requires a zero field")
        if beta_G >= 0:
            raise InvalidModelError("antiferro variant requires a negative coupling")
        if strict_family:
            if not np.all(G.degrees == 3):
                raise InvalidModelError("canonical antiferro family is 3-regular")
            if not math.isclose(beta_G, -0.6, abs_tol=1e-12):
                raise InvalidModelError("canonical antiferro family has beta_G = -0.6")
        return beta_G, 0.0, ()
    if variant == VARIANT_FERRO:
        if beta_G <= 0:
            raise InvalidModelError("ferro variant requires a positive coupling")
        h = G.field_array
        field_spins = []
        h_vals = set()
        for v in range(G.n):
            nz = np.flatnonzero(h[v])
            if len(nz) != 1 or h[v, nz[0]] <= 0:
                raise InvalidModelError(
                    "ferro variant requires exactly one positive field entry per vertex"
                )
            field_spins.append(int(nz[0]))
            h_vals.add(float(h[v, nz[0]]))
        if len(h_vals) != 1:
            raise InvalidModelError("ferro variant requires a uniform field magnitude")
        return beta_G, h_vals.pop(), tuple(field_spins)
    raise InvalidModelError(f"unknown variant {variant!r}")


def log_Zmono_of(G: SpinSystem) -> float:
    """Log of the summed weights of the two monochromatic base configurations."""
    log_e = sum(b for _, _, b in G.edges)
    h = G.field_array
    return float(logsumexp([log_e + h[:, 0].sum(), log_e + h[:, 1].sum()]))


def build_hub_instance(
    G: SpinSystem,
    variant: str,
    epsilon: float,
    L: int,
    log_Zhat: float,
    *,
    beta1: Optional[float] = None,
    beta2: Optional[float] = None,
    n_uv: Optional[int] = None,
    n_ss: Optional[int] = None,
    enforce_guard: bool = True,
    strict_family: bool = True,
) -> HubInstance:
    beta_G, h_hat, field_spins = _base_params(G, variant, strict_family)
    N = G.n
    if n_uv is None:
        n_uv = N
    if n_ss is None:
        n_ss = N * N
    r = testing_rate(epsilon, L)
    if variant == VARIANT_ANTIFERRO:
        # Ground-state exponent of the base family: e^{sum of couplings}
        # (= e^{-0.9N} for the canonical 3-regular beta_G = -0.6 family).
        log_Zmono = float(sum(b for _, _, b in G.edges))
    else:
        log_Zmono = log_Zmono_of(G)

    if variant == VARIANT_ANTIFERRO:
        floor = math.log(r) + N * math.log(2.0) + log_Zmono
        ceiling = N * math.log(2.0) - math.log(r)
    else:
        floor = math.log(r) + log_Zmono
        ceiling = 0.5 * (beta_G + h_hat + 1.0) * N * N - math.log(r)
    if enforce_guard:
        if log_Zhat < floor:
            raise GuardViolation("below", ANSWER_HIGH, f"log Zhat {log_Zhat:.4g} < floor {floor:.4g}")
        if log_Zhat > ceiling:
            raise GuardViolation("above", ANSWER_LOW, f"log Zhat {log_Zhat:.4g} > ceiling {ceiling:.4g}")

    if beta1 is None:
        beta1 = 3.0 if variant == VARIANT_ANTIFERRO else 0.5 * (beta_G + h_hat + 5.0)
    if beta2 is None:
        if variant == VARIANT_ANTIFERRO:
            beta2 = solve_beta2_antiferro(
                beta1, N, log_Zhat, epsilon, L, log_Zmono=log_Zmono, n_ss=n_ss
            )
        else:
            beta2 = solve_beta2_ferro(
                beta1, N, log_Zhat, log_Zmono, epsilon, L, n_ss=n_ss
            )
    h = beta2 if variant == VARIANT_FERRO else 0.0

    beta_K = beta_G + 4.0 * math.log(2.0) if variant == VARIANT_FERRO else 0.0
    visible = _assemble_hub(
        variant, N, n_uv, n_ss, beta1, beta2, h, G.edges, G.field
    )
    if variant == VARIANT_ANTIFERRO:
        hidden_edges: tuple = ()
        hidden_field: tuple = ()
    else:
        hidden_edges = tuple((i, j, beta_K) for i in range(N) for j in range(i + 1, N))
        hidden_field = G.field
    hidden = _assemble_hub(
        variant, N, n_uv, n_ss, beta1, beta2, h, hidden_edges, hidden_field
    )
    return HubInstance(
        variant=variant,
        visible=visible,
        hidden=hidden,
        N=N,
        n_uv=n_uv,
        n_ss=n_ss,
        beta1=beta1,
        beta2=beta2,
        h=h,
        beta_G=beta_G,
        h_hat=h_hat,
        beta_K=beta_K,
        log_Zhat=log_Zhat,
        r=r,
        epsilon=epsilon,
        L=L,
        log_Zmono=log_Zmono,
        field_spins=field_spins,
    )


def _assemble_hub(
    variant: str,
    N: int,
    n_uv: int,
    n_ss: int,
    beta1: float,
    beta2: float,
    h: float,
    base_edges: tuple,
    base_field: tuple,
) -> SpinSystem:
    s1, s2 = N, N + 1
    sign = -1.0 if variant == VARIANT_ANTIFERRO else 1.0
    edges = list(base_edges)
    field = list(base_field)
    nxt = N + 2
    for v in range(N):
        for hub in (s1, s2):
            for _ in range(n_uv):
                u = nxt
                nxt += 1
                edges.append((v, u, sign * beta1))
                edges.append((u, hub, sign * beta1))
    if variant == VARIANT_ANTIFERRO:
        for _ in range(n_ss):
            w1, w2 = nxt, nxt + 1
            nxt += 2
            edges.append((s1, w1, -beta2))
            edges.append((w1, w2, -beta2))
            edges.append((w2, s2, -beta2))
    else:
        for _ in range(n_ss):
            w = nxt
            nxt += 1
            edges.append((s1, w, beta2))
            field.append((w, 0, h))
        for _ in range(n_ss):
            w = nxt
            nxt += 1
            edges.append((s2, w, beta2))
            field.append((w, 1, h))
    return SpinSystem(q=2, n=nxt, edges=tuple(edges), field=tuple(field))


# -- closed forms ---------------------------------------------------------------


def closed_form_phase(
    inst: HubInstance, which: str, log_ZG: Optional[float] = None
) -> tuple[float, float]:
    """(log Z^D, log Z^{M0}) from the per-variant closed forms.

    Z^D sums over configurations with sigma(s1) != sigma(s2); Z^{M0} over
    hubs equal and the whole base block monochromatic in the hub spin.
    ``log_ZG`` overrides the base-block partition value (computed by brute
    force otherwise).
    """
    base = _base_block(inst, which)
    if log_ZG is None:
        from .exact import partition_log

        log_ZG = partition_log(base)
    log_zmono = log_Zmono_of(base)
    same_u, diff_u = _u_factors(inst.variant, inst.beta1, 1)
    if inst.variant == VARIANT_ANTIFERRO:
        log_zd = (
            math.log(2.0)
            + inst.n_ss * _w_factor_antiferro(inst.beta2, same_hubs=False)
            + inst.N * inst.n_uv * (same_u + diff_u)
            + log_ZG
        )
        # Z^{M0} sums over the two colors c of (w-factor)(u-factor)(mono
        # weight of color c); the mono weights are already both inside
        # log_zmono, so no extra hub factor appears.
        log_zm0 = (
            inst.n_ss * _w_factor_antiferro(inst.beta2, same_hubs=True)
            + 2 * inst.N * inst.n_uv * same_u
            + log_zmono
        )
        return log_zd, log_zm0
    # ferro-field variant
    a = _pendant_factor(inst.beta2, inst.h, True)  # hub spin matches pendant field
    b = _pendant_factor(inst.beta2, inst.h, False)
    log_zd = (
        float(logsumexp([2 * inst.n_ss * a, 2 * inst.n_ss * b]))
        + inst.N * inst.n_uv * (same_u + diff_u)
        + log_ZG
    )
    # For hubs equal to c: s1 pendants give a if c==0 else b; s2 pendants give
    # b if c==0 else a; the product is a+b either way, but the base mono
    # weights differ per color, so sum the two colors explicitly.
    log_e = sum(bb for _, _, bb in base.edges)
    hmat = base.field_array
    per_color = [
        inst.n_ss * (a + b) + 2 * inst.N * inst.n_uv * same_u + log_e + hmat[:, c].sum()
        for c in (0, 1)
    ]
    log_zm0 = float(logsumexp(per_color))
    return log_zd, log_zm0


def _base_block(inst: HubInstance, which: str) -> SpinSystem:
    N = inst.N
    if which == "visible":
        src = inst.visible
    elif which == "hidden":
        src = inst.hidden
    else:
        raise InvalidModelError(f"which must be visible|hidden, got {which!r}")
    edges = tuple((u, v, b) for u, v, b in src.edges if u < N and v < N)
    field = tuple((v, s, h) for v, s, h in src.field if v < N)
    return SpinSystem(q=2, n=N, edges=edges, field=field)


def log_ratio_D_over_M0(inst: HubInstance, which: str, log_ZG: Optional[float] = None) -> float:
    zd, zm0 = closed_form_phase(inst, which, log_ZG)
    return zd - zm0


# -- collapsed spaces ------------------------------------------------------------


def collapsed_distribution_hub(inst: HubInstance, which: str) -> CollapsedSpace:
    """Exact collapsed space over (spin s1, spin s2, base-block configuration).

    The path, pendant and clique auxiliary vertices integrate out; their
    conditional law given the class is identical in the visible and hidden
    models, so tv_collapsed over these classes equals the full-model TV.
    """
    base = _base_block(inst, which)
    N = inst.N
    n_block = 1 << N
    idx = np.arange(n_block, dtype=np.int64)
    spins = ((idx[:, None] >> np.arange(N)[None, :]) & 1).astype(np.int8)
    block_lw = np.zeros(n_block, dtype=float)
    for u, v, b in base.edges:
        block_lw += b * (spins[:, u] == spins[:, v])
    if base.field:
        hmat = base.field_array
        for v in range(N):
            block_lw += hmat[v][spins[:, v]]
    same_u, diff_u = _u_factors(inst.variant, inst.beta1, inst.n_uv)

    descriptors = []
    log_weight = np.empty(4 * n_block, dtype=float)
    pos = 0
    for c1 in (0, 1):
        for c2 in (0, 1):
            k1 = (spins == c1).sum(axis=1)
            k2 = (spins == c2).sum(axis=1)
            ufac = (k1 + k2) * same_u + (2 * N - k1 - k2) * diff_u
            if inst.variant == VARIANT_ANTIFERRO:
                wfac = inst.n_ss * _w_factor_antiferro(inst.beta2, same_hubs=(c1 == c2))
            else:
                wfac = inst.n_ss * _w_factor_ferro(inst.beta2, inst.h, c1, c2)
            log_weight[pos : pos + n_block] = block_lw + ufac + wfac
            descriptors.extend(
                (c1, c2, tuple(int(s) for s in row)) for row in spins
            )
            pos += n_block
    return CollapsedSpace(
        descriptors=tuple(descriptors),
        log_count=np.zeros(4 * n_block, dtype=float),
        log_weight=log_weight,
    )


def collapsed_class_of(inst: HubInstance, sigma) -> tuple:
    spins = sigma.spins if isinstance(sigma, Configuration) else tuple(sigma)
    return (spins[inst.s1], spins[inst.s2], tuple(spins[: inst.N]))


# -- hidden type table and exact sampler ------------------------------------------


def _hidden_type_table(inst: HubInstance) -> tuple[tuple, np.ndarray, np.ndarray]:
    N = inst.N
    same_u, diff_u = _u_factors(inst.variant, inst.beta1, inst.n_uv)
    descriptors: list[tuple] = []
    log_count: list[float] = []
    log_weight: list[float] = []
    if inst.variant == VARIANT_ANTIFERRO:
        # classes (c1, c2, k): k = number of spin-0 base vertices
        for c1 in (0, 1):
            for c2 in (0, 1):
                wfac = inst.n_ss * _w_factor_antiferro(inst.beta2, same_hubs=(c1 == c2))
                for k in range(N + 1):
                    agree = (k if c1 == 0 else N - k) + (k if c2 == 0 else N - k)
                    descriptors.append((c1, c2, k))
                    log_count.append(float(gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)))
                    log_weight.append(agree * same_u + (2 * N - agree) * diff_u + wfac)
    else:
        # classes (c1, c2, ka, kb): spin-0 counts within the two field groups
        group_a = [v for v, s in enumerate(inst.field_spins) if s == 0]
        group_b = [v for v, s in enumerate(inst.field_spins) if s == 1]
        na, nb = len(group_a), len(group_b)
        hh = inst.h_hat
        bk = inst.beta_K
        for c1 in (0, 1):
            for c2 in (0, 1):
                wfac = inst.n_ss * _w_factor_ferro(inst.beta2, inst.h, c1, c2)
                for ka in range(na + 1):
                    for kb in range(nb + 1):
                        k = ka + kb
                        agree = (k if c1 == 0 else N - k) + (k if c2 == 0 else N - k)
                        mono = k * (k - 1) // 2 + (N - k) * (N - k - 1) // 2
                        fld = hh * ka + hh * (nb - kb)
                        descriptors.append((c1, c2, ka, kb))
                        log_count.append(
                            float(
                                gammaln(na + 1) - gammaln(ka + 1) - gammaln(na - ka + 1)
                                + gammaln(nb + 1) - gammaln(kb + 1) - gammaln(nb - kb + 1)
                            )
                        )
                        log_weight.append(
                            agree * same_u
                            + (2 * N - agree) * diff_u
                            + wfac
                            + bk * mono
                            + fld
                        )
    return tuple(descriptors), np.asarray(log_count), np.asarray(log_weight)


def sample_hidden_hub_classes(
    inst: HubInstance, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Class indices (into hidden_class_table) of exact hidden-model draws."""
    _, log_count, log_weight = inst.hidden_class_table
    t = log_count + log_weight
    p = np.exp(t - logsumexp(t))
    p /= p.sum()
    return rng.choice(len(p), size=size, p=p)


def sample_hidden_hub(inst: HubInstance, rng: np.random.Generator) -> Configuration:
    """Exact draw from the hidden Gibbs distribution.

    Samples the type class, places the base-block spins uniformly within the
    class, then draws every auxiliary vertex from its exact conditional given
    its neighbors.
    """
    descriptors, _, _ = inst.hidden_class_table
    idx = int(sample_hidden_hub_classes(inst, rng, 1)[0])
    N = inst.N
    if inst.variant == VARIANT_ANTIFERRO:
        c1, c2, k = descriptors[idx]
        zeros = rng.permutation(N)[:k]
        block = np.ones(N, dtype=np.int8)
        block[zeros] = 0
    else:
        c1, c2, ka, kb = descriptors[idx]
        group_a = [v for v, s in enumerate(inst.field_spins) if s == 0]
        group_b = [v for v, s in enumerate(inst.field_spins) if s == 1]
        block = np.ones(N, dtype=np.int8)
        block[rng.permutation(np.asarray(group_a, dtype=np.int64))[:ka]] = 0
        block[rng.permutation(np.asarray(group_b, dtype=np.int64))[:kb]] = 0

    spins = [int(s) for s in block] + [c1, c2]
    sign = -1.0 if inst.variant == VARIANT_ANTIFERRO else 1.0
    for v in range(N):
        for hub_spin in (c1, c2):
            for _ in range(inst.n_uv):
                lw0 = sign * inst.beta1 * ((0 == spins[v]) + (0 == hub_spin))
                lw1 = sign * inst.beta1 * ((1 == spins[v]) + (1 == hub_spin))
                p0 = 1.0 / (1.0 + math.exp(lw1 - lw0))
                spins.append(0 if rng.random() < p0 else 1)
    if inst.variant == VARIANT_ANTIFERRO:
        for _ in range(inst.n_ss):
            opts = [(a, b) for a in (0, 1) for b in (0, 1)]
            lws = [
                -inst.beta2 * ((a == c1) + (a == b) + (b == c2)) for a, b in opts
            ]
            probs = np.exp(np.asarray(lws) - logsumexp(lws))
            probs /= probs.sum()
            a, b = opts[int(rng.choice(4, p=probs))]
            spins.extend([a, b])
    else:
        for hub_spin, field_spin in ((c1, 0), (c2, 1)):
            for _ in range(inst.n_ss):
                lw0 = inst.beta2 * (0 == hub_spin) + (inst.h if field_spin == 0 else 0.0)
                lw1 = inst.beta2 * (1 == hub_spin) + (inst.h if field_spin == 1 else 0.0)
                p0 = 1.0 / (1.0 + math.exp(lw1 - lw0))
                spins.append(0 if rng.random() < p0 else 1)
    return Configuration(tuple(spins))
