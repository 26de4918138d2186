"""Generator constructions assembled from the primitive samplers: the
p-group PRG (small-bias XOR derandomized power-residue noise), the
hash-matrix generator for mixing groups, the noise layer D + (T and base),
width reduction for long products, the one-iteration composition and its
iteration driver, spill-tolerant variants, and the commutative linear-form
reduction with a pluggable fooler.

Every constant the analysis leaves unspecified is a named parameter with a
formula default ("asymptotic") and an optional calibrated override shipped as
data; specs record which was used.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import ff
from .groups import FiniteGroup, NotAPGroup, catalog_group, classify_p_group
from .models import Block, BlockProduct, SpillFactor, eval_many
from .polycompile import compile_program
from .reps import Irrep, irrep_catalog, is_mixing
from .samplers import (FKLayer, KWiseHash, Sampler, SmallBiasF2,
                       XorCombine, almost_kwise_biased, kwise_bits,
                       power_residue_bits, small_bias_f2, viola_sum,
                       xor_combine)
from . import models


class PRGError(ValueError):
    pass


class NotMixing(PRGError):
    pass


class NotCommutative(PRGError):
    pass


class UnsupportedGroup(PRGError):
    pass


@dataclass
class PRGSpec:
    construction: str
    group: str
    n: int
    eps: float
    params: dict
    sampler: Sampler
    target: dict = field(default_factory=dict)

    @property
    def seed_len(self) -> int:
        """Total bit length = sum of component bit lengths (concatenation)."""
        return sum(s for _, s in self.components())

    def components(self) -> list[tuple[str, int]]:
        out: list[tuple[str, int]] = []

        def walk(s: Sampler):
            if isinstance(s, XorCombine):
                for part in s.parts:
                    walk(part)
            elif isinstance(s, FKLayer):
                walk(s.D)
                walk(s.T)
                walk(s.base)
            else:
                out.append((s.spec, s.seed_len))

        walk(self.sampler)
        return out

    def to_json(self) -> str:
        return json.dumps({
            "construction": self.construction,
            "group": self.group,
            "n": self.n,
            "eps": self.eps,
            "params": self.params,
            "target": self.target,
            "seed_len": self.seed_len,
            "components": [{"spec": s, "seed_len": b}
                           for s, b in self.components()],
        }, indent=1)


# ---------------------------------------------------------------------------
# Calibrated parameter store

_CAL_CACHE: dict | None = None


def calibrated_params() -> dict:
    global _CAL_CACHE
    if _CAL_CACHE is None:
        try:
            text = resources.files("grouprg").joinpath(
                "data/calibrated.json").read_text()
            _CAL_CACHE = json.loads(text)
        except FileNotFoundError:
            _CAL_CACHE = {}
    return _CAL_CACHE


def _lookup_calibrated(construction: str, group: str) -> dict | None:
    return calibrated_params().get(f"{construction}/{group}")


# ---------------------------------------------------------------------------
# p-group PRG

_DEGREE_CACHE: dict[str, int] = {}


def group_poly_degree(G: FiniteGroup, probes: int = 20, n: int = 8) -> int:
    """Measured compile-degree constant for a p-group: the max degree over a
    deterministic probe corpus (per-program degree can drop on special
    element choices; the max is stable across n and seeds)."""
    if G.name in _DEGREE_CACHE:
        return _DEGREE_CACHE[G.name]
    rng = np.random.default_rng(12345)
    best = 0
    for _ in range(probes):
        elems = [int(g) for g in rng.integers(1, G.order, size=n)]
        P = compile_program(models.group_program(G, elems))
        best = max(best, P.degree())
    _DEGREE_CACHE[G.name] = best
    return best


def prg_p_group(G: FiniteGroup, n: int, eps: float,
                params: dict | None = None, mode: str = "calibrated") -> PRGSpec:
    """XOR of a small-bias layer with derandomized biased-bit noise:
    X xor power_residue(viola_sum(., p, degree*(p-1), .)).

    For p = 2 the power-residue map is the identity and the construction
    degenerates to an XOR of small-bias samplers.
    """
    cls = classify_p_group(G)
    if cls is None:
        raise NotAPGroup(f"{G.name} is not a p-group")
    p, _ = cls
    c_G = group_poly_degree(G)
    d = max(1, c_G * (p - 1))
    cal = _lookup_calibrated("pgroup", G.name) if mode == "calibrated" else None
    if params is None:
        if cal is not None:
            params = dict(cal)
            params["provenance"] = "calibrated"
        else:
            # formula defaults: both layers polynomially small in eps/n
            params = {"eps1": eps / (2 * n), "eps2": eps / (2 * n),
                      "provenance": "asymptotic"}
    params = dict(params)
    params.setdefault("provenance", "explicit")
    params["degree"] = d
    # an explicit field-degree knob implies the provable bias bound n / 2^m
    if "m1" in params and "eps1" not in params:
        params["eps1"] = n / 2.0 ** int(params["m1"])
    if "m2" in params and "eps2" not in params:
        params["eps2"] = n / 2.0 ** int(params["m2"])
    X = small_bias_f2(n, float(params["eps1"]), params.get("m1"))
    noise = viola_sum(n, p, d, float(params["eps2"]), params.get("m2"))
    Xp = power_residue_bits(noise)
    sampler = xor_combine(X, Xp)
    return PRGSpec("pgroup", G.name, n, eps, params, sampler,
                   target={"ell": n, "w": 1, "q": 0, "any_order": True})


def prg_spill_pgroup(G: FiniteGroup, n: int, eps: float,
                     params: dict | None = None,
                     mode: str = "calibrated") -> PRGSpec:
    """Spill-tolerant p-group PRG for (n, 1, 3 log(1/eps))-products: the same
    XOR of small-bias copies with every per-copy bias tightened by
    2^(3 log(1/eps) + 1), so conditioning on the spill bits keeps each copy
    small-bias."""
    qhat = max(0, math.ceil(3 * math.log2(1 / eps)))
    cal = _lookup_calibrated("spill-pgroup", G.name) if mode == "calibrated" else None
    if params is None and cal is not None:
        params = dict(cal)
        params["provenance"] = "calibrated"
    if params is None:
        tighten = 2.0 ** (qhat + 1)
        params = {"eps1": eps / (2 * n) / tighten,
                  "eps2": eps / (2 * n) / tighten,
                  "provenance": "asymptotic"}
    spec = prg_p_group(G, n, eps, params, mode="explicit")
    spec.construction = "spill-pgroup"
    spec.params["spill_budget"] = qhat
    spec.target = {"ell": n, "w": 1, "q": qhat, "any_order": True}
    return spec


# ---------------------------------------------------------------------------
# Mixing-group hash-matrix PRG


class HashMatrixSampler(Sampler):
    """Core of the mixing-group generator.

    Output bit j of layer i is h_i(j) * M[i, h(j)] where M is an L x R
    uniform bit matrix, h hashes positions into R columns, and the level
    indicators h_i(j) = [first i bits of H(j) are zero] share one k-wise
    function H (marginals exactly 2^-i).  Layers are XORed together.

    Exact distribution: conditioned on (H, h) the output is a uniform
    distribution over an F_2-linear image of M, so only the hash seeds are
    enumerated.
    """

    def __init__(self, n: int, levels: int, columns: int, k_levels: int,
                 k_columns: int):
        if columns & (columns - 1):
            raise PRGError("column count must be a power of two")
        self.n, self.p = n, 2
        self.L = levels
        self.R = columns
        self.H = KWiseHash(n, levels, k_levels)
        self.h = KWiseHash(n, int(math.log2(columns)), k_columns)
        self.seed_count = (self.H.seed_count * self.h.seed_count
                           * 2 ** (self.L * self.R))
        self.guarantee = "hash-matrix"
        self.spec = (f"hm(n={n},L={levels},R={columns},"
                     f"kH={k_levels},kh={k_columns})")

    @property
    def seed_len(self) -> int:
        return self.H.seed_len + self.h.seed_len + self.L * self.R

    def sample(self, seed: int) -> np.ndarray:
        sH = seed % self.H.seed_count
        seed //= self.H.seed_count
        sh = seed % self.h.seed_count
        M = seed // self.h.seed_count
        hv = self.H.sample(sH)
        cols = self.h.sample(sh)
        out = np.zeros(self.n, dtype=np.int64)
        for i in range(self.L):
            active = (hv & ((1 << i) - 1)) == 0
            mbits = (M >> (i * self.R + cols)) & 1
            out ^= active * mbits
        return out

    def _column_vectors(self, hv: np.ndarray, cols: np.ndarray) -> list[int]:
        vecs = []
        for i in range(self.L):
            active = (hv & ((1 << i) - 1)) == 0
            for c in range(self.R):
                mask = 0
                sel = active & (cols == c)
                for j in np.nonzero(sel)[0]:
                    mask |= 1 << int(j)
                if mask:
                    vecs.append(mask)
        return vecs

    def _exact_distribution(self):
        size = 1 << self.n
        dist = np.zeros(size)
        pairs = self.H.seed_count * self.h.seed_count
        if pairs > 1 << 22:
            raise PRGError("hash seed space too large for exact mode")
        for sH in range(self.H.seed_count):
            hv = self.H.sample(sH)
            for sh in range(self.h.seed_count):
                cols = self.h.sample(sh)
                # Gaussian elimination over the column vectors
                basis: list[int] = []
                for v in self._column_vectors(hv, cols):
                    for b in basis:
                        v = min(v, v ^ b)
                    if v:
                        basis.append(v)
                            # image points by span doubling
                pts = np.zeros(1, dtype=np.int64)
                for b in basis:
                    pts = np.concatenate([pts, pts ^ b])
                dist[pts] += 1.0 / (pairs * len(pts))
        return dist


def prg_mixing(G: FiniteGroup, n: int, eps: float,
               params: dict | None = None, mode: str = "calibrated") -> PRGSpec:
    """Mixing-group generator: XOR of an almost-k-wise layer with log n
    hash-matrix guess layers (one per doubling guess of the number of
    non-identity irrep images)."""
    S = irrep_catalog(G.name)
    mixing, theta = is_mixing(S)
    if not mixing:
        raise NotMixing(f"{G.name} is not mixing")
    cal = _lookup_calibrated("mixing", G.name) if mode == "calibrated" else None
    if params is None and cal is not None:
        params = dict(cal)
        params["provenance"] = "calibrated"
    if params is None:
        kappa = 2.0
        ellp = max(1, math.ceil(kappa * math.log2(1 / eps)))
        params = {
            "kappa": kappa,
            "ellprime": ellp,
            "columns": 1 << math.ceil(math.log2(10 * ellp)),
            "k_levels": min(10 * ellp, n),
            "k_columns": min(5 * ellp, n),
            "k_wise": math.ceil(2 * kappa * math.log2(1 / eps)),
            "deltaA": eps / 4,
            "include_A": True,
            "provenance": "asymptotic",
        }
    params = dict(params)
    params.setdefault("include_A", True)
    params.setdefault("provenance", "explicit")
    levels = max(1, math.ceil(math.log2(max(n, 2))))
    core = HashMatrixSampler(n, levels, int(params["columns"]),
                             int(params["k_levels"]), int(params["k_columns"]))
    parts: list[Sampler] = []
    if params["include_A"]:
        parts.append(small_bias_f2(n, float(params["deltaA"]),
                                   params.get("mA")))
    parts.append(core)
    sampler = xor_combine(*parts) if len(parts) > 1 else core
    params["theta"] = theta
    return PRGSpec("mixing", G.name, n, eps, params, sampler,
                   target={"ell": n, "w": 1, "q": 0, "any_order": True})


# ---------------------------------------------------------------------------
# Noise layer and width reduction


def fk_layer(base: Sampler, D: Sampler, T: Sampler) -> FKLayer:
    """Output D xor (T and base); seeds concatenate."""
    return FKLayer(base, D, T)


def fk_layer_params(w: int, ell: int, m: int, eps: float, C: float = 2.0,
                    delta: float | None = None) -> dict:
    """The short-product noise-layer parameter schedule:
    k = C (w + log(ell/eps)), delta = (m w)^-k, T marginal 2^-C."""
    k = max(1, math.ceil(C * (w + math.log2(max(ell, 2) / eps))))
    if delta is None:
        delta = float(max(m * max(w, 2), 2)) ** (-k)
        delta = max(delta, 1e-12)  # desk-scale floor for seedable samplers
    return {"k": k, "delta": delta, "b": max(1, round(C)), "C": C}


def prg_long_products(P1: PRGSpec | Sampler, theta: float, w: int, eps: float,
                      n: int | None = None, params: dict | None = None) -> PRGSpec:
    """Width reduction for long products: P = D + (T and P1) with D, T
    almost-k-wise, T marginal 2^-b.

    Defaults follow the schedule k = C(log(1/eps)+w), delta = theta^k,
    p = 2^-23w * theta^3; pass desk-scale overrides through params
    (keys k, delta, b, m_D, m_T)."""
    base = P1.sampler if isinstance(P1, PRGSpec) else P1
    n = n if n is not None else base.n
    if params is None:
        C = 2.0
        k = max(1, math.ceil(C * (math.log2(1 / eps) + w)))
        delta = max(theta ** k, 1e-12)
        b = max(1, math.ceil(23 * w + 3 * math.log2(1 / theta)))
        params = {"k": k, "delta": delta, "b": b, "provenance": "asymptotic"}
    params = dict(params)
    params.setdefault("provenance", "explicit")
    D = almost_kwise_biased(n, 1, int(params["k"]), float(params["delta"]),
                            params.get("m_D"))
    T = almost_kwise_biased(n, int(params["b"]), int(params["k"]),
                            float(params["delta"]), params.get("m_T"))
    sampler = FKLayer(base, D, T)
    gname = P1.group if isinstance(P1, PRGSpec) else "matrix-set"
    return PRGSpec("long-products", gname, n, eps, params, sampler,
                   target={"w": w, "theta": theta})


def one_iteration(P: PRGSpec | Sampler, P1: PRGSpec | Sampler,
                  G: FiniteGroup, w: int, eps: float,
                  params: dict | None = None) -> PRGSpec:
    """One width-reduction iteration: (D + T and P(U)) + P_long, where "+"
    is bitwise XOR, D/T follow the short-product schedule, and P_long is the
    long-product generator built from P1."""
    m = G.order
    if w < math.log2(max(math.log2(1 / eps), 2)) + math.log2(m) - 1e-9:
        raise PRGError(f"need w >= loglog(1/eps) + log m, got w={w}")
    base = P.sampler if isinstance(P, PRGSpec) else P
    n = base.n
    if params is None:
        params = {"C": 2.0, "ell_cap": m ** 5 * 2 ** (30 * w),
                  "provenance": "asymptotic"}
    params = dict(params)
    C = float(params.get("C", 2.0))
    ell_cap = params.get("ell_cap", m ** 5 * 2 ** (30 * w))
    fkp = fk_layer_params(w, min(ell_cap, 2 ** 20), m, eps, C,
                          params.get("delta"))
    if "k" in params:
        fkp["k"] = int(params["k"])
    if "b" in params:
        fkp["b"] = int(params["b"])
    D = almost_kwise_biased(n, 1, fkp["k"], fkp["delta"], params.get("m_D"))
    T = almost_kwise_biased(n, fkp["b"], fkp["k"], fkp["delta"],
                            params.get("m_T"))
    short = FKLayer(base, D, T)
    plong = prg_long_products(P1, 1.0 / m, w, eps, n=n,
                              params=params.get("long_params"))
    sampler = xor_combine(short, plong.sampler)
    out_params = {"short": fkp, "long": plong.params, "ell_cap": ell_cap,
                  "provenance": params.get("provenance", "explicit")}
    return PRGSpec("one-iter", G.name, n, eps, out_params, sampler,
                   target={"w": 3 * w, "q": math.ceil(2 * math.log2(1 / eps))})


def iterate_reduction(G: FiniteGroup, ell: int, w: int, eps: float,
                      overrides: dict | None = None) -> PRGSpec:
    """The full iteration driver: repeatedly apply one_iteration until the
    residual class is a junta, then finish with an almost-k-wise layer.

    The schedule (widths per phase, grouping parameter, iteration counts) is
    materialized in params["schedule"] for audit; stage 0 of the recursion is
    bootstrapped by the terminal layer.  Desk-scale overrides: n, max_iters,
    C, and the component field degrees."""
    S = irrep_catalog(G.name)
    mixing, theta = is_mixing(S)
    if not mixing and not G.is_abelian():
        raise UnsupportedGroup(f"{G.name} is neither commutative nor mixing")
    overrides = dict(overrides or {})
    n = int(overrides.get("n", ell * w))
    m = G.order
    w_prime = max(w, math.ceil(math.log2(max(ell, 2))),
                  math.ceil(math.log2(m)))
    w_target = max(1, math.ceil(math.log2(max(math.log2(1 / eps), 2))
                                + math.log2(m)))
    # phase 1: width shrinks 3w -> 2w per iteration
    widths = []
    cur = w_prime
    while cur > w_target and len(widths) < 64:
        widths.append(cur)
        cur = max(w_target, math.ceil(2 * cur / 3))
    t1 = len(widths)
    # grouping phases (skipped entirely when no width reduction was needed:
    # the terminal layer already covers a junta-sized product)
    b_group = ((math.log2(1 / eps) + math.log2(m))
               / max(math.log2(max(math.log2(1 / eps), 2)) + math.log2(m), 1))
    Cconst = float(overrides.get("C", 2.0))
    if t1 == 0:
        r, t2 = 0, 0
    else:
        r = max(0, math.ceil(math.log(
            max((m * math.log2(1 / eps)) ** Cconst, 2),
            max(b_group, 1.0 + 1e-9))))
        t2 = max(1, math.ceil(math.log2(max(math.log2(1 / eps)
                                            + math.log2(m), 2))))
    k_term = math.ceil(Cconst * math.log2(max(m / eps, 2)))
    schedule = {
        "w_prime": w_prime, "w_target": w_target, "widths_phase1": widths,
        "t1": t1, "b_group": b_group, "r": r, "t2": t2,
        "t_closed_form": t1 + r * t2, "k_terminal": k_term,
    }
    max_iters = int(overrides.get("max_iters", min(t1 + r * t2, 2)))
    term_delta = float(overrides.get("terminal_delta", eps / 4))
    terminal = almost_kwise_biased(n, 1, min(k_term, n), term_delta,
                                   overrides.get("m_terminal"))
    # stage 0: the terminal layer bootstraps both P and P1
    sampler: Sampler = terminal
    p1: Sampler = terminal
    applied = []
    cur_w = max(w_target, 1)
    for it in range(max_iters):
        step = one_iteration(sampler, p1, G, cur_w, eps,
                             params={"C": Cconst,
                                     "m_D": overrides.get("m_D"),
                                     "m_T": overrides.get("m_T"),
                                     "long_params": overrides.get("long_params"),
                                     "delta": overrides.get("delta")})
        applied.append({"iteration": it, "w": cur_w,
                        "seed_len": step.seed_len})
        sampler = step.sampler
        cur_w = min(3 * cur_w, w_prime)
    schedule["iterations_materialized"] = applied
    params = {"schedule": schedule, "provenance": "desk-scale",
              "terminal_delta": term_delta}
    return PRGSpec("reduction", G.name, n, eps, params, sampler,
                   target={"ell": ell, "w": w, "q": 0})


# ---------------------------------------------------------------------------
# Commutative linear-form reduction


@dataclass
class LinearFormFooler:
    """Contract for a fooler of bounded-weight integer linear forms:
    TV error O(sqrt(W)) * eps for weight vectors with sum |w_i| <= W."""

    sampler: Sampler
    eps: float
    description: str = "bounded-independence backend"

    def guarantee(self, W: float) -> float:
        return math.sqrt(max(W, 1.0)) * self.eps


def default_linear_form_backend(n: int, k: int = 4,
                                eps: float = 0.0) -> LinearFormFooler:
    """Desk-scale backend: an exhaustively verifiable k-wise uniform bit
    sampler (the heavyweight generator is out of scope; only its contract is
    consumed)."""
    return LinearFormFooler(kwise_bits(n, k), eps,
                            description=f"{k}-wise uniform bits")


def _character_exponents(G: FiniteGroup, rho: Irrep) -> np.ndarray:
    """chi(g) = omega^{a_g} for a 1-dim irrep; returns the a_g as ints."""
    if rho.dim != 1:
        raise NotCommutative("character exponents need 1-dim irreps")
    m = G.order
    vals = rho.images[:, 0, 0]
    exps = np.round(np.angle(vals) * m / (2 * np.pi)).astype(np.int64) % m
    # verify the rounding is faithful
    recon = np.exp(2j * np.pi * exps / m)
    if np.abs(recon - vals).max() > 1e-8:
        raise NotCommutative("character values are not m-th roots of unity")
    return exps


@dataclass
class LinearFormReduction:
    weights: np.ndarray          # integer weight per coordinate
    offset: int                  # constant exponent b
    modulus: int
    low_width: int               # bits reserved for the block sum
    spill_coords: tuple[int, ...]
    spill_exponents: np.ndarray  # chi-exponent per spill assignment
    weight_bound: float

    def form_values(self, xs: np.ndarray) -> np.ndarray:
        bits = ff.ints_to_bit_matrix(np.asarray(xs, dtype=np.int64),
                                     len(self.weights)).astype(np.int64)
        return bits @ self.weights

    def decode(self, fvals: np.ndarray) -> np.ndarray:
        """Map F(x) back to the character value chi(f(x))."""
        fvals = np.asarray(fvals, dtype=np.int64)
        low = fvals % (1 << self.low_width)
        high = fvals >> self.low_width
        exps = (self.offset + low + self.spill_exponents[high]) % self.modulus
        return np.exp(2j * np.pi * exps / self.modulus)


def linear_form_reduction(f: BlockProduct, rho: Irrep) -> LinearFormReduction:
    """Rewrite chi(f(x)) as a decoder applied to one integer linear form:
    block exponents land in the low bits, spill bits are shifted above them."""
    G = f.group
    if not G.is_abelian():
        raise NotCommutative(f"{G.name} is not commutative")
    exps = _character_exponents(G, rho)
    m = G.order
    weights = np.zeros(f.n, dtype=np.int64)
    offset = 0
    spill_coords: list[int] = []
    for factor in f.factors:
        if isinstance(factor, SpillFactor):
            spill_coords.extend(factor.indices)
            continue
        if factor.width == 0:
            offset += int(exps[factor.base]) * int(factor.table[0])
            continue
        if factor.width != 1:
            raise PRGError("linear-form reduction expects width-1 blocks")
        a = int(exps[factor.base])
        t0, t1 = int(factor.table[0]), int(factor.table[1])
        offset += a * t0
        weights[factor.indices[0]] = a * (t1 - t0) % m
    ell = max(f.ell, 1)
    low_width = math.ceil(math.log2(m * ell + 1))
    spill_coords = sorted(spill_coords)
    # spill exponent table indexed by the packed spill assignment
    q = len(spill_coords)
    spill_exp = np.zeros(1 << q, dtype=np.int64)
    for u in range(1 << q):
        x = 0
        for j, c in enumerate(spill_coords):
            if (u >> j) & 1:
                x |= 1 << c
        val = G.identity
        for factor in f.factors:
            if isinstance(factor, SpillFactor):
                sub = 0
                for j2, c2 in enumerate(factor.indices):
                    if (x >> c2) & 1:
                        sub |= 1 << j2
                val = G.mul(val, int(factor.table[sub]))
        spill_exp[u] = exps[val]
    for j, c in enumerate(spill_coords):
        weights[c] = (1 << low_width) * (1 << j)
    bound = float(m * ell + (1 << low_width) * (2 ** q))
    return LinearFormReduction(weights, offset % m, m, low_width,
                               tuple(spill_coords), spill_exp, bound)


def fool_commutative_spill(f: BlockProduct, backend: LinearFormFooler,
                           eps: float) -> dict:
    """Per-character gaps |E[chi(f(P))] - E[chi(f(U))]| for every character,
    the sqrt(m)-aggregated bound, and the exact statistical distance, using
    the backend sampler as P."""
    G = f.group
    if not G.is_abelian():
        raise NotCommutative(f"{G.name} is not commutative")
    S = irrep_catalog(G.name)
    dist_p = np.zeros(G.order)
    weights = backend.sampler.exact_distribution()
    outs = eval_many(f, np.arange(1 << f.n))
    np.add.at(dist_p, outs, weights)
    dist_u = models.exact_output_distribution(f).pmf
    gaps = []
    for rho in S.irreps:
        chi = rho.images[:, 0, 0]
        gaps.append(float(abs((dist_p * chi).sum() - (dist_u * chi).sum())))
    delta = 0.5 * float(np.abs(dist_p - dist_u).sum())
    red = linear_form_reduction(f, S.irreps[1] if len(S.irreps) > 1 else S.irreps[0])
    return {
        "per_character_gap": gaps,
        "max_gap": max(gaps),
        "aggregated_bound": math.sqrt(G.order) * max(gaps),
        "exact_delta": delta,
        "weight_bound": red.weight_bound,
        "backend_guarantee": backend.guarantee(red.weight_bound),
        "target_eps": eps,
        "pass": bool(delta <= eps),
    }
