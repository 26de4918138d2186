"""Seed-driven pseudorandom primitive distributions and their exact audits.

Every sampler is a deterministic map from an integer seed to an output vector
over F_2 or F_p.  Seed spaces are exact integer ranges [0, seed_count); for
odd p the count is not a power of two, and the reported bit seed length is
ceil(log2(seed_count)).  All declared guarantees are measured, not assumed:
the oracles in this module enumerate the full seed space.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache

import numpy as np

from . import ff

EXACT_SEED_BITS_CAP = 26
EXACT_N_CAP = 24


class SamplerError(ValueError):
    pass


class NotPrime(SamplerError):
    pass


class LengthMismatch(SamplerError):
    pass


class TooLargeForExact(SamplerError):
    pass


class EmptyConditionedSupport(SamplerError):
    pass


def _parity_u64(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for s in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(s)
    return (v & np.uint64(1)).astype(np.int8)


class Sampler:
    """Base class: deterministic seed -> vector over {0,...,p-1}^n."""

    n: int
    p: int
    seed_count: int
    guarantee: str
    spec: str

    @property
    def seed_len(self) -> int:
        """Seed length in bits (ceil(log2 of the exact seed count))."""
        return max(0, math.ceil(math.log2(self.seed_count))) if self.seed_count > 1 else 0

    def sample(self, seed: int) -> np.ndarray:
        raise NotImplementedError

    def sample_many(self, seeds: np.ndarray) -> np.ndarray:
        seeds = np.asarray(seeds, dtype=np.int64)
        out = np.empty((len(seeds), self.n), dtype=np.int64)
        for i, s in enumerate(seeds):
            out[i] = self.sample(int(s))
        return out

    def exact_distribution(self) -> np.ndarray:
        """Exact pmf over alphabet^n (flat index = sum_i x_i * p^i)."""
        if not hasattr(self, "_dist"):
            self._dist = self._exact_distribution()
        return self._dist

    def _exact_distribution(self) -> np.ndarray:
        size = self.p ** self.n
        if size > 2 ** EXACT_N_CAP:
            raise TooLargeForExact(f"alphabet^n = {size} too large")
        if self.seed_count > 2 ** EXACT_SEED_BITS_CAP:
            raise TooLargeForExact(f"{self.seed_count} seeds too many to enumerate")
        dist = np.zeros(size)
        chunk = 1 << 16
        for lo in range(0, self.seed_count, chunk):
            seeds = np.arange(lo, min(lo + chunk, self.seed_count))
            outs = self.sample_many(seeds)
            idx = ff.vec_to_index(outs, self.p)
            np.add.at(dist, idx, 1.0)
        return dist / self.seed_count

    def __repr__(self):
        return f"<{self.spec} seed_len={self.seed_len} ({self.guarantee})>"


class Uniform(Sampler):
    """The identity generator: seed bits are the output."""

    def __init__(self, n: int, p: int = 2):
        self.n, self.p = n, p
        self.seed_count = p ** n
        self.guarantee = "uniform"
        self.spec = f"u(n={n})" if p == 2 else f"u(n={n},p={p})"

    def sample(self, seed: int) -> np.ndarray:
        return ff.index_to_vec(seed, self.p, self.n)

    def sample_many(self, seeds):
        return ff.index_to_vec(np.asarray(seeds, dtype=np.int64), self.p, self.n)

    def _exact_distribution(self):
        return np.full(self.p ** self.n, 1.0 / self.p ** self.n)


class Constant(Sampler):
    """Point mass on a fixed vector (seed ignored)."""

    def __init__(self, values, p: int = 2):
        self.values = np.asarray(values, dtype=np.int64)
        self.n, self.p = len(self.values), p
        self.seed_count = 1
        self.guarantee = "constant"
        self.spec = f"const(n={self.n})"

    def sample(self, seed: int) -> np.ndarray:
        return self.values.copy()

    def sample_many(self, seeds):
        return np.tile(self.values, (len(seeds), 1))

    def _exact_distribution(self):
        dist = np.zeros(self.p ** self.n)
        dist[int(ff.vec_to_index(self.values, self.p))] = 1.0
        return dist


class SmallBiasF2(Sampler):
    """Powering construction over GF(2^m): seed (x, y), bit_i = <x^(i+1), y>.

    Max parity bias is exactly #roots(p_T)/2^m <= n/2^m <= eps with
    m = ceil(log2(n/eps)); seed length 2m bits.
    """

    def __init__(self, n: int, eps: float, m: int | None = None):
        if not (0 < eps < 1):
            raise SamplerError("eps must be in (0,1)")
        self.n, self.p = n, 2
        self.eps = eps
        self.m = m if m is not None else max(1, math.ceil(math.log2(max(n, 1) / eps)))
        if (1 << self.m) <= n:
            # p_T degrees must stay below the field size or the bias bound
            # (#roots / field size) fails
            raise SamplerError(f"field 2^{self.m} too small for n={n}")
        self.field = ff.GF2m(self.m)
        self.seed_count = 1 << (2 * self.m)
        self.guarantee = f"{eps}-biased"
        self.spec = f"sb2(n={n},eps={eps:g})"

    @property
    def _powt(self) -> np.ndarray:
        # full (2^m, n) power table; only for exact enumeration at small m
        if self.m > 14:
            raise TooLargeForExact(f"power table for m={self.m} too large")
        if not hasattr(self, "_powt_cache"):
            self._powt_cache = self.field.pow_table(self.n)
        return self._powt_cache

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_many(np.array([seed]))[0]

    def sample_many(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        xs, ys = np.divmod(seeds, self.field.size)
        xs = xs.astype(np.uint64)
        ys = ys.astype(np.uint64)
        out = np.empty((len(seeds), self.n), dtype=np.int64)
        cur = xs.copy()
        for i in range(self.n):
            out[:, i] = _parity_u64(cur & ys)
            if i + 1 < self.n:
                cur = self.field.mul(cur, xs)
        return out

    def parity_bias_vector(self) -> np.ndarray:
        """b[T] = E[(-1)^{<T,X>}] for every mask T, computed exactly."""
        size = self.field.size
        cur = np.zeros(size, dtype=np.uint64)
        cols = [self._powt[:, j].astype(np.uint64) for j in range(self.n)]
        out = np.empty(1 << self.n)
        out[0] = 1.0
        for g in range(1, 1 << self.n):
            j = (g & -g).bit_length() - 1  # bit flipped at Gray step g
            cur = cur ^ cols[j]
            out[g ^ (g >> 1)] = np.count_nonzero(cur == 0) / size
        return out

    def _exact_distribution(self):
        bias = self.parity_bias_vector()
        dist = ff.fwht(bias) / (1 << self.n)
        np.clip(dist, 0.0, None, out=dist)
        return dist / dist.sum()


class SmallBiasFp(Sampler):
    """Powering construction over GF(p^m) with trace inner product."""

    def __init__(self, n: int, p: int, eps: float, m: int | None = None):
        if not ff.is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if not (0 < eps < 1):
            raise SamplerError("eps must be in (0,1)")
        self.n, self.p = n, p
        self.eps = eps
        self.m = m if m is not None else max(1, math.ceil(math.log(max(n, 1) / eps, p)))
        if p ** self.m <= n:
            raise SamplerError(f"field {p}^{self.m} too small for n={n}")
        self.field = ff.GFpm(p, self.m)
        self.seed_count = self.field.size ** 2
        self.guarantee = f"{eps}-biased(F{p})"
        self.spec = f"sbp(n={n},p={p},eps={eps:g})"
        self._powt = self.field.pow_table(n)  # (p^m, n)

    def sample(self, seed: int) -> np.ndarray:
        x, y = divmod(seed, self.field.size)
        return self.field.trace(self.field.mul(self._powt[x], y))

    def sample_many(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        xs, ys = np.divmod(seeds, self.field.size)
        return self.field.trace(self.field.mul(self._powt[xs], ys[:, None]))

    def character_bias_tensor(self) -> np.ndarray:
        """b[a] = E[omega^{<a,Y>}] (real) for every a in F_p^n, exactly."""
        p, size = self.p, self.field.size
        bias = np.empty(p ** self.n)
        cur = np.zeros(size, dtype=np.int64)
        bias[0] = 1.0
        cols = [self._powt[:, j] for j in range(self.n)]
        for idx in range(1, p ** self.n):
            # odometer: digits 0..t-1 rolled over (p-1 -> 0, i.e. +1), digit t ticked
            t = 0
            rem = idx
            while rem % p == 0:
                rem //= p
                t += 1
            for j in range(t + 1):
                cur = self.field.add(cur, cols[j])
            bias[idx] = np.count_nonzero(cur == 0) / size
        return bias

    def _exact_distribution(self):
        p, n = self.p, self.n
        bias = self.character_bias_tensor().reshape((p,) * n)
        dist = np.fft.fftn(bias).real.reshape(-1) / p ** n
        np.clip(dist, 0.0, None, out=dist)
        return dist / dist.sum()


def small_bias_f2(n: int, eps: float, m: int | None = None) -> SmallBiasF2:
    return SmallBiasF2(n, eps, m)


def small_bias_fp(n: int, p: int, eps: float, m: int | None = None) -> Sampler:
    if p == 2:
        return SmallBiasF2(n, eps, m)
    return SmallBiasFp(n, p, eps, m)


class ViolaSum(Sampler):
    """Coordinatewise F_p-sum of d independent small-bias copies; fools
    degree-d polynomials over F_p."""

    def __init__(self, n: int, p: int, d: int, per_copy_eps: float,
                 m: int | None = None):
        if d < 1:
            raise SamplerError("d must be >= 1")
        self.n, self.p, self.d = n, p, d
        self.copies = [small_bias_fp(n, p, per_copy_eps, m) for _ in range(d)]
        self.seed_count = math.prod(c.seed_count for c in self.copies)
        self.per_copy_eps = per_copy_eps
        self.guarantee = f"degree-{d}-fooling(F{p})"
        self.spec = f"viola(n={n},p={p},d={d},eps={per_copy_eps:g})"

    def _split(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        parts = []
        for c in self.copies:
            parts.append(seeds % c.seed_count)
            seeds = seeds // c.seed_count
        return parts

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_many(np.array([seed]))[0]

    def sample_many(self, seeds):
        parts = self._split(seeds)
        acc = self.copies[0].sample_many(parts[0])
        for c, part in zip(self.copies[1:], parts[1:]):
            acc = (acc + c.sample_many(part)) % self.p
        return acc

    def _exact_distribution(self):
        dist = self.copies[0].exact_distribution()
        for c in self.copies[1:]:
            if self.p == 2:
                dist = ff.xor_convolve(dist, c.exact_distribution())
            else:
                dist = ff.modp_convolve(dist, c.exact_distribution(), self.p, self.n)
        return dist


def viola_sum(n: int, p: int, d: int, per_copy_eps: float,
              m: int | None = None) -> ViolaSum:
    return ViolaSum(n, p, d, per_copy_eps, m)


class PowerResidueBits(Sampler):
    """Coordinatewise (p-1)-th power of an F_p sampler, landing in {0,1}.

    Under a uniform field coordinate the output bit is 1 with probability
    (p-1)/p.  (The i.i.d. reference distribution is parameterized by that
    marginal; see noise_reference.)
    """

    def __init__(self, inner: Sampler):
        if not ff.is_prime(inner.p):
            raise NotPrime(f"{inner.p} is not prime")
        self.inner = inner
        self.n, self.p = inner.n, 2
        self.seed_count = inner.seed_count
        self.guarantee = f"power-residue({inner.guarantee})"
        self.spec = f"prb({inner.spec})"

    def sample(self, seed: int) -> np.ndarray:
        return (self.inner.sample(seed) != 0).astype(np.int64)

    def sample_many(self, seeds):
        return (self.inner.sample_many(seeds) != 0).astype(np.int64)

    def _exact_distribution(self):
        q = self.inner.p
        inner_dist = self.inner.exact_distribution()
        size = 1 << self.n
        dist = np.zeros(size)
        idx = np.arange(q ** self.n, dtype=np.int64)
        vecs = ff.index_to_vec(idx, q, self.n)
        bits_idx = ff.vec_to_index((vecs != 0).astype(np.int64), 2)
        np.add.at(dist, bits_idx, inner_dist)
        return dist


def power_residue_bits(Y: Sampler) -> PowerResidueBits:
    return PowerResidueBits(Y)


def noise_reference(n: int, p: int, convention: str = "algebraic") -> np.ndarray:
    """Exact pmf of n i.i.d. noise bits.

    convention="algebraic": Pr[1] = (p-1)/p, the marginal of U^(p-1);
    convention="prose":     Pr[1] = 1/p.
    Both are selectable because the two descriptions of the noise vector
    disagree; the algebraic one is what the power-residue map produces.
    """
    pr1 = (p - 1) / p if convention == "algebraic" else 1 / p
    dist = np.ones(1)
    for _ in range(n):
        dist = np.concatenate([dist * (1 - pr1), dist * pr1])
    # index packing: bit i = coordinate i; concatenation order builds high bit
    # last, which matches vec_to_index for i.i.d. products
    return dist


class KWiseHash(Sampler):
    """k-wise uniform family [n] -> {0,1}^r: a random degree-(k-1) polynomial
    over GF(2^m), m = max(ceil(log2 n), r), truncated to the low r bits.

    sample(seed)[j] = h(j); any k distinct evaluations are exactly uniform.
    """

    def __init__(self, n: int, r: int, k: int):
        if k < 1:
            raise SamplerError("k must be >= 1")
        self.n, self.r, self.k = n, r, k
        self.p = 2 ** r  # output alphabet
        self.m = max(math.ceil(math.log2(max(n, 2))), r, 1)
        self.field = ff.GF2m(self.m)
        self.seed_count = self.field.size ** k
        self.guarantee = f"{k}-wise-uniform->2^{r}"
        self.spec = f"kw(n={n},k={k},r={r})"
        # Vandermonde powers: pw[t, j] = j^t in the field, for Horner-free eval
        pts = np.arange(n, dtype=np.uint64)
        pw = np.empty((k, n), dtype=np.uint64)
        pw[0] = 1
        for t in range(1, k):
            pw[t] = self.field.mul(pw[t - 1], pts)
        self._pw = pw

    def _coeffs(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        out = []
        for _ in range(self.k):
            out.append((seeds % self.field.size).astype(np.uint64))
            seeds = seeds // self.field.size
        return out

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_many(np.array([seed]))[0]

    def sample_many(self, seeds):
        coeffs = self._coeffs(seeds)
        acc = np.zeros((len(coeffs[0]), self.n), dtype=np.uint64)
        for t, c in enumerate(coeffs):
            acc ^= self.field.mul(self._pw[t][None, :], c[:, None])
        return (acc & np.uint64(self.p - 1)).astype(np.int64)


def kwise_hash(n: int, r: int, k: int) -> KWiseHash:
    return KWiseHash(n, r, k)


def kwise_bits(n: int, k: int) -> KWiseHash:
    """k-wise uniform bit vector (the r=1 hash family)."""
    return KWiseHash(n, 1, k)


class AlmostKWiseBiased(Sampler):
    """delta-almost k-wise independent bits with marginals exactly 2^-b:
    T_i = AND_b(D_i xor U_b) for a small-bias D on n*b bits and b shared
    uniform bits."""

    def __init__(self, n: int, b: int, k: int, delta: float,
                 m: int | None = None):
        if b < 1:
            raise SamplerError("b must be >= 1")
        self.n, self.p = n, 2
        self.b, self.k, self.delta = b, k, delta
        inner_eps = delta * 2.0 ** (-k)
        self.inner = SmallBiasF2(n * b, inner_eps, m)
        self.seed_count = self.inner.seed_count << b
        self.guarantee = f"{delta}-almost-{k}-wise(marginal=2^-{b})"
        self.spec = f"akw(n={n},b={b},k={k},delta={delta:g})"

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_many(np.array([seed]))[0]

    def sample_many(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        u = (seeds & ((1 << self.b) - 1)).astype(np.int64)
        dseed = seeds >> self.b
        dbits = self.inner.sample_many(dseed).reshape(-1, self.n, self.b)
        ubits = ((u[:, None] >> np.arange(self.b)[None, :]) & 1)
        return (dbits ^ ubits[:, None, :]).all(axis=2).astype(np.int64)

    def _exact_distribution(self):
        # pushforward of the inner small-bias distribution over n*b bits,
        # averaged over the b shared uniform bits; avoids seed enumeration
        nb = self.n * self.b
        if nb > EXACT_N_CAP:
            raise TooLargeForExact(f"inner bit space 2^{nb} too large")
        inner_dist = self.inner.exact_distribution()
        dist = np.zeros(1 << self.n)
        chunk = 1 << 16
        coords = np.arange(self.n, dtype=np.int64)
        for lo in range(0, 1 << nb, chunk):
            idx = np.arange(lo, min(lo + chunk, 1 << nb), dtype=np.int64)
            bits = ((idx[:, None] >> np.arange(nb)[None, :]) & 1).astype(np.int8)
            bits = bits.reshape(-1, self.n, self.b)
            w = inner_dist[idx] / (1 << self.b)
            for u in range(1 << self.b):
                ubits = (u >> np.arange(self.b)) & 1
                t = (bits ^ ubits).all(axis=2).astype(np.int64)
                np.add.at(dist, (t << coords).sum(axis=1), w)
        return dist


def almost_kwise_biased(n: int, b: int, k: int, delta: float,
                        m: int | None = None) -> AlmostKWiseBiased:
    return AlmostKWiseBiased(n, b, k, delta, m)


class HashThresholdBits(Sampler):
    """T_i = [first b bits of h(i) are zero] for a k-wise hash h: marginals
    exactly 2^-b, k-wise independent, with a small enumerable seed space
    (the exhaustive counterpart of the small-bias construction)."""

    def __init__(self, n: int, b: int, k: int):
        self.inner = KWiseHash(n, b, k)
        self.n, self.p = n, 2
        self.b, self.k = b, k
        self.seed_count = self.inner.seed_count
        self.guarantee = f"{k}-wise(marginal=2^-{b})"
        self.spec = f"hthr(n={n},b={b},k={k})"

    def sample(self, seed: int) -> np.ndarray:
        return (self.inner.sample(seed) == 0).astype(np.int64)

    def sample_many(self, seeds):
        return (self.inner.sample_many(seeds) == 0).astype(np.int64)


def hash_threshold_bits(n: int, b: int, k: int) -> HashThresholdBits:
    return HashThresholdBits(n, b, k)


class XorCombine(Sampler):
    """Coordinatewise XOR of independent samplers; seeds concatenate."""

    def __init__(self, *samplers: Sampler):
        if not samplers:
            raise SamplerError("need at least one sampler")
        n = samplers[0].n
        for s in samplers:
            if s.n != n:
                raise LengthMismatch("all samplers must share n")
            if s.p != 2:
                raise LengthMismatch("xor_combine requires F_2 samplers")
        self.parts = samplers
        self.n, self.p = n, 2
        self.seed_count = math.prod(s.seed_count for s in samplers)
        self.guarantee = "xor(" + ",".join(s.guarantee for s in samplers) + ")"
        self.spec = "xor(" + ",".join(s.spec for s in samplers) + ")"

    def _split(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        out = []
        for s in self.parts:
            out.append(seeds % s.seed_count)
            seeds = seeds // s.seed_count
        return out

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_many(np.array([seed]))[0]

    def sample_many(self, seeds):
        parts = self._split(seeds)
        acc = self.parts[0].sample_many(parts[0])
        for s, part in zip(self.parts[1:], parts[1:]):
            acc = acc ^ s.sample_many(part)
        return acc

    def _exact_distribution(self):
        dist = self.parts[0].exact_distribution()
        for s in self.parts[1:]:
            dist = ff.xor_convolve(dist, s.exact_distribution())
        return dist


def xor_combine(*samplers: Sampler) -> XorCombine:
    return XorCombine(*samplers)


class FKLayer(Sampler):
    """D xor (T and base): the small-bias-plus-pseudorandom-noise layer."""

    def __init__(self, base: Sampler, D: Sampler, T: Sampler):
        if not (base.n == D.n == T.n):
            raise LengthMismatch("base, D, T must share n")
        self.base, self.D, self.T = base, D, T
        self.n, self.p = base.n, 2
        self.seed_count = base.seed_count * D.seed_count * T.seed_count
        self.guarantee = "fk-layer"
        self.spec = f"fk({D.spec},{T.spec},{base.spec})"

    def sample(self, seed: int) -> np.ndarray:
        return self.sample_many(np.array([seed]))[0]

    def sample_many(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        s_b = seeds % self.base.seed_count
        rest = seeds // self.base.seed_count
        s_d = rest % self.D.seed_count
        s_t = rest // self.D.seed_count
        return self.D.sample_many(s_d) ^ (
            self.T.sample_many(s_t) & self.base.sample_many(s_b))

    def _exact_distribution(self):
        # P_hat(S) = D_hat(S) * E_T[base_hat(S & T)], exact over T's seeds
        size = 1 << self.n
        if size > 2 ** 20:
            raise TooLargeForExact("fk layer exact distribution needs n <= 20")
        base_hat = ff.fwht(self.base.exact_distribution())
        d_hat = ff.fwht(self.D.exact_distribution())
        t_weights = np.zeros(size)
        chunk = 1 << 14
        for lo in range(0, self.T.seed_count, chunk):
            seeds = np.arange(lo, min(lo + chunk, self.T.seed_count))
            ts = ff.vec_to_index(self.T.sample_many(seeds), 2)
            np.add.at(t_weights, ts, 1.0)
        t_weights /= self.T.seed_count
        masks = np.arange(size)
        acc = np.zeros(size)
        for t in np.nonzero(t_weights)[0]:
            acc += t_weights[t] * base_hat[masks & int(t)]
        dist = ff.fwht(d_hat * acc) / size
        np.clip(dist, 0.0, None, out=dist)
        return dist / dist.sum()


# ---------------------------------------------------------------------------
# Measurement oracles


def measured_bias(S: Sampler, mode: str = "exact", trials: int = 0,
                  rng: np.random.Generator | None = None) -> dict:
    """Max nontrivial character bias of a sampler, exact or Monte Carlo.

    Exact mode requires seed_len <= 26 and n <= 24 and enumerates the seed
    space (component-wise for composite samplers).  MC mode histograms
    `trials` sampled outputs and reports a 3-sigma radius.
    """
    if mode == "exact":
        if S.seed_len > EXACT_SEED_BITS_CAP or S.n > EXACT_N_CAP:
            raise TooLargeForExact(
                f"seed_len={S.seed_len}, n={S.n} beyond exact caps")
        dist = S.exact_distribution()
        radius = 0.0
    else:
        if trials < 1000:
            raise SamplerError("mc mode needs trials >= 1000")
        rng = rng or np.random.default_rng(0)
        seeds = rng.integers(0, S.seed_count, size=trials)
        dist = np.zeros(S.p ** S.n)
        outs = S.sample_many(seeds)
        np.add.at(dist, ff.vec_to_index(outs, S.p), 1.0)
        dist /= trials
        radius = 3.0 / math.sqrt(trials)
    if S.p == 2:
        biases = np.abs(ff.fwht(dist))
    else:
        biases = np.abs(np.fft.ifftn(dist.reshape((S.p,) * S.n)).reshape(-1)) * S.p ** S.n
    biases[0] = 0.0
    arg = int(np.argmax(biases))
    return {
        "sampler": S.spec,
        "guarantee": S.guarantee,
        "mode": mode,
        "max_bias": float(biases[arg]),
        "argmax_character": arg,
        "radius": radius,
    }


def conditioned_bias(S: Sampler, fixed: list[int], y: list[int]) -> float:
    """Max parity bias of S's output on the free coordinates, conditioned on
    the coordinates in `fixed` equalling the bits `y`."""
    if S.p != 2:
        raise SamplerError("conditioned_bias is defined for bit samplers")
    if len(fixed) > 10:
        raise TooLargeForExact("condition on at most 10 coordinates")
    dist = S.exact_distribution()
    n = S.n
    free = [i for i in range(n) if i not in set(fixed)]
    idx = np.arange(1 << n)
    sel = np.ones(1 << n, dtype=bool)
    for pos, bit in zip(fixed, y):
        sel &= ((idx >> pos) & 1) == bit
    mass = dist[sel].sum()
    if mass <= 0:
        raise EmptyConditionedSupport(
            f"conditioning on {fixed}={y} has zero probability")
    sub = np.zeros(1 << len(free))
    free_arr = np.array(free)
    sub_idx = np.zeros(1 << n, dtype=np.int64)
    for j, pos in enumerate(free):
        sub_idx |= (((idx >> pos) & 1) << j)
    np.add.at(sub, sub_idx[sel], dist[sel])
    sub /= mass
    biases = np.abs(ff.fwht(sub))
    biases[0] = 0.0
    return float(biases.max()) if len(biases) > 1 else 0.0


def kwise_exactness(S: KWiseHash, k: int | None = None) -> float:
    """Max deviation of any k-subset joint pmf from exact uniformity, over
    the full seed space (0.0 means exactly k-wise uniform)."""
    import itertools
    k = k or S.k
    outs = S.sample_many(np.arange(S.seed_count))
    worst = 0.0
    target = 1.0 / S.p ** k
    for sub in itertools.combinations(range(S.n), k):
        idx = np.zeros(S.seed_count, dtype=np.int64)
        for j, pos in enumerate(sub):
            idx += outs[:, pos] * S.p ** j
        counts = np.bincount(idx, minlength=S.p ** k) / S.seed_count
        worst = max(worst, float(np.abs(counts - target).max()))
    return worst


def almost_kwise_distance(S: Sampler, k: int, marginal: float) -> float:
    """Max l_inf distance of any k-subset joint pmf from the i.i.d. product
    with the given marginal, computed from the exact distribution."""
    import itertools
    dist = S.exact_distribution()
    n = S.n
    idx = np.arange(1 << n)
    worst = 0.0
    for sub in itertools.combinations(range(n), k):
        sub_idx = np.zeros(1 << n, dtype=np.int64)
        for j, pos in enumerate(sub):
            sub_idx |= (((idx >> pos) & 1) << j)
        joint = np.bincount(sub_idx, weights=dist, minlength=1 << k)
        ref = np.ones(1)
        for _ in range(k):
            ref = np.concatenate([ref * (1 - marginal), ref * marginal])
        worst = max(worst, float(np.abs(joint - ref).max()))
    return worst


def _monomials(n: int, p: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors with per-variable exponent <= p-1, total degree <= d."""
    out = [()]
    full = []

    def rec(prefix, var, deg):
        if var == n:
            full.append(tuple(prefix))
            return
        for e in range(min(p - 1, d - deg) + 1):
            rec(prefix + [e], var + 1, deg + e)

    rec([], 0, 0)
    return full


def polynomial_fooling_error(Y: Sampler, d: int,
                             polys: str = "all") -> float:
    """Exhaustive oracle: max over degree-<=d polynomials f over F_p in n
    variables of the statistical distance between f(Y) and f(U).

    With polys="all" every coefficient vector is enumerated; keep n, p, d at
    desk scale (p^#monomials outputs are generated).
    """
    p, n = Y.p, Y.n
    monos = _monomials(n, p, d)
    inputs = ff.index_to_vec(np.arange(p ** n), p, n)  # (p^n, n)
    vals = np.ones((len(monos), p ** n), dtype=np.int64)
    for mi, expo in enumerate(monos):
        for var, e in enumerate(expo):
            if e:
                vals[mi] *= inputs[:, var] ** e
        vals[mi] %= p
    ydist = Y.exact_distribution()
    udist = np.full(p ** n, 1.0 / p ** n)
    diff = ydist - udist
    ncoef = p ** len(monos)
    if ncoef > 2 ** 21:
        raise TooLargeForExact(f"{ncoef} polynomials is beyond the oracle cap")
    coeffs = ff.index_to_vec(np.arange(ncoef), p, len(monos))  # (ncoef, nm)
    outputs = (coeffs @ vals) % p                              # (ncoef, p^n)
    worst = np.zeros(ncoef)
    for v in range(p):
        worst += np.abs(((outputs == v) * diff[None, :]).sum(axis=1))
    return float(worst.max() / 2)


def single_polynomial_distance(Y: Sampler, coeffs: dict, d: int | None = None) -> float:
    """Delta(f(Y), f(U)) for one polynomial given as {exponent tuple: coeff}."""
    p, n = Y.p, Y.n
    inputs = ff.index_to_vec(np.arange(p ** n), p, n)
    vals = np.zeros(p ** n, dtype=np.int64)
    for expo, c in coeffs.items():
        term = np.full(p ** n, c, dtype=np.int64)
        for var, e in enumerate(expo):
            if e:
                term = term * inputs[:, var] ** e % p
        vals = (vals + term) % p
    ydist = Y.exact_distribution()
    udist = np.full(p ** n, 1.0 / p ** n)
    delta = 0.0
    for v in range(p):
        delta += abs(((vals == v) * (ydist - udist)).sum())
    return delta / 2


def audit(S: Sampler) -> dict:
    """Audit a sampler's declared guarantee with the exact oracles; returns a
    machine-readable report with a pass flag."""
    report = {"sampler": S.spec, "guarantee": S.guarantee}
    if isinstance(S, (SmallBiasF2, SmallBiasFp)):
        meas = measured_bias(S, "exact")
        report["measured"] = meas["max_bias"]
        report["pass"] = bool(meas["max_bias"] <= S.eps + 1e-12)
    elif isinstance(S, Uniform):
        meas = measured_bias(S, "exact")
        report["measured"] = meas["max_bias"]
        report["pass"] = bool(meas["max_bias"] <= 1e-12)
    elif isinstance(S, KWiseHash):
        dev = kwise_exactness(S)
        report["measured"] = dev
        report["pass"] = bool(dev == 0.0)
    elif isinstance(S, AlmostKWiseBiased):
        dev = almost_kwise_distance(S, S.k, 2.0 ** (-S.b))
        marg = _marginals(S)
        report["measured"] = dev
        report["marginal_error"] = float(np.abs(marg - 2.0 ** (-S.b)).max())
        report["pass"] = bool(dev <= S.delta + 1e-12
                              and report["marginal_error"] <= 1e-12)
    elif isinstance(S, HashThresholdBits):
        dev = almost_kwise_distance(S, S.k, 2.0 ** (-S.b))
        report["measured"] = dev
        report["pass"] = bool(dev <= 1e-12)  # exactly k-wise by construction
    elif isinstance(S, ViolaSum):
        err = polynomial_fooling_error(S, S.d)
        report["measured"] = err
        report["pass"] = bool(err <= _viola_target(S) + 1e-12)
    else:
        meas = measured_bias(S, "exact")
        report["measured"] = meas["max_bias"]
        report["pass"] = True  # informational
    return report


def _marginals(S: Sampler) -> np.ndarray:
    dist = S.exact_distribution()
    idx = np.arange(len(dist))
    return np.array([dist[((idx >> i) & 1) == 1].sum() for i in range(S.n)])


def _viola_target(S: ViolaSum) -> float:
    # composed guarantee eps when per-copy bias is eps^(2^(d-1))
    return S.per_copy_eps ** (1.0 / 2 ** (S.d - 1))


# ---------------------------------------------------------------------------
# Compact sampler spec strings (CLI surface)

_SPEC_RE = re.compile(r"^(\w+)\((.*)\)$")


def _split_args(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [s.strip() for s in parts if s.strip()]


def parse_sampler(spec: str) -> Sampler:
    """Parse compact sampler specs, e.g. sb2(n=8,eps=0.125),
    akw(n=8,b=2,k=4,delta=1e-3), xor(sb2(n=4,eps=0.25),u(n=4))."""
    spec = spec.strip()
    m = _SPEC_RE.match(spec)
    if not m:
        raise SamplerError(f"bad sampler spec: {spec}")
    head, body = m.group(1), m.group(2)
    args = _split_args(body)
    kw: dict = {}
    positional = []
    for a in args:
        if "=" in a and _SPEC_RE.match(a) is None:
            k, v = a.split("=", 1)
            kw[k.strip()] = v.strip()
        else:
            positional.append(a)

    def fnum(key, default=None):
        return float(kw[key]) if key in kw else default

    def inum(key, default=None):
        return int(kw[key]) if key in kw else default

    if head == "u":
        return Uniform(inum("n"), inum("p", 2))
    if head == "sb2":
        return SmallBiasF2(inum("n"), fnum("eps"), inum("m", None))
    if head == "sbp":
        return SmallBiasFp(inum("n"), inum("p"), fnum("eps"), inum("m", None))
    if head == "viola":
        return ViolaSum(inum("n"), inum("p"), inum("d"), fnum("eps"),
                        inum("m", None))
    if head == "prb":
        return PowerResidueBits(parse_sampler(positional[0]))
    if head == "kw":
        return KWiseHash(inum("n"), inum("r", 1), inum("k"))
    if head == "akw":
        return AlmostKWiseBiased(inum("n"), inum("b"), inum("k"), fnum("delta"),
                                 inum("m", None))
    if head == "hthr":
        return HashThresholdBits(inum("n"), inum("b"), inum("k"))
    if head == "xor":
        return XorCombine(*[parse_sampler(s) for s in positional])
    if head == "const":
        n = inum("n")
        val = inum("value", 0)
        return Constant(ff.index_to_vec(val, 2, n))
    raise SamplerError(f"unknown sampler kind: {head}")
