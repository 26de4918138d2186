"""Finite-field arithmetic and transform kernels used by the samplers.

Fields F_{p^m} are represented by integers in [0, p^m): the base-p digits of
the integer are the coefficients of the residue polynomial, low degree first.
The reducing polynomials are fixed (lexicographically least monic irreducible
per (p, m)) so that every sampler is reproducible bit-for-bit.
"""

from __future__ import annotations

import numpy as np

# Lex-least monic irreducible polynomial of degree m over F_p, encoded as
# sum_i coeff_i * p^i (leading coefficient included).
IRREDUCIBLE = {
    (2, 1): 2, (2, 2): 7, (2, 3): 11, (2, 4): 19, (2, 5): 37, (2, 6): 67,
    (2, 7): 131, (2, 8): 283, (2, 9): 515, (2, 10): 1033, (2, 11): 2053,
    (2, 12): 4105, (2, 13): 8219, (2, 14): 16417, (2, 15): 32771,
    (2, 16): 65579, (2, 17): 131081, (2, 18): 262153, (2, 19): 524327,
    (2, 20): 1048585, (2, 21): 2097157, (2, 22): 4194307, (2, 23): 8388641,
    (2, 24): 16777243, (2, 25): 33554441, (2, 26): 67108891,
    (2, 27): 134217767, (2, 28): 268435459, (2, 29): 536870917,
    (2, 30): 1073741827, (2, 31): 2147483657, (2, 32): 4294967437,
    (3, 1): 3, (3, 2): 10, (3, 3): 34, (3, 4): 86, (3, 5): 250, (3, 6): 734,
    (3, 7): 2198, (3, 8): 6572,
    (5, 1): 5, (5, 2): 27, (5, 3): 131, (5, 4): 627, (5, 5): 3146,
    (5, 6): 15632,
    (7, 1): 7, (7, 2): 50, (7, 3): 345, (7, 4): 2409,
}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class GF2m:
    """GF(2^m) with vectorized multiplication on uint64 arrays."""

    def __init__(self, m: int):
        if (2, m) not in IRREDUCIBLE:
            raise ValueError(f"no reducing polynomial on file for GF(2^{m})")
        self.p = 2
        self.m = m
        self.size = 1 << m
        self.poly = IRREDUCIBLE[(2, m)]

    def mul(self, a, b):
        """Carry-less multiply then reduce; a, b broadcastable uint64 arrays."""
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        res = np.zeros(np.broadcast(a, b).shape, dtype=np.uint64)
        for i in range(self.m):
            bit = (b >> np.uint64(i)) & np.uint64(1)
            res ^= (a << np.uint64(i)) * bit
        poly = np.uint64(self.poly)
        for bit in range(2 * self.m - 2, self.m - 1, -1):
            mask = (res >> np.uint64(bit)) & np.uint64(1)
            res ^= (poly << np.uint64(bit - self.m)) * mask
        return res

    def pow_table(self, n: int) -> np.ndarray:
        """Table t[x, i] = x^(i+1) for all x in the field, i in [n]."""
        xs = np.arange(self.size, dtype=np.uint64)
        table = np.empty((self.size, n), dtype=np.uint64)
        cur = xs.copy()
        for i in range(n):
            table[:, i] = cur
            cur = self.mul(cur, xs)
        return table


class GFpm:
    """GF(p^m) for odd prime p, backed by full multiplication tables.

    Sized for desk-scale exhaustive enumeration (p^m <= 4096).
    """

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if (p, m) not in IRREDUCIBLE:
            raise ValueError(f"no reducing polynomial on file for GF({p}^{m})")
        if p ** m > 4096:
            raise ValueError(f"GF({p}^{m}) too large for table-backed arithmetic")
        self.p = p
        self.m = m
        self.size = p ** m
        self.poly = IRREDUCIBLE[(p, m)]
        self._mul_table = self._build_mul_table()
        self._trace = self._build_trace()

    def _digits(self, x: int) -> list[int]:
        d = []
        for _ in range(self.m):
            d.append(x % self.p)
            x //= self.p
        return d

    def _undigits(self, d) -> int:
        x = 0
        for c in reversed(d):
            x = x * self.p + c
        return x

    def _mul_scalar(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * m - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        poly_digits = []
        x = self.poly
        while x:
            poly_digits.append(x % p)
            x //= p
        # reduce: x^m = -(poly mod x^m)
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j in range(m):
                    prod[k - m + j] = (prod[k - m + j] - c * poly_digits[j]) % p
        return self._undigits(prod[:m])

    def _build_mul_table(self) -> np.ndarray:
        t = np.zeros((self.size, self.size), dtype=np.int64)
        for a in range(self.size):
            for b in range(a, self.size):
                v = self._mul_scalar(a, b)
                t[a, b] = v
                t[b, a] = v
        return t

    def _build_trace(self) -> np.ndarray:
        # Tr(z) = z + z^p + ... + z^{p^{m-1}}, landing in F_p.
        tr = np.zeros(self.size, dtype=np.int64)
        for z in range(self.size):
            acc = 0
            cur = z
            for _ in range(self.m):
                acc = (acc + (cur % self.p)) % self.p  # constant digit of cur
                nxt = cur
                for _ in range(self.p - 1):
                    nxt = self._mul_scalar(nxt, cur)
                cur = nxt
            tr[z] = acc
        return tr

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return self._mul_table[a, b]

    def add(self, a, b):
        """Field addition = digit-wise addition mod p, vectorized."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        scale = 1
        for _ in range(self.m):
            out += ((a + b) % self.p) * scale
            a, b = a // self.p, b // self.p
            scale *= self.p
        return out

    def trace(self, a):
        return self._trace[np.asarray(a, dtype=np.int64)]

    def pow_table(self, n: int) -> np.ndarray:
        xs = np.arange(self.size, dtype=np.int64)
        table = np.empty((self.size, n), dtype=np.int64)
        cur = xs.copy()
        for i in range(n):
            table[:, i] = cur
            cur = self.mul(cur, xs)
        return table


def fwht(a: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform (unnormalized), length a power of two."""
    a = np.asarray(a, dtype=np.float64).copy()
    n = a.shape[0]
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        x, y = a[:, 0, :].copy(), a[:, 1, :].copy()
        a[:, 0, :] = x + y
        a[:, 1, :] = x - y
        a = a.reshape(n)
        h *= 2
    return a


def xor_convolve(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Distribution of X xor Y for independent X ~ p, Y ~ q over {0,1}^n."""
    n = p.shape[0]
    out = fwht(fwht(p) * fwht(q)) / n
    np.clip(out, 0.0, None, out=out)
    return out / out.sum()


def modp_convolve(p: np.ndarray, q: np.ndarray, base: int, n: int) -> np.ndarray:
    """Distribution of coordinatewise mod-`base` sum over (Z_base)^n."""
    shape = (base,) * n
    fp = np.fft.fftn(p.reshape(shape))
    fq = np.fft.fftn(q.reshape(shape))
    out = np.fft.ifftn(fp * fq).real.reshape(-1)
    np.clip(out, 0.0, None, out=out)
    return out / out.sum()


def int_to_bits(x: int, n: int) -> np.ndarray:
    return (x >> np.arange(n)) & 1


def bits_to_int(bits) -> int:
    v = 0
    for i, b in enumerate(bits):
        v |= int(b) << i
    return v


def ints_to_bit_matrix(xs: np.ndarray, n: int) -> np.ndarray:
    """(len(xs), n) matrix of bits, coordinate i = bit i."""
    xs = np.asarray(xs, dtype=np.int64)
    return ((xs[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)


def vec_to_index(v: np.ndarray, base: int) -> np.ndarray:
    """Mixed-radix pack: index = sum v[..., i] * base^i."""
    v = np.asarray(v, dtype=np.int64)
    weights = base ** np.arange(v.shape[-1], dtype=np.int64)
    return v @ weights


def index_to_vec(idx, base: int, n: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    out = np.empty(idx.shape + (n,), dtype=np.int64)
    cur = idx.copy()
    for i in range(n):
        out[..., i] = cur % base
        cur //= base
    return out
