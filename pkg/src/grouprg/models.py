"""Block products over finite groups: exact evaluation, exact output
distributions and per-irrep bias under uniform input, the restriction
operator x -> D + (T and x), and the read-once-polynomial bridge.

A block product is an ordered sequence of factors multiplied left to right.
Boolean factors contribute base^{f_i(x_{I_i})}; spill factors are G-valued
functions of their coordinates.  The classical single-spill form has one
G-valued factor at position 0; restriction may produce several G-valued
factors in place (moving them to position 0 would change the product over a
non-commutative group), and the spill budget q counts the union of their
coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, catalog_group
from .reps import GDistribution, Irrep


class ModelError(ValueError):
    pass


class NotReadOnce(ModelError):
    pass


class InfeasiblePartition(ModelError):
    pass


@dataclass(frozen=True)
class Block:
    """Boolean-exponent factor: base ** f(x_indices)."""

    indices: tuple[int, ...]
    table: tuple[int, ...]  # length 2^len(indices), values in {0,1}
    base: int

    def __post_init__(self):
        if len(self.table) != 1 << len(self.indices):
            raise ModelError("truth table length mismatch")
        if any(v not in (0, 1) for v in self.table):
            raise ModelError("block table must be 0/1 valued")

    @property
    def width(self) -> int:
        return len(self.indices)

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1


@dataclass(frozen=True)
class SpillFactor:
    """G-valued factor reading spill coordinates."""

    indices: tuple[int, ...]
    table: tuple[int, ...]  # length 2^len(indices), group element indices

    def __post_init__(self):
        if len(self.table) != 1 << len(self.indices):
            raise ModelError("spill table length mismatch")

    @property
    def width(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class BlockProduct:
    group: FiniteGroup
    n: int
    factors: tuple

    def __post_init__(self):
        seen: set[int] = set()
        for f in self.factors:
            for i in f.indices:
                if not (0 <= i < self.n):
                    raise ModelError(f"coordinate {i} out of range")
                if i in seen:
                    raise ModelError(f"coordinate {i} used by two factors")
                seen.add(i)

    @property
    def blocks(self) -> list[Block]:
        return [f for f in self.factors if isinstance(f, Block)]

    @property
    def spill_factors(self) -> list[SpillFactor]:
        return [f for f in self.factors if isinstance(f, SpillFactor)]

    @property
    def spill_set(self) -> tuple[int, ...]:
        out: list[int] = []
        for f in self.spill_factors:
            out.extend(f.indices)
        return tuple(sorted(out))

    @property
    def ell(self) -> int:
        return len(self.blocks)

    @property
    def width(self) -> int:
        widths = [b.width for b in self.blocks]
        return max(widths) if widths else 0

    @property
    def q(self) -> int:
        return len(self.spill_set)

    def shape(self) -> tuple[int, int, int]:
        """(ell, w, q) as declared by the factors actually present."""
        return (self.ell, self.width, self.q)

    def nonconstant_blocks(self) -> int:
        return sum(1 for b in self.blocks if not b.is_constant())


def block_product(group: FiniteGroup, n: int, blocks, spill=None,
                  spill_position: int = 0) -> BlockProduct:
    """Assemble a block product; `blocks` is a list of
    (indices, truth_table, base) and `spill` an optional (indices, g_table)."""
    factors: list = [Block(tuple(i), tuple(t), int(b)) for (i, t, b) in blocks]
    if spill is not None:
        sf = SpillFactor(tuple(spill[0]), tuple(spill[1]))
        factors.insert(spill_position, sf)
    return BlockProduct(group, n, tuple(factors))


def group_program(group: FiniteGroup, elements, coords=None) -> BlockProduct:
    """A program: width-1 blocks with the identity truth table (w=1, q=0)."""
    elements = list(elements)
    if coords is None:
        coords = range(len(elements))
    blocks = [((c,), (0, 1), g) for c, g in zip(coords, elements)]
    return block_product(group, max(coords) + 1 if elements else 0, blocks)


def _subindex(xs: np.ndarray, indices: tuple[int, ...]) -> np.ndarray:
    idx = np.zeros(len(xs), dtype=np.int64)
    for j, pos in enumerate(indices):
        idx |= ((xs >> pos) & 1) << j
    return idx


def eval_product(f: BlockProduct, x) -> int:
    """Evaluate on a single input (bit vector or packed int)."""
    if not isinstance(x, (int, np.integer)):
        if len(x) != f.n:
            raise ModelError(f"input has {len(x)} bits, expected {f.n}")
        x = sum(int(b) << i for i, b in enumerate(x))
    return int(eval_many(f, np.array([x]))[0])


def eval_many(f: BlockProduct, xs: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on packed-int inputs; returns element indices."""
    xs = np.asarray(xs, dtype=np.int64)
    G = f.group
    acc = np.full(len(xs), G.identity, dtype=np.int64)
    for factor in f.factors:
        sub = _subindex(xs, factor.indices)
        table = np.asarray(factor.table, dtype=np.int64)
        if isinstance(factor, Block):
            expo = table[sub]
            gvec = np.where(expo == 1, factor.base, G.identity)
        else:
            gvec = table[sub]
        acc = G.table[acc, gvec]
    return acc


def _convolve(G: FiniteGroup, dist: np.ndarray, factor_dist: np.ndarray) -> np.ndarray:
    out = np.zeros(G.order)
    for g in np.nonzero(dist)[0]:
        out[G.table[g]] += dist[g] * factor_dist
    return out


def exact_output_distribution(f: BlockProduct, input_dist=None) -> GDistribution:
    """Exact distribution of f's output.

    input_dist None means uniform input; the computation factorizes per block
    and convolves in product order, O(ell * |G|^2) for any n.  Otherwise
    input_dist is a sampler over F_2^n whose exact distribution is pushed
    through f.
    """
    G = f.group
    if input_dist is None:
        dist = np.zeros(G.order)
        dist[G.identity] = 1.0
        for factor in f.factors:
            fd = np.zeros(G.order)
            table = np.asarray(factor.table, dtype=np.int64)
            if isinstance(factor, Block):
                beta = float(table.mean())
                fd[G.identity] += 1 - beta
                fd[factor.base] += beta
            else:
                np.add.at(fd, table, 1.0 / len(table))
            dist = _convolve(G, dist, fd)
        return GDistribution(G, dist)
    if input_dist.p != 2:
        raise ModelError("sampler mode expects a bit sampler")
    if input_dist.n != f.n:
        raise ModelError("sampler length mismatch")
    weights = input_dist.exact_distribution()
    outs = eval_many(f, np.arange(1 << f.n))
    dist = np.zeros(G.order)
    np.add.at(dist, outs, weights)
    return GDistribution(G, dist)


def exact_bias(f: BlockProduct, rho: Irrep) -> np.ndarray:
    """E[rho(f(U))] under uniform input, by per-factor factorization:
    each block contributes (1-beta) I + beta rho(g)."""
    d = rho.dim
    acc = np.eye(d, dtype=complex)
    for factor in f.factors:
        table = np.asarray(factor.table, dtype=np.int64)
        if isinstance(factor, Block):
            beta = float(table.mean())
            M = (1 - beta) * np.eye(d) + beta * rho.images[factor.base]
        else:
            M = rho.images[table].mean(axis=0)
        acc = acc @ M
    return acc


# ---------------------------------------------------------------------------
# Restrictions


@dataclass(frozen=True)
class Restriction:
    """x -> D + (T and x): coordinates with T=0 are fixed to D's bits."""

    D: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.D, dtype=np.int64)
        T = np.asarray(self.T, dtype=np.int64)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "T", T)
        if D.shape != T.shape:
            raise ModelError("D and T must have equal length")

    def apply_int(self, x: int) -> int:
        d = sum(int(b) << i for i, b in enumerate(self.D))
        t = sum(int(b) << i for i, b in enumerate(self.T))
        return d ^ (t & x)


@dataclass
class RestrictionStats:
    ell: int
    j1: int               # exactly one free coordinate, non-constant
    jge2: int             # at least two free coordinates
    dead: int             # no free coordinate
    constant1: int        # one free coordinate but restricted to a constant
    q_set: tuple[int, ...]          # free coords of blocks merged into spill
    spill_free: int                 # |T  intersect  original spill set|

    @property
    def i0_prime_size(self) -> int:
        return self.spill_free + len(self.q_set)

    def check(self) -> bool:
        return self.j1 + self.jge2 + self.dead + self.constant1 == self.ell


def _restrict_table(indices: tuple[int, ...], table: np.ndarray,
                    r: Restriction) -> tuple[tuple[int, ...], np.ndarray]:
    """Partially evaluate a truth table under x -> D + (T and x): T=0
    coordinates are pinned to D's bits, and free coordinates still see the
    D-shift (the factor reads D_i xor x_i there)."""
    free = [i for i in indices if r.T[i] == 1]
    table = np.asarray(table, dtype=np.int64)
    pos_of = {i: j for j, i in enumerate(indices)}
    fixed_mask = 0
    for j, i in enumerate(indices):
        if r.T[i] == 0 and r.D[i] == 1:
            fixed_mask |= 1 << j
    m = len(free)
    new = np.empty(1 << m, dtype=np.int64)
    for u in range(1 << m):
        idx = fixed_mask
        for j, i in enumerate(free):
            if ((u >> j) & 1) ^ int(r.D[i]):
                idx |= 1 << pos_of[i]
        new[u] = table[idx]
    return tuple(free), new


def restrict(f: BlockProduct, r: Restriction,
             keep_width: int = 1) -> tuple[BlockProduct, RestrictionStats]:
    """Partial-evaluate each factor at D on the T=0 coordinates.

    Blocks left with more than `keep_width` free coordinates are merged into
    the spill as G-valued factors in place (their free coordinates join the
    spill set); keep_width=1 gives the width-1 collapse, larger values the
    width-reduction semantics.  Evaluation is preserved exactly:
    eval(restricted, x) == eval(f, D + T and x).
    """
    if len(r.D) != f.n:
        raise ModelError("restriction length mismatch")
    G = f.group
    new_factors: list = []
    j1 = jge2 = dead = constant1 = 0
    q_coords: list[int] = []
    spill_free = 0
    for factor in f.factors:
        free, new_table = _restrict_table(factor.indices, factor.table, r)
        if isinstance(factor, SpillFactor):
            spill_free += len(free)
            new_factors.append(SpillFactor(free, tuple(int(v) for v in new_table)))
            continue
        nfree = len(free)
        const = len(set(new_table.tolist())) == 1
        if nfree == 0:
            dead += 1
        elif nfree == 1:
            if const:
                constant1 += 1
            else:
                j1 += 1
        else:
            jge2 += 1
        if nfree > keep_width:
            q_coords.extend(free)
            gtable = tuple(G.power(factor.base, int(v)) for v in new_table)
            new_factors.append(SpillFactor(free, gtable))
        else:
            new_factors.append(Block(free, tuple(int(v) for v in new_table),
                                     factor.base))
    stats = RestrictionStats(ell=len(f.blocks), j1=j1, jge2=jge2, dead=dead,
                             constant1=constant1,
                             q_set=tuple(sorted(q_coords)),
                             spill_free=spill_free)
    return BlockProduct(G, f.n, tuple(new_factors)), stats


def permute_instance(f: BlockProduct, perm) -> BlockProduct:
    """Relabel coordinates: the factor that read coordinate i reads perm[i].

    Evaluating the result on x equals evaluating f on x composed with perm,
    which is the any-order test surface."""
    perm = list(perm)
    out = []
    for factor in f.factors:
        idx = tuple(perm[i] for i in factor.indices)
        if isinstance(factor, Block):
            out.append(Block(idx, factor.table, factor.base))
        else:
            out.append(SpillFactor(idx, factor.table))
    return BlockProduct(f.group, f.n, tuple(out))


# ---------------------------------------------------------------------------
# Read-once polynomial bridge


def from_read_once_polynomial(monomials, modulus: int, tau: int,
                              n: int | None = None):
    """Translate a read-once polynomial over Z_modulus into a block product.

    `monomials` is a list of (coefficient, variable index tuple); variables
    must be disjoint across monomials.  Monomials of degree <= tau become
    blocks with AND truth tables and base element coeff mod modulus; higher
    degree monomials are dropped and counted (the harness measures the
    induced error instead of assuming a bound).

    Returns (BlockProduct over Z_modulus, dropped_count).
    """
    G = catalog_group(f"Z{modulus}")
    seen: set[int] = set()
    blocks = []
    dropped = 0
    max_var = -1
    for coeff, vars_ in monomials:
        vars_ = tuple(vars_)
        for v in vars_:
            if v in seen:
                raise NotReadOnce(f"variable {v} appears twice")
            seen.add(v)
            max_var = max(max_var, v)
        base = int(coeff) % modulus
        if base == 0:
            continue
        if len(vars_) > tau:
            dropped += 1
            continue
        table = tuple(1 if u == (1 << len(vars_)) - 1 else 0
                      for u in range(1 << len(vars_)))
        blocks.append((vars_, table, base))
    if n is None:
        n = max_var + 1
    return block_product(G, max(n, 1), blocks), dropped


def polynomial_value_distance(monomials, modulus: int, f: BlockProduct,
                              n: int) -> float:
    """Exhaustive Delta between the true polynomial value distribution and
    the translated block product's output, both under uniform input."""
    if n > 20:
        raise ModelError("exhaustive comparison capped at n = 20")
    xs = np.arange(1 << n)
    true_vals = np.zeros(1 << n, dtype=np.int64)
    for coeff, vars_ in monomials:
        term = np.full(1 << n, int(coeff), dtype=np.int64)
        for v in vars_:
            term *= (xs >> v) & 1
        true_vals = (true_vals + term) % modulus
    approx = eval_many(f, xs)
    delta = 0.0
    for v in range(modulus):
        delta += abs(float((true_vals == v).mean() - (approx == v).mean()))
    return delta / 2


# ---------------------------------------------------------------------------
# Instance generation and serialization


def random_instance(kind: str, group: FiniteGroup, n: int, ell: int, w: int,
                    q: int, rng_seed: int, allow_identity_base: bool = False,
                    allow_constant_fn: bool = False) -> BlockProduct:
    """Deterministic random instance: disjoint blocks of width w (width 1 for
    kind='program'), optional q-bit G-valued spill at position 0."""
    rng = np.random.default_rng(rng_seed)
    if kind == "program":
        w, q = 1, 0
    if ell * w + q > n:
        raise InfeasiblePartition(f"ell*w + q = {ell * w + q} > n = {n}")
    coords = rng.permutation(n)
    spill_idx = tuple(sorted(int(c) for c in coords[:q]))
    blocks = []
    pos = q
    G = group
    nonid = [g for g in range(G.order) if g != G.identity]
    for _ in range(ell):
        idx = tuple(sorted(int(c) for c in coords[pos:pos + w]))
        pos += w
        base = int(rng.choice(range(G.order) if allow_identity_base else nonid))
        if kind == "program":
            table = (0, 1)
        else:
            while True:
                table = tuple(int(b) for b in rng.integers(0, 2, size=1 << w))
                if allow_constant_fn or len(set(table)) > 1:
                    break
        blocks.append((idx, table, base))
    spill = None
    if q > 0:
        spill = (spill_idx, tuple(int(g) for g in rng.integers(0, G.order,
                                                               size=1 << q)))
    return block_product(G, n, blocks, spill=spill)


def instance_to_json(f: BlockProduct) -> str:
    payload = {
        "group": f.group.name,
        "n": f.n,
        "blocks": [],
        "spill": None,
    }
    spills = []
    for factor in f.factors:
        if isinstance(factor, Block):
            payload["blocks"].append({
                "indices": list(factor.indices),
                "truth_table": list(factor.table),
                "base": factor.base,
            })
        else:
            spills.append({"indices": list(factor.indices),
                           "table": list(factor.table)})
    if len(spills) == 1:
        payload["spill"] = spills[0]
    elif spills:
        payload["spill"] = spills
    return json.dumps(payload, indent=1)


def instance_from_json(text: str) -> BlockProduct:
    obj = json.loads(text)
    G = catalog_group(obj["group"])
    factors: list = []
    spill = obj.get("spill")
    spills = [] if spill is None else (spill if isinstance(spill, list) else [spill])
    for s in spills:
        factors.append(SpillFactor(tuple(s["indices"]), tuple(s["table"])))
    for b in obj["blocks"]:
        factors.append(Block(tuple(b["indices"]), tuple(b["truth_table"]),
                             int(b["base"])))
    return BlockProduct(G, obj["n"], tuple(factors))
