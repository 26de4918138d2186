"""Compile programs over p-groups into low-degree polynomial maps over F_p.

The compiler walks a chain of index-p normal subgroups.  At each level the
current factors u_i(x) (group-valued functions given by small lookup tables
indexed by F_p-valued polynomials) are split as u_i = h_i * a^{eps_i} for a
coset representative a.  Barrington-style conjugation pushes all a-powers to
the right:

    P_i = P_{i-1} * conj_{a^{s_{i-1}}}(h_i) * (a^p)^{carry_i},

where s_i is the mod-p prefix sum of the eps_i and carry_i the mod-p carry.
The top coordinate of the output tuple is the polynomial s_ell; the remaining
coordinates compile the P-factors over the subgroup.  Conjugation is indexed
by s mod p, which requires conj_{a^p} to act trivially on the subgroup; the
chain search verifies this and it holds for every catalog p-group.

Polynomials are kept multilinear (x^e -> x), valid on {0,1}-valued inputs,
which is the whole domain of a program.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, NotAPGroup, classify_p_group, catalog_group
from .models import Block, BlockProduct


class CompileError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Sparse multilinear polynomials over F_p.  A monomial is a sorted tuple of
# variable indices; coefficients are nonzero elements of F_p.

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class SparsePoly:
    p: int
    n: int
    terms: dict  # Monomial -> coeff in [1, p)

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def is_constant(self):
        """Constant value if the poly has no variable terms, else None."""
        if not self.terms:
            return 0
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate at packed-int {0,1} inputs, vectorized."""
        xs = np.asarray(xs, dtype=np.int64)
        out = np.zeros(len(xs), dtype=np.int64)
        for mono, c in self.terms.items():
            mask = 0
            for v in mono:
                mask |= 1 << v
            out += c * ((xs & mask) == mask)
        return out % self.p


def poly_zero(p: int, n: int) -> SparsePoly:
    return SparsePoly(p, n, {})


def poly_const(p: int, n: int, c: int) -> SparsePoly:
    c %= p
    return SparsePoly(p, n, {(): c} if c else {})


def poly_var(p: int, n: int, i: int) -> SparsePoly:
    return SparsePoly(p, n, {(i,): 1})


def padd(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    terms = dict(a.terms)
    for m, c in b.terms.items():
        v = (terms.get(m, 0) + c) % a.p
        if v:
            terms[m] = v
        else:
            terms.pop(m, None)
    return SparsePoly(a.p, a.n, terms)


def pscale(a: SparsePoly, c: int) -> SparsePoly:
    c %= a.p
    if c == 0:
        return poly_zero(a.p, a.n)
    return SparsePoly(a.p, a.n, {m: (v * c) % a.p for m, v in a.terms.items()})


def pmul(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """Product with multilinear reduction (variable sets union)."""
    terms: dict = {}
    for m1, c1 in a.terms.items():
        s1 = set(m1)
        for m2, c2 in b.terms.items():
            m = tuple(sorted(s1 | set(m2)))
            v = (terms.get(m, 0) + c1 * c2) % a.p
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
    return SparsePoly(a.p, a.n, terms)


def _indicator(phi: SparsePoly, v: int) -> SparsePoly:
    """[phi == v] as a polynomial: 1 - (phi - v)^(p-1)."""
    p, n = phi.p, phi.n
    shifted = padd(phi, poly_const(p, n, -v))
    power = poly_const(p, n, 1)
    for _ in range(p - 1):
        power = pmul(power, shifted)
    return padd(poly_const(p, n, 1), pscale(power, -1))


# ---------------------------------------------------------------------------
# Subgroup chain


@dataclass
class ChainLevel:
    elements: tuple[int, ...]        # current group K (element indices in G)
    subgroup: tuple[int, ...]        # chosen H, |H| = |K| / p
    a: int                           # coset representative generating K/H
    quot_exp: dict                   # g in K -> e in [0,p)
    hpart: dict                      # g in K -> g * a^(-e)  in H
    conj: list[dict]                 # conj[s][h] = a^s h a^(-s)
    apow_p: int                      # a^p (element of H)


@dataclass
class PGroupChain:
    group: FiniteGroup
    p: int
    k: int
    levels: list[ChainLevel]


def _subset_subgroups(G: FiniteGroup, K: tuple[int, ...]) -> list[tuple[int, ...]]:
    Kset = set(K)
    found = {frozenset({G.identity})}
    frontier = [frozenset({G.identity})]
    while frontier:
        nxt = []
        for S in frontier:
            for g in K:
                if g in S:
                    continue
                cur = set(S) | {g}
                added = [g]
                while added:
                    new = []
                    for x in added:
                        for y in list(cur):
                            for z in (G.mul(x, y), G.mul(y, x)):
                                if z not in cur:
                                    cur.add(z)
                                    new.append(z)
                    added = new
                T = frozenset(cur)
                if not T <= Kset:
                    raise CompileError("closure escaped the subgroup")
                if T not in found:
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted((tuple(sorted(S)) for S in found), key=lambda s: (len(s), s))


def _build_level(G: FiniteGroup, K: tuple[int, ...], p: int) -> ChainLevel:
    order = len(K)
    target = order // p
    subgroups = [S for S in _subset_subgroups(G, K) if len(S) == target]
    Kset = set(K)
    for H in subgroups:  # already lex sorted
        Hset = set(H)
        if any(G.conj(g, h) not in Hset for g in K for h in H):
            continue  # not normal in K
        for a in K:
            if a in Hset:
                continue
            apow_p = G.power(a, p)
            if apow_p not in Hset:
                continue  # cannot happen for index p; guard
            if any(G.conj(apow_p, h) != h for h in H):
                continue  # conj by a^p must fix H pointwise for mod-p indexing
            quot_exp: dict = {}
            hpart: dict = {}
            for g in K:
                for e in range(p):
                    h = G.mul(g, G.power(G.inv(a), e))
                    if h in Hset:
                        quot_exp[g] = e
                        hpart[g] = h
                        break
                else:
                    raise CompileError("coset decomposition failed")
            conj = []
            for s in range(p):
                a_s = G.power(a, s)
                table = {h: G.conj(a_s, h) for h in H}
                if any(v not in Hset for v in table.values()):
                    raise CompileError("conjugate left the normal subgroup")
                conj.append(table)
            return ChainLevel(K, H, a, quot_exp, hpart, conj, apow_p)
    raise CompileError(
        "no (H, a) pair with conj_{a^p} trivial on H; "
        "mod-p conjugation indexing does not apply to this group")


_CHAIN_CACHE: dict[int, PGroupChain] = {}


def pgroup_chain(G: FiniteGroup) -> PGroupChain:
    """The deterministic normal-series data for a p-group."""
    cached = _CHAIN_CACHE.get(id(G))
    if cached is not None:
        return cached
    cls = classify_p_group(G)
    if cls is None:
        raise NotAPGroup(f"{G.name} is not a nontrivial p-group")
    p, k = cls
    levels = []
    K = tuple(range(G.order))
    for _ in range(k):
        lvl = _build_level(G, K, p)
        levels.append(lvl)
        K = lvl.subgroup
    chain = PGroupChain(G, p, k, levels)
    _CHAIN_CACHE[id(G)] = chain
    return chain


def encode(G: FiniteGroup, g: int) -> tuple[int, ...]:
    """The bijection G <-> F_p^k induced by the subgroup chain:
    g = h * a^e per level, tuple = (e, encode_H(h))."""
    chain = pgroup_chain(G)
    out = []
    cur = g
    for lvl in chain.levels:
        out.append(lvl.quot_exp[cur])
        cur = lvl.hpart[cur]
    return tuple(out)


def decode(G: FiniteGroup, tup) -> int:
    chain = pgroup_chain(G)
    cur = G.identity
    for lvl, e in zip(reversed(chain.levels), reversed(list(tup))):
        cur = G.mul(cur, G.power(lvl.a, int(e)))
    return cur


# ---------------------------------------------------------------------------
# The compiler


@dataclass
class PolyMap:
    group: FiniteGroup
    p: int
    k: int
    n: int
    coords: list[SparsePoly]  # top-down chain coordinates

    def degree(self) -> int:
        return max((c.degree() for c in self.coords), default=0)


@dataclass
class _Factor:
    idx_polys: tuple[SparsePoly, ...]
    table: dict  # tuple of F_p values -> group element index


# Estimated monomial budget; degree-c coordinates over n variables can carry
# ~n^c monomials, so higher-k groups hit this well before n = 10^4.
_TERM_BUDGET = 2_000_000


def compile_program(program: BlockProduct) -> PolyMap:
    """Compile a group program (width-1, no spill, identity truth tables)
    over a p-group into a PolyMap with one polynomial per chain coordinate."""
    G = program.group
    chain = pgroup_chain(G)
    p, n = chain.p, program.n
    factors: list[_Factor] = []
    for f in program.factors:
        if not isinstance(f, Block) or f.width != 1 or tuple(f.table) != (0, 1):
            raise CompileError("input must be a group program "
                               "(width-1 identity blocks, no spill)")
        factors.append(_Factor((poly_var(p, n, f.indices[0]),),
                               {(0,): G.identity, (1,): f.base}))
    coords: list[SparsePoly] = []
    for lvl in chain.levels:
        coords.append(_level_coordinate(factors, lvl, p, n))
        factors = _push_down(G, factors, lvl, p, n)
    return PolyMap(G, p, chain.k, n, coords)


def _prune_factor(f: _Factor) -> _Factor:
    """Drop constant index polynomials and coordinates the table ignores."""
    idx = list(f.idx_polys)
    table = f.table
    changed = True
    while changed:
        changed = False
        for c in range(len(idx)):
            const = idx[c].is_constant()
            if const is not None:
                table = {k[:c] + k[c + 1:]: v for k, v in table.items()
                         if k[c] == const}
                idx.pop(c)
                changed = True
                break
            vals = sorted({k[c] for k in table})
            depends = False
            base_val = vals[0]
            ref = {k[:c] + k[c + 1:]: v for k, v in table.items() if k[c] == base_val}
            for other in vals[1:]:
                cand = {k[:c] + k[c + 1:]: v for k, v in table.items()
                        if k[c] == other}
                if cand != ref:
                    depends = True
                    break
            if not depends:
                table = ref
                idx.pop(c)
                changed = True
                break
    return _Factor(tuple(idx), table)


def _eps_poly(f: _Factor, lvl: ChainLevel, p: int, n: int) -> SparsePoly:
    """Quotient exponent of the factor's value, as a polynomial."""
    out = poly_zero(p, n)
    for key, g in f.table.items():
        e = lvl.quot_exp[g]
        if e == 0:
            continue
        ind = poly_const(p, n, 1)
        for phi, v in zip(f.idx_polys, key):
            ind = pmul(ind, _indicator(phi, v))
        out = padd(out, pscale(ind, e))
    return out


def _level_coordinate(factors: list[_Factor], lvl: ChainLevel,
                      p: int, n: int) -> SparsePoly:
    total = poly_zero(p, n)
    for f in factors:
        total = padd(total, _eps_poly(_prune_factor(f), lvl, p, n))
        if len(total.terms) > _TERM_BUDGET:
            raise CompileError("polynomial term budget exceeded; "
                               "reduce n for this group")
    return total


def _push_down(G: FiniteGroup, factors: list[_Factor], lvl: ChainLevel,
               p: int, n: int) -> list[_Factor]:
    """Rewrite the factor list over the subgroup, one factor per old factor:
    value = conj_{a^s_prev}(hpart) * (a^p)^carry, indexed by (old key, s_prev)."""
    Hset = set(lvl.subgroup)
    out: list[_Factor] = []
    s_prev = poly_zero(p, n)

    def value(s: int, g: int) -> int:
        e = lvl.quot_exp[g]
        val = lvl.conj[s][lvl.hpart[g]]
        if s + e >= p:  # mod-p carry contributes a^p, an element of H
            val = G.mul(val, lvl.apow_p)
        if val not in Hset:
            raise CompileError("factor value escaped the normal subgroup")
        return val

    for f in factors:
        f = _prune_factor(f)
        eps = _eps_poly(f, lvl, p, n)
        sp_const = s_prev.is_constant()
        new_table: dict = {}
        if sp_const is not None:
            for key, g in f.table.items():
                new_table[key] = value(sp_const, g)
            out.append(_Factor(f.idx_polys, new_table))
        else:
            for key, g in f.table.items():
                for s in range(p):
                    new_table[key + (s,)] = value(s, g)
            out.append(_Factor(f.idx_polys + (s_prev,), new_table))
        s_prev = padd(s_prev, eps)
    return out


def compose_with_restriction(P: PolyMap, X) -> PolyMap:
    """Substitute x = X xor y: fresh variables y, degree preserved."""
    X = np.asarray(X, dtype=np.int64)
    if len(X) != P.n:
        raise CompileError("restriction length mismatch")
    coords = []
    for poly in P.coords:
        terms: dict = {}
        for mono, c in poly.terms.items():
            expansions = [((), c)]
            for v in mono:
                nxt = []
                for mono2, coeff in expansions:
                    if X[v] == 0:
                        nxt.append((mono2 + (v,), coeff))
                    else:
                        # x_v = 1 - y_v
                        nxt.append((mono2, coeff))
                        nxt.append((mono2 + (v,), -coeff))
                expansions = nxt
            for mono2, coeff in expansions:
                mkey = tuple(sorted(mono2))
                val = (terms.get(mkey, 0) + coeff) % P.p
                if val:
                    terms[mkey] = val
                else:
                    terms.pop(mkey, None)
        coords.append(SparsePoly(P.p, P.n, terms))
    return PolyMap(P.group, P.p, P.k, P.n, coords)


def eval_polymap(P: PolyMap, x) -> int:
    """Evaluate the polynomial tuple at a {0,1} input and decode."""
    if not isinstance(x, (int, np.integer)):
        if len(x) != P.n:
            raise CompileError("input length mismatch")
        x = sum(int(b) << i for i, b in enumerate(x))
    return int(eval_polymap_batch(P, np.array([x]))[0])


def eval_polymap_batch(P: PolyMap, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    chain = pgroup_chain(P.group)
    G = P.group
    vals = [poly.eval_batch(xs) for poly in P.coords]
    out = np.full(len(xs), G.identity, dtype=np.int64)
    for lvl, ev in zip(reversed(chain.levels), reversed(vals)):
        apowers = np.array([G.power(lvl.a, e) for e in range(P.p)])
        out = G.table[out, apowers[ev]]
    return out


def degree(P: PolyMap) -> int:
    return P.degree()


def polymap_to_json(P: PolyMap) -> str:
    enc = [list(encode(P.group, g)) for g in range(P.group.order)]
    return json.dumps({
        "group": P.group.name,
        "p": P.p, "k": P.k, "n": P.n,
        "encoding": enc,
        "polys": [{",".join(map(str, m)): c for m, c in poly.terms.items()}
                  for poly in P.coords],
    }, indent=1)


def polymap_from_json(text: str) -> PolyMap:
    obj = json.loads(text)
    G = catalog_group(obj["group"])
    coords = []
    for poly in obj["polys"]:
        terms = {}
        for key, c in poly.items():
            mono = tuple(int(t) for t in key.split(",")) if key else ()
            terms[mono] = int(c)
        coords.append(SparsePoly(obj["p"], obj["n"], terms))
    return PolyMap(G, obj["p"], obj["k"], obj["n"], coords)
