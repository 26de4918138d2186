"""Block products: evaluation, exact distributions/bias, restrictions,
the read-once polynomial bridge, and the per-block norm claims."""

import itertools
import math

import numpy as np
import pytest

from grouprg import groups as gr
from grouprg import harness as hn
from grouprg import models as md
from grouprg import reps
from grouprg import samplers as sm

Q8 = gr.catalog_group("Q8")
Z2 = gr.catalog_group("Z2")


def test_eval_identity_and_parity():
    ident = md.block_product(Q8, 3, [((i,), (0, 1), Q8.identity)
                                     for i in range(3)])
    assert (md.eval_many(ident, np.arange(8)) == Q8.identity).all()
    par = md.group_program(Z2, [1] * 5)
    outs = md.eval_many(par, np.arange(32))
    assert (outs == np.array([bin(x).count("1") % 2 for x in range(32)])).all()


def test_eval_q8_example():
    p2 = md.group_program(Q8, [2, 4])  # (i, j)
    assert md.eval_product(p2, [1, 1]) == 6  # k


def test_eval_length_mismatch():
    p2 = md.group_program(Q8, [2, 4])
    with pytest.raises(md.ModelError):
        md.eval_product(p2, [1, 1, 1])


def test_disjointness_enforced():
    with pytest.raises(md.ModelError):
        md.block_product(Q8, 4, [((0, 1), (0, 0, 0, 1), 2),
                                 ((1, 2), (0, 1, 1, 0), 4)])


def test_output_distribution_parity_and_ii():
    par = md.group_program(Z2, [1] * 6)
    d = md.exact_output_distribution(par).pmf
    assert np.abs(d - 0.5).max() < 1e-12
    pii = md.group_program(Q8, [2, 2])
    d = md.exact_output_distribution(pii).pmf
    assert d[0] == pytest.approx(0.25) and d[2] == pytest.approx(0.5) \
        and d[1] == pytest.approx(0.25)


def test_output_distribution_sampler_mode_consistent():
    inst = md.random_instance("block", Q8, 8, 2, 2, 2, 5)
    d1 = md.exact_output_distribution(inst).pmf
    d2 = md.exact_output_distribution(inst, sm.Uniform(8)).pmf
    assert np.abs(d1 - d2).max() < 1e-12


def test_exact_bias_examples():
    S = reps.irrep_catalog("Q8")
    rho = S.irreps[4]
    zero = md.exact_bias(md.group_program(Q8, [1]), rho)  # g = -1
    assert np.abs(zero).max() < 1e-12
    half = md.exact_bias(md.group_program(Q8, [2]), rho)  # g = i
    assert reps.op_norm(half) == pytest.approx(math.sqrt(2) / 2, abs=1e-9)
    # submultiplicativity across t blocks
    for t in (2, 3, 4):
        prog = md.group_program(Q8, [2] * t)
        assert reps.op_norm(md.exact_bias(prog, rho)) <= \
            (math.sqrt(2) / 2) ** t + 1e-9


def test_exact_bias_matches_fourier_of_distribution():
    S = reps.irrep_catalog("Q8")
    for seed in range(8):
        inst = md.random_instance("block", Q8, 10, 3, 2, 2, seed)
        dist = md.exact_output_distribution(inst)
        for rho in S.irreps:
            b1 = md.exact_bias(inst, rho)
            b2 = reps.fourier_coefficient(dist, rho).conj()
            assert np.abs(b1 - b2).max() < 1e-9


def test_restrict_preserves_evaluation_exhaustively():
    rng = np.random.default_rng(3)
    for trial in range(12):
        n = int(rng.integers(6, 13))
        q = int(rng.integers(0, 3))
        ell = int(rng.integers(1, (n - q) // 2 + 1))
        inst = md.random_instance("block", Q8, n, ell, 2, q, 500 + trial)
        D = rng.integers(0, 2, n)
        T = rng.integers(0, 2, n)
        r = md.Restriction(D, T)
        for kw in (1, 2):
            rf, stats = md.restrict(inst, r, keep_width=kw)
            assert stats.check()
            xs = np.arange(1 << n)
            ref_inputs = np.array([r.apply_int(int(x)) for x in xs])
            assert (md.eval_many(rf, xs) ==
                    md.eval_many(inst, ref_inputs)).all()


def test_restrict_all_free_and_all_fixed():
    inst = md.random_instance("block", Q8, 8, 2, 2, 2, 7)
    n = inst.n
    rf, st = md.restrict(inst, md.Restriction(np.zeros(n, int),
                                              np.ones(n, int)))
    assert st.jge2 == 2 and st.dead == 0
    rf0, st0 = md.restrict(inst, md.Restriction(np.ones(n, int),
                                                np.zeros(n, int)))
    assert st0.dead == 2
    assert md.eval_many(rf0, np.array([0]))[0] == \
        md.eval_many(inst, np.array([(1 << n) - 1]))[0]


def test_restrict_width2_and_block_to_width1():
    blk = md.block_product(Q8, 2, [((0, 1), (0, 0, 0, 1), 2)])
    rf, st = md.restrict(blk, md.Restriction(np.array([0, 1]),
                                             np.array([1, 0])))
    b = rf.blocks[0]
    assert b.indices == (0,) and tuple(b.table) == (0, 1)
    assert st.j1 == 1 and st.check()


def test_restrict_merges_multifree_into_spill():
    inst = md.block_product(Q8, 6, [((0, 1, 2), (0, 1, 1, 0, 1, 0, 0, 1), 2),
                                    ((3,), (0, 1), 4)])
    r = md.Restriction(np.zeros(6, int), np.array([1, 1, 0, 1, 0, 0]))
    rf, st = md.restrict(inst, r, keep_width=1)
    assert st.jge2 == 1 and st.j1 == 1
    assert st.q_set == (0, 1)
    assert rf.q == 2 and rf.width == 1
    # keep_width=2 keeps it as a width-2 block instead
    rf2, _ = md.restrict(inst, r, keep_width=2)
    assert rf2.q == 0 and rf2.width == 2


def test_permute_instance_any_order_surface():
    rng = np.random.default_rng(0)
    inst = md.random_instance("block", Q8, 8, 2, 2, 2, 9)
    perm = rng.permutation(8)
    pinst = md.permute_instance(inst, perm)
    # evaluating the permuted instance at x equals evaluating the original
    # at the bit vector y with y_i = x_{perm[i]}
    for x in range(256):
        y = sum(((x >> perm[i]) & 1) << i for i in range(8))
        assert md.eval_many(pinst, np.array([x]))[0] == \
            md.eval_many(inst, np.array([y]))[0]


def test_read_once_polynomial_bridge():
    f, dropped = md.from_read_once_polynomial([(1, (0,)), (1, (1, 2))], 3, 2)
    assert dropped == 0 and f.ell == 2
    assert sorted(b.width for b in f.blocks) == [1, 2]
    xs = np.arange(8)
    vals = ((xs >> 0) & 1) + ((xs >> 1) & 1) * ((xs >> 2) & 1)
    assert (md.eval_many(f, xs) == vals % 3).all()
    z, dz = md.from_read_once_polynomial([], 3, 2, n=4)
    assert dz == 0 and (md.eval_many(z, np.arange(16)) == 0).all()


def test_read_once_drop_measured_error():
    mono = [(1, tuple(range(4)))]
    f, dropped = md.from_read_once_polynomial(mono, 3, 3, n=6)
    assert dropped == 1
    delta = md.polynomial_value_distance(mono, 3, f, 6)
    assert delta <= 2.0 ** (-4) + 1e-12


def test_read_once_rejects_shared_variable():
    with pytest.raises(md.NotReadOnce):
        md.from_read_once_polynomial([(1, (0, 1)), (2, (1,))], 3, 2)


def test_random_instance_determinism_and_partition():
    a = md.random_instance("block", Q8, 10, 3, 2, 2, 77)
    b = md.random_instance("block", Q8, 10, 3, 2, 2, 77)
    assert md.instance_to_json(a) == md.instance_to_json(b)
    prog = md.random_instance("program", Q8, 6, 6, 1, 0, 1)
    assert prog.shape() == (6, 1, 0)
    with pytest.raises(md.InfeasiblePartition):
        md.random_instance("block", Q8, 5, 3, 2, 2, 0)


def test_instance_json_round_trip():
    inst = md.random_instance("block", Q8, 10, 2, 2, 3, 11)
    inst2 = md.instance_from_json(md.instance_to_json(inst))
    xs = np.arange(1 << 10)
    assert (md.eval_many(inst, xs) == md.eval_many(inst2, xs)).all()


# --- per-block and long-product norm claims -------------------------------


def test_bounded_bias_claim_exhaustive_w12():
    S = reps.irrep_catalog("Q8")
    images = S.irreps[4].images
    for w in (1, 2):
        rep = hn.bounded_bias_check(images, w, 0.25)
        assert rep["pass"], rep


def test_long_product_claim_small():
    S = reps.irrep_catalog("Q8")
    rep = hn.long_product_bias_check(S.irreps[4].images, 2, 0.25, 0.3,
                                     trials=30, rng_seed=0)
    assert rep["pass"]
    assert rep["ell"] >= 2 ** 6 * 16 * math.log(1 / 0.3) - 1


def test_restrict_probability_claim_exhaustive():
    for w in (1, 2, 3):
        for p in (0.25, 0.5):
            bound = p * ((1 - p) / 2) ** (w - 1)
            for assign in itertools.product((0, 1), repeat=1 << w):
                if len(set(assign)) == 1:
                    continue
                assert hn.restrict_probability_exact(assign, w, p) >= \
                    bound - 1e-12
