"""Generator constructions: composition, seed accounting, measured fooling,
ablations, spill tolerance, and the commutative reduction."""

import math

import numpy as np
import pytest

from grouprg import groups as gr
from grouprg import harness as hn
from grouprg import models as md
from grouprg import prg
from grouprg import reps
from grouprg import samplers as sm

Q8 = gr.catalog_group("Q8")


def _worst_delta(spec_or_sampler, corpus):
    P = getattr(spec_or_sampler, "sampler", spec_or_sampler)
    return max(hn.exact_distance(f, P) for f in corpus)


def corpus_programs(G, n, count, seed0):
    return [md.random_instance("program", G, n, n, 1, 0, seed0 + t)
            for t in range(count)]


def test_pgroup_prg_rejects_non_p_groups():
    with pytest.raises(gr.NotAPGroup):
        prg.prg_p_group(gr.catalog_group("Z6"), 8, 0.1)


def test_pgroup_prg_z2_degenerates_to_xor_of_small_bias():
    Z2g = gr.catalog_group("Z2")
    spec = prg.prg_p_group(Z2g, 8, 0.2, mode="asymptotic")
    comps = spec.components()
    assert all(s.startswith(("sb2", "prb(viola")) for s, _ in comps)
    assert prg.group_poly_degree(Z2g) == 1
    # p = 2: the power-residue map is the identity on bits
    par = md.group_program(Z2g, [1] * 8)
    assert hn.exact_distance(par, spec.sampler) <= 0.2


def test_pgroup_prg_identity_program_delta_zero():
    spec = prg.prg_p_group(Q8, 8, 0.2, mode="asymptotic")
    ident = md.block_product(Q8, 8, [((i,), (0, 1), Q8.identity)
                                     for i in range(8)])
    assert hn.exact_distance(ident, spec.sampler) < 1e-12


def test_pgroup_prg_fools_random_programs():
    spec = prg.prg_p_group(Q8, 10, 0.1, mode="calibrated")
    corpus = corpus_programs(Q8, 10, 10, 4000)
    assert _worst_delta(spec, corpus) <= 0.1


def test_pgroup_prg_any_order():
    spec = prg.prg_p_group(Q8, 10, 0.1, mode="calibrated")
    rng = np.random.default_rng(6)
    corpus = corpus_programs(Q8, 10, 3, 4100)
    for inst in corpus:
        for _ in range(5):
            pinst = md.permute_instance(inst, rng.permutation(10))
            assert hn.exact_distance(pinst, spec.sampler) <= 0.1


def test_seed_accounting_is_component_sum():
    spec = prg.prg_p_group(Q8, 12, 0.1, mode="asymptotic")
    assert spec.seed_len == sum(b for _, b in spec.components())
    # seed_len / log2(n/eps) stays within a constant band across n
    ratios = []
    for n in (8, 12, 16, 20):
        for eps in (0.2, 0.1, 0.05):
            s = prg.prg_p_group(Q8, n, eps, mode="asymptotic")
            ratios.append(s.seed_len / math.log2(n / eps))
    assert max(ratios) <= 3 * min(ratios)


def test_ablation_noise_layer_strictly_helps():
    # removing the derandomized-noise component leaves only the small-bias
    # layer and strictly increases the worst-case distance on a Q8 corpus
    full = prg.prg_p_group(Q8, 10, 0.1,
                           params={"m1": 4, "m2": 4, "provenance": "x"})
    alone = sm.small_bias_f2(10, 10 / 16, 4)
    corpus = corpus_programs(Q8, 10, 12, 4200)
    assert _worst_delta(full, corpus) < _worst_delta(alone, corpus)


def test_spill_pgroup_q0_equals_pgroup_construction():
    spec = prg.prg_spill_pgroup(Q8, 8, 0.25, params={"m1": 5, "m2": 5})
    base = prg.prg_p_group(Q8, 8, 0.25, params={"m1": 5, "m2": 5})
    assert [s for s, _ in spec.components()] == [s for s, _ in base.components()]


def test_spill_pgroup_fools_spill_corpus():
    spec = prg.prg_spill_pgroup(Q8, 10, 0.1, mode="calibrated")
    corpus = [md.random_instance("block", Q8, 10, 7, 1, 3, 4300 + t)
              for t in range(8)]
    assert _worst_delta(spec, corpus) <= 0.1


def test_spill_pgroup_conditioned_bias_audit():
    spec = prg.prg_spill_pgroup(Q8, 10, 0.1, mode="calibrated")
    q = 3
    copies = [spec.sampler.parts[0]] + list(spec.sampler.parts[1].inner.copies)
    for copy in copies:
        eps_declared = copy.eps
        cb = sm.conditioned_bias(copy, [0, 4, 7], [1, 0, 1])
        assert cb <= 2.0 ** (q + 1) * eps_declared + 1e-12


def test_mixing_prg_requires_mixing_group():
    with pytest.raises(prg.NotMixing):
        prg.prg_mixing(gr.catalog_group("S3"), 8, 0.2)


DESK_MIXING = {"kappa": 1.0, "ellprime": 3, "columns": 8, "k_levels": 2,
               "k_columns": 2, "k_wise": 4, "deltaA": 0.05, "include_A": True,
               "provenance": "desk-scale"}


def test_mixing_prg_fools_q8_programs():
    spec = prg.prg_mixing(Q8, 8, 0.2, params=dict(DESK_MIXING))
    corpus = corpus_programs(Q8, 8, 10, 4400)
    worst = _worst_delta(spec, corpus)
    assert worst <= 0.2
    ident = md.block_product(Q8, 8, [((i,), (0, 1), Q8.identity)
                                     for i in range(8)])
    assert hn.exact_distance(ident, spec.sampler) < 1e-12


def test_mixing_prg_ablation_A_layer_handles_short_programs():
    # a program with few non-identity images per irrep is already fooled by
    # the almost-k-wise layer alone
    params = dict(DESK_MIXING)
    params["include_A"] = True
    spec = prg.prg_mixing(Q8, 8, 0.2, params=params)
    A = spec.sampler.parts[0]
    short = md.group_program(Q8, [2, 3] + [Q8.identity] * 6)  # i * -i = 1...
    assert hn.exact_distance(short, A) <= 0.2


def test_mixing_prg_theta_recorded():
    spec = prg.prg_mixing(Q8, 8, 0.2, params=dict(DESK_MIXING))
    assert spec.params["theta"] == pytest.approx(0.25)


def test_fk_layer_degenerate_masks():
    base = sm.small_bias_f2(6, 0.25)
    D = sm.small_bias_f2(6, 0.25)
    ones = sm.Constant([1] * 6)
    zeros = sm.Constant([0] * 6)
    f1 = prg.fk_layer(base, D, ones)
    ref = sm.xor_combine(D, base)
    assert np.abs(f1.exact_distribution() - ref.exact_distribution()).max() < 1e-9
    f0 = prg.fk_layer(base, D, zeros)
    assert np.abs(f0.exact_distribution() - D.exact_distribution()).max() < 1e-9
    with pytest.raises(sm.LengthMismatch):
        prg.fk_layer(base, sm.small_bias_f2(5, 0.25), ones)


def test_fk_layer_fools_small_block_products():
    n = 10
    base = sm.Uniform(n)
    D = sm.almost_kwise_biased(n, 1, 4, 0.05, m=7)
    T = sm.almost_kwise_biased(n, 2, 4, 0.05, m=8)
    layer = prg.fk_layer(base, D, T)
    corpus = [md.random_instance("block", Q8, n, 3, 2, 0, 4500 + t)
              for t in range(6)]
    assert _worst_delta(layer, corpus) <= 0.35


def test_one_iteration_precondition():
    base = sm.Uniform(8)
    with pytest.raises(prg.PRGError):
        prg.one_iteration(base, base, Q8, 1, 0.1)


def test_one_iteration_composition_identity():
    # with P = P1 = uniform the composition's distance is governed by the
    # fk layer alone (sanity of the XOR composition)
    n = 8
    base = sm.Uniform(n)
    eps = 0.3
    w = 5  # >= loglog(1/eps) + log m
    spec = prg.one_iteration(base, base, Q8, w, eps,
                             params={"C": 1.0, "m_D": 6, "m_T": 6,
                                     "delta": 0.05,
                                     "long_params": {"k": 3, "delta": 0.05,
                                                     "b": 2, "m_D": 6,
                                                     "m_T": 6}})
    corpus = [md.random_instance("block", Q8, n, 2, 2, 0, 4600 + t)
              for t in range(4)]
    fk_only = prg.fk_layer(base,
                           sm.almost_kwise_biased(n, 1, spec.params["short"]["k"],
                                                  spec.params["short"]["delta"], m=6),
                           sm.almost_kwise_biased(n, spec.params["short"]["b"],
                                                  spec.params["short"]["k"],
                                                  spec.params["short"]["delta"], m=6))
    assert _worst_delta(spec, corpus) <= _worst_delta(fk_only, corpus) + eps


def test_iterate_reduction_schedule_and_delta():
    Z3 = gr.catalog_group("Z3")
    # ell = 64 makes w' = log2(ell) = 6 exceed the junta width target, so
    # phase 1 is non-empty and one iteration is materialized
    spec = prg.iterate_reduction(Z3, 64, 2, 0.25,
                                 overrides={"n": 12, "max_iters": 1,
                                            "m_terminal": 7, "m_D": 6,
                                            "m_T": 6, "delta": 0.05,
                                            "long_params": {"k": 3,
                                                            "delta": 0.05,
                                                            "b": 2,
                                                            "m_D": 6,
                                                            "m_T": 6}})
    sched = spec.params["schedule"]
    assert sched["t1"] >= 1
    assert sched["t_closed_form"] == sched["t1"] + sched["r"] * sched["t2"]
    assert len(sched["iterations_materialized"]) <= sched["t_closed_form"]
    corpus = [md.random_instance("block", Z3, 12, 4, 2, 0, 4700 + t)
              for t in range(4)]
    assert _worst_delta(spec, corpus) <= 0.25


def test_iterate_reduction_zero_iterations_when_width_small():
    Z3 = gr.catalog_group("Z3")
    # entry width already below the junta threshold: terminal layer only
    spec = prg.iterate_reduction(Z3, 2, 1, 0.5,
                                 overrides={"n": 6, "m_terminal": 6})
    sched = spec.params["schedule"]
    assert sched["t1"] == 0 and sched["t_closed_form"] == 0
    assert sched["iterations_materialized"] == []
    assert spec.sampler.spec.startswith("akw(")


def test_iterate_reduction_rejects_bad_groups():
    with pytest.raises(prg.UnsupportedGroup):
        prg.iterate_reduction(gr.catalog_group("S3"), 4, 2, 0.2)


def test_linear_form_reduction_round_trip():
    for name, n, q, seed in [("Z3", 9, 2, 50), ("Z6", 10, 2, 51),
                             ("Z2", 8, 0, 52)]:
        G = gr.catalog_group(name)
        S = reps.irrep_catalog(name)
        ell = n - q - 2
        inst = md.random_instance("block", G, n, ell, 1, q, seed)
        for rho in S.irreps:
            red = prg.linear_form_reduction(inst, rho)
            xs = np.arange(1 << n)
            dec = red.decode(red.form_values(xs))
            truth = rho.images[md.eval_many(inst, xs), 0, 0]
            assert np.abs(dec - truth).max() < 1e-9
            # weight bound reported and respected
            bits = np.abs(red.weights).sum()
            assert bits <= red.weight_bound + 1e-9


def test_linear_form_reduction_parity_special_case():
    Z2g = gr.catalog_group("Z2")
    S = reps.irrep_catalog("Z2")
    prog = md.group_program(Z2g, [1, 1, 1])
    red = prg.linear_form_reduction(prog, S.irreps[1])
    xs = np.arange(8)
    F = red.form_values(xs)
    # decoder = parity of the low field
    assert np.abs(red.decode(F).real - (-1.0) ** (F % 2)).max() < 1e-12


def test_linear_form_requires_commutative():
    S = reps.irrep_catalog("Q8")
    inst = md.random_instance("block", Q8, 6, 4, 1, 0, 3)
    with pytest.raises(prg.NotCommutative):
        prg.linear_form_reduction(inst, S.irreps[0])


def test_fool_commutative_spill_backends():
    Z6 = gr.catalog_group("Z6")
    inst = md.random_instance("block", Z6, 10, 6, 1, 2, 60)
    # true-uniform backend: exact zero
    uni = prg.LinearFormFooler(sm.Uniform(10), 0.0, "uniform")
    rep = prg.fool_commutative_spill(inst, uni, 0.1)
    assert rep["exact_delta"] < 1e-12 and rep["pass"]
    # k-wise backend at desk scale
    backend = prg.default_linear_form_backend(10, k=4)
    rep = prg.fool_commutative_spill(inst, backend, 0.1)
    assert rep["exact_delta"] <= 0.1
    assert rep["aggregated_bound"] >= rep["exact_delta"] - 1e-9
    # adversarial constant backend: large distance reported, no assertion
    bad = prg.LinearFormFooler(sm.Constant([0] * 10), 1.0, "constant")
    rep = prg.fool_commutative_spill(inst, bad, 0.1)
    assert rep["exact_delta"] > 0.1 and not rep["pass"]


def test_prg_spec_json():
    spec = prg.prg_p_group(Q8, 8, 0.2, mode="asymptotic")
    import json
    obj = json.loads(spec.to_json())
    assert obj["construction"] == "pgroup" and obj["group"] == "Q8"
    assert obj["seed_len"] == spec.seed_len
    assert len(obj["components"]) == 2
