"""Representation toolkit: validation, Fourier analysis, matrix kernels,
mixing classifiers."""

import math

import numpy as np
import pytest

from grouprg import groups as gr
from grouprg import reps

CATALOG = ["Z2", "Z3", "Z4", "Z5", "Z6", "Z8", "Z9", "Q8", "D4", "S3",
           "Z2wrZ2", "UT3(2)", "UT3(3)", "Z2xZ3", "Q8xZ2", "Q8xZ3"]


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_irreps_validate(name):
    S = reps.irrep_catalog(name)
    rep = reps.validate_irrep_set(S.group, S)
    assert rep.hom_residual < 1e-9
    assert rep.unitarity_residual < 1e-9
    assert rep.sum_d_squared == S.group.order
    assert rep.char_orthogonality < 1e-6
    assert rep.irreducibility_residual < 1e-6


def test_q8_irrep_dims():
    assert sorted(reps.irrep_catalog("Q8").dims()) == [1, 1, 1, 1, 2]


def test_z2_irreps_are_plus_minus_one():
    S = reps.irrep_catalog("Z2")
    vals = sorted(complex(r.images[1, 0, 0]).real for r in S.irreps)
    assert vals == [-1.0, 1.0]


def test_tensor_product_irreps():
    S = reps.irrep_catalog("Z2xZ3")
    assert S.dims() == [1] * 6


def test_validator_detects_missing_irrep():
    S = reps.irrep_catalog("Q8")
    partial = reps.IrrepSet(S.group, S.irreps[:-1])
    rep = reps.validate_irrep_set(S.group, partial)
    assert S.group.order - rep.sum_d_squared == S.irreps[-1].dim ** 2


def test_validator_detects_broken_homomorphism():
    S = reps.irrep_catalog("Q8")
    rho = S.irreps[4]
    images = rho.images.copy()
    images[2] = images[2].T.copy()  # transpose one image
    images[2, 0, 1] += 0.5          # and damage it beyond transpose symmetry
    bad = reps.IrrepSet(S.group, S.irreps[:4] + (
        reps.Irrep(S.group, 2, images),))
    rep = reps.validate_irrep_set(S.group, bad)
    assert rep.hom_residual > 0.1


def test_fourier_coefficient_basics():
    S = reps.irrep_catalog("Q8")
    G = S.group
    U = reps.GDistribution.uniform(G)
    for rho in S.irreps[1:]:
        assert np.abs(reps.fourier_coefficient(U, rho)).max() < 1e-12
    P = reps.GDistribution.point(G, G.identity)
    for rho in S.irreps:
        coef = reps.fourier_coefficient(P, rho)
        assert np.abs(coef - np.eye(rho.dim)).max() < 1e-12
    # uniform on {1,-1} kills the 2-dim irrep since rho(-1) = -I
    Z = reps.GDistribution(G, np.array([.5, .5, 0, 0, 0, 0, 0, 0]))
    assert np.abs(reps.fourier_coefficient(Z, S.irreps[4])).max() < 1e-12


@pytest.mark.parametrize("name", ["Z3", "Q8", "S3", "Z6"])
def test_parseval_on_random_distributions(name):
    S = reps.irrep_catalog(name)
    rng = np.random.default_rng(0)
    for _ in range(100):
        pmf = rng.random(S.group.order)
        pmf /= pmf.sum()
        assert reps.parseval_residual(pmf, S) < 1e-9
    U = reps.GDistribution.uniform(S.group)
    assert reps.parseval_residual(U, S) < 1e-12


def test_closeness_bound_two_point():
    S = reps.irrep_catalog("Z2")
    X = reps.GDistribution.point(S.group, 0)
    Y = reps.GDistribution.uniform(S.group)
    tv, bound = reps.closeness_bound(X, Y, S)
    assert abs(tv - 0.5) < 1e-12
    assert abs(bound - math.sqrt(2)) < 1e-9
    tv, bound = reps.closeness_bound(X, X, S)
    assert tv == 0 and bound < 1e-12


def test_closeness_bound_random_pairs():
    S = reps.irrep_catalog("Q8")
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = rng.random(8)
        a /= a.sum()
        b = rng.random(8)
        b /= b.sum()
        tv, bound = reps.closeness_bound(a, b, S)
        assert tv <= bound + 1e-9


def test_op_norm_values():
    assert abs(reps.op_norm(np.eye(4)) - 1) < 1e-9
    assert abs(reps.op_norm(np.diag([1j, -1j])) - 1) < 1e-9
    v = reps.op_norm((np.eye(2) + np.diag([1j, -1j])) / 2)
    assert abs(v - math.sqrt(2) / 2) < 1e-9
    assert reps.op_norm(np.zeros((3, 3))) == 0.0


def test_op_norm_matches_svd_and_submultiplicative():
    rng = np.random.default_rng(2)
    for _ in range(100):
        d = int(rng.integers(1, 5))
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        na = reps.op_norm(A)
        assert abs(na - np.linalg.svd(A, compute_uv=False)[0]) < 1e-6
        assert reps.op_norm(A @ B) <= na * reps.op_norm(B) + 1e-9


def test_eigenphases_examples():
    assert reps.eigenphases(np.eye(3)) == [0.0, 0.0, 0.0]
    ph = reps.eigenphases(-np.eye(2))
    assert all(abs(t - 0.5) < 1e-9 for t in ph)
    ph = sorted(reps.eigenphases(np.diag([1j, -1j])))
    assert abs(ph[0] + 0.25) < 1e-9 and abs(ph[1] - 0.25) < 1e-9
    with pytest.raises(reps.NotUnitary):
        reps.eigenphases(np.diag([2.0, 1.0]))


def test_eigenphases_match_numpy_on_random_unitaries():
    rng = np.random.default_rng(3)
    for dim in (1, 2, 3, 4):
        for _ in range(100):
            M = reps.random_clamped_unitary(rng, dim, 0.02)
            mine = sorted(reps.eigenphases(M))
            ref = sorted(0.5 if t <= -0.5 + 1e-12 else t
                         for t in np.angle(np.linalg.eigvals(M)) / (2 * np.pi))
            assert max(abs(a - b) for a, b in zip(mine, ref)) < 1e-7


@pytest.mark.parametrize("name,mix,theta", [
    ("Q8", True, 0.25), ("S3", False, 0.0), ("Z5", True, 0.2),
    ("D4", False, 0.0), ("Z2wrZ2", False, 0.0), ("Q8xZ3", True, 1 / 12),
])
def test_is_mixing(name, mix, theta):
    got_mix, got_theta = reps.is_mixing(reps.irrep_catalog(name))
    assert got_mix is mix
    assert abs(got_theta - theta) < 1e-9


@pytest.mark.parametrize("name", CATALOG)
def test_mixing_equals_ker_subrep_equals_dedekind(name):
    S = reps.irrep_catalog(name)
    mix, _ = reps.is_mixing(S)
    assert reps.ker_subrep_check(S) == mix
    assert gr.is_dedekind_structural(S.group) == mix


def test_half_sum_examples():
    n, b = reps.half_sum_norm_check(np.array([[-1.0 + 0j]]), 0.5)
    assert abs(n) < 1e-9 and abs(b) < 1e-12
    w = np.exp(2j * np.pi / 3)
    n, b = reps.half_sum_norm_check(np.diag([w, w.conjugate()]), 1 / 3)
    assert abs(n - 0.5) < 1e-9 and abs(b - 0.5) < 1e-12
    n, b = reps.half_sum_norm_check(np.diag([1j, -1j]), 0.25)
    assert abs(n - math.sqrt(2) / 2) < 1e-9
    with pytest.raises(reps.PhaseTooSmall):
        reps.half_sum_norm_check(np.eye(2), 0.25)


def test_half_sum_surrogate_is_reported_not_asserted():
    # the radian-convention surrogate goes negative near theta = 1/2 while
    # the sharp cosine bound stays correct
    assert reps.half_sum_surrogate(0.5) < 0 < math.cos(math.pi * 0.49)


def test_half_sum_property_random_clamped():
    rng = np.random.default_rng(4)
    for _ in range(300):
        dim = int(rng.integers(1, 5))
        theta = float(rng.uniform(0.02, 0.5))
        M = reps.random_clamped_unitary(rng, dim, theta)
        n, b = reps.half_sum_norm_check(M, theta)
        assert n <= b + 1e-9


def test_irreps_json_round_trip():
    S = reps.irrep_catalog("Q8")
    S2 = reps.irreps_from_json(reps.irreps_to_json(S))
    assert reps.validate_irrep_set(S2.group, S2).passed()
    for a, b in zip(S.irreps, S2.irreps):
        assert np.abs(a.images - b.images).max() < 1e-15
