import numpy as np
import pytest

from dhh.diffmod import (DIFFERENCE, DiffMap, DiffRing, Bimodule, bimodule_to_left_envelope, coinv_module,
                         dual_bimodule, enveloping, fix_module, hom_diff, hom_k, opposite,
                         regular_bimodule, restrict_to_k, subquotient_module, validate)
from dhh.errors import StabilityViolation
from dhh.instances import dual_numbers, dual_numbers_ring, random_algebra, upper_triangular
from dhh.linfp import Matrix, Subspace

from conftest import module


def test_validate_examples(F2, F4):
    assert validate(F2)
    assert validate(F4)
    bad = DiffRing(2, dual_numbers_ring(2).mult, [1, 0], [[1, 1], [0, 0]])
    rep = validate(bad)
    assert not rep and "sigma" in rep.failure


def test_f4_frobenius_table(F4):
    # omega^2 = omega + 1 and Frobenius sends omega to omega + 1
    w = np.array([0, 1])
    assert F4.mul(w, w).tolist() == [1, 1]
    assert (F4.sigma @ w).tolist() == [1, 1]


def test_semilinearity_failure_detected(F4):
    m = module(F4, np.eye(2, dtype=np.int64), acts=[a.a for a in F4.regular_module().act])
    assert not m.validate()


def test_hom_diff_examples(F2, F4):
    k = F2.regular_module()
    assert hom_diff(k, k).dim == 1
    frob = module(F2, F4.sigma.a)          # F_4 as an F_2-space with Frobenius
    assert hom_diff(frob, frob).dim == 2
    zero_sigma = module(F2, [[0]])
    assert hom_diff(zero_sigma, k).dim == 0


def test_hom_diff_over_f4_is_f2(F4):
    # F_4-linear maps are multiplications by c, and c must satisfy c^2 = c
    r = F4.regular_module()
    assert hom_diff(r, r).dim == 1


def test_hom_diff_f4_oracle(F4):
    # brute force over all 16 F_2-linear maps of F_4
    r = F4.regular_module()
    count = 0
    for bits in range(16):
        F = Matrix(np.array([(bits >> i) & 1 for i in range(4)]).reshape(2, 2), 2)
        if all(F @ a == a @ F for a in r.act) and F @ r.sigma == r.sigma @ F:
            count += 1
    assert 2 ** hom_diff(r, r).dim == count


def test_hom_k_contains_hom_diff(F4):
    r = F4.regular_module()
    assert hom_diff(r, r).is_subspace_of(hom_k(r, r))
    assert hom_k(r, r).dim == 2


def test_subquotient_module_examples(F2):
    amb = module(F2, [[1, 0], [0, 1]])
    full, zero = Subspace.full(2, 2), Subspace.zero(2, 2)
    assert subquotient_module(full, zero, amb).dim == 2
    assert subquotient_module(full, full, amb).dim == 0
    assert subquotient_module(full, Subspace.span([[1, 0]], 2, 2), amb).dim == 1


def test_subquotient_module_instability(F2):
    amb = module(F2, [[0, 1], [1, 0]])
    with pytest.raises(StabilityViolation):
        subquotient_module(Subspace.full(2, 2), Subspace.span([[1, 0]], 2, 2), amb)


def test_fix_and_coinv_examples(F2, F4):
    ident = module(F2, np.eye(3, dtype=np.int64))
    assert fix_module(ident).dim == 3 and coinv_module(ident).dim == 3
    swap = module(F2, [[0, 1], [1, 0]])
    f = fix_module(swap)
    assert f.dim == 1 and coinv_module(swap).dim == 1
    assert f.inclusion().a[:, 0].tolist() == [1, 1]
    assert fix_module(F4.regular_module()).dim == 1


def test_fix_module_is_over_fixed_subring(F4):
    f = fix_module(F4.regular_module())
    assert f.ring.dim == 1 and f.validate()


def test_opposite_of_commutative():
    A = dual_numbers(2)
    assert np.array_equal(opposite(A).mult, A.mult)
    T = upper_triangular(2)
    assert not np.array_equal(opposite(T).mult, T.mult)
    assert opposite(T).validate()


def test_enveloping_dual_numbers():
    A = dual_numbers(2)
    Ae = enveloping(A)
    assert Ae.algebra.dim == 4
    assert Ae.algebra.validate()


def test_envelope_unit_acts_as_identity():
    T = upper_triangular(2)
    M = regular_bimodule(T)
    L = bimodule_to_left_envelope(M)
    Ae = enveloping(T)
    assert L.act(Ae.algebra.unit) == Matrix.identity(M.dim, 2)


def test_enveloping_on_random_algebras():
    rng = np.random.default_rng(11)
    for _ in range(100):
        A = random_algebra(rng, int(rng.choice([2, 3])), max_dim=4)[0]
        Ae = enveloping(A)
        assert Ae.algebra.validate()
        assert Ae.algebra.dim * A.ring.dim == A.dim ** 2


def test_restrict_to_k():
    A = dual_numbers(2)
    M = regular_bimodule(A)
    k_mod = restrict_to_k(M)
    assert k_mod.dim == M.dim
    assert k_mod is A.module or k_mod.sigma == A.module.sigma
    for j, act in enumerate(k_mod.act):
        lam = A.ring.basis(j)
        assert M.left_action(A.scalar(lam)) == act


def test_bimodule_validation_and_duals():
    A = dual_numbers(3)
    for M in (regular_bimodule(A), regular_bimodule(A, twist=np.array([1, 1])), dual_bimodule(A)):
        assert M.validate()
    bad = Bimodule(A, A.module, [Matrix.identity(2, 3)] * 2, [Matrix.identity(2, 3)] * 2)
    assert not bad.validate()


def test_diffmap_kinds(F2):
    a = module(F2, [[0, 1], [1, 0]])
    m = Matrix([[1, 0], [0, 0]], 2)
    assert not DiffMap(a, a, m, DIFFERENCE).check()
    assert DiffMap(a, a, Matrix([[1, 1], [1, 1]], 2), DIFFERENCE).check()


def test_fixed_subring_of_frobenius(F4):
    fk, inc = F4.fixed_subring()
    assert fk.dim == 1 and inc.a[:, 0].tolist() == [1, 0]
