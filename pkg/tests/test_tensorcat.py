import itertools

import numpy as np
import pytest

from dhh.diffcat import DiffSet, free_shift, set_tensor
from dhh.diffmod import DIFFERENCE, K_LINEAR, DiffMap, hom_k, prime_field
from dhh.errors import DegreeOverflow
from dhh.ihom import check_ses, internal_projectivity_witness
from dhh.instances import dual_numbers, random_module, random_ring
from dhh.linfp import Matrix, Subspace
from dhh.tensorcat import (associator, balanced_maps, tensor, tensor_map, tensor_power, unit_iso,
                           universal_check)

from conftest import module, orbit_submodule, ses_from_submodule


def test_tensor_unit_examples(F2, F4):
    for k in (F2, F4):
        t = tensor(k.regular_module(), k.regular_module())
        assert t.result.dim == k.dim
        assert t.result.validate()


def test_tensor_over_prime_field_is_kronecker(F2):
    t = tensor(module(F2, np.eye(2, dtype=np.int64)), module(F2, np.eye(3, dtype=np.int64)))
    assert t.result.dim == 6 and t.balancing.dim == 0


def test_f4_tensor_f4(F4):
    r = F4.regular_module()
    t = tensor(r, r)
    assert t.result.dim == 2 and t.balancing.dim == 2
    # sigma descends: sigma(m (x) n) = sigma m (x) sigma n
    for m, n in itertools.product(np.eye(2, dtype=np.int64), repeat=2):
        assert np.array_equal(t.result.sigma @ t.pure_tensor(m, n),
                              t.pure_tensor(r.sigma @ m, r.sigma @ n))


def test_tensor_map_examples(F2):
    m2 = module(F2, np.eye(2, dtype=np.int64))
    m1 = module(F2, [[1]])
    ident = lambda m: DiffMap(m, m, Matrix.identity(m.dim, 2), DIFFERENCE)
    assert tensor_map(ident(m2), ident(m1)).matrix == Matrix.identity(2, 2)
    zero = DiffMap(m2, m2, Matrix.zeros(2, 2, 2), DIFFERENCE)
    assert tensor_map(zero, ident(m1)).matrix.is_zero()
    swap = DiffMap(m2, m2, Matrix([[0, 1], [1, 0]], 2), K_LINEAR)
    assert tensor_map(swap, ident(m1)).matrix == Matrix([[0, 1], [1, 0]], 2)


def test_tensor_power_low_degrees():
    A = dual_numbers(2)
    assert tensor_power(A, 0).module.dim == A.ring.dim
    assert tensor_power(A, 1).module.dim == A.dim


def test_tensor_power_contraction_on_basis():
    A = dual_numbers(2)
    tp = tensor_power(A, 3)
    assert tp.module.dim == 8 and len(tp.deltas) == 2
    e = np.eye(2, dtype=np.int64)
    for a, b, c in itertools.product(range(2), repeat=3):
        x = np.kron(np.kron(e[a], e[b]), e[c])
        ab = A.mul(e[a], e[b])
        bc = A.mul(e[b], e[c])
        assert np.array_equal(tp.deltas[0] @ x, np.kron(ab, e[c]) % 2)
        assert np.array_equal(tp.deltas[1] @ x, np.kron(e[a], bc) % 2)


def test_tensor_power_over_f4_uses_quotient():
    from dhh.instances import preset
    A, _ = preset("f4-dual-numbers")
    tp = tensor_power(A, 2)
    # A is free of rank 2 over F_4, so A (x)_k A has F_2-dimension 2 * 2 * 2
    assert tp.module.dim == 8
    assert tp.projection.shape == (8, A.dim ** 2)


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("DHH_DIM_CAP", "10")
    F2 = prime_field(2)
    with pytest.raises(DegreeOverflow):
        tensor(module(F2, np.eye(4, dtype=np.int64)), module(F2, np.eye(3, dtype=np.int64)))


def test_universal_examples(F2, F4):
    one = module(F2, [[1]])
    rep = universal_check(one, one, one)
    assert rep and rep.witness == {"balanced_dim": 1, "hom_dim": 1}
    r = F4.regular_module()
    t = tensor(r, r)
    assert universal_check(r, r, t.result)
    assert universal_check(r, r, r)


def test_universal_f4_against_brute_force(F4):
    r = F4.regular_module()
    count = 0
    for bits in range(2 ** 8):
        B = Matrix(np.array([(bits >> i) & 1 for i in range(8)]).reshape(2, 4), 2)
        ok = B @ r.sigma.kron(r.sigma) == r.sigma @ B
        for a in r.act:
            ok = ok and B @ a.kron(Matrix.identity(2, 2)) == a @ B == B @ Matrix.identity(2, 2).kron(a)
        count += ok
    assert 2 ** balanced_maps(r, r, r).dim == count
    rep = universal_check(r, r, r)
    assert rep.witness["hom_dim"] == rep.witness["balanced_dim"]


def test_canonical_map_factors_through_identity(F4):
    r = F4.regular_module()
    t = tensor(r, r)
    rep = universal_check(r, r, t.result)
    for f in rep.factorizations:
        assert f @ t.projection == Matrix._wrap(f.a @ t.projection.a % 2, 2)
    # the projection itself is balanced; its factorisation is the identity
    assert t.projection @ t.section == Matrix.identity(t.result.dim, 2)


def test_unit_iso_random():
    rng = np.random.default_rng(3)
    for _ in range(20):
        k = random_ring(rng, int(rng.choice([2, 3])))
        m = random_module(rng, k)
        fwd, back = unit_iso(m)
        t = tensor(m, k.regular_module())
        assert fwd @ back == Matrix.identity(m.dim, m.p)
        assert back @ fwd == Matrix.identity(t.result.dim, m.p)
        assert DiffMap(t.result, m, fwd, DIFFERENCE).check()


def test_pure_tensors_balance_and_span():
    rng = np.random.default_rng(4)
    for _ in range(20):
        k = random_ring(rng, 2)
        m, n = random_module(rng, k), random_module(rng, k)
        t = tensor(m, n)
        for j in range(k.dim):
            lam = k.basis(j)
            for a, b in itertools.product(np.eye(m.dim, dtype=np.int64), np.eye(n.dim, dtype=np.int64)):
                assert np.array_equal(t.pure_tensor(m.action(lam) @ a, b), t.pure_tensor(a, n.action(lam) @ b))
        if t.result.dim:
            assert Subspace.span(t.projection.a.T, t.result.dim, 2).dim == t.result.dim


def test_maps_determined_on_pure_tensors():
    rng = np.random.default_rng(6)
    k = random_ring(rng, 2)
    m, n = random_module(rng, k), random_module(rng, k)
    t = tensor(m, n)
    H = hom_k(t.result, t.result)
    for v in H.basis[:5]:
        f = Matrix(v.reshape(t.result.dim, t.result.dim), 2)
        images = f @ t.projection
        assert (images == Matrix.zeros(*images.shape, 2)) == f.is_zero()


def test_associator_is_iso_on_random_inputs():
    rng = np.random.default_rng(7)
    for _ in range(50):
        k = random_ring(rng, int(rng.choice([2, 3])), max_dim=2)
        ms = [random_module(rng, k, max_dim=3) for _ in range(3)]
        fwd, back, left, right = associator(*ms)
        assert left.result.dim == right.result.dim
        assert fwd @ back == Matrix.identity(right.result.dim, k.p)
        assert back @ fwd == Matrix.identity(left.result.dim, k.p)
        assert DiffMap(left.result, right.result, fwd, DIFFERENCE).check()


def _test_sess(k, rng, count=6):
    out = []
    for _ in range(count):
        b = random_module(rng, k, max_dim=4)
        if b.dim == 0:
            continue
        v = rng.integers(0, k.p, b.dim)
        W = orbit_submodule(b, v)
        out.append(ses_from_submodule(b, W))
    return out


def test_tensor_of_free_modules_internally_projective():
    F2 = prime_field(2)
    k = F2.regular_module()
    x1 = set_tensor(free_shift(1, 2).wrapped(), k)
    x2 = set_tensor(DiffSet.cycle(3), k)
    x = tensor(x1, x2).result
    rng = np.random.default_rng(8)
    sess = _test_sess(F2, rng)
    b = module(F2, [[1, 1], [0, 1]])
    sess.append(ses_from_submodule(b, Subspace.span([[1, 0]], 2, 2)))
    for i, q in sess:
        assert check_ses(i, q)
        assert internal_projectivity_witness(x, (i, q))
