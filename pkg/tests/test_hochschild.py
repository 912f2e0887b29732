import numpy as np
import pytest

from dhh.diffmod import DiffModule, prime_field, regular_bimodule
from dhh.errors import InversivityRequired
from dhh.hochschild import (CochainComplex, bar_complex, bar_hom_complex, cohomology, derivations,
                            hh0_chain, hh0_direct, hh0_from_complex, hochschild_complex)
from dhh.instances import dual_numbers, preset, random_instance
from dhh.linfp import Matrix
from dhh.spectral import fix_complex
from dhh.verify import check_lowdeg

from oracles import periodic_oracle


def test_prime_field_complex():
    A, M = preset("prime-field")
    c = hochschild_complex(A, M, 4)
    assert [c.dim(n) for n in range(6)] == [1] * 6
    assert [c.d(n).a[0, 0] for n in range(5)] == [0, 1, 0, 1, 0]
    assert cohomology(c).dims == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_dual_numbers_against_periodic_resolution(p):
    A = dual_numbers(p)
    M = regular_bimodule(A)
    eps = np.array([0, 1])
    c = hochschild_complex(A, M, 4)
    assert cohomology(c).dims == periodic_oracle(M, eps, 4)


def test_classical_dual_numbers_dims():
    A, M = preset("classical-dual-numbers")
    assert cohomology(hochschild_complex(A, M, 4)).dims == [2, 2, 2, 2, 2]
    assert periodic_oracle(M, np.array([0, 1]), 4) == [2, 2, 2, 2, 2]


def test_dual_bimodule_against_periodic_resolution():
    A, M = preset("dual-numbers-dual")
    assert cohomology(hochschild_complex(A, M, 3)).dims == periodic_oracle(M, np.array([0, 1]), 3)


def test_degree_zero_term_is_module():
    rng = np.random.default_rng(0)
    for _ in range(10):
        A, M = random_instance(rng, degree=2)
        assert hochschild_complex(A, M, 1).dim(0) == M.dim


def test_max_degree_validation():
    A, M = preset("prime-field")
    with pytest.raises(ValueError):
        hochschild_complex(A, M, 0)


def test_non_inversive_rejected():
    A = dual_numbers(2)
    M = regular_bimodule(A)
    bad = type(M)(A, DiffModule(A.ring, M.module.act, Matrix.zeros(2, 2, 2)), M.left, M.right)
    with pytest.raises(InversivityRequired):
        hochschild_complex(A, bad, 2)


def test_cohomology_trivial_cases():
    k = prime_field(3)
    terms = [DiffModule(k, [Matrix.identity(d, 3)], Matrix.identity(d, 3)) for d in (2, 3, 1)]
    zero = CochainComplex(terms, [Matrix.zeros(3, 2, 3), Matrix.zeros(1, 3, 3)], bounded=True)
    assert cohomology(zero).dims == [2, 3, 1]
    empty = [DiffModule(k, [Matrix.identity(0, 3)], Matrix.identity(0, 3)) for _ in range(3)]
    c = CochainComplex(empty, [Matrix.zeros(0, 0, 3)] * 2, bounded=True)
    assert cohomology(c).dims == [0, 0, 0]


def test_cohomology_twisted_fix_dims():
    A, M = preset("twisted-dual-numbers")
    rep = cohomology(hochschild_complex(A, M, 3))
    assert all(f <= d for f, d in zip(rep.fix_dims, rep.dims))
    assert rep.fix_dims == rep.coinv_dims


def test_cosimplicial_identities_random():
    rng = np.random.default_rng(1)
    for _ in range(20):
        A, M = random_instance(rng, degree=3)
        c = hochschild_complex(A, M, 2, keep_faces=True)
        f = c.meta["faces"]
        for n in range(2):
            for i in range(n + 3):
                for j in range(i):
                    assert f[(n + 1, i)] @ f[(n, j)] == f[(n + 1, j)] @ f[(n, i - 1)], (n, i, j)
        assert c.check()


def test_bar_complex_dual_numbers():
    b = bar_complex(dual_numbers(2), 3)
    assert b.check()
    assert all(b.face_identity(n) for n in range(1, 5))
    assert [b.dims[n] for n in range(-1, 5)] == [2 ** (n + 2) for n in range(-1, 5)]


def test_bar_complex_over_f4():
    A, _ = preset("f4-dual-numbers")
    b = bar_complex(A, 2)
    assert b.check()
    assert b.dims[0] == 8


def test_hh0_examples():
    A, M = preset("upper-triangular")
    assert hh0_direct(A, M).dim == 1
    A, M = preset("twisted-dual-numbers")
    assert hh0_direct(A, M).dim == M.dim
    assert len(hh0_chain(A, M)) <= 2


def test_hh0_matches_complex_random():
    rng = np.random.default_rng(2)
    for _ in range(20):
        A, M = random_instance(rng, degree=2)
        c = hochschild_complex(A, M, 1)
        assert hh0_direct(A, M) == hh0_from_complex(c)


def test_derivation_examples():
    A, M = preset("classical-dual-numbers")
    der = derivations(A, M)
    assert der.inner.dim == 0
    assert der.all.dim == 2 and der.quotient_dim == 2
    A, M = preset("upper-triangular")
    der = derivations(A, M)
    assert der.quotient_dim == cohomology(hochschild_complex(A, M, 1)).dims[1]


def test_low_degrees_random():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A, M = random_instance(rng, degree=2)
        assert check_lowdeg(A, M, 1)["ok"]


@pytest.mark.parametrize("name", ["classical-dual-numbers", "twisted-dual-numbers", "f4-frobenius",
                                  "upper-triangular", "swap-product-dual-numbers"])
def test_fix_level_matches_bar_hom(name):
    A, M = preset(name)
    D = 2
    c = hochschild_complex(A, M, D)
    bar = bar_hom_complex(A, M, D)
    assert cohomology(fix_complex(c)).dims[:D + 1] == cohomology(bar).dims[:D + 1]
