import numpy as np
import pytest

from dhh.diffmod import DiffModule, hom_diff, prime_field
from dhh.hochschild import CochainComplex, cohomology, hochschild_complex
from dhh.instances import preset
from dhh.linfp import Matrix
from dhh.spectral import (absolute_hh, coinv_complex, cone, cone_maps_check, euler_check, five_term,
                          fix_complex, hyper, les_check, ses_check, split_iso)
from dhh.tensorcat import tensor_power
from dhh.verify import complex_corpus

from oracles import cone_oracle


def _bounded(p, sigmas, diffs):
    k = prime_field(p)
    terms = [DiffModule(k, [Matrix.identity(len(s), p)], Matrix(s, p)) for s in sigmas]
    return CochainComplex(terms, [Matrix(np.array(d).reshape(len(sigmas[i + 1]), len(sigmas[i])), p)
                                  for i, d in enumerate(diffs)], bounded=True)


def test_fix_and_coinv_of_swap():
    c = _bounded(2, [[[0, 1], [1, 0]]], [])
    assert fix_complex(c).dim(0) == 1
    assert coinv_complex(c).dim(0) == 1
    _, dims = hyper(c)
    assert dims == [1, 1]


def test_trivial_sigma_fix_and_coinv_are_identity():
    A, M = preset("classical-dual-numbers")
    c = hochschild_complex(A, M, 2)
    for f in (fix_complex(c), coinv_complex(c)):
        assert [f.dim(n) for n in range(c.top + 1)] == [c.dim(n) for n in range(c.top + 1)]
        assert cohomology(f, check_stable=False).dims == cohomology(c).dims


def test_fix_complex_terms_are_difference_homs():
    A, M = preset("twisted-dual-numbers")
    c = hochschild_complex(A, M, 2)
    fc = fix_complex(c)
    for n in range(c.top + 1):
        assert fc.dim(n) == hom_diff(tensor_power(A, n).module, M.module).dim


def test_split_cone_dims():
    # sigma = id, H dims (1, 0, 0)
    c = _bounded(3, [[[1]], [[1]], [[1]]], [[0], [1]])
    assert cohomology(c).dims == [1, 0, 0]
    hc, dims = hyper(c)
    assert dims[:3] == [1, 1, 0]
    for n in range(3):
        assert split_iso(c, n, hc).is_invertible()


def test_twisted_dual_numbers_hyper():
    A, M = preset("twisted-dual-numbers")
    c = hochschild_complex(A, M, 4)
    hc, dims = hyper(c)
    assert dims[:5] == [1, 2, 2, 2, 2]
    assert cone_oracle(c, 4) == dims[:5]
    t = ses_check(c, 2, hc)
    assert t.exact and t.dims()[1:4] == [1, 2, 1]


def test_cone_against_oracle_random():
    for c in complex_corpus(11, 40):
        hc, dims = hyper(c)
        assert dims == cone_oracle(c, c.top + 1)


def test_random_complexes_exact():
    for c in complex_corpus(12, 200):
        hc = cone(c)
        assert hc.cone.check()
        for n in range(1, hc.cone.valid_top + 1):
            t = ses_check(c, n, hc)
            assert t.exact and t.dimension_identity
        assert les_check(c, hc).exact


def test_ses_split_case():
    A, M = preset("classical-dual-numbers")
    c = hochschild_complex(A, M, 3)
    H = cohomology(c).dims
    hc = cone(c)
    for n in range(1, 4):
        t = ses_check(c, n, hc)
        assert t.exact and t.dims()[1:4] == [H[n - 1], H[n - 1] + H[n], H[n]]
        assert split_iso(c, n, hc).is_invertible()


def test_les_and_five_term_on_presets():
    for name in ("classical-dual-numbers", "twisted-dual-numbers", "f4-frobenius", "swap-product-dual-numbers"):
        A, M = preset(name)
        c = hochschild_complex(A, M, 3)
        t = les_check(c)
        assert t.exact, name
        head = five_term(t)
        assert head.exact and [p.label for p in head.positions][0] == "0"


def test_euler_and_cone_maps():
    for c in complex_corpus(13, 50):
        hc = cone(c)
        chi_t, chi_h = euler_check(hc)
        assert chi_t == chi_h
        assert cone_maps_check(hc)


def test_euler_needs_bounded():
    A, M = preset("prime-field")
    with pytest.raises(ValueError):
        euler_check(cone(hochschild_complex(A, M, 2)))


def test_absolute_hh_examples():
    A, M = preset("prime-field")
    rep = absolute_hh(A, M, 4)
    assert rep.fix_of_complex[:5] == [1, 0, 0, 0, 0]
    assert rep.hyper[:5] == [1, 1, 0, 0, 0]
    A, M = preset("classical-dual-numbers")
    rep = absolute_hh(A, M, 4)
    assert rep.internal == [2, 2, 2, 2, 2]
    assert rep.fix_of_complex[:5] == [2, 2, 2, 2, 2]
    assert rep.hyper[:5] == [2, 4, 4, 4, 4]
    assert all(t.exact for t in rep.ses) and rep.les.exact
    d = rep.as_dict()
    assert d["hyper"] == rep.hyper and len(d["ses"]) == len(rep.ses)


def test_ses_dimension_form_on_presets():
    for name in ("twisted-dual-numbers", "f4-dual-numbers", "upper-triangular"):
        A, M = preset(name)
        c = hochschild_complex(A, M, 3)
        H = cohomology(c)
        _, dims = hyper(c)
        for n in range(1, 4):
            assert dims[n] == H.fix_dims[n] + H.coinv_dims[n - 1]
