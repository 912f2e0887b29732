import numpy as np
import pytest
from hypothesis import given, strategies as st

from dhh.diffcat import DiffSet, cofree_window, fix, free_shift, quo, set_tensor, window_maps
from dhh.instances import f4
from dhh.linfp import Matrix

from conftest import module


def test_fix_examples():
    assert fix(DiffSet(2, (1, 0))) == []
    assert fix(DiffSet.identity(4)) == [0, 1, 2, 3]


def test_fix_frobenius_on_f4_elements():
    k = f4(True)
    elements = [np.array([a, b]) for a in range(2) for b in range(2)]
    code = {(int(a), int(b)): i for i, (a, b) in enumerate(elements)}
    squares = [code[tuple(int(x) for x in k.mul(e, e))] for e in elements]
    fixed = fix(DiffSet(4, squares))
    # 0 and 1 are the F_2 points
    assert [elements[i].tolist() for i in fixed] == [[0, 0], [1, 0]]


def test_quo_examples():
    assert quo(DiffSet.identity(3)) == [[0], [1], [2]]
    assert quo(DiffSet(2, (1, 0))) == [[0, 1]]
    assert quo(DiffSet(3, (1, 2, 2))) == [[0, 1, 2]]


@given(st.lists(st.integers(0, 7), min_size=1, max_size=8))
def test_quo_is_partition_closed_under_sigma(targets):
    n = len(targets)
    x = DiffSet(n, [t % n for t in targets])
    classes = quo(x)
    seen = sorted(e for c in classes for e in c)
    assert seen == list(range(n))
    where = {e: i for i, c in enumerate(classes) for e in c}
    assert all(where[e] == where[x.sigma[e]] for e in range(n))


def test_sigma_out_of_range():
    with pytest.raises(ValueError):
        DiffSet(2, (0, 2))


def test_free_shift_examples():
    t = free_shift(1, 3)
    assert t.elements == [(0, 0), (0, 1), (0, 2)]
    assert t.sigma(0, 0) == (0, 1) and t.sigma(0, 2) is None
    assert free_shift(0, 5).elements == []
    two = free_shift(["a", "b"], 1)
    assert len(two.elements) == 2 and all(two.sigma(*e) is None for e in two.elements)


@pytest.mark.parametrize("s,depth", [(1, 1), (1, 3), (2, 2), (1, 4)])
def test_window_maps_free_on_generators(s, depth):
    # maps out of the free window are fixed by the images of the generators
    for x in (DiffSet(3, (1, 2, 0)), DiffSet(3, (0, 0, 1)), DiffSet.identity(2)):
        assert window_maps(free_shift(s, depth), x) == x.size ** s


def test_cofree_window_shift():
    words, shift = cofree_window(2, 3)
    assert len(words) == 8
    assert shift((1, 0, 1)) == (0, 1)


def test_set_tensor_examples(F2):
    m = module(F2, [[1, 1], [0, 1]])
    same = set_tensor(DiffSet.identity(1), m)
    assert same.sigma == m.sigma and same.dim == 2
    swap = set_tensor(DiffSet(2, (1, 0)), module(F2, [[1]]))
    assert swap.sigma == Matrix([[0, 1], [1, 0]], 2)
    tri = set_tensor(DiffSet.cycle(3), module(F2, [[1]]))
    assert tri.dim == 3
    assert tri.sigma.power(3) == Matrix.identity(3, 2) and tri.sigma != Matrix.identity(3, 2)


def test_set_tensor_validates(F4):
    m = F4.regular_module()
    t = set_tensor(free_shift(1, 3).wrapped(), m)
    assert t.validate()
    assert t.dim == 6
