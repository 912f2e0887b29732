"""Finite difference sets, truncated free shifts and E (x) M."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .diffmod import DiffModule
from .linfp import Matrix, block_diag


@dataclass(frozen=True)
class DiffSet:
    """The set {0..size-1} with a total self-map ``sigma`` (list of targets)."""

    size: int
    sigma: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(t) for t in self.sigma))
        if len(self.sigma) != self.size:
            raise ValueError("sigma must have one target per element")
        if any(not 0 <= t < self.size for t in self.sigma):
            raise ValueError("sigma target out of range")

    @classmethod
    def identity(cls, n):
        return cls(n, tuple(range(n)))

    @classmethod
    def cycle(cls, n):
        return cls(n, tuple((i + 1) % n for i in range(n)))

    def is_bijective(self):
        return len(set(self.sigma)) == self.size

    def permutation_matrix(self, p) -> Matrix:
        m = np.zeros((self.size, self.size), dtype=np.int64)
        m[list(self.sigma), list(range(self.size))] = 1
        return Matrix(m, p)


def fix(x: DiffSet) -> list[int]:
    return [e for e in range(x.size) if x.sigma[e] == e]


def quo(x: DiffSet) -> list[list[int]]:
    """Classes of the equivalence generated by e ~ sigma(e), sorted."""
    parent = list(range(x.size))

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for e, t in enumerate(x.sigma):
        a, b = find(e), find(t)
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes = {}
    for e in range(x.size):
        classes.setdefault(find(e), []).append(e)
    return sorted(classes.values())


@dataclass(frozen=True)
class TruncatedShift:
    """Depth-D window of the free difference set on S: elements (s, i), i < D.

    sigma(s, i) = (s, i+1) except on the last layer, where it is undefined.
    """

    base_size: int
    depth: int
    partial: bool = True

    @property
    def elements(self):
        return [(s, i) for s in range(self.base_size) for i in range(self.depth)]

    def index(self, s, i):
        return s * self.depth + i

    def sigma(self, s, i):
        if i + 1 < self.depth:
            return (s, i + 1)
        return None

    def wrapped(self) -> DiffSet:
        """Close the window cyclically, (s, D-1) -> (s, 0), giving a total bijection."""
        tg = []
        for s, i in self.elements:
            tg.append(self.index(s, (i + 1) % self.depth))
        return DiffSet(len(tg), tuple(tg))


def free_shift(s, depth: int) -> TruncatedShift:
    """Truncation of the free difference set on a plain set (size or iterable)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = s if isinstance(s, int) else len(list(s))
    return TruncatedShift(n, depth)


def window_maps(t: TruncatedShift, x: DiffSet) -> int:
    """Count maps from the window into X commuting with sigma wherever it is defined."""
    els = t.elements
    count = 0
    for f in product(range(x.size), repeat=len(els)):
        ok = True
        for (s, i), v in zip(els, f):
            nxt = t.sigma(s, i)
            if nxt is not None and f[t.index(*nxt)] != x.sigma[v]:
                ok = False
                break
        count += ok
    return count


def cofree_window(s_size: int, depth: int):
    """Words of length D over S; sigma drops the first letter (landing in depth D-1)."""
    words = list(product(range(s_size), repeat=depth))

    def shift(w):
        return w[1:]

    return words, shift


def set_tensor(e: DiffSet, m: DiffModule) -> DiffModule:
    """E (x) M = direct sum of |E| copies of M, sigma(e, v) = (sigma_E e, sigma_M v)."""
    p = m.p
    n = m.dim
    act = [block_diag([a] * e.size, p) for a in m.act]
    sig = np.zeros((e.size * n, e.size * n), dtype=np.int64)
    for i, t in enumerate(e.sigma):
        sig[t * n:(t + 1) * n, i * n:(i + 1) * n] = m.sigma.a
    return DiffModule(m.ring, act, Matrix(sig, p), name=f"E{e.size}*{m.name}")
