"""Seeded randomized property suites.

Every suite draws its instances from ``numpy.random.default_rng(seed)`` in a
fixed order and returns a plain dict, so equal seeds give equal reports.
"""

from __future__ import annotations

import numpy as np

from .diffmod import DIFFERENCE, DiffMap, hom_diff
from .hochschild import (bar_complex, cocycles, coboundaries, derivations,
                         hh0_direct, hh0_from_complex, hochschild_complex)
from .ihom import ihom
from .instances import random_algebra, random_complex, random_instance, random_module, random_ring
from .linfp import Matrix, Subspace, _mulmod
from .spectral import cone, five_term, les_check, ses_check
from .tensorcat import tensor, unit_iso, universal_check

SUITES = ("complex", "bar", "tensor", "ses", "les", "lowdeg")


def describe(A, M) -> dict:
    return {"p": A.p, "k": A.ring.dim, "A": A.dim, "M": M.dim, "algebra": A.name, "module": M.name}


def instance_corpus(seed, count, degree=4):
    """The first ``count`` random inversive instances for ``seed``."""
    rng = np.random.default_rng(seed)
    return [random_instance(rng, degree=degree + 1) for _ in range(count)]


def complex_corpus(seed, count, max_dim=6, max_len=5):
    rng = np.random.default_rng(seed)
    return [random_complex(rng, p=int(rng.choice([2, 3, 5])), max_dim=max_dim, max_len=max_len)
            for _ in range(count)]


# ------------------------------------------------------------ per-instance


def check_complex(A, M, D=4, c=None) -> dict:
    c = c or hochschild_complex(A, M, D)
    rep = c.check()
    return {"ok": bool(rep), "failure": rep.failure, "dims": [c.dim(n) for n in range(c.top + 1)]}


def check_lowdeg(A, M, D=4, c=None) -> dict:
    """H^0 against the direct centraliser, H^1 against derivations modulo inner ones."""
    c = c or hochschild_complex(A, M, D)
    direct = hh0_direct(A, M)
    h0 = hh0_from_complex(c)
    der = derivations(A, M)
    space = c.meta["spaces"][1]
    p = c.p

    def ambient(sub: Subspace) -> Subspace:
        if sub.dim == 0:
            return Subspace.zero(space.ambient_dim, p)
        return Subspace.span(_mulmod(sub.basis, space.basis, p), space.ambient_dim, p)

    Z1, B1 = ambient(cocycles(c, 1)), ambient(coboundaries(c, 1))
    h1 = Z1.dim - B1.dim
    ok0 = direct == h0
    ok1 = Z1 == der.all and B1 == der.inner and der.quotient_dim == h1
    return {"ok": ok0 and ok1, "hh0_direct": direct.dim, "H0": h0.dim,
            "derivations": der.all.dim, "inner": der.inner.dim, "H1": h1}


def check_ses(c, hc=None) -> dict:
    hc = hc or cone(c)
    rows = []
    for n in range(1, hc.cone.valid_top + 1):
        t = ses_check(c, n, hc)
        rows.append({"n": n, "exact": t.exact, "dimension_identity": t.dimension_identity,
                     "dims": t.dims()[1:4]})
    return {"ok": all(r["exact"] and r["dimension_identity"] for r in rows), "degrees": rows}


def check_les(c, hc=None) -> dict:
    hc = hc or cone(c)
    t = les_check(c, hc)
    head = five_term(t) if len(t.positions) > 8 else None
    ok = t.exact and (head is None or head.exact)
    return {"ok": ok, "dims": t.dims(), "five_term": None if head is None else head.exact}


def check_bar(A, D=4) -> dict:
    b = bar_complex(A, D)
    rep = b.check()
    faces = all(b.face_identity(n) for n in range(1, D + 2))
    return {"ok": bool(rep) and faces, "failure": rep.failure, "faces": faces, "dims": [b.dims[n] for n in sorted(b.dims)]}


def check_tensor(L, M, N) -> dict:
    """Adjunction by dimension, unit isomorphisms and the universal property."""
    p = M.p
    t = tensor(L, M)
    ih = ihom(M, N)
    lhs = hom_diff(t.result, N).dim
    rhs = hom_diff(L, ih.carrier).dim
    # M (x) k -> M
    fwd, back = unit_iso(M)
    tk = tensor(M, M.ring.regular_module())
    unit_ok = (fwd @ back == Matrix.identity(M.dim, p) and back @ fwd == Matrix.identity(tk.result.dim, p)
               and bool(DiffMap(tk.result, M, fwd, DIFFERENCE).check()))
    # [k, M] -> M, f -> f(1)
    k = M.ring.regular_module()
    hk = ihom(k, M)
    ev = np.stack([hk.element(e) @ M.ring.unit for e in np.eye(hk.space.dim, dtype=np.int64)], axis=1) \
        if hk.space.dim else np.zeros((M.dim, 0), dtype=np.int64)
    ev = Matrix(ev, p)
    hom_ok = (ev.rows == ev.cols and ev.is_invertible() and bool(DiffMap(hk.carrier, M, ev, DIFFERENCE).check()))
    uni = universal_check(L, M, N)
    return {"ok": lhs == rhs and unit_ok and hom_ok and bool(uni), "hom_tensor": lhs, "hom_ihom": rhs,
            "unit_tensor": unit_ok, "unit_hom": hom_ok, "universal": bool(uni)}


def random_triple(rng, p=None, max_dim=4):
    pp = p or int(rng.choice([2, 2, 3]))
    k = random_ring(rng, pp, max_dim=max_dim)
    return tuple(random_module(rng, k, max_dim=max_dim) for _ in range(3))


# ------------------------------------------------------------------ suites


def _summary(name, seed, trials, results):
    failed = [i for i, r in enumerate(results) if not r["ok"]]
    return {"suite": name, "seed": seed, "trials": trials, "passed": trials - len(failed),
            "failed": failed, "ok": not failed, "results": results}


def run_suite(name, trials=20, seed=0, max_degree=4) -> dict:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(trials):
        if name in ("complex", "lowdeg"):
            A, M = random_instance(rng, degree=max_degree + 1)
            r = check_complex(A, M, max_degree) if name == "complex" else check_lowdeg(A, M, max_degree)
            r["instance"] = describe(A, M)
        elif name == "bar":
            A = random_algebra(rng, int(rng.choice([2, 2, 3])), max_dim=4)[0]
            r = check_bar(A, max_degree)
            r["instance"] = {"p": A.p, "A": A.dim, "algebra": A.name}
        elif name == "tensor":
            L, M, N = random_triple(rng)
            r = check_tensor(L, M, N)
            r["instance"] = {"p": M.p, "k": M.ring.dim, "dims": [L.dim, M.dim, N.dim]}
        else:
            c = random_complex(rng, p=int(rng.choice([2, 3, 5])))
            r = check_ses(c) if name == "ses" else check_les(c)
            r["instance"] = {"p": c.p, "dims": [c.dim(n) for n in range(c.top + 1)]}
        results.append(r)
    return _summary(name, seed, trials, results)
