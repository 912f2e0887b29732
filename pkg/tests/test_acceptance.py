"""Acceptance criteria 1 to 10, each at its stated size and time budget.

Every criterion is a function of a seed returning a JSON-able report; the
determinism criterion recomputes all of them and compares the serialized
bytes.  A verdict line per criterion is printed in the terminal summary.
"""

import json
import time

import numpy as np
import pytest

from dhh.diffpoly import derivation_solve, hh_windowed, resolution_maps, trunc_ring
from dhh.hochschild import bar_complex, cohomology, hochschild_complex
from dhh.instances import preset, random_algebra
from dhh.linfp import Matrix
from dhh.spectral import cone, five_term, les_check, ses_check
from dhh.tensorcat import balanced_maps, tensor, universal_check
from dhh.verify import (check_bar, check_complex, check_lowdeg, check_tensor, complex_corpus, describe,
                        instance_corpus, random_triple)

from oracles import periodic_oracle, sympy_derivation_count

SEED = 20240
D = 4


def _hochschild_corpus(seed):
    return [(A, M, hochschild_complex(A, M, D)) for A, M in instance_corpus(seed, 100, degree=D)]


def criterion_1(seed=SEED):
    rows = []
    for A, M, c in _hochschild_corpus(seed):
        r = check_complex(A, M, D, c)
        assert max(A.ring.dim, A.dim, M.dim) <= 4
        rows.append({"instance": describe(A, M), **r})
    return {"count": len(rows), "ok": all(r["ok"] for r in rows), "rows": rows}


def criterion_2(seed=SEED):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(50):
        A = random_algebra(rng, int(rng.choice([2, 2, 3])), max_dim=4)[0]
        r = check_bar(A, D)
        rows.append({"p": A.p, "A": A.dim, "algebra": A.name, **r})
    return {"count": len(rows), "ok": all(r["ok"] for r in rows), "rows": rows}


def criterion_3(seed=SEED):
    A, M = preset("classical-dual-numbers")
    dims = cohomology(hochschild_complex(A, M, D)).dims
    oracle = periodic_oracle(M, np.array([0, 1]), D)
    return {"internal": dims, "oracle": oracle, "ok": dims == oracle == [2] * (D + 1)}


def criterion_4(seed=SEED):
    rows = [{"instance": describe(A, M), **check_lowdeg(A, M, D, c)} for A, M, c in _hochschild_corpus(seed)]
    return {"count": len(rows), "ok": all(r["ok"] for r in rows), "rows": rows}


def _complex_corpus_all(seed):
    return [c for _, _, c in _hochschild_corpus(seed)] + complex_corpus(seed, 200)


def criterion_5(seed=SEED):
    rows = []
    for c in _complex_corpus_all(seed):
        hc = cone(c)
        top = hc.cone.valid_top
        if c.provenance == "hochschild":
            assert top == D
        for n in range(1, top + 1):
            t = ses_check(c, n, hc)
            rows.append({"n": n, "dims": t.dims()[1:4], "exact": t.exact, "identity": t.dimension_identity})
    ok = all(r["exact"] and r["identity"] for r in rows)
    return {"sequences": len(rows), "ok": ok, "rows": rows}


def criterion_6(seed=SEED):
    rows = []
    for c in _complex_corpus_all(seed):
        t = les_check(c)
        labels = [p.label for p in t.positions]
        head = five_term(t) if "HH^2" in labels else None
        if c.provenance == "hochschild":
            assert head is not None
        rows.append({"dims": t.dims(), "exact": t.exact, "five_term": None if head is None else head.exact})
    ok = all(r["exact"] and r["five_term"] is not False for r in rows)
    heads = sum(r["five_term"] is not None for r in rows)
    return {"sequences": len(rows), "five_term_heads": heads, "ok": ok, "rows": rows}


def criterion_7(seed=SEED):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(100):
        L, M, N = random_triple(rng)
        r = check_tensor(L, M, N)
        rows.append({"p": M.p, "k": M.ring.dim, "dims": [L.dim, M.dim, N.dim], **r})
    return {"count": len(rows), "ok": all(r["ok"] for r in rows), "rows": rows}


def criterion_8(seed=SEED):
    rng = np.random.default_rng(seed + 1)
    rows = []
    for _ in range(50):
        L, M, N = random_triple(rng)
        rep = universal_check(L, M, N)
        t = tensor(L, M)
        bal = balanced_maps(L, M, N)
        # recheck every factorisation f~ o (x) = f against the balanced basis
        explicit = bool(rep) and len(rep.factorizations) == bal.dim and all(
            f @ t.projection == Matrix(v.reshape(N.dim, L.dim * M.dim), N.p)
            for f, v in zip(rep.factorizations, bal.basis))
        rows.append({"dims": [L.dim, M.dim, N.dim], **rep.witness, "ok": explicit})
    return {"count": len(rows), "ok": all(r["ok"] for r in rows), "rows": rows}


def criterion_9(seed=SEED):
    ders = []
    for r, d in [(2, 2), (3, 2), (2, 3)]:
        sol = derivation_solve(2, r, d)
        oracle, window = sympy_derivation_count(2, r, d)
        ders.append({"r": r, "d": d, "dim": sol.dim, "oracle": oracle, "window": window,
                     "ok": sol.dim == oracle == window and sol.shift_forced})
    f, g, res = resolution_maps(2, 2, 2)
    hh = hh_windowed(2, 2, 2)
    N = trunc_ring(2, 2, 2).dim
    hh_row = {"hh0": hh.hh0_dim, "hh1": hh.hh1_dim, "expected0": hh.expected0, "expected1": hh.expected1,
              "ok": hh.ok and hh.expected0 == N and hh.expected1 == 5 * N}
    ok = all(r["ok"] for r in ders) and (f @ g).is_zero() and res.ok and hh_row["ok"]
    return {"derivations": ders, "resolution": res.as_dict(), "hh": hh_row, "ok": ok}


CRITERIA = {
    1: ("complex identity", criterion_1, 60),
    2: ("bar resolution", criterion_2, 60),
    3: ("classical recovery", criterion_3, 10),
    4: ("low-degree agreement", criterion_4, 60),
    5: ("SES exactness", criterion_5, 120),
    6: ("LES and five-term exactness", criterion_6, 120),
    7: ("tensor/hom adjunction", criterion_7, 60),
    8: ("universal property", criterion_8, 60),
    9: ("difference polynomial windows", criterion_9, 120),
}

_FIRST_RUN = {}


def _serialize(report):
    return json.dumps(report, sort_keys=True).encode()


def _summary(report):
    for key in ("count", "sequences"):
        if key in report:
            return f"{report[key]} {'instances' if key == 'count' else 'sequences'}"
    return "presets"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    name, fn, budget = CRITERIA[number]
    start = time.perf_counter()
    report = fn()
    elapsed = time.perf_counter() - start
    _FIRST_RUN[number] = _serialize(report)
    ok = report["ok"] and elapsed < budget
    line = (f"criterion {number}: {'PASS' if ok else 'FAIL'} {name} "
            f"({_summary(report)}, {elapsed:.1f} s of {budget} s)")
    acceptance_log.append(line)
    print(line)
    assert report["ok"], name
    assert elapsed < budget, f"{name} took {elapsed:.1f} s"


def test_criterion_10_determinism(acceptance_log):
    start = time.perf_counter()
    same = {}
    for number, (_, fn, _) in CRITERIA.items():
        first = _FIRST_RUN.get(number) or _serialize(fn())
        same[number] = first == _serialize(fn())
    elapsed = time.perf_counter() - start
    ok = all(same.values())
    bad = [n for n, s in same.items() if not s]
    line = (f"criterion 10: {'PASS' if ok else 'FAIL'} determinism "
            f"(criteria 1-9 re-run, byte-identical JSON{'' if ok else f'; differs: {bad}'}, {elapsed:.1f} s)")
    acceptance_log.append(line)
    print(line)
    assert ok, f"reports differ for criteria {bad}"
