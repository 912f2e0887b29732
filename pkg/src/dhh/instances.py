"""Concrete difference rings, algebras and bimodules, presets and seeded random instances.

Random instances are built as A = k (x)_{F_p} B with sigma_A = sigma_k (x) tau
for an F_p-algebra B with automorphism tau, then scrambled by random changes
of basis on k, A and M.  Every generated object is checked with validate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .diffmod import (Bimodule, DiffAlgebra, DiffModule, DiffRing, direct_sum, dual_bimodule,
                      prime_field, regular_bimodule)
from .errors import AxiomViolation
from .linfp import Matrix, Subspace, _mulmod, kernel_basis, rank


# ------------------------------------------------------------ helpers


def _unit_vec(n, i):
    e = np.zeros(n, dtype=np.int64)
    e[i] = 1
    return e


def _random_invertible(rng, n, p):
    while True:
        m = rng.integers(0, p, size=(n, n))
        if rank(Matrix(m, p)) == n:
            return Matrix(m, p)


def _units(p):
    return list(range(1, p))


def _poly_mulmod(a, b, f, p):
    """Product of coefficient lists (low degree first) modulo monic f."""
    n = len(f) - 1
    prod = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, x in enumerate(a):
        prod[i:i + len(b)] += x * np.asarray(b)
    prod %= p
    for d in range(len(prod) - 1, n - 1, -1):
        c = prod[d]
        if c:
            prod[d - n:d + 1] -= c * np.asarray(f)
            prod %= p
    out = np.zeros(n, dtype=np.int64)
    out[:min(n, len(prod))] = prod[:n]
    return out


def _divides(g, f, p):
    rem = list(f)
    while len(rem) >= len(g):
        c = rem[-1] * pow(int(g[-1]), -1, p) % p
        shift = len(rem) - len(g)
        for i, x in enumerate(g):
            rem[shift + i] = (rem[shift + i] - c * x) % p
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return not rem


def irreducible_poly(p, n):
    """Lexicographically first monic irreducible polynomial of degree n over F_p."""
    for tail in product(range(p), repeat=n):
        f = list(tail) + [1]
        if f[0] == 0:
            continue
        ok = True
        for deg in range(1, n // 2 + 1):
            for gt in product(range(p), repeat=deg):
                if _divides(list(gt) + [1], f, p):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return f
    raise ValueError("no irreducible polynomial found")


# --------------------------------------------------------------- rings


def galois_field(p, n, frob_power=1, poly=None) -> DiffRing:
    """F_{p^n} = F_p[x]/(f) with sigma = Frobenius^frob_power."""
    f = poly or irreducible_poly(p, n)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            mult[i, j] = _poly_mulmod(_unit_vec(n, i), _unit_vec(n, j), f, p)
    ring = DiffRing(p, mult, _unit_vec(n, 0), np.eye(n, dtype=np.int64))
    # Frobenius is F_p-linear, so its matrix is given by the p-th powers of the basis
    frob = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        v = _unit_vec(n, 0)
        for _ in range(p):
            v = ring.mul(v, _unit_vec(n, j))
        frob[:, j] = v
    ring.sigma = Matrix(frob, p).power(frob_power % n if n > 1 else 0)
    ring.name = f"F{p}^{n}[Frob^{frob_power % n}]" if n > 1 else f"F{p}"
    return ring


def f4(frobenius=True) -> DiffRing:
    """F_4 = F_2[w]/(w^2 + w + 1) on the basis 1, w."""
    return galois_field(2, 2, 1 if frobenius else 0, poly=[1, 1, 1])


def product_ring(p, n, perm=None) -> DiffRing:
    """F_p^n with idempotent basis and sigma permuting the factors."""
    perm = list(range(n)) if perm is None else list(perm)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        mult[i, i, i] = 1
    sig = np.zeros((n, n), dtype=np.int64)
    sig[perm, list(range(n))] = 1
    return DiffRing(p, mult, np.ones(n, dtype=np.int64), sig, name=f"F{p}^x{n}")


def dual_numbers_ring(p, c=1) -> DiffRing:
    """F_p[e]/(e^2) with sigma(e) = c e."""
    mult = np.zeros((2, 2, 2), dtype=np.int64)
    mult[0, 0, 0] = mult[0, 1, 1] = mult[1, 0, 1] = 1
    return DiffRing(p, mult, [1, 0], [[1, 0], [0, c % p]], name=f"F{p}[e]c{c}")


# ----------------------------------------------------- F_p-algebras B


@dataclass
class PlainAlgebra:
    """An F_p-algebra with a list of automorphism constructors and characters."""

    name: str
    mult: np.ndarray
    unit: np.ndarray
    characters: list


def _monomial_algebra(p, exps, name):
    """Truncated commutative monomial algebra on exponent tuples closed under division."""
    idx = {e: i for i, e in enumerate(exps)}
    n = len(exps)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for (a, ea), (b, eb) in product(enumerate(exps), repeat=2):
        s = tuple(x + y for x, y in zip(ea, eb))
        if s in idx:
            mult[a, b, idx[s]] = 1
    unit = _unit_vec(n, idx[tuple(0 for _ in exps[0])])
    aug = _unit_vec(n, idx[tuple(0 for _ in exps[0])])
    return PlainAlgebra(name, mult, unit, [aug])


def _matrix_algebra(p, mats, name, characters=()):
    """Algebra spanned by the given matrices (assumed closed under product)."""
    flat = np.array([m.ravel() for m in mats]) % p
    n = len(mats)
    mult = np.zeros((n, n, n), dtype=np.int64)
    basis = Matrix(flat.T, p)
    for i, j in product(range(n), repeat=2):
        prod = (mats[i] @ mats[j]) % p
        mult[i, j] = _coords(basis, prod.ravel(), p)
    ident = np.eye(mats[0].shape[0], dtype=np.int64)
    unit = _coords(basis, ident.ravel(), p)
    return PlainAlgebra(name, mult, unit, list(characters))


def _coords(basis: Matrix, v, p):
    from .linfp import solve
    x = solve(basis, v)
    if x is None:
        raise ValueError("vector outside the span")
    return x


def plain_algebras(p):
    """Name -> constructor of (PlainAlgebra, automorphism sampler)."""
    return {
        "Fp": _fp,
        "dual": _dual,
        "FpxFp": _fpxfp,
        "x3": _x3,
        "T2": _t2,
        "xy2": _xy2,
        "M2": _m2,
        "ext": _ext,
        "x4": _x4,
    }


def _fp(p, rng):
    alg = PlainAlgebra("Fp", np.ones((1, 1, 1), dtype=np.int64), np.array([1]), [np.array([1])])
    return alg, np.eye(1, dtype=np.int64)


def _dual(p, rng):
    alg = _monomial_algebra(p, [(0,), (1,)], "dual")
    c = int(rng.choice(_units(p)))
    return alg, np.diag([1, c])


def _fpxfp(p, rng):
    mult = np.zeros((2, 2, 2), dtype=np.int64)
    mult[0, 0, 0] = mult[1, 1, 1] = 1
    alg = PlainAlgebra("FpxFp", mult, np.array([1, 1]), [np.array([1, 0]), np.array([0, 1])])
    tau = np.array([[0, 1], [1, 0]]) if rng.random() < 0.5 else np.eye(2, dtype=np.int64)
    return alg, tau


def _x3(p, rng):
    alg = _monomial_algebra(p, [(0,), (1,), (2,)], "x3")
    c, d = int(rng.choice(_units(p))), int(rng.integers(0, p))
    return alg, np.array([[1, 0, 0], [0, c, 0], [0, d, c * c]]) % p


def _x4(p, rng):
    alg = _monomial_algebra(p, [(0,), (1,), (2,), (3,)], "x4")
    c, d, e = int(rng.choice(_units(p))), int(rng.integers(0, p)), int(rng.integers(0, p))
    # x -> c x + d x^2 + e x^3, so x^2 -> c^2 x^2 + 2cd x^3 and x^3 -> c^3 x^3
    tau = np.array([[1, 0, 0, 0], [0, c, 0, 0], [0, d, c * c, 0], [0, e, 2 * c * d, c ** 3]]) % p
    return alg, tau


def _xy2(p, rng):
    alg = _monomial_algebra(p, [(0, 0), (1, 0), (0, 1)], "xy2")
    g = _random_invertible(rng, 2, p).a
    tau = np.eye(3, dtype=np.int64)
    tau[1:, 1:] = g
    return alg, tau


def _ext(p, rng):
    # exterior algebra on x, y: basis 1, x, y, xy with x^2 = y^2 = 0, yx = -xy
    mult = np.zeros((4, 4, 4), dtype=np.int64)
    for i in range(4):
        mult[0, i, i] = mult[i, 0, i] = 1
    mult[1, 2, 3] = 1
    mult[2, 1, 3] = p - 1
    alg = PlainAlgebra("ext", mult % p, _unit_vec(4, 0), [_unit_vec(4, 0)])
    g = _random_invertible(rng, 2, p).a
    det = int(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % p
    tau = np.zeros((4, 4), dtype=np.int64)
    tau[0, 0] = 1
    tau[1:3, 1:3] = g
    tau[3, 3] = det
    return alg, tau


def _conjugation(alg_mats, g, p):
    ginv = Matrix(g, p).inverse().a
    basis = Matrix(np.array([m.ravel() for m in alg_mats]).T, p)
    cols = [_coords(basis, ((g @ m @ ginv) % p).ravel(), p) for m in alg_mats]
    return np.stack(cols, axis=1)


def _t2(p, rng):
    e11 = np.array([[1, 0], [0, 0]])
    e12 = np.array([[0, 1], [0, 0]])
    e22 = np.array([[0, 0], [0, 1]])
    mats = [e11, e12, e22]
    alg = _matrix_algebra(p, mats, "T2", [np.array([1, 0, 0]), np.array([0, 0, 1])])
    while True:
        g = np.array([[rng.integers(1, p), rng.integers(0, p)], [0, rng.integers(1, p)]])
        if rng.random() < 0.3:
            g = np.eye(2, dtype=np.int64)
        break
    return alg, _conjugation(mats, g, p)


def _m2(p, rng):
    mats = []
    for i, j in product(range(2), repeat=2):
        m = np.zeros((2, 2), dtype=np.int64)
        m[i, j] = 1
        mats.append(m)
    alg = _matrix_algebra(p, mats, "M2")
    g = _random_invertible(rng, 2, p).a
    return alg, _conjugation(mats, g, p)


# ------------------------------------------------------- base change


def base_change(k: DiffRing, B: PlainAlgebra, tau, name="") -> DiffAlgebra:
    """A = k (x)_{F_p} B with sigma_A = sigma_k (x) tau; index i * dim B + b."""
    p = k.p
    b = B.mult.shape[0]
    dk = k.dim
    mult = np.einsum("ijl,acm->iajclm", k.mult, B.mult).reshape(dk * b, dk * b, dk * b) % p
    unit = np.kron(k.unit, B.unit) % p
    sigma = np.kron(k.sigma.a, np.asarray(tau)) % p
    act = [Matrix(np.kron(k.left(k.basis(i)).a, np.eye(b, dtype=np.int64)), p) for i in range(dk)]
    mod = DiffModule(k, act, sigma, name=name or f"{k.name}*{B.name}")
    return DiffAlgebra(mod, mult, unit, name=name or f"{k.name}*{B.name}")


def character_bimodule(A: DiffAlgebra, k: DiffRing, B: PlainAlgebra, chi_l, chi_r, c=1, name="") -> Bimodule:
    """k with A = k (x) B acting on the left through chi_l and on the right through chi_r.

    sigma_M = c sigma_k; requires both characters to be tau-invariant.
    """
    b = B.mult.shape[0]
    dk = k.dim
    mod = DiffModule(k, [k.left(k.basis(i)) for i in range(dk)], k.sigma.scale(c), name=name)
    lefts, rights = [], []
    for i in range(dk):
        L = k.left(k.basis(i))
        for a in range(b):
            lefts.append(L.scale(int(chi_l[a])))
            rights.append(L.scale(int(chi_r[a])))
    return Bimodule(A, mod, lefts, rights, name=name or "chi")


# ------------------------------------------------------- changes of basis


def rebase_ring(k: DiffRing, P: Matrix) -> DiffRing:
    """Same ring on the basis given by the columns of P."""
    p = k.p
    Pi = P.inverse()
    Pa = P.a
    mult = np.einsum("ai,bj,abk->ijk", Pa, Pa, k.mult) % p
    mult = np.einsum("lk,ijk->ijl", Pi.a, mult) % p
    return DiffRing(p, mult, Pi @ k.unit, Pi @ k.sigma @ P, name=k.name)


def _recombine(mats, P: Matrix, p):
    out = []
    for j in range(P.cols):
        acc = np.zeros_like(mats[0].a)
        for i in range(P.rows):
            if P.a[i, j]:
                acc = acc + int(P.a[i, j]) * mats[i].a
        out.append(Matrix(acc, p))
    return out


def rebase_instance(A: DiffAlgebra, M: Bimodule, Pk=None, Pa=None, Pm=None):
    """Apply basis changes to k, A and M; returns a new (A, M) pair."""
    p = A.p
    k = A.ring
    if Pk is not None:
        k = rebase_ring(k, Pk)
    # A-module structure over the (possibly rebased) ring
    a_act = _recombine(A.module.act, Pk, p) if Pk is not None else list(A.module.act)
    mult, unit, sig = A.mult, A.unit, A.sigma
    m_act = _recombine(M.module.act, Pk, p) if Pk is not None else list(M.module.act)
    lefts, rights = list(M.left), list(M.right)
    if Pa is not None:
        Pi = Pa.inverse()
        P_ = Pa.a
        mult = np.einsum("ai,bj,abk->ijk", P_, P_, mult) % p
        mult = np.einsum("lk,ijk->ijl", Pi.a, mult) % p
        unit = Pi @ unit
        sig = Pi @ sig @ Pa
        a_act = [Pi @ x @ Pa for x in a_act]
        lefts = _recombine(lefts, Pa, p)
        rights = _recombine(rights, Pa, p)
    msig = M.sigma
    if Pm is not None:
        Qi = Pm.inverse()
        m_act = [Qi @ x @ Pm for x in m_act]
        lefts = [Qi @ x @ Pm for x in lefts]
        rights = [Qi @ x @ Pm for x in rights]
        msig = Qi @ msig @ Pm
    A2 = DiffAlgebra(DiffModule(k, a_act, sig, name=A.name), mult, unit, name=A.name)
    M2 = Bimodule(A2, DiffModule(k, m_act, msig, name=M.name), lefts, rights, name=M.name)
    return A2, M2


# ------------------------------------------------------------ presets


def dual_numbers(p=2) -> DiffAlgebra:
    k = prime_field(p)
    B = _monomial_algebra(p, [(0,), (1,)], "dual")
    return base_change(k, B, np.eye(2, dtype=np.int64), name="F2[e]/(e^2)" if p == 2 else f"F{p}[e]/(e^2)")


def upper_triangular(p=2) -> DiffAlgebra:
    k = prime_field(p)
    alg, _ = _t2(p, np.random.default_rng(0))
    return base_change(k, alg, np.eye(3, dtype=np.int64), name="T2")


def preset(name: str):
    """(A, M) for a named instance."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    return PRESETS[name]()


def _classical_dual():
    A = dual_numbers(2)
    return A, regular_bimodule(A, name="A")


def _twisted_dual():
    A = dual_numbers(2)
    return A, regular_bimodule(A, twist=np.array([1, 1]), name="A(1+e)")


def _field():
    k = prime_field(2)
    B = PlainAlgebra("Fp", np.ones((1, 1, 1), dtype=np.int64), np.array([1]), [])
    A = base_change(k, B, np.eye(1, dtype=np.int64), name="F2")
    return A, regular_bimodule(A, name="F2")


def _f4_frobenius():
    k = f4(True)
    B = PlainAlgebra("Fp", np.ones((1, 1, 1), dtype=np.int64), np.array([1]), [])
    A = base_change(k, B, np.eye(1, dtype=np.int64), name="F4")
    return A, regular_bimodule(A, name="F4")


def _upper_tri():
    A = upper_triangular(2)
    return A, regular_bimodule(A, name="T2")


def _dual_dual():
    A = dual_numbers(2)
    return A, dual_bimodule(A, name="A*")


def _f4_dual_numbers():
    k = f4(True)
    B = _monomial_algebra(2, [(0,), (1,)], "dual")
    A = base_change(k, B, np.eye(2, dtype=np.int64), name="F4[e]")
    return A, regular_bimodule(A, name="F4[e]")


def _swap_product():
    k = product_ring(2, 2, [1, 0])
    B = _monomial_algebra(2, [(0,), (1,)], "dual")
    A = base_change(k, B, np.eye(2, dtype=np.int64), name="(F2xF2)[e]")
    return A, regular_bimodule(A, name="(F2xF2)[e]")


PRESETS = {
    "classical-dual-numbers": _classical_dual,
    "twisted-dual-numbers": _twisted_dual,
    "prime-field": _field,
    "f4-frobenius": _f4_frobenius,
    "upper-triangular": _upper_tri,
    "dual-numbers-dual": _dual_dual,
    "f4-dual-numbers": _f4_dual_numbers,
    "swap-product-dual-numbers": _swap_product,
}


# ------------------------------------------------------- random rings


def random_ring(rng, p, max_dim=4, inversive=True) -> DiffRing:
    choices = ["Fp", "FpxFp", "Fp2", "dual", "Fp3", "Fp^3", "Fp^4", "Fp4"]
    weights = [0.45, 0.13, 0.13, 0.13, 0.04, 0.04, 0.04, 0.04]
    while True:
        kind = str(rng.choice(choices, p=weights))
        if kind == "Fp":
            k = prime_field(p)
        elif kind == "FpxFp":
            k = product_ring(p, 2, [1, 0] if rng.random() < 0.6 else [0, 1])
        elif kind == "Fp2":
            k = galois_field(p, 2, int(rng.integers(0, 2)))
        elif kind == "Fp3":
            k = galois_field(p, 3, int(rng.integers(0, 3)))
        elif kind == "Fp4":
            k = galois_field(p, 4, int(rng.integers(0, 4)))
        elif kind == "dual":
            c = int(rng.choice(_units(p))) if inversive else int(rng.integers(0, p))
            k = dual_numbers_ring(p, c)
        else:
            n = 3 if kind == "Fp^3" else 4
            perm = list(np.roll(np.arange(n), 1)) if rng.random() < 0.7 else list(range(n))
            k = product_ring(p, n, perm)
        if k.dim <= max_dim:
            break
    if k.dim > 1 and rng.random() < 0.7:
        P = _random_invertible(rng, k.dim, p)
        k = rebase_ring(k, P)
    return k


def ring_ideals(k: DiffRing) -> list:
    """Nonzero proper ideals I with sigma(I) = I, found among principal ideals of basis sums."""
    p = k.p
    found = []
    for coeffs in product(range(p), repeat=k.dim):
        if not any(coeffs):
            continue
        x = np.array(coeffs)
        I = Subspace.span(np.stack([k.mul(x, k.basis(i)) for i in range(k.dim)]), k.dim, p)
        if 0 < I.dim < k.dim and I.image_under(k.sigma) == I and I not in found:
            found.append(I)
    return found


def quotient_module(k: DiffRing, I: Subspace) -> DiffModule:
    from .linfp import quotient_space
    q = quotient_space(k.dim, I, k.p)
    act = [q.induced(k.left(k.basis(i))) for i in range(k.dim)]
    return DiffModule(k, act, q.induced(k.sigma), name="k/I")


def free_module(k: DiffRing, G: Matrix) -> DiffModule:
    """k^r with sigma(v) = G * sigma_k(v) for an r x r matrix G over k (given in F_p blocks)."""
    p = k.p
    r = G.rows // k.dim
    act = [Matrix(np.kron(np.eye(r, dtype=np.int64), k.left(k.basis(i)).a), p) for i in range(k.dim)]
    sig = G @ Matrix(np.kron(np.eye(r, dtype=np.int64), k.sigma.a), p)
    return DiffModule(k, act, sig, name=f"k^{r}")


def _k_matrix(k: DiffRing, entries, r) -> Matrix:
    """r x r matrix with entries in k as an F_p block matrix of left multiplications."""
    blocks = [[k.left(entries[i][j]).a for j in range(r)] for i in range(r)]
    return Matrix(np.block(blocks), k.p)


def random_module(rng, k: DiffRing, max_dim=4, inversive=True) -> DiffModule:
    """A random difference k-module of F_p-dimension <= max_dim."""
    p = k.p
    while True:
        parts = []
        budget = max_dim
        while budget >= 1:
            options = []
            if k.dim <= budget:
                options.append("free1")
            if 2 * k.dim <= budget:
                options.append("free2")
            ideals = [I for I in ring_ideals(k) if k.dim - I.dim <= budget] if k.dim > 1 else []
            if ideals:
                options.append("quot")
            if not options:
                break
            kind = str(rng.choice(options))
            if kind in ("free1", "free2"):
                r = 1 if kind == "free1" else 2
                ent = [[rng.integers(0, p, size=k.dim) for _ in range(r)] for _ in range(r)]
                G = _k_matrix(k, ent, r)
                if inversive and G.rank() != G.rows:
                    continue
                mod = free_module(k, G)
            else:
                I = ideals[int(rng.integers(0, len(ideals)))]
                mod = quotient_module(k, I)
                c = int(rng.choice(_units(p)))
                mod = DiffModule(k, mod.act, mod.sigma.scale(c), name="k/I")
            parts.append(mod)
            budget -= mod.dim
            if rng.random() < 0.5:
                break
        if not parts:
            continue
        mod = _module_sum(k, parts)
        if mod.dim > 1 and rng.random() < 0.7:
            Q = _random_invertible(rng, mod.dim, p)
            Qi = Q.inverse()
            mod = DiffModule(k, [Qi @ a @ Q for a in mod.act], Qi @ mod.sigma @ Q, name=mod.name)
        if mod.validate() and (not inversive or mod.inversive):
            return mod


def _module_sum(k, parts):
    from .linfp import block_diag
    p = k.p
    act = [block_diag([m.act[i] for m in parts], p) for i in range(k.dim)]
    sig = block_diag([m.sigma for m in parts], p)
    return DiffModule(k, act, sig, name="+".join(m.name for m in parts))


# --------------------------------------------------- random instances


def cochain_estimate(A: DiffAlgebra, M: Bimodule, degree: int) -> int:
    """Rough F_p-dimension of C^degree when A is free over k."""
    b = A.dim / A.ring.dim
    return int(round(b ** degree * M.dim))


def random_algebra(rng, p, max_dim=4, inversive=True, k=None):
    """(A, k, B, tau) with A = k (x) B of F_p-dimension <= max_dim."""
    table = plain_algebras(p)
    while True:
        kk = k or random_ring(rng, p, max_dim=max_dim, inversive=inversive)
        names = [n for n in table if kk.dim * _plain_dim(n) <= max_dim]
        name = str(rng.choice(names))
        B, tau = table[name](p, rng)
        A = base_change(kk, B, tau)
        if A.validate():
            return A, kk, B, tau


def _plain_dim(name):
    return {"Fp": 1, "dual": 2, "FpxFp": 2, "x3": 3, "T2": 3, "xy2": 3, "M2": 4, "ext": 4, "x4": 4}[name]


def _is_central(A: DiffAlgebra, z) -> bool:
    return A.left(z) == A.right(z)


def random_bimodule(rng, A: DiffAlgebra, k: DiffRing, B: PlainAlgebra, tau, max_dim=4):
    p = A.p
    options = []
    if A.dim <= max_dim:
        options += ["regular", "dual"]
    chars = [c for c in B.characters if np.array_equal((np.asarray(c) @ np.asarray(tau)) % p, np.asarray(c) % p)]
    if chars and k.dim <= max_dim:
        options.append("char")
    if chars and 2 * k.dim <= max_dim:
        options.append("char2")
    kind = str(rng.choice(options))
    if kind == "regular":
        z = None
        if rng.random() < 0.6:
            for _ in range(20):
                cand = rng.integers(0, p, size=A.dim)
                if _is_central(A, cand) and A.left(cand).is_invertible():
                    z = cand
                    break
        M = regular_bimodule(A, twist=z, name="A" if z is None else "A(z)")
    elif kind == "dual":
        M = dual_bimodule(A, scale=int(rng.choice(_units(p))), name="A*")
    else:
        def one():
            cl = chars[int(rng.integers(0, len(chars)))]
            cr = chars[int(rng.integers(0, len(chars)))]
            return character_bimodule(A, k, B, cl, cr, c=int(rng.choice(_units(p))), name="chi")
        M = one() if kind == "char" else direct_sum([one(), one()], name="chi+chi")
    return M


def random_instance(rng, p=None, max_dim=4, budget=None, degree=5, rebase=True):
    """A random inversive (A, M) with dims <= max_dim and C^degree within the budget."""
    while True:
        pp = p or int(rng.choice([2, 2, 2, 3]))
        cap = budget or (1024 if pp == 2 else 256)
        A, k, B, tau = random_algebra(rng, pp, max_dim=max_dim)
        M = random_bimodule(rng, A, k, B, tau, max_dim=max_dim)
        if M.dim > max_dim or cochain_estimate(A, M, degree) > cap:
            continue
        if rebase:
            Pk = _random_invertible(rng, k.dim, pp) if k.dim > 1 and rng.random() < 0.5 else None
            Pa = _random_invertible(rng, A.dim, pp) if A.dim > 1 and rng.random() < 0.5 else None
            Pm = _random_invertible(rng, M.dim, pp) if M.dim > 1 and rng.random() < 0.5 else None
            if Pk is not None or Pa is not None or Pm is not None:
                A, M = rebase_instance(A, M, Pk, Pa, Pm)
        for obj in (A.ring, A, M):
            r = obj.validate()
            if not r:
                raise AxiomViolation(r)
        if A.inversive and M.inversive:
            return A, M


# ------------------------------------------------- random abstract complexes


def _sigma_pool(p):
    pool = [np.array([[c]]) for c in range(p)]
    for c in range(p):
        pool.append(np.array([[c, 1], [0, c]]))
    pool.append(np.array([[0, 1], [1, 0]]))
    pool.append(np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))
    return pool


def random_complex(rng, p=2, max_dim=6, max_len=5):
    """A bounded complex of difference F_p-modules with random differentials."""
    from .diffmod import hom_diff
    from .hochschild import CochainComplex
    k = prime_field(p)
    pool = _sigma_pool(p)
    length = int(rng.integers(1, max_len + 1))
    terms = []
    for _ in range(length):
        blocks, size = [], 0
        target = int(rng.integers(0, max_dim + 1))
        while size < target:
            b = pool[int(rng.integers(0, len(pool)))]
            if size + b.shape[0] > max_dim:
                break
            blocks.append(b)
            size += b.shape[0]
        sig = np.zeros((size, size), dtype=np.int64)
        o = 0
        for b in blocks:
            sig[o:o + b.shape[0], o:o + b.shape[0]] = b
            o += b.shape[0]
        if size > 1 and rng.random() < 0.5:
            Q = _random_invertible(rng, size, p)
            sig = (Q.inverse() @ Matrix(sig, p) @ Q).a
        terms.append(DiffModule(k, [Matrix.identity(size, p)], Matrix(sig, p)))
    diffs = []
    for n in range(length - 1):
        src, tgt = terms[n], terms[n + 1]
        H = hom_diff(src, tgt)
        if n > 0 and H.dim and diffs[-1].cols:
            # restrict to maps killing the image of the previous differential
            prev = diffs[-1].a
            rows = np.kron(np.eye(tgt.dim, dtype=np.int64), prev.T) % p
            cons = _mulmod(rows, H.basis.T, p) if H.dim else rows
            ker = kernel_basis(Matrix(cons, p))
            vecs = _mulmod(ker.basis, H.basis, p) if ker.dim else np.zeros((0, H.ambient_dim), dtype=np.int64)
        else:
            vecs = H.basis
        if len(vecs):
            coeff = rng.integers(0, p, size=len(vecs))
            flat = (coeff @ vecs) % p
        else:
            flat = np.zeros(tgt.dim * src.dim, dtype=np.int64)
        diffs.append(Matrix(flat.reshape(tgt.dim, src.dim), p))
    return CochainComplex(terms, diffs, provenance="abstract", bounded=True)
