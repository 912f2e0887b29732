"""Tensor products of difference k-modules.

M (x)_k N is realised as the quotient of the Kronecker space F_p^m (x) F_p^n
(index i*n + j) by the balancing span of (l m) (x) n - m (x) (l n).  With
the balancing span in RREF, the non-pivot coordinates give a canonical
complement: the projection is the identity there, and the section is the
coordinate inclusion.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .diffmod import DiffAlgebra, DiffMap, DiffModule, K_LINEAR, DIFFERENCE, Report, commutant_space, hom_diff, as_matrix
from .errors import DegreeOverflow, ShapeMismatch
from .linfp import Matrix, Subspace, _mulmod, image

DEFAULT_DIM_CAP = 2 ** 20


def dim_cap() -> int:
    env = os.environ.get("DHH_DIM_CAP")
    return int(env) if env else DEFAULT_DIM_CAP


def quotient_maps(W: Subspace):
    """(projection, section) for F_p^n -> F_p^n / W using W's RREF pivots."""
    n, p = W.ambient_dim, W.p
    free = [c for c in range(n) if c not in set(W.pivots)]
    proj = np.zeros((len(free), n), dtype=np.int64)
    proj[np.arange(len(free)), free] = 1
    if W.dim:
        proj[:, W.pivots] = (-W.basis[:, free].T) % p
    sec = np.zeros((n, len(free)), dtype=np.int64)
    sec[free, np.arange(len(free))] = 1
    return Matrix._wrap(proj, p), Matrix._wrap(sec, p)


def _induce(proj: Matrix, op: np.ndarray, sec: Matrix) -> Matrix:
    p = proj.p
    return Matrix._wrap(_mulmod(proj.a, _mulmod(op, sec.a, p), p), p)


@dataclass
class TensorModule:
    factors: tuple
    result: DiffModule
    projection: Matrix
    section: Matrix
    balancing: Subspace

    def pure_tensor(self, m, n):
        return self.projection @ np.kron(np.asarray(m) % self.result.p, np.asarray(n) % self.result.p)

    def lift(self, x):
        return self.section @ x


def balancing_span(m: DiffModule, n: DiffModule) -> Subspace:
    p = m.p
    cols = []
    eye_m = np.eye(m.dim, dtype=np.int64)
    eye_n = np.eye(n.dim, dtype=np.int64)
    for am, an in zip(m.act, n.act):
        if _same_scalar(am, an):
            continue
        cols.append((np.kron(am.a, eye_n) - np.kron(eye_m, an.a)) % p)
    if not cols:
        return Subspace.zero(m.dim * n.dim, p)
    return image(Matrix._wrap(np.hstack(cols), p))


def _same_scalar(x: Matrix, y: Matrix) -> bool:
    if x.rows == 0 or y.rows == 0:
        return True
    c = x.a[0, 0]
    return (not np.count_nonzero(x.a - np.diag(np.diag(x.a))) and (np.diag(x.a) == c).all()
            and not np.count_nonzero(y.a - np.diag(np.diag(y.a))) and (np.diag(y.a) == c).all())


def tensor(m: DiffModule, n: DiffModule, name="") -> TensorModule:
    if m.ring.dim != n.ring.dim or m.p != n.p:
        raise ShapeMismatch("factors live over different rings")
    raw = m.dim * n.dim
    if raw > dim_cap():
        raise DegreeOverflow(f"raw tensor dimension {raw} exceeds cap {dim_cap()}")
    W = balancing_span(m, n)
    proj, sec = quotient_maps(W)
    eye_n = np.eye(n.dim, dtype=np.int64)
    act = [_induce(proj, np.kron(a.a, eye_n), sec) for a in m.act]
    sigma = _induce(proj, np.kron(m.sigma.a, n.sigma.a), sec)
    res = DiffModule(m.ring, act, sigma, name=name or f"({m.name}*{n.name})")
    return TensorModule((m, n), res, proj, sec, W)


def tensor_map(f: DiffMap, g: DiffMap, src: TensorModule | None = None,
               tgt: TensorModule | None = None) -> DiffMap:
    """f (x) g between tensor products, defined on pure tensors."""
    src = src or tensor(f.source, g.source)
    tgt = tgt or tensor(f.target, g.target)
    if f.matrix.shape != (tgt.factors[0].dim, src.factors[0].dim) or \
            g.matrix.shape != (tgt.factors[1].dim, src.factors[1].dim):
        raise ShapeMismatch("map shapes do not match the tensor factors")
    mat = _induce(tgt.projection, np.kron(f.matrix.a, g.matrix.a), src.section)
    kind = DIFFERENCE if f.kind == DIFFERENCE and g.kind == DIFFERENCE else K_LINEAR
    return DiffMap(src.result, tgt.result, mat, kind)


def unit_iso(m: DiffModule, t: TensorModule | None = None):
    """Mutually inverse matrices M (x) k -> M and M -> M (x) k."""
    k = m.ring
    t = t or tensor(m, k.regular_module())
    p = m.p
    dk = k.dim
    u = np.zeros((m.dim, m.dim * dk), dtype=np.int64)
    for j in range(dk):
        u[:, j::dk] = m.act[j].a        # m_i (x) e_j  ->  e_j m_i
    fwd = Matrix._wrap(_mulmod(u % p, t.section.a, p), p)
    back = t.projection @ Matrix._wrap(np.kron(np.eye(m.dim, dtype=np.int64), k.unit.reshape(-1, 1)), p)
    return fwd, back


def associator(m: DiffModule, n: DiffModule, q: DiffModule):
    """Re-bracketing (M (x) N) (x) Q -> M (x) (N (x) Q) and its inverse."""
    p = m.p
    mn = tensor(m, n)
    left = tensor(mn.result, q)
    nq = tensor(n, q)
    right = tensor(m, nq.result)
    pl = left.projection @ mn.projection.kron(Matrix.identity(q.dim, p))
    sl = mn.section.kron(Matrix.identity(q.dim, p)) @ left.section
    pr = right.projection @ Matrix.identity(m.dim, p).kron(nq.projection)
    sr = Matrix.identity(m.dim, p).kron(nq.section) @ right.section
    return pr @ sl, pl @ sr, left, right


# ------------------------------------------------------------- tensor powers


@dataclass
class TensorPower:
    """A^{(x)n} with its raw projection/section from (F_p^a)^{(x)n}.

    Over the prime field nothing is balanced away; ``free`` is set and the
    projection and section are identities that are never materialised.
    """

    n: int
    module: DiffModule
    projection: Matrix | None   # q x a^n
    section: Matrix | None      # a^n x q
    free: bool = False
    deltas: list = field(default_factory=list)   # delta_i : A^{(x)n} -> A^{(x)n-1}, i = 1..n-1

    def P(self) -> np.ndarray:
        return np.eye(self.module.dim, dtype=np.int64) if self.free else self.projection.a

    def S(self) -> np.ndarray:
        return np.eye(self.module.dim, dtype=np.int64) if self.free else self.section.a


class _Tower:
    def __init__(self, A: DiffAlgebra):
        self.A = A
        self.free = A.ring.dim == 1
        self.powers = {}

    def get(self, n) -> TensorPower:
        if n in self.powers:
            return self.powers[n]
        A, p = self.A, self.A.p
        if n == 0:
            k = A.ring
            one = Matrix.identity(1, p)
            # A^{(x)0} = k has no raw Kronecker model; the tower starts at n = 1
            tp = TensorPower(0, k.regular_module(), one, one, free=self.free)
        elif n == 1:
            eye = Matrix.identity(A.dim, p)
            tp = TensorPower(1, A.module, eye, eye, free=self.free)
        else:
            raw = A.dim ** n
            if raw > dim_cap():
                raise DegreeOverflow(f"A^(x){n} has raw dimension {raw} > cap {dim_cap()}")
            prev = self.get(n - 1)
            if self.free:
                sig = prev.module.sigma.kron(A.sigma)
                mod = DiffModule(A.ring, [Matrix.identity(raw, p)], sig, name=f"{A.name}^{n}")
                tp = TensorPower(n, mod, None, None, free=True)
            else:
                t = tensor(prev.module, A.module, name=f"{A.name}^{n}")
                eye = Matrix.identity(A.dim, p)
                proj = t.projection @ prev.projection.kron(eye)
                sec = prev.section.kron(eye) @ t.section
                tp = TensorPower(n, t.result, proj, sec)
        self.powers[n] = tp
        return tp

    def sigma_inv(self, n) -> np.ndarray:
        """Inverse of sigma on A^{(x)n}; a Kronecker power over the prime field."""
        key = ("sinv", n)
        if key not in self.powers:
            if self.free and n >= 1:
                base = self.A.sigma.inverse().a
                out = base
                for _ in range(n - 1):
                    out = np.kron(out, base) % self.A.p
            else:
                out = self.get(n).module.sigma.inverse().a
            self.powers[key] = out
        return self.powers[key]

    def raw_maps(self, n):
        """Projection and section of A^{(x)n} as (possibly sparse) arrays; None when free."""
        tp = self.get(n)
        if tp.free:
            return None, None
        return tp.projection.a, tp.section.a


def tower(A: DiffAlgebra) -> _Tower:
    t = getattr(A, "_tower", None)
    if t is None:
        t = _Tower(A)
        A._tower = t
    return t


def raw_contraction(A: DiffAlgebra, n: int, i: int) -> sparse.csr_matrix:
    """I^{(x)i-1} (x) mu (x) I^{(x)n-i} on raw Kronecker spaces, a^{n+1} -> a^n."""
    mu = sparse.csr_matrix(A.mult_matrix().a)
    left = sparse.identity(A.dim ** (i - 1), dtype=np.int64, format="csr")
    right = sparse.identity(A.dim ** (n - i), dtype=np.int64, format="csr")
    return sparse.kron(sparse.kron(left, mu), right, format="csr")


def compress(A: DiffAlgebra, raw, n_out: int, n_in: int):
    """pi_{n_out} raw s_{n_in}; stays sparse over the prime field."""
    tw = tower(A)
    if tw.free:
        out = sparse.csr_matrix(raw)
        out.data %= A.p
        out.eliminate_zeros()
        return out
    p = A.p
    _, s = tw.raw_maps(n_in) if n_in >= 1 else (None, None)
    pi, _ = tw.raw_maps(n_out)
    right = raw @ s
    return sparse.csr_matrix(_mulmod(pi, np.asarray(right) % p, p))


def contraction(A: DiffAlgebra, n: int, i: int) -> Matrix:
    """delta_i : A^{(x)n+1} -> A^{(x)n}, multiplying factors i and i+1 (1-based)."""
    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    tower(A).get(n + 1)
    m = compress(A, raw_contraction(A, n, i), n, n + 1)
    return Matrix._wrap(m.toarray() % A.p, A.p)


def tensor_power(A: DiffAlgebra, n: int) -> TensorPower:
    """A^{(x)n} (left-associated) with the contractions delta_1..delta_{n-1} into A^{(x)n-1}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    tw = tower(A)
    tp = tw.get(n)
    if n >= 2 and not tp.deltas:
        tp.deltas = [contraction(A, n - 1, i) for i in range(1, n)]
    return tp


# ---------------------------------------------------------- tensor algebras


@dataclass
class TensorAlgebra:
    algebra: DiffAlgebra
    tensor: TensorModule

    @property
    def projection(self):
        return self.tensor.projection

    @property
    def section(self):
        return self.tensor.section


def tensor_algebra(A: DiffAlgebra, B: DiffAlgebra, name="") -> TensorAlgebra:
    """A (x)_k B with (a (x) b)(a' (x) b') = a a' (x) b b'."""
    p = A.p
    t = tensor(A.module, B.module)
    a, b = A.dim, B.dim
    raw = np.einsum("ack,bdl->abcdkl", A.mult, B.mult).reshape(a * b, a * b, a * b) % p
    s, pr = t.section.a, t.projection.a
    r = t.result.dim
    mult = np.einsum("xi,yj,xyz->ijz", s, s, raw) % p
    mult = _mulmod(mult.reshape(r * r, a * b), pr.T, p).reshape(r, r, r)
    unit = t.projection @ np.kron(A.unit, B.unit)
    alg = DiffAlgebra(t.result, mult, unit, name=name or f"{A.name}*{B.name}")
    return TensorAlgebra(alg, t)


# ------------------------------------------------------ universal property


def balanced_maps(m: DiffModule, n: DiffModule, q: DiffModule) -> Subspace:
    """sigma-equivariant k-balanced k-bilinear maps M x N -> Q.

    A bilinear map is a linear map B on the Kronecker space; it is balanced
    when B((l m) (x) n) = B(m (x) (l n)), k-bilinear when B((l m) (x) n) = l B(m (x) n),
    and equivariant when B (sigma_M (x) sigma_N) = sigma_Q B.
    """
    p = m.p
    eye_m = Matrix.identity(m.dim, p)
    eye_n = Matrix.identity(n.dim, p)
    pairs = []
    for am, an, aq in zip(m.act, n.act, q.act):
        pairs.append((am.kron(eye_n), aq))
        pairs.append((eye_m.kron(an), aq))
    pairs.append((m.sigma.kron(n.sigma), q.sigma))
    return commutant_space(pairs, q.dim, m.dim * n.dim, p)


def universal_check(m: DiffModule, n: DiffModule, q: DiffModule) -> Report:
    p = m.p
    t = tensor(m, n)
    bal = balanced_maps(m, n, q)
    homs = hom_diff(t.result, q)
    witness = {"balanced_dim": bal.dim, "hom_dim": homs.dim}
    if bal.dim != homs.dim:
        return Report(False, "universal", "dimension mismatch", witness)
    factorizations = []
    for v in bal.basis:
        B = as_matrix(v, q.dim, m.dim * n.dim, p)
        f = B @ t.section
        if f @ t.projection != B:
            return Report(False, "universal", "f~ o (x) != f", witness)
        if not homs.contains(f.a.ravel()):
            return Report(False, "universal", "factorisation is not a difference map", witness)
        factorizations.append(f)
    # uniqueness: a hom vanishing on pure tensors is zero (projection is onto)
    if t.result.dim and Subspace.span(t.projection.a.T, t.result.dim, p).dim != t.result.dim:
        return Report(False, "universal", "pure tensors do not span", witness)
    rep = Report(True, "universal", "", witness)
    rep.factorizations = factorizations
    return rep
