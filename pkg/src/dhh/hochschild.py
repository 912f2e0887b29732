"""Internal Hochschild cochains, the bar resolution and low-degree formulas.

Cochains of degree n are k-linear maps G : A^{(x)n} -> M, stored as
flattened M.dim x q_n matrices (q_n the F_p-dimension of A^{(x)n}).  Every
face is an operator of the form G -> X G Y, so a face becomes the Kronecker
product X (x) Y^T on flattened cochains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .diffmod import (Bimodule, DiffAlgebra, DiffModule, Report, commutant_space,
                      hom_k, SubquotientModule, subquotient_module)
from .errors import ContainmentViolation, DegreeOverflow
from .ihom import _left_right, carrier_module, require_inversive
from .linfp import Matrix, Subspace, _mulmod, image, kernel_basis, subquotient, rank
from .tensorcat import compress, contraction, dim_cap, raw_contraction, tower


# --------------------------------------------------------------- complexes


@dataclass
class CochainComplex:
    """C^0 -> C^1 -> ... -> C^T.

    ``bounded`` means C^{T+1} = 0, so cohomology is meaningful in every
    degree 0..T.  A truncated complex (bounded=False) only gives H^0..H^{T-1}.
    """

    terms: list
    differentials: list
    provenance: str = "abstract"
    bounded: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def top(self):
        return len(self.terms) - 1

    @property
    def valid_top(self):
        return self.top if self.bounded else self.top - 1

    @property
    def p(self):
        return self.terms[0].p

    def d(self, n) -> Matrix:
        """d^n : C^n -> C^{n+1}, with zero maps outside the stored range."""
        if 0 <= n < len(self.differentials):
            return self.differentials[n]
        rows = self.terms[n + 1].dim if 0 <= n + 1 <= self.top else 0
        cols = self.terms[n].dim if 0 <= n <= self.top else 0
        return Matrix.zeros(rows, cols, self.p)

    def dim(self, n):
        return self.terms[n].dim if 0 <= n <= self.top else 0

    def check(self) -> Report:
        for n in range(len(self.differentials) - 1):
            if not (self.differentials[n + 1] @ self.differentials[n]).is_zero():
                return Report(False, "complex", "d d != 0", {"n": n})
        for n, d in enumerate(self.differentials):
            src, tgt = self.terms[n], self.terms[n + 1]
            if d @ src.sigma != tgt.sigma @ d:
                return Report(False, "complex", "d does not commute with sigma", {"n": n})
            for i, (a, b) in enumerate(zip(src.act, tgt.act)):
                if d @ a != b @ d:
                    return Report(False, "complex", "d is not k-linear", {"n": n, "i": i})
        return Report(True, "complex")


@dataclass
class Degree:
    n: int
    module: SubquotientModule
    dim: int
    fix_dim: int
    coinv_dim: int

    @property
    def sq(self):
        return self.module.sq


@dataclass
class CohomologyReport:
    complex: CochainComplex
    degrees: list

    @property
    def dims(self):
        return [g.dim for g in self.degrees]

    @property
    def fix_dims(self):
        return [g.fix_dim for g in self.degrees]

    @property
    def coinv_dims(self):
        return [g.coinv_dim for g in self.degrees]

    def __getitem__(self, n) -> Degree:
        return self.degrees[n]


def cocycles(c: CochainComplex, n) -> Subspace:
    return kernel_basis(c.d(n))


def coboundaries(c: CochainComplex, n) -> Subspace:
    if n == 0:
        return Subspace.zero(c.dim(0), c.p)
    return image(c.d(n - 1))


def cohomology(c: CochainComplex, top=None, check_stable=True) -> CohomologyReport:
    top = c.valid_top if top is None else top
    out = []
    for n in range(top + 1):
        Z, B = cocycles(c, n), coboundaries(c, n)
        if check_stable:
            mod = subquotient_module(Z, B, c.terms[n], name=f"H^{n}")
        else:
            mod = SubquotientModule(c.terms[n], subquotient(Z, B), name=f"H^{n}")
        s = mod.sigma
        r = rank(s - Matrix.identity(s.rows, s.p)) if mod.dim else 0
        out.append(Degree(n, mod, mod.dim, mod.dim - r, mod.dim - r))
    return CohomologyReport(c, out)


# ------------------------------------------------------------ Hochschild


def _kron_op(X: np.ndarray, Y: np.ndarray, p) -> np.ndarray:
    # flattened G -> X G Y is kron(X, Y^T)
    return np.kron(X, Y.T) % p


def face_operators(A: DiffAlgebra, M: Bimodule, n: int):
    """The n+2 cofaces on flattened cochains of degree n, as ambient matrices."""
    p, a, m = A.p, A.dim, M.dim
    tw = tower(A)
    src, tgt = tw.get(n), tw.get(n + 1)
    if n == 0:
        pi = A.ring.unit.reshape(-1, 1)            # the unit k-point of A^{(x)0} = k
    else:
        pi = src.P()
    s = tgt.S()
    first = [_mulmod(pi, s[j * a ** n:(j + 1) * a ** n], p) for j in range(a)]
    last = [_mulmod(pi, s[j::a], p) for j in range(a)]
    ops = [sum(_kron_op(M.left[j].a, first[j], p) for j in range(a)) % p]
    eye_m = np.eye(m, dtype=np.int64)
    for i in range(1, n + 1):
        ops.append(_kron_op(eye_m, contraction(A, n, i).a, p))
    ops.append(sum(_kron_op(M.right[j].a, last[j], p) for j in range(a)) % p)
    return ops


def cochain_space(A: DiffAlgebra, M: Bimodule, n: int) -> Subspace:
    q = tower(A).get(n).module
    return hom_k(q, M.module)


def hochschild_complex(A: DiffAlgebra, M: Bimodule, max_degree: int = 4, keep_faces=False):
    """C[A; M] in degrees 0..D+1, so that H^0..H^D are exact."""
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    require_inversive(A.ring, A.module, M.module)
    p, m = A.p, M.dim
    tw = tower(A)
    top = max_degree + 1
    spaces, terms = [], []
    for n in range(top + 1):
        Q = tw.get(n).module
        space = hom_k(Q, M.module)
        acts = [_left_right(m, Q.dim, X=a.a, p=p) for a in M.module.act]
        sig = _left_right(m, Q.dim, X=M.sigma.a, Y=tw.sigma_inv(n), p=p)
        terms.append(carrier_module(space, A.ring, acts, sig, name=f"C^{n}"))
        spaces.append(space)
    diffs, faces = [], {}
    for n in range(top):
        ops = face_operators(A, M, n)
        total = np.zeros_like(ops[0])
        for i, op in enumerate(ops):
            total += op if i % 2 == 0 else -op
            if keep_faces:
                faces[(n, i)] = _restrict_between(op % p, spaces[n], spaces[n + 1])
        diffs.append(_restrict_between(total % p, spaces[n], spaces[n + 1]))
    c = CochainComplex(terms, diffs, provenance="hochschild", bounded=False,
                       meta={"algebra": A, "bimodule": M, "max_degree": max_degree, "spaces": spaces})
    for n in range(top - 1):
        if not (diffs[n + 1] @ diffs[n]).is_zero():
            raise ContainmentViolation(f"d^{n + 1} d^{n} != 0")
    if keep_faces:
        c.meta["faces"] = faces
    return c


def _restrict_between(op: np.ndarray, src: Subspace, tgt: Subspace) -> Matrix:
    p = src.p
    if src.dim == 0 or tgt.dim == 0:
        return Matrix.zeros(tgt.dim, src.dim, p)
    img = _mulmod(src.basis, op.T, p)          # rows: images of the basis
    return Matrix._wrap(tgt.coords(img).T, p)


def cochain_to_module(c: CochainComplex, v) -> np.ndarray:
    """Degree-0 cochain (carrier coordinates) -> the element G(1) of M."""
    space = c.meta["spaces"][0]
    A = c.meta["algebra"]
    G = (np.asarray(v) @ space.basis % c.p).reshape(c.meta["bimodule"].dim, -1)
    return G @ A.ring.unit % c.p


# -------------------------------------------------------- low degree direct


def hh0_chain(A: DiffAlgebra, M: Bimodule) -> list:
    """The descending chain S_j = {m : a sigma^i(m) = sigma^i(m) a, i <= j} until it stabilises."""
    require_inversive(M.module)
    p = M.p
    K = Matrix(np.vstack([(l.a - r.a) % p for l, r in zip(M.left, M.right)]), p)
    chain = [kernel_basis(K)]
    power = M.sigma
    while True:
        nxt = chain[-1].intersect(kernel_basis(K @ power))
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)
        power = power @ M.sigma


def hh0_direct(A: DiffAlgebra, M: Bimodule) -> Subspace:
    """{m : a sigma^i(m) = sigma^i(m) a for all a and all i >= 0} inside M."""
    return hh0_chain(A, M)[-1]


def hh0_from_complex(c: CochainComplex) -> Subspace:
    """ker d^0, transported to M through G -> G(1)."""
    Z = cocycles(c, 0)
    m = c.meta["bimodule"].dim
    if Z.dim == 0:
        return Subspace.zero(m, c.p)
    return Subspace.span(np.array([cochain_to_module(c, z) for z in Z.basis]), m, c.p)


@dataclass
class Derivations:
    inner: Subspace       # flattened m x a matrices
    all: Subspace
    quotient_dim: int


def derivations(A: DiffAlgebra, M: Bimodule) -> Derivations:
    """k-linear f with f(ab) = a f(b) + f(a) b, and the inner ones a -> a m - m a."""
    require_inversive(A.ring, A.module, M.module)
    p, a, m = A.p, A.dim, M.dim
    rows = []
    eye = np.eye(a, dtype=np.int64)
    for i in range(a):
        for j in range(a):
            # coefficient matrix of F -> F(e_i e_j) - e_i F(e_j) - F(e_i) e_j
            block = np.kron(np.eye(m, dtype=np.int64), A.mult[i, j].reshape(1, -1))
            block = block - np.kron(M.left[i].a, eye[j].reshape(1, -1))
            block = block - np.kron(M.right[j].a, eye[i].reshape(1, -1))
            rows.append(block % p)
    leibniz = kernel_basis(Matrix(np.vstack(rows), p))
    klin = hom_k(A.module, M.module)
    alld = leibniz.intersect(klin)
    inner_vecs = []
    for t in range(m):
        mv = np.zeros(m, dtype=np.int64)
        mv[t] = 1
        F = np.stack([(M.left[j] @ mv - M.right[j] @ mv) % p for j in range(a)], axis=1)
        inner_vecs.append(F.ravel())
    inner = Subspace.span(np.array(inner_vecs), m * a, p)
    return Derivations(inner, alld, alld.dim - inner.dim)


# -------------------------------------------------------------- bar complex


def _sp_mod(m, p):
    m = sparse.csr_matrix(m)
    m.data %= p
    m.eliminate_zeros()
    return m


def _sp_is_zero(m, p):
    return _sp_mod(m, p).nnz == 0


@dataclass
class BarComplex:
    """A <- A^{(x)2} <- A^{(x)3} <- ...; index n holds A^{(x)n+2}, n >= -1.

    Maps are scipy sparse matrices (entries reduced mod p).
    """

    algebra: DiffAlgebra
    dims: dict         # n -> F_p-dimension of B_n
    d: dict            # n -> d'_n : B_n -> B_{n-1}, n >= 0 (d'_0 = mu)
    h: dict            # n -> h_n : B_n -> B_{n+1}, x -> 1 (x) x, n >= -1
    faces: dict        # (n, i) -> delta'_i : B_n -> B_{n-1}
    max_degree: int

    @property
    def mu(self):
        return self.d[0]

    def envelope_action(self, n, x, y):
        """(x (x) y) on B_n: left multiplication on the first factor, right on the last."""
        A = self.algebra
        a, p = A.dim, A.p
        mid = sparse.identity(a ** n, dtype=np.int64, format="csr")
        raw = sparse.kron(sparse.kron(sparse.csr_matrix(A.left(x).a), mid), sparse.csr_matrix(A.right(y).a))
        return _sp_mod(compress(A, raw, n + 2, n + 2) if not tower(A).free else raw, p)

    def check(self, top=None) -> Report:
        A, p = self.algebra, self.algebra.p
        top = self.max_degree if top is None else top
        for n in range(1, top + 1):
            if not _sp_is_zero(self.d[n - 1] @ self.d[n], p):
                return Report(False, "bar", "d' d' != 0", {"n": n})
        for n in range(0, top + 1):
            lhs = self.d[n + 1] @ self.h[n] + self.h[n - 1] @ self.d[n]
            if not _sp_is_zero(lhs - sparse.identity(self.dims[n], dtype=np.int64), p):
                return Report(False, "bar", "d' h + h d' != id", {"n": n})
        if not _sp_is_zero(self.d[0] @ self.h[-1] - sparse.identity(A.dim, dtype=np.int64), p):
            return Report(False, "bar", "mu h_{-1} != id")
        # mu(a (x) 1) = a as well
        right_unit = sparse.kron(sparse.identity(A.dim, dtype=np.int64), sparse.csr_matrix(A.unit.reshape(-1, 1)))
        if not tower(A).free:
            right_unit = compress(A, right_unit, 2, 1)
        if not _sp_is_zero(self.d[0] @ right_unit - sparse.identity(A.dim, dtype=np.int64), p):
            return Report(False, "bar", "mu(a (x) 1) != a")
        return Report(True, "bar")

    def face_identity(self, n) -> bool:
        """delta'_i delta'_j = delta'_{j-1} delta'_i for i < j, as maps B_n -> B_{n-2}."""
        p = self.algebra.p
        for j in range(n + 1):
            for i in range(j):
                lhs = self.faces[(n - 1, i)] @ self.faces[(n, j)]
                rhs = self.faces[(n - 1, j - 1)] @ self.faces[(n, i)]
                if not _sp_is_zero(lhs - rhs, p):
                    return False
        return True


def bar_complex(A: DiffAlgebra, max_degree: int = 4) -> BarComplex:
    """Bar resolution up to B_{D+1}, enough to test the homotopy through degree D."""
    p, a = A.p, A.dim
    tw = tower(A)
    top = max_degree + 1
    if a ** (top + 2) > dim_cap():
        raise DegreeOverflow(f"bar term A^(x){top + 2} exceeds the dimension cap")
    dims = {}
    for n in range(-1, top + 1):
        dims[n] = a ** (n + 2) if tw.free else tw.get(n + 2).module.dim
    d, h, faces = {}, {}, {}
    for n in range(0, top + 1):
        total = None
        for i in range(n + 1):
            f = _sp_mod(compress(A, raw_contraction(A, n + 1, i + 1), n + 1, n + 2), p)
            faces[(n, i)] = f
            total = f if total is None else (total + f if i % 2 == 0 else total - f)
        d[n] = _sp_mod(total, p)
    unit = sparse.csr_matrix(A.unit.reshape(-1, 1))
    for n in range(-1, top):
        raw = sparse.kron(unit, sparse.identity(a ** (n + 2), dtype=np.int64), format="csr")
        h[n] = _sp_mod(compress(A, raw, n + 3, n + 2), p)
    return BarComplex(A, dims, d, h, faces, max_degree)


def bar_hom_complex(A: DiffAlgebra, M: Bimodule, max_degree: int) -> CochainComplex:
    """Difference A^e-linear maps B_n -> M with phi -> phi d'_{n+1}.

    Computed straight from the bar resolution; used to cross-check the Fix
    of the Hochschild complex.
    """
    bar = bar_complex(A, max_degree)
    tw = tower(A)
    p, m = A.p, M.dim
    spaces = []
    for n in range(max_degree + 2):
        sig = tw.get(n + 2).module.sigma
        pairs = [(Matrix(bar.envelope_action(n, A.basis(i), A.unit).toarray(), p), M.left[i])
                 for i in range(A.dim)]
        pairs += [(Matrix(bar.envelope_action(n, A.unit, A.basis(i)).toarray(), p), M.right[i])
                  for i in range(A.dim)]
        pairs.append((sig, M.sigma))
        spaces.append(commutant_space(pairs, m, bar.dims[n], p))
    diffs = []
    for n in range(max_degree + 1):
        dn = bar.d[n + 1].toarray()        # B_{n+1} -> B_n
        op = _kron_op(np.eye(m, dtype=np.int64), dn, p)
        diffs.append(_restrict_between(op, spaces[n], spaces[n + 1]))
    terms = [_plain_module(S.dim, p) for S in spaces]
    return CochainComplex(terms, diffs, provenance="bar", bounded=False)


def _plain_module(dim, p) -> DiffModule:
    from .diffmod import prime_field
    k = prime_field(p)
    eye = Matrix.identity(dim, p)
    return DiffModule(k, [eye], eye)
