"""Finite difference rings, modules, algebras and bimodules over F_p.

Every object is presented on an F_p-basis.  Structure constants are stored
as an array ``mult[i, j, :]`` holding the coordinates of ``e_i * e_j``;
linear maps are matrices acting on column vectors, so ``sigma[:, j]`` is
the image of ``e_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import StabilityViolation
from .linfp import Matrix, Subspace, kernel_basis, image, subquotient


def _mats(ms, p):
    return tuple(m if isinstance(m, Matrix) else Matrix(m, p) for m in ms)


@dataclass
class Report:
    """Outcome of a validation: ok, or the first failing identity."""

    ok: bool
    kind: str
    failure: str = ""
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"{self.kind}: pass"
        return f"{self.kind}: FAIL {self.failure} {self.witness}"


def _fail(kind, what, **witness):
    return Report(False, kind, what, {k: np.asarray(v).tolist() if hasattr(v, "__len__") else v
                                       for k, v in witness.items()})


# -------------------------------------------------------------- multiplication


def left_mult_matrix(mult, x, p):
    """Matrix of y -> x*y for structure constants ``mult``."""
    return Matrix(np.einsum("i,ijk->kj", np.asarray(x, dtype=np.int64), mult), p)


def right_mult_matrix(mult, x, p):
    """Matrix of y -> y*x."""
    return Matrix(np.einsum("j,ijk->ki", np.asarray(x, dtype=np.int64), mult), p)


def multiply(mult, x, y, p):
    return np.einsum("i,j,ijk->k", np.asarray(x, dtype=np.int64),
                     np.asarray(y, dtype=np.int64), mult) % p


def mult_matrix(mult, p) -> Matrix:
    """The multiplication as a linear map V (x) V -> V (Kronecker ordering)."""
    d = mult.shape[0]
    return Matrix(mult.reshape(d * d, d).T, p)


def _check_assoc_unit(kind, mult, unit, p, commutative=False):
    d = mult.shape[0]
    eye = np.eye(d, dtype=np.int64)
    for i in range(d):
        if not np.array_equal(multiply(mult, unit, eye[i], p), eye[i]):
            return _fail(kind, "left unit law 1*e_i = e_i", i=i)
        if not np.array_equal(multiply(mult, eye[i], unit, p), eye[i]):
            return _fail(kind, "right unit law e_i*1 = e_i", i=i)
    # (e_i e_j) e_l = e_i (e_j e_l), vectorised over all triples
    lhs = np.einsum("ijm,mlk->ijlk", mult, mult) % p
    rhs = np.einsum("jlm,imk->ijlk", mult, mult) % p
    bad = np.argwhere((lhs != rhs).any(axis=-1))
    if bad.size:
        i, j, l = bad[0]
        return _fail(kind, "associativity (e_i e_j) e_l = e_i (e_j e_l)", i=int(i), j=int(j), l=int(l))
    if commutative:
        bad = np.argwhere((mult != mult.transpose(1, 0, 2)).any(axis=-1))
        if bad.size:
            i, j = bad[0]
            return _fail(kind, "commutativity e_i e_j = e_j e_i", i=int(i), j=int(j))
    return None


def _check_sigma_mult(kind, mult, unit, sigma, p):
    s = sigma.a
    if not np.array_equal(sigma @ unit, np.asarray(unit) % p):
        return _fail(kind, "sigma(1) = 1", sigma_of_unit=sigma @ unit, unit=unit)
    lhs = np.einsum("ijm,km->ijk", mult, s) % p                       # sigma(e_i e_j)
    rhs = np.einsum("ai,bj,abk->ijk", s, s, mult) % p                 # sigma(e_i) sigma(e_j)
    bad = np.argwhere((lhs != rhs).any(axis=-1))
    if bad.size:
        i, j = bad[0]
        return _fail(kind, "sigma multiplicative: sigma(e_i e_j) = sigma(e_i) sigma(e_j)",
                     i=int(i), j=int(j), lhs=lhs[i, j], rhs=rhs[i, j])
    return None


# ----------------------------------------------------------------------- ring


class DiffRing:
    """Commutative ring k, finite-dimensional over F_p, with endomorphism sigma."""

    def __init__(self, p, mult, unit, sigma, name=""):
        self.p = int(p)
        self.mult = np.asarray(mult, dtype=np.int64) % self.p
        self.dim = self.mult.shape[0]
        self.unit = np.asarray(unit, dtype=np.int64) % self.p
        self.sigma = sigma if isinstance(sigma, Matrix) else Matrix(sigma, self.p)
        self.name = name
        self._regular = None

    def __repr__(self):
        return f"DiffRing({self.name or '?'}, p={self.p}, dim={self.dim})"

    @property
    def inversive(self):
        return self.sigma.is_invertible()

    def mul(self, x, y):
        return multiply(self.mult, x, y, self.p)

    def left(self, x) -> Matrix:
        return left_mult_matrix(self.mult, x, self.p)

    def basis(self, i):
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    def regular_module(self) -> DiffModule:
        """k as a module over itself."""
        if self._regular is None:
            acts = [self.left(self.basis(i)) for i in range(self.dim)]
            self._regular = DiffModule(self, acts, self.sigma, name=self.name or "k")
        return self._regular

    def validate(self) -> Report:
        kind = "DiffRing"
        if self.mult.shape != (self.dim, self.dim, self.dim) or self.unit.shape != (self.dim,):
            return _fail(kind, "structure constant shape")
        if self.sigma.shape != (self.dim, self.dim):
            return _fail(kind, "sigma shape")
        r = _check_assoc_unit(kind, self.mult, self.unit, self.p, commutative=True)
        if r is None:
            r = _check_sigma_mult(kind, self.mult, self.unit, self.sigma, self.p)
        return Report(True, kind) if r is None else r

    def fixed_subring(self) -> tuple[DiffRing, Matrix]:
        """Fix(k) with sigma = id, and its inclusion matrix into k."""
        sub = kernel_basis(self.sigma - Matrix.identity(self.dim, self.p))
        inc = sub.matrix()
        n = sub.dim
        mult = np.zeros((n, n, n), dtype=np.int64)
        for i, j in product(range(n), range(n)):
            mult[i, j] = sub.coords(self.mul(sub.basis[i], sub.basis[j]))
        unit = sub.coords(self.unit)
        return DiffRing(self.p, mult, unit, Matrix.identity(n, self.p), name=f"Fix({self.name})"), inc


def prime_field(p, name=None) -> DiffRing:
    return DiffRing(p, np.ones((1, 1, 1), dtype=np.int64), [1], [[1]], name=name or f"F{p}")


# --------------------------------------------------------------------- module


class DiffModule:
    """Difference k-module: act[i] is the action of the k-basis element e_i."""

    def __init__(self, ring: DiffRing, act, sigma, name=""):
        self.ring = ring
        self.p = ring.p
        self.act = _mats(act, self.p)
        self.sigma = sigma if isinstance(sigma, Matrix) else Matrix(sigma, self.p)
        self.dim = self.sigma.rows
        self.name = name

    def __repr__(self):
        return f"DiffModule({self.name or '?'}, dim={self.dim}, over {self.ring!r})"

    @property
    def inversive(self):
        return self.sigma.is_invertible()

    def action(self, lam) -> Matrix:
        """Action matrix of an arbitrary ring element given by coordinates."""
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for c, a in zip(np.asarray(lam) % self.p, self.act):
            if c:
                out += int(c) * a.a
        return Matrix(out, self.p)

    def validate(self) -> Report:
        kind = "DiffModule"
        k, p = self.ring, self.p
        if len(self.act) != k.dim:
            return _fail(kind, "one action matrix per ring basis element", got=len(self.act), want=k.dim)
        if any(a.shape != (self.dim, self.dim) for a in self.act) or self.sigma.shape != (self.dim, self.dim):
            return _fail(kind, "action/sigma shape")
        if self.action(k.unit) != Matrix.identity(self.dim, p):
            return _fail(kind, "act(1) = id")
        for i, j in product(range(k.dim), repeat=2):
            if self.act[i] @ self.act[j] != self.action(k.mul(k.basis(i), k.basis(j))):
                return _fail(kind, "act(e_i) act(e_j) = act(e_i e_j)", i=i, j=j)
        for i in range(k.dim):
            if self.sigma @ self.act[i] != self.action(k.sigma @ k.basis(i)) @ self.sigma:
                return _fail(kind, "semilinearity sigma(e_i m) = sigma(e_i) sigma(m)", i=i)
        return Report(True, kind)


# -------------------------------------------------------------------- algebra


class DiffAlgebra:
    """Difference k-algebra: a DiffModule with a k-bilinear multiplication."""

    def __init__(self, module: DiffModule, mult, unit, name=""):
        self.module = module
        self.ring = module.ring
        self.p = module.p
        self.mult = np.asarray(mult, dtype=np.int64) % self.p
        self.unit = np.asarray(unit, dtype=np.int64) % self.p
        self.dim = module.dim
        self.name = name or module.name

    def __repr__(self):
        return f"DiffAlgebra({self.name or '?'}, dim={self.dim}, over {self.ring!r})"

    @property
    def sigma(self):
        return self.module.sigma

    @property
    def inversive(self):
        return self.ring.inversive and self.module.inversive

    def mul(self, x, y):
        return multiply(self.mult, x, y, self.p)

    def left(self, x) -> Matrix:
        return left_mult_matrix(self.mult, x, self.p)

    def right(self, x) -> Matrix:
        return right_mult_matrix(self.mult, x, self.p)

    def basis(self, i):
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    def mult_matrix(self) -> Matrix:
        return mult_matrix(self.mult, self.p)

    def scalar(self, lam):
        """The image lam * 1_A of a ring element."""
        return self.module.action(lam) @ self.unit

    def is_commutative(self):
        return np.array_equal(self.mult, self.mult.transpose(1, 0, 2))

    def validate(self) -> Report:
        kind = "DiffAlgebra"
        r = self.module.validate()
        if not r:
            return Report(False, kind, f"underlying module: {r.failure}", r.witness)
        if self.mult.shape != (self.dim,) * 3:
            return _fail(kind, "structure constant shape")
        r = _check_assoc_unit(kind, self.mult, self.unit, self.p)
        if r is not None:
            return r
        # k-bilinearity: (l a) b = l (a b) = a (l b)
        c = self.mult
        for i, act in enumerate(self.module.act):
            L = act.a
            ab = np.einsum("jlm,km->jlk", c, L) % self.p
            la_b = np.einsum("mj,mlk->jlk", L, c) % self.p
            a_lb = np.einsum("ml,jmk->jlk", L, c) % self.p
            bad = np.argwhere(((ab != la_b) | (ab != a_lb)).any(axis=-1))
            if bad.size:
                j, l = bad[0]
                return _fail(kind, "k-bilinearity (l a) b = l (a b) = a (l b)", ring_index=i, j=int(j), l=int(l))
        r = _check_sigma_mult(kind, self.mult, self.unit, self.sigma, self.p)
        return Report(True, kind) if r is None else r


# ------------------------------------------------------------------- bimodule


class Bimodule:
    """A-bimodule M over k with left/right actions of the A-basis."""

    def __init__(self, algebra: DiffAlgebra, module: DiffModule, left, right, name=""):
        self.algebra = algebra
        self.module = module
        self.ring = module.ring
        self.p = module.p
        self.left = _mats(left, self.p)
        self.right = _mats(right, self.p)
        self.dim = module.dim
        self.name = name or module.name

    def __repr__(self):
        return f"Bimodule({self.name or '?'}, dim={self.dim}, over {self.algebra!r})"

    @property
    def sigma(self):
        return self.module.sigma

    @property
    def inversive(self):
        return self.module.inversive

    def left_action(self, a) -> Matrix:
        return _combine(self.left, a, self.dim, self.p)

    def right_action(self, a) -> Matrix:
        return _combine(self.right, a, self.dim, self.p)

    def validate(self) -> Report:
        kind = "Bimodule"
        A, p, n = self.algebra, self.p, self.dim
        r = self.module.validate()
        if not r:
            return Report(False, kind, f"underlying module: {r.failure}", r.witness)
        if len(self.left) != A.dim or len(self.right) != A.dim:
            return _fail(kind, "one action matrix per algebra basis element")
        eye = Matrix.identity(n, p)
        if self.left_action(A.unit) != eye or self.right_action(A.unit) != eye:
            return _fail(kind, "unital actions")
        for i, j in product(range(A.dim), repeat=2):
            ab = A.mul(A.basis(i), A.basis(j))
            if self.left[i] @ self.left[j] != self.left_action(ab):
                return _fail(kind, "left associativity (ab)m = a(bm)", i=i, j=j)
            if self.right[j] @ self.right[i] != self.right_action(ab):
                return _fail(kind, "right associativity m(ab) = (ma)b", i=i, j=j)
            if self.left[i] @ self.right[j] != self.right[j] @ self.left[i]:
                return _fail(kind, "left and right actions commute", i=i, j=j)
        for i in range(self.ring.dim):
            lam1 = A.scalar(self.ring.basis(i))
            if self.left_action(lam1) != self.module.act[i] or self.right_action(lam1) != self.module.act[i]:
                return _fail(kind, "k acts through left(l 1_A) = right(l 1_A) = act(l)", i=i)
        s = self.sigma
        for i in range(A.dim):
            sa = A.sigma @ A.basis(i)
            if s @ self.left[i] != self.left_action(sa) @ s:
                return _fail(kind, "sigma(a m) = sigma(a) sigma(m)", i=i)
            if s @ self.right[i] != self.right_action(sa) @ s:
                return _fail(kind, "sigma(m a) = sigma(m) sigma(a)", i=i)
        return Report(True, kind)


def _combine(mats, coeffs, n, p):
    out = np.zeros((n, n), dtype=np.int64)
    for c, m in zip(np.asarray(coeffs) % p, mats):
        if c:
            out += int(c) * m.a
    return Matrix(out, p)


def regular_bimodule(A: DiffAlgebra, twist=None, name="") -> Bimodule:
    """A as a bimodule over itself; sigma_M = left(twist) sigma_A for a central unit."""
    sigma = A.sigma if twist is None else A.left(twist) @ A.sigma
    mod = DiffModule(A.ring, A.module.act, sigma, name=name or A.name)
    lefts = [A.left(A.basis(i)) for i in range(A.dim)]
    rights = [A.right(A.basis(i)) for i in range(A.dim)]
    return Bimodule(A, mod, lefts, rights, name=name or A.name)


def dual_bimodule(A: DiffAlgebra, scale=1, name="") -> Bimodule:
    """The F_p-dual A* with (a phi b)(x) = phi(b x a) and sigma(phi) = c phi o sigma^-1."""
    sinv = A.sigma.inverse()
    sigma = sinv.T.scale(scale)
    act = [a.T for a in A.module.act]
    mod = DiffModule(A.ring, act, sigma, name=name or f"{A.name}*")
    lefts = [A.right(A.basis(i)).T for i in range(A.dim)]
    rights = [A.left(A.basis(i)).T for i in range(A.dim)]
    return Bimodule(A, mod, lefts, rights, name=name or f"{A.name}*")


def direct_sum(ms: list[Bimodule], name="") -> Bimodule:
    from .linfp import block_diag
    A = ms[0].algebra
    p = A.p
    k = A.ring
    act = [block_diag([m.module.act[i] for m in ms], p) for i in range(k.dim)]
    sigma = block_diag([m.sigma for m in ms], p)
    mod = DiffModule(k, act, sigma, name=name)
    lefts = [block_diag([m.left[i] for m in ms], p) for i in range(A.dim)]
    rights = [block_diag([m.right[i] for m in ms], p) for i in range(A.dim)]
    return Bimodule(A, mod, lefts, rights, name=name or "+".join(m.name for m in ms))


def validate(obj) -> Report:
    return obj.validate()


# ----------------------------------------------------------------------- maps

ADDITIVE, K_LINEAR, DIFFERENCE = "additive-only", "k-linear", "difference-k-linear"


@dataclass(frozen=True)
class DiffMap:
    source: DiffModule
    target: DiffModule
    matrix: Matrix
    kind: str = DIFFERENCE

    def check(self) -> Report:
        m = self.matrix
        if m.shape != (self.target.dim, self.source.dim):
            return _fail("DiffMap", "shape", shape=m.shape)
        if self.kind in (K_LINEAR, DIFFERENCE):
            for i, (a, b) in enumerate(zip(self.source.act, self.target.act)):
                if m @ a != b @ m:
                    return _fail("DiffMap", "k-linearity F act(e_i) = act(e_i) F", i=i)
        if self.kind == DIFFERENCE and m @ self.source.sigma != self.target.sigma @ m:
            return _fail("DiffMap", "sigma-equivariance F sigma = sigma F")
        return Report(True, "DiffMap")

    def __matmul__(self, other: DiffMap) -> DiffMap:
        kinds = [ADDITIVE, K_LINEAR, DIFFERENCE]
        kind = kinds[min(kinds.index(self.kind), kinds.index(other.kind))]
        return DiffMap(other.source, self.target, self.matrix @ other.matrix, kind)


def commutant_space(pairs, rows, cols, p) -> Subspace:
    """All rows x cols matrices F with F X = Y F for each (X, Y) in pairs.

    The result is a subspace of F_p^(rows*cols), F flattened row-major.
    """
    blocks = []
    eye_r = np.eye(rows, dtype=np.int64)
    eye_c = np.eye(cols, dtype=np.int64)
    for X, Y in pairs:
        if X.is_square() and Y.is_square() and _is_scalar_pair(X, Y):
            continue
        # row-major vec(F X - Y F) = (I (x) X^T - Y (x) I) vec(F)
        blocks.append((np.kron(eye_r, X.a.T) - np.kron(Y.a, eye_c)) % p)
    if not blocks:
        return Subspace.full(rows * cols, p)
    return kernel_basis(Matrix(np.vstack(blocks), p))


def _is_scalar_pair(X, Y):
    c = X.a[0, 0] if X.rows else 0
    return (np.array_equal(X.a, c * np.eye(X.rows, dtype=np.int64) % X.p)
            and np.array_equal(Y.a, c * np.eye(Y.rows, dtype=np.int64) % Y.p))


def hom_diff(m: DiffModule, n: DiffModule) -> Subspace:
    """Difference k-linear maps M -> N, as flattened n.dim x m.dim matrices."""
    if m.ring is not n.ring and m.ring.dim != n.ring.dim:
        raise ValueError("modules over different rings")
    pairs = list(zip(m.act, n.act)) + [(m.sigma, n.sigma)]
    return commutant_space(pairs, n.dim, m.dim, m.p)


def hom_k(m: DiffModule, n: DiffModule) -> Subspace:
    """k-linear (not necessarily sigma-compatible) maps M -> N, flattened."""
    return commutant_space(list(zip(m.act, n.act)), n.dim, m.dim, m.p)


def as_matrix(vec, rows, cols, p) -> Matrix:
    return Matrix(np.asarray(vec).reshape(rows, cols), p)


# ---------------------------------------------------------------- subquotients


class SubquotientModule(DiffModule):
    """coc/cob inside an ambient module, with induced actions on REF lifts."""

    def __init__(self, ambient: DiffModule, sq, name=""):
        act = [sq.induced(a) for a in ambient.act]
        sigma = sq.induced(ambient.sigma)
        if sq.dim == 0:
            act = [Matrix.zeros(0, 0, ambient.p) for _ in ambient.act]
            sigma = Matrix.zeros(0, 0, ambient.p)
        super().__init__(ambient.ring, act, sigma, name=name)
        self.ambient = ambient
        self.sq = sq

    def coords(self, v):
        return self.sq.coords(v)

    def lifts(self) -> Matrix:
        return self.sq.lift_matrix()


def subquotient_module(coc: Subspace, cob: Subspace, ambient: DiffModule, name="") -> SubquotientModule:
    for label, sub in (("cocycles", coc), ("coboundaries", cob)):
        for i, a in enumerate(ambient.act):
            if not sub.is_stable(a):
                raise StabilityViolation(f"{label} not stable under act(e_{i})")
        if not sub.is_stable(ambient.sigma):
            raise StabilityViolation(f"{label} not stable under sigma")
    return SubquotientModule(ambient, subquotient(coc, cob), name=name)


def fix_subspace(m: DiffModule) -> Subspace:
    return kernel_basis(m.sigma - Matrix.identity(m.dim, m.p))


def coinv_subspace(m: DiffModule) -> Subspace:
    """im(sigma - 1), the subspace killed by passing to coinvariants."""
    return image(m.sigma - Matrix.identity(m.dim, m.p))


def _fix_ring_actions(m: DiffModule):
    fk, inc = m.ring.fixed_subring()
    acts = [m.action(inc.column(j)) for j in range(fk.dim)]
    return fk, acts


class RestrictedModule(DiffModule):
    """A stable subspace of an ambient module with restricted structure."""

    def __init__(self, ring, ambient: DiffModule, sub: Subspace, acts, sigma, name=""):
        self.ambient = ambient
        self.sub = sub
        restricted = [_restrict(a, sub) for a in acts]
        super().__init__(ring, restricted, _restrict(sigma, sub), name=name)

    def inclusion(self) -> Matrix:
        return self.sub.matrix()

    def coords(self, v):
        return self.sub.coords(v)


def _restrict(op: Matrix, sub: Subspace) -> Matrix:
    if sub.dim == 0:
        return Matrix.zeros(0, 0, op.p)
    images = (op @ sub.basis.T).T
    return Matrix(sub.coords(images).T, op.p)


def fix_module(m: DiffModule) -> RestrictedModule:
    """Fix(M) = ker(sigma - 1) as a module over Fix(k), sigma = id."""
    fk, acts = _fix_ring_actions(m)
    sub = fix_subspace(m)
    return RestrictedModule(fk, m, sub, acts, m.sigma, name=f"Fix({m.name})")


def coinv_module(m: DiffModule) -> SubquotientModule:
    """M_sigma = M / im(sigma - 1) as a module over Fix(k)."""
    fk, acts = _fix_ring_actions(m)
    sq = subquotient(Subspace.full(m.dim, m.p), coinv_subspace(m))
    carrier = DiffModule(fk, acts, m.sigma)
    out = SubquotientModule(carrier, sq, name=f"({m.name})_sigma")
    return out


# -------------------------------------------------------- opposite, enveloping


def opposite(A: DiffAlgebra) -> DiffAlgebra:
    return DiffAlgebra(A.module, A.mult.transpose(1, 0, 2), A.unit, name=f"{A.name}^op")


def enveloping(A: DiffAlgebra):
    """A^e = A (x)_k A^op with (a (x) b)(a' (x) b') = a a' (x) b' b."""
    from .tensorcat import tensor_algebra
    return tensor_algebra(A, opposite(A), name=f"{A.name}^e")


@dataclass
class LeftModule:
    """A left module over an algebra, given by one action matrix per basis element."""

    algebra: DiffAlgebra
    module: DiffModule
    action: tuple

    def act(self, x) -> Matrix:
        return _combine(self.action, x, self.module.dim, self.module.p)


def bimodule_to_left_envelope(M: Bimodule, Ae=None) -> LeftModule:
    """Bimodule M as a left A^e-module: (a (x) b) m = a m b."""
    A = M.algebra
    Ae = Ae or enveloping(A)
    n = A.dim
    raw = [M.left[i] @ M.right[j] for i in range(n) for j in range(n)]
    section = Ae.section
    acts = []
    for q in range(Ae.algebra.dim):
        acts.append(_combine(raw, section.column(q), M.dim, M.p))
    return LeftModule(Ae.algebra, M.module, tuple(acts))


def restrict_to_k(M: Bimodule) -> DiffModule:
    return M.module
