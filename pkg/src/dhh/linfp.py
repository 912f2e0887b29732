"""Exact linear algebra over a prime field F_p.

Matrices act on column vectors.  Subspaces are stored by a basis of row
vectors in reduced row-echelon form, so equal subspaces compare equal
entry by entry.  For p = 2 the row reduction runs on rows packed into
64-bit words.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContainmentViolation, ShapeMismatch

MAX_PRIME = 251


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    q = 2
    while q * q <= p:
        if p % q == 0:
            return False
        q += 1
    return True


def _check_prime(p):
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus {p!r} is not a prime")
    if p > MAX_PRIME:
        raise ValueError(f"prime {p} exceeds the supported bound {MAX_PRIME}")


def _mulmod(a, b, p):
    # float64 BLAS is exact here: every partial sum stays below 2**53
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return np.remainder(prod, p).astype(np.int64)


class Matrix:
    """An immutable rows x cols matrix with entries in F_p."""

    __slots__ = ("a", "p")

    def __init__(self, entries, p: int):
        _check_prime(p)
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else np.zeros((0, 0), dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeMismatch(f"expected a 2-d array, got shape {arr.shape}")
        arr %= p
        arr.setflags(write=False)
        self.a = arr
        self.p = int(p)

    @classmethod
    def _wrap(cls, arr, p):
        # trusted constructor: arr already reduced mod p and 2-d
        m = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        m.a = arr
        m.p = p
        return m

    @classmethod
    def zeros(cls, rows, cols, p):
        _check_prime(p)
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n, p):
        _check_prime(p)
        return cls._wrap(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_columns(cls, columns, p, rows=None):
        columns = [np.asarray(c, dtype=np.int64) for c in columns]
        if not columns:
            return cls.zeros(rows or 0, 0, p)
        return cls(np.stack(columns, axis=1), p)

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def _coerce(self, other):
        if isinstance(other, Matrix):
            if other.p != self.p:
                raise ShapeMismatch(f"moduli differ: {self.p} vs {other.p}")
            return other.a
        return np.asarray(other, dtype=np.int64) % self.p

    def __add__(self, other):
        b = self._coerce(other)
        if b.shape != self.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {b.shape}")
        return Matrix._wrap((self.a + b) % self.p, self.p)

    def __sub__(self, other):
        b = self._coerce(other)
        if b.shape != self.shape:
            raise ShapeMismatch(f"cannot subtract {b.shape} from {self.shape}")
        return Matrix._wrap((self.a - b) % self.p, self.p)

    def __neg__(self):
        return Matrix._wrap((-self.a) % self.p, self.p)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if other.p != self.p:
                raise ShapeMismatch(f"moduli differ: {self.p} vs {other.p}")
            if self.cols != other.rows:
                raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
            return Matrix._wrap(_mulmod(self.a, other.a, self.p), self.p)
        v = np.asarray(other, dtype=np.int64)
        if v.ndim == 1:
            if v.shape[0] != self.cols:
                raise ShapeMismatch(f"cannot apply {self.shape} to vector of length {v.shape[0]}")
            return _mulmod(self.a, v.reshape(-1, 1), self.p).ravel()
        if v.shape[0] != self.cols:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {v.shape}")
        return _mulmod(self.a, v % self.p, self.p)

    def scale(self, c):
        return Matrix._wrap((self.a * (int(c) % self.p)) % self.p, self.p)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Matrix(p={self.p}, {self.a.tolist()})"

    @property
    def T(self):
        return Matrix._wrap(self.a.T, self.p)

    def tolist(self):
        return self.a.tolist()

    def is_zero(self):
        return not self.a.any()

    def is_square(self):
        return self.rows == self.cols

    def kron(self, other):
        return Matrix._wrap(np.kron(self.a, self._coerce(other)) % self.p, self.p)

    def power(self, e):
        if not self.is_square():
            raise ShapeMismatch("power of a non-square matrix")
        result = Matrix.identity(self.rows, self.p)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def column(self, j):
        return self.a[:, j].copy()

    def rank(self):
        return rank(self)

    def inverse(self):
        return inverse(self)

    def is_invertible(self):
        return self.is_square() and rank(self) == self.rows


def hstack(blocks, p=None):
    blocks = list(blocks)
    p = p if p is not None else blocks[0].p
    return Matrix._wrap(np.hstack([b.a for b in blocks]), p)


def vstack(blocks, p=None):
    blocks = list(blocks)
    p = p if p is not None else blocks[0].p
    return Matrix._wrap(np.vstack([b.a for b in blocks]), p)


def block_diag(blocks, p):
    blocks = list(blocks)
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i:i + b.rows, j:j + b.cols] = b.a
        i += b.rows
        j += b.cols
    return Matrix._wrap(out, p)


# ---------------------------------------------------------------- elimination


def _echelon_modp(a, p, reduced=True):
    a = np.array(a, dtype=np.int64)
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        piv = int(a[r, c])
        if piv != 1:
            a[r, c:] = (a[r, c:] * pow(piv, p - 2, p)) % p
        lo = 0 if reduced else r + 1
        col = a[lo:, c]
        hit = np.flatnonzero(col) + lo
        hit = hit[hit != r]
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(a[hit, c], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _pack(a):
    nrows, ncols = a.shape
    words = max(1, (ncols + 63) // 64)
    padded = np.zeros((nrows, words * 64), dtype=np.uint8)
    padded[:, :ncols] = a
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(nrows, words)


def _unpack(packed, ncols):
    nrows = packed.shape[0]
    if nrows == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    bytes_ = np.ascontiguousarray(packed).view(np.uint8).reshape(nrows, -1)
    bits = np.unpackbits(bytes_, axis=1, bitorder="little")[:, :ncols]
    return bits.astype(np.int64)


def _echelon_gf2(a, reduced=True):
    nrows, ncols = a.shape
    w = _pack(np.asarray(a, dtype=np.uint8) & 1)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        word, bit = divmod(c, 64)
        bit = np.uint64(bit)
        colbits = (w[r:, word] >> bit) & np.uint64(1)
        nz = np.flatnonzero(colbits)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            w[[r, i]] = w[[i, r]]
        lo = 0 if reduced else r + 1
        hit = np.flatnonzero((w[lo:, word] >> bit) & np.uint64(1)) + lo
        hit = hit[hit != r]
        if hit.size:
            w[hit, word:] ^= w[r, word:]
        pivots.append(c)
        r += 1
    return _unpack(w[:r], ncols), pivots


def echelon(m: Matrix, reduced=True, method="auto"):
    """Row-reduce ``m``; returns (nonzero rows as ndarray, pivot columns).

    ``method`` is "auto", "generic" or "packed" (p = 2 only).
    """
    if m.rows == 0 or m.cols == 0:
        return np.zeros((0, m.cols), dtype=np.int64), []
    if method == "packed" or (method == "auto" and m.p == 2):
        if m.p != 2:
            raise ValueError("bit-packed elimination needs p = 2")
        return _echelon_gf2(m.a, reduced)
    return _echelon_modp(m.a, m.p, reduced)


def rref(m: Matrix, method="auto"):
    rows, pivots = echelon(m, True, method)
    return Matrix._wrap(rows, m.p), pivots


def rank(m: Matrix, method="auto") -> int:
    return len(echelon(m, False, method)[1])


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise ShapeMismatch("inverse of a non-square matrix")
    n = m.rows
    aug = np.hstack([m.a, np.eye(n, dtype=np.int64)])
    red, piv = echelon(Matrix._wrap(aug, m.p))
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    return Matrix._wrap(red[:n, n:], m.p)


def solve(m: Matrix, b) -> np.ndarray | None:
    """One solution x of m x = b, or None when b is not in the column space."""
    b = np.asarray(b, dtype=np.int64) % m.p
    aug = np.hstack([m.a, b.reshape(-1, 1)])
    red, piv = echelon(Matrix._wrap(aug, m.p))
    if piv and piv[-1] == m.cols:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = red[i, -1]
    return x


# ------------------------------------------------------------------ subspaces


class Subspace:
    """A subspace of F_p^n given by a canonical RREF basis (as rows)."""

    __slots__ = ("ambient_dim", "p", "basis", "pivots")

    def __init__(self, basis_rref: np.ndarray, pivots, ambient_dim, p):
        self.ambient_dim = int(ambient_dim)
        self.p = int(p)
        b = np.ascontiguousarray(basis_rref, dtype=np.int64).reshape(len(pivots), self.ambient_dim)
        b.setflags(write=False)
        self.basis = b
        self.pivots = list(pivots)

    @classmethod
    def span(cls, vectors, ambient_dim, p):
        if ambient_dim == 0:
            return cls.zero(0, p)
        vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient_dim)
        if not len(vecs):
            return cls.zero(ambient_dim, p)
        rows, piv = echelon(Matrix(vecs, p))
        return cls(rows, piv, ambient_dim, p)

    @classmethod
    def zero(cls, n, p):
        return cls(np.zeros((0, n), dtype=np.int64), [], n, p)

    @classmethod
    def full(cls, n, p):
        return cls(np.eye(n, dtype=np.int64), list(range(n)), n, p)

    @property
    def dim(self):
        return len(self.pivots)

    def matrix(self):
        """Basis vectors as the columns of an ambient_dim x dim matrix."""
        return Matrix._wrap(self.basis.T, self.p)

    def reduce(self, v):
        """Remainder of v (or of each row of a 2-d v) modulo this subspace."""
        v = np.array(v, dtype=np.int64) % self.p
        if not self.pivots:
            return v
        single = v.ndim == 1
        vv = v.reshape(1, -1) if single else v
        coeff = vv[:, self.pivots]
        vv = (vv - _mulmod(coeff, self.basis, self.p)) % self.p
        return vv.ravel() if single else vv

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def coords(self, v):
        """Coordinates of v (or rows of v) in the RREF basis; v must lie inside."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.reduce(v).any():
            raise ContainmentViolation("vector does not lie in the subspace")
        return v[..., self.pivots]

    def is_subspace_of(self, other: Subspace) -> bool:
        return self.dim == 0 or not other.reduce(self.basis).any()

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.p == other.p and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots and np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"

    def __add__(self, other):
        return Subspace.span(np.vstack([self.basis, other.basis]), self.ambient_dim, self.p)

    def intersect(self, other: Subspace) -> Subspace:
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.p)
        stacked = np.hstack([self.basis.T, (-other.basis.T) % self.p])
        ker = kernel_basis(Matrix._wrap(stacked % self.p, self.p))
        coeff = ker.basis[:, :self.dim]
        return Subspace.span(_mulmod(coeff, self.basis, self.p), self.ambient_dim, self.p)

    def image_under(self, m: Matrix) -> Subspace:
        if self.dim == 0:
            return Subspace.zero(m.rows, self.p)
        return Subspace.span(_mulmod(m.a, self.basis.T, self.p).T, m.rows, self.p)

    def is_stable(self, m: Matrix) -> bool:
        return self.image_under(m).is_subspace_of(self)


def kernel_basis(m: Matrix) -> Subspace:
    """Null space {v : m v = 0} as a canonical subspace."""
    n = m.cols
    if n == 0:
        return Subspace.zero(0, m.p)
    if m.is_zero():
        return Subspace.full(n, m.p)
    red, piv = echelon(m)
    free = [c for c in range(n) if c not in set(piv)]
    if not free:
        return Subspace.zero(n, m.p)
    vecs = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        vecs[k, piv] = (-red[:, f]) % m.p
    return Subspace.span(vecs, n, m.p)


def image(m: Matrix) -> Subspace:
    """Column space of m."""
    if m.cols == 0:
        return Subspace.zero(m.rows, m.p)
    return Subspace.span(m.a.T, m.rows, m.p)


# ---------------------------------------------------------------- subquotient


@dataclass(frozen=True)
class Subquotient:
    """cocycles / coboundaries with canonical lifts of a complement basis."""

    cocycles: Subspace
    coboundaries: Subspace
    lifts: np.ndarray      # dim x ambient, rows in RREF, zero on coboundary pivots
    lift_pivots: list

    @property
    def dim(self):
        return len(self.lift_pivots)

    @property
    def ambient_dim(self):
        return self.cocycles.ambient_dim

    @property
    def p(self):
        return self.cocycles.p

    def lift_matrix(self) -> Matrix:
        """Lifts as the columns of an ambient x dim matrix."""
        return Matrix._wrap(self.lifts.T, self.p)

    def coords(self, v):
        """Class coordinates of a cocycle v (or of each row of a 2-d v)."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.cocycles.reduce(v).any():
            raise ContainmentViolation("vector is not a cocycle")
        r = self.coboundaries.reduce(v)
        return r[..., self.lift_pivots]

    def induced(self, op: Matrix) -> Matrix:
        """Matrix of the map induced by op (ambient -> ambient) on the quotient."""
        if self.dim == 0:
            return Matrix.zeros(0, 0, self.p)
        images = _mulmod(op.a, self.lifts.T, self.p).T
        return Matrix._wrap(self.coords(images).T, self.p)


def subquotient(cocycles: Subspace, coboundaries: Subspace) -> Subquotient:
    if not coboundaries.is_subspace_of(cocycles):
        raise ContainmentViolation("coboundaries are not contained in cocycles")
    if cocycles.dim == 0:
        return Subquotient(cocycles, coboundaries, np.zeros((0, cocycles.ambient_dim), dtype=np.int64), [])
    reduced = coboundaries.reduce(cocycles.basis)
    red = Subspace.span(reduced, cocycles.ambient_dim, cocycles.p)
    return Subquotient(cocycles, coboundaries, red.basis, red.pivots)


def quotient_space(n, sub: Subspace, p) -> Subquotient:
    return subquotient(Subspace.full(n, p), sub)
