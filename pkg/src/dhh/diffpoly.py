"""Truncated difference polynomial rings and windowed checks.

k{x} is modelled by k[x_0, ..., x_r] / (monomials of degree > d) with
sigma x_i = x_{i+1} and sigma x_r = 0.  This is a genuine ring endomorphism
of the truncated quotient.  Statements about the infinite ring are checked
on the interior window, where neither truncation is visible.
Only prime base fields are supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .diffmod import DiffRing
from .errors import DegreeOverflow, WindowTooSmall
from .linfp import Matrix, Subspace, _mulmod, image, kernel_basis, rank


def _prime(k) -> int:
    if isinstance(k, (int, np.integer)):
        return int(k)
    if k.dim != 1:
        raise ValueError("truncated difference polynomials are implemented over prime fields only")
    return k.p


class TruncRing:
    """F_p[v_0, ..., v_{n-1}] / (degree > d), with sigma given on variables.

    ``shift[i]`` is the index of sigma(v_i), or None for sigma(v_i) = 0.
    ``orders[i]`` is the shift level of v_i (x_i and y_i both have level i)
    and ``r`` the top level.
    """

    def __init__(self, p, names, shift, d, orders=None, r=None):
        self.p = int(p)
        self.names = list(names)
        self.nvars = len(self.names)
        self.shift = list(shift)
        self.degree = int(d)
        self.orders = list(range(len(self.names))) if orders is None else list(orders)
        self.r = max(self.orders) if r is None else r
        self.monomials = []
        for e in range(d + 1):
            for combo in combinations_with_replacement(range(self.nvars), e):
                exp = [0] * self.nvars
                for v in combo:
                    exp[v] += 1
                self.monomials.append(tuple(exp))
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.deg = np.array([sum(m) for m in self.monomials])
        n = len(self.monomials)
        table = np.full((n, n), -1, dtype=np.int64)
        for i, a in enumerate(self.monomials):
            for j, b in enumerate(self.monomials):
                if self.deg[i] + self.deg[j] <= d:
                    table[i, j] = self.index[tuple(x + y for x, y in zip(a, b))]
        self.table = table
        self._sigma = None

    @property
    def dim(self):
        return len(self.monomials)

    def __repr__(self):
        return f"TruncRing({','.join(self.names)}; deg<={self.degree}, p={self.p}, dim={self.dim})"

    def unit(self):
        return self.basis(self.index[(0,) * self.nvars])

    def basis(self, i):
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    def var(self, i):
        exp = [0] * self.nvars
        exp[i] = 1
        return self.basis(self.index[tuple(exp)])

    def name_of(self, i):
        parts = []
        for v, e in enumerate(self.monomials[i]):
            if e:
                parts.append(self.names[v] + (f"^{e}" if e > 1 else ""))
        return "*".join(parts) or "1"

    def multiply(self, u, v, strict=False):
        """(u * v truncated, overflow) where overflow records dropped nonzero terms."""
        u = np.asarray(u, dtype=np.int64) % self.p
        v = np.asarray(v, dtype=np.int64) % self.p
        out = np.zeros(self.dim, dtype=np.int64)
        overflow = False
        for i in np.flatnonzero(u):
            for j in np.flatnonzero(v):
                t = self.table[i, j]
                if t < 0:
                    overflow = True
                else:
                    out[t] += u[i] * v[j]
        if overflow and strict:
            raise DegreeOverflow("product leaves the truncation window")
        return out % self.p, overflow

    def mul(self, u, v):
        return self.multiply(u, v)[0]

    def mult_matrix(self, u) -> Matrix:
        """Matrix of q -> u * q (truncating)."""
        u = np.asarray(u, dtype=np.int64) % self.p
        m = np.zeros((self.dim, self.dim), dtype=np.int64)
        for i in np.flatnonzero(u):
            cols = np.flatnonzero(self.table[i] >= 0)
            m[self.table[i, cols], cols] += u[i]
        return Matrix(m, self.p)

    @property
    def sigma(self) -> Matrix:
        if self._sigma is None:
            s = np.zeros((self.dim, self.dim), dtype=np.int64)
            for j, m in enumerate(self.monomials):
                img = self.substitute(m)
                if img is not None:
                    s[img, j] = 1
            self._sigma = Matrix(s, self.p)
        return self._sigma

    def substitute(self, m):
        """Index of sigma(x^m), or None when it vanishes."""
        exp = [0] * self.nvars
        for v, e in enumerate(m):
            if e:
                t = self.shift[v]
                if t is None:
                    return None
                exp[t] += e
        return self.index[tuple(exp)]

    def order(self, i):
        """Largest shift level occurring in monomial i (-1 for constants)."""
        return max((self.orders[v] for v, e in enumerate(self.monomials[i]) if e), default=-1)

    def as_diff_ring(self, name="") -> DiffRing:
        mult = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
        i, j = np.nonzero(self.table >= 0)
        mult[i, j, self.table[i, j]] = 1
        return DiffRing(self.p, mult, self.unit(), self.sigma, name=name or repr(self))

    def sigma_is_endomorphism(self) -> bool:
        """sigma(1) = 1 and sigma(ab) = sigma(a)sigma(b) on all basis pairs."""
        s = self.sigma
        if not np.array_equal(s @ self.unit(), self.unit()):
            return False
        for i in range(self.dim):
            for j in range(self.dim):
                t = self.table[i, j]
                lhs = s.a[:, t] if t >= 0 else np.zeros(self.dim, dtype=np.int64)
                if not np.array_equal(lhs, self.mul(s.a[:, i], s.a[:, j])):
                    return False
        return True


def trunc_ring(k, r, d) -> TruncRing:
    """k{x} truncated to x_0..x_r and total degree <= d."""
    if r < 1 or d < 1:
        raise WindowTooSmall("need r >= 1 and d >= 1")
    return TruncRing(_prime(k), [f"x{i}" for i in range(r + 1)], [i + 1 for i in range(r)] + [None], d)


def trunc_ring2(k, r, d) -> TruncRing:
    """k{x, y} truncated: variables x_0..x_r, y_0..y_r, total degree <= d."""
    if r < 1 or d < 1:
        raise WindowTooSmall("need r >= 1 and d >= 1")
    n = r + 1
    names = [f"x{i}" for i in range(n)] + [f"y{i}" for i in range(n)]
    shift = [i + 1 if i < r else None for i in range(n)] + [n + i + 1 if i < r else None for i in range(n)]
    return TruncRing(_prime(k), names, shift, d, orders=list(range(n)) * 2, r=r)


def monomial_count(nvars, d):
    return comb(nvars + d, d)


def interior(R: TruncRing):
    """Indices of monomials of order < r and degree < d."""
    return [i for i in range(R.dim) if R.order(i) < R.r and R.deg[i] < R.degree]


# ------------------------------------------------------------ derivations


def _partial(R: TruncRing, i, v):
    """(coefficient, index) of d/dv_v applied to monomial i, or None."""
    m = list(R.monomials[i])
    e = m[v]
    if e == 0 or e % R.p == 0:
        return None
    m[v] -= 1
    return e % R.p, R.index[tuple(m)]


def leibniz_matrix(R: TruncRing, i) -> np.ndarray:
    """Linear map (p_0, ..., p_r) -> D(x^m_i) with D(v) = p_v, as a dim x (nvars*dim) array."""
    out = np.zeros((R.dim, R.nvars * R.dim), dtype=np.int64)
    for v in range(R.nvars):
        pd = _partial(R, i, v)
        if pd is None:
            continue
        c, j = pd
        out[:, v * R.dim:(v + 1) * R.dim] = (c * R.mult_matrix(R.basis(j)).a) % R.p
    return out % R.p


@dataclass
class DerivationSolution:
    dim: int
    basis: np.ndarray              # rows: (p_0, ..., p_r) stacked
    window_count: int
    classical_dim: int
    shift_forced: bool             # p_i = sigma^i(p_0) on every solution
    constraints: int = 0

    def __iter__(self):
        return iter((self.dim, self.basis))


def derivation_solve(k, r, d) -> DerivationSolution:
    """Difference derivations D of the truncated k{x}: sigma D = D sigma on interior monomials."""
    if r < 2 or d < 2:
        raise WindowTooSmall("derivation window needs r >= 2 and d >= 2")
    R = trunc_ring(k, r, d)
    p, N = R.p, R.dim
    S = R.sigma.a
    blocks = []
    for i in interior(R):
        if R.deg[i] == 0:
            continue
        L = leibniz_matrix(R, i)
        lhs = _mulmod(S, L, p)                       # sigma(D f)
        j = R.substitute(R.monomials[i])
        rhs = leibniz_matrix(R, j) if j is not None else np.zeros_like(L)
        blocks.append((lhs - rhs) % p)
    cons = Matrix(np.vstack(blocks), p)
    ker = kernel_basis(cons)
    basis = ker.basis
    forced = True
    for row in basis:
        parts = row.reshape(R.nvars, N)
        for i in range(1, R.nvars):
            if not np.array_equal(parts[i], (S @ parts[i - 1]) % p):
                forced = False
    return DerivationSolution(ker.dim, basis, N, R.nvars * N, forced, cons.rows)


# ------------------------------------------------------------ resolution


def _eps_matrix(R2: TruncRing, R: TruncRing) -> Matrix:
    """epsilon : k{x, y} -> k{x}, x_i, y_i -> x_i."""
    n = R.nvars
    e = np.zeros((R.dim, R2.dim), dtype=np.int64)
    for j, m in enumerate(R2.monomials):
        exp = tuple(m[i] + m[n + i] for i in range(n))
        e[R.index[exp], j] = 1
    return Matrix(e, R.p)


def _z(R2: TruncRing, i):
    n = R2.nvars // 2
    return (R2.var(i) - R2.var(n + i)) % R2.p


@dataclass
class ResolutionReport:
    fg_zero: bool
    eps_f_zero: bool
    interior_equal: bool
    interior_ker_dim: int
    interior_im_dim: int
    full_ker_dim: int
    full_im_dim: int

    @property
    def boundary_discrepancy(self):
        return self.full_ker_dim - self.full_im_dim

    @property
    def ok(self):
        return self.fg_zero and self.eps_f_zero and self.interior_equal

    def as_dict(self):
        return {"fg_zero": self.fg_zero, "eps_f_zero": self.eps_f_zero,
                "interior_equal": self.interior_equal, "interior_ker_dim": self.interior_ker_dim,
                "interior_im_dim": self.interior_im_dim, "full_ker_dim": self.full_ker_dim,
                "full_im_dim": self.full_im_dim, "boundary_discrepancy": self.boundary_discrepancy}


def _pairs(n):
    return [(i, j) for i in range(n) for j in range(n)]


def resolution_maps(k, r, d):
    """f : (+)_i R -> R, (i, q) -> z_i q and g : (+)_{i,j} R -> (+)_i R on R = truncated k{x, y}.

    g sends (i, j, q) to (i, z_j q) - (j, z_i q).  Returns (f, g, report).
    """
    if r < 2 or d < 2:
        raise WindowTooSmall("resolution window needs r >= 2 and d >= 2")
    R2 = trunc_ring2(k, r, d)
    p, N, n = R2.p, R2.dim, r + 1
    Z = [R2.mult_matrix(_z(R2, i)).a for i in range(n)]
    f = np.hstack(Z)                                    # N x nN
    pairs = _pairs(n)
    g = np.zeros((n * N, len(pairs) * N), dtype=np.int64)
    for c, (i, j) in enumerate(pairs):
        g[i * N:(i + 1) * N, c * N:(c + 1) * N] += Z[j]
        g[j * N:(j + 1) * N, c * N:(c + 1) * N] -= Z[i]
    f, g = Matrix(f % p, p), Matrix(g % p, p)

    fg_zero = (f @ g).is_zero()
    R = trunc_ring(k, r, d)
    eps_f_zero = (_eps_matrix(R2, R) @ f).is_zero()

    # interior: coefficients of degree <= d-1 in the source of f, <= d-2 in the source of g
    low1 = np.flatnonzero(R2.deg <= d - 1)
    low2 = np.flatnonzero(R2.deg <= d - 2)
    src_f = np.concatenate([i * N + low1 for i in range(n)])
    src_g = np.concatenate([c * N + low2 for c in range(len(pairs))])
    f_in = Matrix(f.a[:, src_f], p)
    ker_in = kernel_basis(f_in)
    ker_vecs = np.zeros((ker_in.dim, n * N), dtype=np.int64)
    ker_vecs[:, src_f] = ker_in.basis
    ker_sub = Subspace.span(ker_vecs, n * N, p)
    im_sub = image(Matrix(g.a[:, src_g], p))
    report = ResolutionReport(
        fg_zero=fg_zero,
        eps_f_zero=eps_f_zero,
        interior_equal=ker_sub == im_sub,
        interior_ker_dim=ker_sub.dim,
        interior_im_dim=im_sub.dim,
        full_ker_dim=n * N - rank(f),
        full_im_dim=rank(g),
    )
    return f, g, report


# ------------------------------------------------------- windowed HH^0, HH^1


@dataclass
class WindowedHH:
    hh0_dim: int
    hh1_dim: int
    expected0: int
    expected1: int
    f_star_zero: bool
    g_star_zero: bool
    rungs: int

    def __iter__(self):
        return iter((self.hh0_dim, self.hh1_dim, self.expected0, self.expected1))

    @property
    def ok(self):
        return self.hh0_dim == self.expected0 and self.hh1_dim == self.expected1


def _ladder_space(S, p, N, gens, rungs, shift):
    """Ladders (F_j(g))_{j, g} with F_{j+1}(shift g) = sigma F_j(g), as a subspace.

    Coordinates are ordered (j, g, monomial).  ``shift[g]`` is the index of
    the shifted generator or None when it leaves the window.
    """
    nv = rungs * gens * N
    rows = []
    for j in range(rungs - 1):
        for g in range(gens):
            h = shift[g]
            if h is None:
                continue
            blk = np.zeros((N, nv), dtype=np.int64)
            a = ((j + 1) * gens + h) * N
            b = (j * gens + g) * N
            blk[:, a:a + N] = np.eye(N, dtype=np.int64)
            blk[:, b:b + N] = (-S) % p
            rows.append(blk)
    if not rows:
        return Subspace.full(nv, p)
    return kernel_basis(Matrix(np.vstack(rows) % p, p))


def _restrict_cols(space: Subspace, op: np.ndarray, p) -> np.ndarray:
    if space.dim == 0:
        return np.zeros((op.shape[0], 0), dtype=np.int64)
    return _mulmod(op, space.basis.T, p)


def hh_windowed(k, r, d, rungs=None) -> WindowedHH:
    """HH^0 = ker f*, HH^1 = ker g* / im f* for k{t} over k{t}^e ~ k{x, y}, on ladder windows.

    The k{x, y}-action on k{t} is q(x, y) * a(t) = q(t, t) a(t).  Each
    cochain is a ladder of k-linear maps with rungs j = 0..J; the window
    uses J = r unless given.
    """
    if r < 2 or d < 2:
        raise WindowTooSmall("window needs r >= 2 and d >= 2")
    J = r if rungs is None else rungs
    R2 = trunc_ring2(k, r, d)
    R = trunc_ring(k, r, d)
    p, N, n = R.p, R.dim, r + 1
    S = R.sigma.a
    eps = _eps_matrix(R2, R)
    act = [R.mult_matrix(eps @ _z(R2, i)).a for i in range(n)]     # z_i acting on k{t}

    gen_shift1 = [i + 1 if i < r else None for i in range(n)]
    pairs = _pairs(n)

    L0 = _ladder_space(S, p, N, 1, J + 1, [0])
    L1 = _ladder_space(S, p, N, n, J + 1, gen_shift1)

    # f* : (alpha_j) -> (z_i * alpha_j)_{j, i}
    fs = np.zeros(((J + 1) * n * N, (J + 1) * N), dtype=np.int64)
    for j in range(J + 1):
        for i in range(n):
            fs[(j * n + i) * N:(j * n + i + 1) * N, j * N:(j + 1) * N] = act[i]
    # g* : (F_j(i)) -> (z_b F_j(a) - z_a F_j(b))_{j, (a, b)}
    m = len(pairs)
    gs = np.zeros(((J + 1) * m * N, (J + 1) * n * N), dtype=np.int64)
    for j in range(J + 1):
        for c, (a, b) in enumerate(pairs):
            row = (j * m + c) * N
            gs[row:row + N, (j * n + a) * N:(j * n + a + 1) * N] += act[b]
            gs[row:row + N, (j * n + b) * N:(j * n + b + 1) * N] -= act[a]
    fs %= p
    gs %= p

    f_on = _restrict_cols(L0, fs, p)
    g_on = _restrict_cols(L1, gs, p)
    hh0 = L0.dim - (rank(Matrix(f_on, p)) if f_on.size else 0)
    ker_g = L1.dim - (rank(Matrix(g_on, p)) if g_on.size else 0)
    hh1 = ker_g - (rank(Matrix(f_on, p)) if f_on.size else 0)

    expected0 = monomial_count(n, d)
    # Z-indexed ladders: one free k{t}-window per diagonal class i - j
    classes = {i - j for i in range(n) for j in range(J + 1)}
    expected1 = len(classes) * monomial_count(n, d)
    return WindowedHH(hh0, hh1, expected0, expected1, not fs.any(), not gs.any(), J + 1)


def enveloping_window_check(k, r, d) -> tuple[int, int, int]:
    """p(t) (x) q(t) -> p(x) q(y) on pairs with deg p + deg q <= d.

    Returns (number of pairs, rank of the map, dim of the k{x, y} window);
    injective and onto means all three agree.
    """
    R = trunc_ring(k, r, d)
    R2 = trunc_ring2(k, r, d)
    cols = []
    for i, a in enumerate(R.monomials):
        for j, b in enumerate(R.monomials):
            if R.deg[i] + R.deg[j] <= d:
                v = np.zeros(R2.dim, dtype=np.int64)
                v[R2.index[tuple(a) + tuple(b)]] = 1
                cols.append(v)
    M = Matrix(np.array(cols).T, R.p)
    return len(cols), rank(M), R2.dim
