"""Internal hom objects [M, N]_k for inversive difference modules.

When sigma is bijective a ladder of k-linear maps is fixed by its first
rung, so [M, N]_k is the space of k-linear maps with sigma acting by
f -> sigma_N f sigma_M^{-1}.  Elements are stored as row-major flattened
N.dim x M.dim matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffmod import DiffMap, DiffModule, DIFFERENCE, Report, as_matrix, hom_k, fix_subspace
from .errors import InversivityRequired, ShapeMismatch
from .linfp import Matrix, Subspace, _mulmod


def require_inversive(*objs):
    for o in objs:
        if not o.sigma.is_invertible():
            raise InversivityRequired(f"sigma of {getattr(o, 'name', o)!r} is not invertible")


def carrier_module(space: Subspace, ring, act_ops, sigma_op, name="") -> DiffModule:
    """Restrict ambient operators (acting on flattened matrices) to a carrier subspace."""
    p = space.p
    B = space.basis

    def restrict(op):
        if space.dim == 0:
            return Matrix.zeros(0, 0, p)
        img = op(B)                      # rows: images of basis vectors
        return Matrix._wrap(space.coords(img).T, p)

    return DiffModule(ring, [restrict(o) for o in act_ops], restrict(sigma_op), name=name)


def _left_right(rows, cols, X=None, Y=None, p=2):
    """Operator on flattened rows x cols matrices F (one per row of input): F -> X F Y."""

    def op(flat):
        F = np.asarray(flat).reshape(-1, rows, cols)
        if F.size == 0:
            r = X.shape[0] if X is not None else rows
            c = Y.shape[1] if Y is not None else cols
            return np.zeros((F.shape[0], r * c), dtype=np.int64)
        out = F
        if X is not None:
            out = np.einsum("ab,nbc->nac", X, out) % p
        if Y is not None:
            out = _mulmod(out.reshape(-1, out.shape[-1]), Y, p).reshape(out.shape[0], out.shape[1], -1)
        return out.reshape(F.shape[0], -1) % p

    return op


@dataclass
class IHom:
    source: DiffModule
    target: DiffModule
    space: Subspace             # k-linear maps, flattened
    carrier: DiffModule
    sigma_inv: Matrix           # sigma_M^{-1}

    def element(self, coords) -> Matrix:
        v = self.space.matrix() @ np.asarray(coords)
        return as_matrix(v, self.target.dim, self.source.dim, self.source.p)

    def coords(self, f: Matrix):
        return self.space.coords(f.a.ravel())

    def sigma_of(self, f: Matrix) -> Matrix:
        return self.target.sigma @ f @ self.sigma_inv

    def identity(self) -> Matrix:
        if self.source.dim != self.target.dim:
            raise ShapeMismatch("identity needs equal source and target")
        return Matrix.identity(self.source.dim, self.source.p)

    def fix(self) -> Subspace:
        """Fixed points of the carrier, as flattened matrices."""
        f = fix_subspace(self.carrier)
        if f.dim == 0:
            return Subspace.zero(self.space.ambient_dim, self.space.p)
        flat = _mulmod(f.basis, self.space.basis, self.space.p)
        return Subspace.span(flat, self.space.ambient_dim, self.space.p)


def ihom(m: DiffModule, n: DiffModule) -> IHom:
    require_inversive(m.ring, m, n)
    p = m.p
    space = hom_k(m, n)
    sinv = m.sigma.inverse()
    acts = [_left_right(n.dim, m.dim, X=a.a, p=p) for a in n.act]
    sig = _left_right(n.dim, m.dim, X=n.sigma.a, Y=sinv.a, p=p)
    carrier = carrier_module(space, m.ring, acts, sig, name=f"[{m.name},{n.name}]")
    return IHom(m, n, space, carrier, sinv)


def evaluate(f: Matrix, m) -> np.ndarray:
    """ev : [M, N] x M -> N."""
    m = np.asarray(m)
    if m.shape != (f.cols,):
        raise ShapeMismatch(f"cannot evaluate a {f.shape} map on a vector of length {m.shape}")
    return f @ m


def ihom_map(f: DiffMap, g: DiffMap, src: IHom | None = None, tgt: IHom | None = None) -> DiffMap:
    """[f, g] : [M', N] -> [M, N'], h -> g h f, for f : M -> M' and g : N -> N'."""
    src = src or ihom(f.target, g.source)
    tgt = tgt or ihom(f.source, g.target)
    if f.matrix.shape != (src.source.dim, tgt.source.dim) or g.matrix.shape != (tgt.target.dim, src.target.dim):
        raise ShapeMismatch("maps do not fit the internal homs")
    p = f.matrix.p
    op = _left_right(src.target.dim, src.source.dim, X=g.matrix.a, Y=f.matrix.a, p=p)
    if src.space.dim == 0 or tgt.space.dim == 0:
        mat = Matrix.zeros(tgt.space.dim, src.space.dim, p)
    else:
        mat = Matrix._wrap(tgt.space.coords(op(src.space.basis)).T, p)
    return DiffMap(src.carrier, tgt.carrier, mat, DIFFERENCE)


def internal_projectivity_witness(x: DiffModule, ses) -> Report:
    """Apply [x, -] to 0 -> A' -i-> B' -q-> C' -> 0 and test exactness of the result.

    ``ses`` is (i, q) as DiffMaps.  Left exactness is automatic; the report
    records whether [x, q] is onto.
    """
    i, q = ses
    a, b, c = i.source, i.target, q.target
    ident = DiffMap(x, x, Matrix.identity(x.dim, x.p), DIFFERENCE)
    hb, hc = ihom(x, b), ihom(x, c)
    ha = ihom(x, a)
    iq = ihom_map(ident, q, hb, hc)
    ii = ihom_map(ident, i, ha, hb)
    rank_q = iq.matrix.rank()
    witness = {"dim_[x,A']": ha.space.dim, "dim_[x,B']": hb.space.dim,
               "dim_[x,C']": hc.space.dim, "rank_[x,q]": rank_q}
    if not (iq.matrix @ ii.matrix).is_zero():
        return Report(False, "internal-projectivity", "composite [x,q][x,i] is not zero", witness)
    if rank_q != hc.space.dim:
        return Report(False, "internal-projectivity", "[x,q] is not surjective", witness)
    if ii.matrix.rank() + hc.space.dim != hb.space.dim:
        return Report(False, "internal-projectivity", "middle exactness fails", witness)
    return Report(True, "internal-projectivity", "", witness)


def check_ses(i: DiffMap, q: DiffMap) -> Report:
    """Is 0 -> A' -> B' -> C' -> 0 a short exact sequence of difference modules?"""
    for f in (i, q):
        r = f.check()
        if not r:
            return r
    if not (q.matrix @ i.matrix).is_zero():
        return Report(False, "ses", "q i != 0")
    ri, rq = i.matrix.rank(), q.matrix.rank()
    if ri != i.source.dim or rq != q.target.dim or ri + rq != i.target.dim:
        return Report(False, "ses", "not exact", {"rank_i": ri, "rank_q": rq})
    return Report(True, "ses")
