"""Fix and coinvariant complexes, the cone of (sigma - 1) and the exact sequences.

For a complex C of difference modules the cone T^n = C^n + C^{n-1} with
D(x, y) = (d x, (sigma - 1) x - d y) computes the hypercohomology of Fix.
Both exact sequences below are checked by explicit maps and ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffmod import DiffModule, coinv_subspace, fix_subspace, _fix_ring_actions
from .errors import LiftFailure
from .hochschild import CochainComplex, cocycles, coboundaries, cohomology, hochschild_complex
from .linfp import Matrix, Subspace, _mulmod, image, kernel_basis, rank, solve, subquotient, quotient_space


def _eye(n, p):
    return Matrix.identity(n, p)


def _sigma_minus_one(mod: DiffModule) -> Matrix:
    return mod.sigma - _eye(mod.dim, mod.p)


# ----------------------------------------------------- Fix / coinvariants


def _module_over(ring, acts, sigma, name=""):
    return DiffModule(ring, acts, sigma, name=name)


def fix_complex(c: CochainComplex) -> CochainComplex:
    """Termwise ker(sigma - 1), as modules over Fix(k) with sigma = id."""
    p = c.p
    subs = [fix_subspace(t) for t in c.terms]
    terms = []
    for t, S in zip(c.terms, subs):
        fk, acts = _fix_ring_actions(t)
        terms.append(_module_over(fk, [_restrict(a, S) for a in acts], _eye(S.dim, p), name=f"Fix({t.name})"))
    diffs = []
    for n, d in enumerate(c.differentials):
        S, T = subs[n], subs[n + 1]
        if S.dim == 0 or T.dim == 0:
            diffs.append(Matrix.zeros(T.dim, S.dim, p))
            continue
        img = _mulmod(S.basis, d.a.T, p)
        diffs.append(Matrix._wrap(T.coords(img).T, p))
    out = CochainComplex(terms, diffs, provenance="fix", bounded=c.bounded)
    out.meta["subspaces"] = subs
    return out


def coinv_complex(c: CochainComplex) -> CochainComplex:
    """Termwise coker(sigma - 1) with induced differentials."""
    p = c.p
    quots = [quotient_space(t.dim, coinv_subspace(t), p) for t in c.terms]
    terms = []
    for t, q in zip(c.terms, quots):
        fk, acts = _fix_ring_actions(t)
        terms.append(_module_over(fk, [q.induced(a) for a in acts], _eye(q.dim, p), name=f"({t.name})_s"))
    diffs = []
    for n, d in enumerate(c.differentials):
        q0, q1 = quots[n], quots[n + 1]
        if q0.dim == 0 or q1.dim == 0:
            diffs.append(Matrix.zeros(q1.dim, q0.dim, p))
            continue
        img = _mulmod(q0.lifts, d.a.T, p)
        diffs.append(Matrix._wrap(q1.coords(img).T, p))
    out = CochainComplex(terms, diffs, provenance="coinv", bounded=c.bounded)
    out.meta["quotients"] = quots
    return out


def _restrict(op: Matrix, S: Subspace) -> Matrix:
    if S.dim == 0:
        return Matrix.zeros(0, 0, op.p)
    return Matrix._wrap(S.coords(_mulmod(S.basis, op.a.T, op.p)).T, op.p)


# ------------------------------------------------------------------ cone


@dataclass
class HyperComplex:
    base: CochainComplex
    cone: CochainComplex

    def split(self, n):
        """Sizes (dim C^n, dim C^{n-1}) of the two blocks of T^n."""
        return self.base.dim(n), self.base.dim(n - 1)


def _extend(c: CochainComplex) -> CochainComplex:
    """Append the zero term C^{T+1} to a bounded complex (no-op otherwise)."""
    if not c.bounded or c.meta.get("extended"):
        return c
    p = c.p
    zero = DiffModule(c.terms[0].ring, [Matrix.zeros(0, 0, p) for _ in c.terms[0].act],
                      Matrix.zeros(0, 0, p), name="0")
    out = CochainComplex(c.terms + [zero], c.differentials + [Matrix.zeros(0, c.terms[-1].dim, p)],
                         provenance=c.provenance, bounded=True, meta=dict(c.meta))
    out.meta["extended"] = True
    return out


def cone(c: CochainComplex) -> HyperComplex:
    p = c.p
    ext = _extend(c)
    top = ext.top
    fk = None
    ring_acts = []
    for t in ext.terms:
        fk, acts_t = _fix_ring_actions(t)
        ring_acts.append(acts_t)
    terms, diffs = [], []
    for n in range(top + 1):
        a, b = ext.dim(n), ext.dim(n - 1)
        s_a = ext.terms[n].sigma
        s_b = ext.terms[n - 1].sigma if n >= 1 else Matrix.zeros(0, 0, p)
        sig = np.zeros((a + b, a + b), dtype=np.int64)
        sig[:a, :a] = s_a.a
        sig[a:, a:] = s_b.a
        acts = []
        for j in range(fk.dim):
            blk = np.zeros((a + b, a + b), dtype=np.int64)
            blk[:a, :a] = ring_acts[n][j].a
            if n >= 1:
                blk[a:, a:] = ring_acts[n - 1][j].a
            acts.append(Matrix._wrap(blk, p))
        terms.append(DiffModule(fk, acts, Matrix._wrap(sig, p), name=f"T^{n}"))
    for n in range(top):
        a0, b0 = ext.dim(n), ext.dim(n - 1)
        a1, b1 = ext.dim(n + 1), ext.dim(n)
        D = np.zeros((a1 + b1, a0 + b0), dtype=np.int64)
        D[:a1, :a0] = ext.d(n).a
        D[a1:, :a0] = _sigma_minus_one(ext.terms[n]).a
        if n >= 1:
            D[a1:, a0:] = (-ext.d(n - 1).a) % p
        diffs.append(Matrix._wrap(D % p, p))
    t = CochainComplex(terms, diffs, provenance="cone", bounded=c.bounded)
    t.meta["extended"] = True
    for n in range(top - 1):
        if not (diffs[n + 1] @ diffs[n]).is_zero():
            raise ArithmeticError(f"cone differential squares to a nonzero map at degree {n}")
    return HyperComplex(ext, t)


def hyper(c: CochainComplex):
    """(HyperComplex, dims of the hypercohomology H^n of the cone)."""
    h = cone(c)
    rep = cohomology(h.cone, check_stable=False)
    return h, rep.dims


# --------------------------------------------------------- transcripts


@dataclass
class Position:
    label: str
    dim: int
    rank_in: int
    rank_out: int
    exact: bool | None      # None when not checkable (truncation)

    def as_dict(self):
        return {"label": self.label, "dim": self.dim, "rank_in": self.rank_in,
                "rank_out": self.rank_out, "kernel_out": self.dim - self.rank_out,
                "exact": self.exact}


@dataclass
class SequenceTranscript:
    name: str
    positions: list
    maps: list = field(default_factory=list)
    composites_zero: bool = True

    @property
    def exact(self):
        return self.composites_zero and all(pos.exact is not False for pos in self.positions)

    def dims(self):
        return [pos.dim for pos in self.positions]

    def as_dict(self):
        return {"name": self.name, "exact": self.exact, "composites_zero": self.composites_zero,
                "positions": [pos.as_dict() for pos in self.positions]}


def transcript(name, labels, dims, maps, checkable=None) -> SequenceTranscript:
    """Exactness record for spaces[0] -> spaces[1] -> ... with maps[i] : i -> i+1.

    The first and last positions are assumed to be flanked by zero unless
    ``checkable`` says otherwise.
    """
    n = len(dims)
    ranks = [rank(m) if m.rows and m.cols else 0 for m in maps]
    checkable = checkable or [True] * n
    composites = all((maps[i + 1] @ maps[i]).is_zero() for i in range(len(maps) - 1)
                     if maps[i].rows and maps[i + 1].cols)
    positions = []
    for i in range(n):
        r_in = ranks[i - 1] if i >= 1 else 0
        r_out = ranks[i] if i < len(maps) else 0
        ok = (r_in == dims[i] - r_out) if checkable[i] else None
        positions.append(Position(labels[i], dims[i], r_in, r_out, ok))
    return SequenceTranscript(name, positions, list(maps), composites)


# --------------------------------------------------------- helpers on H


@dataclass
class _H:
    """A cohomology presentation: cocycles, coboundaries and lifts in an ambient space."""

    sq: object
    ambient: int

    @property
    def dim(self):
        return self.sq.dim

    def lifts(self):
        return self.sq.lifts           # rows

    def coords(self, rows):
        return self.sq.coords(rows)


def _cohom(c: CochainComplex, n) -> _H:
    Z, B = cocycles(c, n), coboundaries(c, n)
    return _H(subquotient(Z, B), c.dim(n))


def _matrix_from_rows(rows, nrows, ncols, p):
    """Columns = coordinate rows."""
    if ncols == 0 or nrows == 0:
        return Matrix.zeros(nrows, ncols, p)
    return Matrix._wrap(np.asarray(rows).reshape(ncols, nrows).T % p, p)


# ------------------------------------------------------------------ SES


def ses_check(c: CochainComplex, n: int, hc: HyperComplex | None = None) -> SequenceTranscript:
    """0 -> coinv H^{n-1}(C) -a-> H^n(cone) -b-> fix H^n(C) -> 0."""
    if n < 1:
        raise ValueError("the sequence is stated for n >= 1")
    c = _extend(c)
    p = c.p
    hc = hc or cone(c)
    T = hc.cone
    Hm, Hn = _cohom(c, n - 1), _cohom(c, n)
    HH = _cohom(T, n)
    a_n = c.dim(n)

    # sigma on H^{n-1} and H^n
    sig_m = Hm.sq.induced(c.terms[n - 1].sigma) if Hm.dim else Matrix.zeros(0, 0, p)
    sig_n = Hn.sq.induced(c.terms[n].sigma) if Hn.dim else Matrix.zeros(0, 0, p)
    coinv = quotient_space(Hm.dim, image(sig_m - _eye(Hm.dim, p)) if Hm.dim else Subspace.zero(0, p), p)
    fixH = kernel_basis(sig_n - _eye(Hn.dim, p)) if Hn.dim else Subspace.zero(0, p)

    # alpha: [z] -> [(0, -z)]
    rows = []
    for v in coinv.lifts:
        z = _mulmod(v.reshape(1, -1), Hm.lifts(), p).ravel()
        t = np.concatenate([np.zeros(a_n, dtype=np.int64), (-z) % p])
        rows.append(HH.coords(t))
    alpha = _matrix_from_rows(rows, HH.dim, coinv.dim, p)

    # beta: [(x, y)] -> [x], landing in the sigma-fixed part of H^n
    rows = []
    for t in HH.lifts():
        x = t[:a_n]
        h = Hn.coords(x) if Hn.dim else np.zeros(0, dtype=np.int64)
        rows.append(fixH.coords(h) if fixH.dim else np.zeros(0, dtype=np.int64))
    beta = _matrix_from_rows(rows, fixH.dim, HH.dim, p)

    zero_in = Matrix.zeros(coinv.dim, 0, p)
    zero_out = Matrix.zeros(0, fixH.dim, p)
    labels = ["0", f"coinv H^{n - 1}", f"HH^{n}", f"fix H^{n}", "0"]
    dims = [0, coinv.dim, HH.dim, fixH.dim, 0]
    tr = transcript(f"SES n={n}", labels, dims, [zero_in, alpha, beta, zero_out])
    tr.dimension_identity = HH.dim == coinv.dim + fixH.dim
    return tr


# ------------------------------------------------------------------ LES


def les_check(c: CochainComplex, hc: HyperComplex | None = None) -> SequenceTranscript:
    """... -> H^n(Fix C) -i-> H^n(cone) -g-> H^{n-1}(C_s) -dl-> H^{n+1}(Fix C) -> ..."""
    c = _extend(c)
    p = c.p
    hc = hc or cone(c)
    T = hc.cone
    F = fix_complex(c)
    Q = coinv_complex(c)
    fsubs = F.meta["subspaces"]
    quots = Q.meta["quotients"]
    top = T.valid_top      # last degree with a valid H^n(cone)

    labels, dims, maps = ["0"], [0], []
    spaces = []            # (kind, degree, presentation)

    def add(kind, n, pres):
        labels.append({"fix": f"H^{n}(Fix C)", "hyper": f"HH^{n}", "coinv": f"H^{n}(C_s)"}[kind])
        dims.append(pres.dim)
        spaces.append((kind, n, pres))

    fixH = {n: _cohom(F, n) for n in range(0, F.valid_top + 1)}
    hypH = {n: _cohom(T, n) for n in range(0, top + 1)}
    coH = {n: _cohom(Q, n) for n in range(0, Q.valid_top + 1)}

    def iota(n):
        src, tgt = fixH[n], hypH[n]
        rows = []
        for w in src.lifts():
            x = _mulmod(w.reshape(1, -1), fsubs[n].basis, p).ravel() if fsubs[n].dim else np.zeros(c.dim(n), dtype=np.int64)
            t = np.concatenate([x, np.zeros(c.dim(n - 1), dtype=np.int64)])
            rows.append(tgt.coords(t))
        return _matrix_from_rows(rows, tgt.dim, src.dim, p)

    def gamma(n):
        src = hypH[n]
        tgt = coH[n - 1] if n >= 1 else None
        if tgt is None:
            return Matrix.zeros(0, src.dim, p)
        rows = []
        a = c.dim(n)
        for t in src.lifts():
            y = t[a:]
            ybar = quots[n - 1].coords(y) if quots[n - 1].dim else np.zeros(0, dtype=np.int64)
            rows.append(tgt.coords(ybar) if tgt.dim else np.zeros(0, dtype=np.int64))
        return _matrix_from_rows(rows, tgt.dim, src.dim, p)

    def delta(m):
        # H^m(C_s) -> H^{m+2}(Fix C): [z] -> [d u] with d z = (sigma - 1) u
        src, tgt = coH[m], fixH[m + 2]
        q = quots[m]
        s1 = _sigma_minus_one(c.terms[m + 1])
        rows = []
        for v in src.lifts():
            z = _mulmod(v.reshape(1, -1), q.lifts, p).ravel() if q.dim else np.zeros(c.dim(m), dtype=np.int64)
            dz = c.d(m) @ z
            u = solve(s1, dz)
            if u is None:
                raise LiftFailure(f"d z is not in the image of sigma - 1 at degree {m + 1}")
            du = c.d(m + 1) @ u
            w = fsubs[m + 2].coords(du) if fsubs[m + 2].dim else np.zeros(0, dtype=np.int64)
            rows.append(tgt.coords(w) if tgt.dim else np.zeros(0, dtype=np.int64))
        return _matrix_from_rows(rows, tgt.dim, src.dim, p)

    # walk: Fix^0, HH^0, [C_s^{-1} = 0], Fix^1, HH^1, C_s^0, Fix^2, HH^2, C_s^1, ...
    n = 0
    add("fix", 0, fixH[0])
    maps.append(Matrix.zeros(fixH[0].dim, 0, p))
    while True:
        # fix^n -> HH^n
        if n > top:
            break
        maps.append(iota(n))
        add("hyper", n, hypH[n])
        if n >= 1:
            maps.append(gamma(n))
            add("coinv", n - 1, coH[n - 1])
            if n + 1 in fixH:
                maps.append(delta(n - 1))
            else:
                break
        else:
            # H^{-1}(C_s) = 0 sits here; go straight to Fix^1
            if 1 not in fixH:
                break
            maps.append(Matrix.zeros(fixH[1].dim, hypH[0].dim, p))
        add("fix", n + 1, fixH[n + 1])
        n += 1
    complete = c.bounded
    if complete:
        labels.append("0")
        dims.append(0)
        maps.append(Matrix.zeros(0, dims[-2], p))
    checkable = [True] * len(dims)
    if not complete:
        checkable[-1] = False
    tr = transcript("LES", labels, dims, maps, checkable)
    tr.spaces = spaces
    return tr


def five_term(tr: SequenceTranscript) -> SequenceTranscript:
    """The head 0 -> H^1(Fix) -> HH^1 -> H^0(C_s) -> H^2(Fix) -> HH^2 of an LES transcript."""
    want = ["H^1(Fix C)", "HH^1", "H^0(C_s)", "H^2(Fix C)", "HH^2"]
    labels = [pos.label for pos in tr.positions]
    i = labels.index(want[0])
    if labels[i:i + 5] != want:
        raise ValueError("transcript does not contain the low-degree head")
    pos = tr.positions[i:i + 5]
    # exactness at H^1(Fix) is injectivity: the incoming map from H^{-1}(C_s) = 0
    head = [Position("0", 0, 0, 0, True)] + pos
    return SequenceTranscript("five-term", head, tr.maps[i:i + 4], tr.composites_zero)


# ----------------------------------------------------------- absolute HH


@dataclass
class AbsoluteReport:
    internal: list          # dims of internal HH^n
    fix_of_complex: list    # H^n(Fix C): cohomology of the difference-hom complex
    hyper: list             # H^n of the cone
    ses: list
    les: SequenceTranscript
    complex: CochainComplex

    def as_dict(self):
        return {"internal": self.internal, "fix_complex": self.fix_of_complex, "hyper": self.hyper,
                "ses": [t.as_dict() for t in self.ses], "les": self.les.as_dict()}


def absolute_hh(A, M, D=4, c=None) -> AbsoluteReport:
    c = c or hochschild_complex(A, M, D)
    internal = cohomology(c).dims
    fixc = cohomology(fix_complex(c), check_stable=False).dims
    hc = cone(c)
    hyp = cohomology(hc.cone, check_stable=False).dims
    ses = [ses_check(c, n, hc) for n in range(1, hc.cone.valid_top + 1)]
    les = les_check(c, hc)
    return AbsoluteReport(internal, fixc, hyp, ses, les, c)


def split_iso(c: CochainComplex, n: int, hc: HyperComplex | None = None) -> Matrix:
    """For sigma = id: the map H^n(C) + H^{n-1}(C) -> H^n(cone), ([x], [y]) -> [(x, y)]."""
    p = c.p
    hc = hc or cone(c)
    Hn = _cohom(c, n)
    Hm = _cohom(c, n - 1) if n >= 1 else None
    HH = _cohom(hc.cone, n)
    a, b = c.dim(n), c.dim(n - 1)
    rows = []
    for x in Hn.lifts():
        rows.append(HH.coords(np.concatenate([x, np.zeros(b, dtype=np.int64)])))
    if Hm is not None:
        for y in Hm.lifts():
            rows.append(HH.coords(np.concatenate([np.zeros(a, dtype=np.int64), y])))
    return _matrix_from_rows(rows, HH.dim, len(rows), p)


def euler_check(hc: HyperComplex) -> tuple[int, int]:
    """(sum (-1)^n dim T^n, sum (-1)^n dim HH^n) for a bounded complex."""
    T = hc.cone
    if not T.bounded:
        raise ValueError("Euler characteristic needs a bounded complex")
    chi_t = sum((-1) ** n * T.dim(n) for n in range(T.top + 1))
    chi_h = sum((-1) ** n * d for n, d in enumerate(cohomology(T, check_stable=False).dims))
    return chi_t, chi_h


def cone_maps_check(hc: HyperComplex) -> bool:
    """T^n -> C^n, (x, y) -> x, and C^{n-1} -> T^n, y -> (0, -y), are chain maps

    (the second one out of the shifted complex with differential -d)."""
    c, T = hc.base, hc.cone
    p = c.p
    for n in range(T.top):
        a0, b0 = c.dim(n), c.dim(n - 1)
        a1, b1 = c.dim(n + 1), c.dim(n)
        proj0 = np.hstack([np.eye(a0, dtype=np.int64), np.zeros((a0, b0), dtype=np.int64)])
        proj1 = np.hstack([np.eye(a1, dtype=np.int64), np.zeros((a1, b1), dtype=np.int64)])
        if not np.array_equal(_mulmod(proj1, T.d(n).a, p), _mulmod(c.d(n).a, proj0, p)):
            return False
        inc0 = np.vstack([np.zeros((a0, b0), dtype=np.int64), (-np.eye(b0, dtype=np.int64)) % p])
        inc1 = np.vstack([np.zeros((a1, b1), dtype=np.int64), (-np.eye(b1, dtype=np.int64)) % p])
        lhs = _mulmod(T.d(n).a, inc0, p)
        rhs = _mulmod(inc1, (-c.d(n - 1).a) % p, p)
        if not np.array_equal(lhs, rhs):
            return False
    return True
