"""Sparse matrices of Polys and exact linear systems over Q."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import Poly, _raw_mul, _raw_pow


class PMat:
    """Sparse square-or-rectangular matrix with Poly entries.

    ``entries[(i, j)]`` is the coefficient of row i, column j; applied to basis
    vector j it gives sum_i entries[(i, j)] e_i.
    """

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, rows, cols, entries=None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = {k: v for k, v in (entries or {}).items() if v}

    @classmethod
    def identity(cls, ring, n, scalar=1):
        one = ring.const(scalar)
        return cls(ring, n, n, {(i, i): one for i in range(n)} if scalar else {})

    @classmethod
    def zero(cls, ring, rows, cols):
        return cls(ring, rows, cols, {})

    def __getitem__(self, key):
        v = self.entries.get(key)
        return v if v is not None else self.ring.zero()

    def __setitem__(self, key, value):
        if value:
            self.entries[key] = value
        else:
            self.entries.pop(key, None)

    def copy(self):
        return PMat(self.ring, self.rows, self.cols, dict(self.entries))

    def __add__(self, other):
        out = dict(self.entries)
        for k, v in other.entries.items():
            w = out.get(k)
            w = v if w is None else w + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return PMat(self.ring, self.rows, self.cols, out)

    def __neg__(self):
        return PMat(self.ring, self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return PMat(self.ring, self.rows, self.cols,
                    {k: v * c for k, v in self.entries.items()})

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        bycol = {}
        for (i, j), v in self.entries.items():
            bycol.setdefault(j, []).append((i, v))
        out = {}
        for (j, k), w in other.entries.items():
            for i, v in bycol.get(j, ()):
                key = (i, k)
                prod = v * w
                cur = out.get(key)
                out[key] = prod if cur is None else cur + prod
        return PMat(self.ring, self.rows, other.cols, out)

    def is_zero(self):
        return not any(v for v in self.entries.values())

    def __eq__(self, other):
        return (self.rows, self.cols) == (other.rows, other.cols) and (self - other).is_zero()

    def map(self, f):
        return PMat(self.ring, self.rows, self.cols, {k: f(v) for k, v in self.entries.items()})

    def transpose(self):
        return PMat(self.ring, self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def submatrix(self, rows, cols):
        ri = {r: a for a, r in enumerate(rows)}
        ci = {c: b for b, c in enumerate(cols)}
        return PMat(self.ring, len(rows), len(cols),
                    {(ri[i], ci[j]): v for (i, j), v in self.entries.items()
                     if i in ri and j in ci})

    def dense(self):
        return [[self[(i, j)] for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        return "PMat(" + "; ".join(
            f"[{i},{j}]={v}" for (i, j), v in sorted(self.entries.items())) + ")"


# ---------------------------------------------------------------- Q-linear systems

def nullspace(rows, nunknowns):
    """Basis of {c : sum_k row[k] c_k = 0 for every row} over Q.

    ``rows`` is an iterable of sparse rows ``{unknown: Fraction}``.  The basis
    vectors are sparse dicts; they come out of a reduced row echelon form, so
    each has a single pivot-free unknown set to one (minimal support in that
    sense).
    """
    pivots = {}      # pivot column -> row (dict), rows kept fully reduced
    order = []
    for r in rows:
        r = {k: Fraction(v) for k, v in r.items() if v}
        r = _reduce_row(r, pivots)
        if not r:
            continue
        pc = min(r)
        inv = 1 / r[pc]
        r = {k: v * inv for k, v in r.items()}
        # eliminate pc from the other pivot rows
        for c, pr in pivots.items():
            f = pr.get(pc)
            if f:
                for k, v in r.items():
                    w = pr.get(k, 0) - f * v
                    if w:
                        pr[k] = w
                    else:
                        pr.pop(k, None)
        pivots[pc] = r
        order.append(pc)
    free = [k for k in range(nunknowns) if k not in pivots]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for pc, pr in pivots.items():
            c = pr.get(f)
            if c:
                vec[pc] = -c
        basis.append(vec)
    return basis


def rank_of(rows, nunknowns=None):
    """Rank over Q of a list of sparse rows."""
    pivots = {}
    for r in rows:
        r = _reduce_row({k: Fraction(v) for k, v in r.items() if v}, pivots)
        if not r:
            continue
        pc = min(r)
        inv = 1 / r[pc]
        pivots[pc] = {k: v * inv for k, v in r.items()}
    return len(pivots)


def _reduce_row(r, pivots):
    changed = True
    while changed and r:
        changed = False
        for pc in sorted(set(r) & set(pivots)):
            f = r.get(pc)
            if not f:
                continue
            for k, v in pivots[pc].items():
                w = r.get(k, 0) - f * v
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
            changed = True
    return r


def solve_affine(rows, rhs, nunknowns):
    """One solution of A c = rhs (sparse rows, rhs list) or None; minimal pivots."""
    aug = nunknowns
    full = []
    for r, b in zip(rows, rhs):
        rr = {k: Fraction(v) for k, v in r.items() if v}
        if b:
            rr[aug] = -Fraction(b)
        full.append(rr)
    # homogenize: find null vector with c_aug = 1
    pivots = {}
    for r in full:
        r = _reduce_row(dict(r), pivots)
        if not r:
            continue
        pc = min(r)
        if pc == aug:
            return None
        inv = 1 / r[pc]
        r = {k: v * inv for k, v in r.items()}
        for c, pr in pivots.items():
            f = pr.get(pc)
            if f:
                for k, v in r.items():
                    w = pr.get(k, 0) - f * v
                    if w:
                        pr[k] = w
                    else:
                        pr.pop(k, None)
        pivots[pc] = r
    sol = {}
    for pc, pr in pivots.items():
        c = pr.get(aug)
        if c:
            sol[pc] = -c
    return sol


# ---------------------------------------------------------------- Poly <-> vectors

def common_den(polys):
    den = None
    for p in polys:
        if not p:
            continue
        den = p.den if den is None else tuple(max(a, b) for a, b in zip(den, p.den))
    return den


def lift_num(p, den):
    """Numerator of p rewritten over the denominator ``den``."""
    r = p.ring
    num = p.num
    for i, (a, b) in enumerate(zip(p.den, den)):
        if b > a:
            num = _raw_mul(num, _raw_pow(r.inv_raw[i], b - a, r.nvars))
    return num


def monomials_with(ring, weight, bidegree, max_deg=4, max_den=2, exclude=()):
    """Laurent monomials (num monomial / prod inv^d) of given weight and bidegree.

    Numerator monomials have total degree <= max_deg, inverse powers <= max_den
    in each inverted element.  Returned as Polys.
    """
    nv = ring.nvars
    allowed = [i for i, n in enumerate(ring.names) if n not in exclude]
    out = []
    for dens in itertools.product(range(max_den + 1), repeat=ring.ninv):
        wt = list(weight)
        q, t = bidegree
        for i, d in enumerate(dens):
            if d:
                wt = [a + d * b for a, b in zip(wt, ring.inv_wt[i])]
                q += d * ring.inv_deg[i][0]
                t += d * ring.inv_deg[i][1]
        for m in _monos(ring, allowed, nv, tuple(wt), q, t, max_deg):
            p = Poly(ring, {m: Fraction(1)}, tuple(dens))
            if p.den == tuple(dens):   # skip non-canonical duplicates
                out.append(p)
    return out


def _monos(ring, allowed, nv, wt, q, t, max_deg):
    """Exponent vectors of given weight/bidegree, degree <= max_deg (DFS)."""
    res = []
    W = ring.weights
    Q = ring.qdeg
    T = ring.tdeg
    L = len(allowed)

    def rec(k, exps, deg, cw, cq, ct):
        if k == L:
            if cq == q and ct == t and tuple(cw) == wt:
                res.append(tuple(exps))
            return
        i = allowed[k]
        for e in range(0, max_deg - deg + 1):
            if e:
                exps[i] = e
            nq, nt = cq + e * Q[i], ct + e * T[i]
            if nq > q or nt > t:
                break
            rec(k + 1, exps, deg + e,
                [a + e * b for a, b in zip(cw, W[i])] if e else cw, nq, nt)
        exps[i] = 0

    rec(0, [0] * nv, 0, [0] * len(wt), 0, 0)
    return res
