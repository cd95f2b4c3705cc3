"""Closure of braids: restriction to g = e, tautological wedges, and hypercohomology
on the free nested Hilbert scheme for n <= 2.

Chart model
-----------
A cyclic triple (X, Y, v) with v_n != 0 can be moved by B to v = e_n; what is
left of B is the torus T' = {diag(t_1, .., t_{n-1}, 1)}.  For n = 1 nothing is
left and the quotient is the line of x11.  For n = 2 the slice is
C^2_{x11,x22} x (C^2_{x12,y12} - 0) and T' scales x12, y12 with weight one, so
the quotient is C^2 x P^1.  Hypercohomology of a descended complex is the
two-chart Cech total complex (charts x12 != 0 and y12 != 0) restricted to
T'-weight zero, computed one (q,t) bidegree at a time.

Grading: x has (2,0), y has (0,2) and the differential has bidegree (1,1); the
Cech differential is regraded by the same (1,1) so the total complex is
homogeneous.  Tables list raw integer bidegrees.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import GradedRing, Poly, compile_substitution
from .linalg import PMat, rank_of
from .mf import Gen, MatrixFactorization

__all__ = [
    "ClosureComplex", "closure_ring", "restrict_to_identity", "wedge_tautological",
    "twist_by_line_bundle", "hypercohomology", "PoincareTable", "closure_complex",
    "homology_of_closure", "TraceError",
]


class TraceError(Exception):
    pass


_RINGS = {}


def closure_ring(n):
    """C[b x n x V]: x_ij (i <= j), y_ij (i < j), v_i, weights for the diagonal torus."""
    if n in _RINGS:
        return _RINGS[n]

    def e(i, s=1):
        w = [0] * n
        w[i] += s
        return w

    vars_ = []
    for i in range(n):
        for j in range(i, n):
            w = [a + b for a, b in zip(e(i), e(j, -1))]
            vars_.append((f"x{i + 1}{j + 1}", 2, 0, tuple(w)))
    for i in range(n):
        for j in range(i + 1, n):
            w = [a + b for a, b in zip(e(i), e(j, -1))]
            vars_.append((f"y{i + 1}{j + 1}", 0, 2, tuple(w)))
    for i in range(n):
        vars_.append((f"v{i + 1}", 0, 0, tuple(e(i))))
    R = GradedRing(vars_, name=f"b x n x V ({n})")
    _RINGS[n] = R
    return R


@dataclass
class ClosureComplex:
    """Two-periodic complex on b x n x V with diagonal-torus weights on generators."""
    ring: GradedRing
    n: int
    gens: list
    D: PMat
    wedge: int = 0
    line: tuple = ()
    name: str = ""

    def __post_init__(self):
        if not self.line:
            self.line = (0,) * self.n

    @property
    def rank(self):
        return len(self.gens)

    def check(self):
        if not (self.D @ self.D).is_zero():
            raise TraceError("closure differential does not square to zero")
        for (i, j), v in self.D.entries.items():
            src, tgt = self.gens[j], self.gens[i]
            if src.parity == tgt.parity:
                raise TraceError(f"entry ({i},{j}) is not odd")
            want = tuple(a - b for a, b in zip(src.weight, tgt.weight))
            if v.weight() != want:
                raise TraceError(f"entry ({i},{j}) has weight {v.weight()}, expected {want}")
            wd = (src.deg[0] + 1 - tgt.deg[0], src.deg[1] + 1 - tgt.deg[1])
            if v.bigrade() != wd:
                raise TraceError(f"entry ({i},{j}) has degree {v.bigrade()}, expected {wd}")
        return True

    def pretty(self):
        lines = [f"closure complex rank {self.rank}, wedge {self.wedge}, line {self.line}"]
        for i, g in enumerate(self.gens):
            lines.append(f"  e{i}: parity {g.parity} deg {g.deg} weight {g.weight}")
        for (i, j), v in sorted(self.D.entries.items()):
            lines.append(f"  D[e{j} -> e{i}] = {v}")
        return "\n".join(lines)


def restrict_to_identity(F):
    """j_e^*: substitute g = e.  Generator weights become xi + tau (diagonal B)."""
    n = F.n
    R = closure_ring(n)
    asg = {}
    for nm in F.ring.names:
        if nm[0] == "g":
            asg[nm] = R.one() if nm[1] == nm[2] else R.zero()
        elif nm in R.index:
            asg[nm] = R.var(nm)
        else:
            raise TraceError(f"unexpected variable {nm} in restrict_to_identity")
    # inverted elements must restrict to units; on b x n x V only constants and
    # the framing determinant S|_{g=e} = v_n are met, and v_n is inverted later by
    # the slice, so S is sent to 1/v_n only through the slice substitution.
    inv_images = {}
    for name in F.ring.inv_names:
        img = compile_substitution(F.ring, R, asg)(F.ring.inv_element(name))
        if img.is_constant() and img:
            continue
        if name == "S" and img == R.var(f"v{n}"):
            inv_images[name] = None
            continue
        raise TraceError(f"inverted element {name} does not restrict to a unit")
    if any(v is None for v in inv_images.values()):
        # framed objects are only used through the slice v = e_n; substitute it now
        for i in range(n):
            asg[f"v{i + 1}"] = R.one() if i == n - 1 else R.zero()
    s = compile_substitution(F.ring, R, asg)
    if s(F.potential):
        raise TraceError("potential does not vanish at g = e")
    D = PMat(R, F.rank, F.rank, {k: s(v) for k, v in F.D.entries.items()})
    gens = [Gen(g.parity, g.deg, tuple(a + b for a, b in zip(g.weight[:n], g.weight[n:2 * n])),
                g.label) for g in F.gens]
    C = ClosureComplex(R, n, gens, D, name=f"j_e*({F.name})")
    C.check()
    return C


def wedge_tautological(C, k, dual=False):
    """Tensor with Lambda^k of the tautological bundle.

    The descent of the trivial bundle V_n carries the weights chi_i; with
    ``dual`` the wedge is taken of its dual, weights -chi_i.  The default is
    the one under which Markov stabilization holds with our twist convention.
    """
    n = C.n
    if not 0 <= k <= n:
        raise TraceError(f"wedge index {k} out of range 0..{n}")
    sign = -1 if dual else 1
    subsets = list(itertools.combinations(range(n), k))
    gens = []
    for S in subsets:
        for g in C.gens:
            w = list(g.weight)
            for i in S:
                w[i] += sign
            gens.append(Gen(g.parity, g.deg, tuple(w), g.label + ("^" + "".join(map(str, S)) if S else "")))
    N = C.rank
    D = PMat(C.ring, N * len(subsets), N * len(subsets))
    for a in range(len(subsets)):
        for (i, j), v in C.D.entries.items():
            D[(a * N + i, a * N + j)] = v
    return ClosureComplex(C.ring, n, gens, D, wedge=C.wedge + k, line=C.line, name=C.name)


def twist_by_line_bundle(C, exponents):
    """Tensor with prod_i L_i^{r_i}, L_i the descent of the character chi_i.

    ``exponents`` is (r_1, .., r_n).  On the slice v = e_n the line bundle L_n
    is trivial.
    """
    n = C.n
    r = tuple(exponents) + (0,) * (n - len(exponents))
    gens = [Gen(g.parity, g.deg, tuple(a + b for a, b in zip(g.weight, r)), g.label)
            for g in C.gens]
    return ClosureComplex(C.ring, n, gens, C.D, wedge=C.wedge,
                          line=tuple(a + b for a, b in zip(C.line, r)), name=C.name)


# ---------------------------------------------------------------- hypercohomology

def _slice_data(C):
    """Entries of D on the slice v = e_n, as {(i, j): {exponent tuple: coeff}}."""
    R = C.ring
    n = C.n
    asg = {f"v{i + 1}": (R.one() if i == n - 1 else R.zero()) for i in range(n)}
    s = compile_substitution(R, R, asg)
    coords = [nm for nm in R.names if nm[0] != "v"]
    idx = [R.index[nm] for nm in coords]
    out = {}
    for (i, j), v in C.D.entries.items():
        p = s(v)
        if any(p.den):
            raise TraceError("closure differential is not polynomial on the slice")
        terms = {tuple(m[k] for k in idx): c for m, c in p.num.items()}
        if terms:
            out[(i, j)] = terms
    return coords, out


def _charts(n):
    """Cech data: list of (name, cech degree, set of coordinates allowed negative)."""
    if n == 1:
        return [("U", 0, frozenset())]
    if n == 2:
        return [("x12", 0, frozenset(["x12"])), ("y12", 0, frozenset(["y12"])),
                ("x12y12", 1, frozenset(["x12", "y12"]))]
    raise TraceError("the chart model covers n <= 2")


def _restrictions(n):
    """Cech differential: (source chart, target chart, sign)."""
    if n == 1:
        return []
    return [("x12", "x12y12", -1), ("y12", "x12y12", 1)]


def _monomials(coords, R, tweight, q, t, free_neg, bound):
    """Exponent tuples of the slice coordinates with bidegree (q,t) and T'-weight.

    n = 1: coords (x11,).  n = 2: coords (x11, x12, x22, y12); x12 and y12 carry
    T'-weight one.  Coordinates in ``free_neg`` may have negative exponents.
    """
    if q % 2 or t % 2:
        return []
    if coords == ["x11"]:
        return [(q // 2,)] if t == 0 and q >= 0 else []
    b = t // 2                      # exponent of y12
    a = tweight - b                 # exponent of x12
    if (b < 0 and "y12" not in free_neg) or (a < 0 and "x12" not in free_neg):
        return []
    rest = q // 2 - a               # x11 + x22
    if rest < 0:
        return []
    return [(i, a, rest - i, b) for i in range(rest + 1)]


def hypercohomology(C, qrange, trange):
    """{(q, t): (dim even, dim odd)} of the descended complex, per bidegree."""
    n = C.n
    if n > 2:
        raise TraceError("hypercohomology is implemented for n <= 2")
    C.check()
    R = C.ring
    coords, entries = _slice_data(C)
    charts = _charts(n)
    chart_deg = {c: d for c, d, _ in charts}
    chart_neg = {c: neg for c, _, neg in charts}
    restr = _restrictions(n)
    # exponent bound: every exponent is pinned by (q, t) up to the window span
    span = max(abs(qrange[0]), abs(qrange[1]), abs(trange[0]), abs(trange[1])) + 4
    for g in C.gens:
        span = max(span, abs(g.deg[0]) + abs(g.deg[1]) + 4 + 2 * abs(g.weight[0] if n > 1 else 0))

    def tw(g):
        return -(g.weight[0]) if n > 1 else 0

    cache = {}

    def basis(q, t, parity):
        key = (q, t, parity)
        if key in cache:
            return cache[key]
        out = []
        for cname, cd, neg in charts:
            for j, g in enumerate(C.gens):
                if (g.parity + cd) % 2 != parity:
                    continue
                iq, it = q - g.deg[0] - cd, t - g.deg[1] - cd
                for m in _monomials(coords, R, tw(g), iq, it, neg, span):
                    out.append((cname, j, m))
        cache[key] = out
        return out

    def matrix(src, tgt):
        index = {b: k for k, b in enumerate(tgt)}
        rows = []
        for (cname, j, m) in src:
            row = {}
            sgn = -1 if chart_deg[cname] % 2 else 1

            def put(key, c):
                if key not in index:
                    raise TraceError(f"image {key} leaves the enumerated window")
                k = index[key]
                row[k] = row.get(k, 0) + c

            for (i, jj), terms in entries.items():
                if jj != j:
                    continue
                for mm, c in terms.items():
                    put((cname, i, tuple(a + b for a, b in zip(m, mm))), sgn * c)
            for (a, b, s) in restr:
                if a == cname:
                    put((b, j, m), s)
            rows.append({k: v for k, v in row.items() if v})
        return rows

    out = {}
    for q in range(qrange[0], qrange[1] + 1):
        for t in range(trange[0], trange[1] + 1):
            dims = []
            for par in (0, 1):
                B0 = basis(q, t, par)
                if not B0:
                    dims.append(0)
                    continue
                B1 = basis(q + 1, t + 1, 1 - par)
                Bm = basis(q - 1, t - 1, 1 - par)
                r_out = rank_of(matrix(B0, B1)) if B1 else 0
                r_in = rank_of(matrix(Bm, B0)) if Bm else 0
                dims.append(len(B0) - r_out - r_in)
            if any(dims):
                out[(q, t)] = tuple(dims)
    return out


# ---------------------------------------------------------------- tables

@dataclass
class PoincareTable:
    """Rows {(k, parity, q, t): dim}; k is the wedge index or the normalized index."""
    rows: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, k, parity, q, t, dim):
        if dim:
            key = (k, parity, q, t)
            self.rows[key] = self.rows.get(key, 0) + dim

    def __eq__(self, other):
        return self.rows == other.rows

    def nonnegative_integers(self):
        return all(isinstance(d, int) and d >= 0 for d in self.rows.values())

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "parity", "q", "t", "dim"])
        for key in sorted(self.rows):
            w.writerow(list(key) + [self.rows[key]])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"meta": self.meta,
                           "rows": [list(k) + [v] for k, v in sorted(self.rows.items())]},
                          sort_keys=True, indent=1)

    @classmethod
    def from_csv(cls, text):
        tab = cls()
        for row in csv.DictReader(io.StringIO(text)):
            tab.add(int(row["k"]), int(row["parity"]), int(row["q"]), int(row["t"]), int(row["dim"]))
        return tab

    def polynomial(self, k, parity):
        """Readable Laurent polynomial in q, t of one summand (raw degrees)."""
        terms = [(q, t, d) for (kk, p, q, t), d in sorted(self.rows.items())
                 if kk == k and p == parity]
        return " + ".join(f"{d}*q^{q}*t^{t}" for q, t, d in terms) or "0"


def closure_complex(word, n=None):
    """L(Phi^fr(word)): evaluate, pull back to the framed space, restrict to g = e."""
    from .braid import BraidWord, parse_braid
    from .compiler import compile_affine, evaluate
    from .spaces import fgt_pullback
    if isinstance(word, str):
        if n is None:
            raise TraceError("n is needed to parse a braid word")
        word = parse_braid(word, n)
    n = word.n
    if n > 2:
        raise TraceError("closures are computed for n <= 2")
    F = evaluate(compile_affine(word))
    C = restrict_to_identity(fgt_pullback(F))
    C.name = f"closure({word})"
    return C


def _window(C, qmax, tmax):
    qlo = min(g.deg[0] for g in C.gens) - 2 * (max(abs(w) for g in C.gens for w in g.weight) + 3)
    tlo = min(g.deg[1] for g in C.gens) - 2 * (max(abs(w) for g in C.gens for w in g.weight) + 3)
    return (min(qlo, 0), qmax), (min(tlo, 0), tmax)


def homology_of_closure(word, n=None, qmax=12, tmax=12, normalized=True, unreduced=False,
                        dual=False, line=None):
    """Table of the closure homology of a braid word (n <= 2).

    Raw tables are indexed by the wedge index k.  The normalized table relabels
    the Z/2 summands: with s = (k + writhe - n - 1)/2 the summand of parity
    s mod 2 is reported as parity 0; when s is not an integer both summands keep
    their raw labels and the row is flagged in ``meta["ambiguous"]``.  The
    normalized table is also shifted by q^(n-1): each crossing complex carries a
    q-shift of -1 in our grading and this is what survives a stabilization.
    ``unreduced`` multiplies by the series 1/(1 - t^2) of the y-direction that
    the reduced model removes.  ``line`` twists by prod L_i^{r_i} first.
    """
    from .braid import parse_braid
    if isinstance(word, str):
        word = parse_braid(word, n)
    n = word.n
    C0 = closure_complex(word)
    if line:
        C0 = twist_by_line_bundle(C0, line)
    qshift = n - 1 if normalized else 0
    qr, tr = _window(C0, qmax - qshift, tmax)
    writhe = word.writhe
    tab = PoincareTable(meta={"word": str(word), "n": n, "writhe": writhe,
                              "normalized": normalized, "qshift": qshift, "unreduced": unreduced,
                              "dual": dual, "line": list(line or ()),
                              "qmax": qmax, "tmax": tmax, "ambiguous": []})
    for k in range(n + 1):
        H = hypercohomology(wedge_tautological(C0, k, dual=dual), qr, tr)
        shift = k + writhe - n - 1
        for (q, t), dims in H.items():
            for par, d in enumerate(dims):
                p = par
                if normalized:
                    if shift % 2 == 0:
                        p = (par - shift // 2) % 2
                    elif k not in tab.meta["ambiguous"]:
                        tab.meta["ambiguous"].append(k)
                if unreduced:
                    for m in range(0, (tmax - t) // 2 + 1):
                        tab.add(k, p, q + qshift, t + 2 * m, d)
                else:
                    tab.add(k, p, q + qshift, t, d)
    tab.rows = {key: v for key, v in tab.rows.items() if key[2] <= qmax and key[3] <= tmax}
    return tab
