"""Z/2-graded matrix factorizations over a GradedRing.

Conventions
-----------
* ``D`` is a :class:`~braidmf.linalg.PMat`; column j is the image of generator j.
* A generator carries parity, a (q,t) bidegree and a torus weight vector
  (for spaces with a B x B action this is ``xi + tau``, left then right).
* ``D`` is torus-invariant and of bidegree (1,1):
  ``wt(src) = wt(entry) + wt(tgt)`` and ``deg(src) + (1,1) = deg(entry) + deg(tgt)``.
* Koszul factorizations live on an exterior algebra; the basis is the list of
  subsets of pair indices ordered by size then lexicographically, and
  ``D = sum a_i theta_i + b_i d/dtheta_i`` with the usual sign
  ``(-1)^{#{j in S : j < i}}``.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .algebra import Character, GradedRing, Poly
from .linalg import PMat, common_den, lift_num, monomials_with, nullspace, solve_affine

__all__ = [
    "Gen", "MatrixFactorization", "KoszulPair", "koszul_mf", "tensor", "twist",
    "reduce", "certify_equiv", "Certificate", "EquivalenceFailure", "direct_sum",
    "zero_mf", "trivial_mf",
]

UNIT_DEG = (1, 1)


@dataclass(frozen=True)
class Gen:
    parity: int
    deg: tuple
    weight: tuple
    label: str = ""

    def shifted(self, weight=None, deg=None, parity=0):
        w = self.weight if weight is None else tuple(a + b for a, b in zip(self.weight, weight))
        d = self.deg if deg is None else (self.deg[0] + deg[0], self.deg[1] + deg[1])
        return Gen((self.parity + parity) % 2, d, w, self.label)


@dataclass(frozen=True)
class KoszulPair:
    a: Poly
    b: Poly


class MatrixFactorization:
    """(M, D) with D^2 = potential * id, checked exactly on construction."""

    def __init__(self, ring, gens, D, potential, n=None, check=True, name=""):
        self.ring = ring
        self.gens = list(gens)
        self.D = D
        self.potential = potential
        self.n = n if n is not None else ring.wlen // 2
        self.name = name
        if check:
            self.check()

    @property
    def rank(self):
        return len(self.gens)

    def xi(self, i):
        return Character(self.gens[i].weight[:self.n])

    def tau(self, i):
        return Character(self.gens[i].weight[self.n:2 * self.n])

    def check(self, homogeneity=True):
        N = self.rank
        if self.D.rows != N or self.D.cols != N:
            raise ValueError("D has the wrong shape")
        for (i, j), v in self.D.entries.items():
            if self.gens[i].parity == self.gens[j].parity:
                raise ValueError(f"D entry ({i},{j}) is not odd")
        sq = self.D @ self.D
        if sq != PMat.identity(self.ring, N).scale(self.potential) if N else False:
            raise ValueError("D^2 != potential * id")
        if homogeneity:
            bad = self.inhomogeneous_entries()
            if bad:
                raise ValueError(f"D entries not compatible with generator weights: {bad[:3]}")
        return True

    def inhomogeneous_entries(self):
        bad = []
        for (i, j), v in self.D.entries.items():
            src, tgt = self.gens[j], self.gens[i]
            w = v.weight()
            want = tuple(a - b for a, b in zip(src.weight, tgt.weight))
            if w is None or w != want:
                bad.append((i, j, "weight", w, want))
                continue
            d = v.bigrade()
            wd = (src.deg[0] + UNIT_DEG[0] - tgt.deg[0], src.deg[1] + UNIT_DEG[1] - tgt.deg[1])
            if d != wd:
                bad.append((i, j, "degree", d, wd))
        return bad

    # -- derived objects
    def with_gens(self, gens):
        return MatrixFactorization(self.ring, gens, self.D, self.potential, self.n, check=False,
                                   name=self.name)

    def parity_shift(self):
        return self.with_gens([g.shifted(parity=1) for g in self.gens])

    def dual_rank_by_parity(self):
        return (sum(1 for g in self.gens if g.parity == 0), sum(1 for g in self.gens if g.parity == 1))

    def map_entries(self, f, ring=None, potential=None, check=True):
        ring = ring or self.ring
        D = PMat(ring, self.rank, self.rank, {k: f(v) for k, v in self.D.entries.items()})
        pot = potential if potential is not None else f(self.potential)
        return MatrixFactorization(ring, self.gens, D, pot, self.n, check=check, name=self.name)

    def summary(self):
        return (f"MF(rank {self.rank} = {self.dual_rank_by_parity()}, "
                f"potential {self.potential})")

    def __repr__(self):
        return self.summary()

    def pretty(self):
        lines = [self.summary()]
        for i, g in enumerate(self.gens):
            lines.append(f"  e{i}: parity {g.parity} deg {g.deg} weight {g.weight} {g.label}")
        for (i, j), v in sorted(self.D.entries.items()):
            lines.append(f"  D[e{j} -> e{i}] = {v}")
        return "\n".join(lines)

    # -- serialization
    def to_json(self):
        return {
            "ring": self.ring.to_json(),
            "n": self.n,
            "generators": [{"parity": g.parity, "qdeg": g.deg[0], "tdeg": g.deg[1],
                            "xi": list(g.weight[:self.n]), "tau": list(g.weight[self.n:]),
                            "label": g.label} for g in self.gens],
            "D": [[self.D[(i, j)].to_text() for j in range(self.rank)] for i in range(self.rank)],
            "potential": self.potential.to_text(),
        }

    def canonical_json(self):
        obj = self.to_json()
        for g in obj["generators"]:
            g.pop("label", None)
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, obj, ring=None, check=True):
        ring = ring or GradedRing.from_json(obj["ring"])
        n = obj["n"]
        gens = [Gen(g["parity"], (g["qdeg"], g["tdeg"]), tuple(g["xi"]) + tuple(g["tau"]),
                    g.get("label", "")) for g in obj["generators"]]
        N = len(gens)
        D = PMat(ring, N, N)
        for i, row in enumerate(obj["D"]):
            for j, txt in enumerate(row):
                if txt != "0":
                    D[(i, j)] = ring.parse(txt)
        return cls(ring, gens, D, ring.parse(obj["potential"]), n, check=check)


# ---------------------------------------------------------------- constructors

def _sign(S, i):
    return -1 if sum(1 for j in S if j < i) % 2 else 1


def koszul_subsets(k):
    return [frozenset(c) for r in range(k + 1) for c in itertools.combinations(range(k), r)]


def koszul_mf(ring, pairs, base_weight=None, base_deg=(0, 0), base_parity=0,
              theta=None, n=None, check=True, name=""):
    """Koszul factorization of ``pairs`` [(a_i, b_i)], potential sum a_i b_i.

    Generator weights follow from D being invariant: theta_i has weight
    ``-wt(a_i)`` (or ``wt(b_i)`` if a_i = 0) relative to the vacuum, and
    bidegree ``(1,1) - deg(a_i)``.  ``theta`` overrides these per pair.
    """
    pairs = [p if isinstance(p, KoszulPair) else KoszulPair(*p) for p in pairs]
    k = len(pairs)
    if base_weight is None:
        base_weight = (0,) * ring.wlen
    th = []
    for i, p in enumerate(pairs):
        if theta is not None and theta[i] is not None:
            th.append(theta[i])
            continue
        if p.a:
            w = p.a.weight()
            d = p.a.bigrade()
            if w is None or d == "inhomogeneous":
                raise ValueError(f"Koszul coefficient a_{i} is not homogeneous")
            th.append((tuple(-x for x in w), (UNIT_DEG[0] - d[0], UNIT_DEG[1] - d[1])))
        elif p.b:
            w = p.b.weight()
            d = p.b.bigrade()
            if w is None or d == "inhomogeneous":
                raise ValueError(f"Koszul coefficient b_{i} is not homogeneous")
            th.append((w, (d[0] - UNIT_DEG[0], d[1] - UNIT_DEG[1])))
        else:
            th.append(((0,) * ring.wlen, (0, 0)))
    subsets = koszul_subsets(k)
    idx = {S: m for m, S in enumerate(subsets)}
    gens = []
    for S in subsets:
        w = list(base_weight)
        q, t = base_deg
        for i in S:
            w = [a + b for a, b in zip(w, th[i][0])]
            q += th[i][1][0]
            t += th[i][1][1]
        lab = "".join(f"t{i}" for i in sorted(S)) or "1"
        gens.append(Gen((len(S) + base_parity) % 2, (q, t), tuple(w), lab))
    D = PMat(ring, len(subsets), len(subsets))
    for S in subsets:
        for i, p in enumerate(pairs):
            s = _sign(S, i)
            if i not in S:
                if p.a:
                    D[(idx[S | {i}], idx[S])] = D[(idx[S | {i}], idx[S])] + p.a * s
            else:
                if p.b:
                    D[(idx[S - {i}], idx[S])] = D[(idx[S - {i}], idx[S])] + p.b * s
    pot = ring.zero()
    for p in pairs:
        pot = pot + p.a * p.b
    mf = MatrixFactorization(ring, gens, D, pot, n, check=check, name=name)
    mf.koszul_pairs = pairs
    return mf


def zero_mf(ring, potential, n=None):
    return MatrixFactorization(ring, [], PMat(ring, 0, 0), potential, n, check=False)


def trivial_mf(ring, n=None):
    """Rank-one even object with zero potential (the tensor unit)."""
    g = Gen(0, (0, 0), (0,) * ring.wlen, "1")
    return MatrixFactorization(ring, [g], PMat(ring, 1, 1), ring.zero(), n)


def tensor(F, G, check=True):
    """F (x) G with D = D_F (x) 1 + (-1)^{|f|} (x) D_G; generators f-major."""
    if F.ring != G.ring:
        raise ValueError("ring mismatch")
    ring = F.ring
    nF, nG = F.rank, G.rank
    gens = []
    for f in F.gens:
        for g in G.gens:
            gens.append(Gen((f.parity + g.parity) % 2,
                            (f.deg[0] + g.deg[0], f.deg[1] + g.deg[1]),
                            tuple(a + b for a, b in zip(f.weight, g.weight)),
                            f"{f.label}|{g.label}"))
    D = PMat(ring, nF * nG, nF * nG)
    for (i, j), v in F.D.entries.items():
        for b in range(nG):
            D[(i * nG + b, j * nG + b)] = v
    for (a, b), v in G.D.entries.items():
        for i in range(nF):
            s = -1 if F.gens[i].parity else 1
            key = (i * nG + a, i * nG + b)
            D[key] = D[key] + v * s
    return MatrixFactorization(ring, gens, D, F.potential + G.potential, F.n, check=check)


def direct_sum(F, G):
    if F.ring != G.ring or F.potential != G.potential:
        raise ValueError("direct sum needs equal rings and potentials")
    N = F.rank
    D = F.D.copy()
    D.rows = D.cols = N + G.rank
    for (i, j), v in G.D.entries.items():
        D[(i + N, j + N)] = v
    return MatrixFactorization(F.ring, F.gens + G.gens, D, F.potential, F.n)


def twist(F, xi, tau):
    """F<xi, tau>: shift every generator weight by (xi, tau); D unchanged."""
    xi = xi.coeffs if isinstance(xi, Character) else tuple(xi)
    tau = tau.coeffs if isinstance(tau, Character) else tuple(tau)
    if len(xi) != F.n or len(tau) != F.n:
        raise ValueError(f"twist characters must have length {F.n}")
    shift = tuple(xi) + tuple(tau)
    shift = shift + (0,) * (F.ring.wlen - len(shift))
    return MatrixFactorization(F.ring, [g.shifted(weight=shift) for g in F.gens], F.D,
                               F.potential, F.n, check=False, name=F.name)


# ---------------------------------------------------------------- certificates

@dataclass
class Certificate:
    """phi: F -> G, psi: G -> F, h on F, k on G with
    psi phi - 1 = D h + h D and phi psi - 1 = D k + k D."""
    source: MatrixFactorization
    target: MatrixFactorization
    phi: PMat
    psi: PMat
    h: PMat
    k: PMat
    note: str = ""

    def verify(self):
        F, G = self.source, self.target
        ok = (self.phi @ F.D == G.D @ self.phi) and (self.psi @ G.D == F.D @ self.psi)
        if not ok:
            return False
        idF = PMat.identity(F.ring, F.rank)
        idG = PMat.identity(G.ring, G.rank)
        if self.psi @ self.phi - idF != F.D @ self.h + self.h @ F.D:
            return False
        if self.phi @ self.psi - idG != G.D @ self.k + self.k @ G.D:
            return False
        return _maps_homogeneous(F, G, self.phi) and _maps_homogeneous(G, F, self.psi)

    def then(self, other):
        """Compose F -> G (self) with G -> H (other)."""
        phi = other.phi @ self.phi
        psi = self.psi @ other.psi
        h = self.h + self.psi @ other.h @ self.phi
        k = other.k + other.phi @ self.k @ other.psi
        return Certificate(self.source, other.target, phi, psi, h, k,
                           note=(self.note + "; " + other.note).strip("; "))

    def inverse(self):
        return Certificate(self.target, self.source, self.psi, self.phi, self.k, self.h, self.note)

    def summary(self):
        return {
            "source_rank": self.source.rank, "target_rank": self.target.rank,
            "phi_entries": len(self.phi.entries), "psi_entries": len(self.psi.entries),
            "h_entries": len(self.h.entries), "k_entries": len(self.k.entries),
            "note": self.note,
        }


def identity_certificate(F):
    ring = F.ring
    N = F.rank
    z = PMat(ring, N, N)
    return Certificate(F, F, PMat.identity(ring, N), PMat.identity(ring, N), z, z.copy(),
                       note="identity")


def _maps_homogeneous(F, G, phi):
    for (i, j), v in phi.entries.items():
        if F.gens[j].parity != G.gens[i].parity:
            return False
        w = v.weight()
        want = tuple(a - b for a, b in zip(F.gens[j].weight, G.gens[i].weight))
        if w != want:
            return False
    return True


class EquivalenceFailure(Exception):
    def __init__(self, msg, left=None, right=None):
        super().__init__(msg)
        self.left = left
        self.right = right


# ---------------------------------------------------------------- reduction

def _find_pivot(F):
    ring = F.ring
    for (i, j) in sorted(F.D.entries):
        v = F.D.entries[(i, j)]
        if ring.is_unit(v):
            return i, j
    return None


def eliminate(F, r, c):
    """Cancel the unit entry D[r, c] (c -> r).  Returns (F', certificate F -> F')."""
    ring = F.ring
    D = F.D
    N = F.rank
    u = D[(r, c)]
    uinv = ring.inverse(u)
    rest = [i for i in range(N) if i not in (r, c)]
    pos = {i: a for a, i in enumerate(rest)}
    M = len(rest)
    # column/row slices
    col_c = {i: v for (i, j), v in D.entries.items() if j == c and i in pos}
    row_r = {j: v for (i, j), v in D.entries.items() if i == r and j in pos}
    newD = PMat(ring, M, M)
    for (i, j), v in D.entries.items():
        if i in pos and j in pos:
            newD[(pos[i], pos[j])] = v
    for i, a in col_c.items():
        au = a * uinv
        for j, b in row_r.items():
            key = (pos[i], pos[j])
            newD[key] = newD[key] - au * b
    G = MatrixFactorization(ring, [F.gens[i] for i in rest], newD, F.potential, F.n,
                            check=False, name=F.name)
    # phi: F -> G, psi: G -> F, h: F -> F
    phi = PMat(ring, M, N)
    for i in rest:
        phi[(pos[i], i)] = ring.one()
    for i, a in col_c.items():
        phi[(pos[i], r)] = phi[(pos[i], r)] - a * uinv
    psi = PMat(ring, N, M)
    for i in rest:
        psi[(i, pos[i])] = ring.one()
    for j, b in row_r.items():
        psi[(c, pos[j])] = psi[(c, pos[j])] - uinv * b
    h = PMat(ring, N, N)
    h[(c, r)] = -uinv
    k = PMat(ring, M, M)
    return G, Certificate(F, G, phi, psi, h, k, note=f"eliminate ({r},{c})")


def _combination(polys, rhs, candidates):
    """Polys c_k in span(candidates[k]) with sum_k polys[k] c_k = rhs, or None."""
    prods = [p * c for p, cs in zip(polys, candidates) for c in cs]
    if not prods:
        return None
    den = common_den([q for q in prods if q] + [rhs])
    rows = {}
    for u, q in enumerate(prods):
        if not q:
            continue
        for m, c in lift_num(q, den).items():
            rows.setdefault(m, {})[u] = c
    target = lift_num(rhs, den)
    keys = sorted(set(rows) | set(target))
    sol = solve_affine([rows.get(m, {}) for m in keys],
                       [target.get(m, 0) for m in keys], len(prods))
    if sol is None:
        return None
    out, u = [], 0
    for p, cs in zip(polys, candidates):
        acc = p.ring.zero()
        for c in cs:
            a = sol.get(u)
            if a:
                acc = acc + c * p.ring.const(a)
            u += 1
        out.append(acc)
    return out


SPLIT_BOUNDS = ((2, 1), (3, 2), (4, 3))


def _unimodular_pair(F, bounds=SPLIT_BOUNDS):
    """A row (or column) of D with two entries generating the unit ideal.

    Returns ``("row", r, (j1, j2), (c1, c2))`` with D[r,j1] c1 + D[r,j2] c2 = 1,
    or the analogue with ``"col"``; None if nothing is found.  The coefficients
    are searched among Laurent monomials, all pairs at the smallest
    (numerator degree, denominator) bound first.
    """
    ring = F.ring
    one = ring.one()
    byrow, bycol = {}, {}
    for (i, j) in sorted(F.D.entries):
        byrow.setdefault(i, []).append(j)
        bycol.setdefault(j, []).append(i)
    pairs = []
    for r in sorted(byrow):
        for j1, j2 in itertools.combinations(byrow[r], 2):
            pairs.append(("row", r, (j1, j2), F.D[(r, j1)], F.D[(r, j2)]))
    for c in sorted(bycol):
        for i1, i2 in itertools.combinations(bycol[c], 2):
            pairs.append(("col", c, (i1, i2), F.D[(i1, c)], F.D[(i2, c)]))

    def attempt(a, b, max_deg, max_den):
        cands = []
        for v in (a, b):
            w, d = v.weight(), v.bigrade()
            if w is None or not isinstance(d, tuple):
                return None
            cands.append(monomials_with(ring, tuple(-x for x in w), (-d[0], -d[1]),
                                        max_deg=max_deg, max_den=max_den))
        return _combination([a, b], one, cands)

    for max_deg, max_den in bounds:
        for kind, r, js, a, b in pairs:
            sol = attempt(a, b, max_deg, max_den)
            if sol is not None:
                return kind, r, js, tuple(sol)
    return None


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def split_pair(F, found):
    """Change basis so that a unimodular pair becomes a single unit entry."""
    ring = F.ring
    kind, r, (a, b), (c1, c2) = found
    N = F.rank
    Q = PMat.identity(ring, N)     # new basis in old coordinates
    Qi = PMat.identity(ring, N)
    ga, gb, gr = F.gens[a], F.gens[b], F.gens[r]
    if kind == "row":
        d1, d2 = F.D[(r, a)], F.D[(r, b)]
        Q[(a, a)], Q[(b, a)], Q[(a, b)], Q[(b, b)] = c1, c2, -d2, d1
        Qi[(a, a)], Qi[(a, b)], Qi[(b, a)], Qi[(b, b)] = d1, d2, -c2, c1
        new_a = Gen(ga.parity, _vsub(gr.deg, UNIT_DEG), gr.weight, ga.label)
        new_b = Gen(gb.parity, _vadd(_vsub(_vadd(ga.deg, gb.deg), gr.deg), UNIT_DEG),
                    _vsub(_vadd(ga.weight, gb.weight), gr.weight), gb.label)
    else:
        d1, d2 = F.D[(a, r)], F.D[(b, r)]
        Q[(a, a)], Q[(b, a)], Q[(a, b)], Q[(b, b)] = d1, d2, -c2, c1
        Qi[(a, a)], Qi[(a, b)], Qi[(b, a)], Qi[(b, b)] = c1, c2, -d2, d1
        new_a = Gen(ga.parity, _vadd(gr.deg, UNIT_DEG), gr.weight, ga.label)
        new_b = Gen(gb.parity, _vsub(_vsub(_vadd(ga.deg, gb.deg), gr.deg), UNIT_DEG),
                    _vsub(_vadd(ga.weight, gb.weight), gr.weight), gb.label)
    gens = list(F.gens)
    gens[a], gens[b] = new_a, new_b
    G = MatrixFactorization(ring, gens, Qi @ F.D @ Q, F.potential, F.n,
                            check=False, name=F.name)
    z = PMat(ring, N, N)
    return G, Certificate(F, G, Qi, Q, z, z.copy(), note=f"split {kind} {r} ({a},{b})")


def reduce(F, certify=True, verify=False, split=True):
    """Gaussian elimination of unit entries until none is left.

    With ``split``, a row or column whose two entries generate the unit ideal
    is first turned into a unit by a 2x2 change of basis.  Returns
    ``(F_min, certificate F -> F_min)``.  Pivot: first unit entry in row-major
    order.
    """
    cert = identity_certificate(F) if certify else None
    cur = F
    while True:
        piv = _find_pivot(cur)
        if piv is None:
            found = _unimodular_pair(cur) if split else None
            if found is None:
                break
            nxt, step = split_pair(cur, found)
            if verify and not step.verify():
                raise AssertionError(f"basis change failed at {found[:3]}")
            if certify:
                cert = cert.then(step)
            cur = nxt
            continue
        nxt, step = eliminate(cur, *piv)
        if verify and not step.verify():
            raise AssertionError(f"elimination certificate failed at {piv}")
        if certify:
            cert = cert.then(step)
        cur = nxt
    cur.check(homogeneity=False)
    if certify:
        cert.target = cur
    return cur, cert


# ---------------------------------------------------------------- equivalence

def _unit_of_weight(ring, weight, bound=3):
    """A product of inverted elements (and their inverses) of the given weight."""
    if not any(weight):
        return ring.one()
    best = None
    for exps in itertools.product(range(-bound, bound + 1), repeat=ring.ninv):
        w = [0] * len(weight)
        for e, iw in zip(exps, ring.inv_wt):
            w = [a + e * b for a, b in zip(w, iw)]
        if tuple(w) == tuple(weight) and (best is None or
                                          sum(map(abs, exps)) < sum(map(abs, best))):
            best = exps
    if best is None:
        return None
    u = ring.one()
    for name, e in zip(ring.inv_names, best):
        u = u * (ring.inv_element(name) ** e if e > 0 else ring.inv_inverse(name, -e) if e else 1)
    return u


def _match_units(F, G):
    """Try phi = (permutation x units) with phi D_F = D_G phi."""
    if F.rank != G.rank:
        return None
    ring = F.ring
    N = F.rank
    sig = lambda g: (g.parity, g.deg)
    cands = []
    for j in range(N):
        cs = [i for i in range(N) if sig(G.gens[i]) == sig(F.gens[j])]
        if not cs:
            return None
        cands.append(cs)
    supportF = {(i, j) for (i, j) in F.D.entries}
    supportG = {(i, j) for (i, j) in G.D.entries}

    def consistent(perm):
        for (i, j) in supportF:
            if i in perm and j in perm and (perm[i], perm[j]) not in supportG:
                return False
        for (a, b) in supportG:
            inv = {v: k for k, v in perm.items()}
            if a in inv and b in inv and (inv[a], inv[b]) not in supportF:
                return False
        return True

    def units_for(perm):
        # phi e_j = u_j e'_perm(j): need D_G[pi, pj] u_j = u_i D_F[i, j]
        u = {}
        for start in range(N):
            if start in u:
                continue
            want = tuple(a - b for a, b in zip(F.gens[start].weight, G.gens[perm[start]].weight))
            u[start] = _unit_of_weight(ring, want)
            if u[start] is None:
                return None
            stack = [start]
            while stack:
                j = stack.pop()
                for (a, b), v in F.D.entries.items():
                    if b == j and a not in u:
                        w = G.D[(perm[a], perm[j])]
                        q = (w * u[j]) / v if ring.is_unit(v) else (w * u[j]).divexact(v)
                        if q is None or not ring.is_unit(q):
                            return None
                        u[a] = q
                        stack.append(a)
                    elif a == j and b not in u:
                        w = G.D[(perm[j], perm[b])]
                        if not w:
                            return None
                        q = (v * u[j]) / w if ring.is_unit(w) else (v * u[j]).divexact(w)
                        if q is None or not ring.is_unit(q):
                            return None
                        u[b] = q
                        stack.append(b)
        phi = PMat(ring, N, N, {(perm[j], j): u[j] for j in range(N)})
        if phi @ F.D != G.D @ phi:
            return None
        return phi

    def search(j, perm, used):
        if j == N:
            return units_for(perm)
        for i in cands[j]:
            if i in used:
                continue
            perm[j] = i
            if consistent(perm):
                res = search(j + 1, perm, used | {i})
                if res is not None:
                    return res
            del perm[j]
        return None

    phi = search(0, {}, frozenset())
    if phi is None:
        return None
    psi = PMat(ring, N, N, {(j, i): ring.inverse(v) for (i, j), v in phi.entries.items()})
    z = PMat(ring, N, N)
    cert = Certificate(F, G, phi, psi, z, z.copy(), note="permutation and units")
    if not _maps_homogeneous(F, G, phi):
        # right shape but weights differ: leave to the ansatz search
        return None
    return cert


def _hom_unknowns(A, B, parity, degshift, max_deg, max_den, exclude, cache):
    """Candidate entries for maps A -> B of given parity and bidegree shift."""
    unknowns = []   # (row, col, monomial Poly)
    for j, ga in enumerate(A.gens):
        for i, gb in enumerate(B.gens):
            if (ga.parity + parity) % 2 != gb.parity:
                continue
            w = tuple(a - b for a, b in zip(ga.weight, gb.weight))
            d = (ga.deg[0] + degshift[0] - gb.deg[0], ga.deg[1] + degshift[1] - gb.deg[1])
            key = (w, d)
            if key not in cache:
                cache[key] = monomials_with(A.ring, w, d, max_deg, max_den, exclude)
            for m in cache[key]:
                unknowns.append((i, j, m))
    return unknowns


class _LinearMapSystem:
    """Collects Q-linear equations 'sum c_u * (matrix expression)_u = rhs'."""

    def __init__(self, ring):
        self.ring = ring
        self.cols = {}      # unknown index -> {(pos) : Poly}
        self.rhs = {}       # pos -> Poly

    def add(self, u, mat, sign=1):
        col = self.cols.setdefault(u, {})
        for key, v in mat.entries.items():
            cur = col.get(key)
            v = v if sign == 1 else -v
            col[key] = v if cur is None else cur + v

    def set_rhs(self, mat, sign=1):
        for key, v in mat.entries.items():
            cur = self.rhs.get(key)
            v = v if sign == 1 else -v
            self.rhs[key] = v if cur is None else cur + v

    def solve(self, nunknowns, homogeneous=False):
        from .linalg import solve_affine
        positions = set(self.rhs)
        for col in self.cols.values():
            positions |= set(col)
        rows_by_key = {}
        for pos in positions:
            polys = [col[pos] for col in self.cols.values() if pos in col and col[pos]]
            if pos in self.rhs and self.rhs[pos]:
                polys.append(self.rhs[pos])
            den = common_den(polys)
            if den is None:
                continue
            for u, col in self.cols.items():
                v = col.get(pos)
                if v:
                    for m, c in lift_num(v, den).items():
                        rows_by_key.setdefault((pos, m), {})[u] = c
            if pos in self.rhs and self.rhs[pos]:
                for m, c in lift_num(self.rhs[pos], den).items():
                    rows_by_key.setdefault((pos, m), {})[-1] = c
        keys = sorted(rows_by_key)
        rows = []
        rhs = []
        for k in keys:
            r = dict(rows_by_key[k])
            b = r.pop(-1, 0)
            rows.append(r)
            rhs.append(b)
        if homogeneous:
            return nullspace(rows, nunknowns)
        return solve_affine(rows, rhs, nunknowns)


def _assemble(ring, rows, cols, unknowns, coeffs):
    M = PMat(ring, rows, cols)
    for u, c in coeffs.items():
        i, j, m = unknowns[u]
        M[(i, j)] = M[(i, j)] + m * c
    return M


def _unit_mat(ring, rows, cols, i, j, m):
    return PMat(ring, rows, cols, {(i, j): m})


def ansatz_equivalence(F, G, max_deg=3, max_den=2, exclude=(), seed=0, tries=4):
    """Search a homotopy equivalence F -> G with entries in a bounded monomial space."""
    ring = F.ring
    cache = {}
    unk_phi = _hom_unknowns(F, G, 0, (0, 0), max_deg, max_den, exclude, cache)
    if not unk_phi:
        return None
    sysm = _LinearMapSystem(ring)
    for u, (i, j, m) in enumerate(unk_phi):
        E = _unit_mat(ring, G.rank, F.rank, i, j, m)
        sysm.add(u, E @ F.D)
        sysm.add(u, G.D @ E, sign=-1)
    basis = sysm.solve(len(unk_phi), homogeneous=True)
    if not basis:
        return None
    rng = random.Random(seed)
    unk_psi = _hom_unknowns(G, F, 0, (0, 0), max_deg, max_den, exclude, cache)
    unk_h = _hom_unknowns(F, F, 1, (-1, -1), max_deg, max_den, exclude, cache)
    unk_k = _hom_unknowns(G, G, 1, (-1, -1), max_deg, max_den, exclude, cache)
    attempts = [None] * min(tries, len(basis)) + [None] * tries
    for t, _ in enumerate(attempts):
        if t < len(basis) and t < tries:
            coeffs = dict(basis[t])
        else:
            coeffs = {}
            for vec in basis:
                r = Fraction(rng.randint(-3, 3))
                if r:
                    for k, v in vec.items():
                        coeffs[k] = coeffs.get(k, 0) + r * v
        phi = _assemble(ring, G.rank, F.rank, unk_phi, coeffs)
        if phi.is_zero():
            continue
        # psi, h jointly: psi D_G = D_F psi ; psi phi - 1 = D_F h + h D_F
        s = _LinearMapSystem(ring)
        npsi = len(unk_psi)
        for u, (i, j, m) in enumerate(unk_psi):
            E = _unit_mat(ring, F.rank, G.rank, i, j, m)
            s.add(u, _tag(E @ G.D - F.D @ E, 0))
            s.add(u, _tag(E @ phi, 1))
        for u, (i, j, m) in enumerate(unk_h):
            E = _unit_mat(ring, F.rank, F.rank, i, j, m)
            s.add(npsi + u, _tag(F.D @ E + E @ F.D, 1), sign=-1)
        s.set_rhs(_tag(PMat.identity(ring, F.rank), 1))
        sol = s.solve(npsi + len(unk_h))
        if sol is None:
            continue
        psi = _assemble(ring, F.rank, G.rank, unk_psi, {u: c for u, c in sol.items() if u < npsi})
        h = _assemble(ring, F.rank, F.rank, unk_h,
                      {u - npsi: c for u, c in sol.items() if u >= npsi})
        # k: phi psi - 1 = D_G k + k D_G
        s2 = _LinearMapSystem(ring)
        for u, (i, j, m) in enumerate(unk_k):
            E = _unit_mat(ring, G.rank, G.rank, i, j, m)
            s2.add(u, G.D @ E + E @ G.D)
        s2.set_rhs(phi @ psi - PMat.identity(ring, G.rank))
        solk = s2.solve(len(unk_k))
        if solk is None:
            continue
        k = _assemble(ring, G.rank, G.rank, unk_k, solk)
        cert = Certificate(F, G, phi, psi, h, k, note="ansatz search")
        if cert.verify():
            return cert
    return None


def _tag(M, tag):
    """Re-key entries so two matrix equations can share one linear system."""
    return PMat(M.ring, M.rows, M.cols, {(tag,) + key: v for key, v in M.entries.items()})


def certify_equiv(F, G, max_deg=3, max_den=2, exclude=(), search=True):
    """Certificate of F ~ G or raise EquivalenceFailure.

    Both sides are reduced first; then bases are matched up to permutation and
    units, and if that fails a bounded ansatz search is run on the reduced forms.
    """
    if F.ring != G.ring:
        raise EquivalenceFailure("ring mismatch")
    if F.potential != G.potential:
        raise EquivalenceFailure("potentials differ", F, G)
    Fr, cF = reduce(F)
    Gr, cG = reduce(G)
    mid = None
    if Fr.rank == Gr.rank:
        mid = _match_units(Fr, Gr)
        if mid is None and search:
            mid = ansatz_equivalence(Fr, Gr, max_deg, max_den, exclude)
    if mid is None:
        raise EquivalenceFailure("reduced forms differ", Fr, Gr)
    cert = cF.then(mid).then(cG.inverse())
    cert.source, cert.target = F, G
    if not cert.verify():
        raise EquivalenceFailure("certificate failed re-verification", Fr, Gr)
    return cert
