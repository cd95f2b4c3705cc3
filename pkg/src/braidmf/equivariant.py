"""Nilpotent Lie algebras, Chevalley-Eilenberg complexes and equivariant factorizations.

Two models of the CE machinery live here.

* The chain model U(h) (x) Lambda^p h with d = d1 + d2, on PBW monomials.  Used to
  check d^2 = 0 and for the small worked examples.
* The cochain model Lambda^* h^dual (x) M, which is what the derived invariants of
  an equivariant factorization are computed from.  Its total differential is

      D_tot = (-1)^{|S|} D  +  sum_a xi^a (rho_a + phi_a)  +  d_Lie  +  higher terms

  with rho_a the action (a derivation of the ring plus a matrix on generators)
  and phi_S the correction.  D_tot is a first order operator; once the rho_a
  form a representation, D_tot^2 - F is linear over the ring and is checked on
  the basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import Poly
from .linalg import PMat, monomials_with, nullspace, solve_affine, common_den, lift_num
from .mf import MatrixFactorization, KoszulPair, koszul_mf, tensor

__all__ = [
    "NilpotentLie", "nilpotent_radical", "abelian_lie", "UEnv", "ce_differential", "ce_d1",
    "ce_d2", "LieAction", "EquivariantMF", "solve_correction", "CorrectionFailure",
    "ce_invariants", "pushforward_koszul", "pushforward_projection", "WindowExhausted",
]


class CorrectionFailure(Exception):
    pass


class WindowExhausted(Exception):
    pass


# ---------------------------------------------------------------- Lie algebras

@dataclass
class NilpotentLie:
    """Basis labels and structure constants [e_a, e_b] = sum_c c^c_ab e_c."""
    labels: list
    brackets: dict = field(default_factory=dict)   # (a, b) -> {c: Fraction}, a < b

    def __post_init__(self):
        self.dim = len(self.labels)
        self.check()

    def bracket(self, a, b):
        if a == b:
            return {}
        if a < b:
            return dict(self.brackets.get((a, b), {}))
        return {c: -v for c, v in self.brackets.get((b, a), {}).items()}

    def bracket_vec(self, u, v):
        out = {}
        for a, x in u.items():
            for b, y in v.items():
                for c, z in self.bracket(a, b).items():
                    out[c] = out.get(c, 0) + x * y * z
        return {c: v for c, v in out.items() if v}

    def check(self):
        for (a, b) in self.brackets:
            if not a < b:
                raise ValueError("brackets must be given for a < b")
        # Jacobi on all triples
        for a, b, c in itertools.combinations(range(self.dim), 3):
            ea, eb, ec = {a: 1}, {b: 1}, {c: 1}
            tot = {}
            for x, y, z in ((ea, eb, ec), (eb, ec, ea), (ec, ea, eb)):
                for k, v in self.bracket_vec(x, self.bracket_vec(y, z)).items():
                    tot[k] = tot.get(k, 0) + v
            if any(tot.values()):
                raise ValueError(f"Jacobi identity fails on {a},{b},{c}")
        if not self.is_nilpotent():
            raise ValueError("not nilpotent")
        return True

    def is_nilpotent(self):
        """Lower central series reaches zero."""
        span = [{i: Fraction(1)} for i in range(self.dim)]
        while span:
            new = [self.bracket_vec({i: Fraction(1)}, u) for i in range(self.dim) for u in span]
            nxt = _row_basis([w for w in new if w])
            if len(nxt) >= len(span):
                return False
            span = nxt
        return True


def _row_basis(vecs):
    piv = {}
    out = []
    for v in vecs:
        v = {k: Fraction(x) for k, x in v.items() if x}
        for pc in sorted(piv):
            if pc in v:
                f = v[pc]
                for k, x in piv[pc].items():
                    v[k] = v.get(k, 0) - f * x
                    if not v[k]:
                        del v[k]
        if v:
            pc = min(v)
            inv = 1 / v[pc]
            v = {k: x * inv for k, x in v.items()}
            piv[pc] = v
            out.append(v)
    return out


def nilpotent_radical(n):
    """Strictly upper triangular n x n matrices, basis e_ij (i<j) in lex order."""
    labels = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    idx = {l: a for a, l in enumerate(labels)}
    br = {}
    for (a, (i, j)), (b, (k, l)) in itertools.combinations(enumerate(labels), 2):
        # [e_ij, e_kl] = d_jk e_il - d_li e_kj
        out = {}
        if j == k:
            out[idx[(i, l)]] = out.get(idx[(i, l)], 0) + Fraction(1)
        if l == i:
            out[idx[(k, j)]] = out.get(idx[(k, j)], 0) - Fraction(1)
        out = {c: v for c, v in out.items() if v}
        if out:
            br[(a, b)] = out
    return NilpotentLie(labels, br)


def abelian_lie(k):
    return NilpotentLie([f"u{i + 1}" for i in range(k)], {})


# ---------------------------------------------------------------- U(h), PBW

class UEnv:
    """Universal enveloping algebra on PBW monomials (nondecreasing index tuples)."""

    def __init__(self, lie):
        self.lie = lie
        self._cache = {}

    def normal(self, word):
        """Normal-ordered expansion of an arbitrary word, {pbw tuple: Fraction}."""
        word = tuple(word)
        if word in self._cache:
            return self._cache[word]
        for k in range(len(word) - 1):
            if word[k] > word[k + 1]:
                a, b = word[k], word[k + 1]
                out = {}
                for w, c in self.normal(word[:k] + (b, a) + word[k + 2:]).items():
                    out[w] = out.get(w, 0) + c
                for d, c in self.lie.bracket(a, b).items():
                    for w, cc in self.normal(word[:k] + (d,) + word[k + 2:]).items():
                        out[w] = out.get(w, 0) + c * cc
                out = {w: c for w, c in out.items() if c}
                self._cache[word] = out
                return out
        res = {word: Fraction(1)}
        self._cache[word] = res
        return res

    def mul(self, u, v):
        out = {}
        for w1, c1 in u.items():
            for w2, c2 in v.items():
                for w, c in self.normal(w1 + w2).items():
                    out[w] = out.get(w, 0) + c1 * c2 * c
        return {w: c for w, c in out.items() if c}


def _wedge_insert(c, rest):
    """c ^ (sorted tuple rest) -> (sign, sorted tuple) or (0, None)."""
    if c in rest:
        return 0, None
    pos = sum(1 for r in rest if r < c)
    return (-1) ** pos, tuple(sorted(rest + (c,)))


def ce_d1(U, elem):
    out = {}
    for (u, wedge), coeff in elem.items():
        for k, x in enumerate(wedge):
            s = 1 if k % 2 == 0 else -1
            rest = wedge[:k] + wedge[k + 1:]
            for w, c in U.normal(u + (x,)).items():
                key = (w, rest)
                out[key] = out.get(key, 0) + s * coeff * c
    return {k: v for k, v in out.items() if v}


def ce_d2(U, elem):
    lie = U.lie
    out = {}
    for (u, wedge), coeff in elem.items():
        for k, l in itertools.combinations(range(len(wedge)), 2):
            s = 1 if (k + l) % 2 == 0 else -1   # (-1)^{(k+1)+(l+1)}
            rest = tuple(x for m, x in enumerate(wedge) if m not in (k, l))
            for c, v in lie.bracket(wedge[k], wedge[l]).items():
                sg, w = _wedge_insert(c, rest)
                if sg:
                    key = (u, w)
                    out[key] = out.get(key, 0) + s * sg * coeff * v
    return {k: v for k, v in out.items() if v}


def ce_differential(lie_or_U, elem):
    """d_ce = d1 + d2 on {(pbw tuple, sorted wedge tuple): coefficient}."""
    U = lie_or_U if isinstance(lie_or_U, UEnv) else UEnv(lie_or_U)
    a = ce_d1(U, elem)
    for k, v in ce_d2(U, elem).items():
        a[k] = a.get(k, 0) + v
    return {k: v for k, v in a.items() if v}


# ---------------------------------------------------------------- actions on modules

@dataclass
class LieAction:
    """h acting on ring^N: rho_a(f e_j) = der_a(f) e_j + f * gen[a] e_j.

    ``derivations[a]`` maps a Poly to a Poly; ``var_images[a]`` records the images of
    the ring variables (for the representation check).  ``gen`` holds optional PMat
    actions on the generators.
    """
    lie: NilpotentLie
    ring: object
    var_images: list
    gen: list = None

    def __post_init__(self):
        if self.gen is None:
            self.gen = [None] * self.lie.dim
        self._memo = {}

    def der(self, a, p):
        if not p:
            return p
        key = (a, p)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self._der(a, p)
        if len(self._memo) > 200000:
            self._memo.clear()
        self._memo[key] = out
        return out

    def _der(self, a, p):
        out = p.ring.zero()
        for name, img in self.var_images[a].items():
            if img:
                d = p.diff(name)
                if d:
                    out = out + d * img
        return out

    def der_mat(self, a, M):
        return PMat(M.ring, M.rows, M.cols, {k: self.der(a, v) for k, v in M.entries.items()})

    def act(self, a, M):
        """rho_a applied to a map M viewed as an element of End: der(M) + [gen_a, M]."""
        out = self.der_mat(a, M)
        G = self.gen[a]
        if G is not None:
            out = out + G @ M - M @ G
        return out

    def check_representation(self):
        """[rho_a, rho_b] = rho_[a,b] on every variable and on generator matrices."""
        ring = self.ring
        for a, b in itertools.combinations(range(self.lie.dim), 2):
            br = self.lie.bracket(a, b)
            for name in ring.names:
                v = ring.var(name)
                lhs = self.der(a, self.der(b, v)) - self.der(b, self.der(a, v))
                rhs = ring.zero()
                for c, co in br.items():
                    rhs = rhs + self.der(c, v) * co
                if lhs != rhs:
                    return False
        return True

    def weight_shift(self, a):
        """Torus weight change caused by rho_a (read off from a variable it moves)."""
        for name, img in self.var_images[a].items():
            if img:
                w0 = self.ring.var(name).weight()
                w1 = img.weight()
                if w1 is not None:
                    return tuple(y - x for x, y in zip(w0, w1))
        return None


class EquivariantMF:
    """(M, D, corrections) with the total differential on Lambda h^dual (x) M."""

    def __init__(self, mf, action, corrections=None):
        self.mf = mf
        self.action = action
        self.corrections = dict(corrections or {})   # sorted tuple S (|S|>=1) -> PMat

    @property
    def lie(self):
        return self.action.lie

    def _subsets(self):
        k = self.lie.dim
        return [tuple(c) for r in range(k + 1) for c in itertools.combinations(range(k), r)]

    def apply_total(self, vec):
        """D_tot on {(S, j): Poly}."""
        mf, act, lie = self.mf, self.action, self.lie
        D = mf.D
        out = {}

        def add(key, p):
            if p:
                cur = out.get(key)
                out[key] = p if cur is None else cur + p

        for (S, j), f in vec.items():
            s = -1 if len(S) % 2 else 1
            # (-1)^{|S|} D
            for (i, jj), v in D.entries.items():
                if jj == j:
                    add((S, i), v * f * s)
            # xi^a rho_a
            for a in range(lie.dim):
                sg, T = _wedge_insert(a, S)
                if not sg:
                    continue
                add((T, j), act.der(a, f) * sg)
                G = act.gen[a]
                if G is not None:
                    for (i, jj), v in G.entries.items():
                        if jj == j:
                            add((T, i), v * f * sg)
            # d_Lie xi^S: d xi^c = -sum_{a<b} c^c_ab xi^a xi^b, extended as a derivation
            for pos, c in enumerate(S):
                rest = S[:pos] + S[pos + 1:]
                sgn_pos = -1 if pos % 2 else 1
                for (a, b), br in lie.brackets.items():
                    co = br.get(c)
                    if not co:
                        continue
                    # replace xi^c at position pos by -co xi^a xi^b
                    sg1, T1 = _wedge_insert(b, rest)
                    if not sg1:
                        continue
                    sg2, T2 = _wedge_insert(a, T1)
                    if not sg2:
                        continue
                    add((T2, j), f * (-co * sgn_pos * sg1 * sg2))
            # corrections xi^R phi_R; phi_R has parity |R| + 1 and passes xi^S
            for R, phi in self.corrections.items():
                sg = -1 if (len(S) * (len(R) + 1)) % 2 else 1
                T = S
                for c in reversed(R):
                    sgc, T = _wedge_insert(c, T)
                    if not sgc:
                        break
                    sg *= sgc
                else:
                    for (i, jj), v in phi.entries.items():
                        if jj == j:
                            add((T, i), v * f * sg)
        return {k: v for k, v in out.items() if v}

    def dtot_squared_defect(self):
        """Nonzero entries of D_tot^2 - F on the basis xi^S e_j."""
        F = self.mf.potential
        bad = []
        one = self.mf.ring.one()
        for S in self._subsets():
            for j in range(self.mf.rank):
                v = self.apply_total(self.apply_total({(S, j): one}))
                v[(S, j)] = v.get((S, j), self.mf.ring.zero()) - F
                for key, p in v.items():
                    if p:
                        bad.append(((S, j), key, p))
        return bad

    def verify(self):
        if not self.action.check_representation():
            return False
        return not self.dtot_squared_defect()


def _commutator(A, B):
    return A @ B - B @ A


def _anticommutator(A, B):
    return A @ B + B @ A


def solve_correction(mf, action, max_deg=3, max_den=2, exclude=(), candidates=None):
    """Find phi_S with D_tot^2 = F, filtration step by filtration step.

    Step 1 solves [D, phi_a] = rho_a(D) (phi_a even).  Higher steps solve for the
    defect of the current total differential on xi^S (x) M.  Entries are searched in
    a bounded monomial space; minimal-support solutions (reduced echelon form with
    free unknowns set to zero) are taken.  ``candidates`` may supply closed-form
    guesses {S: PMat} that are tried first.
    """
    lie = action.lie
    E = EquivariantMF(mf, action)
    if not action.check_representation():
        raise CorrectionFailure("the action is not a Lie algebra representation")
    ring = mf.ring
    N = mf.rank
    one = ring.one()
    for p in range(1, lie.dim + 1):
        # image of xi^0 inputs; a new phi_S only moves the xi^S component at this level
        image = [E.apply_total(E.apply_total({((), j): one})) for j in range(N)]
        for S in itertools.combinations(range(lie.dim), p):
            # defect on xi^S from xi^0 inputs, with phi_S = 0
            defect = PMat(ring, N, N)
            for j in range(N):
                for (T, i), f in image[j].items():
                    if T == S:
                        defect[(i, j)] = defect[(i, j)] + f
            if defect.is_zero():
                continue
            # phi_S enters D_tot^2 on xi^S e_j as (-1)^p-twisted (anti)commutator with D;
            # measure the response of each ansatz element to find the linear system.
            cand = (candidates or {}).get(S)
            if cand is not None:
                E.corrections[S] = cand
                if _defect_on(E, S).is_zero():
                    continue
                del E.corrections[S]
            sol = _solve_level(E, S, defect, max_deg, max_den, exclude)
            if sol is None:
                raise CorrectionFailure(f"inconsistent at filtration step {p} (component {S})")
            E.corrections[S] = sol
    if not E.verify():
        raise CorrectionFailure("total differential does not square to the potential")
    return E


def _defect_on(E, S):
    ring = E.mf.ring
    N = E.mf.rank
    M = PMat(ring, N, N)
    one = ring.one()
    for j in range(N):
        v = E.apply_total(E.apply_total({((), j): one}))
        for (T, i), f in v.items():
            if T == S:
                M[(i, j)] = M[(i, j)] + f
    return M


def _solve_level(E, S, defect, max_deg, max_den, exclude):
    mf = E.mf
    ring = mf.ring
    p = len(S)
    parity = (p + 1) % 2
    # weight and bidegree of phi_S entries: D_tot preserves weight and has degree (1,1)
    shift = [0] * ring.wlen
    for a in S:
        ws = E.action.weight_shift(a)
        if ws is not None:
            shift = [x + y for x, y in zip(shift, ws)]
    D = mf.D
    sign = -1 if p % 2 else 1
    unknowns = []
    for j, gj in enumerate(mf.gens):
        for i, gi in enumerate(mf.gens):
            if (gj.parity + parity) % 2 != gi.parity:
                continue
            w = tuple(a - b + c for a, b, c in zip(gj.weight, gi.weight, shift))
            d = (gj.deg[0] + 1 - p - gi.deg[0], gj.deg[1] + 1 - p - gi.deg[1])
            for m in monomials_with(ring, w, d, max_deg, max_den, exclude):
                unknowns.append((i, j, m))
    from .mf import _LinearMapSystem
    sysm = _LinearMapSystem(ring)
    N = mf.rank
    for u, (i, j, m) in enumerate(unknowns):
        Emat = PMat(ring, N, N, {(i, j): m})
        # contribution of xi^S phi to D_tot^2 on xi^0 inputs: D-part sign then phi
        resp = (D @ Emat).scale(sign) + Emat @ D
        sysm.add(u, resp)
    sysm.set_rhs(defect, sign=-1)
    sol = sysm.solve(len(unknowns))
    if sol is None:
        return None
    out = PMat(ring, N, N)
    for u, c in sol.items():
        i, j, m = unknowns[u]
        out[(i, j)] = out[(i, j)] + m * c
    return out


# ---------------------------------------------------------------- derived invariants (windowed)

def ce_invariants(E, weight_filter, bidegrees, max_exp=8):
    """Cohomology dimensions of the cochain total complex, per bidegree.

    Works over a polynomial ring (inverted elements are not enumerated).  Basis of
    each graded piece: monomials times xi^S e_j of total torus weight zero on the
    coordinates selected by ``weight_filter`` (indices into the weight vector), and
    given (q,t).  Requires potential 0 (a genuine complex).  Returns
    {(q, t): (dim H^even, dim H^odd)}.
    """
    mf = E.mf
    ring = mf.ring
    if mf.potential:
        raise ValueError("ce_invariants needs a complex (zero potential)")
    lie = E.lie
    xiw = [E.action.weight_shift(a) or (0,) * ring.wlen for a in range(lie.dim)]
    subsets = E._subsets()

    def basis(q, t, parity):
        out = []
        for S in subsets:
            for j, g in enumerate(mf.gens):
                if (g.parity + len(S)) % 2 != parity:
                    continue
                w = list(g.weight)
                for a in S:
                    w = [x - y for x, y in zip(w, xiw[a])]
                dq, dt = q - g.deg[0] - len(S), t - g.deg[1] - len(S)
                # functions f with weight -(w) on the filtered coordinates
                for m in _monomials_filtered(ring, [-x for x in w], weight_filter, dq, dt, max_exp):
                    out.append((S, j, m))
        return out

    def matrix(src, tgt):
        index = {}
        for n, (S, j, m) in enumerate(tgt):
            index[(S, j, m)] = n
        rows = []
        for (S, j, m) in src:
            f = Poly(ring, {m: Fraction(1)})
            img = E.apply_total({(S, j): f})
            row = {}
            for (T, i), p in img.items():
                for mm, c in p.num.items():
                    key = (T, i, mm)
                    if key not in index:
                        raise WindowExhausted(f"image leaves the enumerated window at {key}")
                    row[index[key]] = c
            rows.append(row)
        return rows

    from .linalg import rank_of
    out = {}
    for (q, t) in bidegrees:
        dims = []
        for par in (0, 1):
            B0 = basis(q, t, par)
            B1 = basis(q + 1, t + 1, 1 - par)
            Bm = basis(q - 1, t - 1, 1 - par)
            r_out = rank_of(matrix(B0, B1), len(B1)) if B0 and B1 else 0
            r_in = rank_of(matrix(Bm, B0), len(B0)) if Bm and B0 else 0
            dims.append(len(B0) - r_out - r_in)
        out[(q, t)] = tuple(dims)
    return out


def _monomials_filtered(ring, weight, filt, q, t, max_exp):
    res = []
    nv = ring.nvars
    W, Q, T = ring.weights, ring.qdeg, ring.tdeg

    def rec(i, exps, cq, ct, cw):
        if i == nv:
            if cq == q and ct == t and all(cw[k] == weight[k] for k in filt):
                res.append(tuple(exps))
            return
        for e in range(max_exp + 1):
            nq, nt = cq + e * Q[i], ct + e * T[i]
            if nq > q or nt > t:
                break
            exps.append(e)
            rec(i + 1, exps, nq, nt, [a + e * b for a, b in zip(cw, W[i])])
            exps.pop()

    rec(0, [], 0, 0, [0] * ring.wlen)
    return res


# ---------------------------------------------------------------- push-forwards

def pushforward_koszul(F, equations, target_potential, n=None, name=""):
    """Tensor F with the Koszul factorization of the equations f_i.

    The potential of the output is ``target_potential``; its difference with the
    potential of F must lie in the ideal of the f_i, and the division witness w_i
    gives the pairs (w_i, f_i).  Equations that are single variables are divided
    monomial by monomial (first variable in the list that divides wins);
    polynomial equations are only supported one at a time by exact division.
    """
    ring = F.ring
    if not equations:
        if F.potential != target_potential:
            raise ValueError("no equations, and the potentials differ")
        return F
    delta = target_potential - F.potential
    names = []
    for f in equations:
        v = [nm for nm in ring.names if f == ring.var(nm)]
        names.append(v[0] if v else None)
    if all(names):
        idx = [ring.index[nm] for nm in names]
        parts = [dict() for _ in names]
        for m, c in delta.num.items():
            for a, i in enumerate(idx):
                if m[i]:
                    mm = list(m)
                    mm[i] -= 1
                    parts[a][tuple(mm)] = c
                    break
            else:
                raise ValueError("division witness does not exist: potential not in the ideal")
        ws = [Poly(ring, p, delta.den) for p in parts]
    elif len(equations) == 1:
        w = delta.divexact(equations[0]) if delta else ring.zero()
        if w is None:
            raise ValueError("division witness does not exist")
        ws = [w]
    else:
        raise ValueError("several non-variable equations are not supported")
    theta = []
    for w, f in zip(ws, equations):
        fw = f.weight()
        fd = f.bigrade()
        theta.append((fw, (fd[0] - 1, fd[1] - 1)))
    K = koszul_mf(ring, [KoszulPair(w, f) for w, f in zip(ws, equations)], theta=theta,
                  n=n if n is not None else F.n)
    out = tensor(F, K)
    out.name = name
    return out


def pushforward_projection(F, forgotten, target_ring, assignment=None):
    """View F over a smaller ring that omits the ``forgotten`` variables."""
    from .algebra import compile_substitution
    ring = F.ring
    for (i, j), v in list(F.D.entries.items()) + [((-1, -1), F.potential)]:
        if v and (v.variables() & set(forgotten)):
            what = "potential" if i < 0 else f"D[{i},{j}]"
            raise ValueError(f"{what} depends on a forgotten variable")
    back = {nm: target_ring.var(nm) for nm in ring.names if nm not in forgotten}
    back.update(assignment or {})
    s = compile_substitution(ring, target_ring, back)
    return F.map_entries(s, ring=target_ring, potential=s(F.potential))
