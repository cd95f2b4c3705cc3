"""Coordinate models of the spaces carrying the factorizations.

Weights are weights of coordinate functions.  For a space with ``ell`` copies
of B acting, the weight vector has ``ell * n`` entries, one block per factor.
On the reduced two-point space the blocks are (left, right):

    x_ij : left  e_i - e_j          (X upper triangular, B acts by Ad)
    y_ij : right e_i - e_j          (Y strictly upper)
    g_ij : left  e_i, right -e_j    (g -> b1 g b2^-1)
    v_i  : left  e_i                (framing vector)

Bidegrees: x (2,0), y (0,2), g and v (0,0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .algebra import GradedRing, Poly, compile_substitution
from .mf import KoszulPair, MatrixFactorization, koszul_mf, trivial_mf

XDEG = (2, 0)
YDEG = (0, 2)
# bidegree of the even generator of C+ and C-; (-1, 0) makes both C+ * C- = 1 and
# C+ * 1<chi_2,0> * C+ = 1<chi_1,0> hold with the grading, not only up to shift
CPLUS_SHIFT = (-1, 0)

__all__ = [
    "SpaceModel", "reduced_space", "nonreduced_space", "slice_space", "parabolic_space",
    "borel_space", "reduced3_space", "potential_of", "reduced_projection", "unit_mf",
    "cplus", "cminus", "induct", "insert", "fgt_pullback", "lie_derivative",
    "mat_mul", "mat_inv", "mat_trace", "det", "adjugate", "nilpotent_action",
    "equivariant_catalog", "space",
]


# ---------------------------------------------------------------- matrix helpers

def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    ring = A[0][0].ring
    out = [[ring.zero() for _ in range(p)] for _ in range(n)]
    for i in range(n):
        for k in range(m):
            a = A[i][k]
            if not a:
                continue
            for j in range(p):
                b = B[k][j]
                if b:
                    out[i][j] = out[i][j] + a * b
    return out


def det(M):
    n = len(M)
    if n == 0:
        return None
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    acc = M[0][0].ring.zero()
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def adjugate(M):
    n = len(M)
    ring = M[0][0].ring
    if n == 1:
        return [[ring.one()]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            c = det(minor)
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out


def mat_inv(M, det_inverse):
    """M^-1 = adj(M) * det_inverse (the inverse of det M supplied by the caller)."""
    return [[a * det_inverse for a in row] for row in adjugate(M)]


def mat_trace(M):
    acc = M[0][0].ring.zero()
    for i in range(len(M)):
        acc = acc + M[i][i]
    return acc


def _sym(ring, prefix, n, shape):
    z = ring.zero()
    M = [[z for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if shape == "full" or (shape == "upper" and i <= j) or (shape == "strict" and i < j):
                M[i][j] = ring.var(f"{prefix}{i + 1}{j + 1}")
    return M


def _unitvec(k, i, scale=1):
    v = [0] * k
    v[i] = scale
    return v


# ---------------------------------------------------------------- space models

@dataclass
class SpaceModel:
    kind: str
    n: int
    ell: int
    ring: GradedRing
    matrices: dict = field(default_factory=dict)
    inverses: dict = field(default_factory=dict)
    potential: Poly = None

    def describe(self):
        lines = [f"space {self.kind}, n={self.n}, ell={self.ell}"]
        for nm, q, t, w in zip(self.ring.names, self.ring.qdeg, self.ring.tdeg, self.ring.weights):
            lines.append(f"  {nm}: deg ({q},{t}) weight {list(w)}")
        for nm, raw in zip(self.ring.inv_names, self.ring.inv_raw):
            lines.append(f"  inverted {nm} = {Poly(self.ring, raw).to_text()}")
        if self.potential is not None:
            lines.append(f"  potential = {self.potential.to_text()}")
        return "\n".join(lines)


def _gvars(n, prefix, left_block, right_block, nblocks, below_zero=None):
    """g-type variables with weight left e_i (block a), right -e_j (block b)."""
    out = []
    L = n * nblocks
    for i in range(n):
        for j in range(n):
            if below_zero and below_zero(i, j):
                continue
            w = [0] * L
            if left_block is not None:
                w[left_block * n + i] += 1
            if right_block is not None:
                w[right_block * n + j] -= 1
            out.append((f"{prefix}{i + 1}{j + 1}", 0, 0, tuple(w)))
    return out


def _xvars(n, prefix, block, nblocks, shape, deg):
    out = []
    L = n * nblocks
    for i in range(n):
        for j in range(n):
            if shape == "upper" and i > j:
                continue
            if shape == "strict" and i >= j:
                continue
            w = [0] * L
            w[block * n + i] += 1
            w[block * n + j] -= 1
            out.append((f"{prefix}{i + 1}{j + 1}", deg[0], deg[1], tuple(w)))
    return out


def _det_text(n, prefix, rows=None):
    rows = rows if rows is not None else list(range(n))
    terms = []
    for perm in itertools.permutations(rows):
        sgn = 1
        p = list(perm)
        for a in range(len(p)):
            for b in range(a + 1, len(p)):
                if p[a] > p[b]:
                    sgn = -sgn
        mono = "*".join(f"{prefix}{r + 1}{c + 1}" for r, c in zip(rows, perm))
        terms.append(("+" if sgn > 0 else "-") + mono)
    return "".join(terms).lstrip("+")


def reduced_space(n, framed=False):
    """The reduced two-point space b x G x n (optionally with a framing vector)."""
    vars_ = _xvars(n, "x", 0, 2, "upper", XDEG) + _gvars(n, "g", 0, 1, 2) \
        + _xvars(n, "y", 1, 2, "strict", YDEG)
    inv = [("det", _det_text(n, "g"))]
    if framed:
        vars_ += [(f"v{i + 1}", 0, 0, tuple(_unitvec(2 * n, i))) for i in range(n)]
    ring0 = GradedRing(vars_, inv, name=f"Xbar2(G{n})" + ("fr" if framed else ""))
    if framed:
        # S = det * (g^-1 v)_n = sum_i adj(g)_{n,i} v_i
        g = _sym(ring0, "g", n, "full")
        adj = adjugate(g)
        S = ring0.zero()
        for i in range(n):
            S = S + adj[n - 1][i] * ring0.var(f"v{i + 1}")
        inv.append(("S", S.to_text()))
        ring0 = GradedRing(vars_, inv, name=f"Xbar2(G{n})fr")
    ring = ring0
    X = _sym(ring, "x", n, "upper")
    Y = _sym(ring, "y", n, "strict")
    g = _sym(ring, "g", n, "full")
    gi = mat_inv(g, ring.inv_inverse("det"))
    mats = {"X": X, "Y": Y, "g": g}
    if framed:
        mats["v"] = [[ring.var(f"v{i + 1}")] for i in range(n)]
    sp = SpaceModel("framed" if framed else "reduced", n, 2, ring, mats, {"g": gi})
    sp.potential = mat_trace(mat_mul(mat_mul(mat_mul(X, g), Y), gi))
    return sp


def reduced3_space(n):
    """Reduced three-point space b x G x G x n with coordinates (X, g, h, Y)."""
    vars_ = _xvars(n, "x", 0, 3, "upper", XDEG) + _gvars(n, "g", 0, 1, 3) \
        + _gvars(n, "h", 1, 2, 3) + _xvars(n, "y", 2, 3, "strict", YDEG)
    inv = [("detg", _det_text(n, "g")), ("deth", _det_text(n, "h"))]
    ring = GradedRing(vars_, inv, name=f"Xbar3(G{n})")
    X = _sym(ring, "x", n, "upper")
    Y = _sym(ring, "y", n, "strict")
    g = _sym(ring, "g", n, "full")
    h = _sym(ring, "h", n, "full")
    sp = SpaceModel("reduced3", n, 3, ring, {"X": X, "Y": Y, "g": g, "h": h},
                    {"g": mat_inv(g, ring.inv_inverse("detg")),
                     "h": mat_inv(h, ring.inv_inverse("deth"))})
    return sp


def nonreduced_space(n, ell=2):
    """g x (G x n)^ell; potential given for ell = 2."""
    vars_ = _xvars(n, "x", 0, ell + 1, "full", XDEG)
    inv = []
    for a in range(1, ell + 1):
        vars_ += _gvars(n, f"g{a}_", 0, a, ell + 1)
        vars_ += _xvars(n, f"y{a}_", a, ell + 1, "strict", YDEG)
        inv.append((f"det{a}", _det_text(n, f"g{a}_")))
    ring = GradedRing(vars_, inv, name=f"X{ell}(G{n})")
    X = _sym(ring, "x", n, "full")
    mats = {"X": X}
    invs = {}
    for a in range(1, ell + 1):
        mats[f"g{a}"] = _sym(ring, f"g{a}_", n, "full")
        mats[f"Y{a}"] = _sym(ring, f"y{a}_", n, "strict")
        invs[f"g{a}"] = mat_inv(mats[f"g{a}"], ring.inv_inverse(f"det{a}"))
    sp = SpaceModel("nonreduced", n, ell, ring, mats, invs)
    if ell == 2:
        A1 = mat_mul(mat_mul(mats["g1"], mats["Y1"]), invs["g1"])
        A2 = mat_mul(mat_mul(mats["g2"], mats["Y2"]), invs["g2"])
        diff = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(A1, A2)]
        sp.potential = mat_trace(mat_mul(X, diff))
    return sp


def slice_space(n):
    """g x G x n x n with W = Tr(X (Y1 - Ad_g Y2))."""
    vars_ = _xvars(n, "x", 0, 2, "full", XDEG) + _gvars(n, "g", 0, 1, 2) \
        + _xvars(n, "ya", 0, 2, "strict", YDEG) + _xvars(n, "yb", 1, 2, "strict", YDEG)
    ring = GradedRing(vars_, [("det", _det_text(n, "g"))], name=f"Xslice(G{n})")
    X = _sym(ring, "x", n, "full")
    g = _sym(ring, "g", n, "full")
    Y1 = _sym(ring, "ya", n, "strict")
    Y2 = _sym(ring, "yb", n, "strict")
    gi = mat_inv(g, ring.inv_inverse("det"))
    A2 = mat_mul(mat_mul(g, Y2), gi)
    diff = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(Y1, A2)]
    sp = SpaceModel("slice", n, 2, ring, {"X": X, "g": g, "Y1": Y1, "Y2": Y2}, {"g": gi})
    sp.potential = mat_trace(mat_mul(X, diff))
    return sp


def parabolic_space(n, k):
    """b x P_k x n, P_k block upper triangular with blocks (k, n-k)."""
    below = lambda i, j: i >= k and j < k
    vars_ = _xvars(n, "x", 0, 2, "upper", XDEG) + _gvars(n, "g", 0, 1, 2, below) \
        + _xvars(n, "y", 1, 2, "strict", YDEG)
    inv = []
    if k > 0:
        inv.append(("det1", _det_text(k, "g", list(range(k)))))
    if n - k > 0:
        inv.append(("det2", _det_text(n - k, "g", list(range(k, n)))))
    ring = GradedRing(vars_, inv, name=f"Xbar2(P{k},{n})")
    X = _sym(ring, "x", n, "upper")
    Y = _sym(ring, "y", n, "strict")
    z = ring.zero()
    g = [[ring.var(f"g{i + 1}{j + 1}") if not below(i, j) else z for j in range(n)]
         for i in range(n)]
    sp = SpaceModel("parabolic", n, 2, ring, {"X": X, "Y": Y, "g": g})
    # det g = det1 * det2 on P_k
    dinv = ring.one()
    for nm in ring.inv_names:
        dinv = dinv * ring.inv_inverse(nm)
    gi = mat_inv(g, dinv)
    sp.inverses["g"] = gi
    sp.potential = mat_trace(mat_mul(mat_mul(mat_mul(X, g), Y), gi))
    return sp


def borel_space(n):
    """b x B x n: g upper triangular, diagonal entries inverted."""
    below = lambda i, j: i > j
    vars_ = _xvars(n, "x", 0, 2, "upper", XDEG) + _gvars(n, "g", 0, 1, 2, below) \
        + _xvars(n, "y", 1, 2, "strict", YDEG)
    inv = [(f"d{i + 1}", f"g{i + 1}{i + 1}") for i in range(n)]
    ring = GradedRing(vars_, inv, name=f"Xbar2(B{n})")
    z = ring.zero()
    g = [[ring.var(f"g{i + 1}{j + 1}") if i <= j else z for j in range(n)] for i in range(n)]
    dinv = ring.one()
    for nm in ring.inv_names:
        dinv = dinv * ring.inv_inverse(nm)
    gi = mat_inv(g, dinv)
    sp = SpaceModel("borel", n, 2, ring, {"X": _sym(ring, "x", n, "upper"), "g": g,
                                          "Y": _sym(ring, "y", n, "strict")}, {"g": gi})
    sp.potential = mat_trace(mat_mul(mat_mul(mat_mul(sp.matrices["X"], g),
                                             sp.matrices["Y"]), gi))
    return sp


def potential_of(space):
    if space.potential is None:
        raise ValueError(f"no potential for kind {space.kind} with ell={space.ell}")
    return space.potential


# ---------------------------------------------------------------- group actions

def lie_derivative(space, f, side, a, b):
    """Derivative of f along E_ab in the nilpotent radical acting on one side.

    left:  X -> X + e[E,X], g -> g + e E g   (also v -> v + e E v when framed)
    right: g -> g - e g E,  Y -> Y + e [E,Y]
    """
    ring = space.ring
    n = space.n
    out = ring.zero()
    g = space.matrices["g"]

    def add(name, coeff):
        nonlocal out
        if coeff and name in ring.index:
            d = f.diff(name)
            if d:
                out = out + d * coeff

    if side == "left":
        X = space.matrices["X"]
        for i in range(n):
            for j in range(n):
                # [E_ab, X]_ij = delta_ia X_bj - X_ia delta_bj
                c = ring.zero()
                if i == a:
                    c = c + X[b][j]
                if j == b:
                    c = c - X[i][a]
                add(f"x{i + 1}{j + 1}", c)
                # (E g)_ij = delta_ia g_bj
                if i == a:
                    add(f"g{i + 1}{j + 1}", g[b][j])
        if "v" in space.matrices:
            add(f"v{a + 1}", space.matrices["v"][b][0])
    elif side == "right":
        Y = space.matrices["Y"]
        for i in range(n):
            # -(g E_ab)_ij = -g_ia delta_bj
            add(f"g{i + 1}{b + 1}", -g[i][a])
        for i in range(n):
            for j in range(n):
                c = ring.zero()
                if i == a:
                    c = c + Y[b][j]
                if j == b:
                    c = c - Y[i][a]
                add(f"y{i + 1}{j + 1}", c)
    else:
        raise ValueError(side)
    return out


# ---------------------------------------------------------------- projections

def reduced_projection(ij, n, src=None, target=None):
    """Substitution realizing the pullback along pi_ij: Xbar3 -> Xbar2.

    pi_12 = (X, g, Ad_h(Y)_{++}), pi_23 = (Ad_g^-1(X)_+, h, Y), pi_13 = (X, gh, Y).
    Returns a compiled substitution from the two-point ring to the three-point ring.
    """
    src = src or reduced_space(n)
    target = target or reduced3_space(n)
    R = target.ring
    X, Y = target.matrices["X"], target.matrices["Y"]
    g, h = target.matrices["g"], target.matrices["h"]
    gi, hi = target.inverses["g"], target.inverses["h"]
    asg = {}
    if ij == "12":
        Z = mat_mul(mat_mul(h, Y), hi)
        for i in range(n):
            for j in range(n):
                asg[f"x{i + 1}{j + 1}"] = X[i][j]
                asg[f"g{i + 1}{j + 1}"] = g[i][j]
                if i < j:
                    asg[f"y{i + 1}{j + 1}"] = Z[i][j]
        return compile_substitution(src.ring, R, asg)
    if ij == "23":
        Xp = mat_mul(mat_mul(gi, X), g)
        for i in range(n):
            for j in range(n):
                if i <= j:
                    asg[f"x{i + 1}{j + 1}"] = Xp[i][j]
                asg[f"g{i + 1}{j + 1}"] = h[i][j]
                if i < j:
                    asg[f"y{i + 1}{j + 1}"] = Y[i][j]
        return compile_substitution(src.ring, R, asg)
    if ij == "13":
        k = mat_mul(g, h)
        for i in range(n):
            for j in range(n):
                if i <= j:
                    asg[f"x{i + 1}{j + 1}"] = X[i][j]
                asg[f"g{i + 1}{j + 1}"] = k[i][j]
                if i < j:
                    asg[f"y{i + 1}{j + 1}"] = Y[i][j]
        return compile_substitution(src.ring, R, asg,
                                    inverse_images={"det": R.inv_inverse("detg") * R.inv_inverse("deth")})
    raise ValueError(f"unknown projection {ij!r}")


# ---------------------------------------------------------------- basic objects

_SPACE_CACHE = {}


def space(n, framed=False):
    key = (n, framed)
    if key not in _SPACE_CACHE:
        _SPACE_CACHE[key] = reduced_space(n, framed)
    return _SPACE_CACHE[key]


def _divide_by_variables(P, names):
    """Split P = sum_i var_i * w_i + rest by leading-variable assignment."""
    ring = P.ring
    idx = [ring.index[nm] for nm in names]
    parts = [dict() for _ in names]
    rest = {}
    for m, c in P.num.items():
        for a, i in enumerate(idx):
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                parts[a][tuple(mm)] = c
                break
        else:
            rest[m] = c
    ws = [Poly(ring, p, P.den) for p in parts]
    return ws, Poly(ring, rest, P.den)


def unit_mf(n, framed=False):
    """The convolution unit: structure sheaf of g in B, Koszul on the g_ij with i > j."""
    sp = space(n, framed)
    return pushforward_to_reduced(sp, trivial_mf(sp.ring, n).map_entries(lambda p: p, check=False),
                                  [(i, j) for j in range(n) for i in range(j + 1, n)],
                                  sp.ring.zero(), name=f"1_{n}")


def pushforward_to_reduced(sp, F, cut, lifted_potential, name=""):
    """Tensor F (over sp.ring, potential = lifted_potential) with the Koszul factorization
    of the equations g_ij = 0, (i,j) in cut, using the division witness of the remaining
    potential."""
    from .equivariant import pushforward_koszul
    names = [f"g{i + 1}{j + 1}" for i, j in cut]
    return pushforward_koszul(F, [sp.ring.var(nm) for nm in names], sp.potential,
                              n=sp.n, name=name)


def cplus(n=2, framed=False):
    """C+ on the reduced space of G_2: pair (-g21 y12/det, g11(x11-x22) + g21 x12)."""
    if n != 2:
        raise ValueError("cplus is the rank-2 generator; use insert() for higher rank")
    R = space(2, framed).ring
    a = -R("g21*y12") * R.inv_inverse("det")
    b = R("g11*(x11-x22) + g21*x12")
    return koszul_mf(R, [KoszulPair(a, b)], n=2, base_deg=CPLUS_SHIFT, name="C+")


def cminus(n=2, framed=False):
    from .mf import twist
    from .algebra import Character
    F = twist(cplus(n, framed), Character.chi(2, 1, -1), Character.chi(2, 2))
    F.name = "C-"
    return F


# ---------------------------------------------------------------- induction

def _block_space(n):
    if n == 0:
        return None
    return space(n)


def induct(k, F, G, n=None):
    """Induction from G_k x G_{n-k} to G_n: pull back along the block projection of
    the parabolic space, then push forward along the equations cutting P_k."""
    nF = F.n if F is not None else 0
    nG = G.n if G is not None else 0
    n = n if n is not None else nF + nG
    if nF != k or nF + nG != n:
        raise ValueError("ranks do not add up")
    if k == 0:
        return G
    if k == n:
        return F
    target = space(n)
    R = target.ring
    P = parabolic_space(n, k)
    # lift each block object to the parabolic ring, then to G_n
    # 1/det(block1) -> det(block2)/det and vice versa
    det_inv = R.inv_inverse("det")
    b1 = det([[R.var(f"g{i + 1}{j + 1}") for j in range(k)] for i in range(k)])
    b2 = det([[R.var(f"g{i + 1}{j + 1}") for j in range(k, n)] for i in range(k, n)])

    def lift(obj, off, other_det):
        sp = space(obj.n)
        asg = {}
        for nm in sp.ring.names:
            kind, i, j = nm[0], int(nm[1]), int(nm[2])
            asg[nm] = R.var(f"{kind}{i + off}{j + off}")
        return compile_substitution(sp.ring, R, asg, inverse_images={"det": other_det * det_inv})

    sF = lift(F, 0, b2)
    sG = lift(G, k, b1)
    FF = F.map_entries(sF, ring=R, potential=sF(F.potential), check=False)
    GG = G.map_entries(sG, ring=R, potential=sG(G.potential), check=False)
    FF = _reweight(FF, n, 0)
    GG = _reweight(GG, n, k)
    from .mf import tensor
    FG = tensor(FF, GG)
    cut = [(i, j) for i in range(k, n) for j in range(k)]
    from .equivariant import pushforward_koszul
    out = pushforward_koszul(FG, [R.var(f"g{i + 1}{j + 1}") for i, j in cut],
                             target.potential, n=n, name=f"ind{k}({F.name},{G.name})")
    return out


def _reweight(F, n, off):
    """Embed generator weights of a rank-m object into rank n at offset off."""
    from .mf import Gen
    m = F.n
    gens = []
    for g in F.gens:
        left = [0] * n
        right = [0] * n
        left[off:off + m] = g.weight[:m]
        right[off:off + m] = g.weight[m:2 * m]
        gens.append(Gen(g.parity, g.deg, tuple(left + right), g.label))
    return MatrixFactorization(F.ring, gens, F.D, F.potential, n, check=False, name=F.name)


def insert(k, F, n):
    """Ind_{k,k+1}(F) = ind_{k+1}(ind_{k-1}(1_{k-1} x F) x 1_{n-k-1})."""
    if not 1 <= k <= n - 1:
        raise ValueError("k out of range")
    inner = F if k == 1 else induct(k - 1, unit_mf(k - 1), F)
    if n - k - 1 == 0:
        return inner
    return induct(k + 1, inner, unit_mf(n - k - 1))


# ---------------------------------------------------------------- framing

def fgt_pullback(F):
    """Same factorization over the framed ring (v-variables, S inverted)."""
    n = F.n
    fr = space(n, framed=True)
    src = space(n)
    if F.ring != src.ring:
        raise ValueError("fgt_pullback expects an object on the unframed reduced space")
    s = compile_substitution(src.ring, fr.ring, {})
    out = F.map_entries(s, ring=fr.ring, potential=s(F.potential), check=True)
    out.name = f"fgt*({F.name})"
    return out


# ---------------------------------------------------------------- group actions

def nilpotent_action(sp, side, gen=None):
    """The nilpotent radical acting on one side of a reduced space.

    The derivation attached to E_ab is minus the Lie derivative along the
    vector field of the action, which makes E -> rho_E a homomorphism.
    """
    from .equivariant import LieAction, nilpotent_radical
    lie = nilpotent_radical(sp.n)
    ring = sp.ring
    images = []
    for (a, b) in lie.labels:
        img = {}
        for nm in ring.names:
            d = lie_derivative(sp, ring.var(nm), side, a - 1, b - 1)
            if d:
                img[nm] = -d
        images.append(img)
    return LieAction(lie, ring, images, gen)


_CATALOG = {}


def equivariant_catalog(n_max=3):
    """The basic factorizations with their left and right n-actions, corrected.

    Returns {name: EquivariantMF}; each has passed D_tot^2 = F.  Cached.
    """
    if n_max in _CATALOG:
        return dict(_CATALOG[n_max])
    from .equivariant import EquivariantMF, solve_correction
    items = [("1_2", unit_mf(2)), ("C+", cplus()), ("C-", cminus())]
    if n_max >= 3:
        items += [("1_3", unit_mf(3))]
        items += [(f"C+^({k})", insert(k, cplus(), 3)) for k in (1, 2)]
        items += [(f"C-^({k})", insert(k, cminus(), 3)) for k in (1, 2)]
    out = {}
    for name, F in items:
        for side in ("left", "right"):
            A = nilpotent_action(space(F.n), side)
            E = EquivariantMF(F, A)
            if not E.verify():
                E = solve_correction(F, A)
            out[f"{name}/{side}"] = E
    _CATALOG[n_max] = out
    return dict(out)
