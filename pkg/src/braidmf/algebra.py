"""Exact graded polynomial arithmetic with a few inverted elements.

A :class:`GradedRing` is a polynomial ring over Q in named variables, each
carrying a (q,t) bidegree and an integer weight vector for the acting torus,
localized at a short list of distinguished elements (``det``, ``S``, or a
single variable).  A :class:`Poly` is stored as ``num / prod(inv_i^den_i)``
with ``num`` a plain polynomial; canonical form cancels every inverted element
that divides the numerator.  The inverted elements are assumed to be pairwise
non-associate primes, which makes this form unique.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

__all__ = [
    "GradedRing", "Poly", "Character", "make_ring", "bigrade",
    "substitute", "INHOMOGENEOUS",
]

INHOMOGENEOUS = "inhomogeneous"


# ---------------------------------------------------------------- raw polys
# A raw polynomial is a dict {exponent tuple: Fraction}.  These helpers are
# the inner loops; everything else is bookkeeping.

def _madd(a, b):
    return tuple([x + y for x, y in zip(a, b)])


def _msub(a, b):
    return tuple([x - y for x, y in zip(a, b)])


def _raw_add(p, q, c=1):
    out = dict(p)
    for m, v in q.items():
        w = out.get(m, 0) + c * v
        if w:
            out[m] = w
        else:
            out.pop(m, None)
    return out


def _raw_mul(p, q):
    if len(p) > len(q):
        p, q = q, p
    out = {}
    get = out.get
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple([x + y for x, y in zip(m1, m2)])
            out[m] = get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _raw_pow(p, k, nvars):
    out = {(0,) * nvars: Fraction(1)}
    base = p
    while k:
        if k & 1:
            out = _raw_mul(out, base)
        k >>= 1
        if k:
            base = _raw_mul(base, base)
    return out


def _grlex(m):
    return (sum(m), m)


def _raw_divexact(p, d, dlead=None):
    """Return p/d if d divides p exactly, else None."""
    if not p:
        return {}
    if len(d) == 1:
        (md, cd), = d.items()
        out = {}
        for m, c in p.items():
            r = _msub(m, md)
            if min(r) < 0:
                return None
            out[r] = c / cd
        return out
    if dlead is None:
        dlead = max(d, key=_grlex)
    cl = d[dlead]
    rem = dict(p)
    quo = {}
    while rem:
        lead = max(rem, key=_grlex)
        r = _msub(lead, dlead)
        if min(r) < 0:
            return None
        c = rem[lead] / cl
        quo[r] = quo.get(r, 0) + c
        for m, v in d.items():
            mm = _madd(m, r)
            w = rem.get(mm, 0) - c * v
            if w:
                rem[mm] = w
            else:
                del rem[mm]
    return quo


# ---------------------------------------------------------------- rings

@dataclass(frozen=True)
class Character:
    """Integer vector (a_1..a_n) standing for sum a_i chi_i."""
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))

    @classmethod
    def chi(cls, n, i, k=1):
        """k*chi_i in rank n (1-based i)."""
        v = [0] * n
        v[i - 1] = k
        return cls(tuple(v))

    @classmethod
    def zero(cls, n):
        return cls((0,) * n)

    @property
    def n(self):
        return len(self.coeffs)

    def __add__(self, other):
        if self.n != other.n:
            raise ValueError("character length mismatch")
        return Character(_madd(self.coeffs, other.coeffs))

    def __neg__(self):
        return Character(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)


class GradedRing:
    """Q[vars] localized at ``inverted``, with bidegrees and torus weights."""

    def __init__(self, variables, inverted=(), name=""):
        names = [v[0] for v in variables]
        if len(set(names)) != len(names):
            dup = sorted({x for x in names if names.count(x) > 1})
            raise ValueError(f"duplicate variable name(s): {dup}")
        wl = {len(v[3]) for v in variables}
        if len(wl) > 1:
            raise ValueError("weight vectors of different lengths")
        self.name = name
        self.names = tuple(names)
        self.nvars = len(names)
        self.qdeg = tuple(int(v[1]) for v in variables)
        self.tdeg = tuple(int(v[2]) for v in variables)
        self.weights = tuple(tuple(int(a) for a in v[3]) for v in variables)
        self.wlen = wl.pop() if wl else 0
        self.index = {n: i for i, n in enumerate(names)}
        self._zero_m = (0,) * self.nvars
        self._zero_d = ()
        self.ninv = 0
        # inverted elements: (name, raw poly, leading monomial, weight, bidegree)
        self.inv_names = []
        self.inv_raw = []
        self.inv_lead = []
        self.inv_wt = []
        self.inv_deg = []
        for iname, expr in inverted:
            if iname in self.index:
                raise ValueError(f"inverted element name {iname!r} clashes")
            raw = self._parse_raw(expr)
            if not raw:
                raise ValueError(f"inverted element {iname!r} is zero")
            w = self._raw_weight(raw)
            d = self._raw_bigrade(raw)
            if w is None or d is None:
                raise ValueError(f"inverted element {iname!r} is not homogeneous")
            self.inv_names.append(iname)
            self.inv_raw.append(raw)
            self.inv_lead.append(max(raw, key=_grlex))
            self.inv_wt.append(w)
            self.inv_deg.append(d)
        self.ninv = len(self.inv_names)
        self._zero_d = (0,) * self.ninv

    # -- construction helpers
    def _parse_raw(self, expr):
        if isinstance(expr, dict):
            return {tuple(m): Fraction(c) for m, c in expr.items() if c}
        p = _Parser(self, allow_inverted=False).parse(expr)
        return p.num

    def _raw_weight(self, raw):
        w = None
        for m in raw:
            v = [0] * self.wlen
            for i, e in enumerate(m):
                if e:
                    for j, a in enumerate(self.weights[i]):
                        v[j] += e * a
            v = tuple(v)
            if w is None:
                w = v
            elif w != v:
                return None
        return w

    def _raw_bigrade(self, raw):
        d = None
        for m in raw:
            q = sum(e * a for e, a in zip(m, self.qdeg))
            t = sum(e * a for e, a in zip(m, self.tdeg))
            if d is None:
                d = (q, t)
            elif d != (q, t):
                return None
        return d

    # -- element constructors
    def var(self, name):
        i = self.index[name]
        m = [0] * self.nvars
        m[i] = 1
        return Poly(self, {tuple(m): Fraction(1)}, self._zero_d, _canon=False)

    def const(self, c):
        c = Fraction(c)
        return Poly(self, {self._zero_m: c} if c else {}, self._zero_d, _canon=False)

    def zero(self):
        return Poly(self, {}, self._zero_d, _canon=False)

    def one(self):
        return self.const(1)

    def inv_element(self, name):
        """The inverted element itself, as a polynomial."""
        i = self.inv_names.index(name)
        return Poly(self, dict(self.inv_raw[i]), self._zero_d, _canon=False)

    def inv_inverse(self, name, k=1):
        i = self.inv_names.index(name)
        d = [0] * self.ninv
        d[i] = k
        return Poly(self, {self._zero_m: Fraction(1)}, tuple(d), _canon=False)

    def __call__(self, text):
        return self.parse(text)

    def parse(self, text):
        return _Parser(self).parse(text)

    def gens(self):
        return [self.var(n) for n in self.names]

    def __repr__(self):
        inv = ", ".join(self.inv_names)
        return f"GradedRing({self.name or '?'}: {', '.join(self.names)}; inverted: {inv})"

    def to_json(self):
        return {
            "name": self.name,
            "vars": [[n, q, t, list(w)] for n, q, t, w in
                     zip(self.names, self.qdeg, self.tdeg, self.weights)],
            "inverted": [[n, Poly(self, r, self._zero_d, _canon=False).to_text()]
                         for n, r in zip(self.inv_names, self.inv_raw)],
        }

    @classmethod
    def from_json(cls, obj):
        return cls([tuple(v) for v in obj["vars"]],
                   [tuple(x) for x in obj["inverted"]], name=obj.get("name", ""))

    def signature(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def __eq__(self, other):
        return self is other or (isinstance(other, GradedRing)
                                 and self.signature() == other.signature())

    def __hash__(self):
        return hash(self.signature())

    # -- unit detection
    def unit_factor(self, p):
        """If p is c * prod(inv_i^k_i) (k_i in Z) return (c, k), else None."""
        if not p.num:
            return None
        num = p.num
        k = [-d for d in p.den]
        changed = True
        while changed:
            changed = False
            if len(num) == 1 and self._zero_m in num:
                return num[self._zero_m], tuple(k)
            for i in range(self.ninv):
                q = _raw_divexact(num, self.inv_raw[i], self.inv_lead[i])
                if q is not None:
                    num = q
                    k[i] += 1
                    changed = True
                    break
        return None

    def is_unit(self, p):
        return self.unit_factor(p) is not None

    def inverse(self, p):
        u = self.unit_factor(p)
        if u is None:
            raise ZeroDivisionError(f"{p} is not invertible in {self!r}")
        c, k = u
        num = {self._zero_m: 1 / Fraction(c)}
        posk = [max(0, -e) for e in k]
        for i, e in enumerate(posk):
            if e:
                num = _raw_mul(num, _raw_pow(self.inv_raw[i], e, self.nvars))
        den = tuple(max(0, e) for e in k)
        return Poly(self, num, den)


def make_ring(spec):
    """Build a ring from ``{"vars": [(name, q, t, weight), ...], "inverted": [(name, expr)]}``."""
    if isinstance(spec, GradedRing):
        return spec
    return GradedRing([tuple(v) for v in spec["vars"]],
                      [tuple(x) for x in spec.get("inverted", ())],
                      name=spec.get("name", ""))


# ---------------------------------------------------------------- elements

class Poly:
    """num / prod(inverted_i ^ den_i), canonical."""

    __slots__ = ("ring", "num", "den", "_hash")

    def __init__(self, ring, num, den=None, _canon=True):
        self.ring = ring
        self.num = num
        self.den = ring._zero_d if den is None else tuple(den)
        self._hash = None
        if _canon:
            self._canonicalize()

    def _canonicalize(self):
        r = self.ring
        if not self.num:
            self.den = r._zero_d
            return
        if not any(self.den):
            return
        den = list(self.den)
        num = self.num
        for i in range(r.ninv):
            while den[i]:
                q = _raw_divexact(num, r.inv_raw[i], r.inv_lead[i])
                if q is None:
                    break
                num = q
                den[i] -= 1
        self.num = num
        self.den = tuple(den)

    # -- basic predicates
    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self):
        return not any(self.den) and (not self.num or list(self.num) == [self.ring._zero_m])

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.get(self.ring._zero_m, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                return self.is_constant() and self.constant_value() == other
            return NotImplemented
        return self.den == other.den and self.num == other.num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.den, frozenset(self.num.items())))
        return self._hash

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        return self.ring.const(other)

    def _lift(self, target_den):
        """Numerator rewritten over a larger denominator."""
        num = self.num
        r = self.ring
        for i, (a, b) in enumerate(zip(self.den, target_den)):
            if b > a:
                num = _raw_mul(num, _raw_pow(r.inv_raw[i], b - a, r.nvars))
        return num

    def __add__(self, other):
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return Poly(self.ring, _raw_add(self.num, other.num), self.den)
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        return Poly(self.ring, _raw_add(self._lift(den), other._lift(den)), den)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.num.items()}, self.den, _canon=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            if not c:
                return self.ring.zero()
            return Poly(self.ring, {m: v * c for m, v in self.num.items()}, self.den,
                        _canon=False)
        other = self._coerce(other)
        if not self.num or not other.num:
            return self.ring.zero()
        den = _madd(self.den, other.den)
        return Poly(self.ring, _raw_mul(self.num, other.num), den, _canon=any(den))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.ring.inverse(self) ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __truediv__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            return self * (1 / c)
        return self * self.ring.inverse(other)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def divexact(self, other):
        """self/other when other divides self in the ring, else None."""
        other = self._coerce(other)
        if self.ring.is_unit(other):
            return self * self.ring.inverse(other)
        num = self._lift(_madd(self.den, other.den))
        q = _raw_divexact(num, other.num)
        if q is None:
            return None
        return Poly(self.ring, q, self.den)

    # -- calculus
    def diff(self, name):
        r = self.ring
        i = r.index[name]
        out = r.zero()
        nd = {}
        for m, c in self.num.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                nd[tuple(mm)] = c * m[i]
        out = Poly(r, nd, self.den)
        for j, d in enumerate(self.den):
            if not d:
                continue
            dinv = Poly(r, r.inv_raw[j], None, _canon=False).diff(name)
            if not dinv:
                continue
            den = list(self.den)
            den[j] += 1
            out = out - Poly(r, self.num, tuple(den), _canon=False) * dinv * d
        return out

    # -- grading
    def weight(self):
        """Torus weight of a homogeneous element, or None."""
        r = self.ring
        w = r._raw_weight(self.num)
        if w is None:
            return None
        if not self.num:
            return None
        for i, d in enumerate(self.den):
            if d:
                w = tuple(a - d * b for a, b in zip(w, r.inv_wt[i]))
        return w

    def bigrade(self):
        r = self.ring
        d = r._raw_bigrade(self.num)
        if d is None:
            return INHOMOGENEOUS
        if not self.num:
            return INHOMOGENEOUS
        q, t = d
        for i, e in enumerate(self.den):
            if e:
                q -= e * r.inv_deg[i][0]
                t -= e * r.inv_deg[i][1]
        return (q, t)

    def variables(self):
        used = set()
        for m in self.num:
            for i, e in enumerate(m):
                if e:
                    used.add(i)
        for i, d in enumerate(self.den):
            if d:
                for m in self.ring.inv_raw[i]:
                    for j, e in enumerate(m):
                        if e:
                            used.add(j)
        return {self.ring.names[i] for i in used}

    def terms(self):
        """Sorted (monomial, coefficient) pairs of the numerator, grlex descending."""
        return sorted(self.num.items(), key=lambda kv: _grlex(kv[0]), reverse=True)

    # -- text
    def _mono_text(self, m):
        parts = []
        for n, e in zip(self.ring.names, m):
            if e == 1:
                parts.append(n)
            elif e:
                parts.append(f"{n}^{e}")
        return "*".join(parts)

    def _num_text(self):
        if not self.num:
            return "0"
        out = []
        for k, (m, c) in enumerate(self.terms()):
            mono = self._mono_text(m)
            neg = c < 0
            a = -c if neg else c
            if mono:
                body = mono if a == 1 else f"{_ftext(a)}*{mono}"
            else:
                body = _ftext(a)
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def to_text(self):
        s = self._num_text()
        if not any(self.den):
            return s
        dparts = []
        for n, d in zip(self.ring.inv_names, self.den):
            if d == 1:
                dparts.append(n)
            elif d:
                dparts.append(f"{n}^{d}")
        if len(self.num) > 1:
            s = f"({s})"
        dd = "*".join(dparts)
        if len(dparts) > 1:
            dd = f"({dd})"
        return f"{s}/{dd}"

    __str__ = to_text

    def __repr__(self):
        return f"Poly({self.to_text()})"

    def to_json(self):
        r = self.ring
        neg = [-d for d in self.den]
        return {
            "vars": list(r.names) + list(r.inv_names),
            "terms": [[list(m) + neg, c.numerator, c.denominator] for m, c in self.terms()],
        }

    @classmethod
    def from_json(cls, ring, obj):
        vars_ = obj["vars"]
        if list(vars_) != list(ring.names) + list(ring.inv_names):
            raise ValueError("variable list does not match ring")
        out = ring.zero()
        nv = ring.nvars
        for exps, a, b in obj["terms"]:
            m = tuple(exps[:nv])
            inv = exps[nv:]
            den = tuple(max(0, -e) for e in inv)
            p = Poly(ring, {m: Fraction(a, b)}, den, _canon=False)
            for i, e in enumerate(inv):
                if e > 0:
                    p = p * ring.inv_element(ring.inv_names[i]) ** e
            out = out + p
        return out


def _ftext(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def bigrade(p):
    """Common (q,t) bidegree of p, or INHOMOGENEOUS."""
    return p.bigrade()


# ---------------------------------------------------------------- substitution

def substitute(p, assignment, target=None):
    """Ring map sending each variable of p to a Poly of the target ring.

    Variables missing from ``assignment`` map to the variable of the same name
    in the target.  Images of the inverted elements must be units there.
    """
    src = p.ring
    if target is None:
        vals = [v for v in assignment.values() if isinstance(v, Poly)]
        target = vals[0].ring if vals else src
    imgs = []
    for n in src.names:
        if n in assignment:
            v = assignment[n]
            imgs.append(v if isinstance(v, Poly) else target.const(v))
        elif n in target.index:
            imgs.append(target.var(n))
        else:
            imgs.append(None)
    return _Substitution(src, target, imgs)(p)


class _Substitution:
    """Precompiled substitution with power caches; reusable across polys."""

    def __init__(self, src, target, imgs, inverse_images=None):
        self.src = src
        self.target = target
        self.imgs = imgs
        self._pow = {}
        self._inv = [None] * src.ninv
        # an inverted element whose image is not a unit in the target may still
        # have a prescribed inverse there (e.g. 1/det(block) -> det(other)/det)
        for name, v in (inverse_images or {}).items():
            self._inv[src.inv_names.index(name)] = v

    def _power(self, i, e):
        key = (i, e)
        v = self._pow.get(key)
        if v is None:
            if self.imgs[i] is None:
                raise ValueError(f"variable {self.src.names[i]} is not assigned")
            v = self.imgs[i] ** e if e > 1 else self.imgs[i]
            self._pow[key] = v
        return v

    def _inv_image(self, j):
        if self._inv[j] is None:
            img = self._raw(self.src.inv_raw[j])
            if not self.target.is_unit(img):
                raise ValueError(
                    f"image of inverted element {self.src.inv_names[j]} is not a unit in the target")
            self._inv[j] = self.target.inverse(img)
        return self._inv[j]

    def _raw(self, raw):
        t = self.target
        acc_num = {}
        acc = t.zero()
        for m, c in raw.items():
            term = None
            for i, e in enumerate(m):
                if e:
                    f = self._power(i, e)
                    term = f if term is None else term * f
            if term is None:
                term = t.const(c)
            else:
                term = term * c
            if not any(term.den):
                acc_num = _raw_add(acc_num, term.num)
            else:
                acc = acc + term
        return acc + Poly(t, acc_num, None, _canon=False)

    def __call__(self, p):
        if p.ring != self.src:
            raise ValueError("substitution applied to a poly of another ring")
        out = self._raw(p.num)
        for j, d in enumerate(p.den):
            if d:
                out = out * self._inv_image(j) ** d
        return out


def compile_substitution(src, target, assignment, inverse_images=None):
    imgs = []
    for n in src.names:
        if n in assignment:
            v = assignment[n]
            imgs.append(v if isinstance(v, Poly) else target.const(v))
        elif n in target.index:
            imgs.append(target.var(n))
        else:
            imgs.append(None)
    return _Substitution(src, target, imgs, inverse_images)


# ---------------------------------------------------------------- parsing

class _Parser:
    """Arithmetic expressions via the Python ast module (``^`` means power)."""

    def __init__(self, ring, allow_inverted=True):
        self.ring = ring
        self.allow_inverted = allow_inverted

    def parse(self, text):
        text = str(text).strip()
        if not text:
            raise ValueError("empty polynomial text")
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as e:
            raise ValueError(f"malformed polynomial text {text!r}") from e
        return self._eval(tree.body)

    def _eval(self, node):
        r = self.ring
        if isinstance(node, ast.BinOp):
            a = self._eval(node.left)
            if isinstance(node.op, ast.Pow):
                k = self._int(node.right)
                return a ** k
            b = self._eval(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            raise ValueError(f"unsupported operator {type(node.op).__name__}")
        if isinstance(node, ast.UnaryOp):
            a = self._eval(node.operand)
            if isinstance(node.op, ast.USub):
                return -a
            if isinstance(node.op, ast.UAdd):
                return a
            raise ValueError("unsupported unary operator")
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return r.const(node.value)
        if isinstance(node, ast.Name):
            if node.id in r.index:
                return r.var(node.id)
            if self.allow_inverted and node.id in r.inv_names:
                return r.inv_element(node.id)
            raise ValueError(f"unknown symbol {node.id!r}")
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    def _int(self, node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if (isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub)
                and isinstance(node.operand, ast.Constant)):
            return -node.operand.value
        raise ValueError("exponent must be an integer literal")


def poly_sum(items, ring):
    return reduce(lambda a, b: a + b, items, ring.zero())
