"""Finite and affine braid words.

Letters are signed integers: ``+i`` is sigma_i, ``-i`` its inverse.  In an
affine word the pole generator Delta_n is the letter ``+/-DELTA`` (= n, which is
out of the sigma range, so the two alphabets never collide).

The finite word problem is solved twice: by the left-greedy Garside normal
form, and by Dehornoy handle reduction (used as an independent oracle).
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field

__all__ = [
    "BraidWord", "AffineBraidWord", "parse_braid", "braids_equal",
    "normal_form", "GarsideNF", "handle_reduce", "jm", "bl", "fgt", "cnt",
    "affine_to_finite", "UNKNOWN", "random_word",
]

UNKNOWN = "unknown(radius exhausted)"


@dataclass(frozen=True)
class BraidWord:
    n: int
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if self.n < 1:
            raise ValueError("number of strands must be positive")
        for x in self.letters:
            if x == 0 or abs(x) > self.n - 1:
                raise ValueError(f"generator index {abs(x)} out of range for n={self.n}")

    affine = False

    @property
    def writhe(self):
        return sum(1 if x > 0 else -1 for x in self.letters)

    def __mul__(self, other):
        if other.n != self.n:
            raise ValueError("strand count mismatch")
        return type(self)(self.n, self.letters + other.letters)

    def inverse(self):
        return type(self)(self.n, tuple(-x for x in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return format_word(self)

    def to_json(self):
        return {"n": self.n, "affine": self.affine,
                "letters": [{"gen": _gen_name(self, x), "sign": 1 if x > 0 else -1}
                            for x in self.letters]}


@dataclass(frozen=True)
class AffineBraidWord(BraidWord):
    """Word in sigma_1..sigma_{n-1} and the pole generator Delta_n (letter +/-n)."""

    affine = True

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if self.n < 1:
            raise ValueError("number of strands must be positive")
        for x in self.letters:
            if x == 0 or abs(x) > self.n:
                raise ValueError(f"generator index {abs(x)} out of range for n={self.n}")

    @property
    def writhe(self):
        return sum((1 if x > 0 else -1) for x in self.letters if abs(x) < self.n)


def _gen_name(w, x):
    if w.affine and abs(x) == w.n:
        return "D"
    return f"s{abs(x)}"


def format_word(w):
    out = []
    for x in w.letters:
        g = _gen_name(w, x)
        out.append(g if x > 0 else g + "^-1")
    return " ".join(out)


_TOKEN = re.compile(r"^(s(\d+)|D)(\^(-?\d+))?$")


def parse_braid(text, n, affine=False):
    """Parse ``"s1 s2^-1 D"``-style text; powers ``s1^3`` are expanded."""
    letters = []
    for tok in text.replace("*", " ").split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"malformed token {tok!r}")
        k = int(m.group(4)) if m.group(4) else 1
        if m.group(1) == "D":
            if not affine:
                raise ValueError("D only allowed in affine words")
            g = n
        else:
            g = int(m.group(2))
            if g < 1 or g > n - 1:
                raise ValueError(f"generator index {g} out of range for n={n}")
        letters.extend([g if k > 0 else -g] * abs(k))
    return (AffineBraidWord if affine else BraidWord)(n, tuple(letters))


# ---------------------------------------------------------------- Garside

def _perm_mul(a, b):
    """Braid-order product: first a, then b (positions are permuted by b after a)."""
    return tuple(a[i] for i in b)


def _perm_inv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _right_descents(a):
    return {i for i in range(len(a) - 1) if a[i] > a[i + 1]}


def _left_descents(a):
    return _right_descents(_perm_inv(a))


def _swap_pos(a, i):
    a = list(a)
    a[i], a[i + 1] = a[i + 1], a[i]
    return tuple(a)


def _perm_word(a):
    """A reduced positive word (0-based indices) for the permutation braid a."""
    a = list(a)
    word = []
    # bubble sort from the right: each swap peels a right descent
    while True:
        for i in range(len(a) - 1):
            if a[i] > a[i + 1]:
                a[i], a[i + 1] = a[i + 1], a[i]
                word.append(i)
                break
        else:
            break
    return list(reversed(word))


def _perm_of_word(word, n):
    p = tuple(range(n))
    for i in word:
        p = _swap_pos(p, i)
    return p


@dataclass(frozen=True)
class GarsideNF:
    """Delta^inf * A_1 ... A_k with simple factors given as permutations."""
    n: int
    inf: int
    factors: tuple = field(default=())

    def to_word(self):
        """A braid word representing the normal form (Delta written positively)."""
        n = self.n
        delta = _perm_word(tuple(reversed(range(n))))
        letters = []
        if self.inf >= 0:
            letters += [i + 1 for i in delta] * self.inf
        else:
            letters += [-(i + 1) for i in reversed(delta)] * (-self.inf)
        for f in self.factors:
            letters += [i + 1 for i in _perm_word(f)]
        return BraidWord(n, tuple(letters))

    def factor_words(self):
        return [[i + 1 for i in _perm_word(f)] for f in self.factors]


def normal_form(w):
    """Left-greedy Garside normal form of a finite braid word."""
    n = w.n
    e = tuple(range(n))
    w0 = tuple(reversed(range(n)))

    def tau(p):  # conjugation by Delta
        return tuple(n - 1 - p[n - 1 - i] for i in range(n))

    inf = 0
    factors = []
    for x in w.letters:
        i = abs(x) - 1
        if x > 0:
            factors.append(_swap_pos(e, i))
        else:
            # sigma_i^-1 = Delta^-1 (Delta sigma_i^-1); push Delta^-1 to the front
            factors = [tau(f) for f in factors]
            inf -= 1
            factors.append(_swap_pos(w0, i))
    # left-weighting by repeated local moves
    changed = True
    while changed:
        changed = False
        for k in range(len(factors) - 1, 0, -1):
            a, b = factors[k - 1], factors[k]
            while True:
                bad = _left_descents(b) - _right_descents(a)
                if not bad:
                    break
                i = min(bad)
                a = _swap_pos(a, i)
                b = _left_mul_s(b, i)
                changed = True
            factors[k - 1], factors[k] = a, b
        # absorb Deltas at the front and drop trailing identities
        while factors and factors[0] == w0:
            factors.pop(0)
            inf += 1
        kept = [f for f in factors if f != e]
        if len(kept) != len(factors):
            factors = kept
            changed = True
        # a Delta that is not leading gets pulled to the front through tau
        for k, f in enumerate(factors):
            if f == w0:
                factors = [tau(g) for g in factors[:k]] + factors[k + 1:]
                inf += 1
                changed = True
                break
    return GarsideNF(n, inf, tuple(factors))


def _left_mul_s(b, i):
    """s_i * b : swap the values i and i+1."""
    return tuple(i + 1 if x == i else i if x == i + 1 else x for x in b)


# ---------------------------------------------------------------- handles

def _free_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def handle_reduce(word, max_steps=200000):
    """Dehornoy handle reduction of a list of signed letters.

    Returns the reduced word; a word represents the identity iff it reduces to
    the empty word.
    """
    w = _free_reduce(list(word))
    steps = 0
    while True:
        h = _find_handle(w)
        if h is None:
            return w
        p, q = h
        i = abs(w[p])
        e = 1 if w[p] > 0 else -1
        mid = []
        for x in w[p + 1:q]:
            if abs(x) == i + 1:
                d = 1 if x > 0 else -1
                mid += [-e * (i + 1), d * i, e * (i + 1)]
            else:
                mid.append(x)
        w = _free_reduce(w[:p] + mid + w[q + 1:])
        steps += 1
        if steps > max_steps:
            raise RuntimeError("handle reduction did not terminate within the step bound")


def _find_handle(w):
    """Shortest handle sigma_i^e u sigma_i^-e (u free of sigma_i, sigma_{i-1})."""
    best = None
    last = {}
    for q, x in enumerate(w):
        i = abs(x)
        p = last.get(i)
        if p is not None and w[p] == -x:
            blocked = any(abs(y) in (i, i - 1) for y in w[p + 1:q])
            if not blocked and (best is None or q - p < best[1] - best[0]):
                best = (p, q)
        last[i] = q
        # a sigma_{i} letter blocks earlier sigma_{i+1}-handles
        last.pop(i + 1, None)
    return best


# ---------------------------------------------------------------- equality

def affine_to_finite(w):
    """Embed the affine braid group on n strands into Br_{n+1}: Delta_n -> sigma_n^2."""
    letters = []
    for x in w.letters:
        if abs(x) == w.n:
            letters += [x, x]
        else:
            letters.append(x)
    return BraidWord(w.n + 1, tuple(letters))


def braids_equal(w1, w2, method="garside", radius=6, max_extra=4):
    """Decide w1 == w2.

    Finite words: ``garside`` (default) or ``handle``.  Affine words: the
    default embeds into Br_{n+1}; ``rewrite`` runs a bounded breadth-first
    search over the defining relations and may return :data:`UNKNOWN`.
    """
    if w1.n != w2.n or w1.affine != w2.affine:
        raise ValueError("words live in different groups")
    if w1.affine:
        if method == "rewrite":
            return _rewrite_equal(w1, w2, radius, max_extra)
        w1, w2 = affine_to_finite(w1), affine_to_finite(w2)
    if method == "handle":
        return not handle_reduce(w1.letters + w2.inverse().letters)
    return normal_form(w1) == normal_form(w2)


def _affine_relations(n):
    """Defining relations as pairs of positive letter tuples (lhs, rhs)."""
    rels = []
    D = n
    if n >= 2:
        s = n - 1
        rels.append(((s, D, s, D), (D, s, D, s)))
    for i in range(1, n - 1):
        rels.append(((i, D), (D, i)))
    for i in range(1, n - 1):
        rels.append(((i, i + 1, i), (i + 1, i, i + 1)))
    for i in range(1, n):
        for j in range(i + 2, n):
            rels.append(((i, j), (j, i)))
    return rels


def _positive_class_search(w1, w2, max_states):
    """Explore the (finite) positive-relation class of w1 looking for w2."""
    a, b = tuple(w1.letters), tuple(w2.letters)
    if len(a) != len(b):
        return False
    rules = []
    for lhs, rhs in _affine_relations(w1.n):
        rules.append((lhs, rhs))
        rules.append((rhs, lhs))
    seen = {a}
    frontier = deque([a])
    while frontier:
        word = frontier.popleft()
        if word == b:
            return True
        for sub, rep in rules:
            k = len(sub)
            for p in range(len(word) - k + 1):
                if word[p:p + k] == sub:
                    nw = word[:p] + rep + word[p + k:]
                    if nw not in seen:
                        if len(seen) >= max_states:
                            return UNKNOWN
                        seen.add(nw)
                        frontier.append(nw)
    return False


def _rewrite_equal(w1, w2, radius, max_extra):
    """Relation search: exact on positive words, bounded BFS otherwise."""
    if all(x > 0 for x in w1.letters + w2.letters):
        r = _positive_class_search(w1, w2, max_states=20000 * radius)
        if r is not UNKNOWN:
            return r
    start = tuple(_free_reduce(list(w1.letters + w2.inverse().letters)))
    if not start:
        return True
    rules = []
    for lhs, rhs in _affine_relations(w1.n):
        # every cyclic relator r = lhs rhs^-1 gives rules: subword -> complement
        rel = list(lhs) + [-x for x in reversed(rhs)]
        L = len(rel)
        for sign in (1, -1):
            r = rel if sign == 1 else [-x for x in reversed(rel)]
            for rot in range(L):
                rr = r[rot:] + r[:rot]
                for k in range(1, L):
                    sub = tuple(rr[:k])
                    rep = tuple(-x for x in reversed(rr[k:]))
                    if len(rep) <= len(sub) + 2:
                        rules.append((sub, rep))
    rules = sorted(set(rules))
    limit = len(start) + max_extra
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        word, d = frontier.popleft()
        if d >= radius:
            continue
        for sub, rep in rules:
            k = len(sub)
            for p in range(len(word) - k + 1):
                if word[p:p + k] == sub:
                    nw = tuple(_free_reduce(list(word[:p] + rep + word[p + k:])))
                    if not nw:
                        return True
                    if len(nw) <= limit and nw not in seen:
                        seen.add(nw)
                        frontier.append((nw, d + 1))
    return UNKNOWN


# ---------------------------------------------------------------- JM / BL

def jm(n, i):
    """delta_i = s_i ... s_{n-1}^2 ... s_i."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"JM index {i} out of range for n={n}")
    up = list(range(i, n))
    return BraidWord(n, tuple(up + up[::-1]))


def bl(n, i):
    """Delta_i = s_i ... s_{n-1} Delta_n s_{n-1} ... s_i (bl(n, n) = Delta_n)."""
    if not 1 <= i <= n:
        raise ValueError(f"BL index {i} out of range for n={n}")
    up = list(range(i, n))
    return AffineBraidWord(n, tuple(up + [n] + up[::-1]))


def fgt(w):
    """Forget the pole: delete the Delta_n letters."""
    if not w.affine:
        return w
    return BraidWord(w.n, tuple(x for x in w.letters if abs(x) != w.n))


def cnt(a, b, wrap=1):
    """Insert b (on m strands) in place of the pole of the affine word a.

    The m new strands sit to the right of a's strands (the pole side), so the
    sigma letters of a are unchanged and b's letters shift by n.  A pole letter
    of a becomes the wrap of strand n around the inserted cable; when b is
    affine the pole survives and the wrap also goes around it.  ``wrap=-1``
    flips the over/under convention of the wrap.
    """
    if not a.affine:
        raise ValueError("first argument must be an affine word")
    n, m = a.n, b.n if b is not None else 0
    if b is not None and len(b.letters) == 0 and m == 0:
        b = None
    N = n + m
    aff = b is not None and b.affine
    cable = list(range(n, N))
    out = []
    for x in a.letters:
        if abs(x) != n:
            out.append(x)
            continue
        s = 1 if x > 0 else -1
        if aff:
            core = cable + [N] + cable[::-1]
        else:
            core = cable + cable[::-1]
        piece = [s * wrap * c if c != N else s * N for c in core]
        if s < 0:
            piece = piece[::-1]
        out += piece
    if b is not None:
        for x in b.letters:
            sgn = 1 if x > 0 else -1
            if b.affine and abs(x) == m:
                out.append(sgn * N)
            else:
                out.append(sgn * (abs(x) + n))
    cls = AffineBraidWord if aff else BraidWord
    return cls(N, tuple(out))


def random_word(n, length, rng=None, affine=False):
    rng = rng or random.Random(0)
    top = n if affine else n - 1
    letters = [rng.choice([1, -1]) * rng.randint(1, top) for _ in range(length)]
    return (AffineBraidWord if affine else BraidWord)(n, tuple(letters))
