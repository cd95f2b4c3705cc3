import itertools
from fractions import Fraction

import pytest

from braidmf.algebra import GradedRing
from braidmf.equivariant import (CorrectionFailure, EquivariantMF, LieAction, UEnv, abelian_lie,
                                 ce_d2, ce_differential, ce_invariants, nilpotent_radical,
                                 solve_correction)
from braidmf.linalg import PMat, rank_of
from braidmf.mf import Gen, MatrixFactorization
from braidmf.spaces import cplus, equivariant_catalog, nilpotent_action, space


def kostant(n):
    """Betti numbers of n_n: number of permutations of S_n by inversion count."""
    out = [0] * (n * (n - 1) // 2 + 1)
    for p in itertools.permutations(range(n)):
        out[sum(1 for i, j in itertools.combinations(range(n), 2) if p[i] > p[j])] += 1
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nilpotent_radical_is_a_lie_algebra(n):
    L = nilpotent_radical(n)
    assert L.dim == n * (n - 1) // 2
    assert L.check()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ce_differential_squares_to_zero(n):
    L = nilpotent_radical(n)
    U = UEnv(L)
    pbw = [()] + [(a,) for a in range(L.dim)] + [(a, b) for a in range(L.dim) for b in range(a, L.dim)]
    for p in range(0, 4):
        for w in itertools.combinations(range(L.dim), p):
            for u in pbw:
                e = {(u, w): Fraction(1)}
                assert not ce_differential(U, ce_differential(U, e)), (u, w)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_trivial_coefficient_homology_matches_kostant(n):
    L = nilpotent_radical(n)
    U = UEnv(L)
    basis = {p: list(itertools.combinations(range(L.dim), p)) for p in range(L.dim + 1)}
    ranks = {}
    for p in range(1, L.dim + 1):
        idx = {w: i for i, w in enumerate(basis[p - 1])}
        rows = []
        for w in basis[p]:
            img = ce_d2(U, {((), w): Fraction(1)})
            rows.append({idx[w2]: c for (u, w2), c in img.items()})
        ranks[p] = rank_of(rows)
    betti = [len(basis[p]) - ranks.get(p, 0) - ranks.get(p + 1, 0) for p in range(L.dim + 1)]
    assert betti == kostant(n)


def test_abelian_has_no_brackets():
    L = abelian_lie(3)
    assert all(not L.bracket(a, b) for a in range(3) for b in range(3))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("side", ["left", "right"])
def test_actions_are_representations(n, side):
    assert nilpotent_action(space(n), side).check_representation()


def test_catalog_total_differential_squares_to_potential():
    cat = equivariant_catalog(3)
    assert len(cat) == 16
    for name, E in cat.items():
        assert E.verify(), name
        assert not E.dtot_squared_defect(), name


def test_correction_failure_for_non_invariant_data():
    R = space(2).ring
    bad = LieAction(abelian_lie(1), R, [{"x11": R.one()}])
    with pytest.raises(CorrectionFailure):
        solve_correction(cplus(), bad)


def test_ce_invariants_polynomial_line():
    # C[u], u of weight -1, the line acts by d/du: invariants of the weight-0 part are
    # the constants when the generator has weight 0 and vanish otherwise
    Ru = GradedRing([("u", 0, 0, (-1,))])
    for ew, expect in ((0, (1, 0)), (1, (0, 0)), (2, (0, 0))):
        M = MatrixFactorization(Ru, [Gen(0, (0, 0), (ew,))], PMat(Ru, 1, 1), Ru.zero(), n=1)
        E = EquivariantMF(M, LieAction(abelian_lie(1), Ru, [{"u": Ru.one()}]))
        assert E.verify()
        assert ce_invariants(E, [0], [(0, 0)])[(0, 0)] == expect
