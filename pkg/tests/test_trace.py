from pathlib import Path

import pytest

from braidmf.trace import (PoincareTable, TraceError, closure_complex, homology_of_closure,
                           twist_by_line_bundle, wedge_tautological)

GOLDEN = Path(__file__).parent / "golden"


def hilbert_x(qmax):
    """Hilbert series of C[x], deg x = (2, 0), truncated: an independent oracle."""
    return {(q, 0): 1 for q in range(0, qmax + 1, 2)}


def summand(tab, k, parity):
    return {(q, t): d for (kk, p, q, t), d in tab.rows.items() if kk == k and p == parity}


def test_unknot_on_one_strand_is_a_polynomial_ring():
    tab = homology_of_closure("", 1, qmax=10, tmax=6, normalized=False)
    for k in (0, 1):
        assert summand(tab, k, 0) == hilbert_x(10)
        assert summand(tab, k, 1) == {}


def test_unreduced_adds_the_y_series():
    red = homology_of_closure("", 1, qmax=6, tmax=6, normalized=False)
    unr = homology_of_closure("", 1, qmax=6, tmax=6, normalized=False, unreduced=True)
    for (k, p, q, t), d in unr.rows.items():
        assert d == sum(red.rows.get((k, p, q, t - 2 * m), 0) for m in range(t // 2 + 1))


def test_closure_complexes_are_complexes():
    for word, n in (("", 1), ("s1", 2), ("s1^-1", 2), ("s1 s1 s1", 2)):
        C = closure_complex(word, n)
        C.check()
        for k in range(n + 1):
            wedge_tautological(C, k).check()


def test_markov_small_window():
    assert homology_of_closure("s1", 2, qmax=8, tmax=8) == homology_of_closure("", 1, qmax=8, tmax=8)


def test_markov_fails_with_the_dual_convention():
    # documents why the default takes wedges of the tautological bundle itself
    a = homology_of_closure("s1", 2, qmax=6, tmax=6, dual=True)
    b = homology_of_closure("", 1, qmax=6, tmax=6, dual=True)
    assert a != b


def test_twist_theorem_small_window():
    lhs = homology_of_closure("s1 s1 s1", 2, qmax=8, tmax=8, normalized=False)
    rhs = homology_of_closure("s1", 2, qmax=8, tmax=8, normalized=False, line=(1, 0))
    assert lhs == rhs
    # the opposite line bundle does not match: the check has teeth
    wrong = homology_of_closure("s1", 2, qmax=8, tmax=8, normalized=False, line=(-1, 0))
    assert lhs != wrong


def test_last_line_bundle_is_trivial_on_the_slice():
    a = homology_of_closure("s1", 2, qmax=6, tmax=6, normalized=False, line=(0, 3))
    b = homology_of_closure("s1", 2, qmax=6, tmax=6, normalized=False)
    assert a == b


def test_braid_relations_give_equal_tables():
    a = homology_of_closure("s1^-1 s1 s1", 2, qmax=8, tmax=8)
    assert a == homology_of_closure("s1 s1 s1^-1", 2, qmax=8, tmax=8)
    assert a == homology_of_closure("s1", 2, qmax=8, tmax=8)


@pytest.mark.parametrize("name,n,word", [("unknot", 1, ""), ("hopf", 2, "s1 s1"),
                                         ("trefoil", 2, "s1 s1 s1")])
def test_golden_tables(name, n, word):
    # regression tables written by this code at qmax = tmax = 12
    want = PoincareTable.from_csv((GOLDEN / f"{name}.csv").read_text())
    assert homology_of_closure(word, n, qmax=12, tmax=12) == want


def test_tables_are_deterministic_and_integral():
    a = homology_of_closure("s1 s1", 2, qmax=8, tmax=8)
    b = homology_of_closure("s1 s1", 2, qmax=8, tmax=8)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    assert a.nonnegative_integers()
    assert PoincareTable.from_csv(a.to_csv()) == a


def test_ambiguous_normalization_is_flagged():
    tab = homology_of_closure("s1 s1", 2, qmax=4, tmax=4)
    assert tab.meta["ambiguous"] == [0, 2]


def test_line_bundle_twist_shifts_weights():
    C = closure_complex("s1", 2)
    D = twist_by_line_bundle(C, (2, 0))
    assert D.line == (2, 0)
    assert all(g2.weight[0] == g1.weight[0] + 2 for g1, g2 in zip(C.gens, D.gens))


def test_out_of_range():
    with pytest.raises(TraceError):
        wedge_tautological(closure_complex("", 1), 2)
