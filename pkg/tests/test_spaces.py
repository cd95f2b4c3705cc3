import pytest
import sympy

from braidmf.algebra import Poly
from braidmf.spaces import (cminus, cplus, fgt_pullback, insert, lie_derivative, potential_of, space,
                            unit_mf)

from conftest import sympy_equal


def oracle_potential(n):
    """Tr(X Ad_g(Y)) with X upper triangular, Y strictly upper, computed by sympy."""
    X = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"x{i + 1}{j + 1}") if i <= j else 0)
    Y = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"y{i + 1}{j + 1}") if i < j else 0)
    g = sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"g{i + 1}{j + 1}"))
    return (X * g * Y * g.inv()).trace()


@pytest.mark.parametrize("n", [2, 3])
def test_potential_matches_trace_oracle(n):
    assert sympy_equal(potential_of(space(n)), oracle_potential(n))


def test_n2_potential_closed_form():
    # [DERIVED] det * W = -y12 g21 (g11 (x11 - x22) + g21 x12)
    R = space(2).ring
    W = potential_of(space(2))
    closed = R.parse("-y12*g21*(g11*(x11 - x22) + g21*x12)") * R.inv_inverse("det")
    assert W == closed


def test_cplus_koszul_pair():
    F = cplus()
    R = F.ring
    a, b = F.D[(0, 1)], F.D[(1, 0)]
    assert a * b == potential_of(space(2))
    # [PAPER] the d/dtheta coefficient g11 (x11 - x22) + g21 x12
    assert a == R.parse("g11*(x11 - x22) + g21*x12")
    # [DERIVED] the theta coefficient carries g21, not g12
    assert b == R.parse("-g21*y12") * R.inv_inverse("det")


@pytest.mark.parametrize("make", [cplus, cminus, lambda: unit_mf(2), lambda: unit_mf(3)])
def test_basic_objects_square_to_potential(make):
    F = make()
    F.check()
    assert F.potential == potential_of(space(F.n))


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("sign", [1, -1])
def test_inserted_generators_at_n3(k, sign):
    F = insert(k, cplus() if sign > 0 else cminus(), 3)
    F.check()
    assert sympy_equal(F.potential, oracle_potential(3))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("side", ["left", "right"])
def test_potential_is_invariant(n, side):
    sp = space(n)
    W = potential_of(sp)
    for a in range(n):
        for b in range(a + 1, n):
            assert not lie_derivative(sp, W, side, a, b)


def test_framed_pullback_keeps_potential():
    F = fgt_pullback(unit_mf(2))
    assert "v1" in F.ring.names and "S" in F.ring.inv_names
    R = F.ring
    assert F.potential == R.parse("-y12*g21*(g11*(x11 - x22) + g21*x12)") * R.inv_inverse("det")


def test_describe_lists_variables_and_potential():
    text = space(2).describe()
    assert "x12: deg (2,0)" in text and "potential" in text
