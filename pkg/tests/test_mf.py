import json

import pytest
from hypothesis import given, strategies as st

from braidmf.algebra import GradedRing
from braidmf.linalg import PMat
from braidmf.mf import (Certificate, EquivalenceFailure, MatrixFactorization, certify_equiv,
                        direct_sum, koszul_mf, reduce, tensor, twist)


def toy():
    return GradedRing([("x", 2, 0, (1, 0)), ("y", 0, 2, (-1, 0)), ("z", 1, 1, (0, 0))],
                      name="toy")


# (a, b) with a*b of bidegree (2,2) and weight 0
PAIRS = [("x", "y"), ("y", "x"), ("z", "z"), ("x*y", "1"), ("1", "x*y"), ("z^2", "1"), ("z", "-z")]


def kz(R, names):
    return koszul_mf(R, [(R.parse(a), R.parse(b)) for a, b in names])


pairs = st.lists(st.sampled_from(PAIRS), min_size=1, max_size=3)


@given(pairs)
def test_koszul_squares_to_potential(names):
    R = toy()
    F = kz(R, names)
    F.check()
    assert F.rank == 2 ** len(names)
    assert (F.D @ F.D) == PMat.identity(R, F.rank).scale(F.potential)


@given(pairs, pairs)
def test_tensor_adds_potentials(p1, p2):
    R = toy()
    F, G = kz(R, p1), kz(R, p2)
    T = tensor(F, G)
    assert T.potential == F.potential + G.potential
    assert T.rank == F.rank * G.rank


@given(pairs)
def test_reduce_certificate_verifies(names):
    R = toy()
    F = kz(R, names)
    G, cert = reduce(F, verify=True)
    assert cert.verify()
    G.check()
    # no unit entry survives
    assert not any(R.is_unit(v) for v in G.D.entries.values())


def test_unit_pair_cancels():
    R = toy()
    # a Koszul factor with a unit coefficient is contractible
    assert reduce(kz(R, [("1", "x*y"), ("z", "z")]))[0].rank == 0
    K = kz(R, [("z", "z")])
    F = direct_sum(K, tensor(K, kz(R, [("1", "0")])))
    G, cert = reduce(F, verify=True)
    assert G.rank == 2 and cert.verify()
    assert certify_equiv(F, K).verify()
    # a unit potential kills everything
    U = GradedRing([("x", 2, 0, (1, 0)), ("y", 0, 2, (-1, 0)), ("z", 1, 1, (0, 0))],
                   [("u", "x*y + z^2")])
    assert reduce(kz(U, [("x", "y"), ("z", "z")]))[0].rank == 0


def test_twist_shifts_weights_only():
    R = toy()
    F = kz(R, [("x", "y")])
    F.n = 1
    G = twist(F, (2,), (0,))
    assert [g.weight[0] - f.weight[0] for f, g in zip(F.gens, G.gens)] == [2, 2]
    assert G.D == F.D
    with pytest.raises(ValueError):
        twist(F, (1, 1), (0,))


def test_json_roundtrip():
    R = toy()
    F = kz(R, [("x", "y"), ("z", "z")])
    G = MatrixFactorization.from_json(json.loads(json.dumps(F.to_json())))
    assert G.canonical_json() == F.canonical_json()


def test_certify_equiv_rejects_different_objects():
    R = toy()
    with pytest.raises(EquivalenceFailure):
        certify_equiv(kz(R, [("x", "y")]), kz(R, [("z", "z")]))
    F = kz(R, [("x", "y")])
    with pytest.raises(EquivalenceFailure):
        certify_equiv(F, direct_sum(F, F))


def test_broken_certificate_fails_verification():
    R = toy()
    F = kz(R, [("z", "z")])
    c = certify_equiv(F, F)
    assert c.verify()
    bad = Certificate(F, F, c.phi.scale(R.const(2)), c.psi, c.h, c.k)
    assert not bad.verify()


def test_check_rejects_bad_differential():
    R = toy()
    F = kz(R, [("x", "y")])
    D = F.D.copy()
    D[(0, 1)] = D[(0, 1)] + R.one()
    with pytest.raises(ValueError):
        MatrixFactorization(R, F.gens, D, F.potential)


def test_unimodular_split_reduces_pair():
    # row (z, z^2 + ...) style: entries generating the unit ideal without a unit entry
    R = GradedRing([("a", 0, 0, (0,)), ("b", 0, 0, (0,))], name="split")
    F = koszul_mf(R, [(R.parse("a"), R.zero()), (R.parse("1 - a"), R.zero())])
    G, cert = reduce(F, verify=True)
    assert cert.verify()
    assert G.rank < F.rank
