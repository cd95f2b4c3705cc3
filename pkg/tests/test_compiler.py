import pytest
from hypothesis import given, settings, strategies as st

from braidmf.algebra import Character
from braidmf.braid import AffineBraidWord, parse_braid
from braidmf.compiler import (FORGET_WORDS, ConvExpr, EngineError, compile_affine, compile_framed,
                              convolve, evaluate, forget_instance, stabilization_certificate,
                              twist_homotopy, verify_braid3, verify_identity)
from braidmf.mf import EquivalenceFailure, certify_equiv, twist
from braidmf.spaces import cminus, cplus, unit_mf


@pytest.mark.parametrize("name", ["unit", "inverse", "jm", "mixed-relation", "twist"])
def test_identity_certificates(name):
    res = verify_identity(name)
    assert res
    for key, cert in res.items():
        assert cert.verify(), key


def test_jm_needs_the_twist():
    # without the twist the two sides differ
    lhs = convolve(cplus(), cplus())
    with pytest.raises(EquivalenceFailure):
        certify_equiv(lhs, twist(unit_mf(2), Character.chi(2, 1), Character.zero(2)))


def test_stabilization():
    c = stabilization_certificate(2)
    assert c.verify()
    assert c.target.canonical_json() != c.source.canonical_json()


@pytest.mark.parametrize("word", FORGET_WORDS)
def test_forget_instances(word):
    assert forget_instance(word).verify()


def test_twist_homotopy_moves_characters():
    F = twist(unit_mf(2), Character((1, 0)), Character((0, 2)))
    c = twist_homotopy(F, (2, -1))
    tgt = twist(unit_mf(2), Character((-1, 1)), Character((2, 1)))
    assert c.verify()
    assert c.target.canonical_json() == tgt.canonical_json()
    with pytest.raises(ValueError):
        twist_homotopy(cplus(), (1, 0))


def test_braid_relation_at_three_strands_needs_n3_convolution():
    with pytest.raises(EngineError):
        verify_braid3()


def test_expression_json_roundtrip():
    e = compile_affine(parse_braid("s1 D^-1 s1^-1", 2, affine=True))
    assert ConvExpr.from_json(e.to_json()) == e
    assert str(compile_framed(parse_braid("s1", 2))) == "fgt*(C+^(1))"


def test_evaluate_limits():
    with pytest.raises(EngineError):
        evaluate(compile_affine(parse_braid("s1 s2", 3)))
    with pytest.raises(EngineError):
        evaluate(compile_affine(parse_braid("s1", 4)))


LETTERS = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=3)


@settings(max_examples=12)
@given(LETTERS, LETTERS)
def test_evaluation_is_multiplicative(a, b):
    wa, wb = AffineBraidWord(2, tuple(a)), AffineBraidWord(2, tuple(b))
    whole = evaluate(compile_affine(wa * wb))
    parts = convolve(evaluate(compile_affine(wa)), evaluate(compile_affine(wb)))
    assert certify_equiv(whole, parts).verify()


@settings(max_examples=12)
@given(LETTERS, st.sampled_from([1, 2]), st.integers(0, 3))
def test_cancelling_pairs_do_not_change_the_class(a, g, pos):
    pos = min(pos, len(a))
    w = AffineBraidWord(2, tuple(a))
    w2 = AffineBraidWord(2, tuple(a[:pos]) + (g, -g) + tuple(a[pos:]))
    assert certify_equiv(evaluate(compile_affine(w)), evaluate(compile_affine(w2))).verify()
