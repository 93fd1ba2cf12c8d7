import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from enbtorus.cycpoly import DigitExponent
from enbtorus.errors import (DenominatorNotOne, InvalidArgument, NotABasis, NotDivisor,
                             NotInSubfield, NotPrime, ZeroElement)
from enbtorus.ffield import (Fp, OpRecorder, build_field, is_irreducible, mat_inv, mat_mul,
                             pm_divmod, pm_mul, pm_roots)

X = sympy.Symbol("x")


@pytest.fixture(scope="module")
def field():
    return build_field(29, 15, seed=3)


def test_fp_arithmetic():
    a, b = Fp(5, 7), Fp(4, 7)
    assert a + b == 2 and a * b == 6 and a - b == 1 and b - a == 6
    assert a / b == Fp(3, 7) and 1 / a == Fp(3, 7)
    assert a ** -1 * a == 1
    assert Fp(2, 7).sqrt() ** 2 == 2
    assert not Fp(3, 7).is_square()


@given(st.lists(st.integers(0, 12), min_size=2, max_size=6).filter(lambda c: c[-1]))
@settings(max_examples=60, deadline=None)
def test_irreducibility_matches_sympy(coeffs):
    q = 13
    f = tuple(coeffs)
    ref = sympy.Poly(list(reversed(f)), X, modulus=q).is_irreducible
    assert is_irreducible(f, q) == ref


def test_poly_divmod_and_roots():
    q = 11
    a = pm_mul((1, 1), (3, 0, 1), q)
    quo, rem = pm_divmod(a, (1, 1), q)
    assert quo == (3, 0, 1) and not any(rem)
    assert pm_roots(pm_mul((-2, 1), (-5, 1), q), q) == [2, 5]


def test_mat_inv_roundtrip_and_singular():
    q = 7
    m = [[1, 2], [3, 4]]
    assert mat_mul(m, mat_inv(m, q), q) == [[1, 0], [0, 1]]
    with pytest.raises(NotABasis):
        mat_inv([[1, 2], [2, 4]], q)


def test_build_field_validation():
    with pytest.raises(NotPrime):
        build_field(15, 3)
    with pytest.raises(InvalidArgument):
        build_field(7, 1)


def test_field_axioms(field, rng):
    for _ in range(20):
        a, b, c = (field.random(rng) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * field.inv(a) == 1
        assert a / a == 1


def test_inverse_of_zero(field):
    with pytest.raises(ZeroElement):
        field.inv(field.zero())


def test_element_order_divides_group_order(field, rng):
    x = field.random(rng)
    assert field.pow(x, field.q ** field.n - 1).is_one()


def test_frobenius_is_qth_power(field, rng):
    x = field.random(rng)
    assert field.frobenius(x) == field.pow(x, field.q)
    assert field.frobenius(x, 15) == x
    assert field.frobenius(field.frobenius(x, 4), 3) == field.frobenius(x, 7)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=15), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_exp_base_q_matches_pow(digits, seed):
    f = build_field(29, 15, seed=3)
    x = f.random(random.Random(seed))
    e = DigitExponent(digits)
    want = f.pow(x, e.evaluate(f.q)) if digits and any(digits) else f.one()
    assert f.exp_base_q(x, e) == want


def test_exp_base_q_errors(field, rng):
    with pytest.raises(DenominatorNotOne):
        field.exp_base_q(field.random(rng), DigitExponent((1,), 3))
    with pytest.raises(ZeroElement):
        field.exp_base_q(field.zero(), DigitExponent((1,)))


def test_exp_base_q_operation_bound(field, rng):
    digits = (-8, 7, 0, -5, 4, -3, 0, 1)
    rec = OpRecorder()
    field.exp_base_q(field.random(rng), DigitExponent(digits), rec)
    B = max(abs(c) for c in digits)
    nz = sum(1 for c in digits if c)
    assert rec.frobenius <= nz
    assert rec.fqn_mul <= len(digits) * (B.bit_length()) + B.bit_length() - 1
    assert rec.inversion == 1


@pytest.mark.parametrize("d", [1, 3, 5, 15])
def test_subfield_roundtrip(field, rng, d):
    coords = [rng.randrange(field.q) for _ in range(d)]
    x = field.subfield_embed(coords, d)
    assert field.in_subfield(x, d)
    assert field.subfield_project(x, d) == tuple(coords)


def test_subfield_errors(field, rng):
    with pytest.raises(NotDivisor):
        field.subfield_project(field.one(), 4)
    x = field.random(rng)
    with pytest.raises(NotInSubfield):
        field.subfield_project(x, 3)


def test_norm_lands_in_subfield(field, rng):
    x = field.random(rng)
    assert field.in_subfield(field.norm_to_subfield(x, 5), 5)


def test_text_roundtrip(field, rng):
    x = field.random(rng)
    assert field.parse(x.to_text()) == x


def test_power_frobenius_cost_grows_with_q(rng):
    counts = []
    for q in (29, 239, 2039):
        f = build_field(q, 5, seed=1)
        rec = OpRecorder()
        f.frobenius(f.random(rng), 1, rec)
        counts.append(rec.frobenius_fqn_mul)
    assert counts[0] < counts[1] < counts[2]
