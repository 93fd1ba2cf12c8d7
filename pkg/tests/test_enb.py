import random

import pytest

from enbtorus.enb import (Curve, DegenerateTriple, enable_table_multiplication, enb_multiply,
                          field_sqrt, find_curve_setup, gamma, hasse_orders, in_image,
                          load_setup, nq_value, velu, x_translate)
from enbtorus.errors import HasseInfeasible, InvalidArgument, NotPrime
from enbtorus.ffield import mat_mul, pm_eval


def test_hasse_infeasible():
    with pytest.raises(HasseInfeasible):
        find_curve_setup(5, 15)


def test_bad_arguments():
    with pytest.raises(NotPrime):
        find_curve_setup(221, 15)
    with pytest.raises(InvalidArgument):
        find_curve_setup(239, 9)


def test_hasse_interval_239():
    # |t| <= 2 sqrt(239) ~ 30.9, so the integer orders are 210..270
    r = hasse_orders(239)
    assert (r.start, r.stop - 1) == (210, 270)
    assert [N for N in r if N % 15 == 0] == [210, 225, 240, 255, 270]


def test_gamma_concrete_f7():
    # y^2 = x^3 + 2x + 3 over F_7; C - A = (3, 6), A - B = (6, 0)
    E = Curve(7, 0, 0, 0, 2, 3)
    A, B, C = E.point(2, 1), E.point(3, 1), E.point(6, 0)
    assert gamma(E, A, B, C) == 5


def test_gamma_degenerate():
    E = Curve(7, 0, 0, 0, 2, 3)
    A = E.point(2, 1)
    with pytest.raises(DegenerateTriple):
        gamma(E, A, A, E.point(3, 1))


def test_point_count_matches_enumeration():
    E = Curve(31, 1, 2, 3, 4, 5)
    pts = E.points()
    assert len(pts) == E.order()
    assert all(E.contains(P) for P in pts)
    assert all(E.mul(len(pts), P) is None for P in pts[:20])


def test_group_law(rng):
    E = Curve(101, 3, 1, 4, 1, 5)
    for _ in range(30):
        P, Q, R = (E.random_point(rng) for _ in range(3))
        assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
        assert E.add(P, E.neg(P)) is None
        assert E.contains(E.add(P, Q))


def test_velu_is_homomorphism_with_kernel_T(setup_15, rng):
    E, iso, T = setup_15.E, setup_15.isogeny, setup_15.T
    assert E.order_of(T, 15) == 15
    for k in range(15):
        assert iso(E.mul(k, T)) is None
    for _ in range(30):
        P, Q = E.random_point(rng), E.random_point(rng)
        assert setup_15.E_prime.contains(iso(P))
        assert iso(E.add(P, Q)) == setup_15.E_prime.add(iso(P), iso(Q))


def test_kernel_poly_vanishes_on_kernel(setup_15):
    E, iso, T, q = setup_15.E, setup_15.isogeny, setup_15.T, setup_15.q
    psi = iso.kernel_poly()
    kernel_x = {int(E.mul(k, T)[0]) for k in range(1, 15)}
    roots = {x for x in range(q) if pm_eval(psi, x, q) == 0}
    assert roots == kernel_x and len(roots) == 7


def test_generator_of_quotient(setup_15):
    iso, A = setup_15.isogeny, setup_15.A
    E2 = iso.codomain
    assert in_image(iso, E2.mul(15, A))
    assert not any(in_image(iso, E2.mul(k, A)) for k in (1, 3, 5))


def test_fiber_defines_the_field(setup_15):
    ctx, B = setup_15.ctx, setup_15.B
    assert ctx.defining_poly == setup_15.fiber_poly
    assert len(setup_15.fiber_poly) == 16
    assert setup_15.E.contains(B)
    assert B[0] == ctx.gen()
    A = setup_15.A
    assert setup_15.isogeny(B) == setup_15.E.lift(A, ctx)


def test_frobenius_translates_B(setup_15):
    ctx, E, B, T = setup_15.ctx, setup_15.E, setup_15.B, setup_15.T
    frob = (ctx.frobenius(B[0]), ctx.frobenius(B[1]))
    assert frob == E.sub(B, E.lift(T, ctx))


def test_periods_sum_to_one(setup_15):
    total = setup_15.periods[0]
    for u in setup_15.periods[1:]:
        total = total + u
    assert total.is_one()


def test_basis_matrices_inverse(setup_15):
    n, q = setup_15.n, setup_15.q
    prod = mat_mul(setup_15.M_enb_to_pow, setup_15.M_pow_to_enb, q)
    assert prod == [[int(i == j) for j in range(n)] for i in range(n)]


def test_frobenius_shifts_unit_vector(ctx_15):
    e0 = ctx_15.element([1] + [0] * 14, "enb")
    assert ctx_15.frobenius(e0).coeffs == (0, 1) + (0,) * 13
    assert ctx_15.one("enb").coeffs == (1,) * 15


def test_frobenius_shift_matches_power(ctx_15, rng):
    for _ in range(100):
        x = ctx_15.random(rng, "enb")
        k = rng.randrange(1, 15)
        p = ctx_15.frobenius(ctx_15.convert(x, "power"), k)
        assert ctx_15.frobenius(x, k) == ctx_15.convert(p, "enb")


def test_enb_multiply_identity_and_axioms(ctx_15, rng):
    one = ctx_15.one("enb")
    for _ in range(20):
        x, y, z = (ctx_15.random(rng, "enb") for _ in range(3))
        assert enb_multiply(x, one) == x
        assert enb_multiply(x, y) == enb_multiply(y, x)
        assert enb_multiply(enb_multiply(x, y), z) == enb_multiply(x, enb_multiply(y, z))


def test_table_path_agrees_with_oracle(rng):
    s = find_curve_setup(239, 15, seed=0)
    enable_table_multiplication(s)
    ctx = s.ctx
    for _ in range(1000):
        x, y = ctx.random(rng, "enb"), ctx.random(rng, "enb")
        assert enb_multiply(x, y, path="table", setup=s) == enb_multiply(x, y)
        assert x * y == enb_multiply(x, y)


def test_enb_multiply_rejects_power(ctx_15):
    with pytest.raises(InvalidArgument):
        enb_multiply(ctx_15.one(), ctx_15.one())


def _gamma_identity_sample(E, pts, rng):
    a1, a2 = E.a1, E.a2
    A, B, C, D = (rng.choice(pts) for _ in range(4))
    g = gamma(E, A, B, C)
    xt = lambda P, Q: x_translate(E, P, Q)
    gABD, gACD, gACB = gamma(E, A, B, D), gamma(E, A, C, D), gamma(E, A, C, B)
    return [
        gamma(E, B, C, A) == g,
        -gamma(E, B, A, C) - a1 == g,
        -gamma(E, E.neg(A), E.neg(B), E.neg(C)) - a1 == g,
        gABD + gamma(E, B, C, D) + gamma(E, C, A, D) == g - a1,
        gABD * gACD == xt(A, D) + g * gACD + gACB * gABD + a2 + xt(A, B) + xt(A, C),
        gABD * gABD == xt(A, D) + xt(B, D) - a1 * gABD + xt(A, B) + a2,
    ]


def test_gamma_identities(setup_15, rng):
    E = setup_15.E
    pts = [P for P in E.points() if P is not None]
    done = 0
    while done < 100:
        try:
            checks = _gamma_identity_sample(E, pts, rng)
        except (DegenerateTriple, ZeroDivisionError):
            continue
        assert all(checks)
        done += 1


def test_field_sqrt(ctx_15, rng):
    for _ in range(5):
        x = ctx_15.random(rng)
        r = field_sqrt(ctx_15, x * x)
        assert r * r == x * x


@pytest.mark.parametrize("q,n,expected", [
    (239, 15, 15),          # 3 and 5 prime to q - 1
    (31, 15, 3**3 * 5**3),  # v_3(30) = v_5(30) = 1: max(2*1 + 1, 2*1) = 3
    (19, 15, 3**5 * 5),     # v_3(18) = 2: max(5, 2); 5 prime to 18
    (43, 21, 3**3 * 7**3),
])
def test_nq_value(q, n, expected):
    assert nq_value(q, n) == expected


def test_serialization_roundtrip(setup_15):
    text = setup_15.serialize()
    again = load_setup(text)
    assert again.serialize() == text
    assert again.fingerprint() == setup_15.fingerprint()
    assert again.M_enb_to_pow == setup_15.M_enb_to_pow


def test_serialization_rejects_garbage(setup_15):
    with pytest.raises(InvalidArgument):
        load_setup("hello")
    bad = setup_15.serialize().replace("fiber ", "fiber 1 ")
    with pytest.raises(InvalidArgument):
        load_setup(bad)


def test_search_is_deterministic():
    a = find_curve_setup(239, 15, seed=11)
    b = find_curve_setup(239, 15, seed=11)
    assert a.serialize() == b.serialize()


def test_velu_direct_small():
    E = Curve(101, 3, 1, 4, 1, 5)
    N = E.order()
    rng = random.Random(1)
    for ell in (3, 5, 7):
        if N % ell:
            continue
        T = None
        while T is None:
            P = E.mul(N // ell, E.random_point(rng))
            T = P
        iso = velu(E, T, ell)
        for _ in range(10):
            P, Q = E.random_point(rng), E.random_point(rng)
            assert iso(E.add(P, Q)) == iso.codomain.add(iso(P), iso(Q))
