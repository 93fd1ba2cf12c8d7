"""The nine acceptance criteria.  Each test prints one `criterion N: PASS|FAIL` line."""

import random
import time

import pytest
import sympy

from enbtorus.cli import bench_theta, main
from enbtorus.cycpoly import (apostol_resultant, bezout_polys, check_inverse_bounds,
                              cyclotomic_resultant, euler_phi)
from enbtorus.enb import DegenerateTriple, enb_multiply, find_curve_setup, gamma, x_translate
from enbtorus.errors import CongruenceViolation, NotSquarefreeOdd
from enbtorus.ffield import build_field
from enbtorus.keyex import random_aux, simulate_exchange
from enbtorus.torus import (check_params, inverse_n_digits, random_torus_element, root_n, theta,
                            theta_inverse, theta_tilde, theta_tilde_prime)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_1_bezout_golden(report):
    t = time.perf_counter()
    w = {e: v * 15 for e, v in bezout_polys(15).items()}
    golden = {1: (1,), 3: (-2, -1), 5: (-4, -3, -2, -1), 15: (-8, 7, 0, -5, 4, -3, 0, 1)}
    ok = all(w[e].denominator == 1 and w[e].numerator == golden[e] for e in golden)
    elapsed = time.perf_counter() - t
    report(1, ok and elapsed < 1, f"{elapsed:.3f}s")


def test_criterion_2_inverse_bounds(report):
    t = time.perf_counter()
    primes = list(sympy.primerange(2, 51))
    failures = [(p, r, k) for p in primes for r in primes if p != r
                for k, good in check_inverse_bounds(p, r).items() if not good]
    elapsed = time.perf_counter() - t
    report(2, not failures and elapsed < 30, f"{len(primes) * (len(primes) - 1)} pairs, "
           f"{len(failures)} failures, {elapsed:.1f}s")


def test_criterion_3_apostol(report):
    t = time.perf_counter()
    bad = [(e, f) for f in range(2, 31) for e in range(1, f)
           if cyclotomic_resultant(e, f) != apostol_resultant(e, f)]
    special = all(cyclotomic_resultant(1, p) == p for p in sympy.primerange(2, 31))
    special &= all(cyclotomic_resultant(e, p * e) == p ** euler_phi(e)
                   for e in range(2, 11) for p in sympy.primerange(2, 31)
                   if e % p and p * e <= 30)
    elapsed = time.perf_counter() - t
    report(3, not bad and special and elapsed < 10, f"{len(bad)} mismatches, {elapsed:.1f}s")


def test_criterion_4_enb_correctness(report):
    t = time.perf_counter()
    setup = find_curve_setup(239, 15, seed=0)
    ctx, E = setup.ctx, setup.E
    rng = random.Random(4)
    total = setup.periods[0]
    for u in setup.periods[1:]:
        total = total + u
    sum_ok = total.is_one()

    pts = [P for P in E.points() if P is not None]
    a1, a2 = E.a1, E.a2
    xt = lambda P, Q: x_translate(E, P, Q)
    samples, gamma_ok = 0, True
    while samples < 200:
        A, B, C, D = (rng.choice(pts) for _ in range(4))
        try:
            g = gamma(E, A, B, C)
            gABD, gACD, gACB = gamma(E, A, B, D), gamma(E, A, C, D), gamma(E, A, C, B)
            checks = [
                gamma(E, B, C, A) == g,
                -gamma(E, B, A, C) - a1 == g,
                -gamma(E, E.neg(A), E.neg(B), E.neg(C)) - a1 == g,
                gABD + gamma(E, B, C, D) + gamma(E, C, A, D) == g - a1,
                gABD * gACD == xt(A, D) + g * gACD + gACB * gABD + a2 + xt(A, B) + xt(A, C),
                gABD * gABD == xt(A, D) + xt(B, D) - a1 * gABD + xt(A, B) + a2,
            ]
        except (DegenerateTriple, ZeroDivisionError):
            continue
        gamma_ok &= all(checks)
        samples += 1

    frob_ok = True
    for _ in range(1000):
        x = ctx.random(rng, "enb")
        frob_ok &= ctx.frobenius(x) == ctx.convert(ctx.frobenius(ctx.convert(x, "power")), "enb")

    mul_ok = True
    for _ in range(1000):
        x, y = ctx.random(rng, "enb"), ctx.random(rng, "enb")
        px, py = ctx.convert(x, "power"), ctx.convert(y, "power")
        mul_ok &= ctx.convert(enb_multiply(x, y), "power") == px * py
    elapsed = time.perf_counter() - t
    report(4, sum_ok and gamma_ok and frob_ok and mul_ok and elapsed < 120,
           f"sum={sum_ok} gamma_identities={gamma_ok} frob={frob_ok} mul={mul_ok} {elapsed:.1f}s")


def test_criterion_5_root_digits(report):
    ok = True
    rng = random.Random(5)
    for n, q in ((3, 5), (15, 29), (15, 239)):
        ok &= inverse_n_digits(n, q).evaluate(q) == pow(n, -1, q ** n - 1)
        params = check_params(n, q)
        ctx = build_field(q, n, seed=1)
        for _ in range(500):
            x = ctx.random(rng)
            ok &= ctx.pow(root_n(x, params), n) == x
    report(5, ok, "(3,5) (15,29) (15,239), 500 roots each")


def test_criterion_6_theta_round_trip(report):
    setup = find_curve_setup(239, 15, seed=0)
    params = check_params(15, 239)
    ctx = setup.ctx
    rng = random.Random(6)
    ok = True
    for _ in range(100):
        x = random_torus_element(ctx, params, rng)
        aux = random_aux(params, setup, rng)
        back, aux2 = theta_tilde_prime(theta_tilde(x, aux, params), params)
        ok &= back == ctx.pow(x, 225) and all(aux2[d] == ctx.pow(aux[d], 225) for d in aux)
        x3, aux3 = theta_inverse(theta(x, aux, params), params)
        ok &= x3 == x and aux3 == aux
    report(6, ok, "100 random (x, x_3, x_5)")


def test_criterion_7_key_exchange(report):
    setup = find_curve_setup(239, 15, seed=0)
    params = check_params(15, 239)
    a = simulate_exchange(params, setup, 16, seed=7, bases=("enb",))
    b = simulate_exchange(params, setup, 16, seed=7, bases=("enb",))
    ok = a.keys_agree and a.residues_per_direction == 17 * 8
    ok &= len(a.keys) == 16 and a.streams == b.streams
    report(7, ok, f"{a.residues_per_direction} residues per direction")


def test_criterion_8_log_q_independence(report):
    q1, q2 = 239, 2039
    enb1, enb2 = bench_theta(15, q1, "enb"), bench_theta(15, q2, "enb")
    pow1, pow2 = bench_theta(15, q1, "power"), bench_theta(15, q2, "power")
    enb_same = (enb1["fqn_mul"], enb1["frobenius"]) == (enb2["fqn_mul"], enb2["frobenius"])
    grows = pow1["frobenius_fqn_mul"] < pow2["frobenius_fqn_mul"]
    report(8, enb_same and grows,
           f"enb fqn_mul {enb1['fqn_mul']}/{enb2['fqn_mul']}, frobenius "
           f"{enb1['frobenius']}/{enb2['frobenius']}; power Frobenius multiplications "
           f"{pow1['frobenius_fqn_mul']} -> {pow2['frobenius_fqn_mul']}")


def test_criterion_9_parameter_gate(report, capsys):
    ok = check_params(15, 239).n == 15
    try:
        check_params(15, 31)
        ok = False
    except CongruenceViolation:
        pass
    try:
        check_params(12, 239)
        ok = False
    except NotSquarefreeOdd:
        pass
    code = main(["params", "--pmax", "7"])
    out = capsys.readouterr().out
    ok &= code == 0 and any("family: twin" in l and "q: -" not in l for l in out.splitlines())
    report(9, ok)
