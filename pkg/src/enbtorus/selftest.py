"""Quick end-to-end invariant checks used by ``enbtorus selftest``."""

from __future__ import annotations

import random
from typing import Callable, List, Tuple

from .cycpoly import bezout_identity_holds, bezout_polys, check_inverse_bounds, factor
from .enb import find_curve_setup, load_setup
from .keyex import simulate_exchange
from .torus import check_params, membership, random_torus_element, root_n, theta, theta_inverse
from .keyex import random_aux


def run_selftest(n: int = 15, q: int = 239, seed: int = 0,
                 samples: int = 20) -> List[Tuple[str, bool]]:
    params = check_params(n, q)
    setup = find_curve_setup(q, n, seed=seed)
    ctx = setup.ctx
    rng = random.Random(seed)
    results: List[Tuple[str, bool]] = []

    def check(name: str, fn: Callable[[], bool]):
        try:
            ok = bool(fn())
        except AssertionError:
            ok = False
        results.append((name, ok))

    primes = sorted(factor(n))
    check("bezout_identity", lambda: bezout_identity_holds(n, bezout_polys(n)))
    if len(primes) == 2:
        check("inverse_bounds", lambda: all(check_inverse_bounds(*primes).values()))
    check("periods_sum_to_one",
          lambda: sum(setup.periods[1:], setup.periods[0]).is_one())
    check("setup_reload", lambda: load_setup(setup.serialize()).fingerprint()
          == setup.fingerprint())

    def frob_shift():
        for _ in range(samples):
            x = ctx.random(rng, "enb")
            via_power = ctx.convert(ctx.frobenius(ctx.convert(x, "power")), "enb")
            if ctx.frobenius(x) != via_power:
                return False
        return True
    check("frobenius_shift", frob_shift)

    def mult_oracle():
        for _ in range(samples):
            x, y = ctx.random(rng, "enb"), ctx.random(rng, "enb")
            px, py = ctx.convert(x, "power"), ctx.convert(y, "power")
            if ctx.convert(x * y, "power") != px * py:
                return False
        return True
    check("enb_multiply_oracle", mult_oracle)

    def roots():
        for _ in range(samples):
            x = ctx.random(rng, "enb")
            if root_n(x, params) ** n != x:
                return False
        return True
    check("root_n", roots)

    def round_trip():
        for _ in range(max(1, samples // 4)):
            x = random_torus_element(ctx, params, rng)
            aux = random_aux(params, setup, rng)
            back, aux2 = theta_inverse(theta(x, aux, params), params)
            if back != x or aux2 != aux or not membership(back, params):
                return False
        return True
    check("theta_round_trip", round_trip)
    check("key_exchange", lambda: simulate_exchange(params, setup, 2, seed,
                                                   bases=("enb",)).keys_agree)
    return results
