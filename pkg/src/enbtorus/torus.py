"""The torus T_n(F_q) and the maps theta-tilde / theta-tilde-prime.

For squarefree odd n the divisors of n split by the sign of mu(n/d).  The
negative side carries the auxiliary inputs (F_{q^p} x F_{q^r} for n = pr),
the positive side the outputs (F_q x F_{q^n}).  Each negative x_d is split
into torus components Z_e = x_d^{(q^d-1)/Phi_e(q)}, routed to a positive
divisor containing e, and recombined there with the Bezout exponents
n*W_{d,e}(q).  Outputs are n-th powers of the exact bijection; root_n undoes
that with a base-q digit exponent.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import sympy

from .cycpoly import (DigitExponent, ReconstructionExponents, bezout_polys, cyclotomic,
                      divisors, factor, is_squarefree, moebius, pdivmod, peval,
                      reconstruction_exponents, xn_minus_one)
from .errors import (CongruenceViolation, InvalidArgument, LemmaTwoViolation, NNotInvertible,
                     NotInSubfield, NotInTorus, NotPrimeQ, NotSquarefreeOdd, ZeroElement)
from .ffield import Element, FieldCtx, OpRecorder


@dataclass(frozen=True)
class TorusParams:
    n: int
    q: int
    divisors: Tuple[Tuple[int, int], ...]            # (d, mu(n/d))
    phi_values: Dict[int, int] = field(repr=False)
    decomp_exponents: Dict[Tuple[int, int], DigitExponent] = field(repr=False)
    flat_exponents: Dict[Tuple[int, int], DigitExponent] = field(repr=False)
    recon_exponents: Optional[ReconstructionExponents] = field(repr=False)
    n_inverse_digits: DigitExponent = field(repr=False)
    u_flags: Dict[int, bool] = field(repr=False)

    @property
    def negative(self) -> Tuple[int, ...]:
        return tuple(d for d, s in self.divisors if s == -1)

    @property
    def positive(self) -> Tuple[int, ...]:
        return tuple(d for d, s in self.divisors if s == 1)

    @property
    def phi_n(self) -> int:
        return self.phi_values[self.n]

    @property
    def euler_phi(self) -> int:
        return sum(s * d for d, s in self.divisors)

    def route(self, e: int) -> Dict[int, int]:
        """rho_e: negative d containing e -> positive d containing e, paired in sorted order."""
        neg = [d for d in self.negative if d % e == 0]
        pos = [d for d in self.positive if d % e == 0 and not (d == e == self.n)]
        assert len(neg) == len(pos)
        return dict(zip(neg, pos))

    def serialize(self, setup_fingerprint: str = "") -> str:
        line = f"TORUSPARAMS {self.n} {self.q}"
        return (line + f" {setup_fingerprint}" if setup_fingerprint else line) + "\n"


def parse_params(text: str) -> Tuple[TorusParams, Optional[str]]:
    parts = text.split()
    if len(parts) not in (3, 4) or parts[0] != "TORUSPARAMS":
        raise InvalidArgument("not a TORUSPARAMS record")
    fp = parts[3] if len(parts) == 4 else None
    return check_params(int(parts[1]), int(parts[2])), fp


def inverse_n_digits(n: int, q: int) -> DigitExponent:
    """Alternating digits (mu0, mu1, ..., mu0) of 1/n mod q^n - 1, valid when n | q+1."""
    if n % 2 == 0 or (q + 1) % n:
        raise LemmaTwoViolation(f"{n} does not divide q + 1 = {q + 1}")
    k = (n - 1) // 2
    mu0 = (k * (q - 1) + q) // n
    mu1 = (k * (q - 1) - 1) // n
    return DigitExponent([mu0 if i % 2 == 0 else mu1 for i in range(n)])


def check_params(n: int, q: int) -> TorusParams:
    """Validate (n, q) and precompute all exponent tables; raises on the first violation."""
    if n < 3 or n % 2 == 0 or not is_squarefree(n):
        raise NotSquarefreeOdd(f"n = {n} must be odd, squarefree and >= 3")
    if q < 3 or not sympy.isprime(q):
        raise NotPrimeQ(f"q = {q} is not an odd prime")
    divs = divisors(n)
    phi_values = {d: peval(cyclotomic(d), q) for d in divs}
    for i, e in enumerate(divs):
        for f in divs[i + 1:]:
            g = math.gcd(phi_values[e], phi_values[f])
            if g > 1:
                raise CongruenceViolation(e, f, g)
    if (q + 1) % n:
        raise LemmaTwoViolation(f"{n} does not divide q + 1 = {q + 1}")
    if math.gcd(n, q ** n - 1) != 1:
        raise NNotInvertible(f"gcd({n}, q^{n} - 1) > 1")
    assert math.prod(phi_values.values()) == q ** n - 1

    decomp, flat = {}, {}
    for d in divs:
        for e, w in bezout_polys(d).items():
            cof, rem = pdivmod(xn_minus_one(d), cyclotomic(e))
            assert not rem
            decomp[(d, e)] = DigitExponent(cof)
            flat[(d, e)] = DigitExponent.from_ratpoly(w, n)
            assert flat[(d, e)].denominator == 1
    primes = sorted(factor(n))
    recon = reconstruction_exponents(*primes, q=q) if len(primes) == 2 else None
    return TorusParams(
        n, q, tuple((d, moebius(n // d)) for d in divs), phi_values, decomp, flat, recon,
        inverse_n_digits(n, q), {d: True for d in divs})


def admissible_qs(n: int, qmax: int, qmin: int = 3):
    """Primes q in [qmin, qmax] accepted by check_params."""
    out = []
    start = max(qmin, n - 1)
    for q in range(start - start % n + n - 1, qmax + 1, n):   # q = -1 mod n
        if q >= qmin and sympy.isprime(q):
            try:
                check_params(n, q)
            except (CongruenceViolation, NNotInvertible, LemmaTwoViolation):
                continue
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# membership and generators

def torus_power_digits(e: int) -> DigitExponent:
    return DigitExponent(cyclotomic(e))


def in_torus(x: Element, e: int, rec: OpRecorder = None) -> bool:
    """x^{Phi_e(q)} = 1."""
    if x.is_zero():
        raise ZeroElement("0 is not in any torus")
    return x.ctx.exp_base_q(x, torus_power_digits(e), rec).is_one()


def membership(x: Element, params: TorusParams, rec: OpRecorder = None) -> bool:
    return in_torus(x, params.n, rec)


def cofactor_digits(params: TorusParams) -> DigitExponent:
    return params.decomp_exponents[(params.n, params.n)]


def random_torus_element(ctx: FieldCtx, params: TorusParams, rng: random.Random,
                         basis: str = "enb") -> Element:
    h = ctx.random(rng, basis)
    return ctx.exp_base_q(h, cofactor_digits(params))


def torus_generator(ctx: FieldCtx, params: TorusParams, rng: random.Random,
                    basis: str = "enb", tries: int = 200) -> Element:
    """An element of exact order Phi_n(q), certified by factoring Phi_n(q)."""
    order = params.phi_n
    primes = list(factor(order))
    for _ in range(tries):
        g = random_torus_element(ctx, params, rng, basis)
        if all(not ctx.pow(g, order // ell).is_one() for ell in primes):
            return g
    raise InvalidArgument("no generator found")


# ---------------------------------------------------------------------------
# decompose / reconstruct

def decompose(x_d: Element, d: int, params: TorusParams, rec: OpRecorder = None,
              check: bool = True) -> Dict[int, Element]:
    """Z_e = x_d^{(q^d-1)/Phi_e(q)} for every e | d."""
    ctx = x_d.ctx
    if x_d.is_zero():
        raise ZeroElement(f"auxiliary input for d = {d} is zero")
    if check and not ctx.in_subfield(x_d, d):
        raise NotInSubfield(f"input is not in F_q^{d}")
    return {e: ctx.exp_base_q(x_d, params.decomp_exponents[(d, e)], rec)
            for e in divisors(d)}


def _check_components(components: Dict[int, Element]):
    for e, z in components.items():
        if z.is_zero() or not in_torus(z, e):
            raise NotInTorus(e)


def reconstruct(components: Dict[int, Element], d: int, params: TorusParams,
                rec: OpRecorder = None, check: bool = True,
                schedule: str = "auto") -> Element:
    """x_d^n from its torus components t_e, e | d.

    ``schedule`` is "flat" (one product with exponents n*W_{d,e}) or
    "two-step" (n = pr, d = n only); "auto" picks two-step when available.
    """
    if check:
        _check_components(components)
    ctx = next(iter(components.values())).ctx
    R = params.recon_exponents
    if schedule == "auto":
        schedule = "two-step" if R is not None and d == params.n else "flat"
    if schedule == "two-step":
        if R is None or d != params.n:
            raise InvalidArgument("two-step schedule needs n = pr and d = n")
        p, r, n = R.p, R.r, params.n
        y1 = ctx.mul(ctx.exp_base_q(components[1], R.u_1, rec),
                     ctx.exp_base_q(components[n], R.u_pr, rec), rec)
        y2 = ctx.mul(ctx.exp_base_q(components[p], R.u_p, rec),
                     ctx.exp_base_q(components[r], R.u_r, rec), rec)
        return ctx.mul(ctx.exp_base_q(y1, R.n_v_1, rec), ctx.exp_base_q(y2, R.n_v_2, rec), rec)
    if schedule != "flat":
        raise InvalidArgument(f"unknown schedule {schedule!r}")
    acc = None
    for e in divisors(d):
        term = ctx.exp_base_q(components[e], params.flat_exponents[(d, e)], rec)
        acc = term if acc is None else ctx.mul(acc, term, rec)
    return acc


# ---------------------------------------------------------------------------
# theta-tilde and its reverse

def theta_tilde(x: Element, aux: Dict[int, Element], params: TorusParams,
                rec: OpRecorder = None, check: bool = True) -> Dict[int, Element]:
    """(x, (x_d)_{mu=-1}) -> (y_d^n)_{mu=+1}."""
    n = params.n
    if set(aux) != set(params.negative):
        raise InvalidArgument(f"auxiliary inputs must be indexed by {params.negative}")
    if check and not membership(x, params):
        raise NotInTorus(n)
    Z: Dict[Tuple[int, int], Element] = {(n, n): x}
    for d in params.negative:
        for e, z in decompose(aux[d], d, params, rec, check).items():
            Z[(params.route(e)[d], e)] = z
    return {d: reconstruct({e: Z[(d, e)] for e in divisors(d)}, d, params, rec, check)
            for d in params.positive}


def theta_tilde_prime(outputs: Dict[int, Element], params: TorusParams,
                      rec: OpRecorder = None, check: bool = True
                      ) -> Tuple[Element, Dict[int, Element]]:
    """(y_d)_{mu=+1} -> (x^n, (x_d^n)_{mu=-1})."""
    n = params.n
    if set(outputs) != set(params.positive):
        raise InvalidArgument(f"inputs must be indexed by {params.positive}")
    Z: Dict[Tuple[int, int], Element] = {}
    torus = None
    for d in params.positive:
        for e, z in decompose(outputs[d], d, params, rec, check).items():
            if e == n:
                torus = z
            else:
                back = {v: k for k, v in params.route(e).items()}
                Z[(back[d], e)] = z
    ctx = torus.ctx
    if check and not in_torus(torus, n):
        raise NotInTorus(n)
    x = ctx.pow(torus, n, rec)
    aux = {d: reconstruct({e: Z[(d, e)] for e in divisors(d)}, d, params, rec, check)
           for d in params.negative}
    return x, aux


def root_n(x: Element, params: TorusParams, rec: OpRecorder = None) -> Element:
    """x^{1/n} in F_{q^n} via the alternating digit exponent."""
    return x.ctx.exp_base_q(x, params.n_inverse_digits, rec)


def theta(x: Element, aux: Dict[int, Element], params: TorusParams,
          rec: OpRecorder = None, check: bool = True) -> Dict[int, Element]:
    """The exact bijection: theta_tilde followed by root_n on each output."""
    return {d: root_n(y, params, rec) for d, y in theta_tilde(x, aux, params, rec, check).items()}


def theta_inverse(outputs: Dict[int, Element], params: TorusParams,
                  rec: OpRecorder = None, check: bool = True
                  ) -> Tuple[Element, Dict[int, Element]]:
    x, aux = theta_tilde_prime(outputs, params, rec, check)
    return root_n(x, params, rec), {d: root_n(v, params, rec) for d, v in aux.items()}
