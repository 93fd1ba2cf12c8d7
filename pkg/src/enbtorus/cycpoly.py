"""Exact integer/rational polynomial algebra around cyclotomic polynomials.

Integer polynomials are tuples of ``int`` in ascending degree order, trimmed so
that the last entry is nonzero (the zero polynomial is ``()``).  Rational
polynomials use :class:`RatPoly`, a numerator with a common positive
denominator kept in lowest terms.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

import sympy

from .errors import InvalidArgument, NotSquarefree

IntPoly = Tuple[int, ...]


# ---------------------------------------------------------------------------
# integer helpers

def factor(n: int) -> Dict[int, int]:
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factor(n).values())


def divisors(n: int) -> list:
    return sorted(int(d) for d in sympy.divisors(n))


def euler_phi(n: int) -> int:
    result = n
    for p in factor(n):
        result = result // p * (p - 1)
    return result


def moebius(n: int) -> int:
    f = factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def prime_power_base(n: int):
    """Return (p, i) if n = p**i with i >= 1, else None."""
    f = factor(n)
    if len(f) == 1:
        (p, i), = f.items()
        return p, i
    return None


# ---------------------------------------------------------------------------
# dense polynomial arithmetic (coefficients may be int or Fraction)

def trim(a: Iterable) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def degree(a: Sequence) -> int:
    return len(trim(a)) - 1


def padd(a, b):
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def psub(a, b):
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n))


def pscale(a, c):
    return trim(c * x for x in a)


def pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def pdivmod(a, b):
    """Polynomial division.  Exact over Z when ``b`` is monic, else uses Fraction."""
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(trim(a))
    lead = b[-1]
    db = len(b) - 1
    if len(a) <= db:
        return (), tuple(a)
    quo = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c == 0:
            continue
        c = c * lead if lead in (1, -1) else Fraction(c) / lead
        quo[k - db] = c
        for j in range(db + 1):
            a[k - db + j] -= c * b[j]
    return trim(quo), trim(a[:db])


def pmod(a, b):
    return pdivmod(a, b)[1]


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def xn_minus_one(n: int) -> IntPoly:
    return (-1,) + (0,) * (n - 1) + (1,)


# ---------------------------------------------------------------------------
# cyclotomic polynomials

@functools.lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPoly:
    """Phi_n by exact division of X^n - 1 by the Phi_d with d | n, d < n."""
    if not isinstance(n, int) or n < 1:
        raise InvalidArgument(f"cyclotomic index must be a positive integer, got {n!r}")
    num = xn_minus_one(n)
    for d in divisors(n)[:-1]:
        num, rem = pdivmod(num, cyclotomic(d))
        assert not rem
    return num


def sylvester_matrix(a: Sequence[int], b: Sequence[int]) -> list:
    a, b = trim(a), trim(b)
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    ra, rb = list(reversed(a)), list(reversed(b))
    for i in range(n):
        rows.append([0] * i + ra + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + rb + [0] * (size - n - 1 - i))
    return rows


def bareiss_det(mat) -> int:
    """Fraction-free determinant of an integer matrix."""
    m = [list(r) for r in mat]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def resultant(a: Sequence[int], b: Sequence[int]) -> int:
    return bareiss_det(sylvester_matrix(a, b))


def cyclotomic_resultant(e: int, f: int) -> int:
    """Res(Phi_e, Phi_f) for 1 <= e < f, from the Sylvester determinant.

    For e > 1 both degrees are even, so the argument order does not matter;
    for e = 1 this is Phi_f(1) >= 1.
    """
    if not (1 <= e < f):
        raise InvalidArgument(f"need 1 <= e < f, got e={e}, f={f}")
    return resultant(cyclotomic(e), cyclotomic(f))


def apostol_resultant(e: int, f: int) -> int:
    """Closed-form Res(Phi_f, Phi_e) by prime-power bookkeeping over d | e."""
    if not (1 <= e < f):
        raise InvalidArgument(f"need 1 <= e < f, got e={e}, f={f}")
    value = Fraction(1)
    phi_f = euler_phi(f)
    for d in divisors(e):
        pp = prime_power_base(f // math.gcd(f, d))
        if pp is None:
            continue
        p, i = pp
        mu = moebius(e // d)
        if mu == 0:
            continue
        exponent = mu * phi_f // euler_phi(p ** i)
        value *= Fraction(p) ** exponent
    assert value.denominator == 1
    return int(value)


# ---------------------------------------------------------------------------
# rational polynomials

@dataclass(frozen=True)
class RatPoly:
    numerator: IntPoly
    denominator: int = 1

    def __post_init__(self):
        num = trim(self.numerator)
        den = self.denominator
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = tuple(-c for c in num), -den
        g = functools.reduce(math.gcd, num, den)
        object.__setattr__(self, "numerator", tuple(c // g for c in num))
        object.__setattr__(self, "denominator", den // g)

    @classmethod
    def from_fractions(cls, coeffs: Iterable) -> "RatPoly":
        coeffs = [Fraction(c) for c in coeffs]
        den = functools.reduce(lambda a, b: a * b // math.gcd(a, b),
                               (c.denominator for c in coeffs), 1)
        return cls(tuple(int(c * den) for c in coeffs), den)

    def fractions(self) -> tuple:
        return tuple(Fraction(c, self.denominator) for c in self.numerator)

    def degree(self) -> int:
        return len(self.numerator) - 1

    def __call__(self, x) -> Fraction:
        return Fraction(peval(self.numerator, x), self.denominator)

    def __mul__(self, other):
        if isinstance(other, RatPoly):
            return RatPoly(pmul(self.numerator, other.numerator),
                           self.denominator * other.denominator)
        return RatPoly(pscale(self.numerator, Fraction(other).numerator),
                       self.denominator * Fraction(other).denominator)

    __rmul__ = __mul__

    def __add__(self, other):
        return RatPoly.from_fractions(padd(self.fractions(), other.fractions()))

    def mod(self, m: Sequence[int]) -> "RatPoly":
        return RatPoly.from_fractions(pmod(self.fractions(), m))

    def __str__(self):
        return f"({list(self.numerator)})/{self.denominator}"


def poly_inverse_mod(a, m) -> tuple:
    """Inverse of ``a`` modulo ``m`` over Q[X] by the extended Euclidean algorithm."""
    r0, r1 = tuple(Fraction(c) for c in trim(m)), tuple(Fraction(c) for c in pmod(a, m))
    s0, s1 = (), (Fraction(1),)
    while r1:
        quo, rem = pdivmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, psub(s0, pmul(quo, s1))
    if len(r0) != 1:
        raise InvalidArgument("polynomials are not coprime over Q")
    return pmod(pscale(s0, 1 / r0[0]), m)


def cyclotomic_inverse_mod(f: int, e: int) -> RatPoly:
    """Phi_f^{-1} mod Phi_e as an exact rational polynomial."""
    if f == e or f < 1 or e < 1:
        raise InvalidArgument(f"need distinct positive indices, got f={f}, e={e}")
    return RatPoly.from_fractions(poly_inverse_mod(cyclotomic(f), cyclotomic(e)))


def bezout_polys(d: int) -> Dict[int, RatPoly]:
    """The family W_{d,e}, e | d, with sum_e (X^d-1)/Phi_e * W_{d,e} = 1."""
    if d < 1:
        raise InvalidArgument(f"d must be positive, got {d}")
    if not is_squarefree(d):
        raise NotSquarefree(f"{d} is not squarefree")
    out = {}
    for e in divisors(d):
        cof, rem = pdivmod(xn_minus_one(d), cyclotomic(e))
        assert not rem
        out[e] = RatPoly.from_fractions(poly_inverse_mod(cof, cyclotomic(e)))
    return out


def bezout_identity_holds(d: int, family: Dict[int, RatPoly]) -> bool:
    total = ()
    for e, w in family.items():
        cof = pdivmod(xn_minus_one(d), cyclotomic(e))[0]
        total = padd(total, pmul(cof, w.fractions()))
    return total == (1,)


def crt_poly(a, m1, b, m2) -> tuple:
    """The P of least degree with P = a mod m1 and P = b mod m2 (m1, m2 coprime)."""
    inv12 = poly_inverse_mod(m2, m1)   # (m2 mod m1)^{-1}
    inv21 = poly_inverse_mod(m1, m2)
    total = padd(pmul(pmul(m2, inv12), a), pmul(pmul(m1, inv21), b))
    return pmod(total, pmul(m1, m2))


# ---------------------------------------------------------------------------
# base-q digit exponents

@dataclass(frozen=True)
class DigitExponent:
    """The exponent (sum_i digits[i] * q**i) / denominator."""

    digits: Tuple[int, ...]
    denominator: int = 1

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(trim(int(c) for c in self.digits)))
        if self.denominator < 1:
            raise InvalidArgument("denominator must be positive")

    @classmethod
    def from_ratpoly(cls, w: RatPoly, scale: int = 1) -> "DigitExponent":
        s = w * scale
        return cls(s.numerator, s.denominator)

    def numerator_value(self, q: int) -> int:
        return peval(self.digits, q)

    def evaluate(self, q: int) -> int:
        num = self.numerator_value(q)
        if num % self.denominator:
            raise InvalidArgument(f"denominator {self.denominator} does not divide the "
                                  f"exponent numerator at q={q}")
        return num // self.denominator

    @property
    def max_digit(self) -> int:
        return max((abs(c) for c in self.digits), default=0)

    def scaled(self, k: int) -> "DigitExponent":
        w = RatPoly(self.digits, self.denominator) * k
        return DigitExponent(w.numerator, w.denominator)

    def __len__(self):
        return len(self.digits)


@dataclass(frozen=True)
class ReconstructionExponents:
    """Digit forms used by the two-step n = p*r reconstruction."""

    p: int
    r: int
    u_1: DigitExponent
    u_p: DigitExponent
    u_r: DigitExponent
    u_pr: DigitExponent
    v_1: DigitExponent
    v_2: DigitExponent
    n_v_1: DigitExponent
    n_v_2: DigitExponent


def reconstruction_exponents(p: int, r: int, q: int = None) -> ReconstructionExponents:
    """Exponents for (t_1, t_pr) -> y_1, (t_p, t_r) -> y_2 -> x^n with n = p*r.

    The digit polynomials depend only on (p, r).  When ``q`` is given the
    integer Bezout identities are checked at q by big-integer evaluation.
    """
    if p == r or not (sympy.isprime(p) and sympy.isprime(r)):
        raise InvalidArgument(f"need two distinct primes, got {p}, {r}")
    n = p * r
    phi1, phip, phir, phin = (cyclotomic(k) for k in (1, p, r, n))
    u_1 = cyclotomic_inverse_mod(n, 1)
    u_p = cyclotomic_inverse_mod(r, p)
    u_r = cyclotomic_inverse_mod(p, r)
    u_pr = cyclotomic_inverse_mod(1, n)

    # Phi_p^{-1} Phi_r^{-1} mod Phi_1 Phi_pr, and Phi_1^{-1} Phi_pr^{-1} mod Phi_p Phi_r
    inv_pr_mod_1 = poly_inverse_mod(pmul(phip, phir), phi1)
    inv_pr_mod_n = poly_inverse_mod(pmul(phip, phir), phin)
    v1 = crt_poly(inv_pr_mod_1, phi1, inv_pr_mod_n, phin)
    inv_1n_mod_p = poly_inverse_mod(pmul(phi1, phin), phip)
    inv_1n_mod_r = poly_inverse_mod(pmul(phi1, phin), phir)
    v2 = crt_poly(inv_1n_mod_p, phip, inv_1n_mod_r, phir)
    v_1, v_2 = RatPoly.from_fractions(v1), RatPoly.from_fractions(v2)

    out = ReconstructionExponents(
        p, r,
        *(DigitExponent.from_ratpoly(w) for w in (u_1, u_p, u_r, u_pr, v_1, v_2)),
        DigitExponent.from_ratpoly(v_1, n), DigitExponent.from_ratpoly(v_2, n))
    for e in (out.u_1, out.u_p, out.u_r, out.u_pr, out.n_v_1, out.n_v_2):
        assert e.denominator == 1
    if q is not None:
        P = {k: peval(c, q) for k, c in ((1, phi1), (p, phip), (r, phir), (n, phin))}
        ev = {k: w.evaluate(q) for k, w in (("u1", out.u_1), ("up", out.u_p),
                                            ("ur", out.u_r), ("upr", out.u_pr))}
        assert P[n] * ev["u1"] + P[1] * ev["upr"] == 1
        assert P[r] * ev["up"] + P[p] * ev["ur"] == 1
        assert P[p] * P[r] * out.n_v_1.evaluate(q) + P[1] * P[n] * out.n_v_2.evaluate(q) == n
    return out


def check_inverse_bounds(p: int, r: int) -> Dict[str, bool]:
    """Coefficient-exact check of the four clauses bounding cyclotomic inverses for n = p*r."""
    res = {}
    n = p * r
    i_p_1 = cyclotomic_inverse_mod(p, 1)
    i_1_p = cyclotomic_inverse_mod(1, p)
    # X^{p-2} + 2 X^{p-3} + ... + (p-1): coefficient of X^k is p-1-k
    expected = RatPoly(tuple(-(p - 1 - k) for k in range(p - 1)), p)
    res["i"] = i_p_1 == RatPoly((1,), p) and i_1_p == expected

    i_n_1 = cyclotomic_inverse_mod(n, 1)
    i_1_n = cyclotomic_inverse_mod(1, n)
    res["ii"] = (i_n_1 == RatPoly((1,), 1) and i_1_n.denominator == 1
                 and set(i_1_n.numerator) <= {-1, 0, 1}
                 and i_1_n.degree() < euler_phi(n))

    i_n_p = cyclotomic_inverse_mod(n, p)
    top = (r - 1) % p
    ok_a = i_n_p == RatPoly((1,) * (top + 1), r)
    i_p_n = cyclotomic_inverse_mod(p, n)
    ok_b = i_p_n.denominator == r and all(abs(c) < r for c in i_p_n.numerator)
    res["iii"] = ok_a and ok_b

    i_p_r = cyclotomic_inverse_mod(p, r)
    res["iv"] = i_p_r.denominator == 1 and set(i_p_r.numerator) <= {-1, 0, 1}
    return res
