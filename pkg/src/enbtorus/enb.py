"""Elliptic normal bases of F_{q^n}/F_q built from a degree-n cyclic isogeny.

Construction outline: pick a curve E/F_q with a rational point T of order n,
take the Velu isogeny I: E -> E' with kernel <T>, and a point A of E'(F_q)
generating E'(F_q)/I(E(F_q)).  The fiber I^{-1}(A) is a single Galois orbit
of n points, so the numerator of I_x(X) - x(A) is irreducible of degree n and
serves as defining polynomial of F_{q^n}; B is the fiber point with
x(B) = X.  The functions u_k = a*u_{kT,(k+1)T} + b evaluated at B form a
normal basis on which Frobenius acts as the shift k -> k+1.
"""

from __future__ import annotations

import functools
import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import sympy

from .cycpoly import divisors, factor, is_squarefree
from .ffield import (Element, FieldCtx, Fp, OpRecorder, _rec, is_irreducible, pm_add, pm_mul,
                     pm_roots, pm_sub)
from .errors import (DegenerateTriple, HasseInfeasible, InvalidArgument, NoCurveFound,
                     NormalityFailed, NotABasis, NotPrime)

Point = Optional[tuple]   # None is the point at infinity


# ---------------------------------------------------------------------------
# curves

@functools.lru_cache(maxsize=8)
def _sqrt_table(q):
    table = {}
    for y in range(q):
        table.setdefault(y * y % q, y)
    return table


@dataclass(frozen=True)
class Curve:
    """Y^2 + a1 XY + a3 Y = X^3 + a2 X^2 + a4 X + a6 over F_q (points may live in F_{q^n})."""

    q: int
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def coeffs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def discriminant(self) -> int:
        a1, a2, a3, a4, a6 = self.coeffs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return (-b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6) % self.q

    def contains(self, P: Point) -> bool:
        if P is None:
            return True
        x, y = P
        a1, a2, a3, a4, a6 = self.coeffs
        return y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6

    def neg(self, P: Point) -> Point:
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P: Point, Q: Point) -> Point:
        if P is None:
            return Q
        if Q is None:
            return P
        a1, a2, a3, a4, a6 = self.coeffs
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            den = y1 + y2 + a1 * x2 + a3
            if den == 0:
                return None
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
            nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / den
        else:
            dx = x2 - x1
            lam = (y2 - y1) / dx
            nu = (y1 * x2 - y2 * x1) / dx
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return (x3, y3)

    def sub(self, P: Point, Q: Point) -> Point:
        return self.add(P, self.neg(Q))

    def mul(self, k: int, P: Point) -> Point:
        if k < 0:
            return self.mul(-k, self.neg(P))
        result = None
        while k:
            if k & 1:
                result = self.add(result, P)
            k >>= 1
            if k:
                P = self.add(P, P)
        return result

    def order_of(self, P: Point, multiple: int) -> int:
        """Exact order of P given that multiple * P = O."""
        order = multiple
        for ell, e in factor(multiple).items():
            for _ in range(e):
                if self.mul(order // ell, P) is None:
                    order //= ell
                else:
                    break
        return order

    # -- F_q-rational points (desk-scale q) -----------------------------------
    def point(self, x: int, y: int) -> tuple:
        P = (Fp(x, self.q), Fp(y, self.q))
        if not self.contains(P):
            raise InvalidArgument(f"({x}, {y}) is not on the curve")
        return P

    def _ys(self, x: int):
        q = self.q
        a1, a2, a3, a4, a6 = self.coeffs
        h = (a1 * x + a3) % q
        g = (x * x * x + a2 * x * x + a4 * x + a6) % q
        disc = (h * h + 4 * g) % q
        root = _sqrt_table(q).get(disc)
        if root is None:
            return []
        inv2 = (q + 1) // 2
        ys = {(-h + root) * inv2 % q, (-h - root) * inv2 % q}
        return sorted(ys)

    def points(self) -> List[tuple]:
        pts = [None]
        for x in range(self.q):
            pts.extend((Fp(x, self.q), Fp(y, self.q)) for y in self._ys(x))
        return pts

    def order(self) -> int:
        return 1 + sum(len(self._ys(x)) for x in range(self.q))

    def random_point(self, rng: random.Random) -> tuple:
        while True:
            x = rng.randrange(self.q)
            ys = self._ys(x)
            if ys:
                return (Fp(x, self.q), Fp(rng.choice(ys), self.q))

    def lift(self, P: Point, ctx: FieldCtx, basis="power") -> Point:
        """View an F_q-point as a point with F_{q^n} coordinates."""
        if P is None:
            return None
        return (ctx.scalar(int(P[0]), basis), ctx.scalar(int(P[1]), basis))


def hasse_orders(q: int) -> range:
    t = math.isqrt(4 * q)
    return range(q + 1 - t, q + 1 + t + 1)


# ---------------------------------------------------------------------------
# Velu isogeny

@dataclass(frozen=True)
class Isogeny:
    """Separable isogeny of odd degree with kernel generated by ``kernel_gen``."""

    domain: Curve
    codomain: Curve
    kernel_gen: tuple
    degree: int
    terms: tuple   # (x_Q, y_Q, gx_Q, gy_Q, v_Q, u_Q) for Q in T, 2T, ..., ((n-1)/2)T

    def kernel_poly(self) -> tuple:
        """prod_Q (X - x_Q) over half the nonzero kernel points."""
        q = self.domain.q
        psi = (1,)
        for t in self.terms:
            psi = pm_mul(psi, (-int(t[0]), 1), q)
        return psi

    def x_map(self) -> Tuple[tuple, tuple]:
        """(N, D) with I_x(X) = N(X)/D(X), D = kernel_poly^2."""
        q = self.domain.q
        lin = [(-int(t[0]), 1) for t in self.terms]
        psi2 = (1,)
        for l in lin:
            psi2 = pm_mul(psi2, pm_mul(l, l, q), q)
        num = pm_mul((0, 1), psi2, q)
        for i, t in enumerate(self.terms):
            others = (1,)
            for j, l in enumerate(lin):
                if j != i:
                    others = pm_mul(others, pm_mul(l, l, q), q)
            num = pm_add(num, pm_mul(pm_mul(others, lin[i], q), (int(t[4]),), q), q)
            num = pm_add(num, pm_mul(others, (int(t[5]),), q), q)
        return num, psi2

    def fiber_poly(self, A: tuple) -> tuple:
        """Monic degree-n polynomial whose roots are the x-coordinates of I^{-1}(+-A)."""
        num, den = self.x_map()
        q = self.domain.q
        return pm_sub(num, pm_mul(den, (int(A[0]),), q), q)

    def __call__(self, P: Point) -> Point:
        if P is None:
            return None
        a1, a3 = self.domain.a1, self.domain.a3
        x, y = P
        X, Y = x, y
        for xq, yq, gx, gy, v, u in self.terms:
            dx = x - xq
            if dx == 0:
                return None
            inv = 1 / dx
            inv2 = inv * inv
            X = X + v * inv + u * inv2
            Y = Y - (u * (2 * y + a1 * x + a3) * inv2 * inv
                     + v * (a1 * dx + y - yq) * inv2
                     + (a1 * u - gx * gy) * inv2)
        return (X, Y)


def velu(E: Curve, T: tuple, n: int) -> Isogeny:
    a1, a2, a3, a4, a6 = E.coeffs
    terms = []
    v_sum, w_sum = Fp(0, E.q), Fp(0, E.q)
    Q = T
    for _ in range((n - 1) // 2):
        xq, yq = Q
        gx = 3 * xq * xq + 2 * a2 * xq + a4 - a1 * yq
        gy = -2 * yq - a1 * xq - a3
        v = 2 * gx - a1 * gy
        u = gy * gy
        terms.append((xq, yq, gx, gy, v, u))
        v_sum = v_sum + v
        w_sum = w_sum + u + xq * v
        Q = E.add(Q, T)
    E2 = Curve(E.q, a1, a2, a3, int(a4 - 5 * v_sum),
               int(a6 - (a1 * a1 + 4 * a2) * v_sum - 7 * w_sum))
    return Isogeny(E, E2, T, n, tuple(terms))


# ---------------------------------------------------------------------------
# Gamma and the u functions

def gamma(E: Curve, A: Point, B: Point, C: Point):
    """(y(C-A) - y(A-B)) / (x(C-A) - x(A-B))."""
    CA, AB = E.sub(C, A), E.sub(A, B)
    if CA is None or AB is None:
        raise DegenerateTriple("a difference of the points is the point at infinity")
    den = CA[0] - AB[0]
    if den == 0:
        raise DegenerateTriple("x(C-A) = x(A-B)")
    return (CA[1] - AB[1]) / den


def u_fn(E: Curve, A: Point, B: Point, C: Point):
    """The degree-two function u_{A,B} evaluated at C."""
    return gamma(E, A, B, C)


def x_translate(E: Curve, A: Point, C: Point):
    """x_A(C) = x(C - A)."""
    D = E.sub(C, A)
    if D is None:
        raise DegenerateTriple("C = A")
    return D[0]


def nq_value(q: int, n: int) -> int:
    """The modified degree n_q: l-adic valuations per the rule for l | gcd(q-1, n)."""
    out = 1
    for ell, v in factor(n).items():
        w = 0
        m = q - 1
        while m % ell == 0:
            m //= ell
            w += 1
        out *= ell ** (v if w == 0 else max(2 * w + 1, 2 * v))
    return out


# ---------------------------------------------------------------------------
# square roots in F_{q^n}

def field_sqrt(ctx: FieldCtx, a: Element) -> Optional[Element]:
    """Tonelli-Shanks in F_{q^n}; deterministic choice of non-residue."""
    if a.is_zero():
        return a
    Q = ctx.q ** ctx.n
    if not ctx.pow(a, (Q - 1) // 2).is_one():
        return None
    s, t = 0, Q - 1
    while t % 2 == 0:
        s, t = s + 1, t // 2
    c0 = 0
    while True:
        z = ctx.gen() + c0
        if not ctx.pow(z, (Q - 1) // 2).is_one():
            break
        c0 += 1
    m, c = s, ctx.pow(z, t)
    x, b = ctx.pow(a, (t + 1) // 2), ctx.pow(a, t)
    while not b.is_one():
        i, bb = 0, b
        while not bb.is_one():
            bb = bb * bb
            i += 1
        g = c
        for _ in range(m - i - 1):
            g = g * g
        x, c = x * g, g * g
        b, m = b * c, i
    return x


# ---------------------------------------------------------------------------
# setup

@dataclass
class EnbSetup:
    q: int
    n: int
    E: Curve
    T: tuple
    isogeny: Isogeny
    A: tuple
    fiber_poly: tuple
    ctx: FieldCtx
    B: tuple
    a_const: int
    b_const: int
    periods: List[Element] = field(repr=False)
    nq: int = 0
    warnings: List[str] = field(default_factory=list)
    mult_table: Optional[list] = field(default=None, repr=False)

    @property
    def E_prime(self) -> Curve:
        return self.isogeny.codomain

    @property
    def M_enb_to_pow(self):
        return self.ctx.bases["enb"].to_power

    @property
    def M_pow_to_enb(self):
        return self.ctx.bases["enb"].from_power

    def serialize(self) -> str:
        return serialize_setup(self)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]


def _point_fq(P: Element) -> int:
    return P.base_value()


def _locate_B(E: Curve, iso: Isogeny, A: tuple, ctx: FieldCtx) -> tuple:
    """The fiber point with x(B) = X mod fiber_poly and I(B) = A."""
    a1, a2, a3, a4, a6 = E.coeffs
    x = ctx.gen()
    h = a1 * x + a3
    disc = h * h + 4 * (x * x * x + a2 * x * x + a4 * x + a6)
    root = field_sqrt(ctx, disc)
    if root is None:
        raise NotABasis("fiber point is not defined over F_{q^n}")
    inv2 = pow(2, -1, ctx.q)
    B = (x, (root - h) * inv2)
    assert E.contains(B)
    image = iso(B)
    A_lift = E.lift(A, ctx)
    if image == E.lift(iso.codomain.neg(A), ctx) and image != A_lift:
        B = E.neg(B)
        image = iso(B)
    if image != A_lift:
        raise NotABasis("fiber point does not map to A")
    return B


def _shift_point(E: Curve, B: tuple, ctx: FieldCtx) -> tuple:
    """T with Frob(B) = B - T, as an F_q-point."""
    frobB = (ctx.frobenius(B[0]), ctx.frobenius(B[1]))
    D = E.sub(B, frobB)
    if D is None:
        raise NotABasis("B is rational: A lies in I(E(F_q))")
    return (Fp(_point_fq(D[0]), E.q), Fp(_point_fq(D[1]), E.q))


def elliptic_periods(E: Curve, T: tuple, B: tuple, ctx: FieldCtx,
                     a_const: Optional[int] = None, b_const: Optional[int] = None):
    """u_k(B) for k in Z/nZ, normalised so that sum_k u_k(B) = 1.

    Returns (periods, a_const, b_const).  Raises NotABasis or NormalityFailed.
    """
    q, n = ctx.q, ctx.n
    minus_T = E.lift(E.neg(T), ctx)
    # Gamma(kT, (k+1)T, B): C - A = B - kT, A - B = -T
    raw = []
    P = B
    for _ in range(n):
        den = P[0] - minus_T[0]
        if den.is_zero():
            raise NotABasis("degenerate period")
        raw.append((P[1] - minus_T[1]) / den)
        P = E.add(P, minus_T)
    s = raw[0]
    for r in raw[1:]:
        s = s + r
    if not s.in_base_field():
        raise NormalityFailed("sum of the u_{kT,(k+1)T}(B) is not in F_q")
    s = s.base_value()
    if a_const is None:
        if s:
            a_const, b_const = pow(s, -1, q), 0
        else:
            a_const, b_const = 1, pow(n, -1, q)
    if (a_const * s + n * b_const - 1) % q:
        raise NotABasis("constants do not normalise the periods to sum 1")
    periods = [r * a_const + b_const for r in raw]
    for k in range(n):
        if ctx.frobenius(periods[k]) != periods[(k + 1) % n]:
            raise NormalityFailed(f"Frobenius does not send u_{k} to u_{k + 1}")
    return periods, a_const % q, b_const % q


def _register(setup: EnbSetup, table: bool = False):
    ctx = setup.ctx
    cols = [u.coeffs for u in setup.periods]
    matrix = [list(r) for r in zip(*cols)]
    ctx.register_basis("enb", matrix, normal=True)
    if table:
        enable_table_multiplication(setup)


def find_curve_setup(q: int, n: int, seed: int = 0, max_curves: int = 5000,
                     max_points: int = 30) -> EnbSetup:
    """Search a curve and quotient generator giving an elliptic normal basis of F_{q^n}."""
    if not sympy.isprime(q) or q < 3:
        raise NotPrime(f"q = {q} is not an odd prime")
    if n < 3 or n % 2 == 0 or not is_squarefree(n):
        raise InvalidArgument(f"n = {n} must be odd, squarefree and >= 3")
    if not any(N % n == 0 for N in hasse_orders(q)):
        raise HasseInfeasible(f"no order in the Hasse interval of F_{q} is divisible by {n}")
    if math.gcd(n, q) != 1:
        raise InvalidArgument("n and q must be coprime")
    rng = random.Random(seed)
    for _ in range(max_curves):
        E = Curve(q, *(rng.randrange(q) for _ in range(5)))
        if E.discriminant() == 0:
            continue
        N = E.order()
        if N % n:
            continue
        T = None
        for _ in range(max_points):
            P = E.mul(N // n, E.random_point(rng))
            if P is not None and E.order_of(P, n) == n:
                T = P
                break
        if T is None:
            continue
        iso = velu(E, T, n)
        E2 = iso.codomain
        for _ in range(max_points):
            A = E2.random_point(rng)
            if not generates_quotient(iso, A):
                continue
            try:
                return build_setup(E, T, iso, A)
            except (NotABasis, NormalityFailed):
                continue
    raise NoCurveFound(f"no elliptic normal basis found for q={q}, n={n} "
                       f"within {max_curves} curves")


def in_image(iso: Isogeny, P: Point) -> bool:
    """Whether P in E'(F_q) lies in I(E(F_q)), via rational roots of the fiber polynomial."""
    if P is None:
        return True
    E = iso.domain
    for x0 in pm_roots(iso.fiber_poly(P), E.q):
        for y0 in E._ys(x0):
            if iso((Fp(x0, E.q), Fp(y0, E.q))) == P:
                return True
    return False


def generates_quotient(iso: Isogeny, A: tuple) -> bool:
    E2, n = iso.codomain, iso.degree
    if E2.mul(2, A) is None:
        return False
    if not in_image(iso, E2.mul(n, A)):
        return False
    return not any(in_image(iso, E2.mul(k, A)) for k in divisors(n)[:-1])


def build_setup(E: Curve, T: tuple, iso: Isogeny, A: tuple,
                a_const: Optional[int] = None, b_const: Optional[int] = None) -> EnbSetup:
    q, n = E.q, iso.degree
    fiber = iso.fiber_poly(A)
    if len(fiber) != n + 1 or fiber[-1] != 1 or not is_irreducible(fiber, q):
        raise NotABasis("fiber polynomial is not irreducible of degree n")
    ctx = FieldCtx(q, fiber, check=False)
    B = _locate_B(E, iso, A, ctx)
    T = _shift_point(E, B, ctx)
    if iso(T) is not None or E.order_of(T, n) != n:
        raise NormalityFailed("Frobenius shift is not a generator of the kernel")
    periods, a_c, b_c = elliptic_periods(E, T, B, ctx, a_const, b_const)
    nq = nq_value(q, n)
    warnings = []
    if nq * nq > q:
        warnings.append(f"n_q = {nq} exceeds sqrt(q); basis accepted after verification")
    setup = EnbSetup(q, n, E, T, iso, A, fiber, ctx, B, a_c, b_c, periods, nq, warnings)
    _register(setup)   # raises NotABasis when the periods are dependent
    return setup


# ---------------------------------------------------------------------------
# multiplication

def enable_table_multiplication(setup: EnbSetup):
    """Precompute u_0 * u_k in ENB coordinates and route ctx.mul(enb) through the table."""
    ctx = setup.ctx
    u0 = ctx.convert(setup.periods[0], "enb")
    table = []
    for k in range(ctx.n):
        uk = ctx.convert(setup.periods[k], "enb")
        table.append(ctx.mul_via_power(u0, uk).coeffs)
    setup.mult_table = table
    ctx.multipliers["enb"] = functools.partial(_table_mul, setup)


def disable_table_multiplication(setup: EnbSetup):
    setup.ctx.multipliers.pop("enb", None)


def _table_mul(setup: EnbSetup, x: Element, y: Element, rec: OpRecorder = None) -> Element:
    ctx = setup.ctx
    n, table = ctx.n, setup.mult_table
    out = [0] * n
    # u_i u_j = Frob^i(u_0 u_{j-i})
    for i, xi in enumerate(x.coeffs):
        if not xi:
            continue
        acc = [0] * n
        for j, yj in enumerate(y.coeffs):
            if yj:
                row = table[(j - i) % n]
                for m in range(n):
                    acc[m] += yj * row[m]
        for m in range(n):
            out[(m + i) % n] += xi * acc[m]
    _rec(rec, fqn_mul=1, fq_mul=n * n * n + n * n)
    return Element(ctx, out, "enb")


def enb_multiply(x: Element, y: Element, rec: OpRecorder = None, path: str = "oracle",
                 setup: Optional[EnbSetup] = None) -> Element:
    """Product of two ENB elements.  ``path`` is "oracle" (via power basis) or "table"."""
    if x.basis != "enb" or y.basis != "enb":
        raise InvalidArgument("enb_multiply expects elements in the enb basis")
    if path == "oracle":
        _rec(rec, fqn_mul=1)
        return x.ctx.mul_via_power(x, y, rec)
    if path == "table":
        if setup is None or setup.mult_table is None:
            raise InvalidArgument("table path needs a setup with a multiplication table")
        return _table_mul(setup, x, y, rec)
    raise InvalidArgument(f"unknown multiplication path {path!r}")


# ---------------------------------------------------------------------------
# serialization

def serialize_setup(s: EnbSetup) -> str:
    lines = [
        "ENBSETUP1",
        f"q {s.q}",
        f"n {s.n}",
        "curve " + " ".join(str(c % s.q) for c in s.E.coeffs),
        f"T {int(s.T[0])} {int(s.T[1])}",
        f"A {int(s.A[0])} {int(s.A[1])}",
        "fiber " + " ".join(str(c) for c in s.fiber_poly),
        f"a_const {s.a_const}",
        f"b_const {s.b_const}",
    ]
    return "\n".join(lines) + "\n"


def load_setup(text: str) -> EnbSetup:
    """Rebuild (and re-verify) a setup from its text record."""
    rec = {}
    lines = [l.strip() for l in text.strip().splitlines() if l.strip()]
    if not lines or lines[0] != "ENBSETUP1":
        raise InvalidArgument("not an ENBSETUP1 record")
    for line in lines[1:]:
        key, *vals = line.split()
        rec[key] = [int(v) for v in vals]
    try:
        q, n = rec["q"][0], rec["n"][0]
        E = Curve(q, *rec["curve"])
        T = E.point(*rec["T"])
        iso = velu(E, T, n)
        A = iso.codomain.point(*rec["A"])
        setup = build_setup(E, T, iso, A, rec["a_const"][0], rec["b_const"][0])
    except (KeyError, IndexError, TypeError) as exc:
        raise InvalidArgument(f"incomplete setup record: {exc}") from None
    if tuple(rec["fiber"]) != setup.fiber_poly:
        raise InvalidArgument("fiber polynomial does not match the curve data")
    if tuple(int(c) for c in setup.T) != tuple(rec["T"]):
        raise InvalidArgument("T is not the Frobenius shift of the fiber point")
    return setup
