"""Prime fields, their degree-n extensions, and base-q digit exponentiation.

An extension F_{q^n} is a :class:`FieldCtx` built from a monic irreducible
polynomial.  Elements carry the name of the basis their coordinates refer to:
``"power"`` (powers of X mod the defining polynomial) is always registered;
other bases are added with :meth:`FieldCtx.register_basis`.  A basis flagged
``normal`` is one where Frobenius is a cyclic shift of coordinates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, fields
from typing import Callable, Dict, Optional, Sequence

import sympy

from .cycpoly import DigitExponent, factor
from .errors import (DenominatorNotOne, InvalidArgument, NotABasis, NotDivisor,
                     NotInSubfield, NotPrime, ZeroElement)


# ---------------------------------------------------------------------------
# prime field elements (used for curve arithmetic over F_q)

class Fp:
    __slots__ = ("v", "q")

    def __init__(self, v, q):
        self.q = q
        self.v = int(v) % q

    def _val(self, other):
        if isinstance(other, Fp):
            return other.v
        if isinstance(other, int):
            return other % self.q
        return None

    def __add__(self, o):
        v = self._val(o)
        return NotImplemented if v is None else Fp(self.v + v, self.q)

    __radd__ = __add__

    def __sub__(self, o):
        v = self._val(o)
        return NotImplemented if v is None else Fp(self.v - v, self.q)

    def __rsub__(self, o):
        v = self._val(o)
        return NotImplemented if v is None else Fp(v - self.v, self.q)

    def __mul__(self, o):
        v = self._val(o)
        return NotImplemented if v is None else Fp(self.v * v, self.q)

    __rmul__ = __mul__

    def __truediv__(self, o):
        v = self._val(o)
        if v is None:
            return NotImplemented
        if v == 0:
            raise ZeroDivisionError("division by zero in F_q")
        return Fp(self.v * pow(v, -1, self.q), self.q)

    def __rtruediv__(self, o):
        v = self._val(o)
        if v is None:
            return NotImplemented
        return Fp(v, self.q) / self

    def __neg__(self):
        return Fp(-self.v, self.q)

    def __pow__(self, e):
        if e < 0:
            return Fp(pow(self.v, -1, self.q), self.q) ** (-e)
        return Fp(pow(self.v, e, self.q), self.q)

    def __eq__(self, o):
        v = self._val(o)
        return NotImplemented if v is None else self.v == v

    def __hash__(self):
        return hash((self.v, self.q))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.q})"

    def is_square(self) -> bool:
        return self.v == 0 or pow(self.v, (self.q - 1) // 2, self.q) == 1

    def sqrt(self) -> Optional["Fp"]:
        if not self.is_square():
            return None
        return Fp(sympy.sqrt_mod(self.v, self.q), self.q)


# ---------------------------------------------------------------------------
# polynomials over F_q (tuples of residues, ascending order, trimmed)

def pm_trim(a, q):
    a = [c % q for c in a]
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def pm_mul(a, b, q):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return pm_trim(out, q)


def pm_add(a, b, q):
    n = max(len(a), len(b))
    return pm_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                    for i in range(n)], q)


def pm_sub(a, b, q):
    return pm_add(a, [-c for c in b], q)


def pm_divmod(a, b, q):
    b = pm_trim(b, q)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(pm_trim(a, q))
    inv = pow(b[-1], -1, q)
    db = len(b) - 1
    if len(a) <= db:
        return (), tuple(a)
    quo = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % q
        if c:
            quo[k - db] = c
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % q
    return pm_trim(quo, q), pm_trim(a[:db], q)


def pm_mod(a, b, q):
    return pm_divmod(a, b, q)[1]


def pm_gcd(a, b, q):
    a, b = pm_trim(a, q), pm_trim(b, q)
    while b:
        a, b = b, pm_mod(a, b, q)
    if a:
        inv = pow(a[-1], -1, q)
        a = tuple(c * inv % q for c in a)
    return a


def pm_powmod(a, e, f, q):
    result, base = (1,), pm_mod(a, f, q)
    while e:
        if e & 1:
            result = pm_mod(pm_mul(result, base, q), f, q)
        e >>= 1
        if e:
            base = pm_mod(pm_mul(base, base, q), f, q)
    return result


def pm_eval(a, x, q):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % q
    return acc


def pm_roots(f, q):
    """Roots of f in F_q, by exhaustive evaluation (desk-scale q)."""
    return [x for x in range(q) if pm_eval(f, x, q) == 0]


def is_irreducible(f, q) -> bool:
    """Rabin's test: X^{q^n} = X mod f and gcd(X^{q^{n/l}} - X, f) = 1 for primes l | n."""
    f = pm_trim(f, q)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    frob = [(0, 1)]   # frob[i] = X^{q^i} mod f
    for _ in range(n):
        frob.append(pm_powmod(frob[-1], q, f, q))
    if pm_sub(frob[n], (0, 1), q) != ():
        return False
    for ell in factor(n):
        if len(pm_gcd(pm_sub(frob[n // ell], (0, 1), q), f, q)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# dense linear algebra mod q

def mat_vec(m, v, q):
    return tuple(sum(a * b for a, b in zip(row, v)) % q for row in m)


def mat_mul(a, b, q):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % q for col in cols] for row in a]


def mat_inv(m, q):
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % q), None)
        if piv is None:
            raise NotABasis("matrix is singular mod q")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, q)
        aug[col] = [x * inv % q for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % q for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def nullspace(m, q):
    """Basis (list of vectors) of the right kernel of m over F_q."""
    rows = [list(r) for r in m]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % q), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, q)
        rows[r] = [x * inv % q for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % q for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc] % q
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# instrumentation

@dataclass
class OpRecorder:
    """Field-level operation counters.  One recorder per thread of work."""

    fq_mul: int = 0
    fqn_mul: int = 0
    frobenius: int = 0
    frobenius_fqn_mul: int = 0
    inversion: int = 0
    conversion: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def reset(self):
        for f in fields(self):
            setattr(self, f.name, 0)


def _rec(rec, **kw):
    if rec is not None:
        for k, v in kw.items():
            setattr(rec, k, getattr(rec, k) + v)


# ---------------------------------------------------------------------------
# extension fields

class Element:
    """An element of F_{q^n}: n residues with respect to a named basis."""

    __slots__ = ("ctx", "basis", "coeffs")

    def __init__(self, ctx: "FieldCtx", coeffs: Sequence[int], basis: str = "power"):
        if len(coeffs) != ctx.n:
            raise InvalidArgument(f"expected {ctx.n} coordinates, got {len(coeffs)}")
        self.ctx = ctx
        self.basis = basis
        self.coeffs = tuple(int(c) % ctx.q for c in coeffs)

    def _coerce(self, other):
        if isinstance(other, Element):
            if other.ctx is not self.ctx:
                raise InvalidArgument("elements belong to different fields")
            if other.basis != self.basis:
                raise InvalidArgument(f"basis mismatch: {self.basis} vs {other.basis}")
            return other
        if isinstance(other, (int, Fp)):
            return self.ctx.scalar(int(other), self.basis)
        return None

    def __add__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return Element(self.ctx, [a + b for a, b in zip(self.coeffs, o.coeffs)], self.basis)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return Element(self.ctx, [a - b for a, b in zip(self.coeffs, o.coeffs)], self.basis)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Element(self.ctx, [-a for a in self.coeffs], self.basis)

    def __mul__(self, o):
        if isinstance(o, (int, Fp)):
            return Element(self.ctx, [a * int(o) for a in self.coeffs], self.basis)
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return self.ctx.mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, (int, Fp)):
            return self * pow(int(o), -1, self.ctx.q)
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return self.ctx.mul(self, self.ctx.inv(o))

    def __rtruediv__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e):
        return self.ctx.pow(self, e)

    def __eq__(self, o):
        if isinstance(o, (int, Fp)):
            o = self.ctx.scalar(int(o), self.basis)
        if not isinstance(o, Element) or o.ctx is not self.ctx:
            return NotImplemented
        if o.basis != self.basis:
            o = self.ctx.convert(o, self.basis)
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.ctx.convert(self, "power").coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs == self.ctx.one(self.basis).coeffs

    def in_base_field(self) -> bool:
        return self.ctx.convert(self, "power").coeffs[1:] == (0,) * (self.ctx.n - 1)

    def base_value(self) -> int:
        """The F_q value of an element lying in the prime field."""
        if not self.in_base_field():
            raise NotInSubfield("element is not in F_q")
        return self.ctx.convert(self, "power").coeffs[0]

    def to_text(self) -> str:
        return f"{self.basis}:" + ",".join(str(c) for c in self.coeffs)

    def __repr__(self):
        return f"Element({self.to_text()})"


@dataclass
class _Basis:
    to_power: list
    from_power: list
    normal: bool


class FieldCtx:
    """F_{q^n} = F_q[X]/(defining_poly), with a registry of bases."""

    def __init__(self, q: int, defining_poly: Sequence[int], check: bool = True):
        if not sympy.isprime(q) or q < 3:
            raise NotPrime(f"q = {q} is not an odd prime")
        f = pm_trim(defining_poly, q)
        if len(f) < 3 or f[-1] != 1:
            raise InvalidArgument("defining polynomial must be monic of degree >= 2")
        if check and not is_irreducible(f, q):
            raise InvalidArgument("defining polynomial is reducible")
        self.q = q
        self.n = len(f) - 1
        self.defining_poly = f
        self._tail = f[:-1]
        ident = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        self.bases: Dict[str, _Basis] = {"power": _Basis(ident, ident, False)}
        self.multipliers: Dict[str, Callable] = {}
        self._subfield_cache = {}
        self._frob_matrix = None

    # -- construction ----------------------------------------------------
    def element(self, coeffs, basis="power") -> Element:
        if basis not in self.bases:
            raise InvalidArgument(f"unknown basis {basis!r}")
        return Element(self, coeffs, basis)

    def scalar(self, c: int, basis="power") -> Element:
        return self.convert(Element(self, [c] + [0] * (self.n - 1)), basis)

    def one(self, basis="power") -> Element:
        return self.scalar(1, basis)

    def zero(self, basis="power") -> Element:
        return Element(self, [0] * self.n, basis)

    def gen(self) -> Element:
        """alpha = X mod defining_poly, in the power basis."""
        return Element(self, [0, 1] + [0] * (self.n - 2))

    def random(self, rng: random.Random, basis="power", nonzero=True) -> Element:
        while True:
            x = Element(self, [rng.randrange(self.q) for _ in range(self.n)], basis)
            if not nonzero or not x.is_zero():
                return x

    def parse(self, text: str) -> Element:
        basis, _, body = text.strip().partition(":")
        return self.element([int(t) for t in body.split(",")], basis)

    def register_basis(self, name: str, to_power, normal: bool = False):
        """Register an F_q-basis by its matrix (columns = power coordinates of basis vectors)."""
        to_power = [[c % self.q for c in row] for row in to_power]
        self.bases[name] = _Basis(to_power, mat_inv(to_power, self.q), normal)

    def convert(self, x: Element, basis: str, rec: OpRecorder = None) -> Element:
        if x.basis == basis:
            return x
        coeffs = x.coeffs
        if x.basis != "power":
            coeffs = mat_vec(self.bases[x.basis].to_power, coeffs, self.q)
            _rec(rec, fq_mul=self.n * self.n, conversion=1)
        if basis != "power":
            coeffs = mat_vec(self.bases[basis].from_power, coeffs, self.q)
            _rec(rec, fq_mul=self.n * self.n, conversion=1)
        return Element(self, coeffs, basis)

    # -- arithmetic in the power basis ----------------------------------------
    def _mulmod(self, a, b):
        n, q = self.n, self.q
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        tail = self._tail
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k] % q
            if c:
                base = k - n
                for j in range(n):
                    prod[base + j] -= c * tail[j]
        return tuple(c % q for c in prod[:n])

    @property
    def _mul_cost(self):
        return self.n * self.n + (self.n - 1) * self.n

    def _pow_power(self, coeffs, e, rec=None, counter="fqn_mul"):
        result, base = None, coeffs
        nmul = 0
        while e:
            if e & 1:
                if result is None:
                    result = base
                else:
                    result = self._mulmod(result, base)
                    nmul += 1
            e >>= 1
            if e:
                base = self._mulmod(base, base)
                nmul += 1
        _rec(rec, fq_mul=nmul * self._mul_cost, **{counter: nmul})
        return result if result is not None else self.one().coeffs

    # -- public arithmetic -----------------------------------------------------
    def mul(self, x: Element, y: Element, rec: OpRecorder = None) -> Element:
        if x.basis != y.basis:
            raise InvalidArgument(f"basis mismatch: {x.basis} vs {y.basis}")
        if x.basis in self.multipliers:
            return self.multipliers[x.basis](x, y, rec)
        _rec(rec, fqn_mul=1)
        if x.basis == "power":
            _rec(rec, fq_mul=self._mul_cost)
            return Element(self, self._mulmod(x.coeffs, y.coeffs))
        return self.mul_via_power(x, y, rec)

    def mul_via_power(self, x: Element, y: Element, rec: OpRecorder = None) -> Element:
        """Multiply by converting to the power basis and back (no fqn_mul recorded)."""
        px, py = self.convert(x, "power", rec), self.convert(y, "power", rec)
        _rec(rec, fq_mul=self._mul_cost)
        return self.convert(Element(self, self._mulmod(px.coeffs, py.coeffs)), x.basis, rec)

    def inv(self, x: Element, rec: OpRecorder = None) -> Element:
        if x.is_zero():
            raise ZeroElement("inverse of zero")
        q, f = self.q, self.defining_poly
        a = self.convert(x, "power", rec).coeffs
        r0, r1 = f, pm_trim(a, q)
        s0, s1 = (), (1,)
        ops = 0
        while r1:
            quo, rem = pm_divmod(r0, r1, q)
            ops += len(r0) * len(r1)
            r0, r1 = r1, rem
            s0, s1 = s1, pm_sub(s0, pm_mul(quo, s1, q), q)
            ops += len(quo) * len(s1)
        c = pow(r0[0], -1, q)
        out = pm_mod(tuple(v * c for v in s0), f, q)
        _rec(rec, inversion=1, fq_mul=ops)
        res = Element(self, list(out) + [0] * (self.n - len(out)))
        return self.convert(res, x.basis, rec)

    def pow(self, x: Element, e: int, rec: OpRecorder = None) -> Element:
        """x**e by square-and-multiply in the element's basis."""
        if e < 0:
            x, e = self.inv(x, rec), -e
        if e == 0:
            return self.one(x.basis)
        result, base = None, x
        while e:
            if e & 1:
                result = base if result is None else self.mul(result, base, rec)
            e >>= 1
            if e:
                base = self.mul(base, base, rec)
        return result

    def frobenius(self, x: Element, k: int = 1, rec: OpRecorder = None) -> Element:
        """x**(q**k).  A cyclic shift in a normal basis, exponentiation in the power basis."""
        k %= self.n
        if k == 0:
            return x
        _rec(rec, frobenius=1)
        b = self.bases[x.basis]
        if b.normal:
            c = x.coeffs
            return Element(self, c[-k:] + c[:-k], x.basis)
        px = self.convert(x, "power", rec)
        out = self._pow_power(px.coeffs, self.q ** k, rec, counter="frobenius_fqn_mul")
        return self.convert(Element(self, out), x.basis, rec)

    def exp_base_q(self, x: Element, e: DigitExponent, rec: OpRecorder = None) -> Element:
        """x ** (sum_i e.digits[i] q**i) via Frobenius shifts and small powers.

        Digits sharing an absolute value are multiplied together first, then the
        distinct absolute values are combined by one left-to-right binary pass,
        so the cost is one Frobenius per nonzero digit index plus
        O(#digits * log2(max digit)) multiplications, independent of q.
        """
        if e.denominator != 1:
            raise DenominatorNotOne("exponent has a denominator; use a root extraction")
        if x.is_zero():
            raise ZeroElement("exponentiation of zero")
        if not e.digits:
            return self.one(x.basis)
        x_inv = self.inv(x, rec) if any(c < 0 for c in e.digits) else None
        groups: Dict[int, Element] = {}
        for i, c in enumerate(e.digits):
            if c == 0:
                continue
            term = self.frobenius(x if c > 0 else x_inv, i, rec)
            v = abs(c)
            groups[v] = self.mul(groups[v], term, rec) if v in groups else term
        acc = None
        for bit in range(max(groups).bit_length() - 1, -1, -1):
            if acc is not None:
                acc = self.mul(acc, acc, rec)
            for v, g in groups.items():
                if v >> bit & 1:
                    acc = g if acc is None else self.mul(acc, g, rec)
        return acc

    # -- subfields ---------------------------------------------------------------
    def frobenius_matrix(self):
        """Matrix of x -> x^q on power coordinates (computed once, unrecorded)."""
        if self._frob_matrix is None:
            alpha_q = self._pow_power(self.gen().coeffs, self.q)
            cols = [self.one().coeffs]
            for _ in range(1, self.n):
                cols.append(self._mulmod(cols[-1], alpha_q))
            self._frob_matrix = [list(r) for r in zip(*cols)]
        return self._frob_matrix

    def _power_subfield(self, d):
        if d not in self._subfield_cache:
            q, n = self.q, self.n
            fd = self.frobenius_matrix()
            m = [[int(i == j) for j in range(n)] for i in range(n)]
            for _ in range(d):
                m = mat_mul(fd, m, q)
            for i in range(n):
                m[i][i] -= 1
            ker = nullspace(m, q)
            assert len(ker) == d
            # pick d pivot rows and normalise so the embedding is the identity there
            cols = [list(c) for c in ker]
            pivots = []
            for i in range(n):
                trial = pivots + [i]
                sub = [[cols[j][r] for j in range(d)] for r in trial]
                if not nullspace([list(r) for r in zip(*sub)], q):
                    pivots = trial
                if len(pivots) == d:
                    break
            a_sub = [[cols[j][r] for j in range(d)] for r in pivots]
            a_sub_inv = mat_inv(a_sub, q)
            emb = mat_mul([[cols[j][r] for j in range(d)] for r in range(n)], a_sub_inv, q)
            self._subfield_cache[d] = (pivots, emb)
        return self._subfield_cache[d]

    def _check_divisor(self, d):
        if d < 1 or self.n % d:
            raise NotDivisor(f"{d} does not divide {self.n}")

    def in_subfield(self, x: Element, d: int, rec: OpRecorder = None) -> bool:
        self._check_divisor(d)
        return d == self.n or self.frobenius(x, d, rec) == x

    def subfield_project(self, x: Element, d: int, rec: OpRecorder = None) -> tuple:
        """d coordinates of an element of F_{q^d} (truncation in a normal basis)."""
        self._check_divisor(d)
        if not self.in_subfield(x, d, rec):
            raise NotInSubfield(f"element is not in the subfield of degree {d}")
        if d == self.n:
            return x.coeffs
        if self.bases[x.basis].normal:
            return x.coeffs[:d]
        pivots, _ = self._power_subfield(d)
        px = self.convert(x, "power", rec)
        return tuple(px.coeffs[i] for i in pivots)

    def subfield_embed(self, coords: Sequence[int], d: int, basis="power",
                       rec: OpRecorder = None) -> Element:
        """Inverse of :meth:`subfield_project`."""
        self._check_divisor(d)
        if len(coords) != d:
            raise InvalidArgument(f"expected {d} coordinates, got {len(coords)}")
        if d == self.n:
            return Element(self, coords, basis)
        if self.bases[basis].normal:
            return Element(self, tuple(coords) * (self.n // d), basis)
        _, emb = self._power_subfield(d)
        return self.convert(Element(self, mat_vec(emb, coords, self.q)), basis, rec)

    def norm_to_subfield(self, x: Element, d: int, rec: OpRecorder = None) -> Element:
        """x ** ((q^n - 1)/(q^d - 1)), landing in F_{q^d}."""
        self._check_divisor(d)
        digits = [1 if i % d == 0 else 0 for i in range(self.n - d + 1)]
        return self.exp_base_q(x, DigitExponent(digits), rec)


def build_field(q: int, n: int, seed: int = 0) -> FieldCtx:
    """F_{q^n} from a random monic irreducible polynomial (deterministic per seed)."""
    if not sympy.isprime(q) or q < 3:
        raise NotPrime(f"q = {q} must be an odd prime")
    if n < 2:
        raise InvalidArgument(f"extension degree must be >= 2, got {n}")
    rng = random.Random(seed)
    while True:
        f = tuple(rng.randrange(q) for _ in range(n)) + (1,)
        if f[0] and is_irreducible(f, q):
            return FieldCtx(q, f, check=False)


def element_from_text(ctx: FieldCtx, text: str) -> Element:
    return ctx.parse(text)
