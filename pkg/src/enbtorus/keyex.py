"""Chained multi-key Diffie-Hellman over T_n(F_q).

Each torus point A_i is pushed through theta together with the running
auxiliary state S_{i-1}.  The positive-side output is laid out as residues
(enb coordinates, divisors in increasing order); the first phi(n) residues
are sent as a_i and the rest become S_i.  Only the last state S_m is sent
as a trailer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .enb import EnbSetup
from .errors import MalformedStream, NotInTorus, ZeroComponentEncountered
from .ffield import Element, OpRecorder
from .torus import TorusParams, membership, theta, theta_inverse, torus_generator

MAGIC = "TORUSKEX1"


@dataclass(frozen=True)
class KeyStream:
    n: int
    q: int
    fingerprint: str
    payload: Tuple[Tuple[int, ...], ...]
    trailer: Tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.payload)

    @property
    def residue_count(self) -> int:
        return sum(map(len, self.payload)) + len(self.trailer)

    def to_text(self) -> str:
        lines = [f"{MAGIC} {self.n} {self.q} {self.m} {self.fingerprint}"]
        lines += [" ".join(map(str, row)) for row in self.payload]
        lines.append(" ".join(map(str, self.trailer)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "KeyStream":
        lines = text.strip("\n").split("\n")
        head = lines[0].split()
        if len(head) != 5 or head[0] != MAGIC:
            raise MalformedStream("bad header")
        try:
            n, q, m = int(head[1]), int(head[2]), int(head[3])
            rows = [tuple(int(v) for v in line.split()) for line in lines[1:]]
        except ValueError:
            raise MalformedStream("non-integer field") from None
        if len(rows) != m + 1:
            raise MalformedStream(f"expected {m + 1} residue lines, got {len(rows)}")
        return cls(n, q, head[4], tuple(rows[:-1]), rows[-1])


@dataclass
class Session:
    params: TorusParams
    setup: EnbSetup
    generator: Element
    secrets: List[int]
    seed_aux: Dict[int, Element]
    role: str = "initiator"
    rng_seed: int = 0
    basis: str = "enb"

    def public_points(self, rec: OpRecorder = None) -> List[Element]:
        ctx = self.setup.ctx
        return [ctx.pow(self.generator, s, rec) for s in self.secrets]


# ---------------------------------------------------------------------------
# layout of Pi+ and Pi- as residues

def _layout(values: Dict[int, Element], setup: EnbSetup) -> List[int]:
    ctx = setup.ctx
    out: List[int] = []
    for d in sorted(values):
        out.extend(ctx.subfield_project(ctx.convert(values[d], "enb"), d))
    return out


def _unlayout(res: Sequence[int], degrees: Sequence[int], setup: EnbSetup,
              basis: str) -> Dict[int, Element]:
    ctx = setup.ctx
    out, pos = {}, 0
    for d in sorted(degrees):
        chunk = res[pos:pos + d]
        pos += d
        out[d] = ctx.convert(ctx.subfield_embed(chunk, d, "enb"), basis)
    return out


def _aux_residues(params: TorusParams) -> int:
    return sum(params.negative)


def random_aux(params: TorusParams, setup: EnbSetup, rng: random.Random,
               basis: str = "enb") -> Dict[int, Element]:
    ctx = setup.ctx
    aux = {}
    for d in params.negative:
        coords = [0] * d
        while not any(coords):
            coords = [rng.randrange(params.q) for _ in range(d)]
        aux[d] = ctx.convert(ctx.subfield_embed(coords, d, "enb"), basis)
    return aux


# ---------------------------------------------------------------------------
# encode / decode

def session_encode(sess: Session, points: Sequence[Element],
                   rec: OpRecorder = None) -> KeyStream:
    params, setup = sess.params, sess.setup
    phi = params.euler_phi
    state = sess.seed_aux
    payload = []
    for i, A in enumerate(points, start=1):
        if not membership(A, params):
            raise NotInTorus(i)
        res = _layout(theta(A, state, params, rec, check=False), setup)
        payload.append(tuple(res[:phi]))
        rest = res[phi:]
        pos = 0
        for d in params.negative:
            if not any(rest[pos:pos + d]):
                raise ZeroComponentEncountered(i)
            pos += d
        state = _unlayout(rest, params.negative, setup, sess.basis)
    trailer = tuple(_layout(state, setup))
    return KeyStream(params.n, params.q, setup.fingerprint(), tuple(payload), trailer)


def session_decode(stream: KeyStream, params: TorusParams, setup: EnbSetup,
                   basis: str = "enb", rec: OpRecorder = None) -> List[Element]:
    phi, q = params.euler_phi, params.q
    if (stream.n, stream.q) != (params.n, params.q):
        raise MalformedStream("stream parameters do not match")
    if stream.fingerprint != setup.fingerprint():
        raise MalformedStream("setup fingerprint mismatch")
    rows = list(stream.payload) + [stream.trailer]
    widths = [phi] * stream.m + [_aux_residues(params)]
    for row, w in zip(rows, widths):
        if len(row) != w:
            raise MalformedStream(f"residue line has length {len(row)}, expected {w}")
        if any(not 0 <= v < q for v in row):
            raise MalformedStream("residue out of range")

    def to_state(res):
        pos = 0
        for d in params.negative:
            if not any(res[pos:pos + d]):
                raise MalformedStream("zero auxiliary component")
            pos += d
        return res

    state = to_state(list(stream.trailer))
    points: List[Element] = []
    for i in range(stream.m, 0, -1):
        res = list(stream.payload[i - 1]) + state
        if not any(res[:1]):
            raise MalformedStream(f"zero F_q component in block {i}")
        outputs = _unlayout(res, params.positive, setup, basis)
        A, aux = theta_inverse(outputs, params, rec, check=False)
        if not membership(A, params):
            raise NotInTorus(i)
        points.append(A)
        state = to_state(_layout(aux, setup))
    points.reverse()
    return points


# ---------------------------------------------------------------------------
# two-party simulation

@dataclass
class ExchangeReport:
    m: int
    keys_agree: bool
    residues_per_direction: int
    streams: Dict[str, str] = field(repr=False)
    ops: Dict[str, Dict[str, int]] = field(default_factory=dict)
    keys: List[Element] = field(default_factory=list, repr=False)

    def lines(self) -> List[str]:
        out = [f"m: {self.m}", f"keys_agree: {self.keys_agree}",
               f"residues_per_direction: {self.residues_per_direction}"]
        for basis, ops in self.ops.items():
            out += [f"{basis}.{k}: {v}" for k, v in ops.items()]
        return out


def make_sessions(params: TorusParams, setup: EnbSetup, m: int, seed: int,
                  basis: str = "enb") -> Tuple[Session, Session]:
    """Alice and Bob from one seed; every random draw happens in enb coordinates."""
    rng = random.Random(seed)
    ctx = setup.ctx
    g = torus_generator(ctx, params, rng, "enb")
    sessions = []
    for role in ("initiator", "responder"):
        secrets = [rng.randrange(1, params.phi_n) for _ in range(m)]
        aux = random_aux(params, setup, rng, "enb")
        sessions.append(Session(params, setup, ctx.convert(g, basis), secrets,
                                {d: ctx.convert(v, basis) for d, v in aux.items()},
                                role, seed, basis))
    return sessions[0], sessions[1]


def simulate_exchange(params: TorusParams, setup: EnbSetup, m: int, seed: int,
                      bases: Sequence[str] = ("enb", "power")) -> ExchangeReport:
    ctx = setup.ctx
    streams, ops, all_keys = {}, {}, {}
    for basis in bases:
        rec = OpRecorder()
        alice, bob = make_sessions(params, setup, m, seed, basis)
        sa = session_encode(alice, alice.public_points(), rec)
        sb = session_encode(bob, bob.public_points(), rec)
        got_a = session_decode(KeyStream.from_text(sa.to_text()), params, setup, basis, rec)
        got_b = session_decode(KeyStream.from_text(sb.to_text()), params, setup, basis, rec)
        k_bob = [ctx.pow(A, y) for A, y in zip(got_a, bob.secrets)]
        k_alice = [ctx.pow(B, x) for B, x in zip(got_b, alice.secrets)]
        if k_alice != k_bob:
            raise AssertionError(f"key mismatch in the {basis} backend")
        streams[f"{basis}.alice"] = sa.to_text()
        streams[f"{basis}.bob"] = sb.to_text()
        ops[basis] = rec.as_dict()
        all_keys[basis] = [ctx.convert(k, "enb") for k in k_alice]
    agree = len({tuple(map(lambda e: e.coeffs, ks)) for ks in all_keys.values()}) == 1
    if not agree:
        raise AssertionError("backends derived different keys")
    first = streams[f"{bases[0]}.alice"]
    for b in bases[1:]:
        if streams[f"{b}.alice"] != first:
            raise AssertionError("streams differ between backends")
    return ExchangeReport(m, True, KeyStream.from_text(first).residue_count, streams, ops,
                          all_keys[bases[0]])
