"""Certificates of solvability and of form equivalence: generation, verification
and a canonical text format.

An infrastructure certificate never stores the (possibly enormous) matrix
W = (-1)^m U^k L_j.  L_j and U are given by chains of short formulas; the
verifier evaluates them modulo |c D gamma| for the residue conditions and in
p-digit floating point with error enclosures for the signs.

For k < 0 the J chain holds L_j' with j' = 2p - j - 1 and W is evaluated as
(-1)^m U^(k+1) P S0 L_j' P, where P swaps coordinates and S0 is the step
taking the reflection (c, b, a) of the principal form back to it.  This equals
(-1)^m U^k L_j, but every factor then runs in the same direction along the
cycle, so the floating-point route never cancels.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from .compose import (PAIRS, Chain, b0_matrix, chain_forms, cofactors, composed_form,
                      compose_reduced, doubling_chain, verify_composition)
from .errors import CertificateInvalid, DomainError, ParseError, ResourceError
from .floatp import (FpOverflow, enc_add, enc_exact_int, enc_from_fraction,
                     enc_mul, enc_neg, enc_sum, sign_certified)
from .forms import (QForm, _is_reduced, apply_transform, cycle_of, mat_det,
                    neighbor_lambda, principal_cycle, reduce, reduced_identity,
                    step_matrix, substitute)
from .frontend import (INDEFINITE, DioSystem, Solution, Unsolvable, classify, solve,
                       to_pell)
from .numtheory import crt, inv_mod, split_modulus

FP_RANGE = 1 << 62
MAX_PREC = 1 << 16


class BitMeter:
    """Peak bit length of the exact integers a verifier stores (floating-point
    mantissas are bounded by the certificate's precision and not counted)."""

    def __init__(self):
        self.peak = 0

    def see(self, *vals):
        for v in vals:
            b = v.bit_length() if v >= 0 else (-v).bit_length()
            if b > self.peak:
                self.peak = b

    def see_form(self, Q):
        self.see(*Q)

    def see_mat(self, S):
        for row in S:
            self.see(*row)


class _NullMeter(BitMeter):
    def see(self, *vals):
        pass


@dataclass
class Verdict:
    ok: bool
    reason: str = "ok"
    detail: str = ""
    peak_bits: int = 0

    def __bool__(self):
        return self.ok


# ------------------------------------------------------------ certificates

@dataclass
class DirectCert:
    sys: DioSystem
    x1: int
    x2: int


@dataclass
class InfraCert:
    sys: DioSystem
    h: int
    G: int
    B: int
    C: int
    S: tuple
    Qred: QForm
    case: str
    k: int
    m: int
    p: int
    chain_j: Chain
    chain_2p: Chain


# ------------------------------------------------------ modular evaluation

def _mm(A, B, M):
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return (((a * e + b * g) % M, (a * f + b * h) % M),
            ((c * e + d * g) % M, (c * f + d * h) % M))


def _chain_mod(D, chain, M, meter):
    """V_K mod M for a chain already checked by chain_forms."""
    B0 = b0_matrix(D)
    one = 1 % M
    V = [((one, 0), (0, one))]
    for st in chain.steps:
        if st[0] == "I":
            V.append(_mm(V[-1], st[1], M))
        else:
            _, k1, k2, B = st
            V.append(_typeII_mod(B0, B, V[k1], V[k2], M))
        meter.see_mat(V[-1])
    return V[-1]


def _typeII_mod(B0, B, V1, V2, M):
    dets = cofactors(B)
    parts = split_modulus(M, dets)
    res = [[[], []], [[], []]]
    mods = []
    for (i, j), mij, det in zip(PAIRS, parts, dets):
        if mij == 1:
            continue
        mods.append(mij)
        # R = B0 (V1 x V2), columns i and j only
        R = [[0, 0], [0, 0]]
        for r in range(2):
            for t, col in enumerate((i, j)):
                acc = 0
                for q in range(4):
                    if B0[r][q]:
                        acc += B0[r][q] * V1[q // 2][col // 2] * V2[q % 2][col % 2]
                R[r][t] = acc % mij
        di = inv_mod(det, mij)
        b1i, b1j, b2i, b2j = B[0][i], B[0][j], B[1][i], B[1][j]
        # S3 = R_ij Delta_ij^-1
        for r in range(2):
            x, y = R[r]
            res[r][0].append((x * b2j - y * b2i) * di % mij)
            res[r][1].append((-x * b1j + y * b1i) * di % mij)
    if not mods:
        return ((0, 0), (0, 0))
    return tuple(tuple(crt(res[r][t], mods) for t in range(2)) for r in range(2))


def _adj(V):
    (a, b), (c, d) = V
    return ((d, -b), (-c, a))


def _mpow(V, k, M):
    if k < 0:
        V, k = tuple(tuple(x % M for x in row) for row in _adj(V)), -k
    R = ((1 % M, 0), (0, 1 % M))
    while k:
        if k & 1:
            R = _mm(R, V, M)
        V = _mm(V, V, M)
        k >>= 1
    return R


def reflect(Q):
    return QForm(Q.c, Q.b, Q.a)


def mirror_step(D):
    """S0 with reflect(I)|S0 = I for the principal reduced form I."""
    Qm = reflect(reduced_identity(D)[0])
    return step_matrix(neighbor_lambda(Qm, math.isqrt(D)))


def _mirror(V, S0, mul):
    # P S0 V P with P = [[0, 1], [1, 0]]
    R = mul(S0, V)
    return ((R[1][1], R[1][0]), (R[0][1], R[0][0]))


def eval_chain_mod(D, chain_j, chain_2p, k, m, M, meter=None):
    """W = (-1)^m (L_2p)^k L_j modulo M (chain_j holds L_j' when k < 0)."""
    meter = meter or _NullMeter()
    Vj = _chain_mod(D, chain_j, M, meter)
    U = _chain_mod(D, chain_2p, M, meter)
    if k < 0:
        S0 = tuple(tuple(x % M for x in row) for row in mirror_step(D))
        Vj = _mirror(Vj, S0, lambda A, B: _mm(A, B, M))
        k += 1
    W = _mm(_mpow(U, k, M), Vj, M)
    if m:
        W = tuple(tuple(-x % M for x in row) for row in W)
    meter.see_mat(W)
    return W


def _u_of_W(W, S, lam, M=None):
    """First column of [[1, lam], [0, 1]] W S^-1."""
    s21, s22 = S[1][0], S[1][1]
    w1 = W[0][0] * s22 - W[0][1] * s21
    w2 = W[1][0] * s22 - W[1][1] * s21
    u1, u2 = w1 + lam * w2, w2
    if M is not None:
        return u1 % M, u2 % M
    return u1, u2


# --------------------------------------------------- floating evaluation

def _ex(n, p):
    return enc_exact_int(n, p, FP_RANGE)


def _emat_mul(A, B):
    return tuple(tuple(enc_add(enc_mul(A[r][0], B[0][c]), enc_mul(A[r][1], B[1][c]))
                       for c in range(2)) for r in range(2))


def _chain_fp(D, chain, p):
    B0 = b0_matrix(D)
    one, zero = _ex(1, p), _ex(0, p)
    V = [((one, zero), (zero, one))]
    for st in chain.steps:
        if st[0] == "I":
            S = st[1]
            V.append(_emat_mul(V[-1], tuple(tuple(_ex(x, p) for x in row) for row in S)))
        else:
            _, k1, k2, B = st
            V.append(_typeII_fp(B0, B, V[k1], V[k2], p))
    return V[-1]


def _typeII_fp(B0, B, V1, V2, p):
    dets = cofactors(B)
    # the invertible pair with the smallest determinant
    best = min((abs(d), t) for t, d in enumerate(dets) if d)
    t = best[1]
    i, j = PAIRS[t]
    det = dets[t]
    R = [[None, None], [None, None]]
    for r in range(2):
        for s, col in enumerate((i, j)):
            terms = []
            for q in range(4):
                if B0[r][q]:
                    prod = enc_mul(V1[q // 2][col // 2], V2[q % 2][col % 2])
                    terms.append(enc_mul(_ex(B0[r][q], p), prod))
            R[r][s] = enc_sum(terms)
    b1i, b1j, b2i, b2j = B[0][i], B[0][j], B[1][i], B[1][j]
    inv = enc_from_fraction(Fraction(1, det), p, FP_RANGE)
    out = []
    for r in range(2):
        x, y = R[r]
        e1 = enc_add(enc_mul(x, _ex(b2j, p)), enc_mul(y, _ex(-b2i, p)))
        e2 = enc_add(enc_mul(x, _ex(-b1j, p)), enc_mul(y, _ex(b1i, p)))
        out.append((enc_mul(e1, inv), enc_mul(e2, inv)))
    return tuple(out)


def _epow(V, k, p):
    if k < 0:
        (a, b), (c, d) = V
        V, k = ((d, enc_neg(b)), (enc_neg(c), a)), -k
    one, zero = _ex(1, p), _ex(0, p)
    R = ((one, zero), (zero, one))
    while k:
        if k & 1:
            R = _emat_mul(R, V)
        k >>= 1
        if k:
            V = _emat_mul(V, V)
    return R


def eval_chain_fp(D, chain_j, chain_2p, k, m, S, p):
    """Enclosures of (u1, u2), the first column of [[1, lam], [0, 1]] W S^-1."""
    Vj = _chain_fp(D, chain_j, p)
    U = _chain_fp(D, chain_2p, p)
    if k < 0:
        S0 = tuple(tuple(_ex(x, p) for x in row) for row in mirror_step(D))
        Vj = _mirror(Vj, S0, _emat_mul)
        k += 1
    W = _emat_mul(_epow(U, k, p), Vj)
    if m:
        W = tuple(tuple(enc_neg(x) for x in row) for row in W)
    lam = math.isqrt(D)
    s21, s22 = S[1][0], S[1][1]
    w1 = enc_add(enc_mul(W[0][0], _ex(s22, p)), enc_mul(W[0][1], _ex(-s21, p)))
    w2 = enc_add(enc_mul(W[1][0], _ex(s22, p)), enc_mul(W[1][1], _ex(-s21, p)))
    u1 = enc_add(w1, enc_mul(_ex(lam, p), w2))
    return u1, w2


# ------------------------------------------------------------- generation

def gen_solvability_cert(sys, force_cert=False, start_prec=64):
    """DirectCert, InfraCert or Unsolvable.  The precision of an Infra
    certificate starts at start_prec and doubles until both signs certify."""
    r = solve(sys, force_infra=force_cert)
    if isinstance(r, Unsolvable):
        return r
    if isinstance(r, Solution):
        return DirectCert(sys, r.x1, r.x2)
    return _infra_cert(r, start_prec)


def _infra_cert(w, p):
    br = w.branch
    cyc = br.cycle
    D = cyc.D
    ch_j = doubling_chain(cyc, br.j if w.k >= 0 else cyc.period - br.j - 1)
    ch_2p = doubling_chain(cyc, cyc.period)
    want2 = 1 if w.case == "a" else -1
    while p <= MAX_PREC:
        u1, u2 = eval_chain_fp(D, ch_j, ch_2p, w.k, w.m, br.S, p)
        if sign_certified(u1) == 1 and sign_certified(u2) == want2:
            return InfraCert(w.ps.sys, br.h, br.G, br.B, br.C, br.S, br.Qred, w.case,
                             w.k, w.m, p, ch_j, ch_2p)
        p *= 2
    raise ResourceError("floating-point precision budget exhausted")


# ----------------------------------------------------------- verification

def verify_solvability_cert(sys, cert):
    meter = BitMeter()
    try:
        _verify_solv(sys, cert, meter)
    except CertificateInvalid as exc:
        return Verdict(False, exc.reason, exc.detail, meter.peak)
    except FpOverflow as exc:
        return Verdict(False, "fp-overflow", str(exc), meter.peak)
    return Verdict(True, "ok", "", meter.peak)


def _fail(reason, detail=""):
    raise CertificateInvalid(reason, detail)


def _verify_solv(sys, cert, meter):
    if cert.sys != sys:
        _fail("system-mismatch")
    if isinstance(cert, DirectCert):
        meter.see(cert.x1, cert.x2)
        if not sys.admissible(cert.x1, cert.x2):
            _fail("direct-not-admissible")
        return
    if not isinstance(cert, InfraCert):
        _fail("unknown-kind")
    if classify(sys) != INDEFINITE:
        _fail("not-indefinite")
    ps = to_pell(sys)
    D, g, M = ps.D, ps.g, ps.M
    meter.see(D, g, M, cert.h, cert.G, cert.B, cert.C, cert.k)
    # (i) h > 0 and G = g / h^2
    if cert.h <= 0 or g % (cert.h * cert.h) or cert.G != g // (cert.h * cert.h):
        _fail("h")
    # (ii) Q0 = [G, 2B, C] properly primitive of determinant D
    Q0 = QForm(cert.G, cert.B, cert.C)
    if Q0.D != D or math.gcd(math.gcd(cert.G, 2 * cert.B), cert.C) != 1:
        _fail("q0")
    # (iii) S reduces Q0 to Qred
    S = cert.S
    meter.see_mat(S)
    meter.see_form(cert.Qred)
    if mat_det(S) != 1 or apply_transform(Q0, S) != cert.Qred:
        _fail("s-transform")
    if not _is_reduced(cert.Qred.a, cert.Qred.b, D):
        _fail("qred-not-reduced")
    # (iv) chains: short formulas checked exactly, endpoints
    ident = reduced_identity(D)[0]
    for name, ch, want in (("chain-j", cert.chain_j, cert.Qred),
                           ("chain-2p", cert.chain_2p, ident)):
        forms = _checked_forms(D, ch, name, meter)
        end = forms[-1]
        if name == "chain-j" and cert.k < 0:
            end = reflect(end)
        if end != want:
            _fail(name + "-endpoint")
    if cert.k < 0:
        S0 = mirror_step(D)
        meter.see_mat(S0)
        if apply_transform(reflect(ident), S0) != ident:
            _fail("mirror-step")
    # sign case is a property of the system
    if cert.case == "a":
        if not ps.case_a:
            _fail("signcase")
    elif cert.case == "b":
        if not ps.case_b:
            _fail("signcase")
    else:
        _fail("signcase")
    if cert.m not in (0, 1):
        _fail("sign-bit")
    # (v) residues of y = h u modulo |c D gamma|
    W = eval_chain_mod(D, cert.chain_j, cert.chain_2p, cert.k, cert.m, M, meter)
    u1, u2 = _u_of_W(W, S, math.isqrt(D), M)
    if not ps.congruent(cert.h * u1, cert.h * u2):
        _fail("congruence")
    # (v) signs of u1, u2 from enclosures
    if cert.p < 8 or cert.p > MAX_PREC:
        _fail("precision")
    e1, e2 = eval_chain_fp(D, cert.chain_j, cert.chain_2p, cert.k, cert.m, S, cert.p)
    s1, s2 = sign_certified(e1), sign_certified(e2)
    if s1 is None or s2 is None:
        _fail("sign-uncertified")
    if s1 != 1 or s2 != (1 if cert.case == "a" else -1):
        _fail("sign")


def _checked_forms(D, chain, name, meter):
    try:
        forms = chain_forms(D, chain)
    except CertificateInvalid as exc:
        _fail(name + ":" + exc.reason, exc.detail)
    except DomainError as exc:
        _fail(name + ":bad-step", str(exc))
    for st in chain.steps:
        if st[0] == "I":
            meter.see_mat(st[1])
        else:
            meter.see(st[1], st[2])
            for row in st[3]:
                meter.see(*row)
    for Q in forms:
        meter.see_form(Q)
    return forms


def reconstruct_y_mod(sys, cert, Mp):
    """(y1 mod Mp, y2 mod Mp) for the Pell-plane point y = h u of an Infra certificate."""
    D = to_pell(sys).D
    W = eval_chain_mod(D, cert.chain_j, cert.chain_2p, cert.k, cert.m, Mp)
    u1, u2 = _u_of_W(W, cert.S, math.isqrt(D), Mp)
    return cert.h * u1 % Mp, cert.h * u2 % Mp


def reconstruct_solution_mod(sys, cert, Mp):
    """(x1 mod Mp, x2 mod Mp) for the point a certificate exhibits.

    For an Infra certificate this is the preimage of y = h u; it is integral and
    in the right residue classes, and its orbit under U^P(cD gamma) contains
    admissible solutions.
    """
    if Mp < 1:
        raise DomainError("modulus must be positive")
    if isinstance(cert, DirectCert):
        return cert.x1 % Mp, cert.x2 % Mp
    ps = to_pell(sys)
    a, b, c, d, e, f = sys.coeffs()
    D = ps.D
    cD = abs(c * D)
    Mx = Mp * cD
    W = eval_chain_mod(D, cert.chain_j, cert.chain_2p, cert.k, cert.m, Mx)
    u1, u2 = _u_of_W(W, cert.S, math.isqrt(D), Mx)
    y1, y2 = cert.h * u1 % Mx, cert.h * u2 % Mx
    n1 = (y1 - (b * e - c * d)) % Mx
    if n1 % D:
        raise CertificateInvalid("reconstruct", "x1 not integral")
    x1 = n1 // D                        # known mod Mp * |c|
    n2 = (-b * y1 + D * y2 + c * (a * e - b * d)) % Mx
    if n2 % cD:
        raise CertificateInvalid("reconstruct", "x2 not integral")
    x2 = (n2 // cD) * (1 if c * D > 0 else -1)
    return x1 % Mp, x2 % Mp


# ------------------------------------------------------ equivalence certs

# the three index-2 sublattices: x even, y even, x = y (mod 2)
IMPROPER_MAPS = (((2, 0), (0, 1)), ((1, 0), (0, 2)), ((1, 0), (1, 2)))


@dataclass
class EquivCert:
    Q1: QForm
    Q2: QForm
    sigma1: int
    sigma2: int
    t1: int             # 0 when properly primitive, else 1..3 (IMPROPER_MAPS index + 1)
    t2: int
    R1: tuple           # reduces P1 to P1r
    R2: tuple           # reduces the inverse of P2 to P2r
    P1r: QForm
    P2r: QForm
    Q3: QForm
    B: tuple
    chain: Chain


@dataclass(frozen=True)
class NotEquivalent:
    reason: str


def _content(Q):
    return math.gcd(math.gcd(Q.a, Q.b), Q.c)


def _proper_content(Q):
    return math.gcd(math.gcd(Q.a, 2 * Q.b), Q.c)


def _improper_image(Q, t):
    """(Q | M_t) / 2, or None when that is not an integral properly primitive form."""
    R = substitute(Q, IMPROPER_MAPS[t - 1])
    if R.a % 2 or R.b % 2 or R.c % 2:
        return None
    P = QForm(R.a // 2, R.b // 2, R.c // 2)
    return P if _proper_content(P) == 1 else None


def _primitive_parts(Q1, Q2):
    D = Q1.D
    if Q2.D != D:
        return NotEquivalent("determinants differ")
    if D <= 0 or math.isqrt(D) ** 2 == D:
        raise DomainError("forms must be indefinite with nonsquare determinant")
    s1 = _content(Q1)
    if _content(Q2) != s1:
        return NotEquivalent("contents differ")
    P1 = QForm(*(x // s1 for x in Q1))
    P2 = QForm(*(x // s1 for x in Q2))
    s2 = _proper_content(P1)
    if _proper_content(P2) != s2:
        return NotEquivalent("proper contents differ")
    return s1, s2, P1, P2


def gen_equivalence_cert(Q1, Q2):
    r = _primitive_parts(Q1, Q2)
    if isinstance(r, NotEquivalent):
        return r
    s1, s2, P1, P2 = r
    if s2 == 1:
        pairs = [(0, P1, 0, P2)]
    else:
        t2 = next(t for t in (1, 2, 3) if _improper_image(P2, t) is not None)
        pairs = [(t, _improper_image(P1, t), t2, _improper_image(P2, t2))
                 for t in (1, 2, 3) if _improper_image(P1, t) is not None]
    for t1, A, t2, Bf in pairs:
        A_r, R1 = reduce(A)
        Bi_r, R2 = reduce(Bf.inverse())
        Q3, Bm = compose_reduced(A_r, Bi_r)
        cyc = principal_cycle(Q3.D)
        j = cyc.index_of(Q3)
        if j is None:
            continue
        ch = doubling_chain(cyc, j)
        return EquivCert(Q1, Q2, s1, s2, t1, t2, R1, R2, A_r, Bi_r, Q3, Bm, ch)
    return NotEquivalent("composite class is not principal")


def verify_equivalence_cert(Q1, Q2, cert):
    meter = BitMeter()
    try:
        _verify_equiv(Q1, Q2, cert, meter)
    except CertificateInvalid as exc:
        return Verdict(False, exc.reason, exc.detail, meter.peak)
    except DomainError as exc:
        return Verdict(False, "domain", str(exc), meter.peak)
    return Verdict(True, "ok", "", meter.peak)


def _verify_equiv(Q1, Q2, cert, meter):
    if (cert.Q1, cert.Q2) != (Q1, Q2):
        _fail("endpoint-forms")
    meter.see_form(Q1)
    meter.see_form(Q2)
    r = _primitive_parts(Q1, Q2)
    if isinstance(r, NotEquivalent):
        _fail("invariants", r.reason)
    s1, s2, P1, P2 = r
    if (cert.sigma1, cert.sigma2) != (s1, s2):
        _fail("invariants")
    if s2 == 1:
        if (cert.t1, cert.t2) != (0, 0):
            _fail("improper-tag")
        A, Bf = P1, P2
    else:
        if cert.t1 not in (1, 2, 3) or cert.t2 not in (1, 2, 3):
            _fail("improper-tag")
        A, Bf = _improper_image(P1, cert.t1), _improper_image(P2, cert.t2)
        if A is None or Bf is None:
            _fail("improper-image")
    D = A.D
    for R, src, dst, name in ((cert.R1, A, cert.P1r, "r1"), (cert.R2, Bf.inverse(), cert.P2r, "r2")):
        meter.see_mat(R)
        meter.see_form(dst)
        if mat_det(R) != 1 or apply_transform(src, R) != dst:
            _fail(name + "-transform")
        if not _is_reduced(dst.a, dst.b, D):
            _fail(name + "-not-reduced")
    for row in cert.B:
        meter.see(*row)
    meter.see_form(cert.Q3)
    Q3 = composed_form(cert.P1r, cert.P2r, cert.B)
    if Q3 is None or Q3 != cert.Q3:
        _fail("composition-identity")
    ok, why = verify_composition(cert.P1r, cert.P2r, Q3, cert.B)
    if not ok:
        _fail("composition-" + why)
    if not _is_reduced(Q3.a, Q3.b, D):
        _fail("q3-not-reduced")
    forms = _checked_forms(D, cert.chain, "chain", meter)
    if forms[-1] != Q3:
        _fail("chain-endpoint")


def equivalent_by_cycles(Q1, Q2):
    """Oracle: proper equivalence by comparing reduced cycles."""
    if Q1.D != Q2.D:
        return False
    R1, _ = reduce(Q1)
    R2, _ = reduce(Q2)
    return R2 in cycle_of(R1)


# ---------------------------------------------------------- serialization

HEADER = "BQD-CERT 1"


def _ints(xs):
    return " ".join(str(int(x)) for x in xs)


def _chain_lines(label, ch):
    out = [f"CHAIN {label} {len(ch.steps)}"]
    for st in ch.steps:
        if st[0] == "I":
            S = st[1]
            out.append("  T1 " + _ints((S[0][0], S[0][1], S[1][0], S[1][1])))
        else:
            _, k1, k2, B = st
            out.append("  T2 " + _ints((k1, k2) + tuple(B[0]) + tuple(B[1])))
    return out


def serialize(cert):
    s = cert.sys
    lines = [HEADER]
    lines.append("KIND " + ("direct" if isinstance(cert, DirectCert) else "infra"))
    lines.append("SYSTEM " + _ints(s.coeffs() + (s.gamma, s.alpha1, s.alpha2)))
    if isinstance(cert, DirectCert):
        lines.append("X " + _ints((cert.x1, cert.x2)))
    else:
        S = cert.S
        lines += [
            "H %d" % cert.h,
            "Q0 " + _ints((cert.G, cert.B, cert.C)),
            "S " + _ints((S[0][0], S[0][1], S[1][0], S[1][1])),
            "QRED " + _ints(cert.Qred),
            "SIGNCASE " + cert.case,
            "K %d" % cert.k,
            "M %d" % cert.m,
            "FPPREC %d" % cert.p,
        ]
        lines += _chain_lines("J", cert.chain_j)
        lines += _chain_lines("2P", cert.chain_2p)
    lines.append("END")
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, text):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.i = 0

    def next(self, tag, n=None):
        if self.i >= len(self.lines):
            raise ParseError(self.i + 1, f"unexpected end of input, expected {tag}")
        lineno = self.i + 1
        parts = self.lines[self.i].split()
        self.i += 1
        if not parts or parts[0] != tag:
            raise ParseError(lineno, f"expected {tag}")
        args = parts[1:]
        if n is not None and len(args) != n:
            raise ParseError(lineno, f"{tag} takes {n} fields")
        return lineno, args

    def ints(self, tag, n):
        lineno, args = self.next(tag, n)
        try:
            return [int(a) for a in args]
        except ValueError:
            raise ParseError(lineno, f"{tag}: malformed integer") from None

    def done(self):
        if self.i != len(self.lines):
            raise ParseError(self.i + 1, "trailing data after END")


def _read_chain(rd, label):
    lineno, args = rd.next("CHAIN", 2)
    if args[0] != label:
        raise ParseError(lineno, f"expected CHAIN {label}")
    try:
        n = int(args[1])
    except ValueError:
        raise ParseError(lineno, "malformed step count") from None
    if n < 0:
        raise ParseError(lineno, "negative step count")
    steps = []
    for _ in range(n):
        if rd.i >= len(rd.lines):
            raise ParseError(rd.i + 1, "unexpected end of input inside chain")
        tag = rd.lines[rd.i].split()[:1]
        if tag == ["T1"]:
            v = rd.ints("T1", 4)
            steps.append(("I", ((v[0], v[1]), (v[2], v[3]))))
        elif tag == ["T2"]:
            v = rd.ints("T2", 10)
            steps.append(("II", v[0], v[1], (tuple(v[2:6]), tuple(v[6:10]))))
        else:
            raise ParseError(rd.i + 1, "expected T1 or T2")
    return Chain(steps, None)


def parse(text):
    rd = _Reader(text)
    lineno, args = rd.next("BQD-CERT", 1)
    if args[0] != "1":
        raise ParseError(lineno, "unsupported version")
    lineno, args = rd.next("KIND", 1)
    kind = args[0]
    if kind not in ("direct", "infra"):
        raise ParseError(lineno, "unknown kind")
    v = rd.ints("SYSTEM", 9)
    if v[6] < 1:
        raise ParseError(rd.i, "modulus must be positive")
    sys = DioSystem(*v)
    if kind == "direct":
        x = rd.ints("X", 2)
        cert = DirectCert(sys, *x)
    else:
        h = rd.ints("H", 1)[0]
        G, B, C = rd.ints("Q0", 3)
        s = rd.ints("S", 4)
        qr = rd.ints("QRED", 3)
        lineno, args = rd.next("SIGNCASE", 1)
        if args[0] not in ("a", "b"):
            raise ParseError(lineno, "sign case must be a or b")
        case = args[0]
        k = rd.ints("K", 1)[0]
        m = rd.ints("M", 1)[0]
        p = rd.ints("FPPREC", 1)[0]
        cj = _read_chain(rd, "J")
        c2 = _read_chain(rd, "2P")
        cert = InfraCert(sys, h, G, B, C, ((s[0], s[1]), (s[2], s[3])), QForm(*qr), case,
                         k, m, p, cj, c2)
    rd.next("END", 0)
    rd.done()
    return cert


EQ_HEADER = "BQD-EQUIV 1"


def serialize_equiv(cert):
    lines = [EQ_HEADER,
             "FORMS " + _ints(tuple(cert.Q1) + tuple(cert.Q2)),
             "SIGMA " + _ints((cert.sigma1, cert.sigma2)),
             "IMPROPER " + _ints((cert.t1, cert.t2)),
             "R1 " + _ints(cert.R1[0] + cert.R1[1]),
             "R2 " + _ints(cert.R2[0] + cert.R2[1]),
             "P1R " + _ints(cert.P1r),
             "P2R " + _ints(cert.P2r),
             "Q3 " + _ints(cert.Q3),
             "COMP " + _ints(cert.B[0] + cert.B[1])]
    lines += _chain_lines("Q3", cert.chain)
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_equiv(text):
    rd = _Reader(text)
    lineno, args = rd.next("BQD-EQUIV", 1)
    if args[0] != "1":
        raise ParseError(lineno, "unsupported version")
    f = rd.ints("FORMS", 6)
    s = rd.ints("SIGMA", 2)
    t = rd.ints("IMPROPER", 2)
    r1 = rd.ints("R1", 4)
    r2 = rd.ints("R2", 4)
    p1 = rd.ints("P1R", 3)
    p2 = rd.ints("P2R", 3)
    q3 = rd.ints("Q3", 3)
    b = rd.ints("COMP", 8)
    ch = _read_chain(rd, "Q3")
    rd.next("END", 0)
    rd.done()
    return EquivCert(QForm(*f[:3]), QForm(*f[3:]), s[0], s[1], t[0], t[1],
                     ((r1[0], r1[1]), (r1[2], r1[3])), ((r2[0], r2[1]), (r2[2], r2[3])),
                     QForm(*p1), QForm(*p2), QForm(*q3), (tuple(b[:4]), tuple(b[4:])), ch)
