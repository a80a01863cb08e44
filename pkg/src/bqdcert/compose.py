"""Composition of properly primitive indefinite forms via 2x4 bilinear matrices,
and doubling chains that reach far into the principal cycle in few steps.

A bilinear matrix B composes Q1 and Q2 into Q3 when
    Q1(x) Q2(y) = Q3(B z),   z = (x1 y1, x1 y2, x2 y1, x2 y2).
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CertificateInvalid, DomainError, InternalError
from .forms import (IDENTITY, QForm, _is_reduced, apply_transform, mat_det, mat_inv,
                    mat_mul, mat_neg, neighbor_lambda, reduce,
                    reduced_identity)
from .numtheory import crt, egcd

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# log2 ||B|| <= C_B * (1 + log2 D) for the matrices compose_reduced produces.
# Largest ratio seen over 3000 random (D <= 10^6, index pair) samples: 0.97.
C_B = 1.5
# Doubling chains have length K <= C_K * (1 + log2 D)^2.
# Largest ratio seen over 400 random (D <= 10^6, j) samples: 0.065.
C_K = 0.25


def cofactors(B):
    r1, r2 = B
    return tuple(r1[i] * r2[j] - r1[j] * r2[i] for i, j in PAIRS)


def bimat_norm(B):
    return max(abs(x) for row in B for x in row)


def b0_matrix(D):
    lam = math.isqrt(D)
    return ((1, 0, 0, D - lam * lam), (0, 1, 1, 2 * lam))


def _bilinear_square(P, R):
    """Coefficients of P(x,y)*R(x,y) for bilinear P, R given as 4-vectors over z."""
    out = [[0] * 3 for _ in range(3)]
    for k in range(4):
        if not P[k]:
            continue
        i1, j1 = k >> 1, k & 1
        for l in range(4):
            if R[l]:
                out[i1 + (l >> 1)][j1 + (l & 1)] += P[k] * R[l]
    return out


def _lhs(Q1, Q2):
    q1 = (Q1.a, 2 * Q1.b, Q1.c)
    q2 = (Q2.a, 2 * Q2.b, Q2.c)
    return [[q1[i] * q2[j] for j in range(3)] for i in range(3)]


def _rhs_parts(B):
    X, Y = B
    return _bilinear_square(X, X), _bilinear_square(X, Y), _bilinear_square(Y, Y)


def verify_composition(Q1, Q2, Q3, B):
    """(ok, reason): identity holds, B unimodular and oriented for (Q1, Q2)."""
    L = _lhs(Q1, Q2)
    XX, XY, YY = _rhs_parts(B)
    for i in range(3):
        for j in range(3):
            if L[i][j] != Q3.a * XX[i][j] + 2 * Q3.b * XY[i][j] + Q3.c * YY[i][j]:
                return False, "identity"
    d = cofactors(B)
    g = 0
    for x in d:
        g = math.gcd(g, x)
    if g != 1:
        return False, "unimodular"
    if not (Q1.a * d[0] > 0 and Q2.a * d[1] > 0):
        return False, "oriented"
    return True, "ok"


def composed_form(Q1, Q2, B):
    """The unique Q3 with Q1(x) Q2(y) = Q3(B z), or None if there is none."""
    L = _lhs(Q1, Q2)
    XX, XY, YY = _rhs_parts(B)
    rows = [(XX[i][j], 2 * XY[i][j], YY[i][j], L[i][j]) for i in range(3) for j in range(3)]
    # pick three independent equations
    for r1 in range(9):
        for r2 in range(r1 + 1, 9):
            for r3 in range(r2 + 1, 9):
                A = [rows[r1], rows[r2], rows[r3]]
                det = _det3([r[:3] for r in A])
                if det:
                    sol = []
                    for col in range(3):
                        M = [list(r[:3]) for r in A]
                        for i in range(3):
                            M[i][col] = A[i][3]
                        sol.append(Fraction(_det3(M), det))
                    if any(x.denominator != 1 for x in sol):
                        return None
                    a3, b3, c3 = (int(x) for x in sol)
                    for (p, q, r, v) in rows:
                        if a3 * p + b3 * q + c3 * r != v:
                            return None
                    return QForm(a3, b3, c3)
    return None


def _det3(M):
    (a, b, c), (d, e, f), (g, h, i) = M
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def kron(S, T):
    """Kronecker product of two 2x2 matrices (4x4, as a tuple of rows)."""
    return tuple(tuple(S[i // 2][j // 2] * T[i % 2][j % 2] for j in range(4)) for i in range(4))


def bimat_mul_right(B, K):
    """B (2x4) times K (4x4)."""
    return tuple(tuple(sum(B[r][k] * K[k][c] for k in range(4)) for c in range(4)) for r in range(2))


def bimat_mul_left(S, B):
    """S (2x2) times B (2x4)."""
    return tuple(tuple(S[r][0] * B[0][c] + S[r][1] * B[1][c] for c in range(4)) for r in range(2))


def bimat_neg(B):
    return tuple(tuple(-x for x in row) for row in B)


def _is_properly_primitive(Q):
    return math.gcd(math.gcd(Q.a, 2 * Q.b), Q.c) == 1


def _coprime_rep(Q, m):
    """A unimodular T with gcd((Q|T).a, m) = 1 and (Q|T).a != 0."""
    if Q.a and math.gcd(Q.a, m) == 1:
        return IDENTITY
    for s in range(1, 200):
        for x in range(-s, s + 1):
            for y in (s - abs(x), abs(x) - s):
                if math.gcd(x, y) != 1:
                    continue
                v = Q(x, y)
                if v and math.gcd(v, m) == 1:
                    g, r0, s0 = egcd(x, y)
                    # x*r0 + y*s0 = 1 -> T = [[x, -s0], [y, r0]] has det 1
                    T = ((x, -s0), (y, r0))
                    if mat_det(T) != 1:
                        raise InternalError("bad completion")
                    return T
    raise InternalError(f"no value of {Q} coprime to {m} found")


def compose(Q1, Q2):
    """(Q3, B) with Q3 = Q1 o Q2 via B (Q3 not necessarily reduced)."""
    D = Q1.D
    if Q2.D != D:
        raise DomainError("forms have different determinants")
    if not (_is_properly_primitive(Q1) and _is_properly_primitive(Q2)):
        raise DomainError("forms must be properly primitive")
    T1 = _coprime_rep(Q1, Q2.a)
    P1 = apply_transform(Q1, T1)
    a1, a2 = P1.a, Q2.a
    # common middle coefficient b = b1 (mod a1), b = b2 (mod a2)
    m1, m2 = abs(a1), abs(a2)
    b = crt([P1.b % m1, Q2.b % m2], [m1, m2])
    t1 = (b - P1.b) // a1
    t2 = (b - Q2.b) // a2
    T1 = mat_mul(T1, ((1, t1), (0, 1)))
    T2 = ((1, t2), (0, 1))
    C, rem = divmod(b * b - D, a1 * a2)
    if rem:
        raise InternalError("united forms: non-integral third coefficient")
    Q3 = QForm(a1 * a2, b, C)
    Bc = ((1, 0, 0, -C), (0, a1, a2, 2 * b))
    B = bimat_mul_right(Bc, kron(mat_inv(T1), mat_inv(T2)))
    return Q3, B


def compose_reduced(Q1, Q2):
    Q3, B = compose(Q1, Q2)
    R, S = reduce(Q3)
    B = bimat_mul_left(mat_inv(S), B)
    ok, why = verify_composition(Q1, Q2, R, B)
    if not ok:
        raise InternalError(f"composition check failed ({why})")
    return R, B


def solve_s3(B, B0, S1, S2):
    """The integer S3 with S3 B = B0 (S1 x S2)."""
    R = bimat_mul_right(B0, kron(S1, S2))
    d = cofactors(B)
    order = sorted(range(6), key=lambda k: (abs(d[k]) if d[k] else float("inf")))
    k = order[0]
    if d[k] == 0:
        raise InternalError("bilinear matrix has no invertible 2x2 submatrix")
    i, j = PAIRS[k]
    det = d[k]
    # S3 = R_ij * adj(Delta_ij) / det
    b1i, b1j, b2i, b2j = B[0][i], B[0][j], B[1][i], B[1][j]
    S3 = []
    for r in range(2):
        x, y = R[r][i], R[r][j]
        u, ru = divmod(x * b2j - y * b2i, det)
        v, rv = divmod(-x * b1j + y * b1i, det)
        if ru or rv:
            raise CertificateInvalid("s3-nonintegral")
        S3.append((u, v))
    S3 = tuple(S3)
    if bimat_mul_left(S3, B) != R:
        raise CertificateInvalid("s3-inconsistent")
    if mat_det(S3) != 1:
        raise CertificateInvalid("s3-determinant")
    return S3


# ------------------------------------------------------------------- chains

@dataclass
class Chain:
    """Steps are ('I', S) or ('II', k1, k2, B); entry k of the chain is the form
    reached after k steps (entry 0 is the reduced identity form)."""
    steps: list = field(default_factory=list)
    target: int = field(default=0, compare=False)   # informational, not serialized

    def __len__(self):
        return len(self.steps)


def chain_forms(D, chain):
    """Replay a chain with exact short checks; return the forms Q~_0..Q~_K.

    Raises CertificateInvalid (with the step index) on any failure.
    """
    It, _ = reduced_identity(D)
    forms = [It]
    r = math.isqrt(D)
    for idx, st in enumerate(chain.steps):
        cur = forms[-1]
        if st[0] == "I":
            S = st[1]
            if S[0] != (0, 1) or S[1][0] != -1:
                raise CertificateInvalid("chain-typeI-shape", f"step {idx}")
            if S[1][1] != neighbor_lambda(cur, r):
                raise CertificateInvalid("chain-typeI-neighbor", f"step {idx}")
            nxt = apply_transform(cur, S)
        elif st[0] == "II":
            _, k1, k2, B = st
            if not (0 <= k1 < len(forms) and 0 <= k2 < len(forms)):
                raise CertificateInvalid("chain-typeII-index", f"step {idx}")
            nxt = composed_form(forms[k1], forms[k2], B)
            if nxt is None:
                raise CertificateInvalid("chain-typeII-identity", f"step {idx}")
            ok, why = verify_composition(forms[k1], forms[k2], nxt, B)
            if not ok:
                raise CertificateInvalid("chain-typeII-" + why, f"step {idx}")
        else:
            raise CertificateInvalid("chain-step-kind", f"step {idx}")
        if nxt.D != D or not _is_reduced(nxt.a, nxt.b, D):
            raise CertificateInvalid("chain-not-reduced", f"step {idx}")
        forms.append(nxt)
    return forms


def chain_matrices_exact(D, chain):
    """Multiply a chain out exactly: the list V_0..V_K (test oracle, small D only)."""
    forms = chain_forms(D, chain)
    B0 = b0_matrix(D)
    V = [IDENTITY]
    for st in chain.steps:
        if st[0] == "I":
            V.append(mat_mul(V[-1], st[1]))
        else:
            _, k1, k2, B = st
            V.append(solve_s3(B, B0, V[k1], V[k2]))
    return forms, V


def _locate(cycle, Q3, S3, lo, hi):
    """Index x in [lo, hi] with S3 = +-L_x (extended periodically), and the sign."""
    i = cycle.index_of(Q3)
    if i is None:
        return None
    n = cycle.period
    L = cycle.all_L()
    U = L[n]
    for t in (0, 1, -1, 2):
        x = i + t * n
        if not (lo <= x <= hi):
            continue
        M = L[x] if 0 <= x <= n else mat_mul(U, L[x - n]) if x > n else None
        if M is None:
            continue
        if S3 == M:
            return x, 1
        if S3 == mat_neg(M):
            return x, -1
    return None


def doubling_chain(cycle, j, small=6):
    """A chain of Type I / Type II steps ending at Q^(j) with V_K = L_j."""
    n = cycle.period
    if not 0 <= j <= n:
        raise DomainError("chain target out of range")
    L = cycle.all_L()
    B0 = b0_matrix(cycle.D)
    size = [mat_size(M) for M in L[:j + 1]]
    # levels j -> l1 -> l2 -> ..., each l roughly halving the size of L
    plan = []
    cur = j
    while cur > small:
        found = None
        l = cur - 1
        while l >= 1 and 2 * size[l] > size[cur] + 2:
            l -= 1
        while l >= 1 and found is None:
            Ql = cycle.forms[l]
            Q3, B = compose_reduced(Ql, Ql)
            S3 = solve_s3(B, B0, L[l], L[l])
            hit = _locate(cycle, Q3, S3, l + 1, cur)
            if hit is not None:
                x, sgn = hit
                found = (l, x, bimat_neg(B) if sgn < 0 else B)
            l -= 1
        if found is None:
            break
        plan.append(found)
        cur = found[0]
    steps = [("I", cycle.step(i)) for i in range(1, cur + 1)]
    targets = [lv[0] for lv in plan[:-1]]
    targets = [j] + targets
    for (l, x, B), stop in zip(reversed(plan), reversed(targets)):
        k = len(steps)
        steps.append(("II", k, k, B))
        steps += [("I", cycle.step(i)) for i in range(x + 1, stop + 1)]
    if not plan:
        steps += [("I", cycle.step(i)) for i in range(cur + 1, j + 1)]
    return Chain(steps, j)


def mat_size(M):
    return max(abs(x) for row in M for x in row).bit_length()
