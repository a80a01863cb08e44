"""Integral binary quadratic forms [a, 2b, c] of determinant D = b^2 - ac.

Matrices are 2x2 tuples ((s11, s12), (s21, s22)).  A matrix S carries Q1 to
Q2 when S^t Q1 S = Q2, i.e. Q2(x) = Q1(S x).  All comparisons with sqrt(D)
are done on integers.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, InternalError
from .numtheory import is_square

IDENTITY = ((1, 0), (0, 1))


class QForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def D(self):
        return self.b * self.b - self.a * self.c

    def norm(self):
        return max(abs(self.a), abs(self.b), abs(self.c))

    def __call__(self, x, y):
        return self.a * x * x + 2 * self.b * x * y + self.c * y * y

    def inverse(self):
        return QForm(self.a, -self.b, self.c)

    def coeffs(self):
        """The (a, 2b, c) triple as usually printed."""
        return (self.a, 2 * self.b, self.c)

    def __str__(self):
        return "[%d,%d,%d]" % self.coeffs()


def determinant(Q):
    return Q.b * Q.b - Q.a * Q.c


def mat_mul(A, B):
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def mat_det(S):
    return S[0][0] * S[1][1] - S[0][1] * S[1][0]


def mat_inv(S):
    """Inverse of a matrix with determinant +-1."""
    d = mat_det(S)
    if d not in (1, -1):
        raise DomainError("matrix is not unimodular")
    (a, b), (c, e) = S
    return ((e * d, -b * d), (-c * d, a * d))


def mat_neg(S):
    return ((-S[0][0], -S[0][1]), (-S[1][0], -S[1][1]))


def mat_pow(S, k):
    if k < 0:
        S, k = mat_inv(S), -k
    out = IDENTITY
    while k:
        if k & 1:
            out = mat_mul(out, S)
        S = mat_mul(S, S)
        k >>= 1
    return out


def mat_norm(S):
    return max(abs(x) for row in S for x in row)


def apply_transform(Q, S, relaxed=False):
    """The form S^t Q S.  With relaxed=True determinant -1 is also allowed."""
    d = mat_det(S)
    if d != 1 and not (relaxed and d == -1):
        raise DomainError(f"transform has determinant {d}")
    return _act(Q, S)


def _act(Q, S):
    (p, q), (r, s) = S
    a, b, c = Q
    return QForm(a * p * p + 2 * b * p * r + c * r * r,
                 a * p * q + b * (p * s + q * r) + c * r * s,
                 a * q * q + 2 * b * q * s + c * s * s)


def substitute(Q, M):
    """Q(M x) for an arbitrary integer matrix M (no determinant check)."""
    return _act(Q, M)


def _check_indefinite(D):
    if D <= 0 or is_square(D)[0]:
        raise DomainError(f"determinant {D} is not a positive nonsquare")


def _is_reduced(a, b, D):
    # 0 < b < sqrt D  and  sqrt D - b < |a| < sqrt D + b
    if b <= 0 or b * b >= D:
        return False
    aa = abs(a)
    if (aa + b) ** 2 <= D:
        return False
    t = aa - b
    return t < 0 or t * t < D


def is_reduced(Q):
    D = Q.D
    _check_indefinite(D)
    return _is_reduced(Q.a, Q.b, D)


def neighbor_lambda(Q, r):
    """The unique lambda with -sqrt D - b < lambda c < -sqrt D - b + |c|; r = isqrt(D)."""
    c = Q.c
    n = (r + Q.b) // abs(c)
    return -n if c > 0 else n


def _step(Q, lam):
    a, b, c = Q
    return QForm(c, -b - lam * c, a + 2 * b * lam + c * lam * lam)


def step_matrix(lam):
    return ((0, 1), (-1, lam))


def right_neighbor(Q):
    D = Q.D
    _check_indefinite(D)
    if not _is_reduced(Q.a, Q.b, D):
        raise DomainError(f"form {Q} is not reduced")
    lam = neighbor_lambda(Q, math.isqrt(D))
    return _step(Q, lam), step_matrix(lam), lam


def reduce(Q):
    """Return (Qred, S) with Qred reduced and S^t Q S = Qred."""
    D = Q.D
    _check_indefinite(D)
    r = math.isqrt(D)
    S = IDENTITY
    cap = 64 + 8 * (Q.norm().bit_length() + D.bit_length())
    a, b, c = Q
    if not _is_reduced(a, b, D):
        # a plain translation x -> x + t y often suffices
        bt = r - (r - b) % abs(a)
        t = (bt - b) // a
        if _is_reduced(a, bt, D):
            return apply_transform(Q, ((1, t), (0, 1))), ((1, t), (0, 1))
    for _ in range(cap):
        if _is_reduced(a, b, D):
            return QForm(a, b, c), S
        ac = abs(c)
        if ac <= r:
            # right-neighbor choice: sqrt D - |c| < b' < sqrt D
            n = (r + b) // ac
            lam = -n if c > 0 else n
        else:
            # normalization: -|c|/2 < b' <= |c|/2 with b' = -b - lam c
            bp = (-b) % ac
            if 2 * bp > ac:
                bp -= ac
            lam = (-b - bp) // c
        a, b, c = c, -b - lam * c, a + 2 * b * lam + c * lam * lam
        S = mat_mul(S, step_matrix(lam))
    raise InternalError(f"reduction of {Q} did not terminate")


def reduced_identity(D):
    _check_indefinite(D)
    lam = math.isqrt(D)
    return QForm(1, lam, lam * lam - D), ((1, lam), (0, 1))


@dataclass
class Cycle:
    D: int
    forms: list        # Q^(0) .. Q^(2p-1)
    lambdas: list      # lambda_1 .. lambda_2p; step j carries Q^(j-1) to Q^(j)
    _L: list = None    # cached exact L_0 .. L_2p

    @property
    def period(self):
        return len(self.forms)

    def step(self, j):
        """S^(j), extended periodically to every integer j."""
        return step_matrix(self.lambdas[(j - 1) % self.period])

    def index_of(self, Q):
        try:
            return self._index[Q]
        except AttributeError:
            self._index = {f: i for i, f in enumerate(self.forms)}
            return self._index.get(Q)
        except KeyError:
            return None

    def __contains__(self, Q):
        return self.index_of(Q) is not None

    def all_L(self):
        if self._L is None:
            L = [IDENTITY]
            M = IDENTITY
            for lam in self.lambdas:
                (a, b), (c, d) = M
                # M * [[0,1],[-1,lam]]
                M = ((-b, a + b * lam), (-d, c + d * lam))
                L.append(M)
            self._L = L
        return self._L


def cycle_of(Q):
    """The cycle of reduced forms through the reduced form Q."""
    D = Q.D
    _check_indefinite(D)
    if not _is_reduced(Q.a, Q.b, D):
        raise DomainError(f"form {Q} is not reduced")
    r = math.isqrt(D)
    forms, lams = [Q], []
    cur = Q
    while True:
        lam = neighbor_lambda(cur, r)
        cur = _step(cur, lam)
        lams.append(lam)
        if cur == Q:
            break
        forms.append(cur)
        if len(forms) > 8 * (r + 2) * (D.bit_length() + 2):
            raise InternalError("cycle did not close")
    return Cycle(D, forms, lams)


_cycle_cache = {}


def principal_cycle(D):
    cyc = _cycle_cache.get(D)
    if cyc is None:
        cyc = cycle_of(reduced_identity(D)[0])
        if len(_cycle_cache) > 64:
            _cycle_cache.clear()
        _cycle_cache[D] = cyc
    return cyc


def simple_equiv_matrix(cycle, j):
    """L_j = S^(1)...S^(j); for negative j the periodic extension L_j = U^(-1) L_(j+2p)."""
    n = cycle.period
    if 0 <= j <= n:
        return cycle.all_L()[j]
    q, r = divmod(j, n)
    return mat_mul(mat_pow(cycle.all_L()[n], q), cycle.all_L()[r])


def automorph_to_pell(U, Q):
    """Read (t, u) off an automorph U of the form Q: U = [[t - bu, -cu], [au, t + bu]]."""
    a, b, c = Q
    u, rem = divmod(U[1][0], a)
    if rem:
        raise InternalError("automorph has unexpected shape")
    t = U[0][0] + b * u
    return t, u


def fundamental_automorph(cycle):
    n = cycle.period
    U = cycle.all_L()[n]
    It = cycle.forms[0]
    if apply_transform(It, U) != It:
        raise InternalError("L_2p is not an automorph of the identity form")
    t, u = automorph_to_pell(U, It)
    t, u = abs(t), abs(u)
    if t * t - cycle.D * u * u != 1 or u == 0:
        raise InternalError("automorph does not give a Pell solution")
    return U, t, u
