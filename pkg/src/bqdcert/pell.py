"""Pell equation t^2 - D u^2 = 1: continued fractions and periods of (t_k, u_k) mod m."""
import math
from dataclasses import dataclass

from .errors import DomainError, InternalError
from .numtheory import factorize, is_square


@dataclass(frozen=True)
class PellSolution:
    D: int
    t1: int
    u1: int


def cf_sqrt(D):
    """Continued fraction of sqrt(D): (mu0, [mu1, ..., mun]) with n the least period."""
    if D <= 0 or is_square(D)[0]:
        raise DomainError(f"{D} is not a positive nonsquare")
    a0 = math.isqrt(D)
    m, d, a = 0, 1, a0
    quot = []
    while a != 2 * a0:
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        quot.append(a)
    return a0, quot


def fundamental_solution(D):
    a0, quot = cf_sqrt(D)
    n = len(quot)
    # convergents p/q; the solution sits at index n-1 (n even) or 2n-1 (n odd)
    last = n - 1 if n % 2 == 0 else 2 * n - 1
    p0, p1 = 1, a0
    q0, q1 = 0, 1
    for i in range(last):
        a = quot[i % n]
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    if p1 * p1 - D * q1 * q1 != 1:
        raise InternalError(f"continued fraction did not yield a Pell solution for D={D}")
    return PellSolution(D, p1, q1)


def _mul(x, y, D, M):
    return ((x[0] * y[0] + D * x[1] * y[1]) % M, (x[0] * y[1] + x[1] * y[0]) % M)


def _power(t, u, D, k, M):
    out = (1 % M, 0)
    base = (t % M, u % M)
    while k:
        if k & 1:
            out = _mul(out, base, D, M)
        base = _mul(base, base, D, M)
        k >>= 1
    return out


def power_mod(sol, k, M):
    """(t_k mod M, u_k mod M) where t_k + u_k sqrt D = (t1 + u1 sqrt D)^k."""
    if M < 1:
        raise DomainError("modulus must be positive")
    if k < 0:
        raise DomainError("exponent must be nonnegative")
    return _power(sol.t1, sol.u1, sol.D, k, M)


def legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def candidate_period(D, p, e):
    """A multiple of the period mod p^e from the prime-level divisibility rules."""
    if p == 2:
        base = 2
    elif D % p == 0:
        base = 2 * p
    elif legendre(D, p) == 1:
        base = p - 1
    else:
        base = 2 * (p + 1)
    return base * p ** (e - 1)


def _is_one(t, u, D, k, M):
    r = _power(t, u, D, k, M)
    return r == (1 % M, 0)


def _order(t, u, D, M, N):
    if not _is_one(t, u, D, N, M):
        return None
    P = N
    for q, _ in factorize(N).factors:
        while P % q == 0 and _is_one(t, u, D, P // q, M):
            P //= q
    return P


def period_mod(sol, m):
    """The least P >= 1 with (t_{k+P}, u_{k+P}) = (t_k, u_k) mod m for all k."""
    if m < 1:
        raise DomainError("modulus must be positive")
    if m == 1:
        return 1
    D, t, u = sol.D, sol.t1, sol.u1
    P = 1
    for p, e in factorize(m).factors:
        pe = p ** e
        q = _order(t, u, D, pe, candidate_period(D, p, e))
        if q is None:
            raise InternalError(f"period candidate failed for modulus {pe}")
        P = P * q // math.gcd(P, q)
    return P


def period_bound(m):
    """ceil(2m(log m + 1)) with natural log floored at 2 for small arguments."""
    if m < 1:
        raise DomainError("modulus must be positive")
    lg = 2.0 if m < 4 else max(2.0, math.log(m))
    return math.ceil(2 * m * (lg + 1) - 1e-9)
