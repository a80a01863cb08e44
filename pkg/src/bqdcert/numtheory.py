"""Exact integer utilities: square roots, factoring, modular square roots, CRT."""
import math
import random
from dataclasses import dataclass

import gmpy2
import sympy

from .errors import DomainError, InternalError, ResourceError, CertificateInvalid

FACTOR_BOUND = 1 << 128
_TRIAL_LIMIT = 10_000
_SMALL_PRIMES = [p for p in range(2, _TRIAL_LIMIT) if all(p % q for q in range(2, math.isqrt(p) + 1))]
# deterministic Miller-Rabin witnesses for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple  # ((prime, exponent), ...) with primes increasing

    def as_dict(self):
        return dict(self.factors)

    def value(self):
        out = 1
        for p, k in self.factors:
            out *= p ** k
        return out

    def divisors(self):
        divs = [1]
        for p, k in self.factors:
            divs = [d * p ** i for d in divs for i in range(k + 1)]
        return sorted(divs)


def isqrt(n):
    if n < 0:
        raise DomainError("isqrt of negative number")
    return math.isqrt(n)


def is_square(n):
    """Return (True, r) if n == r*r with r >= 0, else (False, None)."""
    if n < 0:
        return False, None
    r = math.isqrt(n)
    return (True, r) if r * r == n else (False, None)


def ilog2(x):
    """The size measure log x: log2|x| when |x| >= 4, else 2."""
    x = abs(x)
    if x < 4:
        return 2.0
    b = x.bit_length()
    if b > 1000:
        # avoid float overflow on huge values
        top = x >> (b - 60)
        return (b - 60) + math.log2(top)
    return math.log2(x)


def is_prime(n):
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:50]:
        if n % p == 0:
            return n == p
    if n < 3_317_044_064_679_887_385_961_981:
        d, s = n - 1, 0
        while d % 2 == 0:
            d //= 2
            s += 1
        for a in _MR_BASES:
            x = pow(a, d, n)
            if x in (1, n - 1):
                continue
            for _ in range(s - 1):
                x = x * x % n
                if x == n - 1:
                    break
            else:
                return False
        return True
    return bool(gmpy2.is_strong_bpsw_prp(n))


def _rho(n, rng, budget=1 << 21):
    """Brent's variant of Pollard rho; None when the iteration budget runs out."""
    if n % 2 == 0:
        return 2
    spent = 0
    while spent < budget:
        c = rng.randrange(1, n)
        y = rng.randrange(0, n)
        m, g, r, q = 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
            if spent > budget:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    return None


def factorize(n, bound=FACTOR_BOUND):
    if n == 0:
        raise DomainError("cannot factor 0")
    n = abs(n)
    if n > bound:
        raise ResourceError(f"factorization bound exceeded ({n.bit_length()} bits)")
    orig = n
    found = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p
    rng = random.Random(n)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        ok, r = is_square(m)
        if ok:
            stack += [r, r]
            continue
        d = _rho(m, rng)
        if d is None:
            # large balanced factors: hand over to sympy's ECM-backed factoring
            for q, e in sympy.factorint(m).items():
                found[q] = found.get(q, 0) + e
            continue
        stack += [d, m // d]
    return Factorization(orig, tuple(sorted(found.items())))


def egcd(a, b):
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def inv_mod(a, m):
    if m == 1:
        return 0
    g, x, _ = egcd(a % m, m)
    if g != 1:
        raise DomainError(f"{a} not invertible mod {m}")
    return x % m


def crt(residues, moduli):
    """Unique r in [0, prod(moduli)) matching every residue; moduli pairwise coprime."""
    if len(residues) != len(moduli):
        raise DomainError("residues and moduli differ in length")
    r, m = 0, 1
    for a, n in zip(residues, moduli):
        if n <= 0:
            raise DomainError("moduli must be positive")
        if math.gcd(m, n) != 1:
            raise DomainError("moduli not pairwise coprime")
        # r + m*t = a (mod n)
        t = (a - r) * inv_mod(m, n) % n
        r += m * t
        m *= n
    return r % m


def _sqrt_mod_prime(a, p):
    a %= p
    if p == 2:
        return [a]
    if a == 0:
        return [0]
    if pow(a, (p - 1) // 2, p) != 1:
        return []
    if p % 4 == 3:
        x = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, x = t * c % p, x * b % p
    return sorted({x, p - x})


def _sqrt_mod_prime_power(a, p, k):
    pk = p ** k
    a %= pk
    if p == 2 and k <= 6:
        return [x for x in range(pk) if x * x % pk == a]
    if a == 0:
        # x^2 = 0 mod p^k  iff  p^ceil(k/2) | x
        step = p ** ((k + 1) // 2)
        return list(range(0, pk, step))
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if v % 2:
        return []
    # x = p^(v/2) * y with y^2 = a (mod p^(k-v)), y a unit
    h = v // 2
    kk = k - v
    if p == 2:
        roots = _sqrt_unit_mod_2k(a, kk)
    else:
        roots = _sqrt_mod_prime(a, p)
        m = p
        for _ in range(kk - 1):
            # Hensel lift from m to m*p
            nxt = []
            for r in roots:
                f = (r * r - a) // m
                t = (-f * inv_mod(2 * r, p)) % p
                nxt.append(r + m * t)
            roots = nxt
            m *= p
    mod_small = p ** kk
    # y is determined mod p^kk; x = p^h * y is determined mod p^(h+kk) = p^(k-h)
    base = p ** (k - h)
    out = set()
    for r in roots:
        x0 = (p ** h * (r % mod_small)) % base
        for t in range(p ** h):
            out.add((x0 + base * t) % pk)
    return sorted(out)


def _sqrt_unit_mod_2k(a, k):
    if k <= 3:
        m = 1 << k
        return [x for x in range(m) if x % 2 == 1 and x * x % m == a % m]
    if a % 8 != 1:
        return []
    roots = [1, 3, 5, 7]
    m = 8
    while m < (1 << k):
        m2 = m * 2
        nxt = set()
        for r in roots:
            for cand in (r, r + m):
                if cand * cand % m2 == a % m2:
                    nxt.add(cand % m2)
        roots = sorted(nxt)
        m = m2
    return roots


def sqrt_mod(D, m, fact_m=None):
    """All B in [0, m) with B^2 = D (mod m)."""
    if m <= 0:
        raise DomainError("modulus must be positive")
    if m == 1:
        return [0]
    if fact_m is None:
        fact_m = factorize(m)
    if fact_m.value() != m:
        raise InternalError("factorization does not match modulus")
    parts, mods = [], []
    for p, k in fact_m.factors:
        r = _sqrt_mod_prime_power(D, p, k)
        if not r:
            return []
        parts.append(r)
        mods.append(p ** k)
    out = [0]
    acc = 1
    for r, n in zip(parts, mods):
        out = [crt([x, y], [acc, n]) for x in out for y in r]
        acc *= n
    return sorted(out)


POSITIONS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


def split_modulus(M, dets):
    """Split M into six pairwise coprime factors, factor i coprime to dets[i].

    Uses gcds only: factor i is the largest divisor of what is left of M that
    is coprime to dets[i].  Every prime of M lands in the first position whose
    determinant it does not divide.
    """
    if M <= 0:
        raise DomainError("modulus must be positive")
    if len(dets) != 6:
        raise DomainError("need six determinants")
    out = []
    rest = M
    for d in dets:
        x = rest
        g = math.gcd(x, d)
        while g > 1:
            x //= g
            g = math.gcd(x, g)
        out.append(x)
        rest //= x
    if rest != 1:
        raise CertificateInvalid("modulus-split", "a prime of the modulus divides every determinant")
    return tuple(out)
