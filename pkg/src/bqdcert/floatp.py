"""Base-2, p-digit normalized floating point with explicit rounding, and enclosures.

A number (e, f) has value f * 2^e with 1/2 <= |f| < 1; f is stored as the
integer F = 2^p f.  Every operation is integer arithmetic, so results are
bit-identical on every platform.  An Enclosure pairs a value with an error
exponent E meaning |true - value| < 2^E (E is None when the value is exact).
"""
from fractions import Fraction
from typing import NamedTuple, Optional


class FpOverflow(ArithmeticError):
    pass


class FpNum(NamedTuple):
    e: int
    F: int      # 2^p * f
    p: int
    N: int

    def is_zero(self):
        return self.F == 0

    def to_fraction(self):
        s = self.e - self.p
        return Fraction(self.F * (1 << s)) if s >= 0 else Fraction(self.F, 1 << -s)

    def __float__(self):
        return float(self.to_fraction())


def zero(p, N):
    return FpNum(0, 0, p, N)


def _finish(F, e, p, N):
    """F * 2^(e-p) with 2^(p-1) <= |F| <= 2^p; renormalize and check range."""
    if abs(F) == 1 << p:
        F >>= 1
        e += 1
    if e >= N:
        raise FpOverflow(f"exponent {e} out of range (N={N})")
    return FpNum(e, F, p, N)


def _round_dyadic(m, s, p, N):
    """Round(m * 2^s, p), with underflow to zero below 2^-N."""
    if m == 0:
        return FpNum(0, 0, p, N)
    L = abs(m).bit_length()
    e = L + s          # 2^(e-1) <= |x| < 2^e
    if e <= -N:
        return FpNum(0, 0, p, N)
    k = L - p
    if k <= 0:
        return _finish(m << -k, e, p, N)
    half = 1 << (k - 1)
    F = (m + half) >> k if m > 0 else -((-m + half) >> k)
    return _finish(F, e, p, N)


def round_p(x, p, N=1 << 30):
    """Round an int or Fraction to p significant binary digits."""
    if isinstance(x, int):
        return _round_dyadic(x, 0, p, N)
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    if n == 0:
        return FpNum(0, 0, p, N)
    if d & (d - 1) == 0:
        return _round_dyadic(n, -(d.bit_length() - 1), p, N)
    an = abs(n)
    e = an.bit_length() - d.bit_length()
    # fix e so that 2^(e-1) <= |x| < 2^e
    if (an << max(0, -e)) >= (d << max(0, e)):
        e += 1
    if (an << max(0, 1 - e)) < (d << max(0, e - 1)):
        e -= 1
    if e <= -N:
        return FpNum(0, 0, p, N)
    sh = p - e
    num, den = (an << sh, d) if sh >= 0 else (an, d << -sh)
    F = (2 * num + den) // (2 * den)
    return _finish(F if n > 0 else -F, e, p, N)


def _check(x, y):
    if x.p != y.p or x.N != y.N:
        raise ValueError("operands differ in precision or range")


def _sum_parts(x, y):
    """Exact x + y as (m, s) meaning m * 2^s, or None when one side is negligible."""
    if x.F == 0:
        return y.F, y.e - y.p
    if y.F == 0:
        return x.F, x.e - x.p
    sx, sy = x.e - x.p, y.e - y.p
    s = min(sx, sy)
    return (x.F << (sx - s)) + (y.F << (sy - s)), s


def fadd(x, y):
    _check(x, y)
    p, N = x.p, x.N
    if x.F and y.F and abs(x.e - y.e) > p + 2:
        # the smaller operand is below half an ulp of the larger one
        return x if x.e > y.e else y
    m, s = _sum_parts(x, y)
    return _round_dyadic(m, s, p, N)


def fneg(x):
    return FpNum(x.e, -x.F, x.p, x.N)


def fmul(x, y):
    _check(x, y)
    if x.F == 0 or y.F == 0:
        return FpNum(0, 0, x.p, x.N)
    return _round_dyadic(x.F * y.F, x.e + y.e - 2 * x.p, x.p, x.N)


# ---------------------------------------------------------------- enclosures

class Enclosure(NamedTuple):
    val: FpNum
    err: Optional[int]      # |true - val| < 2^err; None means exact

    @property
    def exact(self):
        return self.err is None


def _bound_exp(terms):
    """Least-effort E with sum(m * 2^s) < 2^E for nonnegative terms, or None if all vanish."""
    terms = [(m, s) for m, s in terms if m]
    if not terms:
        return None
    top = max(s + m.bit_length() for m, s in terms)
    base = top - 64
    S = 0
    for m, s in terms:
        sh = s - base
        if sh >= 0:
            S += m << sh
        else:
            S += ((m - 1) >> -sh) + 1   # ceiling
    return base + S.bit_length()


def enc_exact_int(n, p, N=1 << 30):
    """Enclosure of the integer n (exact when n fits in p digits)."""
    v = _round_dyadic(n, 0, p, N)
    sv = v.e - v.p
    if sv >= 0:
        d, t = n - (v.F << sv), 0
    else:
        d, t = (n << -sv) - v.F, sv
    return Enclosure(v, _bound_exp([(abs(d), t)]))


def enc_from_fraction(x, p, N=1 << 30):
    v = round_p(x, p, N)
    diff = abs(v.to_fraction() - Fraction(x))
    if diff == 0:
        return Enclosure(v, None)
    # |diff| <= 2^(e-p-1); bound it by the next power of two above
    E = (diff.numerator.bit_length() - diff.denominator.bit_length()) + 1
    return Enclosure(v, E)


def enc_neg(a):
    return Enclosure(fneg(a.val), a.err)


def enc_add(a, b):
    x, y = a.val, b.val
    v = fadd(x, y)
    terms = []
    if a.err is not None:
        terms.append((1, a.err))
    if b.err is not None:
        terms.append((1, b.err))
    if x.F and y.F and abs(x.e - y.e) > x.p + 2:
        small = y if x.e > y.e else x
        terms.append((1, small.e))
    else:
        m, s = _sum_parts(x, y)
        # exact rounding error |v - (x + y)|
        if v.F:
            sv = v.e - v.p
            t = min(s, sv)
            r = (v.F << (sv - t)) - (m << (s - t))
            terms.append((abs(r), t))
        else:
            terms.append((abs(m), s))
    return Enclosure(v, _bound_exp(terms))


def enc_mul(a, b):
    x, y = a.val, b.val
    if (x.F == 0 and a.err is None) or (y.F == 0 and b.err is None):
        return Enclosure(FpNum(0, 0, x.p, x.N), None)
    v = fmul(x, y)
    terms = []
    if b.err is not None and x.F:
        terms.append((1, x.e + b.err))
    if a.err is not None and y.F:
        terms.append((1, y.e + a.err))
    if a.err is not None and b.err is not None:
        terms.append((1, a.err + b.err))
    if x.F and y.F:
        m, s = x.F * y.F, x.e + y.e - 2 * x.p
        if v.F:
            sv = v.e - v.p
            t = min(s, sv)
            r = (v.F << (sv - t)) - (m << (s - t))
            terms.append((abs(r), t))
        else:
            terms.append((abs(m), s))
    return Enclosure(v, _bound_exp(terms))


def enc_sum(items):
    """Left-to-right floating sum of enclosures."""
    it = iter(items)
    acc = next(it)
    for x in it:
        acc = enc_add(acc, x)
    return acc


def sign_certified(a):
    """+1 or -1 when the enclosure excludes zero, 0 for an exact zero, None otherwise."""
    v = a.val
    if v.F == 0:
        return 0 if a.err is None else None
    if a.err is None or v.e - 1 > a.err:
        return 1 if v.F > 0 else -1
    return None


def sig_digits(xbar, x):
    """Largest s with |xbar - x| < 2^(E-s-1), where 2^E <= |x| < 2^(E+1)."""
    x = Fraction(x)
    xb = xbar.to_fraction() if isinstance(xbar, FpNum) else Fraction(xbar)
    if x == 0:
        raise ValueError("significant digits of zero are undefined")
    ax = abs(x)
    E = ax.numerator.bit_length() - ax.denominator.bit_length()
    if Fraction(2) ** E > ax:
        E -= 1
    diff = abs(xb - x)
    if diff == 0:
        return None  # exact: unbounded
    # want max s with diff < 2^(E-s-1)  <=>  s < E - 1 - log2(diff)
    k = diff.numerator.bit_length() - diff.denominator.bit_length()
    if Fraction(2) ** k > diff:
        k -= 1
    # 2^k <= diff < 2^(k+1): diff < 2^(E-s-1) iff k+1 <= E-s-1
    return E - k - 2
