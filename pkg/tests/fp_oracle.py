"""Exact rational references for the floating-point layer."""
import random
from fractions import Fraction

from bqdcert.floatp import round_p


def exponent(x):
    """e with 2^(e-1) <= |x| < 2^e."""
    x = abs(Fraction(x))
    e = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** e <= x:
        e += 1
    while Fraction(2) ** (e - 1) > x:
        e -= 1
    return e


def round_ref(x, p):
    """Round half away from zero to p binary digits, by exhaustive comparison."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    e = exponent(x)
    ulp = Fraction(2) ** (e - p)
    q, r = divmod(abs(x), ulp)
    if 2 * r >= ulp:
        q += 1
    return (q * ulp) if x > 0 else -(q * ulp)


def rand_fraction(rng, bits=80):
    num = rng.randint(-(1 << bits), 1 << bits)
    den = rng.randint(1, 1 << rng.randint(1, bits))
    return Fraction(num, den)


def rand_fp(rng, p, N=1 << 30, bits=80):
    x = rand_fraction(rng, bits)
    return x, round_p(x, p, N)


def rng_for(seed):
    return random.Random(seed)


# ------------------------------------------------------------ bound trials
# Each trial returns None when it holds, or a description of the violation.

from bqdcert.floatp import (enc_add, enc_from_fraction, enc_mul, enc_neg, fadd, fmul,
                            sig_digits, sign_certified)


def floor_exp(x):
    """e with 2^e <= |x| < 2^(e+1)."""
    return exponent(x) - 1


def _near(rng, xbar, s):
    """A rational x that xbar approximates to about s digits."""
    e = floor_exp(xbar)
    width = Fraction(2) ** (e - s - 1)
    t = Fraction(rng.randint(-(1 << 20) + 1, (1 << 20) - 1), 1 << 20)
    return xbar + t * width


def _digits(xbar, x, p):
    d = sig_digits(xbar, x)
    return p if d is None else min(d, p)


def trial_rounding(rng, p=None):
    p = p or rng.choice([2, 3, 8, 16, 24, 53, 113])
    x = rand_fraction(rng, rng.randint(1, 120))
    if rng.random() < 0.2:
        # exact ties: odd multiples of half an ulp
        e = rng.randint(-40, 40)
        x = Fraction(2 * rng.randint(1 << (p - 1), (1 << p) - 1) + 1, 2) * Fraction(2) ** (e - p)
    if x == 0:
        return None
    e = exponent(x)
    half = Fraction(2) ** (e - p - 1)
    err = abs(round_p(x, p).to_fraction() - x)
    q = abs(x) / half
    tie = q.denominator == 1 and q.numerator % 2 == 1
    if err < half or (tie and err == half):
        return None
    return f"Round({x}, {p}) error {err} vs {half}"


def _pair(rng, p, same_sign):
    xs = []
    for _ in range(2):
        xb = round_p(rand_fraction(rng, rng.randint(4, 100)) or 1, p)
        if xb.F == 0:
            xb = round_p(1, p)
        xs.append(xb)
    if same_sign and (xs[0].F > 0) != (xs[1].F > 0):
        xs[1] = round_p(-xs[1].to_fraction(), p)
    s = rng.randint(1, p)
    x = _near(rng, xs[0].to_fraction(), s)
    y = _near(rng, xs[1].to_fraction(), s)
    s = min(_digits(xs[0], x, p), _digits(xs[1], y, p))
    return xs[0], xs[1], x, y, s


def trial_add_loss(rng, p=None):
    p = p or rng.choice([4, 8, 16, 53])
    xb, yb, x, y, s = _pair(rng, p, True)
    if s < 1 or x * y <= 0:
        return None
    got = _digits(fadd(xb, yb), x + y, p)
    return None if got >= s - 2 else f"add p={p} s={s} got {got}: {x}, {y}"


def trial_mul_loss(rng, p=None):
    p = p or rng.choice([4, 8, 16, 53])
    xb, yb, x, y, s = _pair(rng, p, False)
    if s < 1:
        return None
    got = _digits(fmul(xb, yb), x * y, p)
    return None if got >= s - 3 else f"mul p={p} s={s} got {got}: {x}, {y}"


def trial_sum_loss(rng, p=None):
    p = p or rng.choice([8, 16, 53])
    j = rng.randint(1, 4)
    s = rng.randint(1, p)
    bars, xs = [], []
    for _ in range(j):
        xb = round_p(rand_fraction(rng, rng.randint(4, 60)) or 1, p)
        if xb.F == 0:
            xb = round_p(1, p)
        bars.append(xb)
        xs.append(_near(rng, xb.to_fraction(), s))
    if rng.random() < 0.5 and j >= 2:
        # provoke cancellation: make the last term nearly cancel the rest
        t = -sum(b.to_fraction() for b in bars[:-1])
        if t:
            bars[-1] = round_p(t * (1 + Fraction(rng.randint(-1000, 1000), 1 << 30)), p)
            if bars[-1].F == 0:
                return None
            xs[-1] = _near(rng, bars[-1].to_fraction(), s)
    s = min(_digits(b, x, p) for b, x in zip(bars, xs))
    total = sum(xs)
    if total == 0:
        return None
    e = max(floor_exp(b.to_fraction()) for b in bars)
    A = e - floor_exp(total)          # least A with |s_j| >= 2^(e-A)
    acc = bars[0]
    for b in bars[1:]:
        acc = fadd(acc, b)
    got = _digits(acc, total, p)
    return None if got >= s - A - 8 else f"sum j={j} p={p} s={s} A={A} got {got}"


def trial_enclosure(rng, p=None):
    p = p or rng.choice([3, 8, 16, 53])
    vals = [rand_fraction(rng, rng.randint(1, 60)) for _ in range(4)]
    encs = [enc_from_fraction(v, p) for v in vals]
    for _ in range(rng.randint(1, 12)):
        i, k = rng.randrange(4), rng.randrange(4)
        op = rng.choice("+*-")
        if op == "+":
            encs[i], vals[i] = enc_add(encs[i], encs[k]), vals[i] + vals[k]
        elif op == "*":
            encs[i], vals[i] = enc_mul(encs[i], encs[k]), vals[i] * vals[k]
        else:
            encs[i], vals[i] = enc_neg(encs[i]), -vals[i]
    for e, v in zip(encs, vals):
        diff = abs(e.val.to_fraction() - v)
        if (e.err is None and diff) or (e.err is not None and diff >= Fraction(2) ** e.err):
            return f"enclosure misses {v}"
        sg = sign_certified(e)
        if sg is not None and sg != (v > 0) - (v < 0):
            return f"wrong certified sign for {v}"
    return None


BOUND_TRIALS = {
    "rounding": trial_rounding,
    "add-loss": trial_add_loss,
    "mul-loss": trial_mul_loss,
    "sum-loss": trial_sum_loss,
    "enclosure": trial_enclosure,
}


def run_trials(name, n, seed=0):
    rng = random.Random(f"{name}-{seed}")
    fails = []
    for _ in range(n):
        r = BOUND_TRIALS[name](rng)
        if r:
            fails.append(r)
    return fails
