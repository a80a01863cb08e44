"""Binary quadratic Diophantine systems: normalization, classification, the
change of variables to y1^2 - D y2^2 = g, and the solvers.

A system is  a x1^2 + 2b x1 x2 + c x2^2 + 2d x1 + 2e x2 + f = 0  together with
x1, x2 >= 0 and x = alpha (mod gamma).  Users write the equation as
A x^2 + B xy + C y^2 + Dx + Ey + F = 0; normalize() converts.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InternalError
from .forms import (QForm, mat_inv, mat_mul, principal_cycle, reduce)
from .numtheory import egcd, factorize, is_square, sqrt_mod
from .pell import fundamental_solution, period_mod

DEFINITE, DEGENERATE, INDEFINITE = "definite", "degenerate", "indefinite"


def bit_len(x):
    return max(1, abs(x).bit_length()) + 1


@dataclass(frozen=True)
class DioSystem:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int
    gamma: int = 1
    alpha1: int = 0
    alpha2: int = 0

    @property
    def D(self):
        return self.b * self.b - self.a * self.c

    def coeffs(self):
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    def norm(self):
        return max(max(abs(v) for v in self.coeffs()), abs(self.gamma))

    def length(self):
        """Input length: bit lengths of the coefficients plus three times that of gamma."""
        return sum(bit_len(v) for v in self.coeffs()) + 3 * bit_len(self.gamma)

    def value(self, x1, x2):
        a, b, c, d, e, f = self.coeffs()
        return a * x1 * x1 + 2 * b * x1 * x2 + c * x2 * x2 + 2 * d * x1 + 2 * e * x2 + f

    def admissible(self, x1, x2):
        g = self.gamma
        return (x1 >= 0 and x2 >= 0 and (x1 - self.alpha1) % g == 0
                and (x2 - self.alpha2) % g == 0 and self.value(x1, x2) == 0)

    def swapped(self):
        return DioSystem(self.c, self.b, self.a, self.e, self.d, self.f,
                         self.gamma, self.alpha2, self.alpha1)


def normalize(raw, gamma=1, alpha=(0, 0)):
    """From A x^2 + B xy + C y^2 + Dx + Ey + F to even cross and linear terms,
    doubling the whole equation only when some of B, D, E is odd."""
    if len(raw) != 6:
        raise DomainError("need six coefficients")
    if gamma < 1:
        raise DomainError("modulus must be at least 1")
    A, B, C, Dd, E, F = (int(v) for v in raw)
    if B % 2 == 0 and Dd % 2 == 0 and E % 2 == 0:
        co = (A, B // 2, C, Dd // 2, E // 2, F)
    else:
        co = (2 * A, B, 2 * C, Dd, E, 2 * F)
    return DioSystem(*co, gamma, alpha[0] % gamma, alpha[1] % gamma)


def from_normalized(co, gamma=1, alpha=(0, 0)):
    if gamma < 1:
        raise DomainError("modulus must be at least 1")
    return DioSystem(*(int(v) for v in co), gamma, alpha[0] % gamma, alpha[1] % gamma)


def classify(sys):
    D = sys.D
    if D < 0:
        return DEFINITE
    if is_square(D)[0]:
        return DEGENERATE
    return INDEFINITE


# ------------------------------------------------------------ Pell variables

def _pos_sqrt_cmp(b, D, sign):
    """Sign of (sign*b + sqrt D) for nonsquare D > 0, exactly."""
    t = sign * b
    if t >= 0:
        return 1
    return 1 if t * t < D else -1


@dataclass(frozen=True)
class PellSystem:
    sys: DioSystem
    D: int
    g: int
    M: int          # |c D gamma|

    def y_of_x(self, x1, x2):
        a, b, c, d, e, f = self.sys.coeffs()
        return self.D * x1 + (b * e - c * d), b * x1 + c * x2 + e

    def x_of_y(self, y1, y2):
        """Integer (x1, x2) for (y1, y2), or None when not integral."""
        a, b, c, d, e, f = self.sys.coeffs()
        D = self.D
        n1 = y1 - (b * e - c * d)
        if n1 % D:
            return None
        n2 = -b * y1 + D * y2 + c * (a * e - b * d)
        if n2 % (c * D):
            return None
        return n1 // D, n2 // (c * D)

    def congruent(self, y1, y2):
        """The residue conditions mod |c D gamma| that make x integral and x = alpha (mod gamma)."""
        return self.residue_test()(y1, y2)

    def residue_test(self):
        a, b, c, d, e, f = self.sys.coeffs()
        D, M, s = self.D, self.M, self.sys
        k1 = (c * (b * e - c * d) + c * D * s.alpha1) % M
        k2 = (c * D * s.alpha2 - c * (a * e - b * d)) % M

        def ok(y1, y2):
            return (c * y1 - k1) % M == 0 and (D * y2 - b * y1 - k2) % M == 0
        return ok

    @property
    def case_a(self):
        """y2 > 0 is possible for large solutions: c(-b + sqrt D) > 0."""
        return (1 if self.sys.c > 0 else -1) * _pos_sqrt_cmp(self.sys.b, self.D, -1) > 0

    @property
    def case_b(self):
        """y2 < 0 is possible for large solutions: c(b + sqrt D) < 0."""
        return (1 if self.sys.c > 0 else -1) * _pos_sqrt_cmp(self.sys.b, self.D, 1) < 0


def pell_g(sys):
    a, b, c, d, e, f = sys.coeffs()
    det = a * (c * f - e * e) - b * (b * f - e * d) + d * (b * e - c * d)
    return -c * det


def to_pell(sys):
    if classify(sys) != INDEFINITE:
        raise DomainError("system is not indefinite")
    D = sys.D
    return PellSystem(sys, D, pell_g(sys), abs(sys.c * D * sys.gamma))


# --------------------------------------------------------------- result types

@dataclass(frozen=True)
class Solution:
    x1: int
    x2: int


@dataclass(frozen=True)
class Unsolvable:
    reason: str


def _key(x):
    return (max(x), x)


def _best(cands):
    return Solution(*min(cands, key=_key)) if cands else None


# ------------------------------------------------------------ definite case

def solve_definite(sys):
    """Exhaustive over |y2| <= sqrt(g/|D|); the least admissible point by (max, lex) wins."""
    if classify(sys) != DEFINITE:
        raise DomainError("system is not definite")
    D = sys.D
    c = sys.c
    ps = PellSystem(sys, D, pell_g(sys), abs(c * D * sys.gamma))
    g = ps.g
    if g < 0:
        return Unsolvable("definite: g < 0")
    Y = math.isqrt(g // -D)
    cands = []
    for y2 in range(-Y, Y + 1):
        ok, r = is_square(g + D * y2 * y2)
        if not ok:
            continue
        for y1 in {-r, r}:
            x = _x_from_y_any(sys, D, y1, y2)
            if x is not None and sys.admissible(*x):
                cands.append(x)
    return _best(cands) or Unsolvable("definite: no admissible point")


def _x_from_y_any(sys, D, y1, y2):
    a, b, c, d, e, f = sys.coeffs()
    n1 = y1 - (b * e - c * d)
    n2 = -b * y1 + D * y2 + c * (a * e - b * d)
    if n1 % D or n2 % (c * D):
        return None
    return n1 // D, n2 // (c * D)


# ---------------------------------------------------------- degenerate case

def _divisors(n):
    """Positive and negative divisors of n != 0, ascending."""
    pos = factorize(n).divisors()
    return sorted([-x for x in pos] + pos)


def _scan_affine(sys, fam, period):
    """Least admissible point of the family t -> ((p1 t + q1)/r1, (p2 t + q2)/r2).

    fam is ((p1, q1, r1), (p2, q2, r2)) with r1, r2 != 0.  Admissibility is
    periodic in t with the given period and max(x1, x2) is convex in t, so the
    least admissible point lies within one period of the real minimizer.
    """
    lo, hi = None, None
    lines = []
    for p, q, r in fam:
        if r < 0:
            p, q, r = -p, -q, -r
        lines.append((Fraction(p, r), Fraction(q, r)))
        # p t + q >= 0
        if p > 0:
            v = Fraction(-q, p)
            lo = v if lo is None else max(lo, v)
        elif p < 0:
            v = Fraction(-q, p)
            hi = v if hi is None else min(hi, v)
        elif q < 0:
            return None
    if lo is not None and hi is not None and lo > hi:
        return None
    (s1, c1), (s2, c2) = lines
    pts = [t for t in (lo, hi) if t is not None]
    if s1 != s2:
        pts.append((c2 - c1) / (s1 - s2))
    pts = [t for t in pts if (lo is None or t >= lo) and (hi is None or t <= hi)]
    if pts:
        tstar = min(pts, key=lambda t: max(s1 * t + c1, s2 * t + c2))
    else:
        tstar = Fraction(0)
    start, stop = math.floor(tstar) - period, math.ceil(tstar) + period
    if lo is not None:
        start = max(start, math.ceil(lo))
    if hi is not None:
        stop = min(stop, math.floor(hi))
    cands = []
    for t in range(start, stop + 1):
        xs = []
        for p, q, r in fam:
            n = p * t + q
            if n % r:
                break
            xs.append(n // r)
        else:
            if sys.admissible(*xs):
                cands.append(tuple(xs))
    return min(cands, key=_key) if cands else None


def solve_degenerate(sys):
    if classify(sys) != DEGENERATE:
        raise DomainError("system is not degenerate")
    a, b, c, d, e, f = sys.coeffs()
    D = sys.D
    if D > 0 and c != 0:
        return _degenerate_square(sys)
    if D > 0 and a != 0:
        r = _degenerate_square(sys.swapped())
        return Solution(r.x2, r.x1) if isinstance(r, Solution) else r
    if D > 0:
        return _degenerate_hyperbolic(sys)
    return _degenerate_parabolic(sys)


def _degenerate_square(sys):
    """D = h^2 > 0, c != 0: (y1 + h y2)(y1 - h y2) = g."""
    a, b, c, d, e, f = sys.coeffs()
    D = sys.D
    h = math.isqrt(D)
    g = pell_g(sys)
    cands = []
    if g != 0:
        for g1 in _divisors(g):
            g2 = g // g1
            if (g1 + g2) % 2 or (g1 - g2) % (2 * h):
                continue
            y1, y2 = (g1 + g2) // 2, (g1 - g2) // (2 * h)
            x = _x_from_y_any(sys, D, y1, y2)
            if x is not None and sys.admissible(*x):
                cands.append(x)
        r = _best(cands)
        return r if r else Unsolvable("degenerate: no factorization of g gives an admissible point")
    # g = 0: y1 = s h y2, a line through the y-plane for each sign s
    P = abs(c * D * sys.gamma)
    for s in (1, -1):
        # y2 = t, y1 = s h t
        fam = ((s * h, -(b * e - c * d), D),
               (-b * s * h + D, c * (a * e - b * d), c * D))
        x = _scan_affine(sys, fam, P)
        if x is not None:
            cands.append(x)
    r = _best(cands)
    return r if r else Unsolvable("degenerate: no admissible point on the lines g = 0")


def _degenerate_hyperbolic(sys):
    """a = c = 0, b != 0: (2b x1 + 2e)(2b x2 + 2d) = 4de - 2bf."""
    a, b, c, d, e, f = sys.coeffs()
    N = 4 * d * e - 2 * b * f
    cands = []
    if N != 0:
        for n1 in _divisors(N):
            n2 = N // n1
            if (n1 - 2 * e) % (2 * b) or (n2 - 2 * d) % (2 * b):
                continue
            x = ((n1 - 2 * e) // (2 * b), (n2 - 2 * d) // (2 * b))
            if sys.admissible(*x):
                cands.append(x)
    else:
        G = sys.gamma
        if e % b == 0:
            x = _scan_affine(sys, ((0, -e, b), (1, 0, 1)), G)
            if x:
                cands.append(x)
        if d % b == 0:
            x = _scan_affine(sys, ((1, 0, 1), (0, -d, b)), G)
            if x:
                cands.append(x)
    r = _best(cands)
    return r if r else Unsolvable("degenerate: no admissible factor pair")


def _degenerate_parabolic(sys):
    """D = 0: the quadratic part is m (al x1 + be x2)^2."""
    a, b, c, d, e, f = sys.coeffs()
    G = sys.gamma
    if a == 0 and b == 0 and c == 0:
        return _linear(sys)
    m = math.gcd(a, c)
    if a < 0 or (a == 0 and c < 0):
        m = -m
    al = math.isqrt(a // m)
    be = math.isqrt(c // m)
    if m * al * be != b:
        be = -be
    if m * al * al != a or m * be * be != c or m * al * be != b:
        raise InternalError("square decomposition failed")
    # unimodular change z = al x1 + be x2, w = ga x1 + de x2
    _, s0, t0 = egcd(al, be)         # al*s0 + be*t0 = 1
    ga, de = -t0, s0                 # al*de - be*ga = 1
    kap = e * al - d * be
    lin = d * de - e * ga
    # m z^2 + 2 lin z + 2 kap w + f = 0, x1 = de z - be w, x2 = -ga z + al w
    cands = []
    if kap != 0:
        P = 2 * abs(kap) * G
        # numerators of x1, x2 as quadratics in z over 2 kap
        den = 2 * kap
        q1 = (be * m, 2 * be * lin + 2 * kap * de, be * f)          # x1 * den
        q2 = (-al * m, -2 * al * lin - 2 * kap * ga, -al * f)       # x2 * den
        R = 1
        for q in (q1, q2):
            lead = next((v for v in q if v), None)
            if lead is None:
                continue
            R = max(R, 1 + max(abs(v) for v in q) // max(1, abs(lead)) + 1)
        for z in range(-R - P, R + P + 1):
            n1 = q1[0] * z * z + q1[1] * z + q1[2]
            n2 = q2[0] * z * z + q2[1] * z + q2[2]
            if n1 % den or n2 % den:
                continue
            x = (n1 // den, n2 // den)
            if sys.admissible(*x):
                cands.append(x)
    else:
        # m z^2 + 2 lin z + f = 0 fixes z; w is free
        disc = lin * lin - m * f
        ok, r = is_square(disc)
        if ok:
            for num in {-lin + r, -lin - r}:
                if num % m:
                    continue
                z = num // m
                fam = ((-be, de * z, 1), (al, -ga * z, 1))
                x = _scan_affine(sys, fam, G)
                if x is not None:
                    cands.append(x)
    r = _best(cands)
    return r if r else Unsolvable("degenerate: no admissible point on the parabola")


def _linear(sys):
    a, b, c, d, e, f = sys.coeffs()
    G = sys.gamma
    if d == 0 and e == 0:
        if f != 0:
            return Unsolvable("inconsistent constant equation")
        return Solution(sys.alpha1, sys.alpha2)
    g, s, t = egcd(2 * d, 2 * e)
    if f % g:
        return Unsolvable("linear equation has no integer point")
    k = -f // g
    x0, y0 = s * k, t * k
    fam = ((2 * e // g, x0, 1), (-2 * d // g, y0, 1))
    x = _scan_affine(sys, fam, G)
    return Solution(*x) if x else Unsolvable("linear: no admissible point")


# ---------------------------------------------------------- indefinite case

def _log2_int(n):
    n = abs(n)
    b = n.bit_length()
    if b > 1000:
        return (b - 60) + math.log2(n >> (b - 60))
    return math.log2(n)


def _log2_lin(v1, v2, D):
    """log2 |v1 + sqrt(D) v2| where v1, v2 have the same sign (no cancellation)."""
    x, y = abs(v1), abs(v2)
    sh = max(0, max(x.bit_length(), y.bit_length() + D.bit_length()) - 900)
    return sh + math.log2((x >> sh) + math.sqrt(D) * (y >> sh))


class RepClass:
    """The representations of G by x^2 - D y^2 coming from one class [G, 2B, C].

    In these coordinates every representation is  (-1)^m  E'^k v  with
    E' = sS U sS^-1 (U the fundamental automorph of the reduced identity form)
    and v = sS L_j S^-1 e1.
    """

    def __init__(self, cycle, j, S, G):
        D = cycle.D
        self.D = D
        self.G = G
        lam = math.isqrt(D)
        Ss = ((1, lam), (0, 1))
        L = cycle.all_L()
        U = L[cycle.period]
        Sinv = mat_inv(S)
        Vm = mat_mul(mat_mul(Ss, L[j]), Sinv)
        self.v = (Vm[0][0], Vm[1][0])
        E = mat_mul(mat_mul(Ss, U), mat_inv(Ss))
        self.sU = 1 if E[0][0] > 0 else -1
        self.E = E
        self.Einv = mat_inv(E)
        t, u = abs(E[0][0]), abs(E[1][0])
        if t * t - D * u * u != 1 or E != ((self.sU * t, self.sU * D * u), (self.sU * u, self.sU * t)):
            raise InternalError("automorph has unexpected shape")
        self.t, self.u = t, u
        self.log_eps = _log2_lin(t, u, D)
        v1, v2 = self.v
        if v1 * v1 - D * v2 * v2 != G:
            raise InternalError("representation does not represent G")
        # A = v1 + sqrt(D) v2, Bv = v1 - sqrt(D) v2, A * Bv = G
        if v2 == 0:
            self.logA = self.logB = _log2_int(v1)
            self.sA = self.sB = 1 if v1 > 0 else -1
        elif (v1 >= 0) == (v2 > 0):
            self.logA = _log2_lin(v1, v2, D)
            self.sA = 1 if v2 > 0 else -1
            self.logB = _log2_int(G) - self.logA
            self.sB = self.sA * (1 if G > 0 else -1)
        else:
            self.logB = _log2_lin(v1, -v2, D)
            self.sB = 1 if v1 > 0 else -1
            self.logA = _log2_int(G) - self.logB
            self.sA = self.sB * (1 if G > 0 else -1)
        # same signs for k > kstar, opposite for k < kstar
        self.kstar = (self.logB - self.logA) / (2 * self.log_eps)

    def exact(self, k):
        """E'^k v exactly (k may be negative)."""
        M = self.E if k >= 0 else self.Einv
        x1, x2 = self.v
        for _ in range(abs(k)):
            x1, x2 = M[0][0] * x1 + M[0][1] * x2, M[1][0] * x1 + M[1][1] * x2
        return x1, x2

    def signs(self, k):
        """(sign u1, sign u2) of E'^k v."""
        if abs(k - self.kstar) <= 2:
            x1, x2 = self._exact_near(k)
            return (x1 > 0) - (x1 < 0), (x2 > 0) - (x2 < 0)
        s = self.sU ** (k % 2)
        if k > self.kstar:
            return s * self.sA, s * self.sA
        return s * self.sB, -s * self.sB

    def _exact_near(self, k):
        # exact power by squaring; entries stay moderate near kstar
        M = self.E if k >= 0 else self.Einv
        R = ((1, 0), (0, 1))
        n = abs(k)
        while n:
            if n & 1:
                R = mat_mul(R, M)
            M = mat_mul(M, M)
            n >>= 1
        v1, v2 = self.v
        return R[0][0] * v1 + R[0][1] * v2, R[1][0] * v1 + R[1][1] * v2


@dataclass
class Branch:
    h: int
    G: int
    B: int
    C: int
    Q0: QForm
    Qred: QForm
    S: tuple
    j: int
    cycle: object
    rep: RepClass


def branches(ps):
    """All (h, B) with Q0 = [G, 2B, C] properly primitive and principal, h ascending, B ascending."""
    D, g = ps.D, ps.g
    cyc = principal_cycle(D)
    fg = factorize(g).factors
    hs = [1]
    for p, k in fg:
        hs = [h * p ** i for h in hs for i in range(k // 2 + 1)]
    out = []
    for h in sorted(hs):
        G = g // (h * h)
        for B in sqrt_mod(D, abs(G)):
            C, r = divmod(B * B - D, G)
            if r:
                continue
            if math.gcd(math.gcd(G, 2 * B), C) != 1:
                continue
            Q0 = QForm(G, B, C)
            Qred, S = reduce(Q0)
            j = cyc.index_of(Qred)
            if j is None:
                continue
            out.append(Branch(h, G, B, C, Q0, Qred, S, j, cyc, RepClass(cyc, j, S, G)))
    return out


def small_bound(sys):
    return 256 * sys.norm() ** 8


def small_solutions(ps, bound=None, branch_list=None):
    """Every admissible x with max(x) < bound (default 256 ||F||^8), by exact enumeration."""
    sys = ps.sys
    if bound is None:
        bound = small_bound(sys)
    a, b, c, d, e, f = sys.coeffs()
    D = ps.D
    y1max = D * bound + abs(b * e - c * d)
    y2max = (abs(b) + abs(c)) * bound + abs(e)
    ymax = max(y1max, y2max)
    found = set()
    if ps.g == 0:
        x = ps.x_of_y(0, 0)
        if x is not None and sys.admissible(*x) and max(x) < bound:
            found.add(x)
        return sorted(found, key=_key)
    for br in (branch_list if branch_list is not None else branches(ps)):
        rep = br.rep
        ub = ymax // br.h + 1
        lu = _log2_int(ub) + 2
        le = rep.log_eps
        # |u| >= |A| eps^k (1 - eps^-2)/2 once k > kstar, similarly on the other side
        khi = max(0, math.ceil(rep.kstar)) + 2 + max(0, math.ceil((lu + 2 - rep.logA) / le))
        klo = min(0, math.floor(rep.kstar)) - 2 - max(0, math.ceil((lu + 2 - rep.logB) / le))
        E = rep.E
        u1, u2 = rep._exact_near(klo)
        for k in range(klo, khi + 1):
            if k > klo:
                u1, u2 = E[0][0] * u1 + E[0][1] * u2, E[1][0] * u1 + E[1][1] * u2
            for s in (1, -1):
                y1, y2 = s * br.h * u1, s * br.h * u2
                x = ps.x_of_y(y1, y2)
                if x is not None and max(x) < bound and sys.admissible(*x):
                    found.add(x)
    return sorted(found, key=_key)


@dataclass
class InfraWitness:
    ps: PellSystem
    branch: Branch
    k: int
    m: int
    case: str       # 'a' (y2 > 0) or 'b' (y2 < 0)


def search_infra(ps, branch_list=None):
    """First (k, h, B, m) whose representation meets the residue and sign conditions.

    Candidates are ordered by |k| (positive k first), then by branch, then m, so
    a hit at small |k| in any branch ends the search early.
    """
    ca, cb = ps.case_a, ps.case_b
    if not (ca or cb):
        return None
    M = ps.M
    ok = ps.residue_test()
    sol = fundamental_solution(ps.D)
    P = period_mod(sol, M)
    states = []
    for br in (branch_list if branch_list is not None else branches(ps)):
        rep = br.rep
        ks = rep.kstar
        khi = max(0, math.ceil(ks) + 1) + (2 * P if ca else 0)
        klo = min(0, math.floor(ks) - 1) - (2 * P if cb else 0)
        E = [[x % M for x in row] for row in rep.E]
        Ei = [[x % M for x in row] for row in rep.Einv]
        v = (rep.v[0] % M, rep.v[1] % M)
        states.append([br, khi, klo, E, Ei, v, v])
    if not states:
        return None
    top = max(max(st[1], -st[2]) for st in states)
    for step in range(0, top + 1):
        for sgn in (1, -1):
            if sgn < 0 and step == 0:
                continue
            k = sgn * step
            for st in states:
                br, khi, klo = st[0], st[1], st[2]
                if not klo <= k <= khi:
                    continue
                u1, u2 = st[5] if sgn > 0 else st[6]
                y1, y2 = br.h * u1, br.h * u2
                for m in (0, 1):
                    if not (ok(-y1, -y2) if m else ok(y1, y2)):
                        continue
                    s1, s2 = br.rep.signs(k)
                    if m:
                        s1, s2 = -s1, -s2
                    if s1 <= 0 or s2 == 0:
                        continue
                    if s2 > 0 and ca:
                        return InfraWitness(ps, br, k, m, "a")
                    if s2 < 0 and cb:
                        return InfraWitness(ps, br, k, m, "b")
        for st in states:
            E, Ei, up, dn = st[3], st[4], st[5], st[6]
            st[5] = ((E[0][0] * up[0] + E[0][1] * up[1]) % M, (E[1][0] * up[0] + E[1][1] * up[1]) % M)
            st[6] = ((Ei[0][0] * dn[0] + Ei[0][1] * dn[1]) % M, (Ei[1][0] * dn[0] + Ei[1][1] * dn[1]) % M)
    return None


def solve_indefinite(ps, force_infra=False):
    """Solution (small), InfraWitness (large solutions only, or forced) or Unsolvable."""
    if ps.g == 0:
        x = ps.x_of_y(0, 0)
        if x is not None and ps.sys.admissible(*x):
            return Solution(*x)
        return Unsolvable("g = 0 and the origin of the Pell plane is not admissible")
    brs = branches(ps)
    small = [] if force_infra else small_solutions(ps, branch_list=brs)
    if small:
        return Solution(*small[0])
    w = search_infra(ps, brs)
    if w is not None:
        return w
    if force_infra:
        small = small_solutions(ps, branch_list=brs)
        if small:
            return Solution(*small[0])
    return Unsolvable("no representation class meets the residue and sign conditions")


def solve(sys, force_infra=False):
    kind = classify(sys)
    if kind == DEFINITE:
        return solve_definite(sys)
    if kind == DEGENERATE:
        return solve_degenerate(sys)
    return solve_indefinite(to_pell(sys), force_infra)


def solution_of_witness(w):
    """Exact (x1, x2) for a witness; only for modest sizes (test oracle)."""
    rep = w.branch.rep
    u1, u2 = rep._exact_near(w.k)
    s = -1 if w.m else 1
    x = w.ps.x_of_y(s * w.branch.h * u1, s * w.branch.h * u2)
    if x is None:
        raise InternalError("witness does not give an integral point")
    return x


# ----------------------------------------------------------------- oracle

@dataclass(frozen=True)
class NotFoundWithinBound:
    bound: int


def brute_force_oracle(sys, bound):
    """Scan x1 in [0, bound] (in the right residue class) and solve for x2 exactly."""
    a, b, c, d, e, f = sys.coeffs()
    G = sys.gamma
    for x1 in range(sys.alpha1, bound + 1, G):
        # c x2^2 + 2(b x1 + e) x2 + (a x1^2 + 2 d x1 + f) = 0
        B2 = b * x1 + e
        C0 = a * x1 * x1 + 2 * d * x1 + f
        roots = []
        if c != 0:
            disc = B2 * B2 - c * C0
            ok, r = is_square(disc)
            if ok:
                for num in (-B2 - r, -B2 + r):
                    if num % c == 0:
                        roots.append(num // c)
        elif B2 != 0:
            if C0 % (2 * B2) == 0:
                roots.append(-C0 // (2 * B2))
        elif C0 == 0:
            roots.append(sys.alpha2)
        for x2 in sorted(roots):
            if 0 <= x2 <= bound and sys.admissible(x1, x2):
                return Solution(x1, x2)
    return NotFoundWithinBound(bound)
