"""Exact validity of solvability certificates for small D (W multiplied out)."""
import math

from bqdcert.certify import DirectCert, InfraCert
from bqdcert.compose import chain_matrices_exact
from bqdcert.errors import CertificateInvalid, DomainError
from bqdcert.forms import (QForm, apply_transform, is_reduced, mat_det, mat_inv, mat_mul,
                           principal_cycle, reduced_identity, simple_equiv_matrix)
from bqdcert.frontend import INDEFINITE, classify, to_pell


def exact_W(D, cert):
    _, Vj = chain_matrices_exact(D, cert.chain_j)
    _, Vu = chain_matrices_exact(D, cert.chain_2p)
    U = Vu[-1]
    P = U if cert.k >= 0 else mat_inv(U)
    W = Vj[-1]
    k = cert.k
    if k < 0:
        # the J chain holds L_j' and W = U^(k+1) P S0 L_j' P, S0 the last cycle step
        cyc = principal_cycle(D)
        n = cyc.period
        S0 = mat_mul(mat_inv(simple_equiv_matrix(cyc, n - 1)), simple_equiv_matrix(cyc, n))
        swap = ((0, 1), (1, 0))
        W = mat_mul(mat_mul(mat_mul(swap, S0), W), swap)
        k += 1
    for _ in range(abs(k)):
        W = mat_mul(P, W)
    if cert.m:
        W = tuple(tuple(-x for x in row) for row in W)
    return W


def exact_u(D, cert):
    lam = math.isqrt(D)
    W = exact_W(D, cert)
    M = mat_mul(mat_mul(((1, lam), (0, 1)), W), mat_inv(cert.S))
    return M[0][0], M[1][0], W


def cert_really_valid(sys, cert):
    """True when the certificate meets every condition exactly (no floating point)."""
    if cert.sys != sys:
        return False
    if isinstance(cert, DirectCert):
        return sys.admissible(cert.x1, cert.x2)
    if not isinstance(cert, InfraCert) or classify(sys) != INDEFINITE:
        return False
    ps = to_pell(sys)
    D, g = ps.D, ps.g
    h = cert.h
    if h <= 0 or g % (h * h) or cert.G != g // (h * h):
        return False
    Q0 = QForm(cert.G, cert.B, cert.C)
    if Q0.D != D or math.gcd(math.gcd(cert.G, 2 * cert.B), cert.C) != 1:
        return False
    if mat_det(cert.S) != 1 or apply_transform(Q0, cert.S) != cert.Qred or not is_reduced(cert.Qred):
        return False
    if cert.m not in (0, 1) or cert.case not in ("a", "b"):
        return False
    try:
        u1, u2, W = exact_u(D, cert)
    except (CertificateInvalid, DomainError):
        return False
    It, _ = reduced_identity(D)
    if mat_det(W) != 1 or apply_transform(It, W) != cert.Qred:
        return False
    y1, y2 = h * u1, h * u2
    if y1 * y1 - D * y2 * y2 != g or not ps.congruent(y1, y2):
        return False
    if cert.case == "a":
        return ps.case_a and y1 > 0 and y2 > 0
    return ps.case_b and y1 > 0 and y2 < 0
