import pytest
from hypothesis import given, strategies as st

from bqdcert.errors import DomainError
from bqdcert.forms import (IDENTITY, QForm, apply_transform, cycle_of, fundamental_automorph,
                           is_reduced, mat_det, mat_mul, principal_cycle, reduce,
                           reduced_identity, right_neighbor, simple_equiv_matrix)
from bqdcert.numtheory import is_square
from bqdcert.pell import fundamental_solution

nonsquare = st.integers(2, 5000).filter(lambda D: not is_square(D)[0])


def F(a, b2, c):
    """Form from the printed [a, 2b, c] triple."""
    assert b2 % 2 == 0
    return QForm(a, b2 // 2, c)


def reduced_by_definition(Q):
    # 0 < b < sqrt D and sqrt D - b < |a| < sqrt D + b, decided with exact squares
    a, b, c = Q
    D = Q.D
    if not (b > 0 and b * b < D):
        return False
    lo = abs(a) - (-b)    # |a| + b > sqrt D
    hi = abs(a) - b       # |a| - b < sqrt D
    return lo * lo > D and (hi < 0 or hi * hi < D)


def test_determinant_examples():
    assert F(1, 0, -13).D == 13
    assert F(1, 6, -4).D == 13
    assert F(1, 0, 1).D == -1


def test_apply_transform_examples():
    Q = F(1, 6, -4)
    assert apply_transform(Q, IDENTITY) == Q
    assert apply_transform(F(1, 0, -13), ((1, 3), (0, 1))) == F(1, 6, -4)
    assert apply_transform(F(1, 6, -4), ((0, 1), (-1, 1))) == F(-4, 2, 3)
    with pytest.raises(DomainError):
        apply_transform(Q, ((1, 1), (1, 0)))


def test_is_reduced_examples():
    assert is_reduced(F(1, 6, -4))
    assert not is_reduced(F(1, 0, -13))
    assert is_reduced(F(3, 4, -3))


def test_reduce_examples():
    assert reduce(F(1, 6, -4)) == (F(1, 6, -4), IDENTITY)
    assert reduce(F(1, 0, -13)) == (F(1, 6, -4), ((1, 3), (0, 1)))
    Q = F(3, -2, -4)
    R, S = reduce(Q)
    assert is_reduced(R) and apply_transform(Q, S) == R


def test_reduced_identity_examples():
    assert reduced_identity(13) == (F(1, 6, -4), ((1, 3), (0, 1)))
    assert reduced_identity(2) == (F(1, 2, -1), ((1, 1), (0, 1)))
    assert reduced_identity(5) == (F(1, 4, -1), ((1, 2), (0, 1)))


def test_right_neighbor_examples():
    assert right_neighbor(F(1, 6, -4)) == (F(-4, 2, 3), ((0, 1), (-1, 1)), 1)
    Q, _, lam = right_neighbor(F(-4, 2, 3))
    assert (Q, lam) == (F(3, 4, -3), -1)
    Q, _, lam = right_neighbor(F(1, 2, -1))
    assert (Q, lam) == (F(-1, 2, 1), 2)


def test_cycle_examples():
    assert principal_cycle(2).period == 2
    assert principal_cycle(13).period == 10
    c3 = principal_cycle(3)
    assert c3.forms[0] == F(1, 2, -2) and c3.period == 2


def test_L_examples():
    cyc = principal_cycle(13)
    L = cyc.all_L()
    assert L[0] == IDENTITY
    assert L[1] == ((0, 1), (-1, 1))
    assert L[2] == ((-1, -1), (-1, -2))


@given(st.integers(-300, 300), st.integers(-300, 300), st.integers(-300, 300))
def test_reduce_property(a, b, c):
    Q = QForm(a, b, c)
    D = Q.D
    if D <= 0 or is_square(D)[0]:
        return
    R, S = reduce(Q)
    assert mat_det(S) == 1
    assert apply_transform(Q, S) == R
    assert reduced_by_definition(R)


@given(nonsquare)
def test_cycle_property(D):
    cyc = principal_cycle(D)
    n = cyc.period
    assert n % 2 == 0
    L = cyc.all_L()
    It = cyc.forms[0]
    for j, Q in enumerate(cyc.forms):
        assert reduced_by_definition(Q)
        assert (-1) ** j * Q.a > 0
        assert apply_transform(It, L[j]) == Q
    for j, lam in enumerate(cyc.lambdas, start=1):
        assert (-1) ** (j + 1) * lam > 0
    assert apply_transform(It, L[n]) == It


@given(nonsquare)
def test_automorph_matches_pell(D):
    cyc = principal_cycle(D)
    U, t, u = fundamental_automorph(cyc)
    s = fundamental_solution(D)
    assert (t, u) == (s.t1, s.u1)
    # U = [[t - b u, -c u], [a u, t + b u]] for the identity form
    a, b, c = cyc.forms[0]
    tt = U[0][0] + b * (U[1][0] // a)
    uu = U[1][0] // a
    assert U == ((tt - b * uu, -c * uu), (a * uu, tt + b * uu))


@given(nonsquare, st.integers(-30, 30))
def test_simple_equiv_matrix_periodic(D, j):
    cyc = principal_cycle(D)
    n = cyc.period
    Lj = simple_equiv_matrix(cyc, j)
    assert apply_transform(cyc.forms[0], Lj) == cyc.forms[j % n]
    assert simple_equiv_matrix(cyc, j + n) == mat_mul(cyc.all_L()[n], Lj)


@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(-200, 200))
def test_cycle_of_any_reduced_form(a, b, c):
    Q = QForm(a, b, c)
    D = Q.D
    if D <= 0 or is_square(D)[0]:
        return
    R, _ = reduce(Q)
    cyc = cycle_of(R)
    assert cyc.forms[0] == R
    for i, P in enumerate(cyc.forms):
        assert right_neighbor(P)[0] == cyc.forms[(i + 1) % cyc.period]
    assert len(set(cyc.forms)) == cyc.period


def test_reduce_rejects_definite():
    with pytest.raises(DomainError):
        reduce(F(1, 0, 1))
    with pytest.raises(DomainError):
        reduce(F(1, 0, -9))
