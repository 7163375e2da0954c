import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srlab.groups import (AA, H, RT, GroupId, GroupMismatch, GroupPoint, identity, inv, inverse,
                          left_jacobian, left_translate, left_translation_jacobian, mul, multiply,
                          random_points)

coord = st.floats(-3, 3, allow_nan=False)
lam = st.floats(0.05, 20, allow_nan=False)


def pt(g, *c):
    return GroupPoint.of(g, c)


def test_identities():
    assert tuple(identity(AA)) == (0, 1, 0)
    assert tuple(identity(H)) == (0, 0, 0)
    assert tuple(identity(RT)) == (0, 0, 0)


def test_products():
    assert np.allclose(multiply(pt(AA, 1, 2, 3), pt(AA, -1, 0.5, 4)).coords, [0, 1, 11])
    # cross-term sign makes the contact frame left-invariant
    assert np.allclose(multiply(pt(H, 1, 0, 0), pt(H, 0, 1, 0)).coords, [1, 1, -2])
    assert np.allclose(multiply(pt(RT, 0, 0, np.pi / 2), pt(RT, 1, 0, 0)).coords,
                       [0, 1, np.pi / 2], atol=1e-15)


def test_inverses():
    assert np.allclose(inverse(pt(AA, 2, 4, 8)).coords, [-2, 0.25, -2])
    assert np.allclose(inverse(pt(H, 1.5, -2, 3)).coords, [-1.5, 2, -3])
    z, t = 1 + 2j, 0.7
    w = -np.exp(-1j * t) * z
    assert np.allclose(inverse(pt(RT, z.real, z.imag, t)).coords, [w.real, w.imag, -t])


def test_left_translate():
    p = pt(AA, 0.3, 2.0, -1.0)
    assert left_translate(identity(AA), p) == p
    assert np.allclose(left_translate(pt(AA, 1, 2, 0), pt(AA, 0, 1, 5)).coords, [1, 2, 10])
    assert np.allclose(left_translate(pt(H, 0, 1, 0), pt(H, 0, 1, 0)).coords, [0, 2, 0])


def test_jacobian_examples():
    J = left_translation_jacobian(pt(AA, 0, 3, 0), pt(AA, 1, 1, 1))
    assert np.allclose(J, np.diag([1, 3, 3]))
    assert np.allclose(left_translation_jacobian(identity(AA), pt(AA, 5, 2, 1)), np.eye(3))


@pytest.mark.parametrize("g", [H, RT, AA])
def test_jacobian_matches_fd(g, rng):
    P0, P = random_points(g, 100, rng), random_points(g, 100, rng)
    h = 1e-5
    fd = np.stack([(mul(g, P0, P + h * e) - mul(g, P0, P - h * e)) / (2 * h)
                   for e in np.eye(3)], axis=-1)
    assert np.abs(left_jacobian(g, P0, P) - fd).max() < 1e-6


def test_errors():
    with pytest.raises(GroupMismatch):
        multiply(pt(H, 0, 0, 0), pt(RT, 0, 0, 0))
    with pytest.raises(ValueError):
        pt(AA, 0, 0, 0)
    with pytest.raises(ValueError):
        pt(H, np.nan, 0, 0)
    with pytest.raises(ValueError):
        GroupId.parse("sl2")
    assert GroupId.parse("Heisenberg") is H


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([H, RT, AA]), st.lists(coord, min_size=9, max_size=9),
       st.lists(lam, min_size=3, max_size=3))
def test_group_axioms(g, c, ls):
    P = np.array(c).reshape(3, 3)
    if g is AA:
        P[:, 1] = ls
    p, q, r = P
    e = identity(g).coords
    lhs, rhs = mul(g, mul(g, p, q), r), mul(g, p, mul(g, q, r))
    assert np.allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(lhs).max()))
    assert np.allclose(mul(g, p, inv(g, p)), e, atol=1e-12 * (1 + np.abs(p).max()))
    assert np.allclose(mul(g, inv(g, p), p), e, atol=1e-12 * (1 + np.abs(p).max()))
    assert np.array_equal(mul(g, e, p), p)
    if g is AA:
        assert mul(g, p, q)[1] > 0 and inv(g, p)[1] > 0
