import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdspin.linalg3 import eigh3, eigvals3, max_eigenpair


def test_diagonal_matrix():
    w, v = eigh3(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])
    assert np.allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])


def test_known_spectrum():
    # rank-one update of the identity: eigenvalues 1, 1, 1+|u|^2
    u = np.array([1.0, 2.0, 2.0])
    w = eigvals3(np.eye(3) + np.outer(u, u))
    assert np.allclose(w, [1.0, 1.0, 10.0], atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3))
    a = a + a.T
    w, v = eigh3(a)
    assert w[0] <= w[1] <= w[2]
    assert np.abs(v.T @ v - np.eye(3)).max() < 1e-12
    for k in range(3):
        assert np.abs(a @ v[:, k] - w[k] * v[:, k]).max() < 1e-11 * max(1.0, np.abs(w).max())


def test_max_eigenpair_degenerate_flag():
    k, vecs, degenerate = max_eigenpair(np.eye(3))
    assert k == pytest.approx(1.0)
    assert degenerate and len(vecs) == 3
    k, vecs, degenerate = max_eigenpair(np.diag([1.0, 2.0, 5.0]))
    assert not degenerate and len(vecs) == 1


def test_rejects_wrong_shape():
    with pytest.raises(ValueError):
        eigh3(np.eye(2))
