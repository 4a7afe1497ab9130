import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptband.model import (
    Boundary,
    ModelParams,
    bloch_matrix,
    build_hermitian_counterpart,
    build_nonhermitian,
    parity_matrix,
    pt_residual,
    two_site_shift,
    uniform_ring,
)


def naive_matrix(J, delta, gamma, N, periodic=True):
    # literal loop over 1-based labels
    n = 2 * N
    H = np.zeros((n, n), dtype=complex)
    for l in range(1, n + 1):
        H[l - 1, l - 1] = 1j * gamma * (-1) ** l
        if l < n or periodic:
            m = l % n + 1
            H[l - 1, m - 1] = H[m - 1, l - 1] = -J * (1 + (-1) ** l * delta)
    return H


@pytest.mark.parametrize("N", [2, 3, 7])
def test_matches_literal_construction(N):
    p = ModelParams(J=1.3, delta=0.25, gamma=0.2, N=N)
    assert np.array_equal(build_nonhermitian(p), naive_matrix(1.3, 0.25, 0.2, N))


def test_open_seam_drops_only_the_closing_bond():
    p = ModelParams(J=1.0, delta=0.2, gamma=0.1, N=4, boundary="open_seam")
    assert np.array_equal(build_nonhermitian(p), naive_matrix(1.0, 0.2, 0.1, 4, periodic=False))


def test_parity_conventions_for_small_ring():
    H = build_nonhermitian(ModelParams(J=1.0, delta=0.1, gamma=0.3, N=2))
    # l = 1 is odd: potential -i gamma, bond (1,2) weak, bond (2,3) strong
    assert H[0, 0] == -0.3j
    assert H[1, 1] == 0.3j
    assert H[0, 1] == pytest.approx(-0.9)
    assert H[1, 2] == pytest.approx(-1.1)
    assert H[3, 0] == pytest.approx(-1.1)


def test_matrix_is_read_only():
    H = build_nonhermitian(ModelParams(N=3))
    with pytest.raises(ValueError):
        H[0, 0] = 1.0


@pytest.mark.parametrize("boundary", list(Boundary))
def test_pt_symmetry_exact(boundary):
    H = build_nonhermitian(ModelParams(delta=0.13, gamma=0.21, N=9, boundary=boundary))
    assert pt_residual(H) == 0.0


def test_two_site_translation_commutes_exactly():
    H = build_nonhermitian(ModelParams(delta=0.3, gamma=0.4, N=8))
    S = two_site_shift(16)
    assert np.array_equal(S @ H @ S.T, H)
    assert np.array_equal(S @ S.T, np.eye(16))


def test_parity_is_reflection():
    P = parity_matrix(6)
    assert np.array_equal(P @ np.arange(6), np.arange(6)[::-1])


def test_open_chain_ends_on_strong_bonds():
    H = build_nonhermitian(ModelParams(J=1.0, delta=0.1, gamma=0.0, N=5, boundary="open"))
    diag1 = np.diag(H, 1).real
    assert diag1[0] == pytest.approx(-1.1) and diag1[-1] == pytest.approx(-1.1)
    assert H[0, -1] == 0.0
    assert np.count_nonzero(diag1) == 9


def test_open_chain_has_real_spectrum_below_threshold():
    p = ModelParams(J=1.0, delta=0.1, gamma=0.19, N=20, boundary="open")
    ev = np.linalg.eigvals(build_nonhermitian(p))
    assert np.max(np.abs(ev.imag)) < 1e-8


def test_open_seam_has_edge_modes_at_plus_minus_i_gamma():
    # cutting the strong closing bond leaves weak ends and two edge states
    p = ModelParams(J=1.0, delta=0.3, gamma=0.1, N=20, boundary="open_seam")
    ev = np.linalg.eigvals(build_nonhermitian(p))
    edge = ev[np.argsort(-np.abs(ev.imag))[:2]]
    assert np.allclose(np.sort(edge.imag), [-0.1, 0.1], atol=1e-6)
    assert np.allclose(edge.real, 0.0, atol=1e-6)


def test_counterpart_and_uniform_ring_are_hermitian():
    H = build_hermitian_counterpart(0.9, 0.05, 0.2, 5)
    assert np.allclose(H, H.conj().T)
    assert np.array_equal(np.diag(H).real, 0.2 * np.array([-1, 1] * 5))
    U = uniform_ring(0.7, 4)
    assert np.allclose(np.diag(U, 1), -0.7) and U[-1, 0] == -0.7


@settings(max_examples=40, deadline=None)
@given(J=st.floats(0.2, 3.0), delta=st.floats(-0.95, 0.95), gamma=st.floats(0.0, 2.0),
       k=st.floats(0.0, 2 * np.pi))
def test_bloch_matrix_is_fourier_block(J, delta, gamma, k):
    N = 5
    kk = 2 * np.pi * round(k * N / (2 * np.pi)) / N
    p = ModelParams(J=J, delta=delta, gamma=gamma, N=N)
    H = build_nonhermitian(p)
    cells = np.arange(1, N + 1)
    phase = np.exp(1j * kk * cells) / np.sqrt(N)
    # A = odd site 2l-1, B = even site 2l
    basis = np.zeros((2 * N, 2), dtype=complex)
    basis[0::2, 0] = phase
    basis[1::2, 1] = phase
    assert np.allclose(basis.conj().T @ H @ basis, bloch_matrix(p, kk), atol=1e-12)


@pytest.mark.parametrize("bad", [
    dict(J=0.0), dict(J=-1.0), dict(gamma=-0.1), dict(N=1), dict(N=2.5),
    dict(delta=np.nan), dict(boundary="twisted"),
])
def test_invalid_params_rejected(bad):
    with pytest.raises((ValueError, TypeError)):
        ModelParams(**bad)


def test_is_unbroken_exact_at_threshold():
    p = ModelParams(J=1.0, delta=0.1, gamma=0.2)
    assert p.is_unbroken()
    assert not p.replace(gamma=np.nextafter(0.2, 1)).is_unbroken()
    assert p.gamma_c == 0.2
