import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptband.counterpart import (
    CounterpartFamily,
    CounterpartParams,
    NoCounterpartError,
    counterpart_spectrum,
    equivalence_map,
)
from ptband.model import ModelParams, build_nonhermitian


def test_exceptional_point_maps_to_uniform_ring():
    fam = equivalence_map(ModelParams(J=1.0, delta=0.1, gamma=0.2, N=100))
    c = fam.canonical
    assert c.Je == pytest.approx(0.99498744, abs=1e-8)
    assert c.delta_e == 0.0 and c.Ve == 0.0
    assert fam.delta_e_max == 0.0


def test_canonical_member_closed_form():
    # V_e = 0 member: J_e^2 = J^2 - gamma^2 / 4
    fam = equivalence_map(ModelParams(J=1.0, delta=0.1, gamma=0.15, N=20))
    assert fam.canonical.Je == pytest.approx(np.sqrt(1 - 0.15**2 / 4), rel=1e-14)
    assert fam.canonical.Ve == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(2, 15), J=st.floats(0.3, 3.0), delta=st.floats(-0.9, 0.9),
       frac=st.floats(0.0, 0.98), pick=st.floats(0.0, 1.0))
def test_family_matches_brute_force_spectrum(N, J, delta, frac, pick):
    p = ModelParams(J=J, delta=delta, gamma=frac * 2 * J * abs(delta), N=N)
    fam = CounterpartFamily(p)
    member = fam.member(np.copysign(pick * fam.delta_e_max, delta or 1.0))
    ev_h = np.sort(np.linalg.eigvalsh(member.matrix(N)))
    ev_nh = np.sort(np.linalg.eigvals(build_nonhermitian(p)).real)
    assert np.allclose(ev_h, ev_nh, atol=1e-9 * J)


def test_bloch_coefficients_diagonalize():
    c = CounterpartParams(Je=0.9, delta_e=0.05, Ve=0.1)
    for k in np.linspace(0, 2 * np.pi, 7):
        zeta, xi = c.bloch_coefficients(k)
        v = np.conj([zeta, xi])
        assert abs(zeta) ** 2 + abs(xi) ** 2 == pytest.approx(1.0)
        e = counterpart_spectrum(c, k)
        assert np.allclose(c.bloch_matrix(k) @ v, -e * v, atol=1e-12)


def test_broken_phase_has_no_counterpart():
    with pytest.raises(NoCounterpartError):
        equivalence_map(ModelParams(delta=0.1, gamma=0.3))


def test_member_out_of_range():
    fam = CounterpartFamily(ModelParams(delta=0.1, gamma=0.1))
    with pytest.raises(ValueError):
        fam.member(2 * fam.delta_e_max)
    ends = fam.sample(2)
    assert ends[0].delta_e == 0.0 and ends[0].Ve == pytest.approx(np.sqrt(0.03))
