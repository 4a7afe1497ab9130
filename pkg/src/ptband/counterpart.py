"""Hermitian dimerized rings with the same spectrum as the non-Hermitian one.

Matching ``eps_k`` for every ``k`` requires two equalities,

    J_e^2 (1 - delta_e^2) = J^2 (1 - delta^2)
    4 J_e^2 delta_e^2 + V_e^2 = 4 J^2 delta^2 - gamma^2,

the first fixing the overall scale (equivalently the band-edge energy at
``k = 0``) and the second reproducing the ratio condition between the two
distortions. What remains is a one-parameter family labelled by ``delta_e``.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_finite_scalar
from .model import Boundary, build_hermitian_counterpart


class NoCounterpartError(ValueError):
    """The spectrum is not real, so no Hermitian ring with real ``V_e`` reproduces it."""


@dataclass(frozen=True)
class CounterpartParams:
    Je: float
    delta_e: float
    Ve: float

    def __post_init__(self):
        object.__setattr__(self, "Je", check_finite_scalar(self.Je, "Je"))
        object.__setattr__(self, "delta_e", check_finite_scalar(self.delta_e, "delta_e"))
        object.__setattr__(self, "Ve", check_finite_scalar(self.Ve, "Ve"))

    def bloch_matrix(self, k):
        w = -self.Je * (1.0 - self.delta_e + (1.0 + self.delta_e) * np.exp(-1j * k))
        return np.array([[-self.Ve, w], [np.conj(w), self.Ve]], dtype=complex)

    def bloch_coefficients(self, k):
        """``(zeta_k, xi_k)`` of the lower-band mode; ``|zeta|^2 + |xi|^2 = 1``.

        The lower eigenvector of the Bloch matrix is ``(zeta^*, xi^*)``.
        """
        _, v = np.linalg.eigh(self.bloch_matrix(k))
        return complex(np.conj(v[0, 0])), complex(np.conj(v[1, 0]))

    def matrix(self, N, boundary=Boundary.PERIODIC):
        return build_hermitian_counterpart(self.Je, self.delta_e, self.Ve, N, boundary)


def counterpart_spectrum(cp, k):
    """``2 J_e sqrt[(1 - d_e^2) cos^2(k/2) + d_e^2 + (V_e / 2 J_e)^2]``."""
    cos2 = np.cos(np.asarray(k, dtype=float) / 2.0) ** 2
    return 2.0 * cp.Je * np.sqrt(
        (1.0 - cp.delta_e**2) * cos2 + cp.delta_e**2 + (cp.Ve / (2.0 * cp.Je)) ** 2
    )


@dataclass(frozen=True)
class CounterpartFamily:
    """All ``(J_e, delta_e, V_e)`` with ``V_e >= 0`` matching a given unbroken model.

    ``delta_e`` ranges over ``[0, delta_e_max]`` (with the sign of ``delta``);
    ``delta_e = 0`` gives ``V_e = Delta`` and ``delta_e = delta_e_max`` gives
    ``V_e = 0``.
    """

    params: object

    @property
    def gap_squared(self):
        a = 2.0 * self.params.J * abs(self.params.delta)
        return (a - self.params.gamma) * (a + self.params.gamma)

    @property
    def delta_e_max(self):
        p = self.params
        return float(np.sqrt(self.gap_squared / (4.0 * p.J**2 - p.gamma**2)))

    def member(self, delta_e):
        p = self.params
        delta_e = check_finite_scalar(delta_e, "delta_e")
        if abs(delta_e) > self.delta_e_max * (1.0 + 1e-12):
            raise ValueError(f"|delta_e| must not exceed {self.delta_e_max}")
        Je = p.J * np.sqrt((1.0 - p.delta**2) / (1.0 - delta_e**2))
        Ve2 = self.gap_squared - 4.0 * Je**2 * delta_e**2
        return CounterpartParams(Je=Je, delta_e=delta_e, Ve=float(np.sqrt(max(Ve2, 0.0))))

    @property
    def canonical(self):
        """The ``V_e = 0`` member: ``J_e = sqrt(J^2 - gamma^2/4)``."""
        return self.member(np.copysign(self.delta_e_max, self.params.delta or 1.0))

    def sample(self, n=5):
        sign = np.copysign(1.0, self.params.delta or 1.0)
        return [self.member(sign * d) for d in np.linspace(0.0, self.delta_e_max, n)]


def equivalence_map(params, verify=True, tol=1e-10):
    """Family of Hermitian counterparts of an unbroken model.

    With ``verify`` the canonical member and both ends of the family are
    checked against the non-Hermitian spectrum on the momentum grid.

    Raises
    ------
    NoCounterpartError
        If ``4 J^2 delta^2 < gamma^2`` or ``|delta| >= 1``.
    """
    if not params.is_unbroken():
        raise NoCounterpartError(
            f"gamma = {params.gamma} exceeds gamma_c = {params.gamma_c}: complex spectrum"
        )
    if abs(params.delta) >= 1.0:
        raise NoCounterpartError("|delta| >= 1 leaves no real J_e")
    family = CounterpartFamily(params)
    if verify:
        from .bloch import band_energy, momentum_grid
        k = momentum_grid(params.N)
        target = band_energy(params, k).real
        for cp in (family.canonical, *family.sample(2)):
            err = np.max(np.abs(counterpart_spectrum(cp, k) - target))
            if err > tol * params.J:
                raise AssertionError(f"counterpart {cp} misses the spectrum by {err:.3g}")
    return family
