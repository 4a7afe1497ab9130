"""Dense single-particle Hamiltonians for the dimerized ring with staggered potentials.

Sites are labelled ``l = 1, ..., 2N`` in the docstrings; arrays are 0-based, so
array index ``i`` holds site ``l = i + 1`` and every parity factor ``(-1)**l``
is evaluated with the 1-based label.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_finite_scalar, check_n_cells


class Boundary(str, Enum):
    """Lattice closure.

    ``OPEN`` is the ring cut at a weak bond so that both chain ends terminate
    on strong bonds. ``OPEN_SEAM`` removes the ``2N <-> 1`` bond whatever its
    strength; for ``delta > 0`` that bond is strong, the ends are weak, and the
    chain carries edge modes at ``+-i gamma`` (PT broken for every
    ``gamma > 0``).
    """

    PERIODIC = "periodic"
    OPEN = "open"
    OPEN_SEAM = "open_seam"


@dataclass(frozen=True)
class ModelParams:
    """Coupling constants and lattice size of the non-Hermitian ring.

    Parameters
    ----------
    J : float
        Hopping energy, ``J > 0``.
    delta : float
        Dimensionless bond distortion; bond ``(l, l+1)`` has strength
        ``J * (1 + (-1)**l * delta)``.
    gamma : float
        Magnitude of the staggered imaginary potential ``i*gamma*(-1)**l``.
    N : int
        Number of two-site unit cells (``2N`` sites).
    boundary : Boundary
        ``PERIODIC`` closes the ring with the ``2N -> 1`` bond.
    """

    J: float = 1.0
    delta: float = 0.1
    gamma: float = 0.0
    N: int = 100
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "J", check_finite_scalar(self.J, "J"))
        object.__setattr__(self, "delta", check_finite_scalar(self.delta, "delta"))
        object.__setattr__(self, "gamma", check_finite_scalar(self.gamma, "gamma"))
        object.__setattr__(self, "N", check_n_cells(self.N))
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if self.J <= 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    @property
    def n_sites(self):
        return 2 * self.N

    @property
    def gamma_c(self):
        """Critical potential ``2 J |delta|`` where the gap closes."""
        return 2.0 * self.J * abs(self.delta)

    def is_unbroken(self):
        # factored form so that gamma == 2*J*delta lands exactly on zero
        a = 2.0 * self.J * abs(self.delta)
        return (a - self.gamma) * (a + self.gamma) >= 0.0

    def replace(self, **changes):
        fields = dict(J=self.J, delta=self.delta, gamma=self.gamma, N=self.N,
                      boundary=self.boundary)
        fields.update(changes)
        return ModelParams(**fields)


def _parity_signs(n_sites):
    # (-1)**l for the 1-based labels l = 1..2N
    return np.where(np.arange(1, n_sites + 1) % 2 == 0, 1.0, -1.0)


def _dimerized_matrix(J, delta, onsite, n_sites, boundary):
    signs = _parity_signs(n_sites)
    H = np.diag(onsite.astype(complex))
    # bond between l and l+1 carries the parity of l
    bonds = -J * (1.0 + signs * delta)
    idx = np.arange(n_sites - 1)
    H[idx, idx + 1] = bonds[:-1]
    H[idx + 1, idx] = bonds[:-1]
    if Boundary(boundary) is Boundary.PERIODIC:
        H[n_sites - 1, 0] = bonds[-1]
        H[0, n_sites - 1] = bonds[-1]
    H.setflags(write=False)
    return H


def _open_chain(J, delta, onsite, n_sites):
    if delta > 0:
        # seam bond is strong: cut the weak bond (1, 2) instead and list the
        # chain in physical order 2, 3, ..., 2N, 1
        order = np.roll(np.arange(n_sites), -1)
        ring = _dimerized_matrix(J, delta, onsite, n_sites, Boundary.PERIODIC).copy()
        ring[0, 1] = ring[1, 0] = 0.0
        H = ring[np.ix_(order, order)]
        H.setflags(write=False)
        return H
    return _dimerized_matrix(J, delta, onsite, n_sites, Boundary.OPEN_SEAM)


def _build(J, delta, onsite, n_sites, boundary):
    if Boundary(boundary) is Boundary.OPEN:
        return _open_chain(J, delta, onsite, n_sites)
    return _dimerized_matrix(J, delta, onsite, n_sites, boundary)


def build_nonhermitian(params):
    """Return the ``2N x 2N`` non-Hermitian Hamiltonian matrix.

    Off-diagonal entries are ``-J[1 + (-1)**l delta]`` on the bond ``(l, l+1)``
    and the diagonal is ``i gamma (-1)**l``. ``OPEN_SEAM`` drops only the
    ``2N <-> 1`` bond. ``OPEN`` drops a weak bond; for ``delta > 0`` this is
    ``(1, 2)`` and rows are reordered so array index ``i`` is the ``i``-th site
    along the chain (ring site ``i + 2``, with ring site 1 last).

    The returned array is read-only.
    """
    if not isinstance(params, ModelParams):
        raise TypeError("params must be a ModelParams instance")
    n = params.n_sites
    onsite = 1j * params.gamma * _parity_signs(n)
    return _build(params.J, params.delta, onsite, n, params.boundary)


def build_hermitian_counterpart(Je, delta_e, Ve, N, boundary=Boundary.PERIODIC):
    """Return the Hermitian dimerized ring with real staggered potential ``Ve (-1)**l``."""
    Je = check_finite_scalar(Je, "Je")
    delta_e = check_finite_scalar(delta_e, "delta_e")
    Ve = check_finite_scalar(Ve, "Ve")
    N = check_n_cells(N)
    n = 2 * N
    return _build(Je, delta_e, Ve * _parity_signs(n), n, boundary)


def uniform_ring(Je, N, boundary=Boundary.PERIODIC):
    """Uniform ring (or chain) with hopping ``-Je``, the gapless equivalent system."""
    return build_hermitian_counterpart(Je, 0.0, 0.0, N, boundary)


def parity_matrix(n_sites):
    """Permutation ``l -> 2N + 1 - l``."""
    return np.eye(n_sites)[::-1].copy()


def two_site_shift(n_sites):
    """Cyclic translation by one unit cell, ``l -> l + 2`` (mod ``2N``)."""
    return np.roll(np.eye(n_sites), 2, axis=0)


def pt_residual(H):
    """Return ``max |P conj(H) P - H|``; zero for a PT-symmetric matrix."""
    P = parity_matrix(H.shape[0])
    return float(np.max(np.abs(P @ H.conj() @ P - H)))


def bloch_matrix(params, k):
    """2x2 Bloch Hamiltonian in the (A, B) sublattice basis at cell momentum ``k``.

    A is the odd site ``2l - 1`` and B the even site ``2l`` of cell ``l``.
    """
    J, d, g = params.J, params.delta, params.gamma
    w = -J * (1.0 - d + (1.0 + d) * np.exp(-1j * k))
    return np.array([[-1j * g, w], [np.conj(w), 1j * g]], dtype=complex)
