"""Gaussian wave packets, their band content and packet observables."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_finite_scalar, check_states
from .algebra import ModeDecomposition
from .bloch import mode_phase, _coefficients
from .model import Boundary


def effective_hopping(params):
    """``J_e = J sqrt(1 - delta^2)``, hopping of the gapless equivalent uniform ring."""
    return params.J * np.sqrt(1.0 - params.delta**2)


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian ``exp(-alpha^2 (l - N_A)^2 / 2) exp(i k0 l)`` centred on site ``N_A`` (1-based)."""

    alpha: float = 0.1
    k0: float = 0.0
    N_A: int = 100

    def __post_init__(self):
        alpha = check_finite_scalar(self.alpha, "alpha")
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "k0", check_finite_scalar(self.k0, "k0"))

    def displacement(self, N, boundary=Boundary.PERIODIC):
        """Signed distance ``l - N_A`` of every site; minimal image on the ring."""
        n = 2 * N
        d = np.arange(1, n + 1) - self.N_A
        if Boundary(boundary) is Boundary.PERIODIC:
            d = (d + N) % n - N
        return d

    def omega1(self, N, boundary=Boundary.PERIODIC):
        """Normalization sum ``sum_l exp(-alpha^2 (l - N_A)^2)``."""
        d = self.displacement(N, boundary)
        return float(np.sum(np.exp(-(self.alpha * d) ** 2)))

    def prefactor(self, N, boundary=Boundary.PERIODIC):
        """``Lambda = exp(i N_A k0) sqrt(pi / (4 alpha^2 N Omega_1))``."""
        return np.exp(1j * self.N_A * self.k0) * np.sqrt(
            np.pi / (4.0 * self.alpha**2 * N * self.omega1(N, boundary))
        )


def build_gaussian(spec, N, boundary=Boundary.PERIODIC):
    """Dirac-normalized Gaussian packet on ``2N`` sites.

    On the ring the envelope and the plane-wave phase both use the
    minimal-image position ``N_A + d`` so the packet has no seam.
    """
    d = spec.displacement(N, boundary)
    psi = np.exp(-0.5 * (spec.alpha * d) ** 2 + 1j * spec.k0 * (spec.N_A + d))
    return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class EtaCoefficients:
    k: np.ndarray
    eta_plus: np.ndarray
    eta_minus: np.ndarray


def eta_coefficients(params, k):
    """Band amplitudes of a plane wave, ``eta_k^+`` (lower) and ``eta_k^-`` (upper).

    ``eta^pm = pm exp(i phi/2) exp(-i k/2) sqrt(1 pm i lambda) + exp(-i phi/2) sqrt(1 mp i lambda)``.

    ``k`` may lie outside ``[0, 2 pi)``: ``phi_k`` and ``lambda_k`` only depend
    on ``k mod 2 pi`` but the factor ``exp(-i k/2)`` does not, and the packet
    expansion needs the representative closest to ``2 k0``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    c = _coefficients(params, np.mod(k, 2.0 * np.pi))
    if np.any(c["exceptional"]):
        from .bloch import ExceptionalModeError
        raise ExceptionalModeError(f"exceptional momenta {k[c['exceptional']]}")
    lam = c["lam"]
    phi = mode_phase(params, np.mod(k, 2.0 * np.pi))
    a = np.exp(0.5j * phi) * np.exp(-0.5j * k)
    b = np.exp(-0.5j * phi)
    sp = np.sqrt(1.0 + 1j * lam)
    sm = np.sqrt(1.0 - 1j * lam)
    return EtaCoefficients(k=k, eta_plus=a * sp + b * sm, eta_minus=-a * sm + b * sp)


def nearest_representative(k, center):
    """The member of ``k + 2 pi Z`` closest to ``center``."""
    return center + (np.asarray(k) - center + np.pi) % (2.0 * np.pi) - np.pi


def packet_decomposition(spec, basis):
    """Band expansion of a Gaussian packet in closed form.

    ``f_k = Lambda exp(-(k - 2k0)^2 / (8 alpha^2)) exp(-i N_A k / 2) eta_k^+``,
    ``g_k`` likewise with ``eta_k^-``. This replaces the exact lattice sum by a
    Gaussian integral, so it agrees with :func:`ptband.algebra.decompose` only
    up to corrections that vanish as ``alpha -> 0``.
    """
    params = basis.params
    N = basis.N
    k_eff = nearest_representative(basis.k, 2.0 * spec.k0)
    eta = eta_coefficients(params, k_eff)
    env = (spec.prefactor(N, params.boundary)
           * np.exp(-((k_eff - 2.0 * spec.k0) ** 2) / (8.0 * spec.alpha**2))
           * np.exp(-0.5j * spec.N_A * k_eff))
    return ModeDecomposition(env * eta.eta_plus, env * eta.eta_minus, basis)


def band_weights(decomp):
    """Fraction of ``sum |f|^2 + |g|^2`` carried by the lower and the upper band."""
    wf = np.sum(np.abs(decomp.f) ** 2)
    wg = np.sum(np.abs(decomp.g) ** 2)
    return wf / (wf + wg), wg / (wf + wg)


@dataclass(frozen=True)
class CharacteristicTimes:
    Je: float
    T_rev: float
    T_cir: float
    v_half_pi: float


def revival_time(params):
    """``T_rev = 2 N^2 / (pi J_e)``, from the curvature ``|eps''(0)| = J_e / 2`` at the gapless point."""
    return 2.0 * params.N**2 / (np.pi * effective_hopping(params))


def circling_period(params):
    """Return ``(T_cir, v)`` with group velocity ``v = |eps'(pi)| = J_e`` and ``T_cir = N / v``."""
    v = effective_hopping(params)
    return params.N / v, v


def characteristic_times(params):
    T_cir, v = circling_period(params)
    return CharacteristicTimes(Je=effective_hopping(params), T_rev=revival_time(params),
                               T_cir=T_cir, v_half_pi=v)


@dataclass(frozen=True)
class PacketObservables:
    """Per-time packet statistics over sites (1-based positions)."""

    center: np.ndarray
    width: np.ndarray
    fidelity: np.ndarray
    norm: np.ndarray


def site_probabilities(states):
    """Dirac probability per site, normalized to unit sum per row."""
    p = np.abs(check_states(states)) ** 2
    return p / p.sum(axis=1, keepdims=True)


def packet_metrics(states, boundary=Boundary.PERIODIC, initial=None):
    """Center, width and revival fidelity of a sequence of states.

    On the ring the center and width are the circular mean and circular
    standard deviation of the site distribution (so a packet crossing the
    seam does not jump); on the open chain they are the plain mean and
    standard deviation. Fidelity is ``|<psi_0|psi_t>|^2 / (|psi_0|^2 |psi_t|^2)``
    with ``psi_0 = initial`` or the first row.
    """
    X = check_states(states)
    n = X.shape[1]
    norm = np.sum(np.abs(X) ** 2, axis=1)
    p = np.abs(X) ** 2 / norm[:, None]
    sites = np.arange(1, n + 1)
    if Boundary(boundary) is Boundary.PERIODIC:
        theta = 2.0 * np.pi * (sites - 1) / n
        z = p @ np.exp(1j * theta)
        pos = np.mod(np.angle(z) * n / (2.0 * np.pi), n)
        center = 1.0 + np.where(pos >= n, pos - n, pos)  # mod of -0.0 rounds up to n
        R = np.clip(np.abs(z), 1e-300, 1.0)
        width = np.sqrt(-2.0 * np.log(R)) * n / (2.0 * np.pi)
    else:
        center = p @ sites
        width = np.sqrt(np.maximum(p @ sites**2 - center**2, 0.0))
    psi0 = X[0] if initial is None else np.asarray(initial, dtype=complex)
    overlap = X @ psi0.conj()
    fidelity = np.abs(overlap) ** 2 / (norm * np.vdot(psi0, psi0).real)
    return PacketObservables(center=center, width=width, fidelity=fidelity, norm=norm)


def ring_distance(a, b, n_sites):
    """Minimal-image distance between positions on a ring of ``n_sites``."""
    d = np.mod(np.asarray(a) - np.asarray(b), n_sites)
    return np.minimum(d, n_sites - d)


def profile_distance(states_a, states_b):
    """l2 distance between the normalized site-probability profiles, per time."""
    return np.linalg.norm(site_probabilities(states_a) - site_probabilities(states_b), axis=1)
