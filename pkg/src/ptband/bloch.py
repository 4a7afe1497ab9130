"""Analytic momentum-space solution of the periodic ring.

Each cell momentum ``k = 2 pi n / N`` carries a lower-band right mode
``alpha_bar`` with energy ``-eps_k`` and an upper-band right mode ``beta_bar``
with energy ``+eps_k``; the matching left modes ``alpha``, ``beta`` are
biorthogonal to them. Right modes are columns of length ``2N``, left modes are
rows, so ``alpha @ alpha_bar == 1``.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import Boundary, bloch_matrix

TOL_EXCEPTIONAL = 1e-8
_VALIDATION_RTOL = 1e-9


class ExceptionalModeError(ValueError):
    """A Bloch mode sits at (or numerically on) an exceptional point, eps_k ~ 0."""


def momentum_grid(N):
    """Cell momenta ``2 pi n / N``; the ratio is formed first so ``k = pi`` is exact."""
    return np.pi * (2.0 * np.arange(N) / N)


def band_energy_squared(params, k):
    """``eps_k**2``; exactly zero at ``k = pi`` when ``gamma == 2 J |delta|``."""
    J, d, g = params.J, params.delta, params.gamma
    a = 2.0 * J * abs(d)
    cos2 = np.cos(np.asarray(k, dtype=float) / 2.0) ** 2
    return 4.0 * J**2 * (1.0 - d**2) * cos2 + (a - g) * (a + g)


def band_energy(params, k):
    """Band energy ``eps_k = 2J sqrt[(1-d^2) cos^2(k/2) + d^2 - (gamma/2J)^2]``.

    Returned as a complex array; it is purely imaginary for momenta in the
    broken phase. The principal square root is used, so ``eps_k >= 0`` when real.
    """
    return np.sqrt(band_energy_squared(params, k) + 0j)


def _broken_threshold(params):
    return 64.0 * np.finfo(float).eps * (2.0 * params.J) ** 2


def mode_phase(params, k):
    """Phase ``phi_k`` in ``[0, 2 pi)``.

    Equal to ``k/2 + arctan(delta tan(k/2))`` below ``k = pi`` and the same plus
    ``pi`` above it; ``atan2`` keeps the expression continuous through
    ``k = pi`` and valid for ``delta <= 0``.
    """
    k = np.asarray(k, dtype=float)
    half = k / 2.0
    phi = half + np.arctan2(params.delta * np.sin(half), np.cos(half))
    return np.mod(phi, 2.0 * np.pi)


def _coefficients(params, k):
    """Vectorized eps, lambda, phi and transformation coefficients.

    Entries with ``|eps_k| < TOL_EXCEPTIONAL * J`` are returned as NaN along
    with a boolean mask.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    eps = band_energy(params, k)
    # eps = 0 with gamma = 0 is an ordinary Hermitian degeneracy, not a Jordan block
    small = np.abs(eps) < TOL_EXCEPTIONAL * params.J
    exceptional = small & (params.gamma != 0.0)
    safe_eps = np.where(small, 1.0, eps)
    lam = np.where(exceptional, np.nan, np.where(small, 0.0, params.gamma / safe_eps))
    phi = mode_phase(params, k)
    cos_t = np.sqrt((1.0 + 1j * lam) / 2.0)
    sin_t = np.sqrt((1.0 - 1j * lam) / 2.0)

    ok = _eigen_residual_ok(params, k, eps, cos_t, sin_t, phi)
    # branch guard: the closed form fixes sin(theta) only up to sign
    flip = ~ok & ~exceptional
    if np.any(flip):
        sin_t = np.where(flip, -sin_t, sin_t)
        ok = _eigen_residual_ok(params, k, eps, cos_t, sin_t, phi)
        bad = ~ok & ~exceptional
        if np.any(bad):
            raise RuntimeError(
                f"Bloch modes failed the eigen-equation check at k = {k[bad]}"
            )

    ep = np.exp(0.5j * phi)
    mu = cos_t * ep
    mu_bar = cos_t / ep
    nu = sin_t / ep
    nu_bar = sin_t * ep
    return dict(k=k, eps=eps, lam=lam, phi=phi, mu=mu, mu_bar=mu_bar, nu=nu,
                nu_bar=nu_bar, exceptional=exceptional)


def _eigen_residual_ok(params, k, eps, cos_t, sin_t, phi):
    ep = np.exp(0.5j * phi)
    mu, mu_bar, nu, nu_bar = cos_t * ep, cos_t / ep, sin_t / ep, sin_t * ep
    h = np.array([bloch_matrix(params, kk) for kk in k])
    right_a = np.stack([mu_bar, nu_bar], axis=-1)
    right_b = np.stack([-nu, mu], axis=-1)
    left_a = np.stack([mu, nu], axis=-1)
    left_b = np.stack([-nu_bar, mu_bar], axis=-1)
    e = eps[:, None]
    res = np.stack([
        np.einsum("kij,kj->ki", h, right_a) + e * right_a,
        np.einsum("kij,kj->ki", h, right_b) - e * right_b,
        np.einsum("ki,kij->kj", left_a, h) + e * left_a,
        np.einsum("ki,kij->kj", left_b, h) - e * left_b,
    ])
    res = np.max(np.abs(res), axis=(0, 2))
    scale = (np.abs(eps) + np.max(np.abs(h), axis=(1, 2))) * (1.0 + np.abs(cos_t) + np.abs(sin_t))
    with np.errstate(invalid="ignore"):
        return res <= _VALIDATION_RTOL * scale


def _site_vectors(N, k, mu, mu_bar, nu, nu_bar):
    """Right modes as columns and left modes as rows, ordered [alpha..., beta...]."""
    cells = np.arange(1, N + 1)
    E = np.exp(1j * np.outer(cells, k)) / np.sqrt(N)  # (cell, k)
    m = len(k)
    right = np.empty((2 * N, 2 * m), dtype=complex)
    right[0::2, :m] = E * mu_bar
    right[1::2, :m] = E * nu_bar
    right[0::2, m:] = E * (-nu)
    right[1::2, m:] = E * mu
    Ec = E.conj().T  # (k, cell)
    left = np.empty((2 * m, 2 * N), dtype=complex)
    left[:m, 0::2] = mu[:, None] * Ec
    left[:m, 1::2] = nu[:, None] * Ec
    left[m:, 0::2] = -nu_bar[:, None] * Ec
    left[m:, 1::2] = mu_bar[:, None] * Ec
    return right, left


def _check_periodic(params):
    if params.boundary is not Boundary.PERIODIC:
        raise ValueError("the Bloch solution requires a periodic ring")


def _snap_to_grid(k, N):
    n = np.mod(k, 2.0 * np.pi) * N / (2.0 * np.pi)
    n_int = int(np.rint(n)) % N
    if abs(n - np.rint(n)) > 1e-9:
        raise ValueError(f"k = {k} is not on the momentum grid 2*pi*n/{N}")
    return np.pi * (2.0 * n_int / N)


@dataclass(frozen=True)
class BlochMode:
    k: float
    eps_k: complex
    lambda_k: complex
    phi_k: float
    mu: complex
    mu_bar: complex
    nu: complex
    nu_bar: complex
    is_exceptional: bool
    alpha_bar_vec: np.ndarray = field(default=None, repr=False)
    beta_bar_vec: np.ndarray = field(default=None, repr=False)
    alpha_vec: np.ndarray = field(default=None, repr=False)
    beta_vec: np.ndarray = field(default=None, repr=False)

    @property
    def cos_theta(self):
        return self.mu * np.exp(-0.5j * self.phi_k)

    @property
    def sin_theta(self):
        return self.nu * np.exp(0.5j * self.phi_k)


def solve_bloch(params, k):
    """Solve the ring at one grid momentum.

    An exceptional momentum (``|eps_k| < 1e-8 J``) is not an error here: the
    returned mode has ``is_exceptional=True``, NaN coefficients and no vectors.
    Use :func:`bloch_basis` when a complete basis is required.
    """
    _check_periodic(params)
    k = _snap_to_grid(k, params.N)
    c = _coefficients(params, [k])
    scalars = {name: c[name][0] for name in ("eps", "lam", "phi", "mu", "mu_bar", "nu", "nu_bar")}
    exceptional = bool(c["exceptional"][0])
    vectors = {}
    if not exceptional:
        right, left = _site_vectors(params.N, c["k"], c["mu"], c["mu_bar"], c["nu"], c["nu_bar"])
        for arr in (right, left):
            arr.setflags(write=False)
        vectors = dict(alpha_bar_vec=right[:, 0], beta_bar_vec=right[:, 1],
                       alpha_vec=left[0], beta_vec=left[1])
    return BlochMode(
        k=k, eps_k=complex(scalars["eps"]), lambda_k=complex(scalars["lam"]),
        phi_k=float(scalars["phi"]), mu=complex(scalars["mu"]),
        mu_bar=complex(scalars["mu_bar"]), nu=complex(scalars["nu"]),
        nu_bar=complex(scalars["nu_bar"]), is_exceptional=exceptional, **vectors,
    )


@dataclass(frozen=True)
class BlochBasis:
    """All Bloch modes of a ring, stacked.

    ``right`` has the modes as columns ``[alpha_bar_0 .. alpha_bar_{N-1},
    beta_bar_0 .. beta_bar_{N-1}]``; ``left`` has the matching rows, so that
    ``left @ right`` is the identity.
    """

    params: object
    k: np.ndarray
    eps: np.ndarray
    lam: np.ndarray
    phi: np.ndarray
    mu: np.ndarray
    mu_bar: np.ndarray
    nu: np.ndarray
    nu_bar: np.ndarray
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)

    @property
    def N(self):
        return len(self.k)

    @property
    def energies(self):
        """Eigenvalues in the column order of ``right``: ``-eps`` then ``+eps``."""
        return np.concatenate([-self.eps, self.eps])

    @property
    def max_lambda(self):
        return float(np.max(np.abs(self.lam)))


def bloch_basis(params):
    """Assemble the full biorthogonal Bloch basis of a periodic ring.

    Raises
    ------
    ExceptionalModeError
        If any grid momentum is exceptional.
    """
    _check_periodic(params)
    c = _coefficients(params, momentum_grid(params.N))
    if np.any(c["exceptional"]):
        raise ExceptionalModeError(
            f"exceptional momenta {c['k'][c['exceptional']]} (eps_k ~ 0); "
            "the Hamiltonian is a Jordan block there"
        )
    right, left = _site_vectors(params.N, c["k"], c["mu"], c["mu_bar"], c["nu"], c["nu_bar"])
    arrays = {name: c[name] for name in ("k", "eps", "lam", "phi", "mu", "mu_bar", "nu", "nu_bar")}
    for arr in (*arrays.values(), right, left):
        arr.setflags(write=False)
    return BlochBasis(params=params, right=right, left=left, **arrays)


@dataclass(frozen=True)
class SpectrumSummary:
    gap: complex
    gamma_c: float
    k: np.ndarray
    eps: np.ndarray
    broken_ks: np.ndarray
    exceptional_ks: np.ndarray

    @property
    def is_unbroken(self):
        return len(self.broken_ks) == 0


def spectrum_summary(params):
    """Gap, critical potential and the broken / exceptional momenta on the grid."""
    k = momentum_grid(params.N)
    eps2 = band_energy_squared(params, k)
    eps = np.sqrt(eps2 + 0j)
    a = 2.0 * params.J * abs(params.delta)
    gap = np.sqrt((a - params.gamma) * (a + params.gamma) + 0j)
    broken = eps2 < -_broken_threshold(params)
    exceptional = (np.abs(eps) < TOL_EXCEPTIONAL * params.J) & ~broken & (params.gamma != 0.0)
    return SpectrumSummary(gap=complex(gap), gamma_c=a, k=k, eps=eps,
                           broken_ks=k[broken], exceptional_ks=k[exceptional])


@dataclass(frozen=True)
class JordanReport:
    k: float
    matrix: np.ndarray = field(repr=False)
    eigenvalues: tuple
    algebraic_multiplicity: int
    geometric_multiplicity: int

    @property
    def is_defective(self):
        return self.geometric_multiplicity < self.algebraic_multiplicity


def verify_jordan_block(params, k=np.pi, tol=None):
    """Check whether the 2x2 Bloch matrix at ``k`` is defective.

    Eigenvalues closer than ``2 * tol`` (default ``1e-8 J``, the same
    threshold that flags ``|eps_k| ~ 0``) count as one degenerate eigenvalue;
    its geometric multiplicity is ``2 - rank(h - lambda)`` with singular
    values below ``tol`` treated as zero.
    """
    if tol is None:
        tol = TOL_EXCEPTIONAL * params.J
    h = bloch_matrix(params, k)
    tr = np.trace(h)
    det = np.linalg.det(h)
    root = np.sqrt(tr**2 / 4.0 - det + 0j)
    ev = (tr / 2.0 - root, tr / 2.0 + root)
    if abs(ev[1] - ev[0]) < 2.0 * tol:
        lam = tr / 2.0
        s = np.linalg.svd(h - lam * np.eye(2), compute_uv=False)
        rank = int(np.sum(s > tol))
        return JordanReport(k=float(k), matrix=h, eigenvalues=(complex(lam), complex(lam)),
                            algebraic_multiplicity=2, geometric_multiplicity=2 - rank)
    return JordanReport(k=float(k), matrix=h, eigenvalues=(complex(ev[0]), complex(ev[1])),
                        algebraic_multiplicity=1, geometric_multiplicity=1)
