"""Time evolution with two independent engines and the Dirac / biorthogonal norms.

The spectral engine rebuilds ``psi(t)`` from the analytic Bloch modes; the
direct engine applies ``exp(-iHt)`` to site amplitudes and knows nothing about
the analytic solution, which makes it the oracle for the first.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from ._validation import check_state, check_times
from .algebra import decompose

# lambda_k above this makes spectral reconstruction lose ~log10(lambda) digits
LAMBDA_WARN = 1e3
# cond(V) ~ 2 lambda_max near the exceptional point; an exactly defective
# block splits under roundoff into a pair with cond(V) ~ eps**-0.5 ~ 1e8
EIG_COND_WARN = 1e4
EIG_COND_MAX = 1e7


class ConditioningWarning(UserWarning):
    """Results are amplified by a near-defective (near exceptional point) spectrum."""


def _warn_near_exceptional(basis):
    if basis.max_lambda > LAMBDA_WARN:
        warnings.warn(
            f"max lambda_k = {basis.max_lambda:.3g}: near the exceptional point the "
            "spectral engine amplifies roundoff; cross-check with the direct engine",
            ConditioningWarning, stacklevel=3,
        )


def spectral_phases(decomp, times):
    """Coefficients at each time, ``(exp(i eps t) f, exp(-i eps t) g)`` stacked, shape (n_t, 2N)."""
    t = check_times(times)[:, None]
    eps = decomp.basis.eps[None, :]
    return np.concatenate([np.exp(1j * eps * t) * decomp.f, np.exp(-1j * eps * t) * decomp.g], axis=1)


def evolve_spectral(decomp, t):
    """Evolve a mode decomposition to time ``t`` (scalar or 1-D array).

    Returns amplitudes of shape ``(2N,)`` for scalar ``t`` and ``(n_t, 2N)`` otherwise.
    """
    _warn_near_exceptional(decomp.basis)
    scalar = np.ndim(t) == 0
    out = spectral_phases(decomp, t) @ decomp.basis.right.T
    return out[0] if scalar else out


def _eig_propagator_action(H, psi, times):
    w, V = scipy.linalg.eig(H)
    cond = np.linalg.cond(V)
    if cond > EIG_COND_MAX:
        raise ValueError(
            f"eigenvector matrix condition number {cond:.3g}: H is (nearly) defective, "
            "use method='expm'"
        )
    if cond > EIG_COND_WARN:
        warnings.warn(f"eigenvector condition number {cond:.3g}", ConditioningWarning, stacklevel=3)
    c = np.linalg.solve(V, psi)
    return (np.exp(-1j * np.outer(times, w)) * c) @ V.T


def _is_uniform(times):
    if len(times) < 3:
        return False
    d = np.diff(times)
    return bool(np.all(d > 0) and np.allclose(d, d[0], rtol=1e-12, atol=0.0))


def evolve_direct(H, state, t, method="expm"):
    """Apply ``exp(-i H t)`` to ``state`` without using the analytic solution.

    Parameters
    ----------
    H : (2N, 2N) array
        Any Hamiltonian matrix, either boundary, either phase.
    state : (2N,) array
    t : float or 1-D array
    method : {"expm", "eig"}
        ``"expm"`` uses scaling and squaring (``scipy.linalg.expm``, or
        ``expm_multiply`` for uniform time grids) and is valid for defective
        matrices. ``"eig"`` diagonalizes ``H`` and refuses ill-conditioned
        eigenvector matrices.

    Returns
    -------
    ndarray
        ``(2N,)`` for scalar ``t``, else ``(n_t, 2N)``.
    """
    H = np.asarray(H, dtype=complex)
    psi = check_state(state, H.shape[0])
    scalar = np.ndim(t) == 0
    times = check_times(t)
    if method == "eig":
        out = _eig_propagator_action(H, psi, times)
    elif method == "expm":
        if _is_uniform(times):
            out = expm_multiply(-1j * H, psi, start=times[0], stop=times[-1],
                                num=len(times), endpoint=True)
        else:
            out = np.array([scipy.linalg.expm(-1j * tt * H) @ psi for tt in times])
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[0] if scalar else out


def dirac_norm(states):
    """``sum_l |psi_l|^2`` along the last axis."""
    return np.sum(np.abs(np.asarray(states)) ** 2, axis=-1)


def dirac_norm_series_closed(decomp, times):
    """Closed-form Dirac norm of the evolved state.

    ``P_D(t) = sum_k (|f_k|^2 + |g_k|^2) sqrt(1 + lambda_k^2)
    + 2 sum_k lambda_k |g_k f_k| sin(2 eps_k t + varphi_k)``
    """
    t = check_times(times)[:, None]
    basis = decomp.basis
    lam = basis.lam.real
    eps = basis.eps.real
    const = np.sum((np.abs(decomp.f) ** 2 + np.abs(decomp.g) ** 2) * np.sqrt(1.0 + lam**2))
    amp = lam * np.abs(decomp.g * decomp.f)
    phase = np.nan_to_num(decomp.varphi)  # terms with g_k f_k = 0 vanish anyway
    return const + 2.0 * np.sum(amp * np.sin(2.0 * eps * t + phase), axis=1)


def fluctuation_bound(decomp):
    """Upper bound ``4 sum_k lambda_k |g_k f_k|`` on the peak-to-peak swing of ``P_D``."""
    return float(4.0 * np.sum(np.abs(decomp.basis.lam) * np.abs(decomp.g * decomp.f)))


def biorthogonal_norm(state_t, decomp, t):
    """Biorthogonal norm of ``state_t`` taken against the initial decomposition.

    ``P_B(t) = sum_k exp(-i eps t) f_k^* [alpha_k psi(t)] + exp(i eps t) g_k^* [beta_k psi(t)]``.
    This equals ``sum_k |f_k|^2 + |g_k|^2`` for every ``t`` when ``state_t``
    is the exact evolution of the decomposed state.
    """
    basis = decomp.basis
    states = np.atleast_2d(np.asarray(state_t, dtype=complex))
    times = check_times(t)
    proj = states @ basis.left.T  # (n_t, 2N)
    ph = spectral_phases(decomp, times).conj()
    val = np.sum(ph * proj, axis=1)
    return float(val[0].real) if np.ndim(t) == 0 else val.real


@dataclass(frozen=True)
class NormSeries:
    """Dirac and biorthogonal norms on a time grid.

    ``P_B`` is divided by the initial biorthogonal norm, so it equals 1 for
    exact evolution whatever the normalization of the input state.
    """

    times: np.ndarray
    P_D: np.ndarray
    P_B: np.ndarray
    engine: str


def norm_series(basis, state, times, engine="spectral", H=None):
    """Evolve ``state`` with the chosen engine and record ``P_D`` and ``P_B``."""
    times = check_times(times)
    decomp = decompose(state, basis)
    if engine == "spectral":
        states = evolve_spectral(decomp, times)
    elif engine == "direct":
        if H is None:
            from .model import build_nonhermitian
            H = build_nonhermitian(basis.params)
        states = evolve_direct(H, state, times)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    P_B = biorthogonal_norm(states, decomp, times) / decomp.biorthogonal_norm
    return NormSeries(times=times, P_D=dirac_norm(states), P_B=np.atleast_1d(P_B), engine=engine)
