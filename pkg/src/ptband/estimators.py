"""scikit-learn style wrappers.

Samples are single-particle states: ``X`` has shape ``(n_samples, 2N)`` with
complex site amplitudes. Model constants are constructor parameters, so the
estimators support ``get_params`` / ``set_params`` / ``clone``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_states, check_times
from .algebra import decompose
from .bloch import bloch_basis
from .dynamics import evolve_direct, evolve_spectral, norm_series, spectral_phases
from .model import Boundary, ModelParams, build_nonhermitian


class _ModelMixin:
    def _model_params(self, boundary=Boundary.PERIODIC):
        return ModelParams(J=self.J, delta=self.delta, gamma=self.gamma, N=self.N,
                           boundary=boundary)

    def _check_X(self, X):
        check_is_fitted(self)
        return check_states(X, self.n_features_in_)


class BlochBasisTransformer(_ModelMixin, TransformerMixin, BaseEstimator):
    """Map site amplitudes to biorthogonal mode coefficients ``[f_0..f_{N-1}, g_0..g_{N-1}]``.

    ``fit`` ignores ``X`` apart from a shape check; the basis depends only on
    the model constants.

    Attributes
    ----------
    basis_ : BlochBasis
    k_ : ndarray of shape (N,)
    energies_ : ndarray of shape (2N,)
        ``-eps_k`` for the f-columns, ``+eps_k`` for the g-columns.
    lambda_ : ndarray of shape (N,)
    """

    def __init__(self, N=100, J=1.0, delta=0.1, gamma=0.0):
        self.N = N
        self.J = J
        self.delta = delta
        self.gamma = gamma

    def fit(self, X=None, y=None):
        self.basis_ = bloch_basis(self._model_params())
        self.n_features_in_ = 2 * self.N
        if X is not None:
            check_states(X, self.n_features_in_)
        self.k_ = self.basis_.k
        self.energies_ = self.basis_.energies
        self.lambda_ = self.basis_.lam
        return self

    def transform(self, X):
        return self._check_X(X) @ self.basis_.left.T

    def inverse_transform(self, X):
        check_is_fitted(self)
        C = check_states(X, self.n_features_in_, name="coefficients")
        return C @ self.basis_.right.T


class SpectralPropagator(_ModelMixin, TransformerMixin, BaseEstimator):
    """Evolve states on the ring with the analytic Bloch solution.

    ``transform`` returns ``exp(-i H t) X`` row by row for the parameter ``t``.
    """

    def __init__(self, N=100, J=1.0, delta=0.1, gamma=0.0, t=0.0):
        self.N = N
        self.J = J
        self.delta = delta
        self.gamma = gamma
        self.t = t

    def fit(self, X=None, y=None):
        self.basis_ = bloch_basis(self._model_params())
        self.n_features_in_ = 2 * self.N
        if X is not None:
            check_states(X, self.n_features_in_)
        return self

    def transform(self, X):
        X = self._check_X(X)
        return self.trajectory(X, [self.t])[:, 0, :]

    def trajectory(self, X, times):
        """Evolved states, shape ``(n_samples, n_times, 2N)``."""
        X = self._check_X(X)
        times = check_times(times)
        out = []
        for x in X:
            out.append(evolve_spectral(decompose(x, self.basis_), times))
        return np.stack(out)

    def norm_series(self, x, times):
        check_is_fitted(self)
        return norm_series(self.basis_, x, times, engine="spectral")

    def coefficients(self, X, times):
        """Mode coefficients ``(exp(i eps t) f, exp(-i eps t) g)``, shape ``(n_samples, n_times, 2N)``."""
        X = self._check_X(X)
        return np.stack([spectral_phases(decompose(x, self.basis_), times) for x in X])


class DirectPropagator(_ModelMixin, TransformerMixin, BaseEstimator):
    """Evolve states with a dense matrix exponential; any boundary, any phase."""

    def __init__(self, N=100, J=1.0, delta=0.1, gamma=0.0, boundary="periodic", t=0.0,
                 method="expm"):
        self.N = N
        self.J = J
        self.delta = delta
        self.gamma = gamma
        self.boundary = boundary
        self.t = t
        self.method = method

    def fit(self, X=None, y=None):
        self.hamiltonian_ = build_nonhermitian(self._model_params(Boundary(self.boundary)))
        self.n_features_in_ = 2 * self.N
        if X is not None:
            check_states(X, self.n_features_in_)
        return self

    def transform(self, X):
        return self.trajectory(X, [self.t])[:, 0, :]

    def trajectory(self, X, times):
        X = self._check_X(X)
        times = check_times(times)
        return np.stack([
            np.atleast_2d(evolve_direct(self.hamiltonian_, x, times, method=self.method))
            for x in X
        ])
