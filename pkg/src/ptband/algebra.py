"""Commutation relations and biorthogonal projections in the one-particle sector.

A ladder operator that is linear in the site operators is fixed by one vector:
an annihilator ``sum_l u_l a_l`` by the row ``u`` and a creator
``sum_l v_l a_l^dagger`` by the column ``v``. Between one annihilator and one
creator the (anti)commutator is the c-number ``u @ v``; two annihilators or
two creators always (anti)commute. Every relation below reduces to these
inner products, for bosons and fermions alike.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_state
from .bloch import bloch_basis

ANNIHILATION = "annihilation"
CREATION = "creation"


@dataclass(frozen=True)
class LadderFamily:
    """A set of ladder operators sharing one kind; ``vectors[i]`` defines operator i."""

    name: str
    kind: str
    vectors: np.ndarray

    @property
    def dagger(self):
        kind = CREATION if self.kind == ANNIHILATION else ANNIHILATION
        name = self.name[:-1] if self.name.endswith("+") else self.name + "+"
        return LadderFamily(name, kind, self.vectors.conj())


def commutator(A, B, statistics="boson"):
    """Matrix of ``[A_i, B_j]`` (boson) or ``[A_i, B_j]_+`` (fermion)."""
    if statistics not in ("boson", "fermion"):
        raise ValueError(f"unknown statistics {statistics!r}")
    n, m = len(A.vectors), len(B.vectors)
    if A.kind == B.kind:
        return np.zeros((n, m), dtype=complex)
    if A.kind == ANNIHILATION:
        return A.vectors @ B.vectors.T
    sign = -1.0 if statistics == "boson" else 1.0
    return sign * (B.vectors @ A.vectors.T).T


def mode_operators(basis):
    """Return the families ``alpha, beta`` (annihilators) and ``alpha_bar, beta_bar`` (creators)."""
    N = basis.N
    return dict(
        alpha=LadderFamily("alpha", ANNIHILATION, basis.left[:N]),
        beta=LadderFamily("beta", ANNIHILATION, basis.left[N:]),
        alpha_bar=LadderFamily("alpha_bar", CREATION, basis.right[:, :N].T),
        beta_bar=LadderFamily("beta_bar", CREATION, basis.right[:, N:].T),
    )


@dataclass(frozen=True)
class CommutatorReport:
    """One relation evaluated for every momentum pair ``(k, k')``."""

    relation: str
    k: np.ndarray = field(repr=False)
    expected: np.ndarray = field(repr=False)
    measured: np.ndarray = field(repr=False)

    @property
    def max_error(self):
        return float(np.max(np.abs(self.measured - self.expected)))

    def passed(self, tol=1e-12):
        return self.max_error <= tol


def _report(relation, basis, A, B, diag, statistics):
    expected = np.diag(np.broadcast_to(np.asarray(diag, dtype=complex), (basis.N,)))
    return CommutatorReport(relation, basis.k, expected, commutator(A, B, statistics))


def check_canonical(params, statistics="boson", basis=None):
    """Evaluate the canonical relations among ``alpha, alpha_bar, beta, beta_bar``."""
    basis = bloch_basis(params) if basis is None else basis
    ops = mode_operators(basis)
    a, b, ab, bb = ops["alpha"], ops["beta"], ops["alpha_bar"], ops["beta_bar"]
    rel = [
        ("[alpha_k, alpha_bar_k'] = delta", a, ab, 1.0),
        ("[beta_k, beta_bar_k'] = delta", b, bb, 1.0),
        ("[alpha_k, alpha_k'] = 0", a, a, 0.0),
        ("[beta_k, beta_k'] = 0", b, b, 0.0),
        ("[alpha_bar_k, alpha_bar_k'] = 0", ab, ab, 0.0),
        ("[beta_bar_k, beta_bar_k'] = 0", bb, bb, 0.0),
        ("[alpha_k, beta_bar_k'] = 0", a, bb, 0.0),
        ("[alpha_bar_k, beta_bar_k'] = 0", ab, bb, 0.0),
        ("[alpha_k, beta_k'] = 0", a, b, 0.0),
        ("[alpha_bar_k, beta_k'] = 0", ab, b, 0.0),
    ]
    return [_report(name, basis, A, B, d, statistics) for name, A, B, d in rel]


def check_quasi_canonical(params, statistics="boson", basis=None):
    """Evaluate the relations that mix the modes with their Hermitian conjugates."""
    basis = bloch_basis(params) if basis is None else basis
    ops = mode_operators(basis)
    a, b, ab, bb = ops["alpha"], ops["beta"], ops["alpha_bar"], ops["beta_bar"]
    root = np.sqrt(1.0 + basis.lam**2)
    ilam = 1j * basis.lam
    rel = [
        ("[alpha_k, alpha+_k'] = sqrt(1+lambda^2) delta", a, a.dagger, root),
        ("[beta_k, beta+_k'] = sqrt(1+lambda^2) delta", b, b.dagger, root),
        ("[alpha_bar+_k, alpha_bar_k'] = sqrt(1+lambda^2) delta", ab.dagger, ab, root),
        ("[beta_bar+_k, beta_bar_k'] = sqrt(1+lambda^2) delta", bb.dagger, bb, root),
        ("[beta_k, alpha+_k'] = i lambda delta", b, a.dagger, ilam),
        ("[alpha_bar+_k, beta_bar_k'] = i lambda delta", ab.dagger, bb, ilam),
        ("[alpha_k, alpha_bar+_k'] = 0", a, ab.dagger, 0.0),
        ("[beta_k, beta_bar+_k'] = 0", b, bb.dagger, 0.0),
        ("[alpha_k, beta_bar+_k'] = 0", a, bb.dagger, 0.0),
        ("[beta_k, alpha_bar+_k'] = 0", b, ab.dagger, 0.0),
    ]
    return [_report(name, basis, A, B, d, statistics) for name, A, B, d in rel]


def dirac_overlaps(basis):
    """Dirac Gram matrix ``R^dagger R`` of the right modes."""
    return basis.right.conj().T @ basis.right


def cross_band_overlap(basis):
    """Normalized Dirac overlap ``|<alpha_bar_k|beta_bar_k>| / (|alpha_bar_k| |beta_bar_k|)`` per k.

    Analytically ``|lambda_k| / sqrt(1 + lambda_k**2)``.
    """
    N = basis.N
    G = dirac_overlaps(basis)
    idx = np.arange(N)
    cross = G[idx, N + idx]
    norms = np.sqrt(np.abs(G[idx, idx]) * np.abs(G[N + idx, N + idx]))
    return np.abs(cross) / norms


@dataclass(frozen=True)
class ModeDecomposition:
    """Biorthogonal expansion ``psi = sum_k f_k alpha_bar_k + g_k beta_bar_k``."""

    f: np.ndarray
    g: np.ndarray
    basis: object = field(repr=False)

    @property
    def k(self):
        return self.basis.k

    @property
    def coefficients(self):
        return np.concatenate([self.f, self.g])

    @property
    def varphi(self):
        """Phase with ``exp(i varphi_k) = g_k^* f_k / |g_k f_k|``; NaN where ``g_k f_k = 0``."""
        prod = self.g.conj() * self.f
        out = np.full(prod.shape, np.nan)
        nz = np.abs(prod) > 0
        out[nz] = np.angle(prod[nz])
        return out

    @property
    def biorthogonal_norm(self):
        return float(np.sum(np.abs(self.f) ** 2 + np.abs(self.g) ** 2))

    def scaled(self, factor):
        return ModeDecomposition(self.f * factor, self.g * factor, self.basis)


def decompose(state, basis):
    """Project ``state`` on the left modes: ``f_k = alpha_k @ state``, ``g_k = beta_k @ state``."""
    psi = check_state(state, 2 * basis.N)
    c = basis.left @ psi
    return ModeDecomposition(c[: basis.N], c[basis.N:], basis)


def reconstruct(decomp):
    return decomp.basis.right @ decomp.coefficients


def from_coefficients(basis, f=None, g=None):
    N = basis.N
    f = np.zeros(N, dtype=complex) if f is None else np.asarray(f, dtype=complex)
    g = np.zeros(N, dtype=complex) if g is None else np.asarray(g, dtype=complex)
    if f.shape != (N,) or g.shape != (N,):
        raise ValueError(f"f and g must each have {N} entries")
    return ModeDecomposition(f, g, basis)


def biorthogonal_normalize(state, basis):
    """Rescale ``state`` so that ``sum_k |f_k|^2 + |g_k|^2 = 1``."""
    d = decompose(state, basis)
    return np.asarray(state, dtype=complex) / np.sqrt(d.biorthogonal_norm)
