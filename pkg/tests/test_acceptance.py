"""Acceptance suite: nine end-to-end criteria at their stated tolerances.

Each criterion is a plain function returning ``(passed, detail)``; the pytest
wrappers assert on it and record one PASS/FAIL line, which the terminal
summary prints. ``python tests/test_acceptance.py`` runs the same functions
without pytest.
"""

import time
import warnings

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from ptband.algebra import check_canonical, check_quasi_canonical, decompose, from_coefficients, reconstruct
from ptband.bloch import band_energy, bloch_basis, momentum_grid, spectrum_summary, verify_jordan_block
from ptband.counterpart import counterpart_spectrum, equivalence_map
from ptband.dynamics import (
    ConditioningWarning,
    dirac_norm,
    dirac_norm_series_closed,
    evolve_direct,
    fluctuation_bound,
    norm_series,
)
from ptband.model import ModelParams, build_nonhermitian, uniform_ring
from ptband.wavepacket import (
    WavePacketSpec,
    build_gaussian,
    characteristic_times,
    effective_hopping,
    packet_metrics,
    profile_distance,
    ring_distance,
)

RESULTS = {}
FIG2 = ModelParams(J=1.0, delta=0.1, gamma=0.2 - 1e-8, N=100)
PACKETS = {"a": 0.0, "b": 3 * np.pi / 8, "c": np.pi / 2}
SAMPLES_PER_PERIOD = 600


def _rng(offset):
    return np.random.default_rng(314159 + offset)


def _random_params(rng, N, phase="unbroken"):
    # margins keep brute-force eigensolvers away from the defective point,
    # where LAPACK itself only resolves eigenvalues to ~sqrt(machine eps)
    J = rng.uniform(0.5, 2.0)
    delta = rng.choice([-1, 1]) * rng.uniform(0.05, 0.9)
    gc = 2 * J * abs(delta)
    gamma = gc * (rng.uniform(0.0, 0.95) if phase == "unbroken" else rng.uniform(1.05, 2.0))
    return ModelParams(J=J, delta=delta, gamma=gamma, N=N)


def _evolve_grid(H, psi, period, fractions=None, duration=1.0):
    n = int(round(duration * SAMPLES_PER_PERIOD))
    t = np.linspace(0.0, duration * period, n + 1)
    return t, evolve_direct(H, psi, t)


# ---- 1 ----------------------------------------------------------------------

def criterion_1():
    """Spectrum formula against brute-force eigenvalues, N = 2..12, 200 sets."""
    rng = _rng(1)
    start = time.perf_counter()
    worst = 0.0
    for i in range(200):
        N = int(rng.integers(2, 13))
        p = _random_params(rng, N, "broken" if i % 4 == 3 else "unbroken")
        eps = band_energy(p, momentum_grid(N))
        pred = np.r_[eps, -eps]
        ref = np.linalg.eigvals(build_nonhermitian(p))
        cost = np.abs(pred[:, None] - ref[None, :])
        r, c = linear_sum_assignment(cost)
        worst = max(worst, cost[r, c].max() / np.max(np.abs(ref)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10.0
    return ok, f"max relative error {worst:.2e} (tol 1e-10), {elapsed:.2f} s (limit 10 s)"


# ---- 2 ----------------------------------------------------------------------

def criterion_2():
    """Imaginary energies appear exactly above gamma_c = 2 J |delta|."""
    rng = _rng(2)
    mismatches = 0
    at_threshold_bad = 0
    for _ in range(50):
        J = rng.uniform(0.5, 2.0)
        delta = rng.choice([-1, 1]) * rng.uniform(0.02, 0.9)
        # even N puts k = pi, the first momentum to go complex, on the grid
        N = 2 * int(rng.integers(1, 51))
        gc = 2 * J * abs(delta)
        for gamma in [0.0, 0.5 * gc, gc - 1e-9, gc + 1e-9, 1.5 * gc, 3.0 * gc]:
            p = ModelParams(J=J, delta=delta, gamma=gamma, N=N)
            has_imag = bool(np.any(spectrum_summary(p).eps.imag != 0.0))
            mismatches += has_imag != (4 * J**2 * delta**2 < gamma**2)
        # on the threshold itself 4 J^2 delta^2 and gamma^2 differ only by
        # rounding; the spectrum must read as real with an exceptional k = pi
        s = spectrum_summary(ModelParams(J=J, delta=delta, gamma=gc, N=N))
        at_threshold_bad += not (s.is_unbroken and np.pi in s.exceptional_ks)
    ok = mismatches == 0 and at_threshold_bad == 0
    return ok, (f"{mismatches} mismatches over 50 pairs x 6 gammas incl. gamma_c +- 1e-9; "
                f"{at_threshold_bad} pairs misread at gamma_c")


# ---- 3 ----------------------------------------------------------------------

def criterion_3():
    """Canonical and quasi-canonical relations, N = 10, 100 sets, both statistics."""
    rng = _rng(3)
    worst = 0.0
    n_rel = 0
    for _ in range(100):
        p = _random_params(rng, 10)
        basis = bloch_basis(p)
        for stats in ("boson", "fermion"):
            reps = check_canonical(p, stats, basis) + check_quasi_canonical(p, stats, basis)
            n_rel = len(reps)
            worst = max(worst, max(r.max_error for r in reps))
    return worst <= 1e-12, f"{n_rel} relations, max error {worst:.2e} (tol 1e-12)"


# ---- 4 ----------------------------------------------------------------------

def criterion_4():
    """Biorthogonal norm conservation and the closed-form Dirac norm."""
    ct = characteristic_times(FIG2)
    basis = bloch_basis(FIG2)
    H = build_nonhermitian(FIG2)
    t = np.linspace(0.0, 10 * ct.T_cir, 10 * SAMPLES_PER_PERIOD + 1)
    rng = _rng(4)
    states = [build_gaussian(WavePacketSpec(0.1, k0, 100), 100) for k0 in PACKETS.values()]
    for _ in range(2):
        psi = rng.normal(size=200) + 1j * rng.normal(size=200)
        states.append(psi / np.linalg.norm(psi))
    err_s = err_d = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        for psi in states:
            err_s = max(err_s, np.max(np.abs(norm_series(basis, psi, t, "spectral").P_B - 1)))
            err_d = max(err_d, np.max(np.abs(norm_series(basis, psi, t, "direct", H=H).P_B - 1)))

    p = ModelParams(J=1.0, delta=0.1, gamma=0.15, N=50)
    b50 = bloch_basis(p)
    H50 = build_nonhermitian(p)
    t50 = np.linspace(0.0, 200.0, 401)
    err_c = 0.0
    for _ in range(20):
        psi = rng.normal(size=100) + 1j * rng.normal(size=100)
        psi /= np.linalg.norm(psi)
        direct = dirac_norm(evolve_direct(H50, psi, t50))
        err_c = max(err_c, np.max(np.abs(dirac_norm_series_closed(decompose(psi, b50), t50) - direct)))
    ok = err_s <= 1e-8 and err_d <= 1e-6 and err_c <= 1e-8
    return ok, (f"P_B spectral {err_s:.1e} (1e-8), direct {err_d:.1e} (1e-6); "
                f"closed-form P_D {err_c:.1e} (1e-8)")


# ---- 5 ----------------------------------------------------------------------

def criterion_5():
    """Single-band states keep P_D; the -pi/2 packet fluctuates >= 10x the +pi/2 one."""
    rng = _rng(5)
    worst = 0.0
    for p in (FIG2, FIG2.replace(gamma=0.19), ModelParams(J=1.3, delta=-0.3, gamma=0.5, N=40)):
        basis = bloch_basis(p)
        H = build_nonhermitian(p)
        T = characteristic_times(p).T_cir
        for band in ("f", "g", "mixed"):
            c1 = rng.normal(size=p.N) + 1j * rng.normal(size=p.N)
            c2 = rng.normal(size=p.N) + 1j * rng.normal(size=p.N)
            if band == "f":
                c2[:] = 0
            elif band == "g":
                c1[:] = 0
            else:
                # each momentum in one band only
                mask = rng.random(p.N) < 0.5
                c1, c2 = np.where(mask, c1, 0), np.where(mask, 0, c2)
            psi = reconstruct(from_coefficients(basis, c1, c2))
            psi /= np.linalg.norm(psi)
            P = dirac_norm(evolve_direct(H, psi, np.linspace(0, 10 * T, 2001)))
            worst = max(worst, np.max(np.abs(P - P[0])))

    ct = characteristic_times(FIG2)
    basis = bloch_basis(FIG2)
    H = build_nonhermitian(FIG2)
    t = np.linspace(0.0, ct.T_cir, SAMPLES_PER_PERIOD + 1)
    swing, bound = {}, {}
    for k0 in (np.pi / 2, -np.pi / 2):
        psi = build_gaussian(WavePacketSpec(0.1, k0, 100), 100)
        swing[k0] = np.ptp(dirac_norm(evolve_direct(H, psi, t)))
        bound[k0] = fluctuation_bound(decompose(psi, basis))
    ratio = swing[-np.pi / 2] / swing[np.pi / 2]
    within = all(swing[k] <= bound[k] for k in swing)
    ok = worst <= 1e-8 and ratio >= 10 and within
    return ok, (f"single-band max|dP_D| {worst:.1e} (1e-8); ptp ratio {ratio:.3g} (>= 10); "
                f"swings {swing[np.pi / 2]:.3g}, {swing[-np.pi / 2]:.3g} within bounds "
                f"{bound[np.pi / 2]:.3g}, {bound[-np.pi / 2]:.3g}: {within}")


# ---- 6 ----------------------------------------------------------------------

def _fig2_runs(boundary="periodic"):
    params = FIG2.replace(boundary=boundary)
    ct = characteristic_times(FIG2)
    H = build_nonhermitian(params)
    H_e = uniform_ring(effective_hopping(FIG2), FIG2.N, boundary)
    runs = {}
    for panel, k0 in PACKETS.items():
        period = ct.T_rev if panel == "a" else ct.T_cir
        duration = 1.05 if panel == "a" else 1.0
        psi = build_gaussian(WavePacketSpec(0.1, k0, 100), 100, boundary)
        t, states = _evolve_grid(H, psi, period, duration=duration)
        _, ref = _evolve_grid(H_e, psi, period, duration=duration)
        runs[panel] = dict(t=t, period=period, states=states, ref=ref, psi=psi,
                           obs=packet_metrics(states, boundary, initial=psi))
    return runs


def criterion_6():
    """Fig. 2 dynamics on the ring: revival, non-spreading return, match with h_e."""
    start = time.perf_counter()
    runs = _fig2_runs()
    a, c = runs["a"], runs["c"]
    F = a["obs"].fidelity[SAMPLES_PER_PERIOD]
    center_err = float(ring_distance(c["obs"].center[-1], 100, 200))
    growth = c["obs"].width[-1] / c["obs"].width[0] - 1
    dist = 0.0
    for run in runs.values():
        idx = [int(round(f * SAMPLES_PER_PERIOD)) for f in (0, 0.125, 0.25, 0.5, 0.75, 1.0)]
        dist = max(dist, np.max(profile_distance(run["states"][idx], run["ref"][idx])))
    ok = F >= 0.9 and center_err <= 2 and growth <= 0.10 and dist <= 0.05
    return ok, (f"F(T_rev) {F:.3f} (>= 0.9); k0=pi/2 center error {center_err:.2f} (<= 2), "
                f"width growth {100 * growth:.1f}% (<= 10%); max l2 to h_e {dist:.3f} (<= 0.05); "
                f"{time.perf_counter() - start:.1f} s")


# ---- 7 ----------------------------------------------------------------------

def criterion_7():
    """Hermitian counterparts: h_e at gamma_c, spectra on the full grid for 50 sets."""
    rng = _rng(7)
    err_he = 0.0
    for _ in range(10):
        J = rng.uniform(0.5, 2.0)
        delta = rng.uniform(-0.9, 0.9)
        p = ModelParams(J=J, delta=delta, gamma=2 * J * abs(delta), N=int(rng.integers(2, 60)))
        cp = equivalence_map(p).canonical
        err_he = max(err_he, abs(cp.Je - J * np.sqrt(1 - delta**2)), abs(cp.delta_e), abs(cp.Ve))
    err_spec = 0.0
    for _ in range(50):
        p = _random_params(rng, int(rng.integers(2, 40)))
        fam = equivalence_map(p)
        k = momentum_grid(p.N)
        target = band_energy(p, k).real
        for cp in (fam.canonical, *fam.sample(3)):
            err_spec = max(err_spec, np.max(np.abs(counterpart_spectrum(cp, k) - target)))
            brute = np.sort(np.linalg.eigvalsh(cp.matrix(p.N)))
            err_spec = max(err_spec, np.max(np.abs(brute - np.sort(np.r_[target, -target]))))
    ok = err_he <= 1e-12 and err_spec <= 1e-10
    return ok, f"h_e parameters at gamma_c off by {err_he:.1e}; spectrum error {err_spec:.1e} (1e-10)"


# ---- 8 ----------------------------------------------------------------------

def _path_length(center, n_sites, ring):
    d = np.diff(center)
    if ring:
        d = (d + n_sites / 2) % n_sites - n_sites / 2
    return float(np.sum(np.abs(d)))


def open_chain_metrics(runs, ring):
    """Revival and propagation metrics of the three Fig. 2 packets.

    Revival (k0 = 0): peak fidelity within 5% of T_rev; the open chain has
    mode spacing set by 2N + 1 instead of 2N, so its revival is ~1% later.
    Propagation (k0 = 3pi/8, pi/2): width ratio w(T_cir) / w(0) and the
    distance travelled by the center over [0, T_cir].
    """
    a = runs["a"]
    win = (a["t"] >= 0.95 * a["period"]) & (a["t"] <= 1.05 * a["period"])
    out = {"a.fidelity_peak": float(a["obs"].fidelity[win].max()),
           "a.fidelity_at_T": float(a["obs"].fidelity[SAMPLES_PER_PERIOD])}
    for panel in ("b", "c"):
        obs = runs[panel]["obs"]
        out[f"{panel}.width_ratio"] = float(obs.width[-1] / obs.width[0])
        out[f"{panel}.path"] = _path_length(obs.center, 200, ring)
    return out


GATED_8 = ("a.fidelity_peak", "b.width_ratio", "b.path", "c.width_ratio", "c.path")


def criterion_8():
    """Open chain: the Fig. 2 packets' metrics within 20% of the ring values."""
    ring = open_chain_metrics(_fig2_runs("periodic"), ring=True)
    chain = open_chain_metrics(_fig2_runs("open"), ring=False)
    rel = {k: abs(chain[k] - ring[k]) / abs(ring[k]) for k in ring}
    failed = [k for k in GATED_8 if rel[k] > 0.20]
    parts = [f"{k} ring {ring[k]:.3g} open {chain[k]:.3g} ({100 * rel[k]:.0f}%)" for k in ring]
    verdict = "all within 20%" if not failed else f"outside 20%: {', '.join(failed)}"
    note = " [a.fidelity_at_T reported, not gated]"
    return not failed, f"{verdict}; " + "; ".join(parts) + note


# ---- 9 ----------------------------------------------------------------------

def criterion_9():
    """Jordan block at k = pi exactly at gamma_c, not at gamma = 0.19."""
    at = verify_jordan_block(ModelParams(J=1.0, delta=0.1, gamma=0.2, N=100))
    below = verify_jordan_block(ModelParams(J=1.0, delta=0.1, gamma=0.19, N=100))
    ok = at.is_defective and not below.is_defective
    return ok, (f"gamma_c: defective={at.is_defective} (alg {at.algebraic_multiplicity}, "
                f"geo {at.geometric_multiplicity}); gamma=0.19: defective={below.is_defective}")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 10)}


def _record(i):
    ok, detail = CRITERIA[i]()
    line = f"criterion {i}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[i] = line
    print(line)
    return ok, detail


@pytest.mark.parametrize("i", range(1, 10), ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(i):
    ok, detail = _record(i)
    assert ok, detail


if __name__ == "__main__":
    import sys
    results = [_record(i)[0] for i in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
