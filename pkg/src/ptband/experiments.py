"""Experiment configuration and runners behind the command line.

Configs are JSON documents with four sections plus a few top-level keys::

    {
      "name": "fig2a",
      "model":   {"J": 1.0, "delta": 0.1, "gamma": 0.19999999, "N": 100, "boundary": "periodic"},
      "packet":  {"alpha": 0.1, "k0": 0.0, "N_A": 100},
      "time":    {"unit": "T_rev", "duration": 1.0, "samples_per_period": 600,
                  "snapshots": [0.0, 0.25, 0.5, 1.0]},
      "engine":  "spectral",
      "output":  {"directory": "out", "prefix": "fig2a", "svg": false},
      "seed": 1234,
      "n_random": 100
    }

``time.unit`` is ``"T_rev"``, ``"T_cir"`` or ``"J"`` (plain ``1/J`` units);
``duration`` and ``snapshots`` are in that unit. All CSV floats are written
with 17 significant digits so a rerun reproduces the files byte for byte.
"""

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .algebra import check_canonical, check_quasi_canonical, decompose, from_coefficients
from .bloch import (
    ExceptionalModeError,
    _coefficients,
    band_energy,
    bloch_basis,
    momentum_grid,
    spectrum_summary,
    verify_jordan_block,
)
from .counterpart import NoCounterpartError, counterpart_spectrum, equivalence_map
from .dynamics import (
    dirac_norm,
    dirac_norm_series_closed,
    evolve_direct,
    evolve_spectral,
    fluctuation_bound,
    norm_series,
)
from .model import (
    Boundary,
    ModelParams,
    build_nonhermitian,
    pt_residual,
    two_site_shift,
    uniform_ring,
)
from .wavepacket import (
    WavePacketSpec,
    build_gaussian,
    characteristic_times,
    effective_hopping,
    packet_metrics,
    profile_distance,
)

FIGURES = ("2a", "2b", "2c", "3", "4", "5", "6")
TIME_UNITS = ("T_rev", "T_cir", "J")
ENGINES = ("spectral", "direct")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class TimeGrid:
    unit: str = "T_cir"
    duration: float = 1.0
    samples_per_period: int = 600
    snapshots: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])


@dataclass
class OutputSpec:
    directory: str = "out"
    prefix: str = "run"
    svg: bool = False


@dataclass
class ExperimentConfig:
    """Everything a run needs; serializes to JSON and back without loss."""

    name: str = "run"
    model: dict = field(default_factory=lambda: asdict_model(ModelParams()))
    packet: dict = field(default_factory=lambda: asdict(WavePacketSpec()))
    time: TimeGrid = field(default_factory=TimeGrid)
    engine: str = "spectral"
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 1234
    n_random: int = 100

    def to_dict(self):
        return {
            "name": self.name,
            "model": dict(self.model),
            "packet": dict(self.packet),
            "time": asdict(self.time),
            "engine": self.engine,
            "output": asdict(self.output),
            "seed": self.seed,
            "n_random": self.n_random,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        try:
            d = dict(d)
            cfg = cls(
                name=str(d.pop("name", "run")),
                model=dict(d.pop("model", asdict_model(ModelParams()))),
                packet=dict(d.pop("packet", asdict(WavePacketSpec()))),
                time=TimeGrid(**d.pop("time", {})),
                engine=d.pop("engine", "spectral"),
                output=OutputSpec(**d.pop("output", {})),
                seed=int(d.pop("seed", 1234)),
                n_random=int(d.pop("n_random", 100)),
            )
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        if d:
            raise ConfigError(f"unknown config keys: {sorted(d)}")
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from exc

    def validate(self):
        try:
            self.model_params()
            self.packet_spec()
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.time.unit not in TIME_UNITS:
            raise ConfigError(f"time.unit must be one of {TIME_UNITS}")
        if not (np.isfinite(self.time.duration) and self.time.duration > 0):
            raise ConfigError("time.duration must be positive")
        if int(self.time.samples_per_period) < 1:
            raise ConfigError("time.samples_per_period must be >= 1")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if self.n_random < 1:
            raise ConfigError("n_random must be >= 1")
        return self

    def model_params(self):
        return ModelParams(**self.model)

    def packet_spec(self):
        return WavePacketSpec(**self.packet)

    def period(self):
        if self.time.unit == "J":
            return 1.0 / float(self.model.get("J", 1.0))
        ct = characteristic_times(self.model_params())
        return ct.T_rev if self.time.unit == "T_rev" else ct.T_cir

    def times(self):
        """Uniform grid over ``[0, duration * period]``, ``samples_per_period`` per unit."""
        n = int(round(self.time.duration * self.time.samples_per_period))
        return np.linspace(0.0, self.time.duration * self.period(), max(n, 1) + 1)

    def snapshot_times(self):
        return np.asarray(self.time.snapshots, dtype=float) * self.period()

    def output_path(self, suffix):
        return os.path.join(self.output.directory, f"{self.output.prefix}_{suffix}")


def asdict_model(params):
    return {"J": params.J, "delta": params.delta, "gamma": params.gamma, "N": params.N,
            "boundary": Boundary(params.boundary).value}


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return ExperimentConfig.from_json(fh.read())


def figure_configs(figure):
    """Bundled configs for a figure label (``"2a"`` ... ``"6"``)."""
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; choose from {FIGURES}")
    text = resources.files("ptband").joinpath("configs", f"fig{figure}.json").read_text("utf-8")
    data = json.loads(text)
    items = data if isinstance(data, list) else [data]
    return [ExperimentConfig.from_dict(item) for item in items]


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    """Write a header and rows; floats use 17 significant digits, LF line ends."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, np.array([[float(v) for v in r] for r in body]) if body else np.empty((0, len(header)))


def run_spectrum(config):
    """Band table on the momentum grid; returns the CSV path."""
    params = config.model_params()
    summary = spectrum_summary(params)
    k = summary.k
    eps = summary.eps
    c = _coefficients(params, k)
    lam = np.where(c["exceptional"], np.nan + 0j, c["lam"])
    broken = np.isin(k, summary.broken_ks)
    exceptional = np.asarray(c["exceptional"], dtype=bool)
    rows = zip(k, eps.real, eps.imag, lam.real, lam.imag, broken, exceptional)
    return write_csv(config.output_path("spectrum.csv"),
                     ["k", "eps_re", "eps_im", "lambda_re", "lambda_im", "broken", "exceptional"],
                     rows)


def run_modes(config):
    """Mode coefficients per momentum; returns the CSV path."""
    params = config.model_params()
    k = momentum_grid(params.N)
    c = _coefficients(params, k)
    cols = ["mu", "mu_bar", "nu", "nu_bar"]
    header = ["k", "eps_re", "eps_im", "lambda_re", "lambda_im", "phi"]
    for name in cols:
        header += [f"{name}_re", f"{name}_im"]
    header.append("exceptional")
    rows = []
    for i in range(len(k)):
        row = [k[i], c["eps"][i].real, c["eps"][i].imag, c["lam"][i].real, c["lam"][i].imag,
               c["phi"][i]]
        for name in cols:
            row += [c[name][i].real, c[name][i].imag]
        row.append(bool(c["exceptional"][i]))
        rows.append(row)
    return write_csv(config.output_path("modes.csv"), header, rows)


def _require_spectral_ok(config, params):
    if config.engine == "spectral" and params.boundary is not Boundary.PERIODIC:
        raise ConfigError("the spectral engine needs periodic boundaries; use engine 'direct'")


def _evolve(config, params, psi0, times):
    """States on ``times`` with the configured engine, plus the decomposition (ring only)."""
    decomp = None
    if params.boundary is Boundary.PERIODIC:
        try:
            decomp = decompose(psi0, bloch_basis(params))
        except ExceptionalModeError:
            if config.engine == "spectral":
                raise
    if config.engine == "spectral":
        return evolve_spectral(decomp, times), decomp
    return evolve_direct(build_nonhermitian(params), psi0, times), decomp


def run_evolution(config):
    """Gaussian-packet run; returns ``(snapshot_csv, series_csv, svg_paths)``.

    Series columns: ``t, t_unit, P_D, P_B, center, width, fidelity,
    profile_distance_he``. ``P_B`` is NaN on open chains and at exceptional
    points. ``profile_distance_he`` compares with the uniform ring (or chain)
    of hopping ``J sqrt(1 - delta^2)``.
    """
    params = config.model_params()
    _require_spectral_ok(config, params)
    spec = config.packet_spec()
    psi0 = build_gaussian(spec, params.N, params.boundary)
    times = config.times()
    period = config.period()
    states, decomp = _evolve(config, params, psi0, times)
    he = evolve_direct(uniform_ring(effective_hopping(params), params.N, params.boundary),
                       psi0, times)
    obs = packet_metrics(states, params.boundary, initial=psi0)
    dist = profile_distance(states, he)
    if decomp is not None:
        from .dynamics import biorthogonal_norm
        P_B = biorthogonal_norm(states, decomp, times) / decomp.biorthogonal_norm
    else:
        P_B = np.full(len(times), np.nan)
    series = write_csv(
        config.output_path("series.csv"),
        ["t", "t_unit", "P_D", "P_B", "center", "width", "fidelity", "profile_distance_he"],
        zip(times, times / period, obs.norm, P_B, obs.center, obs.width, obs.fidelity, dist),
    )
    snap_t = config.snapshot_times()
    snap, _ = _evolve(config, params, psi0, snap_t) if len(snap_t) else (np.empty((0, 2 * params.N)), None)
    snap_he = evolve_direct(uniform_ring(effective_hopping(params), params.N, params.boundary),
                            psi0, snap_t) if len(snap_t) else snap
    snap = np.atleast_2d(snap)
    snap_he = np.atleast_2d(snap_he)
    rows = []
    for i, t in enumerate(snap_t):
        prob = np.abs(snap[i]) ** 2
        prob_he = np.abs(snap_he[i]) ** 2
        for site in range(2 * params.N):
            rows.append([t, t / period, site + 1, prob[site], prob_he[site]])
    snapshots = write_csv(config.output_path("snapshots.csv"),
                          ["t", "t_unit", "site", "prob", "prob_he"], rows)
    svgs = []
    if config.output.svg:
        from .svg import line_plot, stacked_profiles
        unit = config.time.unit
        svgs.append(config.output_path("norms.svg"))
        line_plot(svgs[-1], times / period, {"P_D": obs.norm, "P_B": P_B},
                  title=f"{config.name}: norms", xlabel=f"t / {unit}", ylabel="norm")
        svgs.append(config.output_path("snapshots.svg"))
        stacked_profiles(svgs[-1], np.arange(1, 2 * params.N + 1),
                         np.abs(snap) ** 2, [f"t={f:.3g} {unit}" for f in snap_t / period],
                         reference=np.abs(snap_he) ** 2, title=f"{config.name}: |psi|^2")
    return snapshots, series, svgs


def run_norms(config):
    """Both engines and the closed form for ``P_D``; returns the CSV path."""
    params = config.model_params()
    if params.boundary is not Boundary.PERIODIC:
        raise ConfigError("norm comparison needs the periodic ring")
    basis = bloch_basis(params)
    psi0 = build_gaussian(config.packet_spec(), params.N, params.boundary)
    times = config.times()
    spec_series = norm_series(basis, psi0, times, engine="spectral")
    direct_series = norm_series(basis, psi0, times, engine="direct")
    decomp = decompose(psi0, basis)
    closed = dirac_norm_series_closed(decomp, times)
    bound = fluctuation_bound(decomp)
    return write_csv(
        config.output_path("norms.csv"),
        ["t", "t_unit", "P_D_closed", "P_D_spectral", "P_D_direct", "P_B_spectral",
         "P_B_direct", "bound"],
        zip(times, times / config.period(), closed, spec_series.P_D, direct_series.P_D,
            spec_series.P_B, direct_series.P_B, np.full(len(times), bound)),
    )


def run_counterpart(config):
    """Spectra of the model and of its Hermitian counterpart family; returns ``(csv, family)``."""
    params = config.model_params()
    family = equivalence_map(params)
    k = momentum_grid(params.N)
    members = family.sample(3)
    header = ["k", "eps"] + [f"eps_delta_e_{i}" for i in range(len(members))]
    cols = [counterpart_spectrum(m, k) for m in members]
    rows = [[k[i], band_energy(params, k[i]).real] + [c[i] for c in cols] for i in range(len(k))]
    return write_csv(config.output_path("counterpart.csv"), header, rows), family


# ---- invariant suites -------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def random_unbroken_params(rng, N, J_range=(0.5, 2.0), margin=0.0):
    """Random ``(J, delta, gamma)`` with ``gamma <= (1 - margin) * 2 J |delta|``."""
    J = rng.uniform(*J_range)
    delta = rng.uniform(-0.9, 0.9)
    gamma = rng.uniform(0.0, 1.0 - margin) * 2.0 * J * abs(delta)
    return ModelParams(J=J, delta=delta, gamma=gamma, N=N)


def _sweep_spectrum(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_unbroken_params(rng, int(rng.integers(2, 13)), margin=0.05)
        ev = np.sort_complex(np.linalg.eigvals(build_nonhermitian(p)))
        e = band_energy(p, momentum_grid(p.N))
        ref = np.sort_complex(np.r_[e, -e])
        worst = max(worst, float(np.max(np.abs(ev - ref)) / max(np.max(np.abs(ref)), p.J)))
    return worst


def _sweep_commutators(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_unbroken_params(rng, 10, margin=0.05)
        basis = bloch_basis(p)
        for stats in ("boson", "fermion"):
            for rep in check_canonical(p, stats, basis) + check_quasi_canonical(p, stats, basis):
                worst = max(worst, rep.max_error)
    return worst


def _sweep_engines(rng, n):
    worst_engine = worst_pb = worst_pd = 0.0
    for _ in range(n):
        p = random_unbroken_params(rng, int(rng.integers(2, 9)), margin=0.05)
        basis = bloch_basis(p)
        psi = rng.normal(size=p.n_sites) + 1j * rng.normal(size=p.n_sites)
        psi /= np.linalg.norm(psi)
        t = np.linspace(0.0, 5.0, 6)
        d = decompose(psi, basis)
        a = evolve_spectral(d, t)
        b = evolve_direct(build_nonhermitian(p), psi, t)
        worst_engine = max(worst_engine, float(np.max(np.abs(a - b))))
        ns = norm_series(basis, psi, t, engine="spectral")
        worst_pb = max(worst_pb, float(np.max(np.abs(ns.P_B - 1.0))))
        worst_pd = max(worst_pd, float(np.max(np.abs(dirac_norm_series_closed(d, t) - dirac_norm(a)))))
    return worst_engine, worst_pb, worst_pd


def _sweep_single_band(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_unbroken_params(rng, int(rng.integers(2, 9)), margin=0.05)
        basis = bloch_basis(p)
        f = rng.normal(size=p.N) + 1j * rng.normal(size=p.N)
        g = rng.normal(size=p.N) + 1j * rng.normal(size=p.N)
        mask = rng.random(p.N) < 0.5
        d = from_coefficients(basis, np.where(mask, f, 0), np.where(mask, 0, g))
        P = dirac_norm(evolve_spectral(d, np.linspace(0, 20, 41)))
        worst = max(worst, float(np.max(np.abs(P - P[0]))))
    return worst


def _sweep_counterpart(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_unbroken_params(rng, int(rng.integers(2, 30)))
        fam = equivalence_map(p, verify=False)
        k = momentum_grid(p.N)
        target = band_energy(p, k).real
        for m in (fam.canonical, *fam.sample(3)):
            worst = max(worst, float(np.max(np.abs(counterpart_spectrum(m, k) - target))))
    return worst


def run_checks(config):
    """Run the invariant suites; returns a list of :class:`CheckResult`.

    Checks on the configured model itself (PT symmetry, translation
    invariance, reality, Jordan structure at ``k = pi``) come first, then
    seeded random sweeps of ``config.n_random`` cases each.
    """
    params = config.model_params()
    rng = np.random.default_rng(config.seed)
    n = config.n_random
    out = []
    H = build_nonhermitian(params)
    out.append(CheckResult("pt_symmetry", pt_residual(H) == 0.0, pt_residual(H), 0.0))
    if params.boundary is Boundary.PERIODIC:
        S = two_site_shift(params.n_sites)
        r = float(np.max(np.abs(S @ H @ S.T - H)))
        out.append(CheckResult("translation_invariance", r == 0.0, r, 0.0))
        summary = spectrum_summary(params)
        consistent = summary.is_unbroken == params.is_unbroken()
        out.append(CheckResult("reality_threshold", consistent, float(len(summary.broken_ks)), 0.0,
                               f"unbroken={summary.is_unbroken} broken_k={len(summary.broken_ks)}"))
        jr = verify_jordan_block(params)
        at_ep = bool(np.isclose(params.gamma, params.gamma_c, rtol=0.0, atol=1e-8 * params.J))
        out.append(CheckResult(
            "jordan_block_k_pi", jr.is_defective == at_ep,
            float(jr.geometric_multiplicity), 0.0,
            f"defective={jr.is_defective} algebraic={jr.algebraic_multiplicity} "
            f"geometric={jr.geometric_multiplicity} gamma_c={params.gamma_c:.17g}",
        ))
    out.append(CheckResult("spectrum_bruteforce", (v := _sweep_spectrum(rng, n)) <= 1e-10, v, 1e-10,
                           f"{n} random cases, N in 2..12, relative error"))
    v = _sweep_commutators(rng, n)
    out.append(CheckResult("commutators", v <= 1e-12, v, 1e-12, f"{n} random cases, N=10"))
    e, pb, pd = _sweep_engines(rng, n)
    out.append(CheckResult("engine_agreement", e <= 1e-8, e, 1e-8, f"{n} random states"))
    out.append(CheckResult("biorthogonal_norm", pb <= 1e-8, pb, 1e-8))
    out.append(CheckResult("dirac_norm_closed_form", pd <= 1e-8, pd, 1e-8))
    v = _sweep_single_band(rng, n)
    out.append(CheckResult("single_band_dirac_norm", v <= 1e-8, v, 1e-8))
    v = _sweep_counterpart(rng, n)
    out.append(CheckResult("counterpart_spectrum", v <= 1e-10, v, 1e-10))
    return out


def format_report(results):
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status} {r.name}: value={r.value:.3e} tol={r.tolerance:.1e} {r.detail}".rstrip())
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"


def report_json(results, config):
    return json.dumps({
        "config": config.to_dict(),
        "passed": all(r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }, indent=2) + "\n"


__all__ = [
    "ConfigError", "ExperimentConfig", "TimeGrid", "OutputSpec", "CheckResult",
    "load_config", "figure_configs", "write_csv", "read_csv",
    "run_spectrum", "run_modes", "run_evolution", "run_norms", "run_counterpart", "run_checks",
    "format_report", "report_json", "random_unbroken_params", "NoCounterpartError",
]
