"""Experiment orchestration: configs, runs, scheme comparisons, CSV output.

Reproducible defaults for the benchmark setup (length 64, 64 cells,
kernel width 0.5, eta 5):

* t_end = 2.85, the earliest time at which the 4x-resolved
  finite-difference reference steepens visibly (its gradient max first
  exceeds 3x the initial value; see steepening_time).
* dt (when not given) = 0.5 * min(diffusive bound 2/(eta k_max^2),
  advective bound 2*sqrt(2)/(k_max * max|s0|)) for the run's resolution
  band k_max = pi * n_cells / length, then snapped down so an integer
  number of steps lands exactly on t_end.  The advective term is needed
  because the high-amplitude initial condition makes the nonlinear term,
  not diffusion, the stiffest part of the spectral-type schemes.

Config files are flat UTF-8 key=value text with dotted keys (for example
``domain.length = 64``); unknown keys are rejected.  CSV output carries a
full config echo in '#'-prefixed header lines and 17-significant-digit
values, so identical configs reproduce identical bytes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from ifdsim.domain import FineField, PeriodicDomain, resample
from ifdsim.errors import ConfigError
from ifdsim.integrator import IntegratorConfig, integrate
from ifdsim.prior import (CorrelationKernel, PrecomputedOperators,
                          assemble_operators, edge_weight, posterior_cov,
                          posterior_cov_asymmetry, solve_gram)
from ifdsim.reconstruct import (ErrorReport, compare, fourier_reconstruct,
                                project_to_data, project_to_fourier_data,
                                wiener_reconstruct)
from ifdsim.schemes import BurgersParams, DataVector, box_ifd_rhs, fd_rhs, \
    fourier_ifd_rhs, noise_lift

SCHEMES = ("box_ifd", "fourier_ifd", "fd")

DEFAULT_T_END = 2.85
STEEPENING_FACTOR = 3.0


def _ic_gauss_bump_high(x, length):
    """High-amplitude Gaussian bump, peak e^4, mid-domain."""
    return np.exp(4.0 - (x / length - 0.5) ** 2)


def _ic_gauss_bump_unit(x, length):
    """Unit-amplitude Gaussian bump, mid-domain."""
    return np.exp(-4.0 * (x / length - 0.5) ** 2)


NAMED_ICS = {
    "gauss_bump_high": _ic_gauss_bump_high,
    "gauss_bump_unit": _ic_gauss_bump_unit,
}


@dataclass(frozen=True)
class ExperimentConfig:
    length: float = 64.0
    n_cells: int = 64
    fine_factor: int = 16
    kernel_components: tuple = ((1.0, 0.5),)
    kernel_images: int = None
    scheme: str = "box_ifd"
    eta: float = 5.0
    noise_diag: float = None
    method: str = "rk4"
    dt: float = None
    t_end: float = DEFAULT_T_END
    record_every: int = None
    blowup_norm: float = None
    ic_name: str = "gauss_bump_high"
    ic_table: str = None
    csv_path: str = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme: must be one of {SCHEMES}, got {self.scheme!r}")
        if self.ic_table is None and self.ic_name not in NAMED_ICS:
            raise ConfigError(
                f"initial_condition.name: unknown {self.ic_name!r}, "
                f"choose from {sorted(NAMED_ICS)}")


def _parse_components(text: str) -> tuple:
    comps = []
    for part in text.split(","):
        try:
            amp, width = part.split(":")
            comps.append((float(amp), float(width)))
        except ValueError as exc:
            raise ConfigError(
                f"kernel.components: expected 'amp:width[,amp:width...]', "
                f"got {text!r}") from exc
    return tuple(comps)


def _typed(parser, key):
    def convert(text):
        try:
            return parser(text)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {text!r}") from exc
    return convert


_CONFIG_KEYS = {
    "domain.length": ("length", float),
    "domain.n_cells": ("n_cells", int),
    "domain.fine_factor": ("fine_factor", int),
    "kernel.components": ("kernel_components", _parse_components),
    "kernel.images": ("kernel_images", int),
    "scheme": ("scheme", str),
    "params.eta": ("eta", float),
    "params.noise_diag": ("noise_diag", float),
    "integrator.method": ("method", str),
    "integrator.dt": ("dt", float),
    "integrator.t_end": ("t_end", float),
    "integrator.record_every": ("record_every", int),
    "integrator.blowup_norm": ("blowup_norm", float),
    "initial_condition.name": ("ic_name", str),
    "initial_condition.table": ("ic_table", str),
    "outputs.csv": ("csv_path", str),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat dotted-key config text; unknown keys are errors."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        field_name, parser = _CONFIG_KEYS[key]
        if parser is _parse_components:
            fields[field_name] = parser(value)
        else:
            fields[field_name] = _typed(parser, key)(value)
    return ExperimentConfig(**fields)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


@dataclass
class RunResult:
    status: str
    t_diverged: float
    wall_time: float
    dt: float
    n_steps: int
    times: np.ndarray
    snapshots: list  # FineField per recorded time
    final_data: np.ndarray
    mass_drift: float
    echo: dict
    error: ErrorReport = None


def _build_domain(config: ExperimentConfig) -> PeriodicDomain:
    return PeriodicDomain(config.length, config.n_cells, config.fine_factor)


def _build_kernel(config: ExperimentConfig, domain: PeriodicDomain) -> CorrelationKernel:
    return CorrelationKernel(config.kernel_components, domain,
                             images=config.kernel_images)


def _initial_field(config: ExperimentConfig, domain: PeriodicDomain) -> FineField:
    if config.ic_table is not None:
        samples = np.loadtxt(config.ic_table, dtype=float, ndmin=1)
        if samples.ndim != 1 or len(samples) != domain.n_fine:
            raise ConfigError(
                f"initial_condition.table: need {domain.n_fine} samples, "
                f"got shape {samples.shape}")
        return FineField(samples, domain)
    ic = NAMED_ICS[config.ic_name]
    return FineField(ic(domain.fine_x(), domain.length), domain)


def _coarse_initial(config: ExperimentConfig, domain: PeriodicDomain,
                    s0: FineField) -> np.ndarray:
    """Point samples of the initial condition on the coarse grid (for fd)."""
    if config.ic_table is not None:
        return resample(s0.samples, domain.n_cells)
    ic = NAMED_ICS[config.ic_name]
    x = np.arange(domain.n_cells) * domain.cell_width
    return ic(x, domain.length)


def stable_dt(config: ExperimentConfig, u_scale: float) -> float:
    """Default step size from the linear stability bounds (see module header)."""
    k_max = np.pi * config.n_cells / config.length
    bounds = []
    if config.eta > 0:
        bounds.append(2.0 / (config.eta * k_max ** 2))
    if u_scale > 0:
        bounds.append(2.0 * np.sqrt(2.0) / (k_max * u_scale))
    if not bounds:
        raise ConfigError("cannot derive dt: give integrator.dt explicitly")
    return 0.5 * min(bounds)


def _resolve_steps(config: ExperimentConfig, u_scale: float):
    dt = config.dt if config.dt is not None else stable_dt(config, u_scale)
    n_steps = max(1, int(np.ceil(config.t_end / dt - 1e-9)))
    dt = config.t_end / n_steps
    record_every = config.record_every if config.record_every is not None else n_steps
    return dt, n_steps, record_every


def run(config: ExperimentConfig) -> RunResult:
    """Project the initial condition, integrate, reconstruct, emit CSV."""
    t0 = time.perf_counter()
    domain = _build_domain(config)
    s0 = _initial_field(config, domain)
    params_noise = None
    if config.noise_diag is not None:
        params_noise = np.full(domain.n_cells, float(config.noise_diag))
        if config.scheme != "box_ifd":
            raise ConfigError("params.noise_diag applies to the box scheme only")
    params = BurgersParams(eta=config.eta, noise_diag=params_noise)

    ops = None
    echo_extra = {}
    if config.scheme == "box_ifd":
        kernel = _build_kernel(config, domain)
        ops = assemble_operators(kernel, domain)
        d0 = project_to_data(s0).values
        echo_extra["prior.band_half_width"] = ops.band_half_width
        echo_extra["kernel.images_resolved"] = kernel.images

        def rhs(v):
            out = box_ifd_rhs(DataVector(v, "box", domain), ops, params)
            if params.noise_diag is not None:
                out = noise_lift(out, ops, params)
            return out.values

    elif config.scheme == "fourier_ifd":
        d0 = project_to_fourier_data(s0).values

        def rhs(v):
            return fourier_ifd_rhs(DataVector(v, "fourier", domain), params).values

    else:  # fd
        d0 = _coarse_initial(config, domain, s0)
        dx = domain.cell_width

        def rhs(v):
            return fd_rhs(v, dx, params)

    u_scale = float(np.max(np.abs(s0.samples)))
    dt, n_steps, record_every = _resolve_steps(config, u_scale)
    maxn0 = float(np.max(np.abs(d0)))
    blowup = config.blowup_norm
    if blowup is None:
        blowup = 1e6 * maxn0 if maxn0 > 0 else 1e6
    int_config = IntegratorConfig(method=config.method, dt=dt,
                                  t_end=config.t_end,
                                  blowup_norm=blowup,
                                  record_every=record_every)
    traj = integrate(rhs, d0, int_config)

    snapshots = [_to_field(config, domain, ops, state) for state in traj.states]
    last = traj.final_state if traj.status == "completed" else traj.states[-1]
    mass_drift = _mass_drift(config.scheme, domain, traj.states[0], last)

    echo = _config_echo(config, dt=dt, n_steps=n_steps,
                        record_every=record_every, blowup_norm=blowup,
                        **echo_extra)
    result = RunResult(status=traj.status, t_diverged=traj.t_diverged,
                       wall_time=time.perf_counter() - t0, dt=dt,
                       n_steps=n_steps, times=traj.times, snapshots=snapshots,
                       final_data=traj.final_state, mass_drift=mass_drift,
                       echo=echo)
    if config.csv_path:
        emit_csv(result, config.csv_path)
    return result


def _to_field(config: ExperimentConfig, domain: PeriodicDomain,
              ops: PrecomputedOperators, state: np.ndarray) -> FineField:
    if config.scheme == "box_ifd":
        return wiener_reconstruct(DataVector(state, "box", domain), ops)
    if config.scheme == "fourier_ifd":
        return fourier_reconstruct(DataVector(state, "fourier", domain))
    return FineField(resample(state, domain.n_fine), domain)


def _mass_drift(scheme: str, domain: PeriodicDomain, first: np.ndarray,
                last: np.ndarray) -> float:
    if scheme == "box_ifd":
        m0, m1 = np.sum(first), np.sum(last)
    elif scheme == "fourier_ifd":
        m0, m1 = first[0].real * domain.length, last[0].real * domain.length
    else:
        dx = domain.cell_width
        m0, m1 = np.sum(first) * dx, np.sum(last) * dx
    return abs(m1 - m0) / abs(m0) if m0 != 0 else abs(m1 - m0)


def _config_echo(config: ExperimentConfig, **resolved) -> dict:
    comps = ",".join(f"{a:.17g}:{s:.17g}" for a, s in config.kernel_components)
    echo = {
        "domain.length": config.length,
        "domain.n_cells": config.n_cells,
        "domain.fine_factor": config.fine_factor,
        "kernel.components": comps,
        "kernel.images": config.kernel_images,
        "scheme": config.scheme,
        "params.eta": config.eta,
        "params.noise_diag": config.noise_diag,
        "integrator.method": config.method,
        "integrator.t_end": config.t_end,
        "integrator.blowup_norm": config.blowup_norm,
        "initial_condition.name": config.ic_name if config.ic_table is None else None,
        "initial_condition.table": config.ic_table,
    }
    for key, value in resolved.items():
        echo[f"resolved.{key}" if "." not in key else key] = value
    return echo


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def emit_csv(result: RunResult, path: str) -> None:
    """Write the reconstruction-per-recorded-time table with config echo."""
    lines = [f"# {key}={_fmt(value)}" for key, value in result.echo.items()]
    lines.append(f"# status={result.status}")
    header = ["x"] + [f"t={t:.17g}" for t in result.times]
    lines.append(",".join(header))
    grid = result.snapshots[0].domain.fine_x()
    columns = [grid] + [snap.samples for snap in result.snapshots]
    for row in zip(*columns):
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_table(rows: list, fieldnames: list, echo: dict, path: str) -> None:
    """Write a small comparison table as CSV with a config echo header."""
    lines = [f"# {key}={_fmt(value)}" for key, value in echo.items()]
    lines.append(",".join(fieldnames))
    for row in rows:
        lines.append(",".join(_fmt(row[name]) for name in fieldnames))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _error_row(field: FineField, reference: FineField):
    report = compare(field, reference)
    return report.l2, report.linf


def compare_schemes(config: ExperimentConfig) -> list:
    """Box scheme and fd baseline at the base resolution vs a 4x fd reference.

    Returns one row per scheme with L2/Linf errors of the reconstructed
    final field against the reference, all evaluated on the base fine
    grid.
    """
    base = replace(config, scheme="box_ifd", csv_path=None)
    res_box = run(base)
    res_fd = run(replace(base, scheme="fd"))
    # reference fine grid must stay commensurate with the base fine grid
    ref_fine = (config.fine_factor // 4 if config.fine_factor % 4 == 0
                else config.fine_factor)
    ref_cfg = replace(base, scheme="fd", n_cells=4 * config.n_cells,
                      fine_factor=max(1, ref_fine))
    res_ref = run(ref_cfg)
    if res_ref.status != "completed":
        raise ConfigError("reference run did not complete; adjust the setup")

    reference = res_ref.snapshots[-1]
    rows = []
    for name, res in (("box_ifd", res_box), ("fd", res_fd)):
        if res.status == "completed":
            l2, linf = _error_row(res.snapshots[-1], reference)
        else:
            l2 = linf = float("nan")
        rows.append({"scheme": name, "n_cells": config.n_cells,
                     "l2": l2, "linf": linf, "status": res.status})
    rows.append({"scheme": "fd_reference", "n_cells": 4 * config.n_cells,
                 "l2": 0.0, "linf": 0.0, "status": res_ref.status})
    if config.csv_path:
        emit_table(rows, ["scheme", "n_cells", "l2", "linf", "status"],
                   _config_echo(config), config.csv_path)
    return rows


def convergence_study(config: ExperimentConfig, n_list: list) -> list:
    """Box-scheme error vs resolution against a shared 4x fd reference."""
    if not n_list:
        raise ConfigError("convergence study needs a non-empty resolution list")
    n_list = [int(n) for n in n_list]
    if any(n2 <= n1 for n1, n2 in zip(n_list, n_list[1:])):
        raise ConfigError("resolution list must be strictly ascending")
    ref_n = 4 * max(n_list)
    if any(ref_n % n != 0 for n in n_list):
        raise ConfigError(
            f"every resolution must divide the reference resolution {ref_n}")

    ref_cfg = replace(config, scheme="fd", n_cells=ref_n, fine_factor=4,
                      csv_path=None)
    res_ref = run(ref_cfg)
    if res_ref.status != "completed":
        raise ConfigError("reference run did not complete; adjust the setup")
    reference = res_ref.snapshots[-1]

    rows = []
    for n in n_list:
        cfg = replace(config, scheme="box_ifd", n_cells=n,
                      fine_factor=max(4, (ref_n * 4) // n), csv_path=None)
        res = run(cfg)
        if res.status == "completed":
            l2, linf = _error_row(res.snapshots[-1], reference)
        else:
            l2 = linf = float("nan")
        rows.append({"n_cells": n, "l2": l2, "linf": linf,
                     "status": res.status})
    if config.csv_path:
        emit_table(rows, ["n_cells", "l2", "linf", "status"],
                   _config_echo(config), config.csv_path)
    return rows


def steepening_time(config: ExperimentConfig, factor: float = STEEPENING_FACTOR,
                    t_max: float = None) -> float:
    """Earliest time the 4x fd reference's gradient max exceeds factor x initial.

    Returns None when the threshold is not reached by t_max (default
    2 * t_end).  This rule produced the recorded default t_end.
    """
    t_max = 2.0 * config.t_end if t_max is None else t_max
    n = 4 * config.n_cells
    domain = PeriodicDomain(config.length, n, 1)
    dx = domain.cell_width
    ref_cfg = replace(config, scheme="fd", n_cells=n, fine_factor=4)
    s0 = _initial_field(ref_cfg, _build_domain(ref_cfg))
    u = _coarse_initial(ref_cfg, domain, s0)
    params = BurgersParams(eta=config.eta)

    def grad_max(v):
        return np.max(np.abs((np.roll(v, -1) - np.roll(v, 1)) / (2 * dx)))

    g0 = grad_max(u)
    dt = stable_dt(replace(config, n_cells=n), float(np.max(np.abs(u))))
    from ifdsim.integrator import step_rk4
    t = 0.0
    while t < t_max:
        u = step_rk4(lambda v: fd_rhs(v, dx, params), u, dt)
        t += dt
        if grad_max(u) > factor * g0:
            return t
    return None


def check(verbose: bool = True) -> bool:
    """Operator/oracle self-tests: Gram residual, quadrature agreement,
    posterior asymmetry.  Returns True when everything passes."""
    results = []
    config = ExperimentConfig()
    domain = PeriodicDomain(config.length, config.n_cells, config.fine_factor)
    kernel = CorrelationKernel(config.kernel_components, domain)
    ops = assemble_operators(kernel, domain)
    rng = np.random.default_rng(20240601)

    d = rng.standard_normal(domain.n_cells)
    dp = solve_gram(ops, d)
    residual = np.linalg.norm(ops.dense_gram() @ dp - d) / np.linalg.norm(d)
    results.append(("gram solve residual", residual < 1e-10,
                    f"{residual:.2e} (tol 1e-10)"))

    dp_dense = solve_gram(ops, d, method="dense")
    agree = np.linalg.norm(dp - dp_dense) / np.linalg.norm(dp)
    results.append(("circulant vs dense solve", agree < 1e-10,
                    f"{agree:.2e} (tol 1e-10)"))

    worst = 0.0
    for offset in range(min(ops.band_half_width, 4) + 1):
        analytic = edge_weight(kernel, domain, 0, offset)
        quadval = edge_weight(kernel, domain, 0, offset, method="quad")
        worst = max(worst, abs(analytic - quadval))
    results.append(("edge weights vs quadrature", worst < 1e-9,
                    f"max abs diff {worst:.2e} (tol 1e-9)"))

    worst_asym = 0.0
    for x in (0.3, 17.25, 40.5):
        dxx = posterior_cov(kernel, domain, x, x)
        asym = abs(posterior_cov_asymmetry(kernel, domain, x, 0.31))
        worst_asym = max(worst_asym, asym / dxx)
    results.append(("posterior asymmetry", worst_asym < 1e-8,
                    f"max rel {worst_asym:.2e} (tol 1e-8)"))

    ok = all(passed for _, passed, _ in results)
    if verbose:
        for name, passed, detail in results:
            print(f"check {name}: {'PASS' if passed else 'FAIL'} ({detail})")
    return ok
