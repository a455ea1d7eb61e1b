"""Experiment runner: config file in, CSV report bundle out.

Each run reads one JSON config, executes a named experiment against the
library, and writes fixed-schema CSV files plus a manifest.json (written
last, as the completion marker). Reruns of the same config and seed
reproduce every data file byte for byte; only the manifest timestamps
differ.

CSV schemas (headers verbatim):
    kernel.csv:      x,y,value
    spacetime.csv:   x,t,y,s,value
    verify.csv:      case_id,n,sites,times,det_value,trace_value,abs_err
    samples.csv:     sample_id,bitstring
    trajectory.csv:  draw_id,step,time,bitstring
    limits.csv:      regime,ladder_k,scale_param,sup_entry_error
    cylindric.csv:   lambda,mu,t,entry
    certificate.csv: t,min_minor_order,min_minor_value,pass

Exit codes: 0 success, 2 configuration, 3 validity or certificate
failure, 4 numerical failure. Nonzero exits still write the manifest
with the failure recorded.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dpp import Configuration, OpEnsemble, ensemble_correlations, sample_dpp
from .errors import (
    ConfigurationError,
    NumericalFailureError,
    PreconditionError,
    SizeError,
    ValidityError,
)
from .fock import (
    FOCK_SITE_CAP,
    FockSpace,
    car_operators,
    path_law,
    positivity_certificate,
    sample_trajectory,
    schwinger,
    second_quantization,
)
from .kernels import (
    SpaceTimePoint,
    cd_kernel,
    dynamical_correlation,
    fermi_kernel,
    negative_projection,
    space_time_kernel,
)
from .linalg import SymmetricOperator
from .orthopoly import (
    LIMIT_REGIMES,
    Charlier,
    Hahn,
    Hermite,
    Jacobi,
    Krawtchouk,
    Laguerre,
    Meixner,
    Racah,
    SiteWindow,
    central_third,
    difference_operator,
    limit_regime,
    polynomial_table,
    regime_scale,
    site_window,
)
from .schur import PartitionSpace, cylindric_path_law, maya_configuration, transition_matrix

EXPERIMENTS = ("kernel", "ensemble", "sample", "dynamics", "verify", "limits", "cylindric")

_KNOWN_KEYS = {
    "experiment",
    "family",
    "window",
    "beta",
    "mu",
    "N",
    "times",
    "sites",
    "samples",
    "seed",
    "n_max",
    "theta",
    "out_dir",
    "threads",
}

_FAMILY_SPECS = {
    "charlier": (Charlier, ("mu",)),
    "meixner": (Meixner, ("c", "xi")),
    "krawtchouk": (Krawtchouk, ("M", "p")),
    "hahn": (Hahn, ("M", "a", "b")),
    "racah": (Racah, ("M", "alpha", "beta", "gamma", "delta")),
    "hermite": (Hermite, ()),
    "laguerre": (Laguerre, ("c",)),
    "jacobi": (Jacobi, ("a", "b")),
}


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    out_dir: str
    raw: dict
    family: dict | None = None
    window: tuple | None = None
    beta: float | None = None
    mu: float | None = None
    N: int | None = None
    times: tuple | None = None
    sites: tuple | None = None
    samples: int | None = None
    seed: int | None = None
    n_max: int | None = None
    theta: float | None = None
    threads: int | None = None


@dataclasses.dataclass(frozen=True)
class ReportBundle:
    out_dir: Path
    manifest: dict
    files: tuple
    exit_code: int


# ---------------------------------------------------------------------------
# config parsing


def _need(cond: bool, message: str):
    if not cond:
        raise ConfigurationError(message)


def _as_number(value, key: str) -> float:
    _need(isinstance(value, (int, float)) and not isinstance(value, bool), f"{key} must be a number")
    v = float(value)
    _need(math.isfinite(v), f"{key} must be finite")
    return v


def _as_int(value, key: str) -> int:
    _need(
        isinstance(value, int) and not isinstance(value, bool),
        f"{key} must be an integer",
    )
    return int(value)


def parse_config(path) -> ExperimentConfig:
    """Read and validate one experiment config; raises ConfigurationError."""
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file {p} does not exist")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from None
    _need(isinstance(data, dict), "config must be a JSON object")
    for key in data:
        _need(key in _KNOWN_KEYS, f"unknown key {key!r}")
    _need("experiment" in data, "missing key 'experiment'")
    exp = data["experiment"]
    _need(
        exp in EXPERIMENTS,
        f"unknown experiment {exp!r}; valid: {', '.join(EXPERIMENTS)}",
    )
    _need("out_dir" in data, "missing key 'out_dir'")
    _need(isinstance(data["out_dir"], str) and data["out_dir"], "out_dir must be a nonempty string")

    kwargs = {"experiment": exp, "out_dir": data["out_dir"], "raw": data}
    if "family" in data:
        fam = data["family"]
        _need(isinstance(fam, dict), "family must be an object")
        _need("name" in fam, "family.name is required")
        name = fam["name"]
        _need(
            name in _FAMILY_SPECS or name in LIMIT_REGIMES,
            f"family.name {name!r} unknown; families: {', '.join(sorted(_FAMILY_SPECS))}; "
            f"regimes: {', '.join(sorted(LIMIT_REGIMES))}",
        )
        if name in _FAMILY_SPECS:
            _, params = _FAMILY_SPECS[name]
            for key in fam:
                _need(
                    key == "name" or key in params,
                    f"family key {key!r} not valid for {name}; expected {params}",
                )
            for key in params:
                _need(key in fam, f"family.{key} is required for {name}")
        kwargs["family"] = fam
    if "window" in data:
        w = data["window"]
        _need(
            isinstance(w, list) and len(w) == 2,
            "window must be a [lo, hi] pair",
        )
        kwargs["window"] = (_as_number(w[0], "window[0]"), _as_number(w[1], "window[1]"))
    if "beta" in data:
        b = data["beta"]
        if b == "inf":
            kwargs["beta"] = math.inf
        else:
            _need(
                isinstance(b, (int, float)) and not isinstance(b, bool) and float(b) > 0,
                'beta must be positive or "inf"',
            )
            kwargs["beta"] = float(b)
    if "mu" in data:
        kwargs["mu"] = _as_number(data["mu"], "mu")
    if "N" in data:
        n = _as_int(data["N"], "N")
        _need(n >= 1, "N must be >= 1")
        kwargs["N"] = n
    for key in ("times", "sites"):
        if key in data:
            seq = data[key]
            _need(isinstance(seq, list) and seq, f"{key} must be a nonempty list")
            kwargs[key] = tuple(_as_number(v, f"{key}[{i}]") for i, v in enumerate(seq))
    if "samples" in data:
        s = _as_int(data["samples"], "samples")
        _need(s >= 1, "samples must be >= 1")
        kwargs["samples"] = s
    if "seed" in data:
        s = _as_int(data["seed"], "seed")
        _need(s >= 0, "seed must be >= 0")
        kwargs["seed"] = s
    if "n_max" in data:
        n = _as_int(data["n_max"], "n_max")
        _need(n >= 0, "n_max must be >= 0")
        kwargs["n_max"] = n
    if "theta" in data:
        t = _as_number(data["theta"], "theta")
        _need(t >= 0, "theta must be >= 0")
        kwargs["theta"] = t
    if "threads" in data:
        t = _as_int(data["threads"], "threads")
        _need(t >= 1, "threads must be >= 1")
        kwargs["threads"] = t
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# serialization helpers


def _fmt(value) -> str:
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _write_csv(out_dir: Path, name: str, header: str, rows):
    lines = [header]
    for row in rows:
        lines.append(",".join(row))
    (out_dir / name).write_text("\n".join(lines) + "\n")


def _bitstring(mask: int, m: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(m))


def _require_key(config: ExperimentConfig, key: str):
    if getattr(config, key) is None:
        raise ConfigurationError(f"experiment {config.experiment!r} requires key {key!r}")


def _build_family(config: ExperimentConfig):
    _require_key(config, "family")
    name = config.family["name"]
    if name not in _FAMILY_SPECS:
        raise ConfigurationError(f"{name!r} names a limit regime, not a weight family")
    cls, params = _FAMILY_SPECS[name]
    values = {}
    for key in params:
        v = config.family[key]
        values[key] = int(v) if key == "M" else float(v)
    return cls(**values)


def _build_operator(config: ExperimentConfig):
    """H = -(D + mu) on the config window, from the family difference operator."""
    family = _build_family(config)
    if family.lattice == "continuous":
        raise ConfigurationError(
            f"experiment {config.experiment!r} needs a discrete family, got {config.family['name']!r}"
        )
    _require_key(config, "window")
    window = site_window(family, config.window[0], config.window[1])
    D = difference_operator(family, window)
    mu = config.mu if config.mu is not None else 0.0
    H = SymmetricOperator(
        -(D.entries + mu * np.eye(D.dim)), site_labels=D.site_labels
    )
    return family, window, H


def _static_kernel(config: ExperimentConfig, H: SymmetricOperator):
    _require_key(config, "beta")
    if math.isinf(config.beta):
        return negative_projection(H)
    return fermi_kernel(H, config.beta)


# ---------------------------------------------------------------------------
# experiments


def _run_kernel(config: ExperimentConfig, out_dir: Path) -> list:
    _, _, H = _build_operator(config)
    K = _static_kernel(config, H)
    rows = (
        (_fmt(K.site_labels[i]), _fmt(K.site_labels[j]), _fmt(K.entries[i, j]))
        for i in range(K.dim)
        for j in range(K.dim)
    )
    _write_csv(out_dir, "kernel.csv", "x,y,value", rows)
    files = ["kernel.csv"]
    if config.times is not None:
        R = space_time_kernel(H, config.beta)
        sites = config.sites if config.sites is not None else H.site_labels
        points = [(float(x), float(t)) for t in config.times for x in sites]
        rows = (
            (_fmt(x), _fmt(t), _fmt(y), _fmt(s), _fmt(R.evaluate(x, t, y, s)))
            for (x, t) in points
            for (y, s) in points
        )
        _write_csv(out_dir, "spacetime.csv", "x,t,y,s,value", rows)
        files.append("spacetime.csv")
    return files


def _run_ensemble(config: ExperimentConfig, out_dir: Path) -> list:
    family = _build_family(config)
    if family.lattice == "continuous":
        raise ConfigurationError("ensemble experiment needs a discrete family")
    _require_key(config, "window")
    _require_key(config, "N")
    window = site_window(family, config.window[0], config.window[1])
    kind = OpEnsemble(family, window, config.N)
    table = polynomial_table(family, window, config.N)
    K = cd_kernel(table)
    rows = (
        (_fmt(K.site_labels[i]), _fmt(K.site_labels[j]), _fmt(K.entries[i, j]))
        for i in range(K.dim)
        for j in range(K.dim)
    )
    _write_csv(out_dir, "kernel.csv", "x,y,value", rows)
    sites = list(window.sites)
    verify_rows = []
    for x in sites:
        i = K.index_of(x)
        det = K.entries[i, i]
        enum = ensemble_correlations(kind, [x])
        verify_rows.append(
            (
                f"rho1_{int(x)}",
                "1",
                _fmt(x),
                "",
                _fmt(det),
                _fmt(enum),
                _fmt(abs(det - enum)),
            )
        )
    for a in range(len(sites)):
        for b in range(a + 1, len(sites)):
            x, y = sites[a], sites[b]
            i, j = K.index_of(x), K.index_of(y)
            det = K.entries[i, i] * K.entries[j, j] - K.entries[i, j] ** 2
            enum = ensemble_correlations(kind, [x, y])
            verify_rows.append(
                (
                    f"rho2_{int(x)}_{int(y)}",
                    "2",
                    f"{_fmt(x)};{_fmt(y)}",
                    "",
                    _fmt(det),
                    _fmt(enum),
                    _fmt(abs(det - enum)),
                )
            )
    _write_csv(
        out_dir,
        "verify.csv",
        "case_id,n,sites,times,det_value,trace_value,abs_err",
        verify_rows,
    )
    return ["kernel.csv", "verify.csv"]


def _run_sample(config: ExperimentConfig, out_dir: Path) -> list:
    _require_key(config, "samples")
    _require_key(config, "seed")
    family = _build_family(config)
    if family.lattice == "continuous":
        raise ConfigurationError("sample experiment needs a discrete family")
    _require_key(config, "window")
    window = site_window(family, config.window[0], config.window[1])
    if config.N is not None:
        K = cd_kernel(polynomial_table(family, window, config.N))
    else:
        D = difference_operator(family, window)
        mu = config.mu if config.mu is not None else 0.0
        H = SymmetricOperator(
            -(D.entries + mu * np.eye(D.dim)), site_labels=D.site_labels
        )
        K = _static_kernel(config, H)
    draws = sample_dpp(K, config.seed, config.samples)
    rows = (
        (str(i), _bitstring(c.occupied, c.m)) for i, c in enumerate(draws)
    )
    _write_csv(out_dir, "samples.csv", "sample_id,bitstring", rows)
    return ["samples.csv"]


def _run_dynamics(config: ExperimentConfig, out_dir: Path) -> list:
    _require_key(config, "beta")
    _require_key(config, "times")
    _require_key(config, "samples")
    _require_key(config, "seed")
    if math.isinf(config.beta):
        raise ConfigurationError("dynamics experiment needs a finite beta")
    _, _, H = _build_operator(config)
    if H.dim > FOCK_SITE_CAP:
        raise SizeError(
            f"dynamics window of {H.dim} sites exceeds the Fock cap {FOCK_SITE_CAP}"
        )
    beta = config.beta
    times = tuple(sorted(config.times))
    gaps = [times[i + 1] - times[i] for i in range(len(times) - 1)]
    durations = sorted({g for g in gaps if g > 0} | {beta})
    report = positivity_certificate(H, beta, durations)
    cert_rows = []
    for t in durations:
        scans = [s for s in report.scans if s.duration == t]
        worst = min(scans, key=lambda s: s.min_value)
        cert_rows.append(
            (
                _fmt(t),
                str(worst.order),
                _fmt(worst.min_value),
                "1" if worst.min_value >= report.threshold else "0",
            )
        )
    _write_csv(
        out_dir,
        "certificate.csv",
        "t,min_minor_order,min_minor_value,pass",
        cert_rows,
    )
    files = ["certificate.csv"]
    law = path_law(H, beta, times)
    draws = sample_trajectory(law, config.seed, config.samples)
    rows = (
        (str(d), str(i), _fmt(times[i]), _bitstring(int(draws[d, i]), H.dim))
        for d in range(draws.shape[0])
        for i in range(len(times))
    )
    _write_csv(out_dir, "trajectory.csv", "draw_id,step,time,bitstring", rows)
    files.append("trajectory.csv")

    space = FockSpace(H.site_labels)
    L = second_quantization(space, H)
    car = car_operators(space)
    R = space_time_kernel(H, beta)
    verify_rows = []
    case = 0
    for n in range(1, min(4, H.dim * len(times)) + 1):
        pts = []
        for k in range(n):
            site = (case + 3 * k) % H.dim
            t = times[(case + k) % len(times)]
            if (site, t) not in pts:
                pts.append((site, t))
        pts.sort(key=lambda p: p[1])
        trace = schwinger(
            L, beta, [car.numbers[x] for x, _ in pts], [t for _, t in pts]
        )
        det = dynamical_correlation(
            R, [SpaceTimePoint(float(H.site_labels[x]), t) for x, t in pts]
        )
        verify_rows.append(
            (
                f"case_{case}",
                str(len(pts)),
                ";".join(_fmt(H.site_labels[x]) for x, _ in pts),
                ";".join(_fmt(t) for _, t in pts),
                _fmt(det),
                _fmt(trace),
                _fmt(abs(det - trace)),
            )
        )
        case += 1
    _write_csv(
        out_dir,
        "verify.csv",
        "case_id,n,sites,times,det_value,trace_value,abs_err",
        verify_rows,
    )
    files.append("verify.csv")
    return files


def _run_verify(config: ExperimentConfig, out_dir: Path) -> list:
    _require_key(config, "seed")
    cases = config.samples if config.samples is not None else 50
    rng = np.random.default_rng(config.seed)
    rows = []
    for case in range(cases):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(1, 5))
        beta = float(rng.choice([0.5, 2.0]))
        if case % 2 == 0:
            diag = rng.uniform(0.5, 2.0, m)
            off = -rng.uniform(0.2, 1.0, m - 1)
            A = np.diag(diag)
            A[np.arange(m - 1), np.arange(1, m)] = off
            A[np.arange(1, m), np.arange(m - 1)] = off
        else:
            B = rng.standard_normal((m, m))
            A = 0.5 * (B + B.T)
        H = SymmetricOperator(A)
        space = FockSpace(H.site_labels)
        L = second_quantization(space, H)
        car = car_operators(space)
        R = space_time_kernel(H, beta)
        pairs = set()
        while len(pairs) < n:
            pairs.add(
                (
                    int(rng.integers(0, m)),
                    round(float(rng.uniform(-beta / 2, beta / 2)), 6),
                )
            )
        pts = sorted(pairs, key=lambda p: p[1])
        trace = schwinger(L, beta, [car.numbers[x] for x, _ in pts], [t for _, t in pts])
        det = dynamical_correlation(R, [SpaceTimePoint(float(x), t) for x, t in pts])
        rows.append(
            (
                f"case_{case}",
                str(n),
                ";".join(_fmt(x) for x, _ in pts),
                ";".join(_fmt(t) for _, t in pts),
                _fmt(det),
                _fmt(trace),
                _fmt(abs(det - trace)),
            )
        )
    _write_csv(
        out_dir,
        "verify.csv",
        "case_id,n,sites,times,det_value,trace_value,abs_err",
        rows,
    )
    return ["verify.csv"]


def _run_limits(config: ExperimentConfig, out_dir: Path) -> list:
    if config.family is not None:
        name = config.family["name"]
        if name not in LIMIT_REGIMES:
            raise ConfigurationError(
                f"{name!r} is not a limit regime; registered: {', '.join(sorted(LIMIT_REGIMES))}"
            )
        regimes = [name]
    else:
        regimes = sorted(LIMIT_REGIMES)
    rungs = config.N if config.N is not None else 6
    rows = []
    for regime in regimes:
        for k in range(rungs):
            scaled, target, window = limit_regime(regime, k)
            sl = central_third(len(window))
            err = float(
                np.max(np.abs(scaled.entries[sl, sl] - target.entries[sl, sl]))
            )
            rows.append((regime, str(k), _fmt(regime_scale(regime, k)), _fmt(err)))
    _write_csv(out_dir, "limits.csv", "regime,ladder_k,scale_param,sup_entry_error", rows)
    return ["limits.csv"]


def _run_cylindric(config: ExperimentConfig, out_dir: Path) -> list:
    _require_key(config, "n_max")
    _require_key(config, "theta")
    _require_key(config, "beta")
    _require_key(config, "times")
    _require_key(config, "samples")
    _require_key(config, "seed")
    if math.isinf(config.beta):
        raise ConfigurationError("cylindric experiment needs a finite beta")
    space = PartitionSpace(config.n_max)
    theta, beta = config.theta, config.beta
    times = tuple(sorted(config.times))
    gaps = [times[i + 1] - times[i] for i in range(len(times) - 1)]
    closing = beta - times[-1] + times[0]
    durations = sorted({t for t in gaps + [closing, beta] if t > 0})
    sizes = space.sizes()
    keep = np.flatnonzero(sizes <= min(config.n_max, 8))
    rows = []
    for t in durations:
        T = transition_matrix(space, theta, t)
        for i in keep:
            for j in keep:
                rows.append(
                    (
                        str(space.partitions[i]),
                        str(space.partitions[j]),
                        _fmt(t),
                        _fmt(T.entries[i, j]),
                    )
                )
    _write_csv(out_dir, "cylindric.csv", "lambda,mu,t,entry", rows)
    files = ["cylindric.csv"]

    protected = sizes <= config.n_max - 4
    if not np.any(protected):
        protected = np.ones_like(protected)
    block = np.ix_(protected, protected)
    limit_rows = []
    for k, frac in enumerate((0.25, 0.5)):
        t = beta * frac
        Tt = transition_matrix(space, theta, t)
        T2t = transition_matrix(space, theta, 2 * t)
        resid = float(np.max(np.abs((Tt.entries @ Tt.entries)[block] - T2t.entries[block])))
        limit_rows.append(
            ("cylindric_semigroup", str(k), _fmt(config.n_max), _fmt(resid))
        )
    _write_csv(
        out_dir, "limits.csv", "regime,ladder_k,scale_param,sup_entry_error", limit_rows
    )
    files.append("limits.csv")

    law = cylindric_path_law(space, theta, beta, times)
    draws = law.sample(config.seed, config.samples)
    maya_window = SiteWindow("half_int", -config.n_max - 0.5, config.n_max + 0.5)
    masks = [
        maya_configuration(p, maya_window).occupied for p in space.partitions
    ]
    m = len(maya_window)
    rows = (
        (str(d), str(i), _fmt(times[i]), _bitstring(masks[int(draws[d, i])], m))
        for d in range(draws.shape[0])
        for i in range(len(times))
    )
    _write_csv(out_dir, "trajectory.csv", "draw_id,step,time,bitstring", rows)
    files.append("trajectory.csv")
    return files


_RUNNERS = {
    "kernel": _run_kernel,
    "ensemble": _run_ensemble,
    "sample": _run_sample,
    "dynamics": _run_dynamics,
    "verify": _run_verify,
    "limits": _run_limits,
    "cylindric": _run_cylindric,
}


# ---------------------------------------------------------------------------
# run + manifest


def _classify(exc: Exception):
    if isinstance(exc, (ValidityError,)):
        return "validity_error", 3
    if isinstance(exc, NumericalFailureError):
        return "numerical_failure", 4
    if isinstance(exc, (ConfigurationError, PreconditionError, SizeError)):
        return "config_error", 2
    raise exc


def run(config: ExperimentConfig) -> ReportBundle:
    """Execute the experiment; always writes manifest.json last."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.monotonic()
    files: list = []
    failures: list = []
    status = "success"
    code = 0
    try:
        files = _RUNNERS[config.experiment](config, out_dir)
    except Exception as exc:
        status, code = _classify(exc)
        failures.append({"type": type(exc).__name__, "message": str(exc)})
    manifest = {
        "config": config.raw,
        "version": __version__,
        "started": started,
        "elapsed_s": round(time.monotonic() - t0, 6),
        "status": status,
        "failures": failures,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return ReportBundle(out_dir, manifest, tuple(files), code)


def _write_failure_manifest(args, exc: Exception):
    """Record a config failure when an output directory can be determined."""
    out = args.out
    raw: dict = {}
    try:
        data = json.loads(Path(args.config).read_text())
        if isinstance(data, dict):
            raw = data
            if out is None and isinstance(data.get("out_dir"), str):
                out = data["out_dir"]
    except (OSError, json.JSONDecodeError):
        pass
    if not out:
        return
    try:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "config": raw,
            "version": __version__,
            "started": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "elapsed_s": 0.0,
            "status": "config_error",
            "failures": [{"type": type(exc).__name__, "message": str(exc)}],
        }
        (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError:
        pass


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fermidpp", description="Run one experiment config and write a report bundle."
    )
    parser.add_argument("config", help="path to a JSON experiment config")
    parser.add_argument("--out", help="override out_dir", default=None)
    parser.add_argument("--seed", help="override seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config)
        if args.out is not None:
            raw = dict(config.raw, out_dir=args.out)
            config = dataclasses.replace(config, out_dir=args.out, raw=raw)
        if args.seed is not None:
            raw = dict(config.raw, seed=args.seed)
            config = dataclasses.replace(config, seed=args.seed, raw=raw)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        _write_failure_manifest(args, exc)
        return 2
    bundle = run(config)
    if bundle.exit_code == 0:
        print(f"wrote {', '.join(bundle.files)} to {bundle.out_dir}")
    else:
        detail = bundle.manifest["failures"][0]["message"] if bundle.manifest["failures"] else ""
        print(f"{bundle.manifest['status']}: {detail}", file=sys.stderr)
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
