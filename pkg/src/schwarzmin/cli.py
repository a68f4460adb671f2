"""Command line front end.

Every subcommand accepts a JSON config file plus flag overrides, with
explicit flags winning. Outputs are deterministic: the same effective
config produces byte-identical files (shortest round-trip decimals in CSV,
canonical key-sorted JSON). Validation failures exit with code 2 and a
single-line `error: ...` message on stderr; runtime failures exit 1.
"""

import functools
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from . import bounds as bounds_mod
from . import export, geometry, metrics, spectral
from . import profile as profile_mod


class RunConfig:
    """Parsed config: a `metric` section plus one section per subcommand.

    serialize() emits canonical JSON, and parse(serialize(c)) == c.
    """

    def __init__(self, metric=None, params=None):
        self.metric = dict(metric or {})
        self.params = {k: dict(v) for k, v in (params or {}).items()}

    @classmethod
    def parse(cls, text):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        metric = data.pop("metric", {})
        for key, val in data.items():
            if not isinstance(val, dict):
                raise ValueError(f"config section {key!r} must be an object")
        return cls(metric=metric, params=data)

    def serialize(self):
        body = {"metric": self.metric}
        body.update(self.params)
        return json.dumps(body, sort_keys=True, indent=2) + "\n"

    def __eq__(self, other):
        return (isinstance(other, RunConfig) and self.metric == other.metric
                and self.params == other.params)

    def __repr__(self):
        return f"RunConfig(metric={self.metric!r}, params={self.params!r})"


def _load_config(path):
    if path is None:
        return RunConfig()
    with open(path) as fh:
        try:
            return RunConfig.parse(fh.read())
        except json.JSONDecodeError as exc:
            raise ValueError(f"config {path} is not valid JSON: {exc}")


def _param(flag_value, cfg, section, key, default=None):
    # explicit flag > config section > built-in default
    if flag_value is not None:
        return flag_value
    sec = cfg.params.get(section, {})
    if key in sec:
        return sec[key]
    return default


_METRIC_DEFAULTS = {"kind": "schwarzschild", "n": 3, "k": 1.0, "m": 2.0,
                    "beta": 0.5, "r0": 1.0}
_METRIC_KINDS = ("schwarzschild", "cylinder", "beta", "flat")


def _build_metric(kind, n, k, m, beta, r0):
    if kind == "schwarzschild":
        return metrics.schwarzschild_metric(int(n), k=float(k), m=float(m))
    if kind == "cylinder":
        return metrics.cylinder_metric(float(r0))
    if kind == "beta":
        return metrics.beta_metric(float(beta), n=int(n), r0=float(r0))
    if kind == "flat":
        return metrics.flat_metric(int(n), r0=float(r0))
    raise ValueError(
        f"unknown metric kind {kind!r}; expected one of {_METRIC_KINDS}")


def _resolve_metric(cfg, kind, n, k, m, beta, r0):
    spec = dict(_METRIC_DEFAULTS)
    spec.update(cfg.metric)
    for key, val in (("kind", kind), ("n", n), ("k", k), ("m", m),
                     ("beta", beta), ("r0", r0)):
        if val is not None:
            spec[key] = val
    return _build_metric(spec["kind"], spec["n"], spec["k"], spec["m"],
                         spec["beta"], spec["r0"])


def _guard(fn):
    # ValueError is a rejected input (exit 2), RuntimeError a failed run
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except RuntimeError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _metric_options(fn):
    opts = [
        click.option("--metric", "kind", type=click.Choice(_METRIC_KINDS),
                     default=None, help="Metric family."),
        click.option("--n", type=int, default=None,
                     help="Ambient dimension."),
        click.option("--k", type=float, default=None,
                     help="Conformal exponent parameter."),
        click.option("--m", type=float, default=None, help="Mass."),
        click.option("--beta", type=float, default=None,
                     help="Decay rate for the beta family."),
        click.option("--r0", type=float, default=None,
                     help="Boundary radius for cylinder/beta/flat."),
        click.option("--config", "config_path",
                     type=click.Path(exists=True, dir_okay=False),
                     default=None, help="JSON config; flags override it."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _require(value, name):
    if value is None:
        raise ValueError(f"{name} is required (flag --{name.replace('_', '-')}"
                         f" or config entry)")
    return value


def _tolerances(tol):
    if tol is None:
        return 1e-10, 1e-12
    tol = float(tol)
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    return tol, tol * 1e-2


def _solve(met, t0, t_max, x_max, tol):
    rel, ab = _tolerances(tol)
    return profile_mod.solve_profile(met, t0=float(t0), t_max=t_max,
                                     x_max=x_max, rel_tol=rel, abs_tol=ab)


def _sphere_area(d):
    # area of the unit d-sphere
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def _emit(path, text):
    if path is None:
        click.echo(text, nl=False)
    else:
        with open(path, "w") as fh:
            fh.write(text)


@click.group()
def main():
    """Rotationally symmetric free-boundary minimal surfaces.

    Solves the generating-curve equation in radial conformally flat
    exteriors, evaluates height and slope bounds, curvature integrals, and
    spectral index counts, and exports profiles and meshes.
    """


@main.command("profile")
@_metric_options
@click.option("--t0", type=float, default=None,
              help="Boundary height on the horizon sphere, in (0, R0).")
@click.option("--t-max", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--tol", type=float, default=None,
              help="Relative ODE tolerance (default 1e-10).")
@click.option("--out", type=click.Path(), default=None,
              help="CSV path (default profile.csv).")
@click.option("--summary", "summary_path", type=click.Path(), default=None,
              help="JSON summary path (default profile.json).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "both"]),
              default=None, help="Which outputs to write (default both).")
@_guard
def profile_cmd(config_path, kind, n, k, m, beta, r0, t0, t_max, x_max, tol,
                out, summary_path, fmt):
    """Solve one generating curve; write samples and a run summary."""
    cfg = _load_config(config_path)
    met = _resolve_metric(cfg, kind, n, k, m, beta, r0)
    t0 = _require(_param(t0, cfg, "profile", "t0"), "t0")
    t_max = _param(t_max, cfg, "profile", "t_max")
    x_max = _param(x_max, cfg, "profile", "x_max")
    tol = _param(tol, cfg, "profile", "tol")
    out = _param(out, cfg, "profile", "out", "profile.csv")
    summary_path = _param(summary_path, cfg, "profile", "summary",
                          "profile.json")
    fmt = _param(fmt, cfg, "profile", "format", "both")

    curve = _solve(met, t0, t_max, x_max, tol)
    records = geometry.curvature_samples(met, curve)
    rows = [(s.t, s.x, s.xp, s.t * s.xp - s.x, s.Hbar) for s in records]
    resid = max(abs(s.Hbar) for s in records)

    if fmt in ("csv", "both"):
        export.write_csv(out, ("t", "x", "xp", "psi", "Hbar_residual"), rows)
    if fmt in ("json", "both"):
        term = curve.termination
        export.write_json(summary_path, {
            "metric": {"kind": met.kind, "n": met.n, "k": met.k, "m": met.m,
                       "R0": met.r0},
            "t0": float(t0),
            "termination": term.kind,
            "t_star": term.t_star,
            "t_end": float(curve.t[-1]),
            "sup_t": curve.sup_t,
            "max_Hbar_residual": resid,
            "samples": len(curve.t),
            "parametrization_switch": curve.parametrization_switch,
            "backend": curve.backend,
        })
    click.echo(f"profile: {len(rows)} samples, termination="
               f"{curve.termination.kind}")


@main.command("bounds")
@_metric_options
@click.option("--t0", type=float, default=None)
@click.option("--out", type=click.Path(), default=None,
              help="JSON path (default: stdout).")
@_guard
def bounds_cmd(config_path, kind, n, k, m, beta, r0, t0, out):
    """Comparison-envelope height bound h0 at the given t0."""
    cfg = _load_config(config_path)
    met = _resolve_metric(cfg, kind, n, k, m, beta, r0)
    t0 = float(_require(_param(t0, cfg, "bounds", "t0"), "t0"))
    out = _param(out, cfg, "bounds", "out")
    hb = bounds_mod.height_bound(met.n, met.r0, t0)
    _emit(out, export.dump_json({
        "n": met.n,
        "R0": met.r0,
        "t0": t0,
        "h0": hb.h0,
        "quad_error": hb.quad_error,
        "divergent": hb.divergent,
    }))


@main.command("curvature")
@_metric_options
@click.option("--t0", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--out", type=click.Path(), default=None,
              help="CSV path (default curvature.csv).")
@click.option("--summary", "summary_path", type=click.Path(), default=None,
              help="JSON totals path (default curvature.json).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "both"]),
              default=None)
@_guard
def curvature_cmd(config_path, kind, n, k, m, beta, r0, t0, t_max, x_max,
                  tol, out, summary_path, fmt):
    """Principal curvatures along the curve, flat and conformal."""
    cfg = _load_config(config_path)
    met = _resolve_metric(cfg, kind, n, k, m, beta, r0)
    t0 = _require(_param(t0, cfg, "curvature", "t0"), "t0")
    t_max = _param(t_max, cfg, "curvature", "t_max")
    x_max = _param(x_max, cfg, "curvature", "x_max")
    tol = _param(tol, cfg, "curvature", "tol")
    out = _param(out, cfg, "curvature", "out", "curvature.csv")
    summary_path = _param(summary_path, cfg, "curvature", "summary",
                          "curvature.json")
    fmt = _param(fmt, cfg, "curvature", "format", "both")

    curve = _solve(met, t0, t_max, x_max, tol)
    records = geometry.curvature_samples(met, curve)
    nn = met.n
    om = _sphere_area(nn - 2)

    # running flat trace-free integral, same integrand as the total report
    f_vals = np.empty(len(records))
    t_vals = np.empty(len(records))
    for i, s in enumerate(records):
        a2 = s.k1 * s.k1 + (nn - 2) * s.k_rot * s.k_rot
        area = om * s.x ** (nn - 2) * math.hypot(1.0, s.xp)
        f_vals[i] = (a2 - 0.5 * s.H * s.H) * area
        t_vals[i] = s.t
    partial = np.zeros(len(records))
    if len(records) > 1:
        steps = 0.5 * (f_vals[1:] + f_vals[:-1]) * np.diff(t_vals)
        partial[1:] = np.cumsum(steps)

    if fmt in ("csv", "both"):
        rows = [(s.t, s.k1, s.k_rot, s.kbar[0], s.kbar[1], s.Hbar,
                 partial[i]) for i, s in enumerate(records)]
        export.write_csv(out, ("t", "k1", "k_rot", "kbar1", "kbar_rot",
                               "Hbar", "partial_total"), rows)
    if fmt in ("json", "both"):
        payload = {
            "metric": {"kind": met.kind, "n": met.n, "k": met.k, "m": met.m,
                       "R0": met.r0},
            "t0": float(t0),
            "termination": curve.termination.kind,
            "flat_total": None,
            "conf_total": None,
            "converged": None,
            "tail_estimate": None,
        }
        if nn == 3:
            rep = geometry.total_curvature(met, curve)
            payload.update({
                "flat_total": rep.flat_total,
                "conf_total": rep.conf_total,
                "converged": rep.converged,
                "tail_estimate": rep.tail_estimate,
                "cutoffs": list(rep.cutoffs),
                "partials": list(rep.partials),
            })
        export.write_json(summary_path, payload)
    click.echo(f"curvature: {len(records)} samples")


@main.command("index")
@_metric_options
@click.option("--l-max", type=int, default=None,
              help="Largest spherical mode (>= 3).")
@click.option("--r-list", type=str, default=None,
              help="Comma-separated truncation radii.")
@click.option("--grid", "n_grid", type=int, default=None,
              help="Base eigenvalue grid size.")
@click.option("--out", type=click.Path(), default=None,
              help="JSON path (default: stdout).")
@_guard
def index_cmd(config_path, kind, n, k, m, beta, r0, l_max, n_grid, r_list,
              out):
    """Morse index of the horizon slice by stabilized mode counts."""
    cfg = _load_config(config_path)
    met = _resolve_metric(cfg, kind, n, k, m, beta, r0)
    if met.kind != "schwarzschild" or met.n != 3:
        raise ValueError("index counts need the n = 3 schwarzschild family")
    l_max = int(_param(l_max, cfg, "index", "l_max", 3))
    n_grid = int(_param(n_grid, cfg, "index", "grid", 2048))
    r_list = _param(r_list, cfg, "index", "r_list")
    out = _param(out, cfg, "index", "out")
    radii = None
    if r_list is not None:
        radii = [float(v) for v in _parse_grid(r_list, "r-list")]
    rep = spectral.morse_index_sigma0(met.k, met.m, R_list=radii,
                                      l_max=l_max, n_grid=n_grid)
    _emit(out, export.dump_json({
        "k": met.k,
        "m": met.m,
        "condition_311": bool(rep.condition_311),
        "per_mode": rep.per_mode(),
        "index": rep.index,
        "supported_by_theory": rep.supported_by_theory,
        "note": rep.note,
        "identity_residual": rep.identity_residual,
    }))


def _parse_grid(text, name):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    vals = []
    for piece in str(text).split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            vals.append(float(piece))
        except ValueError:
            raise ValueError(f"bad {name} entry {piece!r}")
    return vals


def _sweep_row(args):
    (kind, nn, k, m, beta, r0, t0, t_max, tol) = args
    row = {"kind": kind, "n": nn, "k": k, "m": m, "t0": t0, "R0": None,
           "termination": None, "sup_t": None, "t_star": None, "h0": None,
           "quad_error": None, "divergent": None,
           "max_Hbar_residual": None, "index": None, "error": None}
    try:
        met = _build_metric(kind, nn, k, m, beta, r0)
        row["R0"] = met.r0
        if t0 is not None:
            curve = _solve(met, t0, t_max, None, tol)
            records = geometry.curvature_samples(met, curve)
            row["termination"] = curve.termination.kind
            row["sup_t"] = curve.sup_t
            row["t_star"] = curve.termination.t_star
            row["max_Hbar_residual"] = max(abs(s.Hbar) for s in records)
            hb = bounds_mod.height_bound(met.n, met.r0, float(t0))
            row["h0"] = hb.h0
            row["quad_error"] = hb.quad_error
            row["divergent"] = hb.divergent
    except (ValueError, RuntimeError) as exc:
        # a failed grid point is recorded, not fatal to the sweep
        row["error"] = str(exc).replace("\n", " ")
    return row


_SWEEP_COLUMNS = ("kind", "n", "k", "m", "t0", "R0", "termination", "sup_t",
                  "t_star", "h0", "quad_error", "divergent",
                  "max_Hbar_residual", "index", "error")


@main.command("sweep")
@_metric_options
@click.option("--t0-grid", type=str, default=None,
              help="Comma-separated t0 values.")
@click.option("--k-grid", type=str, default=None,
              help="Comma-separated k values (schwarzschild only).")
@click.option("--m-grid", type=str, default=None,
              help="Comma-separated masses (schwarzschild only).")
@click.option("--t-max", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--index", "want_index", is_flag=True, default=None,
              help="Attach the slice Morse index per (k, m).")
@click.option("--l-max", type=int, default=None)
@click.option("--jobs", type=int, default=None,
              help="Worker processes (default 1). Row order is fixed by "
                   "the grid, not by completion time.")
@click.option("--out", type=click.Path(), default=None,
              help="CSV path (default sweep.csv).")
@_guard
def sweep_cmd(config_path, kind, n, k, m, beta, r0, t0_grid, k_grid, m_grid,
              t_max, tol, want_index, l_max, jobs, out):
    """Tabulate profile runs over a (k, m, t0) grid."""
    cfg = _load_config(config_path)
    spec = dict(_METRIC_DEFAULTS)
    spec.update(cfg.metric)
    for key, val in (("kind", kind), ("n", n), ("k", k), ("m", m),
                     ("beta", beta), ("r0", r0)):
        if val is not None:
            spec[key] = val
    kind = spec["kind"]
    if kind not in _METRIC_KINDS:
        raise ValueError(
            f"unknown metric kind {kind!r}; expected one of {_METRIC_KINDS}")

    t0_grid = _param(t0_grid, cfg, "sweep", "t0_grid")
    k_grid = _param(k_grid, cfg, "sweep", "k_grid")
    m_grid = _param(m_grid, cfg, "sweep", "m_grid")
    t_max = _param(t_max, cfg, "sweep", "t_max")
    tol = _param(tol, cfg, "sweep", "tol")
    want_index = bool(_param(want_index or None, cfg, "sweep", "index",
                             False))
    l_max = int(_param(l_max, cfg, "sweep", "l_max", 3))
    jobs = int(_param(jobs, cfg, "sweep", "jobs", 1))
    out = _param(out, cfg, "sweep", "out", "sweep.csv")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")

    if kind != "schwarzschild" and (k_grid is not None
                                    or m_grid is not None):
        raise ValueError("k/m grids apply to the schwarzschild family only")
    t0_vals = _parse_grid(t0_grid, "t0-grid") if t0_grid is not None else []
    k_vals = (_parse_grid(k_grid, "k-grid") if k_grid is not None
              else [spec["k"]])
    m_vals = (_parse_grid(m_grid, "m-grid") if m_grid is not None
              else [spec["m"]])
    if not k_vals or not m_vals or (not t0_vals and not want_index):
        raise ValueError("empty sweep grid: give --t0-grid values, or "
                         "--index with a k/m grid")
    if want_index and (kind != "schwarzschild" or int(spec["n"]) != 3):
        raise ValueError("index counts need the n = 3 schwarzschild family")

    slots = list(t0_vals) if t0_vals else [None]
    tasks = [(kind, int(spec["n"]), kk, mm, spec["beta"], spec["r0"],
              t0, t_max, tol)
             for kk, mm in itertools.product(k_vals, m_vals)
             for t0 in slots]

    if jobs == 1:
        rows = [_sweep_row(a) for a in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))

    if want_index:
        # one spectral run per (k, m), shared across that block's rows
        cache = {}
        for row in rows:
            key = (row["k"], row["m"])
            if key not in cache:
                try:
                    rep = spectral.morse_index_sigma0(key[0], key[1],
                                                      l_max=l_max)
                    cache[key] = (rep.index, None)
                except (ValueError, RuntimeError) as exc:
                    cache[key] = (None, str(exc).replace("\n", " "))
            idx, err = cache[key]
            row["index"] = idx
            if err is not None and row["error"] is None:
                row["error"] = err

    export.write_csv(out, _SWEEP_COLUMNS,
                     [tuple(row[c] for c in _SWEEP_COLUMNS) for row in rows])
    failed = sum(1 for row in rows if row["error"] is not None)
    click.echo(f"sweep: {len(rows)} rows, {failed} failed")


@main.command("mesh")
@_metric_options
@click.option("--t0", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--samples", type=int, default=None,
              help="Resample the curve to this many rings "
                   "(default: solver output).")
@click.option("--angles", type=int, default=None,
              help="Angular resolution, >= 8 (default 64).")
@click.option("--out", type=click.Path(), default=None,
              help="OBJ path (default mesh.obj).")
@_guard
def mesh_cmd(config_path, kind, n, k, m, beta, r0, t0, t_max, x_max, tol,
             samples, angles, out):
    """Triangulated surface of revolution of a solved profile."""
    cfg = _load_config(config_path)
    met = _resolve_metric(cfg, kind, n, k, m, beta, r0)
    t0 = _require(_param(t0, cfg, "mesh", "t0"), "t0")
    t_max = _param(t_max, cfg, "mesh", "t_max")
    x_max = _param(x_max, cfg, "mesh", "x_max")
    tol = _param(tol, cfg, "mesh", "tol")
    samples = _param(samples, cfg, "mesh", "samples")
    angles = int(_param(angles, cfg, "mesh", "angles", 64))
    out = _param(out, cfg, "mesh", "out", "mesh.obj")

    curve = _solve(met, t0, t_max, x_max, tol)
    t_arr, x_arr = curve.t, curve.x
    if samples is not None:
        samples = int(samples)
        if samples < 2:
            raise ValueError(f"need at least 2 profile samples, "
                             f"got {samples}")
        ti = np.linspace(t_arr[0], t_arr[-1], samples)
        xi = np.interp(ti, t_arr, x_arr)
        t_arr, x_arr = ti, xi
    verts, faces = export.revolution_mesh(np.column_stack([t_arr, x_arr]),
                                          angles)
    export.write_obj(out, verts, faces)
    click.echo(f"mesh: {len(verts)} vertices, {len(faces)} faces -> {out}")


if __name__ == "__main__":
    main()
