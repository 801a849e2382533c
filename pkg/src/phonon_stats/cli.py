"""Command-line surface: stats, sweeps, figure datasets, validation reports.

Exit codes: 0 success; 1 configuration/validation problems (bad flags, bad
ranges, a validate run outside tolerance, an empty grid); 2 when a
computation started but did not converge (series term cap, truncation
budget, unstable recursion, singular or unphysical solve).

Model names: ``exact`` (series), ``hitemp`` (high-temperature closed forms),
``oracle-reduced`` / ``oracle-rwa`` / ``oracle-prerwa`` (truncated Lindblad
solves), and ``auto``, which picks ``hitemp`` when n_th/C > 1e6 (past the
series term budget) and ``exact`` otherwise, per point.

Sweeps and figure datasets are CSV (headered, RFC-4180 quoting via the csv
module); single reports and validation summaries are JSON. Floats are
rendered with %.17g so outputs round-trip and runs are byte-reproducible.
Undefined g2 is an empty CSV field / JSON null, never 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from . import exact, hitemp, lindblad
from .errors import (
    BudgetExceeded,
    DomainError,
    FixedPointDiverged,
    NotConverged,
    RecursionUnstable,
    SingularSystem,
    UnphysicalState,
)
from .params import ReducedParams
from .report import SteadyStateReport

__all__ = ["main", "RangeSpec"]

_LOG = logging.getLogger("phonon_stats.cli")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOCONV = 2

AUTO_HITEMP_RATIO = 1e6

_ANALYTIC = ("exact", "hitemp", "auto")
_ORACLES = ("oracle-reduced", "oracle-rwa", "oracle-prerwa")
_MODELS = _ANALYTIC + _ORACLES

_NONCONV = (
    NotConverged,
    FixedPointDiverged,
    RecursionUnstable,
    SingularSystem,
    UnphysicalState,
    BudgetExceeded,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; that slot is reserved
    for non-convergence here, so usage errors are rethrown and mapped to 1."""

    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class RangeSpec:
    """Parameter range ``lo:hi:steps:log|lin``."""

    lo: float
    hi: float
    steps: int
    spacing: str

    @classmethod
    def parse(cls, text: str) -> "RangeSpec":
        parts = str(text).split(":")
        if len(parts) != 4:
            raise DomainError(f"range {text!r} is not of the form lo:hi:steps:log|lin")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise DomainError(f"range {text!r}: {exc}") from exc
        spacing = parts[3]
        if spacing not in ("log", "lin"):
            raise DomainError(f"range spacing must be 'log' or 'lin', got {spacing!r}")
        if steps < 1:
            raise DomainError(f"range needs at least one step, got {steps}")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError(f"range {text!r} has non-finite endpoints")
        if spacing == "log" and (lo <= 0.0 or hi <= 0.0):
            raise DomainError("log-spaced range needs positive endpoints")
        return cls(lo, hi, steps, spacing)

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.steps)
        return np.linspace(self.lo, self.hi, self.steps)


def _parse_set(text: str) -> list[float]:
    try:
        vals = [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"bad value list {text!r}: {exc}") from exc
    return vals


def _fmt(value) -> str:
    """%.17g float rendering; None (undefined g2) becomes an empty field."""
    if value is None:
        return ""
    return "%.17g" % float(value)


# ---------------------------------------------------------------------------
# config resolution


def _merge_config(ns: argparse.Namespace) -> argparse.Namespace:
    """Overlay a JSON --config file under the flags (flags win)."""
    data = vars(ns).copy()
    path = data.pop("config", None)
    if path:
        with open(path) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise DomainError("--config file must hold a JSON object")
        known = {k for k in data if k != "func"}
        unknown = set(loaded) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        for key, val in loaded.items():
            if data.get(key) is None:
                data[key] = val
    return argparse.Namespace(**data)


def _get(cfg, name, default):
    val = getattr(cfg, name, None)
    return default if val is None else val


def _need(cfg, name, flag):
    val = getattr(cfg, name, None)
    if val is None:
        raise DomainError(f"{flag} is required (flag or config file)")
    return val


# ---------------------------------------------------------------------------
# point evaluation


def _resolve_model(name: str, C: float, n_th: float) -> str:
    if name != "auto":
        return name
    if C > 0.0 and n_th / C > AUTO_HITEMP_RATIO:
        return "hitemp"
    return "exact"


def _oracle_model(name, C, n_th, cfg):
    """Instantiate a Lindblad model plus the truncation ladder's start."""
    gamma = float(_get(cfg, "gamma", 1.0))
    if name == "oracle-reduced":
        return lindblad.ReducedModel(C, n_th), lindblad.TruncationSpec(8, 1)
    kappa = float(_get(cfg, "kappa", 400.0 if name == "oracle-rwa" else 2000.0))
    # Coupling chosen so that eliminating the cavity leaves two-phonon
    # damping with cooperativity C: the second-order elimination of
    # (kappa/2) D[a] against H = g (a^dag b^2 + h.c.) gives Gamma = 4 g^2/kappa.
    g = math.sqrt(C * gamma * kappa / 4.0)
    if name == "oracle-rwa":
        model = lindblad.TwoModeRWAModel(g, kappa, gamma, n_th)
        return model, lindblad.TruncationSpec(8, 2)
    omega = float(_get(cfg, "omega_m_eff", 50.0 * kappa))
    # Default drive strength saturates g0*n_c/omega' = 1e-3 (with g0 = g/sqrt(n_c)),
    # the deep-sideband hierarchy under which the pre-RWA terms were ordered.
    n_c_default = (1e-3 * omega / g) ** 2 if g > 0.0 else 1.0
    n_c = float(_get(cfg, "n_c", n_c_default))
    reduced = ReducedParams(
        C=C,
        n_th=n_th,
        n_c=n_c,
        g=g,
        omega_m_eff=omega,
        Gamma_opt=C * gamma,
        Delta_c=-2.0 * omega,
    )
    model = lindblad.PreRWAModel(
        reduced,
        kappa,
        gamma,
        n_th,
        include_quadratic_fluctuation=bool(_get(cfg, "include_quad_fluct", False)),
    )
    return model, lindblad.TruncationSpec(8, 3)


def _point_report(name, C, n_th, cfg) -> tuple[str, SteadyStateReport]:
    """Evaluate one (C, n_th) point under the named model."""
    name = _resolve_model(name, C, n_th)
    if name == "exact":
        return name, exact.steady_state_exact(C, n_th)
    if name == "hitemp":
        return name, hitemp.steady_state_hitemp(C, n_th)
    if name not in _ORACLES:
        raise DomainError(f"unknown model {name!r}")
    model, initial = _oracle_model(name, C, n_th, cfg)
    trunc = getattr(cfg, "trunc", None)
    if trunc is not None:
        dim_cav = _get(cfg, "trunc_cav", 4 if model.multimode else 1)
        spec = lindblad.TruncationSpec(int(trunc), int(dim_cav))
        report = lindblad.observables(lindblad.steady_state(model.build(spec)))
    else:
        _, report = lindblad.converge_truncation(model, initial)
    return name, report


def _point_worker(task):
    """Sweep worker (module-level so it pickles); shares nothing."""
    C, n_th, model, cfg_dict = task
    cfg = argparse.Namespace(**cfg_dict)
    name, rep = _point_report(model, C, n_th, cfg)
    return {
        "C": C,
        "n_th": n_th,
        "model": name,
        "n_ss": rep.n_ss,
        "g2": rep.g2,
        "regime": rep.regime.value,
    }


# ---------------------------------------------------------------------------
# output helpers


def _emit_text(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands


def cmd_stats(cfg) -> int:
    C = float(_need(cfg, "C", "--C"))
    n_th = float(_need(cfg, "n_th", "--n-th"))
    name, report = _point_report(_get(cfg, "model", "auto"), C, n_th, cfg)
    payload = {"params": {"C": C, "n_th": n_th, "model": name}}
    payload.update(report.to_json_dict())
    _emit_text(_json_dumps(payload), cfg.out)
    return EXIT_OK


def _grid_values(cfg, *, c_default=None, nth_default=None):
    if getattr(cfg, "c_set", None) is not None:
        c_values = _parse_set(cfg.c_set)
    elif getattr(cfg, "c_range", None) is not None:
        c_values = list(RangeSpec.parse(cfg.c_range).values())
    elif getattr(cfg, "C", None) is not None:
        c_values = [float(cfg.C)]
    else:
        c_values = c_default
    if getattr(cfg, "nth_set", None) is not None:
        nth_values = _parse_set(cfg.nth_set)
    elif getattr(cfg, "nth_range", None) is not None:
        nth_values = list(RangeSpec.parse(cfg.nth_range).values())
    elif getattr(cfg, "n_th", None) is not None:
        nth_values = [float(cfg.n_th)]
    else:
        nth_values = nth_default
    return c_values, nth_values


def cmd_sweep(cfg) -> int:
    c_values, nth_values = _grid_values(cfg)
    if c_values is None:
        raise DomainError("sweep needs --c-range, --c-set or --C")
    if nth_values is None:
        raise DomainError("sweep needs --nth-range, --nth-set or --n-th")
    if len(c_values) == 0 or len(nth_values) == 0:
        raise DomainError("sweep grid is empty")
    model = _get(cfg, "model", "auto")
    cfg_dict = {k: v for k, v in vars(cfg).items() if k != "func"}
    tasks = [
        (float(C), float(n_th), model, cfg_dict)
        for n_th in nth_values
        for C in c_values
    ]
    jobs = int(_get(cfg, "jobs", 1))
    if jobs > 1:
        with Pool(processes=jobs) as pool:
            rows = pool.map(_point_worker, tasks)
    else:
        rows = [_point_worker(t) for t in tasks]

    fmt = _get(cfg, "format", "csv")
    if fmt == "json":
        for row in rows:  # floats stay floats; g2 None -> null
            row["C"], row["n_th"] = float(row["C"]), float(row["n_th"])
        _emit_text(_json_dumps(rows), cfg.out)
    elif fmt == "csv":
        header = ["C", "n_th", "model", "n_ss", "g2", "regime"]
        csv_rows = [
            [_fmt(r["C"]), _fmt(r["n_th"]), r["model"], _fmt(r["n_ss"]), _fmt(r["g2"]), r["regime"]]
            for r in rows
        ]
        _emit_text(_csv_text(header, csv_rows), cfg.out)
    else:
        raise DomainError(f"unknown format {fmt!r}")
    return EXIT_OK


# figure datasets: captions' parameter sets, hard-coded, flag-overridable

_FIG_NTH_HI = (1e3, 1e4, 1e5, 1e6)
_FIG_NTH_LO = (1.0, 10.0, 20.0, 40.0)


def _curve_rows(nth_values, c_values, model_name, cfg):
    # curves only need the two observables; skip the full report so the
    # population window (huge when n_ss is large) is never materialized
    if model_name == "hitemp":
        mean_fn, g2_fn = hitemp.mean_phonon_hitemp, hitemp.g2_hitemp
    else:
        mean_fn, g2_fn = exact.mean_phonon_exact, exact.g2_exact
    rows = []
    for n_th in nth_values:
        for C in c_values:
            n_ss = mean_fn(float(C), float(n_th))
            g2 = g2_fn(float(C), float(n_th))
            rows.append([_fmt(C), _fmt(n_th), _fmt(n_ss), _fmt(g2)])
    return rows


def cmd_figure(cfg) -> int:
    fig_id = int(cfg.fig_id)
    if not 1 <= fig_id <= 6:
        raise DomainError(f"fig_id must be in 1..6, got {fig_id}")
    outdir = cfg.out or "."
    os.makedirs(outdir, exist_ok=True)
    csv_name = f"figure{fig_id}.csv"
    script_name = f"figure{fig_id}_plot.py"
    header = ["C", "n_th", "n_ss", "g2"]

    if fig_id in (1, 2):
        nth_values = _parse_set(cfg.nth_set) if cfg.nth_set else list(_FIG_NTH_HI)
        default = "1e-9:1e3:120:log" if fig_id == 1 else "1e-9:1e6:120:log"
        c_values = RangeSpec.parse(cfg.c_range or default).values()
        rows = _curve_rows(nth_values, c_values, "hitemp", cfg)
    elif fig_id == 3:
        C = float(_get(cfg, "C", 1e2))
        n_th = float(_get(cfg, "n_th", 1e4))
        _, rep = _point_report("hitemp", C, n_th, cfg)
        header = ["n", "P"]
        rows = [[_fmt(n), _fmt(p)] for n, p in enumerate(rep.populations)]
    elif fig_id == 4:
        nth_values = _parse_set(cfg.nth_set) if cfg.nth_set else list(_FIG_NTH_LO)
        c_values = RangeSpec.parse(cfg.c_range or "0.1:1e3:100:log").values()
        rows = _curve_rows(nth_values, c_values, "exact", cfg)
    elif fig_id == 5:
        c_values = RangeSpec.parse(cfg.c_range or "0.1:1e3:40:log").values()
        nth_values = (
            _parse_set(cfg.nth_set)
            if cfg.nth_set
            else list(RangeSpec.parse("0.1:40:40:log").values())
        )
        rows = _curve_rows(nth_values, c_values, "exact", cfg)
    else:  # fig_id == 6
        n_th = float(_get(cfg, "n_th", 20.0))
        c_values = _parse_set(cfg.c_set) if cfg.c_set else [1.0, 41.0, 1000.0]
        pops = []
        for C in c_values:
            n_ss = exact.mean_phonon_exact(float(C), n_th)
            pops.append((float(C), n_ss))
        m_max = max(exact.default_m_max(n_ss, n_th) for _, n_ss in pops)
        cols = [
            exact.phonon_populations_exact(C, n_th, m_max) for C, _ in pops
        ]
        header = ["n"] + [f"P_C{C:g}" for C, _ in pops]
        rows = [
            [_fmt(n)] + [_fmt(col[n]) for col in cols] for n in range(m_max + 1)
        ]

    csv_path = os.path.join(outdir, csv_name)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    script_path = os.path.join(outdir, script_name)
    with open(script_path, "w") as fh:
        fh.write(_plot_script(fig_id, csv_name))
    print(csv_path)
    print(script_path)
    return EXIT_OK


_SCRIPT_CURVES = '''"""Plot %(csv)s: %(ycol)s against C, one curve per n_th."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(list)
with open("%(csv)s", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["%(ycol)s"] != "":
            series[float(row["n_th"])].append((float(row["C"]), float(row["%(ycol)s"])))

fig, ax = plt.subplots(figsize=(5, 3.5))
for n_th in sorted(series):
    pts = sorted(series[n_th])
    ax.plot([p[0] for p in pts], [p[1] for p in pts], label="n_th = %%g" %% n_th)
ax.set_xscale("log")
%(extra)s
ax.set_xlabel("cooperativity C")
ax.set_ylabel("%(ylabel)s")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("%(png)s", dpi=200)
'''

_SCRIPT_DIST = '''"""Plot %(csv)s: Fock distribution(s)."""
import csv

import matplotlib.pyplot as plt

with open("%(csv)s", newline="") as fh:
    reader = csv.DictReader(fh)
    cols = [name for name in reader.fieldnames if name != "n"]
    data = {name: [] for name in cols}
    ns = []
    for row in reader:
        ns.append(float(row["n"]))
        for name in cols:
            data[name].append(float(row[name]))

fig, ax = plt.subplots(figsize=(5, 3.5))
for name in cols:
    ax.step(ns, data[name], where="mid", label=name)
ax.set_yscale("log")
ax.set_xlabel("phonon number n")
ax.set_ylabel("P(n)")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("%(png)s", dpi=200)
'''

_SCRIPT_CONTOUR = '''"""Plot %(csv)s: g2 over the (C, n_th) plane with the g2 = 1 contour."""
import csv

import matplotlib.pyplot as plt
import numpy as np

rows = []
with open("%(csv)s", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["g2"] != "":
            rows.append((float(row["C"]), float(row["n_th"]), float(row["g2"])))

C = np.array(sorted({r[0] for r in rows}))
N = np.array(sorted({r[1] for r in rows}))
G = np.full((len(N), len(C)), np.nan)
ci = {c: i for i, c in enumerate(C)}
ni = {n: i for i, n in enumerate(N)}
for c, n, g in rows:
    G[ni[n], ci[c]] = g

fig, ax = plt.subplots(figsize=(5, 3.8))
mesh = ax.pcolormesh(C, N, G, shading="nearest", cmap="coolwarm", vmin=0.5, vmax=2.0)
ax.contour(C, N, G, levels=[1.0], colors="k", linewidths=1.5)
ax.plot(2.0 * N + 1.0, N, "w--", lw=1.0, label="C = 2 n_th + 1")
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlim(C.min(), C.max())
ax.set_xlabel("cooperativity C")
ax.set_ylabel("n_th")
ax.legend(fontsize=8, loc="upper left")
fig.colorbar(mesh, ax=ax, label="g2(0)")
fig.tight_layout()
fig.savefig("%(png)s", dpi=200)
'''


def _plot_script(fig_id: int, csv_name: str) -> str:
    png = f"figure{fig_id}.png"
    if fig_id in (1, 4):
        return _SCRIPT_CURVES % {
            "csv": csv_name,
            "ycol": "n_ss",
            "ylabel": "mean phonon number n_ss",
            "extra": 'ax.set_yscale("log")',
            "png": png,
        }
    if fig_id == 2:
        return _SCRIPT_CURVES % {
            "csv": csv_name,
            "ycol": "g2",
            "ylabel": "g2(0)",
            "extra": "",
            "png": png,
        }
    if fig_id in (3, 6):
        return _SCRIPT_DIST % {"csv": csv_name, "png": png}
    return _SCRIPT_CONTOUR % {"csv": csv_name, "png": png}


# validation


def _rel_dev(a: float, b: float, floor: float = 1e-9) -> float:
    scale = max(abs(a), abs(b))
    if scale < floor:
        return abs(a - b)
    return abs(a - b) / scale


def _pop_l1(pa, pb) -> float:
    n = max(len(pa), len(pb))
    a = np.zeros(n)
    a[: len(pa)] = pa
    b = np.zeros(n)
    b[: len(pb)] = pb
    return float(np.abs(a - b).sum())


def cmd_validate(cfg) -> int:
    c_values, nth_values = _grid_values(
        cfg,
        c_default=[0.1, 1.0, 3.0, 11.0, 50.0],
        nth_default=[0.0, 0.5, 1.0, 3.0, 5.0],
    )
    if not c_values or not nth_values:
        print("error: validation grid is empty", file=sys.stderr)
        return EXIT_CONFIG
    tol_nss = float(_get(cfg, "tol_nss", 1e-6))
    tol_g2 = float(_get(cfg, "tol_g2", 1e-6))
    tol_pop = float(_get(cfg, "tol_pop", 1e-5))
    model = _get(cfg, "model", "auto")
    oracle = _get(cfg, "oracle", "oracle-reduced")
    if oracle not in _ORACLES:
        raise DomainError(f"--oracle must be one of {_ORACLES}, got {oracle!r}")

    points = []
    for n_th in nth_values:
        for C in c_values:
            n_th = float(n_th)
            C = float(C)
            a_name, a_rep = _point_report(model, C, n_th, cfg)
            try:
                _, o_rep = _point_report(oracle, C, n_th, cfg)
            except BudgetExceeded as exc:
                _LOG.warning("skipping C=%g n_th=%g: %s", C, n_th, exc)
                points.append(
                    {"C": C, "n_th": n_th, "model": a_name, "skipped": True,
                     "reason": str(exc)}
                )
                continue
            dev_g2 = None
            if a_rep.g2 is not None and o_rep.g2 is not None:
                dev_g2 = _rel_dev(a_rep.g2, o_rep.g2)
            points.append(
                {
                    "C": C,
                    "n_th": n_th,
                    "model": a_name,
                    "skipped": False,
                    "dev_n_ss": _rel_dev(a_rep.n_ss, o_rep.n_ss),
                    "dev_g2": dev_g2,
                    "pop_l1": _pop_l1(a_rep.populations, o_rep.populations),
                }
            )

    live = [p for p in points if not p["skipped"]]
    devs_nss = [p["dev_n_ss"] for p in live]
    devs_g2 = [p["dev_g2"] for p in live if p["dev_g2"] is not None]
    devs_pop = [p["pop_l1"] for p in live]
    summary = {
        "n_points": len(points),
        "n_skipped": len(points) - len(live),
        "max_dev_n_ss": max(devs_nss) if devs_nss else None,
        "median_dev_n_ss": float(np.median(devs_nss)) if devs_nss else None,
        "max_dev_g2": max(devs_g2) if devs_g2 else None,
        "median_dev_g2": float(np.median(devs_g2)) if devs_g2 else None,
        "max_pop_l1": max(devs_pop) if devs_pop else None,
        "median_pop_l1": float(np.median(devs_pop)) if devs_pop else None,
    }
    passed = (
        (not devs_nss or summary["max_dev_n_ss"] <= tol_nss)
        and (not devs_g2 or summary["max_dev_g2"] <= tol_g2)
        and (not devs_pop or summary["max_pop_l1"] <= tol_pop)
    )
    payload = {
        "grid": {"C": [float(c) for c in c_values],
                 "n_th": [float(n) for n in nth_values]},
        "model": model,
        "oracle": oracle,
        "tolerances": {"n_ss": tol_nss, "g2": tol_g2, "pop_l1": tol_pop},
        "points": points,
        "summary": summary,
        "pass": passed,
    }
    _emit_text(_json_dumps(payload), cfg.out)
    return EXIT_OK if passed else EXIT_CONFIG


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="phonon-stats",
        description="Steady-state phonon statistics under two-phonon optical damping.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_common(p, *, point=True, oracle=True):
        p.add_argument("--config", default=None, help="JSON config file; flags override it")
        p.add_argument("--out", default=None, help="output path (figure: output directory)")
        if point:
            p.add_argument("--C", type=float, default=None, help="multiphoton cooperativity")
            p.add_argument("--n-th", type=float, default=None, help="bath occupation")
        if oracle:
            p.add_argument("--trunc", type=int, default=None,
                           help="fixed mechanical truncation (skips the convergence ladder)")
            p.add_argument("--trunc-cav", type=int, default=None,
                           help="fixed cavity truncation for multimode oracles")
            p.add_argument("--kappa", type=float, default=None,
                           help="cavity linewidth for the two-mode oracles")
            p.add_argument("--gamma", type=float, default=None,
                           help="mechanical linewidth (default 1)")
            p.add_argument("--omega-m-eff", type=float, default=None,
                           help="effective mechanical frequency (pre-RWA oracle)")
            p.add_argument("--n-c", type=float, default=None,
                           help="intracavity photon number (pre-RWA oracle)")
            p.add_argument("--include-quad-fluct", action="store_true", default=None,
                           help="keep the quadratic fluctuation term (pre-RWA oracle)")

    p_stats = sub.add_parser("stats", help="one parameter point, JSON report")
    p_stats.add_argument("--model", choices=_MODELS, default=None)
    add_common(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    p_sweep = sub.add_parser("sweep", help="grid of points, CSV (or JSON) rows")
    p_sweep.add_argument("--model", choices=_MODELS, default=None)
    p_sweep.add_argument("--c-range", default=None, help="lo:hi:steps:log|lin")
    p_sweep.add_argument("--nth-range", default=None, help="lo:hi:steps:log|lin")
    p_sweep.add_argument("--c-set", default=None, help="comma-separated C values")
    p_sweep.add_argument("--nth-set", default=None, help="comma-separated n_th values")
    p_sweep.add_argument("--jobs", type=int, default=None, help="worker processes")
    p_sweep.add_argument("--format", choices=("csv", "json"), default=None)
    add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_fig = sub.add_parser("figure", help="figure dataset CSV + plotting script")
    p_fig.add_argument("fig_id", type=int, help="figure number, 1..6")
    p_fig.add_argument("--c-range", default=None, help="override the C grid")
    p_fig.add_argument("--c-set", default=None, help="override discrete C values (figure 6)")
    p_fig.add_argument("--nth-set", default=None, help="override the n_th set")
    add_common(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_val = sub.add_parser("validate", help="analytic-vs-oracle deviation report")
    p_val.add_argument("--model", choices=_ANALYTIC, default=None,
                       help="analytic side (default auto)")
    p_val.add_argument("--oracle", choices=_ORACLES, default=None,
                       help="oracle side (default oracle-reduced)")
    p_val.add_argument("--c-range", default=None)
    p_val.add_argument("--nth-range", default=None)
    p_val.add_argument("--c-set", default=None)
    p_val.add_argument("--nth-set", default=None)
    p_val.add_argument("--tol-nss", type=float, default=None)
    p_val.add_argument("--tol-g2", type=float, default=None)
    p_val.add_argument("--tol-pop", type=float, default=None)
    add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("PHONON_STATS_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _merge_config(ns)
        return ns.func(cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NONCONV as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
