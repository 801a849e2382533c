"""Benchmark the series kernels: numba lane vs numpy lane.

Times ``series_logsums`` (the S_0/S_1/S_2 triple behind the mean and g2)
and ``population_logsums`` (the per-level sums behind the Fock
distribution) at application-shaped arguments nu = x + 1, i.e. a unit
cooperativity sweep over bath occupations n_th = x / 2. The numba lane is
JIT-warmed before timing; the reported figure is the median of --repeats
calls. Run with PHONON_STATS_NO_NUMBA=1 to check the numpy lane is what
you get when the compiler is unavailable (the numba columns then drop out).

Typical output on one 2024-vintage x86 core: the scalar numba loop wins
by ~5-20x at small x where the vectorized lane is all fixed overhead, and
the gap narrows at x ~ 1e6 where both are dominated by lgamma throughput.
"""

from __future__ import annotations

import argparse
import statistics
import time

from phonon_stats import _kernels

X_VALUES = (10.0, 1e3, 1e5, 1e6)
POP_M_MAX = 60


def _time_call(fn, args, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _fmt_ms(seconds):
    return f"{1e3 * seconds:10.3f}"


def bench_series(repeats):
    print(f"series_logsums (median of {repeats}, ms/call)")
    header = f"{'x':>10} {'terms':>9} {'numpy':>10}"
    if _kernels.HAS_NUMBA:
        header += f" {'numba':>10} {'speedup':>8} {'max|dlog|':>10}"
    print(header)
    for x in X_VALUES:
        nu = x + 1.0
        ref = _kernels.series_logsums_numpy(nu, x)
        t_np = _time_call(_kernels.series_logsums_numpy, (nu, x, 1e-18, 10_000_000), repeats)
        line = f"{x:10.0e} {ref[3]:9d} {_fmt_ms(t_np)}"
        if _kernels.HAS_NUMBA:
            fn = _kernels.series_logsums_numba
            out = fn(nu, x, 1e-18, 10_000_000)  # warm the JIT / load cache
            t_nb = _time_call(fn, (nu, x, 1e-18, 10_000_000), repeats)
            dev = max(abs(out[j] - ref[j]) for j in range(3))
            line += f" {_fmt_ms(t_nb)} {t_np / t_nb:7.1f}x {dev:10.2e}"
        print(line)


def bench_population(repeats):
    print(f"\npopulation_logsums, m_max={POP_M_MAX} (median of {repeats}, ms/call)")
    header = f"{'y':>10} {'numpy':>10}"
    if _kernels.HAS_NUMBA:
        header += f" {'numba':>10} {'speedup':>8} {'max|dlog|':>10}"
    print(header)
    for x in X_VALUES:
        nu, y = x + 1.0, x / 2.0
        ref = _kernels.population_logsums_numpy(nu, y, POP_M_MAX)
        t_np = _time_call(
            _kernels.population_logsums_numpy, (nu, y, POP_M_MAX, 1e-18, 10_000_000), repeats
        )
        line = f"{y:10.0e} {_fmt_ms(t_np)}"
        if _kernels.HAS_NUMBA:
            fn = _kernels.population_logsums_numba
            out = fn(nu, y, POP_M_MAX, 1e-18, 10_000_000)
            t_nb = _time_call(fn, (nu, y, POP_M_MAX, 1e-18, 10_000_000), repeats)
            dev = float(max(abs(out[0] - ref[0])))
            line += f" {_fmt_ms(t_nb)} {t_np / t_nb:7.1f}x {dev:10.2e}"
        print(line)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=9, help="timing repeats per point")
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        print("numba lane unavailable (not installed or PHONON_STATS_NO_NUMBA set); "
              "timing numpy lane only\n")
    bench_series(args.repeats)
    bench_population(args.repeats)


if __name__ == "__main__":
    main()
