"""Compare the compiled stepping kernel against the pure-Python path.

Runs each preset on both backends (where the compiled kernel applies),
without writing any CSV output, and reports steps per second.  The time
horizon is truncated step-count-first so that dt -- and therefore the
stability behaviour of the run -- is exactly the preset's own.

Usage:
    python3 benchmarks/bench_backends.py [--steps N] [--repeats K] [preset ...]
"""

from __future__ import annotations

import argparse
import dataclasses
import time

from cprsv.config import preset, preset_names
from cprsv.driver import compiled_applicable, run_simulation
from cprsv.stepping import TimeGrid


def truncate(cfg, max_steps):
    """Shorten a run to at most max_steps while keeping its dt unchanged."""
    steps = min(max_steps, cfg.time.num_steps)
    grid = TimeGrid(t_final=cfg.time.dt * steps, num_steps=steps)
    output = dataclasses.replace(cfg.output, snapshot_times=(), diagnostics=False)
    return dataclasses.replace(cfg, time=grid, output=output)


def best_time(cfg, backend, repeats):
    """Best-of-N wall time for one full integration, in seconds."""
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        run_simulation(cfg, backend=backend, write_outputs=False)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("presets", nargs="*", default=preset_names(),
                        help="preset names to benchmark (default: all)")
    parser.add_argument("--steps", type=int, default=3000,
                        help="cap on time steps per run (default: 3000)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per case; best is reported")
    args = parser.parse_args(argv)

    header = f"{'preset':<18} {'backend':<9} {'steps':>6} {'time [s]':>9} {'steps/s':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name in args.presets:
        cfg = truncate(preset(name), args.steps)
        steps = cfg.time.num_steps
        t_py = best_time(cfg, "python", args.repeats)
        print(f"{name:<18} {'python':<9} {steps:>6} {t_py:>9.3f} {steps / t_py:>10.0f} {'1.0x':>8}")
        if compiled_applicable(cfg):
            t_c = best_time(cfg, "compiled", args.repeats)
            print(f"{name:<18} {'compiled':<9} {steps:>6} {t_c:>9.3f} "
                  f"{steps / t_c:>10.0f} {t_py / t_c:>7.1f}x")
        else:
            print(f"{name:<18} {'compiled':<9} {'not applicable to this configuration'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
