#!/usr/bin/env python3
"""Benchmark: compiled vs pure-Python simulation kernel.

Times the full closed-loop integration (10 s at 100 Hz logging, 1 kHz
physics) for the baseline configuration and reports the speedup plus
the worst numerical disagreement between the two kernels.

Usage: python benchmarks/bench_sim.py [--repeats N] [--duration S]
"""

import argparse
import statistics
import time

import numpy as np

from springsim import backend, paper_table
from springsim.simulator import initial_state


def kernel_args(cfg):
    st = initial_state(cfg)
    return (
        cfg.n_ticks,
        cfg.n_substeps,
        cfg.effective_dt,
        cfg.controller.period,
        cfg.geom.link_len,
        cfg.geom.mass,
        cfg.geom.g,
        cfg.controller.kp,
        cfg.controller.kd,
        cfg.h0,
        cfg.amplitude,
        cfg.omega,
        0.0,
        0.0,
        False,
        0.0,
        False,
        st.theta,
        st.theta_dot,
    )


def time_kernel(kernel, cfg, repeats):
    args = kernel_args(cfg)
    n = cfg.n_ticks
    theta = np.empty(n)
    tau = np.empty(n)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        status, *_ = kernel(theta, tau, *args)
        times.append(time.perf_counter() - t0)
        assert status == backend.OK
    return min(times), statistics.median(times), theta.copy(), tau.copy()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--duration", type=float, default=10.0)
    args = parser.parse_args()

    spec = paper_table()[0]
    cfg = type(spec)(
        label=spec.label,
        mass=spec.mass,
        t_period=spec.t_period,
        amplitude=spec.amplitude,
        h0=spec.h0,
        overrides={"duration": args.duration},
    ).to_sim_config()
    steps = cfg.n_ticks * cfg.n_substeps
    print(f"config: {args.duration:g} s, {cfg.n_ticks} ticks x {cfg.n_substeps} substeps "
          f"= {steps} integration steps, {args.repeats} repeats")

    t_py_min, t_py_med, th_py, ta_py = time_kernel(
        backend.get_kernel("python"), cfg, args.repeats
    )
    print(f"python  : best {t_py_min * 1e3:8.3f} ms   median {t_py_med * 1e3:8.3f} ms   "
          f"({steps / t_py_min / 1e6:6.2f} Msteps/s)")

    if not backend.HAVE_COMPILED:
        print("compiled: not built (install with a C compiler to compare)")
        return

    t_c_min, t_c_med, th_c, ta_c = time_kernel(
        backend.get_kernel("compiled"), cfg, args.repeats
    )
    print(f"compiled: best {t_c_min * 1e3:8.3f} ms   median {t_c_med * 1e3:8.3f} ms   "
          f"({steps / t_c_min / 1e6:6.2f} Msteps/s)")
    print(f"speedup : {t_py_min / t_c_min:.1f}x (best-vs-best)")

    d_theta = float(np.abs(th_c - th_py).max())
    d_tau = float(np.abs(ta_c - ta_py).max())
    print(f"parity  : max|dtheta| = {d_theta:.3e} rad, max|dtau| = {d_tau:.3e} N m")


if __name__ == "__main__":
    main()
