#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Regenerates profile.csv, the synthetic profile used by the example config.

Kernels:
  advance        time driven by system-memory traffic
  gather         time driven by shared-memory bank conflicts
  stencil        baseline with heavy DRAM traffic
  stencil_tiled  same workloads, DRAM traffic halved
"""
import csv
import pathlib

import numpy as np

EVENTS = [
    "inst_executed_fp64_pipe_s0",
    "inst_executed_fp64_pipe_s1",
    "inst_executed_fma_pipe_s0",
    "not_predicated_off_thread_inst_executed",
    "shared_ld_transactions",
    "shared_st_transactions",
    "shared_ld_bank_conflict",
    "shared_st_bank_conflict",
    "l2_subp0_read_tex_sector_queries",
    "l2_subp0_total_read_sector_queries",
    "l2_subp0_total_write_sector_queries",
    "l2_subp0_read_hit_sector_queries",
    "fb_subp0_read_sectors",
    "fb_subp0_write_sectors",
    "fb_subp0_read_misses",
    "global_load",
    "global_store",
    "l2_subp0_read_sysmem_sector_queries",
    "pcie_rx_active_pulse",
    "elapsed_cycles_sm",
]
WORKLOADS = [("leblanc", 1.0), ("sedov", 1.7), ("noh", 2.3), ("saltzman", 3.1), ("hotspot", 3.8),
             ("blast", 4.6)]
FREQS = [1005, 1200, 1380]

DRIVERS = {
    "advance": ["global_load", "global_store", "l2_subp0_read_sysmem_sector_queries"],
    "gather": ["shared_ld_bank_conflict", "shared_st_bank_conflict"],
    "stencil": ["fb_subp0_read_sectors", "fb_subp0_write_sectors"],
}


def levels(rng):
    return {e: 10 ** rng.uniform(4, 6) for e in EVENTS}


def counts(rng, level, size, freq):
    # Each counter grows with the problem size and carries its own lognormal
    # jitter, so that no two columns are collinear.
    c = {e: level[e] * size * rng.lognormal(0.0, 0.35) for e in EVENTS}
    c["elapsed_cycles_sm"] *= freq / 1200.0
    return c


def row_for(rng, kernel, drivers, level, size, freq, c, dram_scale=1.0):
    for e in ("fb_subp0_read_sectors", "fb_subp0_write_sectors"):
        c[e] *= dram_scale
    drive = sum(c[e] / level[e] for e in drivers) / len(drivers)
    time_s = 1e-3 * (0.05 * size + drive) * (1200.0 / freq) ** 0.2 * rng.normal(1.0, 0.01)
    util = float(np.clip(0.78 - 0.04 * drive + rng.normal(0, 0.005), 0.52, 0.79))
    power = 120.0 + 60.0 * util + 0.05 * freq
    out = {"kernel": kernel, "time_s": f"{time_s:.9g}", "sm_util": f"{util:.4f}",
           "power_w": f"{power:.2f}"}
    out.update({e: str(int(round(c[e]))) for e in EVENTS})
    return out


def main():
    rng = np.random.default_rng(20240611)
    rows = []
    level = {k: levels(rng) for k in ("advance", "gather", "stencil")}
    for name, size in WORKLOADS:
        for freq in FREQS:
            for kernel in ("advance", "gather"):
                c = counts(rng, level[kernel], size, freq)
                r = row_for(rng, kernel, DRIVERS[kernel], level[kernel], size, freq, c)
                r.update(workload=name, frequency_mhz=freq)
                rows.append(r)
            c = counts(rng, level["stencil"], size, freq)
            for kernel, scale in (("stencil", 1.0), ("stencil_tiled", 0.5)):
                r = row_for(rng, kernel, DRIVERS["stencil"], level["stencil"], size, freq,
                            dict(c), scale)
                r.update(workload=name, frequency_mhz=freq)
                rows.append(r)
    rows.sort(key=lambda r: (r["kernel"], r["workload"], r["frequency_mhz"]))
    header = ["kernel", "workload", "frequency_mhz", "time_s", "sm_util", "power_w"] + EVENTS
    out = pathlib.Path(__file__).with_name("profile.csv")
    with out.open("w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=header, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


if __name__ == "__main__":
    main()
