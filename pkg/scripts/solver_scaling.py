#!/usr/bin/env python3
"""Time the exact solver across fleet sizes and layer counts.

The state space grows as K * L * 2**K, so wall time roughly doubles per
added device; this script prints the measured curve for a synthetic fleet.
"""

import argparse
import dataclasses
import random
import time

from coldpipe import cost_tables, dp_scheduler
from coldpipe.experiment import _random_device
from coldpipe.model_profile import ModelConfig, build_profiles


def synthetic_fleet(num_devices: int, seed: int = 7):
    rng = random.Random(seed)
    # plenty of memory so timing reflects the full state space
    return [dataclasses.replace(_random_device(rng, i), memory_bytes=1e18)
            for i in range(num_devices)]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-devices", type=int, default=12)
    parser.add_argument("--layers", type=int, default=60)
    parser.add_argument("--tokens", type=int, default=2048)
    args = parser.parse_args()

    cfg = ModelConfig(d_model=2048, h_q=16, h_kv=4, d_head=128, d_ff=8192,
                      num_layers=args.layers)
    profiles = build_profiles(cfg, args.tokens)

    print(f"{'K':>3} {'states':>12} {'seconds':>10}")
    for k in range(2, args.max_devices + 1):
        devices = synthetic_fleet(k)
        tables = cost_tables.build(profiles, devices, args.tokens)
        start = time.perf_counter()
        dp_scheduler.solve(tables)
        elapsed = time.perf_counter() - start
        print(f"{k:>3} {dp_scheduler.state_count(k, args.layers):>12} "
              f"{elapsed:>10.3f}")


if __name__ == "__main__":
    main()
